use proptest::prelude::*;
use qudit_bell::Family;
use qudit_bell_workbench::angle::Angle;
use qudit_bell_workbench::spec::{
    AmplitudeTerm, CommandName, Format, OptimizerSpec, OutputSpec, PhaseModeName, PhaseSpec, RunOptions, RunSpec,
    ScenarioSpec, StateSpec,
};

fn angle() -> impl Strategy<Value = Angle> {
    prop_oneof![
        (-10.0f64..10.0).prop_map(Angle::Radians),
        (-24i64..24, 1i64..24).prop_map(|(num, den)| Angle::PiFraction { num, den }),
    ]
}

fn state() -> impl Strategy<Value = Option<StateSpec>> {
    prop_oneof![
        Just(None),
        Just(Some(StateSpec::GhzMax)),
        proptest::option::of(angle()).prop_map(|theta| Some(StateSpec::GhzQubit { theta })),
        (angle(), angle()).prop_map(|(a, b)| Some(StateSpec::WState { beta: Some(a), xi: Some(b) })),
        proptest::collection::vec(("[0-2]{3}", -1.0f64..1.0, -1.0f64..1.0), 1..5)
            .prop_map(|t| Some(StateSpec::Amplitudes {
                terms: t.into_iter().map(|(basis, re, im)| AmplitudeTerm { basis, re, im }).collect()
            })),
    ]
}

fn phases() -> impl Strategy<Value = Option<PhaseSpec>> {
    prop_oneof![
        Just(None),
        Just(Some(PhaseSpec::Mode(PhaseModeName::Optimize))),
        Just(Some(PhaseSpec::Mode(PhaseModeName::Bloch))),
        proptest::collection::vec(proptest::collection::vec(angle(), 2..4), 4..7).prop_map(|v| Some(PhaseSpec::Vectors(v))),
    ]
}

fn command() -> impl Strategy<Value = CommandName> {
    prop_oneof![
        Just(CommandName::Classical),
        Just(CommandName::Facet),
        Just(CommandName::Violate),
        Just(CommandName::Optimize),
        Just(CommandName::Seesaw),
        Just(CommandName::Sweep),
        Just(CommandName::Threshold),
        Just(CommandName::Reduce),
        Just(CommandName::Mermin),
    ]
}

prop_compose! {
    fn run_spec()(
        command in command(),
        n in 2usize..6,
        d in 2usize..8,
        legacy in any::<bool>(),
        state in state(),
        phases in phases(),
        grid in proptest::option::of(proptest::collection::vec(proptest::collection::vec(angle(), 1..3), 1..4)),
        violation in proptest::option::of(0.1f64..4.0),
        starts in 1usize..300,
        seed in any::<u64>(),
        tol in 0.0f64..1e-3,
        threads in proptest::option::of(1usize..16),
        path in proptest::option::of("[a-z]{1,8}\\.json"),
        csv in any::<bool>(),
        no_timestamp in any::<bool>(),
    ) -> RunSpec {
        RunSpec {
            command,
            violation,
            phases,
            grid,
            scenario: ScenarioSpec { n, d, family: if legacy { Family::BipartiteLegacy } else { Family::Multipartite } },
            state,
            optimizer: OptimizerSpec { starts, seed, tol, ..Default::default() },
            run: RunOptions { threads, budget: 1_000_000 },
            output: OutputSpec { path, format: if csv { Format::Csv } else { Format::Json }, no_timestamp },
        }
    }
}

proptest! {
    #[test]
    fn toml_text_round_trips(spec in run_spec()) {
        let text = spec.to_toml();
        prop_assert_eq!(RunSpec::from_toml(&text).unwrap(), spec);
    }
}
