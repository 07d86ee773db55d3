//! Run specifications: a TOML file and command-line flags resolved into one
//! [`RunSpec`].

use std::fmt;
use std::str::FromStr;

use qudit_bell::Family;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::angle::{parse_list, Angle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Classical,
    Facet,
    Violate,
    Optimize,
    Seesaw,
    Sweep,
    Threshold,
    Reduce,
    Mermin,
}

impl CommandName {
    pub fn name(self) -> &'static str {
        match self {
            CommandName::Classical => "classical",
            CommandName::Facet => "facet",
            CommandName::Violate => "violate",
            CommandName::Optimize => "optimize",
            CommandName::Seesaw => "seesaw",
            CommandName::Sweep => "sweep",
            CommandName::Threshold => "threshold",
            CommandName::Reduce => "reduce",
            CommandName::Mermin => "mermin",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub n: usize,
    pub d: usize,
    #[serde(serialize_with = "family_ser", deserialize_with = "family_de", default = "multipartite")]
    pub family: Family,
}

fn multipartite() -> Family {
    Family::Multipartite
}

fn family_ser<S: Serializer>(f: &Family, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(f.name())
}

fn family_de<'de, D: Deserializer<'de>>(d: D) -> Result<Family, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

/// A state, or a state family whose missing angles are optimized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    GhzQubit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<Angle>,
    },
    GhzQutrit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta1: Option<Angle>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta2: Option<Angle>,
    },
    WState {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<Angle>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        xi: Option<Angle>,
    },
    GhzMax,
    Amplitudes {
        terms: Vec<AmplitudeTerm>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeTerm {
    /// Outcome digits, party 1 first, e.g. `"101"`.
    pub basis: String,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl StateSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            StateSpec::GhzQubit { .. } => "ghz-qubit",
            StateSpec::GhzQutrit { .. } => "ghz-qutrit",
            StateSpec::WState { .. } => "w-state",
            StateSpec::GhzMax => "ghz-max",
            StateSpec::Amplitudes { .. } => "amplitudes",
        }
    }

    /// Angles of a family member, `None` when every angle is left free.
    pub fn angles(&self) -> Result<Option<Vec<Angle>>, String> {
        let given: Vec<Option<Angle>> = match self {
            StateSpec::GhzQubit { theta } => vec![*theta],
            StateSpec::GhzQutrit { theta1, theta2 } => vec![*theta1, *theta2],
            StateSpec::WState { beta, xi } => vec![*beta, *xi],
            StateSpec::GhzMax | StateSpec::Amplitudes { .. } => return Ok(Some(Vec::new())),
        };
        if given.iter().all(Option::is_none) {
            return Ok(None);
        }
        given
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .map(Some)
            .ok_or_else(|| format!("{} needs all of its angles or none", self.kind()))
    }

    fn with_angles(kind: &str, angles: Vec<Angle>) -> Result<Self, String> {
        let arity = match kind {
            "ghz-qubit" => 1,
            "ghz-qutrit" | "w-state" => 2,
            "ghz-max" => 0,
            other => return Err(format!("unknown state kind `{other}`")),
        };
        if !angles.is_empty() && angles.len() != arity {
            return Err(format!("{kind} takes {arity} angles, got {}", angles.len()));
        }
        let a = |k: usize| angles.get(k).copied();
        Ok(match kind {
            "ghz-qubit" => StateSpec::GhzQubit { theta: a(0) },
            "ghz-qutrit" => StateSpec::GhzQutrit { theta1: a(0), theta2: a(1) },
            "w-state" => StateSpec::WState { beta: a(0), xi: a(1) },
            _ => StateSpec::GhzMax,
        })
    }
}

/// Flag syntax: `ghz-qubit`, `ghz-qubit:1/4pi`, `w-state:1/2pi,1/4pi`,
/// `ghz-max`, `amplitudes:000=0.7071,111=0.7071` (optionally `101=re:im`).
impl FromStr for StateSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), Some(r)),
            None => (s.trim(), None),
        };
        if kind == "amplitudes" {
            let rest = rest.ok_or("amplitudes need `basis=coefficient` terms")?;
            let terms = rest
                .split(',')
                .map(|t| {
                    let (basis, value) = t.split_once('=').ok_or_else(|| format!("term `{t}` is not basis=value"))?;
                    let (re, im) = match value.split_once(':') {
                        Some((re, im)) => (re, im),
                        None => (value, "0"),
                    };
                    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("bad coefficient in `{t}`"));
                    Ok(AmplitudeTerm { basis: basis.trim().to_string(), re: num(re)?, im: num(im)? })
                })
                .collect::<Result<Vec<_>, String>>()?;
            return Ok(StateSpec::Amplitudes { terms });
        }
        let angles = match rest {
            Some(r) => parse_list(r).map_err(|e| e.to_string())?,
            None => Vec::new(),
        };
        StateSpec::with_angles(kind, angles)
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let StateSpec::Amplitudes { terms } = self {
            f.write_str("amplitudes:")?;
            for (k, t) in terms.iter().enumerate() {
                let sep = if k == 0 { "" } else { "," };
                write!(f, "{sep}{}={}:{}", t.basis, t.re, t.im)?;
            }
            return Ok(());
        }
        f.write_str(self.kind())?;
        if let Ok(Some(angles)) = self.angles() {
            if !angles.is_empty() {
                let list: Vec<String> = angles.iter().map(Angle::to_string).collect();
                write!(f, ":{}", list.join(","))?;
            }
        }
        Ok(())
    }
}

/// Measurements: explicit beamsplitter phase vectors, optimized phases, or
/// optimized general qubit observables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseSpec {
    Mode(PhaseModeName),
    Vectors(Vec<Vec<Angle>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseModeName {
    Optimize,
    Bloch,
}

/// Flag syntax: `optimize`, `bloch`, or vectors separated by `;` with
/// comma-separated entries, e.g. `0,-1/12pi;0,1/4pi;...`.
impl FromStr for PhaseSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "optimize" => Ok(PhaseSpec::Mode(PhaseModeName::Optimize)),
            "bloch" => Ok(PhaseSpec::Mode(PhaseModeName::Bloch)),
            text => text
                .split(';')
                .map(|v| parse_list(v).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()
                .map(PhaseSpec::Vectors),
        }
    }
}

/// Grid flag syntax: points separated by `;`, coordinates by `,`.
pub fn parse_grid(s: &str) -> Result<Vec<Vec<Angle>>, String> {
    s.split(';').map(|p| parse_list(p).map_err(|e| e.to_string())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSpec {
    pub starts: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iterations: usize,
    pub initial_step: f64,
}

impl Default for OptimizerSpec {
    fn default() -> Self {
        let c = qudit_bell::OptimizerConfig::default();
        OptimizerSpec {
            starts: c.starts,
            seed: c.seed,
            tol: c.tolerance,
            max_iterations: c.max_iterations,
            initial_step: c.initial_step,
        }
    }
}

impl OptimizerSpec {
    pub fn config(&self) -> qudit_bell::OptimizerConfig {
        qudit_bell::OptimizerConfig {
            starts: self.starts,
            seed: self.seed,
            tolerance: self.tol,
            max_iterations: self.max_iterations,
            initial_step: self.initial_step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunOptions {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Largest number of deterministic strategies enumerated.
    pub budget: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { threads: None, budget: qudit_bell::EnumerationBudget::default().0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub format: Format,
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub command: CommandName,
    /// Observed Bell value for `threshold`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<PhaseSpec>,
    /// Family angles for `sweep`, one row per grid point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<Vec<Angle>>>,
    pub scenario: ScenarioSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    #[serde(default)]
    pub optimizer: OptimizerSpec,
    #[serde(default)]
    pub run: RunOptions,
    #[serde(default)]
    pub output: OutputSpec,
}

impl RunSpec {
    pub fn new(command: CommandName, n: usize, d: usize) -> Self {
        RunSpec {
            command,
            violation: None,
            phases: None,
            grid: None,
            scenario: ScenarioSpec { n, d, family: Family::Multipartite },
            state: None,
            optimizer: OptimizerSpec::default(),
            run: RunOptions::default(),
            output: OutputSpec::default(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run specs always serialize")
    }

    pub fn from_toml(text: &str) -> Result<Self, ParseError> {
        let partial: PartialSpec = toml::from_str(text).map_err(|e| ParseError::new("config", e.to_string()))?;
        partial.resolve(&Overrides::default())
    }
}

/// A config file may omit the command and scenario when flags supply them.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialSpec {
    command: Option<CommandName>,
    violation: Option<f64>,
    phases: Option<PhaseSpec>,
    grid: Option<Vec<Vec<Angle>>>,
    scenario: Option<PartialScenario>,
    state: Option<StateSpec>,
    #[serde(default)]
    optimizer: OptimizerSpec,
    #[serde(default)]
    run: RunOptions,
    #[serde(default)]
    output: OutputSpec,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialScenario {
    n: Option<usize>,
    d: Option<usize>,
    #[serde(default, deserialize_with = "family_de_opt")]
    family: Option<Family>,
}

fn family_de_opt<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Family>, D::Error> {
    family_de(d).map(Some)
}

/// Values given on the command line; each one replaces the file's value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub command: Option<CommandName>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub family: Option<String>,
    pub state: Option<String>,
    pub phases: Option<String>,
    pub grid: Option<String>,
    pub violation: Option<f64>,
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    pub tol: Option<f64>,
    pub max_iterations: Option<usize>,
    pub threads: Option<usize>,
    pub budget: Option<u64>,
    pub out: Option<String>,
    pub format: Option<Format>,
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{location}: {message}")]
pub struct ParseError {
    /// `config` (with the TOML line and column in the message) or the flag name.
    pub location: String,
    pub message: String,
}

impl ParseError {
    fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError { location: location.into(), message: message.into() }
    }
}

/// Three-party scenario implied by a state family, if any.
fn implied_scenario(state: Option<&StateSpec>) -> Option<(usize, usize)> {
    match state? {
        StateSpec::GhzQubit { .. } | StateSpec::WState { .. } => Some((3, 2)),
        StateSpec::GhzQutrit { .. } => Some((3, 3)),
        _ => None,
    }
}

impl PartialSpec {
    fn resolve(self, flags: &Overrides) -> Result<RunSpec, ParseError> {
        let command = flags
            .command
            .or(self.command)
            .ok_or_else(|| ParseError::new("command", "no command given"))?;
        let state = match &flags.state {
            Some(s) => Some(s.parse::<StateSpec>().map_err(|e| ParseError::new("--state", e))?),
            None => self.state,
        };
        if let Some(s) = &state {
            s.angles().map_err(|e| ParseError::new("state", e))?;
        }
        let scenario = self.scenario.unwrap_or_default();
        let implied = implied_scenario(state.as_ref());
        let n = flags.n.or(scenario.n).or(implied.map(|s| s.0)).or(match command {
            CommandName::Threshold | CommandName::Reduce | CommandName::Mermin => Some(3),
            _ => None,
        });
        let d = flags.d.or(scenario.d).or(implied.map(|s| s.1)).or(match command {
            CommandName::Threshold | CommandName::Mermin => Some(2),
            _ => None,
        });
        let n = n.ok_or_else(|| ParseError::new("--n", "number of parties is required"))?;
        let d = d.ok_or_else(|| ParseError::new("--d", "number of outcomes is required"))?;
        if n < 2 {
            return Err(ParseError::new("--n", format!("need N >= 2, got {n}")));
        }
        if d < 2 {
            return Err(ParseError::new("--d", format!("need d >= 2, got {d}")));
        }
        let family = match &flags.family {
            Some(f) => f.parse().map_err(|e: qudit_bell::Error| ParseError::new("--family", e.to_string()))?,
            None => scenario.family.unwrap_or(Family::Multipartite),
        };
        let phases = match &flags.phases {
            Some(p) => Some(p.parse().map_err(|e| ParseError::new("--phases", e))?),
            None => self.phases,
        };
        let grid = match &flags.grid {
            Some(g) => Some(parse_grid(g).map_err(|e| ParseError::new("--grid", e))?),
            None => self.grid,
        };
        let mut optimizer = self.optimizer;
        optimizer.seed = flags.seed.unwrap_or(optimizer.seed);
        optimizer.starts = flags.starts.unwrap_or(optimizer.starts);
        optimizer.tol = flags.tol.unwrap_or(optimizer.tol);
        optimizer.max_iterations = flags.max_iterations.unwrap_or(optimizer.max_iterations);
        if optimizer.starts == 0 {
            return Err(ParseError::new("--starts", "need at least one start"));
        }
        if !(optimizer.tol.is_finite() && optimizer.tol >= 0.0) {
            return Err(ParseError::new("--tol", "tolerance must be a non-negative number"));
        }
        let mut run = self.run;
        run.threads = flags.threads.or(run.threads);
        run.budget = flags.budget.unwrap_or(run.budget);
        if run.threads == Some(0) {
            return Err(ParseError::new("--threads", "need at least one thread"));
        }
        let mut output = self.output;
        output.path = flags.out.clone().or(output.path);
        output.format = flags.format.unwrap_or(output.format);
        output.no_timestamp |= flags.no_timestamp;
        Ok(RunSpec {
            command,
            violation: flags.violation.or(self.violation),
            phases,
            grid,
            scenario: ScenarioSpec { n, d, family },
            state,
            optimizer,
            run,
            output,
        })
    }
}

/// Resolve an optional TOML config and command-line flags into a [`RunSpec`].
pub fn parse_runspec(config: Option<&str>, flags: &Overrides) -> Result<RunSpec, ParseError> {
    let partial = match config {
        Some(text) => toml::from_str::<PartialSpec>(text).map_err(|e| ParseError::new("config", e.to_string()))?,
        None => PartialSpec::default(),
    };
    partial.resolve(flags)
}
