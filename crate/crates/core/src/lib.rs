//! Correlation-function Bell inequalities for `N` parties measuring two
//! `d`-outcome observables each.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; file formats, the command line and thread pools
//! live in the `qudit-bell-workbench` companion crate.
//!
//! * [`scenario`] and [`expression`]: correlation weights and the four-term
//!   Bell expressions.
//! * [`table`]: joint probability tables, generic over exact rationals and
//!   `f64`.
//! * [`strategy`], [`polytope`] and [`rank`]: deterministic local strategies,
//!   exact classical maxima and facet certification.
//! * [`measurement`], [`state`], [`operator`] and [`noise`]: the multiport
//!   beamsplitter experiment.
//! * [`simplex`] and [`violation`]: multi-start phase search and see-saw.
//! * [`mermin`]: the three-qubit Mermin inequality with general qubit
//!   observables.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod expression;
pub mod linalg;
pub mod measurement;
pub mod mermin;
pub mod noise;
pub mod operator;
pub mod polytope;
pub mod rank;
pub mod scenario;
pub mod seed;
pub mod simplex;
pub mod state;
pub mod strategy;
pub mod table;
pub mod violation;

pub use error::{Error, Result};
pub use expression::{BellExpression, Family, Term};
pub use measurement::{beamsplitter_unitary, joint_probabilities, quantum_bell_value, PhaseConfiguration};
pub use mermin::{mermin3_max, mermin3_value, BlochSettings, MerminResult};
pub use noise::noise_threshold;
pub use operator::{max_eigenpair, BellOperator, Eigenpair};
pub use polytope::{classical_maximum, facet_check, ClassicalSummary, FacetReport};
pub use scenario::{euclid_mod, weight_bipartite, weight_multipartite, Rational, Scenario, Setting};
pub use state::StateVector;
pub use strategy::{DeterministicStrategy, EnumerationBudget};
pub use table::{Probability, ProbabilityTable};
pub use violation::{
    optimize_phases, optimize_qubit_observables, optimize_state_family, seesaw, sweep, Measurements, MultiStart,
    OptimizationResult, OptimizerConfig, PhaseMode, StateFamily, SweepRow,
};

pub use num_complex::Complex64;
