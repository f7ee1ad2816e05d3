//! Topic constraints as a factor graph: unary factors from classifier
//! probabilities, pairwise factors from inclusion/exclusion constraints, and
//! marginal inference by belief propagation or exact enumeration.

pub mod bp;
pub mod calibrate;
pub mod exact;
pub mod graph;
pub mod potential;
pub mod set;

pub use bp::{run_belief_propagation, BpOutcome};
pub use calibrate::{calibrate, Calibration};
pub use exact::{brute_force_marginals, MAX_ENUMERATION_VARS};
pub use graph::{
    build_factor_graph, factor_message, normalize, variable_message, BpConfig, FactorGraph,
    Message, PairFactor,
};
pub use potential::{exclusion_potential, inclusion_potential, PotentialMatrix};
pub use set::{Constraint, ConstraintKind, ConstraintSet};
