//! Topic classification for short social posts: keyword weak labels, a
//! dual text/author linear classifier, and constraint-aware calibration of
//! its per-topic probabilities.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, with `F32` variants alongside.

pub mod classifier;
pub mod cli;
pub mod constraints;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod rules;
pub mod scalar;
pub mod synth;
pub mod topics;

pub use classifier::{
    load_model, save_model, train, train_examples, LabelSource, LinearDualModel, TrainConfig,
    TrainReport,
};
pub use constraints::{
    brute_force_marginals, calibrate, run_belief_propagation, BpConfig, Calibration,
    ConstraintKind, ConstraintSet, FactorGraph, PotentialMatrix,
};
pub use corpus::{load_corpus, split_user_disjoint, Author, Corpus, Document, Hyperlink, Split};
pub use error::{Error, Result};
pub use eval::{average_precision, chatter_count, median_aps, violation_count, EvalReport, Violations};
pub use features::{assemble, FeatureToggles};
pub use rules::{compile_rules, partition_chatter, weak_label, RuleSet};
pub use scalar::Scalar;
pub use topics::{encode_labels, register_topics, MultiHot, TopicSpace};

pub type Model = LinearDualModel<f64>;
pub type ModelF32 = LinearDualModel<f32>;
pub type Report = TrainReport<f64>;
pub type ReportF32 = TrainReport<f32>;
pub type Graph = FactorGraph<f64>;
pub type GraphF32 = FactorGraph<f32>;
pub type Potential = PotentialMatrix<f64>;
pub type PotentialF32 = PotentialMatrix<f32>;
pub type CalibrationF64 = Calibration<f64>;
pub type CalibrationF32 = Calibration<f32>;
pub type Evaluation = EvalReport<f64>;
pub type EvaluationF32 = EvalReport<f32>;
