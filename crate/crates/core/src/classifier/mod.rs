//! Dual linear encoder over hashed n-grams, fused by logit addition.

pub mod hashing;
pub mod io;
pub mod loss;
pub mod model;
pub mod train;

pub use hashing::{featurize, hash_str, SparseFeatureVector, DEFAULT_DIM, HASH_ID};
pub use io::{load_model, save_model};
pub use loss::{logit_gradient, weighted_bce_loss, PROB_CLAMP};
pub use model::{
    combine_logits, predict_logits, to_probabilities, EncodedDoc, HeadLogits, LinearDualModel,
    LinearHead, ModelGradient,
};
pub use train::{
    class_weights, examples_from, train, train_examples, Example, LabelSource, TrainConfig,
    TrainReport,
};
