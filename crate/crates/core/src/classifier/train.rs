//! Per-example SGD on class-weighted binary cross-entropy.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::hashing::DEFAULT_DIM;
use crate::classifier::loss::weighted_bce_loss;
use crate::classifier::model::{EncodedDoc, LinearDualModel};
use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::features::FeatureToggles;
use crate::scalar::Scalar;
use crate::topics::{MultiHot, TopicSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelSource {
    Gold,
    Weak,
}

impl LabelSource {
    pub fn labels<'a>(&self, doc: &'a Document) -> Option<&'a BTreeSet<String>> {
        match self {
            LabelSource::Gold => doc.gold_labels.as_ref(),
            LabelSource::Weak => doc.weak_labels.as_ref(),
        }
    }
}

impl std::str::FromStr for LabelSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gold" => Ok(LabelSource::Gold),
            "weak" => Ok(LabelSource::Weak),
            other => Err(Error::InvalidConfig(format!(
                "label source must be `gold` or `weak`, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub dim: usize,
    /// Cap on the per-topic positive weight.
    pub max_class_weight: f64,
    /// Optional L2 coefficient, applied to the weights touched by each update.
    pub l2: f64,
    pub seed: u64,
    pub toggles: FeatureToggles,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 5,
            learning_rate: 0.1,
            dim: DEFAULT_DIM,
            max_class_weight: 100.0,
            l2: 0.0,
            seed: 0,
            toggles: FeatureToggles::all(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning rate must be positive".into()));
        }
        if self.dim < 2 || self.dim > u32::MAX as usize + 1 {
            return Err(Error::InvalidConfig(format!(
                "dimensionality {} out of range",
                self.dim
            )));
        }
        if !(self.max_class_weight > 0.0 && self.max_class_weight.is_finite()) {
            return Err(Error::InvalidConfig("class weight cap must be positive".into()));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(Error::InvalidConfig("l2 must be non-negative".into()));
        }
        Ok(())
    }
}

/// A document paired with its target label set.
#[derive(Debug, Clone, Copy)]
pub struct Example<'a> {
    pub doc: &'a Document,
    pub labels: &'a BTreeSet<String>,
}

/// Collects `(doc, labels)` pairs; every document must carry labels from the
/// chosen source.
pub fn examples_from(corpus: &Corpus, source: LabelSource) -> Result<Vec<Example<'_>>> {
    corpus
        .iter()
        .map(|doc| {
            source
                .labels(doc)
                .map(|labels| Example { doc, labels })
                .ok_or_else(|| Error::MissingLabels(doc.id.clone()))
        })
        .collect()
}

/// Per-topic positive weights `min(N / (2 N_t), cap)`, with `cap` for topics
/// without positives.
pub fn class_weights<S: Scalar>(targets: &[MultiHot], topics: usize, cap: f64) -> Vec<S> {
    let n = targets.len() as f64;
    let mut positives = vec![0usize; topics];
    for y in targets {
        for t in y.ones() {
            positives[t] += 1;
        }
    }
    positives
        .into_iter()
        .map(|p| {
            if p == 0 {
                S::lit(cap)
            } else {
                S::lit((n / (2.0 * p as f64)).min(cap))
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport<S> {
    pub class_weights: Vec<S>,
    /// Mean loss over the training set after each epoch.
    pub epoch_losses: Vec<S>,
}

/// Trains both heads jointly: each example's fused-logit gradient updates
/// the content and the author weights. The visit order is reshuffled every
/// epoch from `config.seed`.
pub fn train_examples<S: Scalar>(
    examples: &[Example<'_>],
    space: &TopicSpace,
    config: &TrainConfig,
    init: Option<LinearDualModel<S>>,
) -> Result<(LinearDualModel<S>, TrainReport<S>)> {
    config.validate()?;
    if examples.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut model = match init {
        Some(mut m) => {
            m.check_compatible(space, config.dim)?;
            m.set_toggles(config.toggles);
            m
        }
        None => LinearDualModel::zeros(space.clone(), config.dim, config.toggles),
    };

    let targets: Vec<MultiHot> = examples
        .iter()
        .map(|e| space.encode(e.labels))
        .collect::<Result<_>>()?;
    let encoded: Vec<EncodedDoc<S>> = examples.iter().map(|e| model.encode(e.doc)).collect();
    let weights: Vec<S> = class_weights(&targets, space.len(), config.max_class_weight);

    let lr = S::lit(config.learning_rate);
    let l2 = S::lit(config.l2);
    let step = -lr;
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut epoch_losses = Vec::with_capacity(config.epochs);

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let x = &encoded[i];
            let grad = model.gradient(x, &targets[i], &weights)?;
            model.content.apply(&x.content, &grad.logits, step, l2);
            model.author.apply(&x.author, &grad.logits, step, l2);
        }
        let mean = mean_loss(&model, &encoded, &targets, &weights)?;
        if !mean.is_finite() || !model.is_finite() {
            return Err(Error::NonFinite("training diverged".into()));
        }
        epoch_losses.push(mean);
    }

    Ok((
        model,
        TrainReport {
            class_weights: weights,
            epoch_losses,
        },
    ))
}

fn mean_loss<S: Scalar>(
    model: &LinearDualModel<S>,
    encoded: &[EncodedDoc<S>],
    targets: &[MultiHot],
    weights: &[S],
) -> Result<S> {
    let mut total = S::zero();
    for (x, y) in encoded.iter().zip(targets) {
        total = total + weighted_bce_loss(&model.probabilities_encoded(x), y, weights)?;
    }
    Ok(total / S::lit(encoded.len() as f64))
}

/// Trains on one corpus with labels taken from `source`.
pub fn train<S: Scalar>(
    corpus: &Corpus,
    source: LabelSource,
    space: &TopicSpace,
    config: &TrainConfig,
    init: Option<LinearDualModel<S>>,
) -> Result<(LinearDualModel<S>, TrainReport<S>)> {
    let examples = examples_from(corpus, source)?;
    train_examples(&examples, space, config, init)
}
