//! Two linear heads over hashed features whose logits are summed and squashed.

use std::collections::BTreeMap;

use crate::classifier::hashing::{featurize, SparseFeatureVector};
use crate::classifier::loss::logit_gradient;
use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::features::{assemble_author_input, assemble_content_input, FeatureToggles};
use crate::scalar::{sigmoid, Scalar};
use crate::topics::{MultiHot, TopicSpace};

/// One encoder: a `topics x dim` weight matrix stored sparsely by feature
/// (only features seen in training have a row) plus a bias per topic.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearHead<S> {
    pub(crate) bias: Vec<S>,
    pub(crate) rows: BTreeMap<u32, Vec<S>>,
}

impl<S: Scalar> LinearHead<S> {
    pub fn zeros(topics: usize) -> Self {
        Self {
            bias: vec![S::zero(); topics],
            rows: BTreeMap::new(),
        }
    }

    pub fn bias(&self) -> &[S] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [S] {
        &mut self.bias
    }

    /// Weight for `(topic, feature)`; zero when the feature has no row.
    pub fn weight(&self, topic: usize, feature: u32) -> S {
        self.rows
            .get(&feature)
            .map_or(S::zero(), |row| row[topic])
    }

    pub fn set_weight(&mut self, topic: usize, feature: u32, value: S) {
        let n = self.bias.len();
        self.rows
            .entry(feature)
            .or_insert_with(|| vec![S::zero(); n])[topic] = value;
    }

    /// Number of features with a stored row.
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = (u32, &[S])> {
        self.rows.iter().map(|(&f, r)| (f, r.as_slice()))
    }

    pub fn logits(&self, x: &SparseFeatureVector<S>) -> Vec<S> {
        let mut out = self.bias.clone();
        for (feature, value) in x.iter() {
            if let Some(row) = self.rows.get(&feature) {
                for (o, &w) in out.iter_mut().zip(row) {
                    *o = *o + w * value;
                }
            }
        }
        out
    }

    /// Adds `scale * outer(grad, x)` to the weights and `scale * grad` to the
    /// bias; with `l2 > 0` touched weights also decay by `scale * l2 * w`.
    pub(crate) fn apply(&mut self, x: &SparseFeatureVector<S>, grad: &[S], scale: S, l2: S) {
        let n = self.bias.len();
        for (b, &g) in self.bias.iter_mut().zip(grad) {
            *b = *b + scale * g;
        }
        for (feature, value) in x.iter() {
            let row = self
                .rows
                .entry(feature)
                .or_insert_with(|| vec![S::zero(); n]);
            for (w, &g) in row.iter_mut().zip(grad) {
                *w = *w + scale * (g * value + l2 * *w);
            }
        }
    }

    fn all_finite(&self) -> bool {
        self.bias.iter().all(|b| b.is_finite())
            && self.rows.values().flatten().all(|w| w.is_finite())
    }
}

/// Hashed features of one document for both heads.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDoc<S> {
    pub content: SparseFeatureVector<S>,
    pub author: SparseFeatureVector<S>,
}

/// Content and author logits for one document.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadLogits<S> {
    pub content: Vec<S>,
    pub author: Vec<S>,
}

/// Gradient of the loss for a single example. Weight gradients are listed
/// for the active features only; every other weight has zero gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGradient<S> {
    pub logits: Vec<S>,
    pub content: Vec<(u32, Vec<S>)>,
    pub author: Vec<(u32, Vec<S>)>,
}

impl<S: Scalar> ModelGradient<S> {
    pub fn content_weight(&self, topic: usize, feature: u32) -> S {
        lookup(&self.content, topic, feature)
    }

    pub fn author_weight(&self, topic: usize, feature: u32) -> S {
        lookup(&self.author, topic, feature)
    }

    /// Bias gradients equal the logit gradient for both heads.
    pub fn bias(&self) -> &[S] {
        &self.logits
    }
}

fn lookup<S: Scalar>(rows: &[(u32, Vec<S>)], topic: usize, feature: u32) -> S {
    rows.binary_search_by_key(&feature, |(f, _)| *f)
        .map_or(S::zero(), |i| rows[i].1[topic])
}

fn outer<S: Scalar>(x: &SparseFeatureVector<S>, g: &[S]) -> Vec<(u32, Vec<S>)> {
    x.iter()
        .map(|(f, v)| (f, g.iter().map(|&gt| gt * v).collect()))
        .collect()
}

/// Content head (logits over post text and attached cues) and author head
/// (logits over the author profile), fused by addition.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDualModel<S> {
    pub(crate) topics: TopicSpace,
    pub(crate) dim: usize,
    pub(crate) toggles: FeatureToggles,
    pub(crate) content: LinearHead<S>,
    pub(crate) author: LinearHead<S>,
}

impl<S: Scalar> LinearDualModel<S> {
    pub fn zeros(topics: TopicSpace, dim: usize, toggles: FeatureToggles) -> Self {
        assert!(dim >= 2, "feature dimensionality must be at least 2");
        let n = topics.len();
        Self {
            topics,
            dim,
            toggles,
            content: LinearHead::zeros(n),
            author: LinearHead::zeros(n),
        }
    }

    pub fn topics(&self) -> &TopicSpace {
        &self.topics
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn toggles(&self) -> FeatureToggles {
        self.toggles
    }

    pub fn set_toggles(&mut self, toggles: FeatureToggles) {
        self.toggles = toggles;
    }

    pub fn content(&self) -> &LinearHead<S> {
        &self.content
    }

    pub fn content_mut(&mut self) -> &mut LinearHead<S> {
        &mut self.content
    }

    pub fn author(&self) -> &LinearHead<S> {
        &self.author
    }

    pub fn author_mut(&mut self) -> &mut LinearHead<S> {
        &mut self.author
    }

    pub fn is_finite(&self) -> bool {
        self.content.all_finite() && self.author.all_finite()
    }

    pub fn encode(&self, doc: &Document) -> EncodedDoc<S> {
        let content = featurize(&assemble_content_input(doc, self.toggles), self.dim);
        let author = if self.toggles.author {
            featurize(&assemble_author_input(doc), self.dim)
        } else {
            SparseFeatureVector::empty(self.dim)
        };
        EncodedDoc { content, author }
    }

    pub fn logits_encoded(&self, x: &EncodedDoc<S>) -> HeadLogits<S> {
        HeadLogits {
            content: self.content.logits(&x.content),
            author: self.author.logits(&x.author),
        }
    }

    pub fn predict_logits(&self, doc: &Document) -> HeadLogits<S> {
        self.logits_encoded(&self.encode(doc))
    }

    /// Fused probabilities for an encoded document.
    pub fn probabilities_encoded(&self, x: &EncodedDoc<S>) -> Vec<S> {
        let HeadLogits { content, author } = self.logits_encoded(x);
        content
            .iter()
            .zip(&author)
            .map(|(&a, &b)| sigmoid(a + b))
            .collect()
    }

    pub fn predict_probabilities(&self, doc: &Document) -> Vec<S> {
        self.probabilities_encoded(&self.encode(doc))
    }

    /// Loss gradient for one example; both heads receive the fused-logit
    /// gradient.
    pub fn gradient(
        &self,
        x: &EncodedDoc<S>,
        gold: &MultiHot,
        weights: &[S],
    ) -> Result<ModelGradient<S>> {
        let probs = self.probabilities_encoded(x);
        let logits = logit_gradient(&probs, gold, weights)?;
        Ok(ModelGradient {
            content: outer(&x.content, &logits),
            author: outer(&x.author, &logits),
            logits,
        })
    }

    /// Ensures `other` shares topics and dimensionality with `self`.
    pub fn check_compatible(&self, topics: &TopicSpace, dim: usize) -> Result<()> {
        if self.topics != *topics {
            return Err(Error::ModelMismatch(format!(
                "model has {} topics that differ from the {} given",
                self.topics.len(),
                topics.len()
            )));
        }
        if self.dim != dim {
            return Err(Error::ModelMismatch(format!(
                "model dimensionality {} differs from {dim}",
                self.dim
            )));
        }
        Ok(())
    }
}

/// Element-wise sum of content and author logits.
pub fn combine_logits<S: Scalar>(content: &[S], author: &[S]) -> Result<Vec<S>> {
    if content.len() != author.len() {
        return Err(Error::LengthMismatch {
            expected: content.len(),
            actual: author.len(),
        });
    }
    Ok(content.iter().zip(author).map(|(&a, &b)| a + b).collect())
}

pub fn to_probabilities<S: Scalar>(logits: &[S]) -> Vec<S> {
    logits.iter().map(|&z| sigmoid(z)).collect()
}

/// Free-function form of [`LinearDualModel::predict_logits`].
pub fn predict_logits<S: Scalar>(model: &LinearDualModel<S>, doc: &Document) -> HeadLogits<S> {
    model.predict_logits(doc)
}
