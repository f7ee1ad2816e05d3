//! Evaluation: per-topic average precision, median over topics, chatter
//! counts above a threshold and constraint-violation counts.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constraints::{ConstraintKind, ConstraintSet};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::topics::{MultiHot, TopicSpace};

/// Default probability threshold for chatter and violation counts.
pub const DEFAULT_THRESHOLD: f64 = 0.9;

/// Mean of precision@k over the ranks k of the positives, ranking by score
/// descending with ties broken by original index.
pub fn average_precision<S: Scalar>(scores: &[S], labels: &[bool]) -> Result<S> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: scores.len(),
            actual: labels.len(),
        });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].as_f64().total_cmp(&scores[a].as_f64()).then(a.cmp(&b)));
    let mut hits = 0usize;
    let mut sum = 0.0f64;
    for (rank, &i) in order.iter().enumerate() {
        if labels[i] {
            hits += 1;
            sum += hits as f64 / (rank + 1) as f64;
        }
    }
    if hits == 0 {
        return Err(Error::NoPositives);
    }
    Ok(S::lit(sum / hits as f64))
}

/// Median; the mean of the two middle values for even counts.
pub fn median_aps<S: Scalar>(values: &[S]) -> Result<S> {
    if values.is_empty() {
        return Err(Error::EmptyInput("median of no values"));
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.as_f64().total_cmp(&b.as_f64()));
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / S::lit(2.0)
    })
}

/// Number of `(document, topic)` entries strictly above `threshold`.
pub fn chatter_count<S: Scalar>(predictions: &[Vec<S>], threshold: S) -> usize {
    predictions
        .iter()
        .flatten()
        .filter(|&&p| p > threshold)
        .count()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violations {
    pub inclusion: usize,
    pub exclusion: usize,
}

impl Violations {
    pub fn total(&self) -> usize {
        self.inclusion + self.exclusion
    }
}

/// Inclusion violation: narrower topic above `threshold` while the broader
/// one is not. Exclusion violation: both topics above `threshold`. Custom
/// potentials are not counted.
pub fn violation_count<S: Scalar>(
    predictions: &[Vec<S>],
    constraints: &ConstraintSet,
    threshold: S,
) -> Violations {
    let mut v = Violations::default();
    for p in predictions {
        for c in constraints.constraints() {
            let (a, b) = (p[c.first] > threshold, p[c.second] > threshold);
            match c.kind {
                ConstraintKind::Includes if b && !a => v.inclusion += 1,
                ConstraintKind::Excludes if a && b => v.exclusion += 1,
                _ => {}
            }
        }
    }
    v
}

/// Random scores scaled by each topic's prevalence in `train`: a
/// label-prior baseline that carries no per-document signal.
pub fn label_prior_baseline<S: Scalar>(train: &[MultiHot], documents: usize, seed: u64) -> Vec<Vec<S>> {
    let topics = train.first().map_or(0, MultiHot::len);
    let mut prior = vec![0.0f64; topics];
    for y in train {
        for t in y.ones() {
            prior[t] += 1.0;
        }
    }
    let n = train.len().max(1) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..documents)
        .map(|_| {
            prior
                .iter()
                .map(|&c| S::lit(c / n * rng.gen::<f64>()))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport<S> {
    /// AP per topic with at least one positive.
    pub per_topic_ap: BTreeMap<String, S>,
    pub median_aps: Option<S>,
    /// `median_aps` on a 0-100 scale.
    pub median_aps_percent: Option<S>,
    pub documents: usize,
    pub chatter_documents: usize,
    pub chatter_count: usize,
    pub threshold: S,
    pub violations: Violations,
}

impl<S: Scalar> EvalReport<S> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Tab-separated `(topic, AP)` rows sorted by topic name.
    pub fn to_table(&self) -> String {
        let mut out = String::from("topic\tap\n");
        for (topic, ap) in &self.per_topic_ap {
            out.push_str(&format!("{topic}\t{ap}\n"));
        }
        out
    }
}

/// Inputs for [`evaluate`]. Predictions are probability vectors over `space`.
pub struct EvalInputs<'a, S> {
    pub space: &'a TopicSpace,
    pub predictions: &'a [Vec<S>],
    pub gold: &'a [MultiHot],
    pub chatter_predictions: &'a [Vec<S>],
    pub constraints: Option<&'a ConstraintSet>,
    pub threshold: f64,
}

pub fn evaluate<S: Scalar>(inputs: EvalInputs<'_, S>) -> Result<EvalReport<S>> {
    let EvalInputs {
        space,
        predictions,
        gold,
        chatter_predictions,
        constraints,
        threshold,
    } = inputs;
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "threshold {threshold} must lie in (0, 1)"
        )));
    }
    if predictions.len() != gold.len() {
        return Err(Error::LengthMismatch {
            expected: predictions.len(),
            actual: gold.len(),
        });
    }
    for p in predictions.iter().chain(chatter_predictions) {
        if p.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                actual: p.len(),
            });
        }
    }

    let mut per_topic_ap = BTreeMap::new();
    if !predictions.is_empty() {
        let mut scores = vec![S::zero(); predictions.len()];
        let mut labels = vec![false; predictions.len()];
        for (t, name) in space.names().iter().enumerate() {
            for (i, (p, y)) in predictions.iter().zip(gold).enumerate() {
                scores[i] = p[t];
                labels[i] = y.get(t);
            }
            match average_precision(&scores, &labels) {
                Ok(ap) => {
                    per_topic_ap.insert(name.clone(), ap);
                }
                Err(Error::NoPositives) => {}
                Err(e) => return Err(e),
            }
        }
        if per_topic_ap.is_empty() {
            return Err(Error::NoEvaluableTopic);
        }
    }
    let aps: Vec<S> = per_topic_ap.values().copied().collect();
    let median = if aps.is_empty() {
        None
    } else {
        Some(median_aps(&aps)?)
    };
    let tau = S::lit(threshold);
    let violations = match constraints {
        Some(c) => {
            let mut v = violation_count(predictions, c, tau);
            let w = violation_count(chatter_predictions, c, tau);
            v.inclusion += w.inclusion;
            v.exclusion += w.exclusion;
            v
        }
        None => Violations::default(),
    };
    Ok(EvalReport {
        per_topic_ap,
        median_aps: median,
        median_aps_percent: median.map(|m| m * S::lit(100.0)),
        documents: predictions.len(),
        chatter_documents: chatter_predictions.len(),
        chatter_count: chatter_count(chatter_predictions, tau),
        threshold: tau,
        violations,
    })
}
