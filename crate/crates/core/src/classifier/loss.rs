//! Class-weighted binary cross-entropy over fused logits.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::topics::MultiHot;

/// Probabilities are clamped into `[PROB_CLAMP, 1 - PROB_CLAMP]` before logs.
pub const PROB_CLAMP: f64 = 1e-7;

fn check_lengths<S>(probs: &[S], gold: &MultiHot, weights: &[S]) -> Result<()> {
    for actual in [gold.len(), weights.len()] {
        if actual != probs.len() {
            return Err(Error::LengthMismatch {
                expected: probs.len(),
                actual,
            });
        }
    }
    Ok(())
}

/// `-Σ_t [ w_t y_t ln p_t + (1 - y_t) ln(1 - p_t) ]`; the weight applies to
/// positives only.
pub fn weighted_bce_loss<S: Scalar>(probs: &[S], gold: &MultiHot, weights: &[S]) -> Result<S> {
    check_lengths(probs, gold, weights)?;
    let lo = S::lit(PROB_CLAMP);
    let hi = S::one() - lo;
    let mut loss = S::zero();
    for (t, &p) in probs.iter().enumerate() {
        let p = p.max(lo).min(hi);
        if gold.get(t) {
            loss = loss - weights[t] * p.ln();
        } else {
            loss = loss - (S::one() - p).ln();
        }
    }
    Ok(loss)
}

/// Derivative of [`weighted_bce_loss`] with respect to each fused logit:
/// `w_t y_t (p_t - 1) + (1 - y_t) p_t`.
pub fn logit_gradient<S: Scalar>(probs: &[S], gold: &MultiHot, weights: &[S]) -> Result<Vec<S>> {
    check_lengths(probs, gold, weights)?;
    Ok(probs
        .iter()
        .enumerate()
        .map(|(t, &p)| {
            if gold.get(t) {
                weights[t] * (p - S::one())
            } else {
                p
            }
        })
        .collect())
}
