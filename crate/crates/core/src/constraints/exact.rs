//! Exact marginals by enumerating every joint assignment of each connected
//! component.

use crate::constraints::graph::{check_indices, check_probabilities, clamp_probability};
use crate::constraints::potential::PotentialMatrix;
use crate::constraints::set::ConstraintSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest component [`brute_force_marginals`] will enumerate.
pub const MAX_ENUMERATION_VARS: usize = 25;

/// Marginals `P(v = 1)` for the topics of one component, in `component`
/// order. `constraints` must only touch topics inside `component`.
pub(crate) fn enumerate_component<S: Scalar>(
    probs: &[S],
    component: &[usize],
    constraints: &ConstraintSet,
    eps: S,
    limit: usize,
) -> Result<Vec<S>> {
    let k = component.len();
    if k > limit {
        return Err(Error::ComponentTooLarge { size: k, limit });
    }
    let local = |t: usize| component.binary_search(&t).expect("topic inside component");
    let pairs: Vec<(usize, usize, PotentialMatrix<S>)> = constraints
        .constraints()
        .iter()
        .map(|c| (local(c.first), local(c.second), c.potential()))
        .collect();
    let unary: Vec<[S; 2]> = component
        .iter()
        .map(|&t| {
            let p = clamp_probability(probs[t], eps);
            [S::one() - p, p]
        })
        .collect();

    let mut z = S::zero();
    let mut mass = vec![S::zero(); k];
    for state in 0u64..(1u64 << k) {
        let bit = |v: usize| ((state >> v) & 1) as usize;
        let mut w = S::one();
        for (v, u) in unary.iter().enumerate() {
            w = w * u[bit(v)];
        }
        for (a, b, phi) in &pairs {
            w = w * phi.get(bit(*a), bit(*b));
        }
        if w == S::zero() {
            continue;
        }
        z = z + w;
        for (v, m) in mass.iter_mut().enumerate() {
            if bit(v) == 1 {
                *m = *m + w;
            }
        }
    }
    if !(z > S::zero()) {
        return Err(Error::ContradictoryEvidence(component[0]));
    }
    Ok(mass.into_iter().map(|m| m / z).collect())
}

/// Exact marginals for every constrained topic; unconstrained topics are
/// copied from `probs`. Fails if a connected component has more than
/// [`MAX_ENUMERATION_VARS`] topics.
pub fn brute_force_marginals<S: Scalar>(
    probs: &[S],
    constraints: &ConstraintSet,
    eps: f64,
) -> Result<Vec<S>> {
    check_probabilities(probs)?;
    check_indices(probs.len(), constraints)?;
    let eps = S::lit(eps);
    let mut out = probs.to_vec();
    for component in constraints.components() {
        let sub = constraints.restricted_to(&component);
        let marginals = enumerate_component(probs, &component, &sub, eps, MAX_ENUMERATION_VARS)?;
        for (&t, m) in component.iter().zip(marginals) {
            out[t] = m;
        }
    }
    Ok(out)
}
