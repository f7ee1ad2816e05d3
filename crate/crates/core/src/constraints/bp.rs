//! Synchronous loopy belief propagation.

use crate::constraints::graph::{FactorGraph, Message};
use crate::constraints::BpConfig;
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct BpOutcome<S> {
    /// `P(v = 1)` per graph variable, in [`FactorGraph::topics`] order.
    pub marginals: Vec<S>,
    pub iterations: usize,
    pub converged: bool,
}

fn damp<S: Scalar>(computed: Message<S>, old: Message<S>, lambda: S) -> Message<S> {
    if lambda == S::zero() {
        return computed;
    }
    let keep = S::one() - lambda;
    [
        keep * computed[0] + lambda * old[0],
        keep * computed[1] + lambda * old[1],
    ]
}

fn change<S: Scalar>(a: Message<S>, b: Message<S>) -> S {
    (a[0] - b[0]).abs().max((a[1] - b[1]).abs())
}

/// Runs flooding message passing from uniform messages. Each iteration
/// recomputes every variable-to-factor message from the previous
/// factor-to-variable messages, then every factor-to-variable message from
/// the new variable-to-factor messages. Stops once the largest change of any
/// message entry drops below `config.tolerance`, or after `max_iters`
/// iterations with `converged = false`.
pub fn run_belief_propagation<S: Scalar>(
    graph: &mut FactorGraph<S>,
    config: &BpConfig,
) -> Result<BpOutcome<S>> {
    config.validate()?;
    let half = S::lit(0.5);
    for f in 0..graph.factor_count() {
        for slot in 0..2 {
            graph.to_factor[f][slot] = [half, half];
            graph.to_variable[f][slot] = [half, half];
        }
    }
    let lambda = S::lit(config.damping);
    let tol = S::lit(config.tolerance);
    let mut iterations = 0;
    let mut converged = graph.factor_count() == 0;

    let mut next_to_factor = graph.to_factor.clone();
    let mut next_to_variable = graph.to_variable.clone();
    while !converged && iterations < config.max_iters {
        iterations += 1;
        let mut delta = S::zero();

        for (f, factor) in graph.factors.iter().enumerate() {
            for slot in 0..2 {
                let computed = graph.variable_to_factor_message(factor.vars[slot], f)?;
                let updated = damp(computed, graph.to_factor[f][slot], lambda);
                delta = delta.max(change(updated, graph.to_factor[f][slot]));
                next_to_factor[f][slot] = updated;
            }
        }
        std::mem::swap(&mut graph.to_factor, &mut next_to_factor);

        for f in 0..graph.factor_count() {
            for slot in 0..2 {
                let computed = graph.factor_to_variable_message(f, slot)?;
                let updated = damp(computed, graph.to_variable[f][slot], lambda);
                delta = delta.max(change(updated, graph.to_variable[f][slot]));
                next_to_variable[f][slot] = updated;
            }
        }
        std::mem::swap(&mut graph.to_variable, &mut next_to_variable);

        converged = delta < tol;
    }

    Ok(BpOutcome {
        marginals: graph.marginals()?,
        iterations,
        converged,
    })
}
