//! Factor graph over constrained topics and the two sum-product message
//! updates.

use serde::{Deserialize, Serialize};

use crate::constraints::potential::PotentialMatrix;
use crate::constraints::set::ConstraintSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A message over a binary variable: `[weight of 0, weight of 1]`.
pub type Message<S> = [S; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BpConfig {
    pub max_iters: usize,
    /// Stop when the largest change of any message entry falls below this.
    pub tolerance: f64,
    /// `new = (1 - damping) * computed + damping * old`.
    pub damping: f64,
    /// Input probabilities are clamped into `[clamp, 1 - clamp]`.
    pub clamp: f64,
    /// Components with at most this many variables are solved by enumeration
    /// in [`calibrate`](crate::constraints::calibrate).
    pub exact_component_limit: usize,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            tolerance: 1e-8,
            damping: 0.0,
            clamp: 1e-6,
            exact_component_limit: 20,
        }
    }
}

impl BpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::InvalidConfig("damping must lie in [0, 1)".into()));
        }
        if !(self.clamp > 0.0 && self.clamp < 0.5) {
            return Err(Error::InvalidConfig("clamp must lie in (0, 0.5)".into()));
        }
        Ok(())
    }
}

/// Scales a message to sum to one; `None` when both entries are zero.
pub fn normalize<S: Scalar>(m: Message<S>) -> Option<Message<S>> {
    let z = m[0] + m[1];
    if z > S::zero() && z.is_finite() {
        Some([m[0] / z, m[1] / z])
    } else {
        None
    }
}

/// Variable-to-factor update: the unary potential times every incoming
/// factor message except the recipient's, normalized.
pub fn variable_message<S: Scalar, I>(unary: Message<S>, incoming: I) -> Option<Message<S>>
where
    I: IntoIterator<Item = Message<S>>,
{
    let mut m = unary;
    for msg in incoming {
        m[0] = m[0] * msg[0];
        m[1] = m[1] * msg[1];
    }
    normalize(m)
}

/// Factor-to-variable update for a pairwise factor: sums the potential
/// against the message from the other variable. `target` is 0 when the
/// recipient indexes the rows, 1 when it indexes the columns.
pub fn factor_message<S: Scalar>(
    potential: &PotentialMatrix<S>,
    incoming: Message<S>,
    target: usize,
) -> Option<Message<S>> {
    let mut out = [S::zero(); 2];
    for (x, o) in out.iter_mut().enumerate() {
        for (y, &m) in incoming.iter().enumerate() {
            let phi = if target == 0 {
                potential.get(x, y)
            } else {
                potential.get(y, x)
            };
            *o = *o + phi * m;
        }
    }
    normalize(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairFactor<S> {
    /// Local variable indices; `vars[0]` indexes the potential's rows.
    pub vars: [usize; 2],
    pub potential: PotentialMatrix<S>,
}

/// Binary variables for constrained topics with unary factors from clamped
/// probabilities, pairwise constraint factors, and the current messages.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorGraph<S> {
    pub(crate) topic_count: usize,
    pub(crate) topics: Vec<usize>,
    pub(crate) unary: Vec<Message<S>>,
    pub(crate) factors: Vec<PairFactor<S>>,
    /// Per variable: `(factor, slot)` of each adjacent pairwise factor.
    pub(crate) adjacency: Vec<Vec<(usize, usize)>>,
    /// `[factor][slot]`: message from the variable in `slot` to the factor.
    pub(crate) to_factor: Vec<[Message<S>; 2]>,
    /// `[factor][slot]`: message from the factor to the variable in `slot`.
    pub(crate) to_variable: Vec<[Message<S>; 2]>,
    pub(crate) passthrough: Vec<usize>,
}

pub fn clamp_probability<S: Scalar>(p: S, eps: S) -> S {
    p.max(eps).min(S::one() - eps)
}

pub(crate) fn check_probabilities<S: Scalar>(probs: &[S]) -> Result<()> {
    if let Some((i, p)) = probs
        .iter()
        .enumerate()
        .find(|(_, p)| !(**p >= S::zero() && **p <= S::one()))
    {
        return Err(Error::NonFinite(format!(
            "probability {p} at topic {i} outside [0, 1]"
        )));
    }
    Ok(())
}

pub(crate) fn check_indices(probs_len: usize, constraints: &ConstraintSet) -> Result<()> {
    for c in constraints.constraints() {
        let hi = c.first.max(c.second);
        if hi >= probs_len {
            return Err(Error::InvalidConstraint(format!(
                "constraint references topic {hi} but only {probs_len} probabilities were given"
            )));
        }
    }
    Ok(())
}

/// Builds the graph for the topics touched by `constraints`. Other topics
/// are recorded for pass-through.
pub fn build_factor_graph<S: Scalar>(
    probs: &[S],
    constraints: &ConstraintSet,
    config: &BpConfig,
) -> Result<FactorGraph<S>> {
    config.validate()?;
    check_probabilities(probs)?;
    check_indices(probs.len(), constraints)?;
    let eps = S::lit(config.clamp);

    let topics: Vec<usize> = constraints.constrained_topics().into_iter().collect();
    let mut local = vec![usize::MAX; probs.len()];
    for (v, &t) in topics.iter().enumerate() {
        local[t] = v;
    }
    let unary = topics
        .iter()
        .map(|&t| {
            let p = clamp_probability(probs[t], eps);
            [S::one() - p, p]
        })
        .collect();
    let mut adjacency = vec![Vec::new(); topics.len()];
    let factors: Vec<PairFactor<S>> = constraints
        .constraints()
        .iter()
        .enumerate()
        .map(|(f, c)| {
            let vars = [local[c.first], local[c.second]];
            adjacency[vars[0]].push((f, 0));
            adjacency[vars[1]].push((f, 1));
            PairFactor {
                vars,
                potential: c.potential(),
            }
        })
        .collect();
    let half = S::lit(0.5);
    let uniform = [[half, half], [half, half]];
    let passthrough = (0..probs.len()).filter(|&t| local[t] == usize::MAX).collect();
    Ok(FactorGraph {
        topic_count: probs.len(),
        topics,
        unary,
        to_factor: vec![uniform; factors.len()],
        to_variable: vec![uniform; factors.len()],
        factors,
        adjacency,
        passthrough,
    })
}

impl<S: Scalar> FactorGraph<S> {
    pub fn variable_count(&self) -> usize {
        self.topics.len()
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    /// Topic index of each variable.
    pub fn topics(&self) -> &[usize] {
        &self.topics
    }

    pub fn unary(&self, var: usize) -> Message<S> {
        self.unary[var]
    }

    pub fn factors(&self) -> &[PairFactor<S>] {
        &self.factors
    }

    pub fn neighbors(&self, var: usize) -> &[(usize, usize)] {
        &self.adjacency[var]
    }

    pub fn passthrough(&self) -> &[usize] {
        &self.passthrough
    }

    pub fn variable_of(&self, topic: usize) -> Option<usize> {
        self.topics.binary_search(&topic).ok()
    }

    pub fn message_to_factor(&self, factor: usize, slot: usize) -> Message<S> {
        self.to_factor[factor][slot]
    }

    pub fn message_to_variable(&self, factor: usize, slot: usize) -> Message<S> {
        self.to_variable[factor][slot]
    }

    pub fn set_message_to_factor(&mut self, factor: usize, slot: usize, m: Message<S>) {
        self.to_factor[factor][slot] = m;
    }

    pub fn set_message_to_variable(&mut self, factor: usize, slot: usize, m: Message<S>) {
        self.to_variable[factor][slot] = m;
    }

    /// Message from `var` to pairwise `factor`, from the current
    /// factor-to-variable messages (the unary factor always contributes).
    pub fn variable_to_factor_message(&self, var: usize, factor: usize) -> Result<Message<S>> {
        let incoming = self
            .adjacency[var]
            .iter()
            .filter(|(f, _)| *f != factor)
            .map(|&(f, slot)| self.to_variable[f][slot]);
        variable_message(self.unary[var], incoming)
            .ok_or(Error::ContradictoryEvidence(self.topics[var]))
    }

    /// Message from pairwise `factor` to the variable in `slot`, from the
    /// current variable-to-factor message of the other slot.
    pub fn factor_to_variable_message(&self, factor: usize, slot: usize) -> Result<Message<S>> {
        let f = &self.factors[factor];
        let incoming = self.to_factor[factor][1 - slot];
        factor_message(&f.potential, incoming, slot)
            .ok_or(Error::ContradictoryEvidence(self.topics[f.vars[slot]]))
    }

    /// Normalized belief `P(v = 1)` from the unary and all incoming messages.
    pub fn marginal(&self, var: usize) -> Result<S> {
        let incoming = self.adjacency[var]
            .iter()
            .map(|&(f, slot)| self.to_variable[f][slot]);
        variable_message(self.unary[var], incoming)
            .map(|m| m[1])
            .ok_or(Error::ContradictoryEvidence(self.topics[var]))
    }

    pub fn marginals(&self) -> Result<Vec<S>> {
        (0..self.variable_count()).map(|v| self.marginal(v)).collect()
    }

    /// Writes per-variable marginals into a copy of `probs`.
    pub fn scatter(&self, probs: &[S], marginals: &[S]) -> Vec<S> {
        let mut out = probs.to_vec();
        for (&t, &m) in self.topics.iter().zip(marginals) {
            out[t] = m;
        }
        out
    }
}
