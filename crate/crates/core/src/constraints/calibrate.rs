use crate::constraints::bp::run_belief_propagation;
use crate::constraints::exact::enumerate_component;
use crate::constraints::graph::{build_factor_graph, check_indices, check_probabilities, BpConfig};
use crate::constraints::set::ConstraintSet;
use crate::error::Result;
use crate::scalar::Scalar;

/// Calibrated probabilities plus how they were obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration<S> {
    pub probs: Vec<S>,
    /// False when some component solved by belief propagation hit
    /// `max_iters` first.
    pub converged: bool,
    pub exact_components: usize,
    pub bp_components: usize,
    /// Largest iteration count over the belief-propagation components.
    pub iterations: usize,
}

/// Re-weights `probs` under `constraints`. Each connected component is
/// solved exactly when it has at most `config.exact_component_limit`
/// topics and by loopy belief propagation otherwise. Topics outside every
/// constraint are copied unchanged.
pub fn calibrate<S: Scalar>(
    probs: &[S],
    constraints: &ConstraintSet,
    config: &BpConfig,
) -> Result<Calibration<S>> {
    config.validate()?;
    check_probabilities(probs)?;
    check_indices(probs.len(), constraints)?;
    let eps = S::lit(config.clamp);
    let mut out = Calibration {
        probs: probs.to_vec(),
        converged: true,
        exact_components: 0,
        bp_components: 0,
        iterations: 0,
    };
    for component in constraints.components() {
        let sub = constraints.restricted_to(&component);
        if component.len() <= config.exact_component_limit {
            let marginals =
                enumerate_component(probs, &component, &sub, eps, config.exact_component_limit)?;
            for (&t, m) in component.iter().zip(marginals) {
                out.probs[t] = m;
            }
            out.exact_components += 1;
        } else {
            let mut graph = build_factor_graph(probs, &sub, config)?;
            let bp = run_belief_propagation(&mut graph, config)?;
            for (&t, &m) in graph.topics().iter().zip(&bp.marginals) {
                out.probs[t] = m;
            }
            out.converged &= bp.converged;
            out.iterations = out.iterations.max(bp.iterations);
            out.bp_components += 1;
        }
    }
    Ok(out)
}
