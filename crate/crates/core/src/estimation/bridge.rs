use rayon::prelude::*;

use super::{dot, log_sum_exp, stage_seed, EstimationControl};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeAttributes};
use crate::sampler::{sample, InitialState};
use crate::terms::{ModelEvaluator, ModelSpec, Term};

/// Offset separating bridge seeds from the Newton iterations of a fit.
const BRIDGE_STAGE: u64 = 1 << 32;

/// Log-likelihood `θᵀg(y) − log κ(θ)` of a fitted model.
///
/// `log κ` is obtained from a Bernoulli reference at the observed density,
/// whose normalising constant is analytic, through `bridge_count` geometric
/// bridges. Each bridge samples at its midpoint and estimates both half
/// ratios by importance weighting.
pub fn log_likelihood(
    model: &ModelSpec,
    g: &Graph,
    attrs: Option<&NodeAttributes>,
    theta: &[f64],
    control: &EstimationControl,
) -> Result<f64> {
    control.validate()?;
    if control.bridge_count == 0 {
        return Err(Error::InvalidControl("bridge_count must be positive".into()));
    }
    let n = g.node_count();
    let eval = ModelEvaluator::new(model, n, attrs)?;
    if theta.len() != model.len() {
        return Err(Error::DimensionMismatch { expected: model.len(), got: theta.len() });
    }
    let d = g.density();
    if d <= 0.0 || d >= 1.0 {
        return Err(Error::BoundaryDensity(d));
    }
    let observed = eval.evaluate(g);

    // Work in a parameter space that always contains an Edges coordinate.
    let (ext_model, edges_at, target) = match model.index_of(&Term::Edges) {
        Some(k) => (model.clone(), k, theta.to_vec()),
        None => {
            let mut m = model.clone();
            m.terms.push(Term::Edges);
            let mut t = theta.to_vec();
            t.push(0.0);
            (m, model.len(), t)
        }
    };
    let reference_edges = (d / (1.0 - d)).ln();
    let mut reference = vec![0.0; ext_model.len()];
    reference[edges_at] = reference_edges;
    let log_kappa_ref = g.dyad_count() as f64 * reference_edges.exp().ln_1p();

    let k = control.bridge_count;
    let point = |t: f64| -> Vec<f64> {
        reference.iter().zip(&target).map(|(r, a)| r + t * (a - r)).collect()
    };
    let pieces: Vec<Result<f64>> = (0..k)
        .into_par_iter()
        .map(|b| {
            let lo = point(b as f64 / k as f64);
            let hi = point((b + 1) as f64 / k as f64);
            let mid = point((b as f64 + 0.5) / k as f64);
            if lo == hi {
                return Ok(0.0);
            }
            let mut sc = control.mcmc.clone();
            sc.sample_count = control.samples_per_bridge;
            sc.seed = stage_seed(control.mcmc.seed, BRIDGE_STAGE + b as u64);
            sc.initial = InitialState::Observed;
            let batch = sample(&ext_model, &mid, n, attrs, Some(g), &sc)?;
            let half = |to: &[f64]| -> (f64, f64) {
                let diff: Vec<f64> = to.iter().zip(&mid).map(|(a, m)| a - m).collect();
                let lin: Vec<f64> = batch.stat_trace.iter().map(|s| dot(&diff, s)).collect();
                let lse = log_sum_exp(&lin);
                let m = lin.len() as f64;
                (lse - m.ln(), effective_fraction(&lin, lse))
            };
            let (up, ess_up) = half(&hi);
            let (down, ess_down) = half(&lo);
            let ess = ess_up.min(ess_down);
            if ess < control.min_bridge_ess {
                return Err(Error::BridgeVariance { index: b, ess });
            }
            Ok(up - down)
        })
        .collect();
    let mut ratio = 0.0;
    for p in pieces {
        ratio += p?;
    }
    Ok(dot(theta, &observed) - (log_kappa_ref + ratio))
}

/// Kish effective sample size of weights `exp(lin)`, as a fraction of the
/// sample count.
fn effective_fraction(lin: &[f64], lse: f64) -> f64 {
    let sq: Vec<f64> = lin.iter().map(|l| 2.0 * l).collect();
    let log_ess = 2.0 * lse - log_sum_exp(&sq);
    log_ess.exp() / lin.len() as f64
}
