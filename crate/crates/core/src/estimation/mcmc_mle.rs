use nalgebra::{DMatrix, DVector};

use super::{bridge, mple, stage_seed, wald_p_value, EstimationControl, FitMethod, FitResult};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeAttributes};
use crate::linalg;
use crate::sampler::{sample, InitialState};
use crate::terms::{ModelEvaluator, ModelSpec, Term};

/// Largest coordinate change allowed per outer iteration.
const TRUST_RADIUS: f64 = 1.0;
const INNER_ITERATIONS: usize = 50;

/// Importance-weighted moments of the centred statistics `z = g(Y) − g(y_obs)`
/// under the parameter shift `shift`.
struct Weighted {
    objective: f64,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

fn weighted(z: &[Vec<f64>], shift: &[f64]) -> Weighted {
    let p = shift.len();
    let lin: Vec<f64> = z.iter().map(|row| super::dot(shift, row)).collect();
    let lse = super::log_sum_exp(&lin);
    let m = z.len() as f64;
    let mut mean = DVector::zeros(p);
    let weights: Vec<f64> = lin.iter().map(|l| (l - lse).exp()).collect();
    for (w, row) in weights.iter().zip(z) {
        for a in 0..p {
            mean[a] += w * row[a];
        }
    }
    let mut cov = DMatrix::zeros(p, p);
    for (w, row) in weights.iter().zip(z) {
        for a in 0..p {
            let da = row[a] - mean[a];
            for b in a..p {
                cov[(a, b)] += w * da * (row[b] - mean[b]);
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            cov[(a, b)] = cov[(b, a)];
        }
    }
    Weighted {
        // Log-likelihood ratio approximation ℓ(θ + shift) − ℓ(θ).
        objective: -(lse - m.ln()),
        mean,
        cov,
    }
}

/// Maximises the importance-sampling approximation of the log-likelihood
/// ratio within the trust region. Returns the shift.
fn inner_newton(z: &[Vec<f64>]) -> Option<Vec<f64>> {
    let p = z[0].len();
    let mut shift = vec![0.0; p];
    let mut cur = weighted(z, &shift);
    for _ in 0..INNER_ITERATIONS {
        let step = linalg::spd_solve(&cur.cov, &(-&cur.mean))?;
        let mut scale = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let mut trial: Vec<f64> = shift.iter().zip(step.iter()).map(|(s, d)| s + scale * d).collect();
            clip(&mut trial);
            let next = weighted(z, &trial);
            if next.objective >= cur.objective - 1e-12 {
                let change = trial.iter().zip(&shift).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                shift = trial;
                cur = next;
                moved = change > 1e-10;
                break;
            }
            scale *= 0.5;
        }
        if !moved {
            break;
        }
    }
    Some(shift)
}

fn clip(shift: &mut [f64]) {
    let max = shift.iter().map(|s| s.abs()).fold(0.0, f64::max);
    if max > TRUST_RADIUS {
        shift.iter_mut().for_each(|s| *s *= TRUST_RADIUS / max);
    }
}

/// Integrated autocorrelation time of a series, by batch means.
fn autocorrelation_time(series: &[f64]) -> f64 {
    let m = series.len();
    let batches = (m as f64).sqrt().floor() as usize;
    if batches < 2 {
        return 1.0;
    }
    let size = m / batches;
    let mean = series.iter().sum::<f64>() / m as f64;
    let var = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0);
    if var <= 0.0 {
        return 1.0;
    }
    let bvar = (0..batches)
        .map(|b| {
            let bm = series[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64;
            (bm - mean).powi(2)
        })
        .sum::<f64>()
        / (batches as f64 - 1.0);
    (size as f64 * bvar / var).max(1.0)
}

/// Monte-Carlo maximum likelihood.
///
/// Each outer iteration samples networks at the current θ, maximises the
/// importance-sampling approximation of `ℓ(θ′) − ℓ(θ)` by damped Newton
/// steps (clipped to max-norm 1) and moves θ there. Iteration stops when
/// the update drops below `newton_tolerance`, or below twice its own
/// Monte-Carlo standard error in every coordinate.
pub fn mcmc_mle(
    model: &ModelSpec,
    g: &Graph,
    attrs: Option<&NodeAttributes>,
    control: &EstimationControl,
    theta0: Option<&[f64]>,
) -> Result<FitResult> {
    control.validate()?;
    let n = g.node_count();
    let eval = ModelEvaluator::new(model, n, attrs)?;
    if g.edge_count() == 0 || g.edge_count() == g.dyad_count() {
        return Err(Error::BoundaryDensity(g.density()));
    }
    let p = model.len();
    let term_name = |k: usize| model.terms[k].to_string();
    let observed = eval.evaluate(g);

    let mut theta = match theta0 {
        Some(t) if t.len() != p => {
            return Err(Error::DimensionMismatch { expected: p, got: t.len() })
        }
        Some(t) => t.to_vec(),
        None => start_values(model, g, attrs),
    };

    let mut iterations = 0;
    let mut converged = false;
    let mut last_update = f64::INFINITY;
    let mut outside_hull: Option<usize> = None;
    let mut final_cov = None;
    let mut diagnostics = Vec::new();
    for it in 0..control.max_newton_iterations {
        iterations = it + 1;
        let mut sc = control.mcmc.clone();
        sc.seed = stage_seed(control.mcmc.seed, it as u64);
        sc.initial = InitialState::Observed;
        let batch = sample(model, &theta, n, attrs, Some(g), &sc)?;
        let z: Vec<Vec<f64>> = batch
            .stat_trace
            .iter()
            .map(|s| s.iter().zip(&observed).map(|(a, b)| a - b).collect())
            .collect();

        outside_hull = (0..p).find(|&k| {
            let lo = z.iter().map(|r| r[k]).fold(f64::INFINITY, f64::min);
            let hi = z.iter().map(|r| r[k]).fold(f64::NEG_INFINITY, f64::max);
            lo > 0.0 || hi < 0.0
        });

        let base = weighted(&z, &vec![0.0; p]);
        let Some(_) = linalg::spd_inverse(&base.cov) else {
            let k = linalg::weakest_direction(&base.cov);
            return Err(Error::SingularInformation(term_name(k)));
        };
        let shift = inner_newton(&z).ok_or_else(|| {
            Error::SingularInformation(term_name(linalg::weakest_direction(&base.cov)))
        })?;

        // Monte-Carlo error of the update, from the sampled information and
        // the autocorrelation of the statistics.
        let tau = (0..p)
            .map(|k| autocorrelation_time(&z.iter().map(|r| r[k]).collect::<Vec<_>>()))
            .fold(1.0, f64::max);
        let inv = linalg::spd_inverse(&base.cov).unwrap();
        let m_eff = z.len() as f64 / tau;
        let mcse: Vec<f64> = (0..p).map(|k| (inv[(k, k)] / m_eff).sqrt()).collect();

        for (t, s) in theta.iter_mut().zip(&shift) {
            *t += s;
        }
        last_update = shift.iter().map(|s| s.abs()).fold(0.0, f64::max);
        log::debug!("mcmc-mle iteration {iterations}: theta {theta:?}, update {last_update:.3e}");
        let within_noise = shift.iter().zip(&mcse).all(|(s, e)| s.abs() <= 2.0 * e);
        if outside_hull.is_none() && (last_update < control.newton_tolerance || within_noise) {
            converged = true;
            final_cov = Some(weighted(&z, &shift).cov);
            if last_update >= control.newton_tolerance {
                diagnostics.push(format!(
                    "stopped with update {last_update:.3e} inside Monte-Carlo error"
                ));
            }
            break;
        }
    }
    if let Some(k) = outside_hull {
        return Err(Error::OutsideConvexHull(term_name(k)));
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations,
            last_update,
        });
    }
    let cov_stats = final_cov.expect("set on convergence");
    let Some(cov) = linalg::spd_inverse(&cov_stats) else {
        return Err(Error::SingularInformation(term_name(linalg::weakest_direction(&cov_stats))));
    };
    let se: Vec<f64> = (0..p).map(|k| cov[(k, k)].max(0.0).sqrt()).collect();
    let wald_p = theta.iter().zip(&se).map(|(&t, &s)| wald_p_value(t, s)).collect();
    let mut fit = FitResult {
        model: model.clone(),
        nodes: n,
        theta_hat: theta,
        se,
        covariance: linalg::to_rows(&cov),
        loglik: None,
        loglik_kind: None,
        aic: None,
        wald_p,
        method: FitMethod::McmcMle,
        converged,
        iterations,
        seed: control.mcmc.seed,
        diagnostics,
    };
    if control.bridge_count > 0 {
        let ll = bridge::log_likelihood(model, g, attrs, &fit.theta_hat, control)?;
        fit.set_loglik(ll, super::LoglikKind::Bridge);
    }
    Ok(fit)
}

/// MPLE when it exists, otherwise the edges-only logit with zeros elsewhere.
fn start_values(model: &ModelSpec, g: &Graph, attrs: Option<&NodeAttributes>) -> Vec<f64> {
    match mple(model, g, attrs) {
        Ok(fit) => fit.theta_hat,
        Err(_) => {
            let d = g.density();
            model
                .terms
                .iter()
                .map(|t| if *t == Term::Edges { (d / (1.0 - d)).ln() } else { 0.0 })
                .collect()
        }
    }
}
