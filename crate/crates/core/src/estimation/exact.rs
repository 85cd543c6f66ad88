use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::{dot, log_sum_exp, wald_p_value, FitMethod, FitResult, LoglikKind};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeAttributes};
use crate::linalg;
use crate::terms::{ModelEvaluator, ModelSpec};

/// Largest node count accepted for enumeration (2^21 graphs).
pub const MAX_EXACT_NODES: usize = 7;
const BOUNDARY: f64 = 30.0;

/// Distribution of the model statistics over every graph on `n` nodes,
/// stored as distinct statistic vectors with multiplicities.
#[derive(Debug, Clone)]
pub struct ExactFamily {
    pub model: ModelSpec,
    pub nodes: usize,
    pub stats: Vec<Vec<f64>>,
    pub counts: Vec<f64>,
}

impl ExactFamily {
    pub fn enumerate(model: &ModelSpec, n: usize, attrs: Option<&NodeAttributes>) -> Result<Self> {
        if n > MAX_EXACT_NODES {
            return Err(Error::InvalidInput(format!(
                "exact enumeration supports at most {MAX_EXACT_NODES} nodes, got {n}"
            )));
        }
        let eval = ModelEvaluator::new(model, n, attrs)?;
        let dyads: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        let mut g = Graph::empty(n);
        let mut stats = eval.evaluate(&g);
        let mut delta = vec![0.0; model.len()];
        let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut family = ExactFamily {
            model: model.clone(),
            nodes: n,
            stats: Vec::new(),
            counts: Vec::new(),
        };
        let total: u64 = 1 << dyads.len();
        for code in 0..total {
            if code > 0 {
                // Gray-code order: each step toggles a single dyad.
                let (i, j) = dyads[code.trailing_zeros() as usize];
                eval.change(&g, i, j, &mut delta);
                let sign = if g.toggle_unchecked(i, j) { 1.0 } else { -1.0 };
                for (s, d) in stats.iter_mut().zip(&delta) {
                    *s += sign * d;
                }
                if code % 4096 == 0 {
                    stats = eval.evaluate(&g);
                }
            }
            let key: Vec<i64> = stats.iter().map(|s| (s * 1e6).round() as i64).collect();
            match seen.get(&key) {
                Some(&k) => family.counts[k] += 1.0,
                None => {
                    seen.insert(key, family.stats.len());
                    family.stats.push(stats.clone());
                    family.counts.push(1.0);
                }
            }
        }
        Ok(family)
    }

    pub fn log_kappa(&self, theta: &[f64]) -> f64 {
        let lin: Vec<f64> = self
            .stats
            .iter()
            .zip(&self.counts)
            .map(|(s, c)| dot(theta, s) + c.ln())
            .collect();
        log_sum_exp(&lin)
    }

    pub fn log_likelihood(&self, theta: &[f64], observed: &[f64]) -> f64 {
        dot(theta, observed) - self.log_kappa(theta)
    }

    /// Mean and covariance of the statistics under `theta`.
    pub fn moments(&self, theta: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let p = self.model.len();
        let lk = self.log_kappa(theta);
        let mut mean = DVector::zeros(p);
        let mut second = DMatrix::zeros(p, p);
        for (s, c) in self.stats.iter().zip(&self.counts) {
            let w = (dot(theta, s) + c.ln() - lk).exp();
            let v = DVector::from_column_slice(s);
            mean += w * &v;
            second += w * &v * v.transpose();
        }
        let cov = second - &mean * mean.transpose();
        (mean, cov)
    }

    /// Maximum likelihood by Newton steps on the exact log-likelihood.
    pub fn mle(&self, observed: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>, usize)> {
        let p = self.model.len();
        let name = |k: usize| self.model.terms[k].to_string();
        let mut theta = vec![0.0; p];
        let mut ll = self.log_likelihood(&theta, observed);
        for it in 1..=200 {
            let (mean, cov) = self.moments(&theta);
            let grad = DVector::from_column_slice(observed) - mean;
            if grad.amax() < 1e-9 {
                return Ok((theta, cov, it));
            }
            let Some(step) = linalg::spd_solve(&cov, &grad) else {
                if let Some(k) = theta.iter().position(|t| t.abs() > BOUNDARY / 2.0) {
                    return Err(Error::OutsideConvexHull(name(k)));
                }
                return Err(Error::SingularInformation(name(linalg::weakest_direction(&cov))));
            };
            let mut scale = 1.0;
            let mut moved = false;
            for _ in 0..40 {
                let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + scale * s).collect();
                let tll = self.log_likelihood(&trial, observed);
                if tll >= ll - 1e-12 * ll.abs().max(1.0) {
                    moved = step.amax() * scale > 1e-13;
                    theta = trial;
                    ll = tll;
                    break;
                }
                scale *= 0.5;
            }
            if let Some(k) = theta.iter().position(|t| t.abs() > BOUNDARY) {
                return Err(Error::OutsideConvexHull(name(k)));
            }
            if !moved {
                let (_, cov) = self.moments(&theta);
                return Ok((theta, cov, it));
            }
        }
        Err(Error::NonConvergence {
            iterations: 200,
            last_update: f64::NAN,
        })
    }
}

/// Exact maximum likelihood fit by enumerating every graph on the node set.
pub fn exact_fit(model: &ModelSpec, g: &Graph, attrs: Option<&NodeAttributes>) -> Result<FitResult> {
    let family = ExactFamily::enumerate(model, g.node_count(), attrs)?;
    let observed = ModelEvaluator::new(model, g.node_count(), attrs)?.evaluate(g);
    let (theta, info, iterations) = family.mle(&observed)?;
    let Some(cov) = linalg::spd_inverse(&info) else {
        return Err(Error::SingularInformation(
            model.terms[linalg::weakest_direction(&info)].to_string(),
        ));
    };
    let se: Vec<f64> = (0..model.len()).map(|k| cov[(k, k)].max(0.0).sqrt()).collect();
    let wald_p = theta.iter().zip(&se).map(|(&t, &s)| wald_p_value(t, s)).collect();
    let ll = family.log_likelihood(&theta, &observed);
    let mut fit = FitResult {
        model: model.clone(),
        nodes: g.node_count(),
        theta_hat: theta,
        se,
        covariance: linalg::to_rows(&cov),
        loglik: None,
        loglik_kind: None,
        aic: None,
        wald_p,
        method: FitMethod::Exact,
        converged: true,
        iterations,
        seed: 0,
        diagnostics: Vec::new(),
    };
    fit.set_loglik(ll, LoglikKind::Exact);
    Ok(fit)
}
