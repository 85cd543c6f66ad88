use nalgebra::{DMatrix, DVector};

use super::{wald_p_value, FitMethod, FitResult, LoglikKind};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeAttributes};
use crate::linalg;
use crate::terms::{ModelEvaluator, ModelSpec};

const MAX_ITERATIONS: usize = 100;
/// Coefficients this large mean the likelihood is maximised at infinity.
const SEPARATION_BOUND: f64 = 30.0;

struct Design {
    rows: Vec<f64>,
    y: Vec<f64>,
    p: usize,
}

impl Design {
    fn build(eval: &ModelEvaluator<'_>, g: &Graph) -> Design {
        let n = g.node_count();
        let p = eval.len();
        let mut rows = Vec::with_capacity(g.dyad_count() * p);
        let mut y = Vec::with_capacity(g.dyad_count());
        let mut delta = vec![0.0; p];
        for i in 0..n {
            for j in (i + 1)..n {
                eval.change(g, i, j, &mut delta);
                rows.extend_from_slice(&delta);
                y.push(g.has_edge(i, j) as u8 as f64);
            }
        }
        Design { rows, y, p }
    }

    fn row(&self, k: usize) -> &[f64] {
        &self.rows[k * self.p..(k + 1) * self.p]
    }

    /// Pseudo-log-likelihood, score and information at `theta`.
    fn evaluate(&self, theta: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let p = self.p;
        let mut ll = 0.0;
        let mut grad = DVector::zeros(p);
        let mut info = DMatrix::zeros(p, p);
        for (k, &y) in self.y.iter().enumerate() {
            let x = self.row(k);
            let eta: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum();
            // log σ(η) and log(1 − σ(η)) computed stably.
            let log1pexp = if eta > 0.0 {
                eta + (-eta).exp().ln_1p()
            } else {
                eta.exp().ln_1p()
            };
            ll += y * eta - log1pexp;
            let mu = 1.0 / (1.0 + (-eta).exp());
            let w = mu * (1.0 - mu);
            for a in 0..p {
                grad[a] += (y - mu) * x[a];
                for b in a..p {
                    info[(a, b)] += w * x[a] * x[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                info[(a, b)] = info[(b, a)];
            }
        }
        (ll, grad, info)
    }
}

/// Maximum pseudo-likelihood: logistic regression of tie indicators on
/// change statistics over every dyad, solved by damped Newton iterations.
/// Standard errors come from the inverse logistic information.
pub fn mple(model: &ModelSpec, g: &Graph, attrs: Option<&NodeAttributes>) -> Result<FitResult> {
    let eval = ModelEvaluator::new(model, g.node_count(), attrs)?;
    if g.dyad_count() == 0 {
        return Err(Error::InvalidInput("graph has no dyads".into()));
    }
    let d = g.density();
    if model.terms.len() == 1 && model.terms[0] == crate::terms::Term::Edges && (d <= 0.0 || d >= 1.0) {
        return Err(Error::BoundaryDensity(d));
    }
    let design = Design::build(&eval, g);
    let p = design.p;
    let term_name = |k: usize| model.terms[k].to_string();

    let mut theta = vec![0.0; p];
    let (mut ll, mut grad, mut info) = design.evaluate(&theta);
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=MAX_ITERATIONS {
        iterations = it;
        let Some(step) = linalg::spd_solve(&info, &grad) else {
            return Err(singular_or_separated(&theta, &info, &term_name));
        };
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + scale * s).collect();
            let (tll, tgrad, tinfo) = design.evaluate(&trial);
            if tll >= ll - 1e-12 * ll.abs().max(1.0) {
                theta = trial;
                ll = tll;
                grad = tgrad;
                info = tinfo;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        let max_step = step.iter().map(|s| (s * scale).abs()).fold(0.0, f64::max);
        let max_grad = grad.iter().map(|g| g.abs()).fold(0.0, f64::max);
        if theta.iter().any(|t| t.abs() > SEPARATION_BOUND) {
            return Err(separated(&theta, &term_name));
        }
        if max_grad < 1e-10 || (accepted && max_step < 1e-12) {
            converged = true;
            break;
        }
        if !accepted {
            break;
        }
    }
    if !converged {
        return Err(separated(&theta, &term_name));
    }
    let Some(cov) = linalg::spd_inverse(&info) else {
        return Err(Error::SingularInformation(term_name(linalg::weakest_direction(&info))));
    };
    let se: Vec<f64> = (0..p).map(|k| cov[(k, k)].max(0.0).sqrt()).collect();
    // Quasi-separation: the optimum sits on a flat ridge towards infinity.
    if let Some(k) = (0..p).find(|&k| theta[k].abs() > SEPARATION_BOUND / 2.0 && se[k] > theta[k].abs()) {
        return Err(Error::Separation(term_name(k)));
    }
    let wald_p = theta.iter().zip(&se).map(|(&t, &s)| wald_p_value(t, s)).collect();
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
        method: FitMethod::Mple,
        converged: true,
        iterations,
        seed: 0,
        diagnostics: vec!["standard errors ignore dyad dependence".into()],
    };
    fit.set_loglik(ll, LoglikKind::Pseudo);
    Ok(fit)
}

fn separated(theta: &[f64], name: &dyn Fn(usize) -> String) -> Error {
    let (k, _) = theta
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (k, t)| if t.abs() > acc.1 { (k, t.abs()) } else { acc });
    Error::Separation(name(k))
}

fn singular_or_separated(theta: &[f64], info: &DMatrix<f64>, name: &dyn Fn(usize) -> String) -> Error {
    // Fitted probabilities pinned at 0/1 also flatten the information.
    if theta.iter().any(|t| t.abs() > SEPARATION_BOUND / 2.0) {
        return separated(theta, name);
    }
    Error::SingularInformation(name(linalg::weakest_direction(info)))
}
