//! Parameter estimation: maximum pseudo-likelihood, Monte-Carlo maximum
//! likelihood, bridge-sampled log-likelihoods and, for tiny graphs, exact
//! maximum likelihood by enumeration.

mod bridge;
mod exact;
mod mcmc_mle;
mod mple;

pub use bridge::log_likelihood;
pub use exact::{exact_fit, ExactFamily, MAX_EXACT_NODES};
pub use mcmc_mle::mcmc_mle;
pub use mple::mple;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{Graph, NodeAttributes};
use crate::sampler::SamplerControl;
use crate::terms::ModelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethod {
    Mple,
    McmcMle,
    /// Enumeration over every graph; only for very small node counts.
    Exact,
}

impl std::str::FromStr for FitMethod {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mple" => Ok(FitMethod::Mple),
            "mcmc" | "mcmc-mle" => Ok(FitMethod::McmcMle),
            "exact" => Ok(FitMethod::Exact),
            other => Err(crate::Error::InvalidControl(format!("unknown fit method `{other}`"))),
        }
    }
}

/// What the `loglik` field of a fit measures. Pseudo-likelihoods are never
/// comparable with the other two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoglikKind {
    Pseudo,
    Bridge,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: ModelSpec,
    pub nodes: usize,
    pub theta_hat: Vec<f64>,
    pub se: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub loglik: Option<f64>,
    pub loglik_kind: Option<LoglikKind>,
    pub aic: Option<f64>,
    pub wald_p: Vec<f64>,
    pub method: FitMethod,
    pub converged: bool,
    pub iterations: usize,
    pub seed: u64,
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

impl FitResult {
    pub(crate) fn set_loglik(&mut self, loglik: f64, kind: LoglikKind) {
        self.loglik = Some(loglik);
        self.loglik_kind = Some(kind);
        self.aic = aic(self.theta_hat.len(), loglik);
    }

    /// `(term, estimate)` pairs in model order.
    pub fn estimates(&self) -> impl Iterator<Item = (String, f64)> + '_ {
        self.model
            .terms
            .iter()
            .map(ToString::to_string)
            .zip(self.theta_hat.iter().copied())
    }
}

pub fn aic(parameters: usize, loglik: f64) -> Option<f64> {
    loglik
        .is_finite()
        .then(|| 2.0 * parameters as f64 - 2.0 * loglik)
}

/// Two-sided p-value of `estimate / se` against the standard normal.
pub fn wald_p_value(estimate: f64, se: f64) -> f64 {
    if !(se > 0.0) || !se.is_finite() {
        return f64::NAN;
    }
    let z = (estimate / se).abs();
    statrs::function::erf::erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimationControl {
    /// Sampling settings per Newton iteration; `sample_count` is the number
    /// of networks drawn per iteration.
    pub mcmc: SamplerControl,
    pub max_newton_iterations: usize,
    /// Stop once every coordinate of the update is below this.
    pub newton_tolerance: f64,
    /// Geometric bridges for the log-likelihood; 0 skips it.
    pub bridge_count: usize,
    pub samples_per_bridge: usize,
    /// Bridges whose importance weights keep less than this fraction of
    /// effective samples are reported as failed.
    pub min_bridge_ess: f64,
}

impl Default for EstimationControl {
    fn default() -> Self {
        EstimationControl {
            mcmc: SamplerControl {
                sample_count: 1000,
                interval: 1000,
                burn_in: 100_000,
                ..SamplerControl::default()
            },
            max_newton_iterations: 20,
            newton_tolerance: 1e-3,
            bridge_count: 16,
            samples_per_bridge: 500,
            min_bridge_ess: 0.01,
        }
    }
}

impl EstimationControl {
    pub fn validate(&self) -> Result<()> {
        self.mcmc.validate()?;
        if self.max_newton_iterations == 0 || !(self.newton_tolerance > 0.0) {
            return Err(crate::Error::InvalidControl(
                "newton iterations and tolerance must be positive".into(),
            ));
        }
        if self.bridge_count > 0 && self.samples_per_bridge == 0 {
            return Err(crate::Error::InvalidControl("samples_per_bridge must be positive".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.mcmc.seed = seed;
        self
    }
}

/// Dispatches to the estimator named by `method`.
pub fn fit(
    model: &ModelSpec,
    g: &Graph,
    attrs: Option<&NodeAttributes>,
    method: FitMethod,
    control: &EstimationControl,
) -> Result<FitResult> {
    match method {
        FitMethod::Mple => mple(model, g, attrs),
        FitMethod::McmcMle => mcmc_mle(model, g, attrs, control, None),
        FitMethod::Exact => exact_fit(model, g, attrs),
    }
}

/// Seed for the `k`-th sampling stage derived from a master seed.
pub(crate) fn stage_seed(master: u64, stage: u64) -> u64 {
    master ^ stage.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}
