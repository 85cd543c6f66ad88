//! Model selection by backward p-value elimination, AIC search and
//! goodness-of-fit ranking; group comparisons of fitted parameters and
//! representative networks from averaged profiles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::estimation::{
    exact_fit, mcmc_mle, mple, stage_seed, EstimationControl, FitResult, LoglikKind, MAX_EXACT_NODES,
};
use crate::gof::{gof_run, GofReport};
use crate::graph::{Graph, NodeAttributes};
use crate::sampler::{sample, SampleBatch, SamplerControl};
use crate::terms::{ModelSpec, Term, DEFAULT_DECAY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AicStrategy {
    #[default]
    BackwardStepwise,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub terms: ModelSpec,
    pub alpha: f64,
    pub strategy: AicStrategy,
}

impl Default for CandidateSet {
    fn default() -> Self {
        CandidateSet {
            terms: ModelSpec::full_candidate(DEFAULT_DECAY, None),
            alpha: 0.05,
            strategy: AicStrategy::BackwardStepwise,
        }
    }
}

impl CandidateSet {
    pub fn new(terms: ModelSpec) -> Self {
        CandidateSet {
            terms,
            ..CandidateSet::default()
        }
    }

    pub fn validate(&self, n: usize, attrs: Option<&NodeAttributes>) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::InvalidModel("candidate set is empty".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidControl(format!("alpha must be in (0, 1], got {}", self.alpha)));
        }
        self.terms.check(n, attrs)
    }

    /// Submodel made of the candidate terms whose bits are set in `mask`.
    fn submodel(&self, mask: u64) -> ModelSpec {
        ModelSpec::new(
            self.terms
                .terms
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, t)| t.clone())
                .collect(),
        )
    }

    fn mask_of(&self, model: &ModelSpec) -> u64 {
        model
            .terms
            .iter()
            .filter_map(|t| self.terms.index_of(t))
            .fold(0, |m, k| m | 1 << k)
    }
}

/// Where AIC log-likelihoods come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LikelihoodSource {
    /// MCMC-MLE fits with bridge-sampled log-likelihoods.
    #[default]
    Bridge,
    /// Enumeration over all graphs; only for tiny networks.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionControl {
    pub estimation: EstimationControl,
    /// Simulation settings for goodness-of-fit ranking.
    pub gof: SamplerControl,
    pub likelihood: LikelihoodSource,
}

impl Default for SelectionControl {
    fn default() -> Self {
        SelectionControl {
            estimation: EstimationControl::default(),
            gof: SamplerControl {
                sample_count: 100,
                ..SamplerControl::default()
            },
            likelihood: LikelihoodSource::Bridge,
        }
    }
}

impl SelectionControl {
    pub fn seed(&self) -> u64 {
        self.estimation.mcmc.seed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMethod {
    Pvalue,
    Aic,
    Graphical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum Decision {
    /// Starting point of the search.
    Start,
    /// This model replaced the previous one by dropping `term`.
    Dropped { term: String },
    /// Fitted and compared but not adopted.
    Considered,
    /// Excluded before fitting by the pseudo-likelihood screen.
    Screened,
    /// Position in the goodness-of-fit ranking, 1 = best.
    Ranked { rank: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFailure {
    pub class: String,
    pub message: String,
}

impl From<&Error> for StepFailure {
    fn from(e: &Error) -> Self {
        StepFailure {
            class: e.class().as_str().to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionStep {
    pub model: ModelSpec,
    pub seed: u64,
    pub fit: Option<FitResult>,
    pub failure: Option<StepFailure>,
    pub decision: Decision,
    pub aic: Option<f64>,
    pub gof: Option<GofReport>,
    pub score: Option<f64>,
    #[serde(default)]
    pub is_final: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub method: SelectionMethod,
    pub seed: u64,
    pub steps: Vec<SelectionStep>,
}

impl SelectionTrace {
    pub fn final_step(&self) -> Option<&SelectionStep> {
        self.steps.iter().find(|s| s.is_final)
    }

    /// Steps that moved the search: the start and every accepted deletion.
    pub fn accepted(&self) -> impl Iterator<Item = &SelectionStep> {
        self.steps
            .iter()
            .filter(|s| matches!(s.decision, Decision::Start | Decision::Dropped { .. }))
    }

    fn mark_final(&mut self, index: usize) {
        self.steps[index].is_final = true;
    }
}

struct Fitter<'a> {
    candidates: &'a CandidateSet,
    g: &'a Graph,
    attrs: Option<&'a NodeAttributes>,
    control: &'a SelectionControl,
    with_loglik: bool,
}

impl Fitter<'_> {
    /// Seed of a submodel depends only on which candidates it contains, so
    /// the same model is fitted identically wherever it appears.
    fn seed_for(&self, model: &ModelSpec) -> u64 {
        stage_seed(self.control.seed(), self.candidates.mask_of(model))
    }

    fn fit(&self, model: &ModelSpec) -> (u64, Result<FitResult>) {
        let seed = self.seed_for(model);
        let result = match self.control.likelihood {
            LikelihoodSource::Exact if self.g.node_count() <= MAX_EXACT_NODES => exact_fit(model, self.g, self.attrs),
            LikelihoodSource::Exact => Err(Error::InvalidControl(format!(
                "exact likelihoods need at most {MAX_EXACT_NODES} nodes"
            ))),
            LikelihoodSource::Bridge => {
                let mut c = self.control.estimation.clone().with_seed(seed);
                if !self.with_loglik {
                    c.bridge_count = 0;
                }
                mcmc_mle(model, self.g, self.attrs, &c, None)
            }
        };
        (seed, result)
    }

    fn step(&self, model: ModelSpec, decision: Decision) -> SelectionStep {
        let (seed, result) = self.fit(&model);
        step_from(model, seed, result, decision)
    }
}

fn step_from(model: ModelSpec, seed: u64, result: Result<FitResult>, decision: Decision) -> SelectionStep {
    let (fit, failure) = match result {
        Ok(f) => (Some(f), None),
        Err(e) => {
            log::info!("fit of `{model}` failed: {e}");
            (None, Some(StepFailure::from(&e)))
        }
    };
    SelectionStep {
        aic: fit.as_ref().and_then(|f| f.aic),
        model,
        seed,
        fit,
        failure,
        decision,
        gof: None,
        score: None,
        is_final: false,
    }
}

fn p_or_one(p: f64) -> f64 {
    if p.is_nan() {
        1.0
    } else {
        p
    }
}

/// Indices of `fit`'s terms from most to least removable: largest p-value
/// first, ties broken by smaller |θ̂|.
fn drop_order(fit: &FitResult) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..fit.theta_hat.len()).collect();
    idx.sort_by(|&a, &b| {
        p_or_one(fit.wald_p[b])
            .total_cmp(&p_or_one(fit.wald_p[a]))
            .then(fit.theta_hat[a].abs().total_cmp(&fit.theta_hat[b].abs()))
    });
    idx
}

/// Order in which to try single deletions when a model fails to converge:
/// by pseudo-likelihood p-values when available, otherwise last term first.
fn rescue_order(model: &ModelSpec, g: &Graph, attrs: Option<&NodeAttributes>) -> Vec<usize> {
    match mple(model, g, attrs) {
        Ok(fit) => drop_order(&fit),
        Err(_) => (0..model.len()).rev().collect(),
    }
}

/// Backward elimination on Wald p-values.
///
/// Starting from the full candidate model, the term with the largest
/// p-value above `alpha` is dropped and the model refitted until every term
/// is significant or one term remains. A model that fails to converge is
/// replaced by the first single-term deletion that does converge.
pub fn backward_pvalue_select(
    candidates: &CandidateSet,
    g: &Graph,
    attrs: Option<&NodeAttributes>,
    control: &SelectionControl,
) -> Result<SelectionTrace> {
    candidates.validate(g.node_count(), attrs)?;
    let fitter = Fitter {
        candidates,
        g,
        attrs,
        control,
        with_loglik: false,
    };
    let mut trace = SelectionTrace {
        method: SelectionMethod::Pvalue,
        seed: control.seed(),
        steps: Vec::new(),
    };
    let mut current = fitter.step(candidates.terms.clone(), Decision::Start);
    let mut current_index = trace.steps.len();
    trace.steps.push(current.clone());

    loop {
        let order: Vec<usize> = match &current.fit {
            Some(fit) => {
                let order = drop_order(fit);
                let worst = order[0];
                if fit.theta_hat.len() == 1 || p_or_one(fit.wald_p[worst]) <= candidates.alpha {
                    break;
                }
                order
                    .into_iter()
                    .filter(|&k| p_or_one(fit.wald_p[k]) > candidates.alpha)
                    .collect()
            }
            None if current.model.len() > 1 => rescue_order(&current.model, g, attrs),
            None => break,
        };
        let mut next = None;
        for k in order {
            let term = current.model.terms[k].to_string();
            let step = fitter.step(current.model.without(k), Decision::Dropped { term });
            if step.fit.is_some() {
                next = Some(step);
                break;
            }
            trace.steps.push(SelectionStep {
                decision: Decision::Considered,
                ..step
            });
        }
        match next {
            Some(step) => {
                current = step.clone();
                current_index = trace.steps.len();
                trace.steps.push(step);
            }
            None => break,
        }
    }
    if trace.steps[current_index].fit.is_none() {
        return Err(Error::NonConvergence {
            iterations: control.estimation.max_newton_iterations,
            last_update: f64::NAN,
        });
    }
    trace.mark_final(current_index);
    Ok(trace)
}

fn check_likelihoods(candidates: &CandidateSet, g: &Graph, control: &SelectionControl) -> Result<()> {
    match control.likelihood {
        LikelihoodSource::Bridge if control.estimation.bridge_count == 0 => Err(Error::InvalidControl(
            "AIC selection needs bridge-sampled likelihoods (bridge_count > 0)".into(),
        )),
        LikelihoodSource::Exact if g.node_count() > MAX_EXACT_NODES => Err(Error::InvalidControl(format!(
            "exact likelihoods need at most {MAX_EXACT_NODES} nodes"
        ))),
        _ if candidates.strategy == AicStrategy::Exhaustive && candidates.terms.len() > 7 => Err(
            Error::InvalidControl("exhaustive AIC search supports at most 7 candidate terms".into()),
        ),
        _ => Ok(()),
    }
}

fn aic_of(step: &SelectionStep) -> Option<f64> {
    let fit = step.fit.as_ref()?;
    matches!(fit.loglik_kind, Some(LoglikKind::Bridge | LoglikKind::Exact))
        .then_some(fit.aic)
        .flatten()
}

/// AIC search, backward stepwise or over every non-empty subset.
pub fn aic_select(
    candidates: &CandidateSet,
    g: &Graph,
    attrs: Option<&NodeAttributes>,
    control: &SelectionControl,
) -> Result<SelectionTrace> {
    candidates.validate(g.node_count(), attrs)?;
    check_likelihoods(candidates, g, control)?;
    let fitter = Fitter {
        candidates,
        g,
        attrs,
        control,
        with_loglik: true,
    };
    let mut trace = SelectionTrace {
        method: SelectionMethod::Aic,
        seed: control.seed(),
        steps: Vec::new(),
    };
    let best = match candidates.strategy {
        AicStrategy::Exhaustive => {
            let p = candidates.terms.len();
            let masks: Vec<u64> = (1..1u64 << p).collect();
            trace.steps = masks
                .par_iter()
                .map(|&m| fitter.step(candidates.submodel(m), Decision::Considered))
                .collect();
            trace
                .steps
                .iter()
                .enumerate()
                .filter_map(|(k, s)| aic_of(s).map(|a| (k, a)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(k, _)| k)
        }
        AicStrategy::BackwardStepwise => {
            let start = fitter.step(candidates.terms.clone(), Decision::Start);
            let mut current = (0, start.model.clone(), aic_of(&start));
            trace.steps.push(start);
            loop {
                let (_, model, aic) = current.clone();
                if model.len() <= 1 {
                    break;
                }
                let deletions: Vec<SelectionStep> = (0..model.len())
                    .into_par_iter()
                    .map(|k| fitter.step(model.without(k), Decision::Considered))
                    .collect();
                let base = trace.steps.len();
                let winner = deletions
                    .iter()
                    .enumerate()
                    .filter_map(|(k, s)| aic_of(s).map(|a| (k, a)))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .filter(|&(_, a)| aic.is_none_or(|cur| a < cur));
                for (k, mut s) in deletions.into_iter().enumerate() {
                    if winner.is_some_and(|(w, _)| w == k) {
                        s.decision = Decision::Dropped {
                            term: model.terms[k].to_string(),
                        };
                    }
                    trace.steps.push(s);
                }
                match winner {
                    Some((k, a)) => current = (base + k, model.without(k), Some(a)),
                    None => break,
                }
            }
            current.2.map(|_| current.0)
        }
    };
    let Some(best) = best else {
        return Err(Error::NonConvergence {
            iterations: control.estimation.max_newton_iterations,
            last_update: f64::NAN,
        });
    };
    trace.mark_final(best);
    Ok(trace)
}

/// Default model list for graphical selection: Edges plus any combination
/// of one shared-partner term (GWESP or GWDSP), GWNSP, GWD, Nodematch (when
/// an attribute is available) and TwoPath.
pub fn graphical_candidates(decay: f64, attribute: Option<&str>) -> Vec<ModelSpec> {
    let mut out = Vec::new();
    let attr_options: &[bool] = if attribute.is_some() { &[false, true] } else { &[false] };
    for sp in [Term::Gwesp(decay), Term::Gwdsp(decay)] {
        for nsp in [false, true] {
            for gwd in [false, true] {
                for &nm in attr_options {
                    for two in [false, true] {
                        let mut terms = vec![Term::Edges, sp.clone()];
                        if nsp {
                            terms.push(Term::Gwnsp(decay));
                        }
                        if gwd {
                            terms.push(Term::Gwd(decay));
                        }
                        if nm {
                            terms.push(Term::Nodematch(attribute.unwrap_or_default().to_string()));
                        }
                        if two {
                            terms.push(Term::TwoPath);
                        }
                        out.push(ModelSpec::new(terms));
                    }
                }
            }
        }
    }
    out
}

/// FNV-1a hash of the term string, so equal models get equal seeds.
fn model_key(model: &ModelSpec) -> u64 {
    model
        .to_string()
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Fits every model, runs goodness of fit on each and ranks them by score.
/// Without an explicit list the default family is built with the decay of
/// the candidate set's weighted terms.
/// The ranking is advisory; choosing the final model is left to the analyst.
pub fn graphical_rank(
    candidates: &CandidateSet,
    g: &Graph,
    attrs: Option<&NodeAttributes>,
    control: &SelectionControl,
    models: Option<&[ModelSpec]>,
) -> Result<SelectionTrace> {
    let models: Vec<ModelSpec> = match models {
        Some(m) if m.is_empty() => return Err(Error::InvalidModel("no candidate models".into())),
        Some(m) => m.to_vec(),
        None => {
            candidates.validate(g.node_count(), attrs)?;
            let decay = candidates.terms.terms.iter().find_map(Term::decay).unwrap_or(DEFAULT_DECAY);
            graphical_candidates(decay, attrs.map(|a| a.name.as_str()))
        }
    };
    let seed = control.seed();
    let mut steps: Vec<SelectionStep> = models
        .par_iter()
        .map(|model| {
            let fit_seed = stage_seed(seed, model_key(model));
            if let Err(e) = model.check(g.node_count(), attrs).and_then(|_| mple(model, g, attrs)) {
                return step_from(model.clone(), fit_seed, Err(e), Decision::Screened);
            }
            let mut c = control.estimation.clone().with_seed(fit_seed);
            c.bridge_count = 0;
            let mut step = step_from(
                model.clone(),
                fit_seed,
                mcmc_mle(model, g, attrs, &c, None),
                Decision::Considered,
            );
            if let Some(fit) = &step.fit {
                let mut gc = control.gof.clone();
                gc.seed = stage_seed(fit_seed, 1);
                match gof_run(fit, g, attrs, &gc) {
                    Ok(report) => {
                        step.score = Some(report.overall_score);
                        step.gof = Some(report);
                    }
                    Err(e) => step.failure = Some(StepFailure::from(&e)),
                }
            }
            step
        })
        .collect();
    let mut ranked: Vec<usize> = (0..steps.len()).filter(|&k| steps[k].score.is_some()).collect();
    ranked.sort_by(|&a, &b| steps[b].score.unwrap().total_cmp(&steps[a].score.unwrap()).then(a.cmp(&b)));
    if ranked.is_empty() {
        return Err(Error::NonConvergence {
            iterations: control.estimation.max_newton_iterations,
            last_update: f64::NAN,
        });
    }
    for (r, &k) in ranked.iter().enumerate() {
        steps[k].decision = Decision::Ranked { rank: r + 1 };
    }
    steps[ranked[0]].is_final = true;
    Ok(SelectionTrace {
        method: SelectionMethod::Graphical,
        seed,
        steps,
    })
}

/// Mean, standard error of the mean and size of one group, per coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordinateSummary {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupInput {
    Fits(Vec<FitResult>),
    Summary {
        terms: Option<Vec<String>>,
        coordinates: Vec<CoordinateSummary>,
    },
}

impl GroupInput {
    fn summarize(&self) -> Result<(Option<ModelSpec>, Vec<String>, Vec<CoordinateSummary>)> {
        match self {
            GroupInput::Fits(fits) => {
                if fits.len() < 2 {
                    return Err(Error::InvalidInput("each group needs at least two fits".into()));
                }
                let model = common_model(fits)?;
                let k = fits.len() as f64;
                let coords = (0..model.len())
                    .map(|c| {
                        let mean = fits.iter().map(|f| f.theta_hat[c]).sum::<f64>() / k;
                        let var = fits.iter().map(|f| (f.theta_hat[c] - mean).powi(2)).sum::<f64>() / (k - 1.0);
                        CoordinateSummary {
                            mean,
                            se: (var / k).sqrt(),
                            n: fits.len(),
                        }
                    })
                    .collect();
                let names = model.terms.iter().map(ToString::to_string).collect();
                Ok((Some(model), names, coords))
            }
            GroupInput::Summary { terms, coordinates } => {
                if coordinates.iter().any(|c| c.n < 2 || !(c.se >= 0.0)) {
                    return Err(Error::InvalidInput("summaries need n ≥ 2 and se ≥ 0".into()));
                }
                let names = terms
                    .clone()
                    .unwrap_or_else(|| (1..=coordinates.len()).map(|k| format!("theta{k}")).collect());
                if names.len() != coordinates.len() {
                    return Err(Error::DimensionMismatch {
                        expected: coordinates.len(),
                        got: names.len(),
                    });
                }
                Ok((None, names, coordinates.clone()))
            }
        }
    }
}

fn common_model(fits: &[FitResult]) -> Result<ModelSpec> {
    let model = fits[0].model.clone();
    if let Some(f) = fits.iter().find(|f| f.model != model) {
        return Err(Error::ModelMismatch(format!("`{}` vs `{}`", model, f.model)));
    }
    Ok(model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceModel {
    #[default]
    Welch,
    Pooled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateComparison {
    pub term: String,
    pub a: CoordinateSummary,
    pub b: CoordinateSummary,
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupComparison {
    pub variance: VarianceModel,
    pub coordinates: Vec<CoordinateComparison>,
}

/// Two-sample t statistic, degrees of freedom and two-sided p-value.
pub fn two_sample_t(a: CoordinateSummary, b: CoordinateSummary, variance: VarianceModel) -> (f64, f64, f64) {
    let (na, nb) = (a.n as f64, b.n as f64);
    let (va, vb) = (a.se * a.se, b.se * b.se);
    let (se, df) = match variance {
        VarianceModel::Welch => {
            let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
            ((va + vb).sqrt(), df)
        }
        VarianceModel::Pooled => {
            // Group variances recovered from the standard errors of the means.
            let sp2 = ((na - 1.0) * va * na + (nb - 1.0) * vb * nb) / (na + nb - 2.0);
            ((sp2 * (1.0 / na + 1.0 / nb)).sqrt(), na + nb - 2.0)
        }
    };
    let diff = a.mean - b.mean;
    if diff == 0.0 {
        return (0.0, if df.is_finite() { df } else { na + nb - 2.0 }, 1.0);
    }
    let t = diff / se;
    let df = if df.is_finite() && df > 0.0 { df } else { na + nb - 2.0 };
    if !t.is_finite() {
        return (t, df, 0.0);
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (t, df, (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0))
}

/// Coordinate-wise two-sample t-tests between two groups of fits or their
/// summaries.
pub fn group_compare(a: &GroupInput, b: &GroupInput, variance: VarianceModel) -> Result<GroupComparison> {
    let (ma, names_a, ca) = a.summarize()?;
    let (mb, names_b, cb) = b.summarize()?;
    if let (Some(x), Some(y)) = (&ma, &mb) {
        if x != y {
            return Err(Error::ModelMismatch(format!("groups use `{x}` and `{y}`")));
        }
    }
    if ca.len() != cb.len() {
        return Err(Error::ModelMismatch(format!(
            "groups have {} and {} coordinates",
            ca.len(),
            cb.len()
        )));
    }
    let names = if ma.is_some() { names_a } else { names_b };
    let coordinates = ca
        .iter()
        .zip(&cb)
        .zip(names)
        .map(|((&x, &y), term)| {
            let (t, df, p) = two_sample_t(x, y, variance);
            CoordinateComparison { term, a: x, b: y, t, df, p }
        })
        .collect();
    Ok(GroupComparison { variance, coordinates })
}

/// Coordinate-wise mean of the fitted parameters.
pub fn average_profile(fits: &[FitResult]) -> Result<Vec<f64>> {
    if fits.is_empty() {
        return Err(Error::InvalidInput("no fits to average".into()));
    }
    let model = common_model(fits)?;
    let k = fits.len() as f64;
    Ok((0..model.len())
        .map(|c| fits.iter().map(|f| f.theta_hat[c]).sum::<f64>() / k)
        .collect())
}

/// Simulates networks from an averaged parameter profile.
pub fn representative_simulate(
    model: &ModelSpec,
    theta: &[f64],
    n: usize,
    attrs: Option<&NodeAttributes>,
    control: &SamplerControl,
) -> Result<SampleBatch> {
    sample(model, theta, n, attrs, None, control)
}
