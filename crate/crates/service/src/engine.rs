//! Job execution shared by the command line and the HTTP service, so that
//! both produce the same documents from the same inputs and seed.

use ergm_core::estimation::{fit, EstimationControl, FitMethod, FitResult};
use ergm_core::gof::{gof_from_samples, gof_plot_data, gof_run, GofReport};
use ergm_core::io::{ResultBody, ResultDocument, SimulationSummary};
use ergm_core::netmetrics::ensemble_metrics;
use ergm_core::sampler::{sample, RunHandle, SampleBatch, SamplerControl};
use ergm_core::selection::{
    aic_select, backward_pvalue_select, graphical_rank, AicStrategy, CandidateSet, LikelihoodSource,
    SelectionControl, SelectionMethod, SelectionTrace,
};
use ergm_core::terms::DEFAULT_DECAY;
use ergm_core::{Error, Graph, ModelSpec, NodeAttributes, Result};
use serde::{Deserialize, Serialize};

/// An observed network with optional node attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub graph: Graph,
    pub attrs: Option<NodeAttributes>,
}

impl Network {
    pub fn new(graph: Graph, attrs: Option<NodeAttributes>) -> Self {
        Network { graph, attrs }
    }

    pub fn attrs(&self) -> Option<&NodeAttributes> {
        self.attrs.as_ref()
    }
}

/// Tunable settings of a job. Every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobControl {
    pub seed: u64,
    /// Estimator for fit jobs; MCMC-MLE when absent.
    pub method: Option<FitMethod>,
    pub estimation: EstimationControl,
    /// Sampling for goodness-of-fit, simulation and graphical ranking.
    pub simulation: SamplerControl,
    /// Procedure for select jobs; graphical when absent.
    pub selection: Option<SelectionMethod>,
    pub alpha: f64,
    pub strategy: AicStrategy,
    pub likelihood: LikelihoodSource,
    /// Explicit model list for graphical ranking.
    pub models: Option<Vec<String>>,
    /// Node attribute for the nodematch candidate.
    pub attribute: Option<String>,
}

impl Default for JobControl {
    fn default() -> Self {
        JobControl {
            seed: 0,
            method: None,
            estimation: EstimationControl::default(),
            simulation: SamplerControl::default(),
            selection: None,
            alpha: 0.05,
            strategy: AicStrategy::default(),
            likelihood: LikelihoodSource::default(),
            models: None,
            attribute: None,
        }
    }
}

impl JobControl {
    pub fn estimation(&self) -> EstimationControl {
        self.estimation.clone().with_seed(self.seed)
    }

    pub fn simulation(&self) -> SamplerControl {
        SamplerControl {
            seed: self.seed,
            ..self.simulation.clone()
        }
    }

    pub fn selection_control(&self) -> SelectionControl {
        SelectionControl {
            estimation: self.estimation(),
            gof: self.simulation(),
            likelihood: self.likelihood,
        }
    }

    /// Routes progress and cancellation of every chain through `handle`.
    pub fn attach(&mut self, handle: &RunHandle) {
        self.estimation.mcmc.handle = Some(handle.clone());
        self.simulation.handle = Some(handle.clone());
    }
}

pub fn parse_model(terms: &str, tau: f64) -> Result<ModelSpec> {
    ModelSpec::parse(terms, tau)
}

pub fn run_fit(model: &ModelSpec, net: &Network, control: &JobControl) -> Result<ResultDocument> {
    model.check(net.graph.node_count(), net.attrs())?;
    let method = control.method.unwrap_or(FitMethod::McmcMle);
    let result = fit(model, &net.graph, net.attrs(), method, &control.estimation())?;
    Ok(ResultDocument::new(ResultBody::Fit(result), Some(control.seed)))
}

pub fn run_gof(fit: &FitResult, net: &Network, control: &JobControl) -> Result<GofReport> {
    gof_run(fit, &net.graph, net.attrs(), &control.simulation())
}

/// Goodness of fit at explicit parameters. Matches `run_gof` for a fit
/// whose estimates are `theta`.
pub fn run_gof_at(model: &ModelSpec, theta: &[f64], net: &Network, control: &JobControl) -> Result<GofReport> {
    model.check(net.graph.node_count(), net.attrs())?;
    let c = control.simulation();
    let batch = sample(model, theta, net.graph.node_count(), net.attrs(), Some(&net.graph), &c)?;
    gof_from_samples(model, theta, c.seed, &net.graph, &batch.graphs)
}

/// Full report and plot-data documents for one goodness-of-fit run.
pub fn gof_documents(report: GofReport, seed: u64) -> (ResultDocument, ResultDocument) {
    let plot = gof_plot_data(&report);
    (
        ResultDocument::new(ResultBody::Gof(report), Some(seed)),
        ResultDocument::new(ResultBody::GofPlotData(plot), Some(seed)),
    )
}

pub fn run_simulate(
    model: &ModelSpec,
    theta: &[f64],
    nodes: usize,
    attrs: Option<&NodeAttributes>,
    control: &JobControl,
) -> Result<(ResultDocument, SampleBatch)> {
    model.check(nodes, attrs)?;
    let batch = sample(model, theta, nodes, attrs, None, &control.simulation())?;
    let summary = SimulationSummary {
        terms: model.to_string(),
        theta: theta.to_vec(),
        nodes,
        samples: batch.graphs.len(),
        acceptance_rate: batch.acceptance_rate,
        mean_density: batch.mean_density(),
        statistic_means: batch.stat_means(),
        metrics: ensemble_metrics(&batch.graphs),
        diagnostics: batch.diagnostics.iter().map(ToString::to_string).collect(),
    };
    Ok((ResultDocument::new(ResultBody::Simulation(summary), Some(control.seed)), batch))
}

/// Candidate terms for selection: the given list, or every category of
/// term (plus nodematch when an attribute is named).
pub fn candidate_set(terms: Option<&str>, tau: f64, control: &JobControl) -> Result<CandidateSet> {
    let terms = match terms {
        Some(t) => parse_model(t, tau)?,
        None => ModelSpec::full_candidate(tau, control.attribute.as_deref()),
    };
    Ok(CandidateSet {
        terms,
        alpha: control.alpha,
        strategy: control.strategy,
    })
}

pub fn run_select(candidates: &CandidateSet, tau: f64, net: &Network, control: &JobControl) -> Result<SelectionTrace> {
    let sc = control.selection_control();
    match control.selection.unwrap_or(SelectionMethod::Graphical) {
        SelectionMethod::Pvalue => backward_pvalue_select(candidates, &net.graph, net.attrs(), &sc),
        SelectionMethod::Aic => aic_select(candidates, &net.graph, net.attrs(), &sc),
        SelectionMethod::Graphical => {
            let models = control
                .models
                .as_ref()
                .map(|list| list.iter().map(|m| parse_model(m, tau)).collect::<Result<Vec<_>>>())
                .transpose()?;
            graphical_rank(candidates, &net.graph, net.attrs(), &sc, models.as_deref())
        }
    }
}

/// Parses a comma-separated parameter vector.
pub fn parse_theta(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("`{t}` is not a number")))
        })
        .collect()
}

pub fn default_tau() -> f64 {
    DEFAULT_DECAY
}
