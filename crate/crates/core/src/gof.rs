//! Goodness of fit: simulate from a fitted model and compare the degree,
//! edgewise shared partner, geodesic and triad census distributions of the
//! observed network against the simulated ensemble.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::FitResult;
use crate::graph::{Graph, NodeAttributes};
use crate::sampler::{sample, SamplerControl};
use crate::terms::ModelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PanelKind {
    Degree,
    EdgewiseSharedPartners,
    GeodesicDistance,
    TriadCensus,
}

impl PanelKind {
    pub const ALL: [PanelKind; 4] = [
        PanelKind::Degree,
        PanelKind::EdgewiseSharedPartners,
        PanelKind::GeodesicDistance,
        PanelKind::TriadCensus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PanelKind::Degree => "degree",
            PanelKind::EdgewiseSharedPartners => "edgewise-shared-partners",
            PanelKind::GeodesicDistance => "geodesic-distance",
            PanelKind::TriadCensus => "triad-census",
        }
    }
}

/// Minimum, hinges, median and maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl FiveNumber {
    /// Tukey's five-number summary: quartiles are medians of the lower and
    /// upper halves, each half including the median when the count is odd.
    pub fn of(values: &[f64]) -> FiveNumber {
        assert!(!values.is_empty(), "five-number summary of nothing");
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let half = n.div_ceil(2);
        FiveNumber {
            min: v[0],
            q1: median(&v[..half]),
            median: median(&v),
            q3: median(&v[n - half..]),
            max: v[n - 1],
        }
    }

    fn map(self, f: impl Fn(f64) -> f64) -> FiveNumber {
        FiveNumber {
            min: f(self.min),
            q1: f(self.q1),
            median: f(self.median),
            q3: f(self.q3),
            max: f(self.max),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min - 1e-12 && x <= self.max + 1e-12
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofBin {
    pub label: String,
    pub observed: f64,
    pub observed_logit: f64,
    pub simulated: FiveNumber,
    pub simulated_logit: FiveNumber,
}

impl GofBin {
    pub fn covered(&self) -> bool {
        self.simulated.contains(self.observed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofPanel {
    pub kind: PanelKind,
    pub bins: Vec<GofBin>,
    /// Clamp used before the logit transform.
    pub epsilon: f64,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub model: ModelSpec,
    pub theta: Vec<f64>,
    pub seed: u64,
    pub simulation_count: usize,
    pub panels: Vec<GofPanel>,
    pub overall_score: f64,
}

impl GofReport {
    pub fn panel(&self, kind: PanelKind) -> &GofPanel {
        self.panels.iter().find(|p| p.kind == kind).expect("every report has four panels")
    }
}

/// Unweighted mean of the panel coverages.
pub fn gof_score(report: &GofReport) -> f64 {
    gof_score_weighted(report, [1.0; 4])
}

/// Weighted mean of the panel coverages; weights follow `PanelKind::ALL`.
pub fn gof_score_weighted(report: &GofReport, weights: [f64; 4]) -> f64 {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return 0.0;
    }
    PanelKind::ALL
        .iter()
        .zip(weights)
        .map(|(&k, w)| w * report.panel(k).coverage)
        .sum::<f64>()
        / total
}

/// Raw counts of every panel for one network. Geodesic counts end with the
/// unreachable pairs.
#[derive(Debug, Clone)]
struct PanelCounts {
    degree: Vec<u64>,
    esp: Vec<u64>,
    geodesic: Vec<u64>,
    unreachable: u64,
    triads: [u64; 4],
}

fn panel_counts(g: &Graph) -> PanelCounts {
    let geo = g.geodesic_distribution();
    PanelCounts {
        degree: trim(g.degree_distribution()),
        esp: trim(g.shared_partner_distributions().esp),
        geodesic: trim(geo.by_distance.clone()),
        unreachable: geo.unreachable,
        triads: g.triad_census(),
    }
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn relative(counts: &[u64], bins: usize, total: u64) -> Vec<f64> {
    (0..bins)
        .map(|k| {
            let c = counts.get(k).copied().unwrap_or(0);
            if total == 0 {
                0.0
            } else {
                c as f64 / total as f64
            }
        })
        .collect()
}

/// Relative frequencies of one panel on a fixed bin support.
fn panel_frequencies(kind: PanelKind, c: &PanelCounts, g: &Graph, bins: usize) -> Vec<f64> {
    let n = g.node_count() as u64;
    match kind {
        PanelKind::Degree => relative(&c.degree, bins, n),
        PanelKind::EdgewiseSharedPartners => relative(&c.esp, bins, g.edge_count() as u64),
        PanelKind::GeodesicDistance => {
            let mut counts = relative(&c.geodesic, bins - 1, 1);
            counts.push(c.unreachable as f64);
            let pairs = n * n.saturating_sub(1) / 2;
            counts.iter().map(|x| if pairs == 0 { 0.0 } else { x / pairs as f64 }).collect()
        }
        PanelKind::TriadCensus => relative(&c.triads, 4, c.triads.iter().sum()),
    }
}

fn labels(kind: PanelKind, bins: usize) -> Vec<String> {
    match kind {
        PanelKind::Degree | PanelKind::EdgewiseSharedPartners => (0..bins).map(|k| k.to_string()).collect(),
        PanelKind::GeodesicDistance => (1..bins)
            .map(|k| k.to_string())
            .chain(std::iter::once("unreachable".to_string()))
            .collect(),
        PanelKind::TriadCensus => (0..4).map(|k| k.to_string()).collect(),
    }
}

fn bin_count(kind: PanelKind, c: &PanelCounts) -> usize {
    match kind {
        PanelKind::Degree => c.degree.len(),
        PanelKind::EdgewiseSharedPartners => c.esp.len(),
        PanelKind::GeodesicDistance => c.geodesic.len() + 1,
        PanelKind::TriadCensus => 4,
    }
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Assembles a report from the observed network and an already simulated
/// ensemble.
pub fn gof_from_samples(
    model: &ModelSpec,
    theta: &[f64],
    seed: u64,
    observed: &Graph,
    simulated: &[Graph],
) -> Result<GofReport> {
    if simulated.is_empty() {
        return Err(Error::InvalidControl("goodness of fit needs at least one simulated network".into()));
    }
    let obs = panel_counts(observed);
    let sims: Vec<PanelCounts> = simulated.par_iter().map(panel_counts).collect();
    let s = simulated.len();
    let panels = PanelKind::ALL
        .iter()
        .map(|&kind| {
            let bins = sims
                .iter()
                .map(|c| bin_count(kind, c))
                .fold(bin_count(kind, &obs), usize::max)
                .max(1);
            let obs_f = panel_frequencies(kind, &obs, observed, bins);
            let sim_f: Vec<Vec<f64>> = sims
                .iter()
                .zip(simulated)
                .map(|(c, g)| panel_frequencies(kind, c, g, bins))
                .collect();
            let eps = 1.0 / (2.0 * bins as f64 * s as f64);
            let clamp_logit = |f: f64| logit(f.clamp(eps, 1.0 - eps));
            let bins: Vec<GofBin> = labels(kind, bins)
                .into_iter()
                .enumerate()
                .map(|(k, label)| {
                    let column: Vec<f64> = sim_f.iter().map(|f| f[k]).collect();
                    let summary = FiveNumber::of(&column);
                    GofBin {
                        label,
                        observed: obs_f[k],
                        observed_logit: clamp_logit(obs_f[k]),
                        simulated: summary,
                        simulated_logit: summary.map(clamp_logit),
                    }
                })
                .collect();
            let coverage = bins.iter().filter(|b| b.covered()).count() as f64 / bins.len() as f64;
            GofPanel {
                kind,
                bins,
                epsilon: eps,
                coverage,
            }
        })
        .collect();
    let mut report = GofReport {
        model: model.clone(),
        theta: theta.to_vec(),
        seed,
        simulation_count: s,
        panels,
        overall_score: 0.0,
    };
    report.overall_score = gof_score(&report);
    Ok(report)
}

/// Simulates `control.sample_count` networks at the fitted parameters and
/// compares them with the observed network.
pub fn gof_run(
    fit: &FitResult,
    g_obs: &Graph,
    attrs: Option<&NodeAttributes>,
    control: &SamplerControl,
) -> Result<GofReport> {
    if fit.nodes != g_obs.node_count() {
        return Err(Error::ModelMismatch(format!(
            "fit is for {} nodes, network has {}",
            fit.nodes,
            g_obs.node_count()
        )));
    }
    if !fit.converged {
        return Err(Error::ModelMismatch("fit did not converge".into()));
    }
    let batch = sample(&fit.model, &fit.theta_hat, g_obs.node_count(), attrs, Some(g_obs), control)?;
    gof_from_samples(&fit.model, &fit.theta_hat, control.seed, g_obs, &batch.graphs)
}

/// Per-bin values of the plot-data document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotBin {
    pub label: String,
    pub observed: f64,
    pub observed_logit: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Observed value outside the simulated range.
    pub outside: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPanel {
    pub name: PanelKind,
    pub coverage: f64,
    pub bins: Vec<PlotBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReference {
    pub terms: String,
    pub theta: Vec<f64>,
}

/// Body of the plot-data document; quantiles are on the logit scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub fit: FitReference,
    pub simulation_count: usize,
    pub overall_score: f64,
    pub panels: Vec<PlotPanel>,
}

pub fn gof_plot_data(report: &GofReport) -> PlotData {
    PlotData {
        fit: FitReference {
            terms: report.model.to_string(),
            theta: report.theta.clone(),
        },
        simulation_count: report.simulation_count,
        overall_score: report.overall_score,
        panels: report
            .panels
            .iter()
            .map(|p| PlotPanel {
                name: p.kind,
                coverage: p.coverage,
                bins: p
                    .bins
                    .iter()
                    .map(|b| PlotBin {
                        label: b.label.clone(),
                        observed: b.observed,
                        observed_logit: b.observed_logit,
                        min: b.simulated_logit.min,
                        q1: b.simulated_logit.q1,
                        median: b.simulated_logit.median,
                        q3: b.simulated_logit.q3,
                        max: b.simulated_logit.max,
                        outside: !b.covered(),
                    })
                    .collect(),
            })
            .collect(),
    }
}
