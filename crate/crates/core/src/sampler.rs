//! Metropolis–Hastings simulation of networks at a fixed parameter.
//!
//! A proposal toggles one dyad. With change statistic `δ` and sign `s`
//! (+1 for an addition, −1 for a deletion) the target ratio is
//! `exp(s · θᵀδ)`; the tie/no-tie proposal adds its own Hastings term.

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeAttributes};
use crate::terms::{ModelEvaluator, ModelSpec, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Proposal {
    UniformDyad,
    /// Pick the edge set or the non-edge set with probability ½ each,
    /// then a uniform member of it.
    TieNoTie,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InitialState {
    /// The observed graph when one is supplied, otherwise a Bernoulli graph
    /// at the density implied by the edges coefficient alone.
    Default,
    Observed,
    Bernoulli { p: f64 },
    Empty,
}

/// Shared progress counter and cancellation flag for long runs.
#[derive(Clone, Default)]
pub struct RunHandle(Arc<RunHandleInner>);

#[derive(Default)]
struct RunHandleInner {
    done: AtomicU64,
    total: AtomicU64,
    cancelled: AtomicBool,
}

impl RunHandle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.cancelled.store(true, Ordering::SeqCst);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.cancelled.load(Ordering::Relaxed)
    }

    pub fn add_total(&self, proposals: u64) {
        self.0.total.fetch_add(proposals, Ordering::Relaxed);
    }

    fn add_done(&self, proposals: u64) {
        self.0.done.fetch_add(proposals, Ordering::Relaxed);
    }

    /// Completed fraction of all proposals registered so far.
    pub fn progress(&self) -> f64 {
        let total = self.0.total.load(Ordering::Relaxed);
        if total == 0 {
            return 0.0;
        }
        (self.0.done.load(Ordering::Relaxed) as f64 / total as f64).min(1.0)
    }
}

impl fmt::Debug for RunHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RunHandle({:.3})", self.progress())
    }
}

impl PartialEq for RunHandle {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerControl {
    pub burn_in: u64,
    pub interval: u64,
    pub sample_count: usize,
    pub proposal: Proposal,
    pub seed: u64,
    pub initial: InitialState,
    /// Independent chains; samples are split across them in chain order.
    pub chains: usize,
    pub fail_on_degeneracy: bool,
    #[serde(skip)]
    pub handle: Option<RunHandle>,
}

impl Default for SamplerControl {
    fn default() -> Self {
        SamplerControl {
            burn_in: 100_000,
            interval: 10_000,
            sample_count: 100,
            proposal: Proposal::TieNoTie,
            seed: 0,
            initial: InitialState::Default,
            chains: 1,
            fail_on_degeneracy: true,
            handle: None,
        }
    }
}

impl SamplerControl {
    pub fn validate(&self) -> Result<()> {
        if self.interval == 0 {
            return Err(Error::InvalidControl("interval must be at least 1".into()));
        }
        if self.sample_count == 0 {
            return Err(Error::InvalidControl("sample_count must be at least 1".into()));
        }
        if self.chains == 0 {
            return Err(Error::InvalidControl("chains must be at least 1".into()));
        }
        if let InitialState::Bernoulli { p } = self.initial {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidControl(format!("initial density {p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    fn total_proposals(&self) -> u64 {
        self.chains as u64 * self.burn_in + self.interval * self.sample_count as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "detail")]
pub enum Degeneracy {
    EmptyCollapse(String),
    CompleteCollapse(String),
    MonotoneDrift(String),
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degeneracy::EmptyCollapse(d) => write!(f, "empty-graph collapse ({d})"),
            Degeneracy::CompleteCollapse(d) => write!(f, "complete-graph collapse ({d})"),
            Degeneracy::MonotoneDrift(d) => write!(f, "monotone drift toward a boundary ({d})"),
        }
    }
}

/// Edge counts recorded after every burn-in proposal of one chain.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EdgeTrace {
    pub dyads: usize,
    pub edges: Vec<u32>,
}

pub const DRIFT_WINDOW: usize = 10_000;
const LOW_DENSITY: f64 = 0.005;
const HIGH_DENSITY: f64 = 0.995;

/// Flags chains stuck near the empty or complete graph for the final half
/// of the trace, or drifting monotonically toward one over the final
/// [`DRIFT_WINDOW`] proposals.
pub fn degeneracy_check(trace: &EdgeTrace) -> Option<Degeneracy> {
    if trace.edges.is_empty() || trace.dyads == 0 {
        return None;
    }
    let dyads = trace.dyads as f64;
    let tail = &trace.edges[trace.edges.len() / 2..];
    let max = *tail.iter().max().unwrap() as f64 / dyads;
    let min = *tail.iter().min().unwrap() as f64 / dyads;
    if max < LOW_DENSITY {
        return Some(Degeneracy::EmptyCollapse(format!(
            "density below {LOW_DENSITY} for the final {} proposals",
            tail.len()
        )));
    }
    if min > HIGH_DENSITY {
        return Some(Degeneracy::CompleteCollapse(format!(
            "density above {HIGH_DENSITY} for the final {} proposals",
            tail.len()
        )));
    }
    if trace.edges.len() >= DRIFT_WINDOW {
        let window = &trace.edges[trace.edges.len() - DRIFT_WINDOW..];
        let (first, last) = (window[0], window[DRIFT_WINDOW - 1]);
        let rising = window.windows(2).all(|w| w[1] >= w[0]);
        let falling = window.windows(2).all(|w| w[1] <= w[0]);
        let end = last as f64 / dyads;
        if rising && last > first && end > 0.5 {
            return Some(Degeneracy::MonotoneDrift(format!(
                "edges rose {first} -> {last} without a single removal"
            )));
        }
        if falling && last < first && end < 0.5 {
            return Some(Degeneracy::MonotoneDrift(format!(
                "edges fell {first} -> {last} without a single addition"
            )));
        }
    }
    None
}

#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub graphs: Vec<Graph>,
    /// Statistics of each retained graph, evaluated from scratch.
    pub stat_trace: Vec<Vec<f64>>,
    pub acceptance_rate: f64,
    pub diagnostics: Vec<Degeneracy>,
    pub burn_in_traces: Vec<EdgeTrace>,
}

impl SampleBatch {
    pub fn mean_density(&self) -> f64 {
        let sum: f64 = self.graphs.iter().map(Graph::density).sum();
        sum / self.graphs.len() as f64
    }

    pub fn stat_means(&self) -> Vec<f64> {
        let p = self.stat_trace.first().map_or(0, Vec::len);
        let mut out = vec![0.0; p];
        for row in &self.stat_trace {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        let s = self.stat_trace.len() as f64;
        out.iter_mut().for_each(|o| *o /= s);
        out
    }
}

/// Hastings log-ratio for a tie/no-tie move. `linear` is `θᵀδ`, `edges`
/// the edge count before the move.
#[inline]
pub fn tie_no_tie_log_ratio(linear: f64, adding: bool, edges: usize, dyads: usize) -> f64 {
    let (m, n) = (edges as f64, dyads as f64);
    if adding {
        linear + ((n - m) / (m + 1.0)).ln()
    } else {
        -linear + (m / (n - m + 1.0)).ln()
    }
}

/// Bernoulli density implied by the edges coefficient alone.
pub fn edges_projection_density(model: &ModelSpec, theta: &[f64]) -> f64 {
    match model.index_of(&Term::Edges) {
        Some(k) => 1.0 / (1.0 + (-theta[k]).exp()),
        None => 0.5,
    }
}

fn bernoulli_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                g.toggle_unchecked(i, j);
            }
        }
    }
    g
}

/// One Markov chain: current graph, running statistics and an indexed edge
/// list for tie/no-tie proposals.
pub struct Chain<'a> {
    eval: &'a ModelEvaluator<'a>,
    theta: &'a [f64],
    graph: Graph,
    stats: Vec<f64>,
    edge_list: Vec<(u32, u32)>,
    edge_pos: Vec<u32>,
    delta: Vec<f64>,
    rng: ChaCha8Rng,
    proposal: Proposal,
    pub proposed: u64,
    pub accepted: u64,
}

const ABSENT: u32 = u32::MAX;

impl<'a> Chain<'a> {
    pub fn new(
        eval: &'a ModelEvaluator<'a>,
        theta: &'a [f64],
        graph: Graph,
        rng: ChaCha8Rng,
        proposal: Proposal,
    ) -> Self {
        let n = graph.node_count();
        let stats = eval.evaluate(&graph);
        let mut edge_list = Vec::with_capacity(graph.edge_count());
        let mut edge_pos = vec![ABSENT; n * n];
        for (i, j) in graph.edges() {
            edge_pos[i * n + j] = edge_list.len() as u32;
            edge_list.push((i as u32, j as u32));
        }
        Chain {
            eval,
            theta,
            graph,
            stats,
            edge_list,
            edge_pos,
            delta: vec![0.0; theta.len()],
            rng,
            proposal,
            proposed: 0,
            accepted: 0,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn stats(&self) -> &[f64] {
        &self.stats
    }

    #[inline]
    fn random_dyad(&mut self) -> (usize, usize) {
        let n = self.graph.node_count();
        let i = self.rng.random_range(0..n);
        let mut j = self.rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        (i.min(j), i.max(j))
    }

    #[inline]
    fn linear(&mut self, i: usize, j: usize) -> f64 {
        self.eval.change(&self.graph, i, j, &mut self.delta);
        self.theta.iter().zip(&self.delta).map(|(t, d)| t * d).sum()
    }

    /// Runs one proposal. Returns whether it was accepted.
    #[inline]
    pub fn step(&mut self) -> bool {
        self.proposed += 1;
        let dyads = self.graph.dyad_count();
        if dyads == 0 {
            return false;
        }
        let m = self.graph.edge_count();
        let (i, j, log_ratio) = match self.proposal {
            Proposal::UniformDyad => {
                let (i, j) = self.random_dyad();
                let lin = self.linear(i, j);
                let r = if self.graph.has_edge(i, j) { -lin } else { lin };
                (i, j, r)
            }
            Proposal::TieNoTie => {
                if self.rng.random::<bool>() {
                    if m == 0 {
                        return false;
                    }
                    let (i, j) = self.edge_list[self.rng.random_range(0..m)];
                    let (i, j) = (i as usize, j as usize);
                    let lin = self.linear(i, j);
                    (i, j, tie_no_tie_log_ratio(lin, false, m, dyads))
                } else {
                    if m == dyads {
                        return false;
                    }
                    let (i, j) = loop {
                        let (i, j) = self.random_dyad();
                        if !self.graph.has_edge(i, j) {
                            break (i, j);
                        }
                    };
                    let lin = self.linear(i, j);
                    (i, j, tie_no_tie_log_ratio(lin, true, m, dyads))
                }
            }
        };
        if log_ratio < 0.0 && self.rng.random::<f64>().ln() >= log_ratio {
            return false;
        }
        self.apply(i, j);
        self.accepted += 1;
        true
    }

    fn apply(&mut self, i: usize, j: usize) {
        let n = self.graph.node_count();
        let added = self.graph.toggle_unchecked(i, j);
        let sign = if added { 1.0 } else { -1.0 };
        for (s, d) in self.stats.iter_mut().zip(&self.delta) {
            *s += sign * d;
        }
        let key = i * n + j;
        if added {
            self.edge_pos[key] = self.edge_list.len() as u32;
            self.edge_list.push((i as u32, j as u32));
        } else {
            let pos = self.edge_pos[key] as usize;
            self.edge_pos[key] = ABSENT;
            self.edge_list.swap_remove(pos);
            if let Some(&(a, b)) = self.edge_list.get(pos) {
                self.edge_pos[a as usize * n + b as usize] = pos as u32;
            }
        }
    }

    /// Replaces the running statistics by a from-scratch evaluation and
    /// returns it. In debug builds the incremental state is checked first.
    pub fn resync(&mut self) -> Vec<f64> {
        let exact = self.eval.evaluate(&self.graph);
        if cfg!(debug_assertions) {
            for (k, (a, b)) in self.stats.iter().zip(&exact).enumerate() {
                debug_assert!(
                    (a - b).abs() <= 1e-9 * (1.0 + b.abs()),
                    "incremental statistic {k} drifted: {a} vs {b}"
                );
            }
        }
        self.stats.clone_from(&exact);
        exact
    }
}

const PROGRESS_CHUNK: u64 = 4096;

struct ChainOutput {
    graphs: Vec<Graph>,
    stats: Vec<Vec<f64>>,
    proposed: u64,
    accepted: u64,
    trace: EdgeTrace,
}

/// Draws `control.sample_count` networks from the model at `theta`.
pub fn sample(
    model: &ModelSpec,
    theta: &[f64],
    n: usize,
    attrs: Option<&NodeAttributes>,
    observed: Option<&Graph>,
    control: &SamplerControl,
) -> Result<SampleBatch> {
    control.validate()?;
    if theta.len() != model.len() {
        return Err(Error::DimensionMismatch {
            expected: model.len(),
            got: theta.len(),
        });
    }
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput("non-finite parameter".into()));
    }
    if let Some(g) = observed {
        if g.node_count() != n {
            return Err(Error::ModelMismatch(format!(
                "observed graph has {} nodes, expected {n}",
                g.node_count()
            )));
        }
    }
    let eval = ModelEvaluator::new(model, n, attrs)?;
    if let Some(h) = &control.handle {
        h.add_total(control.total_proposals());
    }

    let chains = control.chains;
    let per_chain: Vec<usize> = (0..chains)
        .map(|c| control.sample_count / chains + (c < control.sample_count % chains) as usize)
        .collect();
    let outputs: Vec<Result<ChainOutput>> = per_chain
        .par_iter()
        .enumerate()
        .map(|(c, &count)| run_chain(&eval, theta, n, observed, control, c as u64, count))
        .collect();

    let mut batch = SampleBatch {
        graphs: Vec::with_capacity(control.sample_count),
        stat_trace: Vec::with_capacity(control.sample_count),
        acceptance_rate: 0.0,
        diagnostics: Vec::new(),
        burn_in_traces: Vec::with_capacity(chains),
    };
    let (mut proposed, mut accepted) = (0u64, 0u64);
    for out in outputs {
        let out = out?;
        let trace = if out.trace.edges.is_empty() {
            // No burn-in: judge the retained samples instead.
            EdgeTrace {
                dyads: out.trace.dyads,
                edges: out.graphs.iter().map(|g| g.edge_count() as u32).collect(),
            }
        } else {
            out.trace
        };
        batch.graphs.extend(out.graphs);
        batch.stat_trace.extend(out.stats);
        proposed += out.proposed;
        accepted += out.accepted;
        if let Some(d) = degeneracy_check(&trace) {
            batch.diagnostics.push(d);
        }
        batch.burn_in_traces.push(trace);
    }
    batch.acceptance_rate = if proposed == 0 {
        0.0
    } else {
        accepted as f64 / proposed as f64
    };
    if control.fail_on_degeneracy {
        if let Some(d) = batch.diagnostics.first() {
            return Err(Error::Degenerate(d.to_string()));
        }
    }
    Ok(batch)
}

/// Deterministic per-chain generator: the master seed selects the key and
/// the chain index the stream.
pub fn chain_rng(seed: u64, chain: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain);
    rng
}

fn run_chain(
    eval: &ModelEvaluator<'_>,
    theta: &[f64],
    n: usize,
    observed: Option<&Graph>,
    control: &SamplerControl,
    chain: u64,
    count: usize,
) -> Result<ChainOutput> {
    let mut rng = chain_rng(control.seed, chain);
    let start = match (control.initial, observed) {
        (InitialState::Observed, None) => {
            return Err(Error::InvalidControl("initial state `observed` needs a graph".into()))
        }
        (InitialState::Observed | InitialState::Default, Some(g)) => g.clone(),
        (InitialState::Default, None) => {
            let p = edges_projection_density(eval.model(), theta);
            bernoulli_graph(&mut rng, n, p)
        }
        (InitialState::Bernoulli { p }, _) => bernoulli_graph(&mut rng, n, p),
        (InitialState::Empty, _) => Graph::empty(n),
    };
    let mut chain = Chain::new(eval, theta, start, rng, control.proposal);
    let handle = control.handle.as_ref();

    let mut trace = EdgeTrace {
        dyads: n * n.saturating_sub(1) / 2,
        edges: Vec::with_capacity(control.burn_in.min(1 << 24) as usize),
    };
    let mut since_report = 0u64;
    let mut tick = |steps: u64| -> Result<()> {
        since_report += steps;
        if since_report >= PROGRESS_CHUNK {
            if let Some(h) = handle {
                h.add_done(since_report);
                if h.is_cancelled() {
                    return Err(Error::Cancelled);
                }
            }
            since_report = 0;
        }
        Ok(())
    };
    for _ in 0..control.burn_in {
        chain.step();
        trace.edges.push(chain.graph.edge_count() as u32);
        tick(1)?;
    }
    let mut graphs = Vec::with_capacity(count);
    let mut stats = Vec::with_capacity(count);
    for _ in 0..count {
        for _ in 0..control.interval {
            chain.step();
        }
        tick(control.interval)?;
        stats.push(chain.resync());
        graphs.push(chain.graph.clone());
    }
    if let Some(h) = handle {
        h.add_done(since_report);
    }
    Ok(ChainOutput {
        graphs,
        stats,
        proposed: chain.proposed,
        accepted: chain.accepted,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn control(burn_in: u64, interval: u64, samples: usize, seed: u64) -> SamplerControl {
        SamplerControl {
            burn_in,
            interval,
            sample_count: samples,
            seed,
            ..SamplerControl::default()
        }
    }

    #[test]
    fn reciprocal_acceptance() {
        for &(lin, m, dyads) in &[(0.3, 10usize, 45usize), (-2.0, 0, 45), (1.5, 44, 45), (0.0, 7, 21)] {
            let forward = tie_no_tie_log_ratio(lin, true, m, dyads);
            let back = tie_no_tie_log_ratio(lin, false, m + 1, dyads);
            assert!((forward + back).abs() < 1e-12);
        }
    }

    #[test]
    fn null_model_is_half_dense() {
        let model: ModelSpec = "edges".parse().unwrap();
        for proposal in [Proposal::TieNoTie, Proposal::UniformDyad] {
            let mut c = control(20_000, 2_000, 100, 3);
            c.proposal = proposal;
            let batch = sample(&model, &[0.0], 50, None, None, &c).unwrap();
            assert!((batch.mean_density() - 0.5).abs() < 0.02, "{proposal:?}: {}", batch.mean_density());
            assert!(batch.diagnostics.is_empty());
        }
    }

    #[test]
    fn retained_statistics_are_exact_and_reproducible() {
        let model: ModelSpec = "edges,gwesp,gwnsp,gwd,twopath".parse().unwrap();
        let theta = [-2.5, 0.6, -0.1, 0.4, 0.01];
        let c = control(5_000, 500, 20, 99);
        let a = sample(&model, &theta, 30, None, None, &c).unwrap();
        let b = sample(&model, &theta, 30, None, None, &c).unwrap();
        let eval = ModelEvaluator::new(&model, 30, None).unwrap();
        for (g, row) in a.graphs.iter().zip(&a.stat_trace) {
            assert_eq!(&eval.evaluate(g), row);
            assert!(g.recount_matches());
        }
        assert_eq!(a.graphs, b.graphs);
        assert_eq!(a.stat_trace, b.stat_trace);
    }

    #[test]
    fn chains_split_samples_deterministically() {
        let model: ModelSpec = "edges".parse().unwrap();
        let mut c = control(1_000, 100, 10, 5);
        c.chains = 3;
        let a = sample(&model, &[-1.0], 20, None, None, &c).unwrap();
        let b = sample(&model, &[-1.0], 20, None, None, &c).unwrap();
        assert_eq!(a.graphs.len(), 10);
        assert_eq!(a.graphs, b.graphs);
        assert_eq!(a.burn_in_traces.len(), 3);
    }

    #[test]
    fn triangle_heavy_model_collapses() {
        let model: ModelSpec = "edges,kcycle:3".parse().unwrap();
        let mut c = control(40_000, 100, 5, 1);
        c.fail_on_degeneracy = false;
        let batch = sample(&model, &[-1.0, 2.0], 30, None, None, &c).unwrap();
        assert!(matches!(batch.diagnostics[0], Degeneracy::CompleteCollapse(_)), "{:?}", batch.diagnostics);
        c.fail_on_degeneracy = true;
        assert!(matches!(
            sample(&model, &[-1.0, 2.0], 30, None, None, &c),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn very_negative_edges_collapse_to_empty() {
        let model: ModelSpec = "edges".parse().unwrap();
        let mut c = control(20_000, 100, 5, 2);
        c.fail_on_degeneracy = false;
        let batch = sample(&model, &[-20.0], 30, None, None, &c).unwrap();
        assert!(matches!(batch.diagnostics[0], Degeneracy::EmptyCollapse(_)));
        assert_eq!(degeneracy_check(&batch.burn_in_traces[0]), Some(batch.diagnostics[0].clone()));
    }

    #[test]
    fn degeneracy_check_on_synthetic_traces() {
        let flat = EdgeTrace { dyads: 1225, edges: vec![600; 20_000] };
        assert_eq!(degeneracy_check(&flat), None);
        let rising = EdgeTrace { dyads: 100, edges: (0..20_000u32).map(|k| k / 250).collect() };
        assert!(matches!(degeneracy_check(&rising), Some(Degeneracy::MonotoneDrift(_))));
        // Rising toward the middle is a chain still settling, not a collapse.
        let settling = EdgeTrace { dyads: 1000, edges: (0..20_000u32).map(|k| k / 100).collect() };
        assert_eq!(degeneracy_check(&settling), None);
    }

    #[test]
    fn invalid_controls_are_rejected() {
        let model: ModelSpec = "edges".parse().unwrap();
        let mut c = control(10, 0, 1, 0);
        assert!(matches!(sample(&model, &[0.0], 5, None, None, &c), Err(Error::InvalidControl(_))));
        c.interval = 1;
        c.sample_count = 0;
        assert!(sample(&model, &[0.0], 5, None, None, &c).is_err());
        c.sample_count = 1;
        assert!(matches!(sample(&model, &[0.0, 1.0], 5, None, None, &c), Err(Error::DimensionMismatch { .. })));
        c.initial = InitialState::Observed;
        assert!(sample(&model, &[0.0], 5, None, None, &c).is_err());
    }

    #[test]
    fn cancellation_stops_the_chain() {
        let model: ModelSpec = "edges".parse().unwrap();
        let handle = RunHandle::new();
        handle.cancel();
        let mut c = control(100_000, 10, 5, 0);
        c.handle = Some(handle.clone());
        assert!(matches!(sample(&model, &[0.0], 20, None, None, &c), Err(Error::Cancelled)));
    }
}
