mod common;

use common::*;
use ergm_core::estimation::{EstimationControl, FitMethod, FitResult};
use ergm_core::sampler::{sample, InitialState, SamplerControl};
use ergm_core::selection::*;
use ergm_core::{Graph, ModelSpec};

fn quick_control(seed: u64) -> SelectionControl {
    let mut estimation = EstimationControl::default().with_seed(seed);
    estimation.mcmc.burn_in = 10_000;
    estimation.mcmc.interval = 200;
    estimation.mcmc.sample_count = 500;
    estimation.bridge_count = 8;
    estimation.samples_per_bridge = 300;
    SelectionControl {
        estimation,
        gof: SamplerControl {
            sample_count: 50,
            burn_in: 20_000,
            interval: 500,
            seed,
            ..SamplerControl::default()
        },
        likelihood: LikelihoodSource::Bridge,
    }
}

fn bernoulli(seed: u64, n: usize, p: f64) -> Graph {
    let mut r = rng(seed);
    loop {
        let g = random_graph(&mut r, n, p);
        if g.edge_count() > 0 {
            return g;
        }
    }
}

fn candidates(terms: &str, alpha: f64) -> CandidateSet {
    CandidateSet {
        terms: terms.parse().unwrap(),
        alpha,
        strategy: AicStrategy::BackwardStepwise,
    }
}

fn assert_one_term_per_step(trace: &SelectionTrace) {
    let sizes: Vec<usize> = trace.accepted().map(|s| s.model.len()).collect();
    for w in sizes.windows(2) {
        assert_eq!(w[0], w[1] + 1, "{sizes:?}");
    }
}

#[test]
fn pvalue_drops_spurious_twopath() {
    let mut dropped = 0;
    for rep in 0..20 {
        let g = bernoulli(rep, 30, 0.1);
        let trace = backward_pvalue_select(&candidates("edges,twopath", 0.05), &g, None, &quick_control(rep)).unwrap();
        assert_one_term_per_step(&trace);
        let last = trace.final_step().unwrap();
        let fit = last.fit.as_ref().unwrap();
        assert!(fit.theta_hat.len() == 1 || fit.wald_p.iter().all(|&p| p <= 0.05));
        if !last.model.terms.contains(&ergm_core::Term::TwoPath) {
            dropped += 1;
        }
    }
    assert!(dropped > 10, "twopath dropped in {dropped} of 20");
}

#[test]
fn pvalue_fixed_points() {
    let g = bernoulli(1, 30, 0.1);
    let trace = backward_pvalue_select(&candidates("edges", 0.05), &g, None, &quick_control(1)).unwrap();
    assert_eq!(trace.steps.len(), 1);
    assert!(trace.steps[0].is_final);

    let full = candidates("edges,twopath", 1.0);
    let trace = backward_pvalue_select(&full, &g, None, &quick_control(1)).unwrap();
    assert_eq!(trace.final_step().unwrap().model, full.terms);
}

#[test]
fn exhaustive_aic_with_exact_likelihoods_prefers_true_model() {
    let mut edges_wins = 0;
    let mut control = quick_control(0);
    control.likelihood = LikelihoodSource::Exact;
    let set = CandidateSet {
        strategy: AicStrategy::Exhaustive,
        ..candidates("edges,gwesp", 0.05)
    };
    for rep in 0..20 {
        let g = loop {
            let g = bernoulli(500 + rep, 6, 0.4);
            if g.edge_count() < g.dyad_count() {
                break g;
            }
        };
        let Ok(trace) = aic_select(&set, &g, None, &control) else { continue };
        assert_eq!(trace.steps.len(), 3);
        let aic_of = |terms: &str| {
            let m: ModelSpec = terms.parse().unwrap();
            trace.steps.iter().find(|s| s.model == m).and_then(|s| s.aic)
        };
        match (aic_of("edges"), aic_of("edges,gwesp")) {
            (Some(a), Some(b)) if a < b => edges_wins += 1,
            (Some(_), None) => edges_wins += 1,
            _ => {}
        }
    }
    assert!(edges_wins > 10, "edges-only preferred in {edges_wins} of 20");
}

#[test]
fn exhaustive_records_every_subset() {
    let g = bernoulli(2, 7, 0.45);
    let mut control = quick_control(3);
    control.likelihood = LikelihoodSource::Exact;
    let set = CandidateSet {
        strategy: AicStrategy::Exhaustive,
        ..candidates("edges,twopath,gwesp", 0.05)
    };
    let trace = aic_select(&set, &g, None, &control).unwrap();
    assert_eq!(trace.steps.len(), 7);
    let best = trace.final_step().unwrap().aic.unwrap();
    assert!(trace.steps.iter().filter_map(|s| s.aic).all(|a| a >= best));
}

#[test]
fn single_candidate_aic() {
    let g = bernoulli(4, 25, 0.15);
    let trace = aic_select(&candidates("edges", 0.05), &g, None, &quick_control(4)).unwrap();
    assert_eq!(trace.steps.len(), 1);
    assert!(trace.steps[0].is_final);
}

#[test]
fn stepwise_aic_is_monotone_and_replays() {
    let g = bernoulli(6, 30, 0.12);
    let set = candidates("edges,twopath,gwesp", 0.05);
    let control = quick_control(6);
    let trace = aic_select(&set, &g, None, &control).unwrap();
    let aics: Vec<f64> = trace.accepted().filter_map(|s| s.aic).collect();
    assert!(!aics.is_empty());
    for w in aics.windows(2) {
        assert!(w[1] <= w[0], "{aics:?}");
    }
    assert_one_term_per_step(&trace);
    let again = aic_select(&set, &g, None, &control).unwrap();
    assert_eq!(serde_json::to_string(&trace).unwrap(), serde_json::to_string(&again).unwrap());
}

#[test]
fn aic_refuses_pseudo_likelihoods() {
    let g = bernoulli(4, 25, 0.15);
    let mut control = quick_control(4);
    control.estimation.bridge_count = 0;
    assert!(aic_select(&candidates("edges", 0.05), &g, None, &control).is_err());
}

#[test]
fn graphical_ranks_generating_model_first() {
    let truth = ModelSpec::best_assessment(0.75);
    let g = sample(
        &truth,
        &[-3.0, 0.8, -0.3],
        90,
        None,
        None,
        &SamplerControl {
            seed: 8,
            sample_count: 1,
            initial: InitialState::Empty,
            ..SamplerControl::default()
        },
    )
    .unwrap()
    .graphs
    .remove(0);
    let models = vec!["edges".parse().unwrap(), truth.clone()];
    let mut control = quick_control(8);
    control.estimation.mcmc.interval = 1000;
    control.gof.sample_count = 100;
    let trace = graphical_rank(&CandidateSet::default(), &g, None, &control, Some(&models)).unwrap();
    let best = trace.final_step().unwrap();
    assert_eq!(best.model, truth);
    assert_eq!(best.decision, Decision::Ranked { rank: 1 });
    assert!(trace.steps.iter().all(|s| s.gof.is_some()));
}

#[test]
fn graphical_single_and_duplicate_candidates() {
    let g = bernoulli(9, 25, 0.15);
    let one = vec!["edges".parse().unwrap()];
    let trace = graphical_rank(&CandidateSet::default(), &g, None, &quick_control(9), Some(&one)).unwrap();
    assert_eq!(trace.steps.len(), 1);
    assert!(trace.steps[0].is_final);

    let two: Vec<ModelSpec> = vec!["edges".parse().unwrap(), "edges".parse().unwrap()];
    let trace = graphical_rank(&CandidateSet::default(), &g, None, &quick_control(9), Some(&two)).unwrap();
    assert_eq!(trace.steps[0].score, trace.steps[1].score);
    assert_eq!(trace.steps[0].decision, Decision::Ranked { rank: 1 });
    assert_eq!(trace.steps[1].decision, Decision::Ranked { rank: 2 });
}

fn published_groups() -> (GroupInput, GroupInput) {
    let summary = |rows: [(f64, f64); 3]| GroupInput::Summary {
        terms: Some(vec!["edges".into(), "gwesp".into(), "gwnsp".into()]),
        coordinates: rows.iter().map(|&(mean, se)| CoordinateSummary { mean, se, n: 5 }).collect(),
    };
    (
        summary([(-2.45, 0.395), (0.89, 0.181), (-0.32, 0.00662)]),
        summary([(-3.09, 0.347), (1.14, 0.153), (-0.24, 0.00479)]),
    )
}

#[test]
fn published_summary_comparison() {
    let (young, old) = published_groups();
    for variance in [VarianceModel::Welch, VarianceModel::Pooled] {
        let cmp = group_compare(&young, &old, variance).unwrap();
        let p: Vec<f64> = cmp.coordinates.iter().map(|c| c.p).collect();
        assert!((p[0] - 0.2626).abs() < 0.03, "{variance:?} {p:?}");
        assert!((p[1] - 0.3339).abs() < 0.03, "{variance:?} {p:?}");
        assert!(p[2] < 0.001, "{variance:?} {p:?}");
    }
}

fn fit_with(theta: Vec<f64>) -> FitResult {
    FitResult {
        model: "edges,gwesp".parse().unwrap(),
        nodes: 10,
        se: vec![0.1; theta.len()],
        covariance: vec![],
        loglik: None,
        loglik_kind: None,
        aic: None,
        wald_p: vec![0.0; theta.len()],
        method: FitMethod::McmcMle,
        converged: true,
        iterations: 3,
        seed: 0,
        diagnostics: vec![],
        theta_hat: theta,
    }
}

#[test]
fn raw_fit_comparisons() {
    let a: Vec<FitResult> = (0..5).map(|k| fit_with(vec![k as f64 * 1e-6, 0.5])).collect();
    let b: Vec<FitResult> = (0..5).map(|k| fit_with(vec![1.0 + k as f64 * 1e-6, 0.5])).collect();
    let cmp = group_compare(&GroupInput::Fits(a.clone()), &GroupInput::Fits(b), VarianceModel::Welch).unwrap();
    assert!(cmp.coordinates[0].p < 1e-10);
    assert_eq!(cmp.coordinates[1].p, 1.0);
    let same = group_compare(&GroupInput::Fits(a.clone()), &GroupInput::Fits(a.clone()), VarianceModel::Welch).unwrap();
    assert!(same.coordinates.iter().all(|c| c.t == 0.0 && c.p == 1.0));
    assert!(group_compare(&GroupInput::Fits(a[..1].to_vec()), &GroupInput::Fits(a.clone()), VarianceModel::Welch).is_err());
    let mut other = fit_with(vec![0.0, 0.0]);
    other.model = "edges,gwnsp".parse().unwrap();
    let mixed = vec![other.clone(), other];
    assert!(group_compare(&GroupInput::Fits(a), &GroupInput::Fits(mixed), VarianceModel::Welch).is_err());
}

#[test]
fn profile_averaging() {
    let theta = vec![-2.45, 0.89];
    let same: Vec<FitResult> = (0..5).map(|_| fit_with(theta.clone())).collect();
    assert_eq!(average_profile(&same).unwrap(), theta);
    let neg = vec![fit_with(theta.clone()), fit_with(theta.iter().map(|t| -t).collect())];
    assert_eq!(average_profile(&neg).unwrap(), vec![0.0, 0.0]);
    let avg = average_profile(&same).unwrap();
    let control = SamplerControl {
        sample_count: 5,
        burn_in: 5_000,
        interval: 100,
        ..SamplerControl::default()
    };
    let batch = representative_simulate(&same[0].model, &avg, 20, None, &control).unwrap();
    assert_eq!(batch.graphs.len(), 5);
}
