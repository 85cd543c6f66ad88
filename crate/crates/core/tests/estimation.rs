mod common;

use common::*;
use ergm_core::estimation::{exact_fit, log_likelihood, mcmc_mle, mple, EstimationControl, ExactFamily};
use ergm_core::{Error, Graph, ModelSpec, Term};
use proptest::prelude::*;

fn brute_change(term: &Term, g: &Graph, i: usize, j: usize) -> f64 {
    let mut with = g.clone();
    let mut without = g.clone();
    if g.has_edge(i, j) {
        without.toggle(i, j).unwrap();
    } else {
        with.toggle(i, j).unwrap();
    }
    brute_term(term, &with, None) - brute_term(term, &without, None)
}

/// Pseudo-log-likelihood and score computed from definitional change scores.
struct Pseudo {
    rows: Vec<(Vec<f64>, f64)>,
}

impl Pseudo {
    fn new(model: &ModelSpec, g: &Graph) -> Self {
        let n = g.node_count();
        let mut rows = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let x = model.terms.iter().map(|t| brute_change(t, g, i, j)).collect();
                rows.push((x, g.has_edge(i, j) as u8 as f64));
            }
        }
        Pseudo { rows }
    }

    fn loglik(&self, theta: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|(x, y)| {
                let eta = dot(x, theta);
                y * eta - eta.exp().ln_1p()
            })
            .sum()
    }

    fn score(&self, theta: &[f64]) -> Vec<f64> {
        let mut s = vec![0.0; theta.len()];
        for (x, y) in &self.rows {
            let mu = 1.0 / (1.0 + (-dot(x, theta)).exp());
            for (a, v) in s.iter_mut().zip(x) {
                *a += (y - mu) * v;
            }
        }
        s
    }
}

fn fixed_eight() -> Graph {
    Graph::from_edges(
        8,
        &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (4, 5), (3, 5), (5, 6), (6, 7), (1, 7), (0, 4)],
    )
    .unwrap()
}

#[test]
fn mple_matches_grid_search() {
    let g = fixed_eight();
    let model: ModelSpec = "edges,gwesp:0.75".parse().unwrap();
    let pseudo = Pseudo::new(&model, &g);
    // Coarse grid over [-5, 5]^2, then successively finer grids around the best cell.
    let mut best = (f64::NEG_INFINITY, [0.0, 0.0]);
    let (mut lo, mut hi, mut step) = ([-5.0, -5.0], [5.0, 5.0], 0.05);
    for _ in 0..4 {
        let steps = ((hi[0] - lo[0]) / step) as usize;
        for a in 0..=steps {
            for b in 0..=steps {
                let t = [lo[0] + a as f64 * step, lo[1] + b as f64 * step];
                let ll = pseudo.loglik(&t);
                if ll > best.0 {
                    best = (ll, t);
                }
            }
        }
        lo = [best.1[0] - 2.0 * step, best.1[1] - 2.0 * step];
        hi = [best.1[0] + 2.0 * step, best.1[1] + 2.0 * step];
        step /= 20.0;
    }
    let fit = mple(&model, &g, None).unwrap();
    for k in 0..2 {
        assert!((fit.theta_hat[k] - best.1[k]).abs() < 1e-3, "{:?} vs {:?}", fit.theta_hat, best.1);
    }
    assert!((fit.loglik.unwrap() - pseudo.loglik(&fit.theta_hat)).abs() < 1e-9);
}

#[test]
fn mple_edges_only_on_ninety_nodes() {
    let mut r = rng(5);
    let mut edges = Vec::new();
    while edges.len() < 228 {
        let (i, j) = (rand::Rng::random_range(&mut r, 0..90), rand::Rng::random_range(&mut r, 0..90));
        if i < j && !edges.contains(&(i, j)) {
            edges.push((i, j));
        }
    }
    let g = Graph::from_edges(90, &edges).unwrap();
    let fit = mple(&"edges".parse().unwrap(), &g, None).unwrap();
    assert!((fit.theta_hat[0] - (228.0f64 / 3777.0).ln()).abs() < 1e-9);
    assert!((fit.theta_hat[0] + 2.807).abs() < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mple_score_vanishes(seed in 0u64..1_000_000, n in 7usize..11) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.35);
        let model: ModelSpec = "edges,gwesp,gwd".parse().unwrap();
        if let Ok(fit) = mple(&model, &g, None) {
            let s = Pseudo::new(&model, &g).score(&fit.theta_hat);
            prop_assert!(s.iter().all(|v| v.abs() < 1e-8), "{:?}", s);
        }
    }
}

fn six_node_fixture() -> Graph {
    Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]).unwrap()
}

fn enumeration(model: &ModelSpec, n: usize) -> Enumeration {
    let dyads = n * (n - 1) / 2;
    let stats = (0..1u64 << dyads)
        .map(|code| {
            let g = graph_from_code(n, code);
            model.terms.iter().map(|t| brute_term(t, &g, None)).collect()
        })
        .collect();
    Enumeration { stats }
}

fn observed(model: &ModelSpec, g: &Graph) -> Vec<f64> {
    model.terms.iter().map(|t| brute_term(t, g, None)).collect()
}

#[test]
fn exact_family_matches_enumeration_oracle() {
    let model: ModelSpec = "edges,gwesp".parse().unwrap();
    let g = six_node_fixture();
    let oracle = enumeration(&model, 6);
    let obs = observed(&model, &g);
    let theta_star = oracle.mle(&obs, &[0.0, 0.0]);
    let fam = ExactFamily::enumerate(&model, 6, None).unwrap();
    assert_eq!(fam.counts.iter().sum::<f64>(), 32768.0);
    for theta in [[0.0, 0.0], [-1.0, 0.5], theta_star.clone().try_into().unwrap()] {
        assert!((fam.log_kappa(&theta) - oracle.log_kappa(&theta)).abs() < 1e-8);
    }
    let fit = exact_fit(&model, &g, None).unwrap();
    for k in 0..2 {
        assert!((fit.theta_hat[k] - theta_star[k]).abs() < 1e-6);
    }
    let (_, cov) = oracle.moments(&theta_star);
    let inv = inverse(&cov);
    for k in 0..2 {
        assert!((fit.se[k] - inv[k][k].sqrt()).abs() < 1e-6);
    }
}

fn small_control(seed: u64) -> EstimationControl {
    let mut c = EstimationControl::default().with_seed(seed);
    c.mcmc.burn_in = 5_000;
    c.mcmc.interval = 50;
    c.mcmc.sample_count = 2_000;
    c.samples_per_bridge = 2_000;
    c
}

#[test]
fn mcmc_mle_and_bridge_agree_with_enumeration() {
    let model: ModelSpec = "edges,gwesp".parse().unwrap();
    let g = six_node_fixture();
    let oracle = enumeration(&model, 6);
    let obs = observed(&model, &g);
    let theta_star = oracle.mle(&obs, &[0.0, 0.0]);
    let exact_ll = dot(&theta_star, &obs) - oracle.log_kappa(&theta_star);

    let fit = mcmc_mle(&model, &g, None, &small_control(11), None).unwrap();
    for k in 0..2 {
        let z = (fit.theta_hat[k] - theta_star[k]).abs() / fit.se[k];
        assert!(z < 2.0, "coordinate {k}: {:?} vs {:?}", fit.theta_hat, theta_star);
    }
    let ll = log_likelihood(&model, &g, None, &theta_star, &small_control(12)).unwrap();
    assert!((ll - exact_ll).abs() < 0.1, "{ll} vs {exact_ll}");
}

#[test]
fn bridge_without_edges_term() {
    let model: ModelSpec = "twopath,gwesp".parse().unwrap();
    let g = six_node_fixture();
    let oracle = enumeration(&model, 6);
    let theta = [-0.4, 0.6];
    let exact = dot(&theta, &observed(&model, &g)) - oracle.log_kappa(&theta);
    let ll = log_likelihood(&model, &g, None, &theta, &small_control(3)).unwrap();
    assert!((ll - exact).abs() < 0.1, "{ll} vs {exact}");
}

#[test]
fn mcmc_mle_edges_only_matches_mple() {
    let mut r = rng(9);
    let g = random_graph(&mut r, 30, 0.15);
    let model: ModelSpec = "edges".parse().unwrap();
    let reference = mple(&model, &g, None).unwrap();
    let mut c = small_control(4);
    c.mcmc.sample_count = 1_000;
    c.bridge_count = 0;
    let fit = mcmc_mle(&model, &g, None, &c, Some(&[0.0])).unwrap();
    let mcse = fit.se[0] / (c.mcmc.sample_count as f64).sqrt();
    assert!((fit.theta_hat[0] - reference.theta_hat[0]).abs() < 2.0 * mcse.max(0.02));
    assert!(fit.loglik.is_none());
}

#[test]
fn degenerate_start_is_reported() {
    let mut r = rng(2);
    let g = random_graph(&mut r, 30, 0.1);
    let model: ModelSpec = "edges,kcycle:3".parse().unwrap();
    let mut c = small_control(1);
    c.mcmc.burn_in = 20_000;
    let err = mcmc_mle(&model, &g, None, &c, Some(&[-1.0, 2.5])).unwrap_err();
    assert!(matches!(err, Error::Degenerate(_)), "{err}");
}

#[test]
fn boundary_graphs_are_rejected() {
    let c = small_control(1);
    let model: ModelSpec = "edges,gwesp".parse().unwrap();
    assert!(matches!(mcmc_mle(&model, &Graph::empty(5), None, &c, None), Err(Error::BoundaryDensity(_))));
    assert!(matches!(mcmc_mle(&model, &Graph::complete(5), None, &c, None), Err(Error::BoundaryDensity(_))));
}

#[test]
fn fits_replay_from_seed() {
    let model: ModelSpec = "edges,gwesp".parse().unwrap();
    let g = six_node_fixture();
    let mut c = small_control(77);
    c.bridge_count = 4;
    c.samples_per_bridge = 200;
    let a = mcmc_mle(&model, &g, None, &c, None).unwrap();
    let b = mcmc_mle(&model, &g, None, &c, None).unwrap();
    assert_eq!(a, b);
}
