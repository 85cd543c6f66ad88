//! Acceptance suite. Runs every criterion, prints one line each and fails
//! if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use ergm_core::estimation::{log_likelihood, mcmc_mle, mple, EstimationControl};
use ergm_core::gof::{gof_run, PanelKind};
use ergm_core::io::{threshold_matrix, WeightMatrix};
use ergm_core::netmetrics::ensemble_metrics;
use ergm_core::sampler::{sample, InitialState, SamplerControl};
use ergm_core::selection::*;
use ergm_core::{change_statistics, evaluate_statistics, Graph, ModelSpec, Term};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn close(a: f64, b: f64, integer: bool) -> bool {
    if integer {
        a == b
    } else {
        (a - b).abs() <= 1e-9
    }
}

/// 252 graphs: n = 2..=8, densities 0.2/0.5/0.8, twelve of each.
fn oracle_graphs() -> Vec<(Graph, ergm_core::NodeAttributes)> {
    let mut r = rng(2024);
    let mut out = Vec::new();
    for n in 2..=8 {
        for p in [0.2, 0.5, 0.8] {
            for _ in 0..12 {
                let g = random_graph(&mut r, n, p);
                let a = random_attrs(&mut r, n);
                out.push((g, a));
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let graphs = oracle_graphs();
    let mut checked = 0;
    for (g, a) in &graphs {
        for term in all_terms(g.node_count()) {
            let model = ModelSpec::new(vec![term.clone()]);
            let got = evaluate_statistics(&model, g, Some(a)).unwrap()[0];
            let want = brute_term(&term, g, Some(a));
            if !close(got, want, term.is_integer_valued()) {
                return outcome(false, format!("{term} on n={}: {got} vs {want}", g.node_count()));
            }
            checked += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        graphs.len() >= 200 && t < Duration::from_secs(10),
        format!("{} graphs, {checked} term values, {:.2}s", graphs.len(), t.as_secs_f64()),
    )
}

fn criterion_2() -> Outcome {
    let graphs = oracle_graphs();
    let mut checked = 0;
    for (g, a) in &graphs {
        let n = g.node_count();
        let model = ModelSpec::new(all_terms(n));
        for i in 0..n {
            for j in (i + 1)..n {
                let delta = change_statistics(&model, g, i, j, Some(a)).unwrap();
                let mut with = g.clone();
                let mut without = g.clone();
                if g.has_edge(i, j) {
                    without.toggle(i, j).unwrap();
                } else {
                    with.toggle(i, j).unwrap();
                }
                let hi = evaluate_statistics(&model, &with, Some(a)).unwrap();
                let lo = evaluate_statistics(&model, &without, Some(a)).unwrap();
                for (k, term) in model.terms.iter().enumerate() {
                    if !close(delta[k], hi[k] - lo[k], term.is_integer_valued()) {
                        return outcome(false, format!("{term} dyad ({i},{j}) n={n}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    outcome(true, format!("{checked} change scores"))
}

fn criterion_3() -> Outcome {
    let graphs = oracle_graphs();
    for (g, _) in &graphs {
        let sp = g.shared_partner_distributions();
        if sp.dsp.iter().zip(sp.esp.iter().zip(&sp.nsp)).any(|(d, (e, n))| *d != e + n) {
            return outcome(false, format!("dsp != esp + nsp on n={}", g.node_count()));
        }
    }
    let (esp, nsp, dsp) = ([1u64, 5, 1], [1u64, 4, 3], [2u64, 9, 4]);
    let published = (0..3).all(|k| dsp[k] == esp[k] + nsp[k]);
    outcome(published, format!("{} graphs; published (2,9,4) = (1,5,1) + (1,4,3)", graphs.len()))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let model: ModelSpec = "edges".parse().unwrap();
    let mut detail = Vec::new();
    let mut pass = true;
    for (target, seed) in [(0.5f64, 1u64), (0.2, 2)] {
        let control = SamplerControl {
            seed,
            initial: InitialState::Empty,
            ..SamplerControl::default()
        };
        let theta = (target / (1.0 - target)).ln();
        let batch = sample(&model, &[theta], 50, None, None, &control).unwrap();
        let d = batch.mean_density();
        pass &= (d - target).abs() <= 0.02 && batch.graphs.len() == 100;
        detail.push(format!("density {d:.4} (target {target})"));
    }
    let t = start.elapsed();
    pass &= t < Duration::from_secs(30);
    outcome(pass, format!("{}, {:.2}s", detail.join(", "), t.as_secs_f64()))
}

fn criterion_5() -> Outcome {
    let mut r = rng(55);
    let mut worst: f64 = 0.0;
    let model: ModelSpec = "edges".parse().unwrap();
    let mut done = 0;
    while done < 20 {
        let n = r.random_range(5..40);
        let p = r.random_range(0.05..0.9);
        let g = random_graph(&mut r, n, p);
        if g.edge_count() == 0 || g.edge_count() == g.dyad_count() {
            continue;
        }
        let fit = mple(&model, &g, None).unwrap();
        let d = g.density();
        worst = worst.max((fit.theta_hat[0] - (d / (1.0 - d)).ln()).abs());
        done += 1;
    }
    outcome(worst <= 1e-6, format!("max |θ̂ − logit(d)| = {worst:.2e} over 20 graphs"))
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

fn criterion_6() -> Outcome {
    let model: ModelSpec = "edges,gwesp".parse().unwrap();
    let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]).unwrap();
    let oracle = enumeration(&model, 6);
    let obs: Vec<f64> = model.terms.iter().map(|t| brute_term(t, &g, None)).collect();
    let exact = oracle.mle(&obs, &[0.0, 0.0]);
    let exact_ll = dot(&exact, &obs) - oracle.log_kappa(&exact);

    let mut control = EstimationControl::default().with_seed(6);
    control.mcmc.burn_in = 5_000;
    control.mcmc.interval = 50;
    control.mcmc.sample_count = 2_000;
    control.samples_per_bridge = 2_000;
    let fit = match mcmc_mle(&model, &g, None, &control, None) {
        Ok(f) => f,
        Err(e) => return outcome(false, format!("fit failed: {e}")),
    };
    let z: Vec<f64> = (0..2).map(|k| (fit.theta_hat[k] - exact[k]).abs() / fit.se[k]).collect();
    let ll = log_likelihood(&model, &g, None, &exact, &control.clone().with_seed(60)).unwrap();
    let pass = z.iter().all(|&z| z < 2.0) && (ll - exact_ll).abs() < 0.1;
    outcome(
        pass,
        format!(
            "θ̂ {:.3?} vs exact {:.3?} (|z| {:.2?}); loglik {ll:.4} vs {exact_ll:.4}",
            fit.theta_hat, exact, z
        ),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let model = ModelSpec::best_assessment(0.75);
    let truth = [-3.0, 0.8, -0.3];
    let control = SamplerControl {
        seed: 7,
        sample_count: 1,
        initial: InitialState::Empty,
        ..SamplerControl::default()
    };
    let g = sample(&model, &truth, 90, None, None, &control).unwrap().graphs.remove(0);
    let fit = match mcmc_mle(&model, &g, None, &EstimationControl::default().with_seed(70), None) {
        Ok(f) => f,
        Err(e) => return outcome(false, format!("fit failed: {e}")),
    };
    let z: Vec<f64> = (0..3).map(|k| (fit.theta_hat[k] - truth[k]) / fit.se[k]).collect();
    let t = start.elapsed();
    let pass = z.iter().all(|z| z.abs() <= 3.0) && t < Duration::from_secs(300);
    outcome(
        pass,
        format!("θ̂ {:.3?}, z {:.2?}, {:.1}s", fit.theta_hat, z, t.as_secs_f64()),
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let model = ModelSpec::new(vec![Term::Edges, Term::Gwesp(0.75), Term::Gwnsp(0.75), Term::Gwd(0.75)]);
    let control = SamplerControl {
        seed: 8,
        initial: InitialState::Empty,
        ..SamplerControl::default()
    };
    let batch = match sample(&model, &[-4.48, 1.51, -0.15, 1.12], 90, None, None, &control) {
        Ok(b) => b,
        Err(e) => return outcome(false, format!("simulation failed: {e}")),
    };
    let m = ensemble_metrics(&batch.graphs).mean;
    let checks = [
        ("C", m.clustering_coefficient, 0.468, 0.03),
        ("L", m.harmonic_path_length, 3.475, 0.20),
        ("E_loc", m.local_efficiency, 0.576, 0.03),
        ("E_glob", m.global_efficiency, 0.290, 0.02),
        ("K", m.mean_degree, 4.939, 0.40),
    ];
    let t = start.elapsed();
    let pass = checks.iter().all(|(_, v, c, tol)| (v - c).abs() <= *tol) && t < Duration::from_secs(300);
    let parts: Vec<String> = checks
        .iter()
        .map(|(name, v, c, tol)| format!("{name} {v:.3} ({c}±{tol})"))
        .collect();
    outcome(
        pass,
        format!(
            "{}; L over reachable pairs {:.3}; {} networks, {:.1}s",
            parts.join(", "),
            m.characteristic_path_length,
            batch.graphs.len(),
            t.as_secs_f64()
        ),
    )
}

fn criterion_9() -> Outcome {
    let group = |rows: [(f64, f64); 3]| GroupInput::Summary {
        terms: None,
        coordinates: rows.iter().map(|&(mean, se)| CoordinateSummary { mean, se, n: 5 }).collect(),
    };
    let young = group([(-2.45, 0.395), (0.89, 0.181), (-0.32, 0.00662)]);
    let old = group([(-3.09, 0.347), (1.14, 0.153), (-0.24, 0.00479)]);
    let cmp = group_compare(&young, &old, VarianceModel::Welch).unwrap();
    let p: Vec<f64> = cmp.coordinates.iter().map(|c| c.p).collect();
    let pass = (p[0] - 0.2626).abs() <= 0.03 && (p[1] - 0.3339).abs() <= 0.03 && p[2] < 0.001;
    outcome(pass, format!("Welch p = {:.4}, {:.4}, {:.2e}", p[0], p[1], p[2]))
}

fn criterion_10() -> Outcome {
    let mut r = rng(10);
    let n = 90;
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w: f64 = r.random_range(-0.3..0.9);
            rows[i][j] = w;
            rows[j][i] = w;
        }
    }
    let w = WeightMatrix::from_rows(rows).unwrap();
    let res = threshold_matrix(&w, 2.8, false).unwrap();
    let step = 2.0 / n as f64;
    let within = (res.mean_degree - res.target_mean_degree).abs() <= step;
    let target_ok = (res.target_mean_degree - 4.993).abs() < 0.01;
    let mut monotone = true;
    let mut last = usize::MAX;
    for k in 0..40 {
        let s = 1.2 + 0.1 * k as f64;
        let m = threshold_matrix(&w, s, false).unwrap().graph.edge_count();
        monotone &= m <= last;
        last = m;
    }
    outcome(
        within && target_ok && monotone,
        format!(
            "target K {:.4}, achieved K {:.4} (step {step:.4}), monotone over S ∈ [1.2, 5.1]: {monotone}",
            res.target_mean_degree, res.mean_degree
        ),
    )
}

fn criterion_11() -> Outcome {
    let model = ModelSpec::best_assessment(0.75);
    let control = SamplerControl {
        seed: 11,
        sample_count: 1,
        initial: InitialState::Empty,
        ..SamplerControl::default()
    };
    let g = sample(&model, &[-3.0, 0.8, -0.3], 90, None, None, &control).unwrap().graphs.remove(0);
    let mut ec = EstimationControl::default().with_seed(110);
    ec.bridge_count = 0;
    let fit = match mcmc_mle(&model, &g, None, &ec, None) {
        Ok(f) => f,
        Err(e) => return outcome(false, format!("fit failed: {e}")),
    };
    let gc = SamplerControl {
        seed: 111,
        ..SamplerControl::default()
    };
    let good = gof_run(&fit, &g, None, &gc).unwrap();
    let edges = mple(&"edges".parse().unwrap(), &g, None).unwrap();
    let bad = gof_run(&edges, &g, None, &gc).unwrap();
    let esp_good = good.panel(PanelKind::EdgewiseSharedPartners).coverage;
    let esp_bad = bad.panel(PanelKind::EdgewiseSharedPartners).coverage;
    outcome(
        good.overall_score >= 0.9 && esp_bad < esp_good,
        format!(
            "self-consistent score {:.3}; ESP coverage {:.3} (edges only) vs {:.3}",
            good.overall_score, esp_bad, esp_good
        ),
    )
}

fn criterion_12() -> Outcome {
    let mut control = SelectionControl::default();
    control.estimation.mcmc.seed = 12;
    control.estimation.mcmc.burn_in = 10_000;
    control.estimation.mcmc.interval = 200;
    control.estimation.mcmc.sample_count = 500;
    control.estimation.bridge_count = 8;
    control.estimation.samples_per_bridge = 300;
    let mut r = rng(12);
    let g = random_graph(&mut r, 30, 0.12);
    let set = CandidateSet {
        terms: "edges,twopath,gwesp,gwnsp".parse().unwrap(),
        alpha: 0.05,
        strategy: AicStrategy::BackwardStepwise,
    };

    let pv = match backward_pvalue_select(&set, &g, None, &control) {
        Ok(t) => t,
        Err(e) => return outcome(false, format!("p-value selection failed: {e}")),
    };
    let sizes: Vec<usize> = pv.accepted().map(|s| s.model.len()).collect();
    let one_per_step = sizes.windows(2).all(|w| w[0] == w[1] + 1);
    let last = pv.final_step().and_then(|s| s.fit.as_ref());
    let all_sig = last.is_some_and(|f| f.theta_hat.len() == 1 || f.wald_p.iter().all(|&p| p <= set.alpha));

    let aic = match aic_select(&set, &g, None, &control) {
        Ok(t) => t,
        Err(e) => return outcome(false, format!("AIC selection failed: {e}")),
    };
    let aics: Vec<f64> = aic.accepted().filter_map(|s| s.aic).collect();
    let monotone = aics.windows(2).all(|w| w[1] <= w[0]);

    let replay_pv = backward_pvalue_select(&set, &g, None, &control).unwrap();
    let replay_aic = aic_select(&set, &g, None, &control).unwrap();
    let json = |t: &SelectionTrace| serde_json::to_string(t).unwrap();
    let replay = json(&pv) == json(&replay_pv) && json(&aic) == json(&replay_aic);

    outcome(
        one_per_step && all_sig && monotone && replay,
        format!(
            "p-value sizes {sizes:?}, final all significant: {all_sig}; AIC path {:.2?}; replay identical: {replay}",
            aics
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("statistic oracle equivalence", criterion_1),
        ("change-score exactness", criterion_2),
        ("shared-partner identities", criterion_3),
        ("Erdős–Rényi equivalence", criterion_4),
        ("MPLE closed form", criterion_5),
        ("exact-likelihood cross-check", criterion_6),
        ("parameter recovery", criterion_7),
        ("published ensemble metrics", criterion_8),
        ("published group comparison", criterion_9),
        ("thresholding", criterion_10),
        ("GOF self-consistency", criterion_11),
        ("selection procedure properties", criterion_12),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<32} {}  {}",
            k + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
