//! Plain-text tables for the terminal.

use std::fmt::Write;

use ergm_core::estimation::FitResult;
use ergm_core::gof::GofReport;
use ergm_core::io::{SimulationSummary, ThresholdSummary};
use ergm_core::netmetrics::MetricReport;
use ergm_core::selection::{Decision, GroupComparison, SelectionMethod, SelectionTrace};
use ergm_core::ModelSpec;

pub fn p_value(p: f64) -> String {
    if p.is_nan() {
        "NA".into()
    } else if p < 0.001 {
        "<0.001".into()
    } else {
        format!("{p:.4}")
    }
}

pub fn fit(f: &FitResult) -> String {
    let mut s = format!("{:<16} {:>10} {:>10} {:>8}\n", "term", "estimate", "se", "p");
    for (k, (term, est)) in f.estimates().enumerate() {
        let _ = writeln!(s, "{term:<16} {est:>10.4} {:>10.4} {:>8}", f.se[k], p_value(f.wald_p[k]));
    }
    if let (Some(ll), Some(kind)) = (f.loglik, &f.loglik_kind) {
        let _ = write!(s, "log-likelihood {ll:.3} ({})", format!("{kind:?}").to_lowercase());
        if let Some(aic) = f.aic {
            let _ = write!(s, "  AIC {aic:.3}");
        }
        s.push('\n');
    }
    for d in &f.diagnostics {
        let _ = writeln!(s, "note: {d}");
    }
    s
}

pub fn gof(r: &GofReport) -> String {
    let mut s = String::new();
    for p in &r.panels {
        let _ = writeln!(s, "{:<28} coverage {:.3}", p.kind.name(), p.coverage);
    }
    let _ = writeln!(s, "{:<28} {:.3}", "overall score", r.overall_score);
    s
}

/// One row per candidate term: its estimate in the final model or `–`.
pub fn selection(t: &SelectionTrace, candidates: &ModelSpec) -> String {
    let mut s = String::new();
    let Some(last) = t.final_step() else {
        return "no model selected\n".into();
    };
    let mut terms: Vec<String> = candidates.terms.iter().map(ToString::to_string).collect();
    for term in &last.model.terms {
        let name = term.to_string();
        if !terms.contains(&name) {
            terms.push(name);
        }
    }
    let estimates: Vec<(String, f64)> = last.fit.as_ref().map(|f| f.estimates().collect()).unwrap_or_default();
    for term in &terms {
        match estimates.iter().find(|(n, _)| n == term) {
            Some((_, e)) => {
                let _ = writeln!(s, "{term:<16} {e:>10.4}");
            }
            None => {
                let _ = writeln!(s, "{term:<16} {:>10}", "–");
            }
        }
    }
    if let Some(aic) = last.aic {
        let _ = writeln!(s, "AIC {aic:.3}");
    }
    if t.method == SelectionMethod::Graphical {
        s.push_str("\nranking (advisory; the final choice is the analyst's):\n");
        let mut ranked: Vec<_> = t
            .steps
            .iter()
            .filter_map(|st| match st.decision {
                Decision::Ranked { rank } => Some((rank, st)),
                _ => None,
            })
            .collect();
        ranked.sort_by_key(|(r, _)| *r);
        for (rank, st) in ranked {
            let _ = writeln!(s, "{rank:>3}  {:.3}  {}", st.score.unwrap_or(f64::NAN), st.model);
        }
        for st in t.steps.iter().filter(|st| st.failure.is_some()) {
            let f = st.failure.as_ref().unwrap();
            let _ = writeln!(s, "  -  {}  {} ({})", f.class, st.model, f.message);
        }
    }
    s
}

pub fn comparison(c: &GroupComparison) -> String {
    let mut s = format!(
        "{:<16} {:>18} {:>18} {:>8} {:>7} {:>8}\n",
        "term", "group A (se)", "group B (se)", "t", "df", "p"
    );
    for r in &c.coordinates {
        let a = format!("{:.3} ({:.3})", r.a.mean, r.a.se);
        let b = format!("{:.3} ({:.3})", r.b.mean, r.b.se);
        let _ = writeln!(s, "{:<16} {a:>18} {b:>18} {:>8.3} {:>7.2} {:>8}", r.term, r.t, r.df, p_value(r.p));
    }
    s
}

pub fn threshold(t: &ThresholdSummary) -> String {
    let mut s = format!(
        "target mean degree K = {:.4} (n = {}, S = {})\n",
        t.target_mean_degree, t.nodes, t.s_target
    );
    let _ = writeln!(
        s,
        "achieved mean degree {:.4} with {} edges at threshold {}",
        t.mean_degree, t.edges, t.threshold
    );
    if let Some(a) = t.achieved_s {
        let _ = writeln!(s, "achieved S {a:.4}");
    }
    s
}

pub fn metrics(m: &MetricReport) -> String {
    format!(
        "{:>7} {:>7} {:>7} {:>7} {:>7} {:>7}\n{:>7.3} {:>7.3} {:>7.3} {:>7.3} {:>7.3} {:>7.3}\n",
        "C",
        "L",
        "E_loc",
        "E_glob",
        "K",
        "L_reach",
        m.clustering_coefficient,
        m.harmonic_path_length,
        m.local_efficiency,
        m.global_efficiency,
        m.mean_degree,
        m.characteristic_path_length,
    )
}

pub fn simulation(s: &SimulationSummary) -> String {
    let m = &s.metrics.mean;
    let mut out = format!(
        "{} networks, {} nodes, acceptance {:.3}, mean density {:.4}\n",
        s.samples, s.nodes, s.acceptance_rate, s.mean_density
    );
    out.push_str(&metrics(m));
    for d in &s.diagnostics {
        let _ = writeln!(out, "warning: {d}");
    }
    out
}
