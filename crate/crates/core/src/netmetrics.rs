//! Descriptive connectome metrics: clustering, path length, efficiencies
//! and mean degree.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub clustering_coefficient: f64,
    /// Mean geodesic over reachable pairs only.
    pub characteristic_path_length: f64,
    pub local_efficiency: f64,
    pub global_efficiency: f64,
    pub mean_degree: f64,
    pub reachable_pair_fraction: f64,
    /// `1 / global_efficiency`: the harmonic-mean path length, which stays
    /// finite on disconnected graphs (0 when no pair is reachable).
    pub harmonic_path_length: f64,
}

impl MetricReport {
    pub const NAMES: [&'static str; 7] = [
        "clustering_coefficient",
        "characteristic_path_length",
        "local_efficiency",
        "global_efficiency",
        "mean_degree",
        "reachable_pair_fraction",
        "harmonic_path_length",
    ];

    pub fn as_array(&self) -> [f64; 7] {
        [
            self.clustering_coefficient,
            self.characteristic_path_length,
            self.local_efficiency,
            self.global_efficiency,
            self.mean_degree,
            self.reachable_pair_fraction,
            self.harmonic_path_length,
        ]
    }

    fn from_array(a: [f64; 7]) -> Self {
        MetricReport {
            clustering_coefficient: a[0],
            characteristic_path_length: a[1],
            local_efficiency: a[2],
            global_efficiency: a[3],
            mean_degree: a[4],
            reachable_pair_fraction: a[5],
            harmonic_path_length: a[6],
        }
    }
}

struct PathSummary {
    reachable: u64,
    distance_sum: u64,
    inverse_sum: f64,
    pairs: u64,
}

fn path_summary(g: &Graph) -> PathSummary {
    let n = g.node_count();
    let mut s = PathSummary {
        reachable: 0,
        distance_sum: 0,
        inverse_sum: 0.0,
        pairs: (n * n.saturating_sub(1) / 2) as u64,
    };
    for i in 0..n {
        let dist = g.bfs_distances(i);
        for d in dist[(i + 1)..].iter().flatten() {
            s.reachable += 1;
            s.distance_sum += *d as u64;
            s.inverse_sum += 1.0 / *d as f64;
        }
    }
    s
}

/// Mean of `1/d` over all unordered pairs, unreachable pairs contributing 0.
pub fn global_efficiency(g: &Graph) -> f64 {
    let s = path_summary(g);
    if s.pairs == 0 {
        0.0
    } else {
        s.inverse_sum / s.pairs as f64
    }
}

pub fn local_clustering(g: &Graph, i: usize) -> f64 {
    let d = g.degree(i);
    if d < 2 {
        return 0.0;
    }
    let links: usize = g.neighbors(i).map(|w| g.common_neighbors(i, w)).sum::<usize>() / 2;
    2.0 * links as f64 / (d * (d - 1)) as f64
}

/// Global efficiency of the subgraph induced on the neighbours of `i`.
pub fn nodal_local_efficiency(g: &Graph, i: usize) -> f64 {
    if g.degree(i) < 2 {
        return 0.0;
    }
    let nbrs: Vec<usize> = g.neighbors(i).collect();
    global_efficiency(&g.induced_subgraph(&nbrs))
}

pub fn descriptive_metrics(g: &Graph) -> MetricReport {
    let n = g.node_count();
    let nf = n.max(1) as f64;
    let paths = path_summary(g);
    let clustering = (0..n).map(|i| local_clustering(g, i)).sum::<f64>() / nf;
    let local = (0..n).map(|i| nodal_local_efficiency(g, i)).sum::<f64>() / nf;
    let (l, e_glob, reach) = if paths.pairs == 0 {
        (0.0, 0.0, 0.0)
    } else {
        let l = if paths.reachable == 0 {
            0.0
        } else {
            paths.distance_sum as f64 / paths.reachable as f64
        };
        (
            l,
            paths.inverse_sum / paths.pairs as f64,
            paths.reachable as f64 / paths.pairs as f64,
        )
    };
    MetricReport {
        clustering_coefficient: clustering,
        characteristic_path_length: l,
        local_efficiency: local,
        global_efficiency: e_glob,
        mean_degree: 2.0 * g.edge_count() as f64 / nf,
        reachable_pair_fraction: reach,
        harmonic_path_length: if e_glob > 0.0 { 1.0 / e_glob } else { 0.0 },
    }
}

/// Per-metric mean and standard error of the mean over a set of graphs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMetrics {
    pub count: usize,
    pub mean: MetricReport,
    pub standard_error: MetricReport,
}

pub fn ensemble_metrics(graphs: &[Graph]) -> EnsembleMetrics {
    use rayon::prelude::*;
    let reports: Vec<[f64; 7]> = graphs
        .par_iter()
        .map(|g| descriptive_metrics(g).as_array())
        .collect();
    summarize(&reports)
}

fn summarize(rows: &[[f64; 7]]) -> EnsembleMetrics {
    let k = rows.len() as f64;
    let mut mean = [0.0; 7];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v / k;
        }
    }
    let mut se = [0.0; 7];
    if rows.len() > 1 {
        for (c, s) in se.iter_mut().enumerate() {
            let var = rows.iter().map(|r| (r[c] - mean[c]).powi(2)).sum::<f64>() / (k - 1.0);
            *s = (var / k).sqrt();
        }
    }
    EnsembleMetrics {
        count: rows.len(),
        mean: MetricReport::from_array(mean),
        standard_error: MetricReport::from_array(se),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn complete_graph() {
        let m = descriptive_metrics(&Graph::complete(4));
        approx(m.clustering_coefficient, 1.0);
        approx(m.characteristic_path_length, 1.0);
        approx(m.local_efficiency, 1.0);
        approx(m.global_efficiency, 1.0);
        approx(m.mean_degree, 3.0);
        approx(m.reachable_pair_fraction, 1.0);
    }

    #[test]
    fn star_graph() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let m = descriptive_metrics(&g);
        approx(m.clustering_coefficient, 0.0);
        approx(m.mean_degree, 1.6);
        approx(m.characteristic_path_length, 1.6);
        approx(m.global_efficiency, 0.7);
        approx(m.local_efficiency, 0.0);
        approx(m.harmonic_path_length, 1.0 / 0.7);
    }

    #[test]
    fn disconnected_path_length_uses_reachable_pairs() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let m = descriptive_metrics(&g);
        approx(m.characteristic_path_length, 1.0);
        approx(m.reachable_pair_fraction, 2.0 / 6.0);
        approx(m.global_efficiency, 2.0 / 6.0);
    }

    #[test]
    fn ensemble_of_two_and_of_identical_graphs() {
        let a = Graph::complete(4);
        let b = Graph::from_edges(4, &[(0, 1)]).unwrap();
        let e = ensemble_metrics(&[a.clone(), b.clone()]);
        let (ma, mb) = (descriptive_metrics(&a), descriptive_metrics(&b));
        approx(e.mean.mean_degree, (ma.mean_degree + mb.mean_degree) / 2.0);
        approx(e.standard_error.mean_degree, (ma.mean_degree - mb.mean_degree).abs() / 2.0);
        let same = ensemble_metrics(&[a.clone(), a.clone(), a]);
        assert!(same.standard_error.as_array().iter().all(|&s| s == 0.0));
    }
}
