//! Test-only oracles. Everything here works from definitions by brute
//! enumeration and shares no code path with the library beyond `Graph`
//! edge queries.

#![allow(dead_code)]

use ergm_core::{Graph, NodeAttributes, Term};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

pub fn random_attrs(rng: &mut impl Rng, n: usize) -> NodeAttributes {
    let values = (0..n)
        .map(|_| ["L", "R", "M"][rng.random_range(0..3)].to_string())
        .collect();
    NodeAttributes::new("side", values)
}

/// Graph on `n` nodes whose edge set is the bit pattern `code` over the
/// dyads in lexicographic order.
pub fn graph_from_code(n: usize, code: u64) -> Graph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if code >> bit & 1 == 1 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

fn shared(g: &Graph, a: usize, b: usize) -> usize {
    (0..g.node_count())
        .filter(|&w| w != a && w != b && g.has_edge(a, w) && g.has_edge(b, w))
        .count()
}

fn degree(g: &Graph, v: usize) -> usize {
    (0..g.node_count()).filter(|&w| w != v && g.has_edge(v, w)).count()
}

fn gw_weight(tau: f64, k: usize) -> f64 {
    tau.exp() * (1.0 - (1.0 - (-tau).exp()).powi(k as i32))
}

/// Definitional value of one term.
pub fn brute_term(term: &Term, g: &Graph, attrs: Option<&NodeAttributes>) -> f64 {
    let n = g.node_count();
    let pairs = || (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)));
    match term {
        Term::Edges => pairs().filter(|&(i, j)| g.has_edge(i, j)).count() as f64,
        Term::TwoPath => {
            let mut c = 0;
            for center in 0..n {
                for (a, b) in pairs() {
                    if a != center && b != center && g.has_edge(center, a) && g.has_edge(center, b) {
                        c += 1;
                    }
                }
            }
            c as f64
        }
        Term::KCycle(3) => {
            let mut c = 0;
            for a in 0..n {
                for b in (a + 1)..n {
                    for d in (b + 1)..n {
                        if g.has_edge(a, b) && g.has_edge(b, d) && g.has_edge(a, d) {
                            c += 1;
                        }
                    }
                }
            }
            c as f64
        }
        Term::KCycle(4) => {
            let mut c = 0;
            for a in 0..n {
                for b in (a + 1)..n {
                    for x in (b + 1)..n {
                        for y in (x + 1)..n {
                            // The three distinct 4-cycles on {a, b, x, y}.
                            for [p, q, r, s] in [[a, b, x, y], [a, b, y, x], [a, x, b, y]] {
                                if g.has_edge(p, q) && g.has_edge(q, r) && g.has_edge(r, s) && g.has_edge(s, p) {
                                    c += 1;
                                }
                            }
                        }
                    }
                }
            }
            c as f64
        }
        Term::KCycle(_) => unreachable!(),
        Term::KDegree(k) => (0..n).filter(|&v| degree(g, v) == *k).count() as f64,
        Term::Gwd(tau) => (0..n).map(|v| gw_weight(*tau, degree(g, v))).sum(),
        Term::Gwesp(tau) => pairs()
            .filter(|&(i, j)| g.has_edge(i, j))
            .map(|(i, j)| gw_weight(*tau, shared(g, i, j)))
            .sum(),
        Term::Gwnsp(tau) => pairs()
            .filter(|&(i, j)| !g.has_edge(i, j))
            .map(|(i, j)| gw_weight(*tau, shared(g, i, j)))
            .sum(),
        Term::Gwdsp(tau) => pairs().map(|(i, j)| gw_weight(*tau, shared(g, i, j))).sum(),
        Term::Nodematch(_) => {
            let a = attrs.expect("nodematch oracle needs attributes");
            pairs()
                .filter(|&(i, j)| g.has_edge(i, j) && a.values[i] == a.values[j])
                .count() as f64
        }
    }
}

/// Every term kind, with decay 0.75 and a second decay for the weighted ones.
pub fn all_terms(n: usize) -> Vec<Term> {
    let mut terms = vec![
        Term::Edges,
        Term::TwoPath,
        Term::KCycle(3),
        Term::KCycle(4),
        Term::Gwd(0.75),
        Term::Gwesp(0.75),
        Term::Gwnsp(0.75),
        Term::Gwdsp(0.75),
        Term::Gwesp(1.9),
        Term::Gwd(0.3),
        Term::Nodematch("side".into()),
    ];
    for k in 0..n.min(4) {
        terms.push(Term::KDegree(k));
    }
    terms
}

/// Log-sum-exp over a slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Exact log normalising constant, mean and covariance of the statistics,
/// by enumerating all graphs given their statistic vectors.
pub struct Enumeration {
    pub stats: Vec<Vec<f64>>,
}

impl Enumeration {
    pub fn log_kappa(&self, theta: &[f64]) -> f64 {
        let lin: Vec<f64> = self.stats.iter().map(|s| dot(theta, s)).collect();
        log_sum_exp(&lin)
    }

    pub fn moments(&self, theta: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let p = theta.len();
        let lk = self.log_kappa(theta);
        let mut mean = vec![0.0; p];
        let mut second = vec![vec![0.0; p]; p];
        for s in &self.stats {
            let w = (dot(theta, s) - lk).exp();
            for a in 0..p {
                mean[a] += w * s[a];
                for b in 0..p {
                    second[a][b] += w * s[a] * s[b];
                }
            }
        }
        let cov = (0..p)
            .map(|a| (0..p).map(|b| second[a][b] - mean[a] * mean[b]).collect())
            .collect();
        (mean, cov)
    }

    /// Exact MLE by Newton's method on the convex log-partition function.
    pub fn mle(&self, observed: &[f64], start: &[f64]) -> Vec<f64> {
        let mut theta = start.to_vec();
        for _ in 0..200 {
            let (mean, cov) = self.moments(&theta);
            let grad: Vec<f64> = observed.iter().zip(&mean).map(|(o, m)| o - m).collect();
            let step = solve(&cov, &grad);
            let mut scale = 1.0;
            let max = step.iter().map(|s| s.abs()).fold(0.0, f64::max);
            if max > 1.0 {
                scale = 1.0 / max;
            }
            for (t, s) in theta.iter_mut().zip(&step) {
                *t += scale * s;
            }
            if max < 1e-12 {
                break;
            }
        }
        theta
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &r)| {
        let mut row = row.clone();
        row.push(r);
        row
    }).collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| m[x][col].abs().partial_cmp(&m[y][col].abs()).unwrap())
            .unwrap();
        m.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..=n {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    (0..n).map(|i| m[i][n] / m[i][i]).collect()
}

pub fn inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|c| {
            let e: Vec<f64> = (0..n).map(|r| (r == c) as u8 as f64).collect();
            solve(a, &e)
        })
        .collect();
    (0..n).map(|r| (0..n).map(|c| cols[c][r]).collect()).collect()
}

/// Watts–Strogatz style ring lattice with random rewiring.
pub fn small_world(rng: &mut impl Rng, n: usize, half_k: usize, rewire: f64) -> Graph {
    let mut g = Graph::empty(n);
    for i in 0..n {
        for s in 1..=half_k {
            let j = (i + s) % n;
            if !g.has_edge(i, j) {
                g.toggle(i, j).unwrap();
            }
        }
    }
    let edges = g.edge_list();
    for (i, j) in edges {
        if rng.random::<f64>() < rewire {
            let k = rng.random_range(0..n);
            if k != i && !g.has_edge(i, k) {
                g.toggle(i, j).unwrap();
                g.toggle(i, k).unwrap();
            }
        }
    }
    g
}
