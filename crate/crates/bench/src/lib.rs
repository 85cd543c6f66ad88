//! Fixtures shared by the benchmarks.

use ergm_core::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bernoulli graph with tie probability `p`.
pub fn bernoulli(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(p) {
                g.toggle(i, j).expect("valid dyad");
            }
        }
    }
    g
}

/// Ring lattice where each node links to its `k` nearest neighbours on
/// each side; dense in triangles.
pub fn lattice(n: usize, k: usize) -> Graph {
    let mut g = Graph::empty(n);
    for i in 0..n {
        for d in 1..=k {
            let j = (i + d) % n;
            if !g.has_edge(i, j) {
                g.toggle(i, j).expect("valid dyad");
            }
        }
    }
    g
}
