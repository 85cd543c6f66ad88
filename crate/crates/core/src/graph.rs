//! Undirected simple graphs stored as dense bit rows, plus the distribution
//! summaries used by goodness-of-fit checks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected simple graph on nodes `0..n`.
///
/// Each node owns a bit row of `ceil(n / 64)` words, so membership is a
/// single word probe and common-neighbour counts are popcounts over the
/// AND of two rows.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    degree: Vec<usize>,
    edges: usize,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edge_list())
            .finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph {
            n,
            words,
            rows: vec![0; n * words],
            degree: vec![0; n],
            edges: 0,
        }
    }

    /// Builds a graph from a pair list. Duplicates (in either orientation)
    /// collapse to one edge.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(i, j) in edges {
            g.check_pair(i, j)?;
            if !g.has_edge(i, j) {
                g.set(i, j, true);
            }
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                g.set(i, j, true);
            }
        }
        g
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        for node in [i, j] {
            if node >= self.n {
                return Err(Error::NodeOutOfRange { node, n: self.n });
            }
        }
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        Ok(())
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Number of unordered node pairs, `C(n, 2)`.
    #[inline]
    pub fn dyad_count(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    pub fn density(&self) -> f64 {
        match self.dyad_count() {
            0 => 0.0,
            d => self.edges as f64 / d as f64,
        }
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.degree[i]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degree
    }

    #[inline]
    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, present: bool) {
        let (wi, bi) = (i * self.words + j / 64, 1u64 << (j % 64));
        let (wj, bj) = (j * self.words + i / 64, 1u64 << (i % 64));
        if present {
            self.rows[wi] |= bi;
            self.rows[wj] |= bj;
            self.degree[i] += 1;
            self.degree[j] += 1;
            self.edges += 1;
        } else {
            self.rows[wi] &= !bi;
            self.rows[wj] &= !bj;
            self.degree[i] -= 1;
            self.degree[j] -= 1;
            self.edges -= 1;
        }
    }

    /// Flips dyad `(i, j)`. Returns `true` if the edge is present afterwards.
    pub fn toggle(&mut self, i: usize, j: usize) -> Result<bool> {
        self.check_pair(i, j)?;
        Ok(self.toggle_unchecked(i, j))
    }

    /// Sampler hot path; caller guarantees `i != j` and both in range.
    #[inline]
    pub fn toggle_unchecked(&mut self, i: usize, j: usize) -> bool {
        debug_assert!(i != j && i < self.n && j < self.n);
        let present = !self.has_edge(i, j);
        self.set(i, j, present);
        present
    }

    /// Number of common neighbours of `i` and `j`.
    #[inline]
    pub fn common_neighbors(&self, i: usize, j: usize) -> usize {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn neighbors(&self, i: usize) -> Neighbors<'_> {
        Neighbors {
            row: self.row(i),
            word: 0,
            current: self.row(i).first().copied().unwrap_or(0),
        }
    }

    /// Iterates `(i, j)` with `i < j` over present edges.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.neighbors(i).filter(move |&j| j > i).map(move |j| (i, j)))
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        self.edges().collect()
    }

    /// Recounts degrees and edges from the bit rows. Used to audit the
    /// incremental bookkeeping.
    pub fn recount_matches(&self) -> bool {
        let mut total = 0;
        for i in 0..self.n {
            let d: usize = self.row(i).iter().map(|w| w.count_ones() as usize).sum();
            if d != self.degree[i] || self.has_edge(i, i) {
                return false;
            }
            total += d;
        }
        total == 2 * self.edges
    }

    pub fn triangle_count(&self) -> usize {
        let mut t = 0;
        for (i, j) in self.edges() {
            t += self.common_neighbors(i, j);
        }
        t / 3
    }

    pub fn shared_partner_distributions(&self) -> SharedPartnerDistributions {
        let len = self.n.saturating_sub(1).max(1);
        let mut esp = vec![0u64; len];
        let mut nsp = vec![0u64; len];
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let s = self.common_neighbors(i, j);
                if self.has_edge(i, j) {
                    esp[s] += 1;
                } else {
                    nsp[s] += 1;
                }
            }
        }
        let dsp = esp.iter().zip(&nsp).map(|(a, b)| a + b).collect();
        SharedPartnerDistributions { esp, nsp, dsp }
    }

    /// Entry `k` counts nodes of degree exactly `k`; length `n`.
    pub fn degree_distribution(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.n.max(1)];
        for &d in &self.degree {
            out[d] += 1;
        }
        out
    }

    /// Breadth-first distances from `source`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for v in self.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn geodesic_distribution(&self) -> GeodesicDistribution {
        let mut by_distance = vec![0u64; self.n.saturating_sub(1)];
        let mut unreachable = 0;
        for i in 0..self.n {
            let dist = self.bfs_distances(i);
            for d in &dist[(i + 1)..] {
                match d {
                    Some(d) => by_distance[d - 1] += 1,
                    None => unreachable += 1,
                }
            }
        }
        GeodesicDistribution {
            by_distance,
            unreachable,
        }
    }

    /// Triples with 0, 1, 2 and 3 edges, from degrees and the triangle count.
    pub fn triad_census(&self) -> [u64; 4] {
        let n = self.n as u64;
        let total = if n < 3 { 0 } else { n * (n - 1) * (n - 2) / 6 };
        let t3 = self.triangle_count() as u64;
        let wedges: u64 = self
            .degree
            .iter()
            .map(|&d| (d as u64) * (d as u64).saturating_sub(1) / 2)
            .sum();
        let t2 = wedges - 3 * t3;
        let t1 = (self.edges as u64) * n.saturating_sub(2) - 2 * t2 - 3 * t3;
        let t0 = total - t1 - t2 - t3;
        [t0, t1, t2, t3]
    }

    /// Subgraph induced on `nodes`, relabelled `0..nodes.len()` in the given order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut sub = Graph::empty(nodes.len());
        for (a, &u) in nodes.iter().enumerate() {
            for (b, &v) in nodes.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    sub.set(a, b, true);
                }
            }
        }
        sub
    }
}

pub struct Neighbors<'a> {
    row: &'a [u64],
    word: usize,
    current: u64,
}

impl Iterator for Neighbors<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word * 64 + bit);
            }
            self.word += 1;
            if self.word >= self.row.len() {
                return None;
            }
            self.current = self.row[self.word];
        }
    }
}

/// Shared-partner counts over dyads, split by tie status.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedPartnerDistributions {
    pub esp: Vec<u64>,
    pub nsp: Vec<u64>,
    pub dsp: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicDistribution {
    /// Entry `k` counts pairs at distance `k + 1`.
    pub by_distance: Vec<u64>,
    pub unreachable: u64,
}

impl GeodesicDistribution {
    pub fn total(&self) -> u64 {
        self.by_distance.iter().sum::<u64>() + self.unreachable
    }

    /// Non-zero distance buckets keyed by distance.
    pub fn as_map(&self) -> BTreeMap<usize, u64> {
        self.by_distance
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (k + 1, c))
            .collect()
    }
}

/// Categorical node labels for one named attribute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeAttributes {
    pub name: String,
    pub values: Vec<String>,
    /// Label treated as missing; pairs involving it never match.
    #[serde(default)]
    pub unknown_label: Option<String>,
}

impl NodeAttributes {
    pub fn new(name: impl Into<String>, values: Vec<String>) -> Self {
        NodeAttributes {
            name: name.into(),
            values,
            unknown_label: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn alphabet(&self) -> BTreeSet<&str> {
        self.values.iter().map(String::as_str).collect()
    }

    #[inline]
    pub fn matches(&self, i: usize, j: usize) -> bool {
        let (a, b) = (&self.values[i], &self.values[j]);
        a == b && self.unknown_label.as_deref() != Some(a.as_str())
    }
}
