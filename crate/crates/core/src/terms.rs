//! Model terms: whole-graph statistics and their dyad change scores.
//!
//! Geometrically weighted terms use the curved-family form
//! `e^τ · Σ_k [1 − (1 − e^{−τ})^k] · N_k`, under which adding one unit to
//! a count at level `k` changes the statistic by exactly `(1 − e^{−τ})^k`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeAttributes};

pub const DEFAULT_DECAY: f64 = 0.75;

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Edges,
    TwoPath,
    /// Cycles of length 3 or 4.
    KCycle(usize),
    /// Nodes of degree exactly `k`.
    KDegree(usize),
    Gwd(f64),
    Gwesp(f64),
    Gwnsp(f64),
    Gwdsp(f64),
    /// Edges joining equally labelled nodes. An empty name accepts
    /// whichever attribute is supplied.
    Nodematch(String),
}

impl Term {
    pub fn name(&self) -> &'static str {
        match self {
            Term::Edges => "edges",
            Term::TwoPath => "twopath",
            Term::KCycle(_) => "kcycle",
            Term::KDegree(_) => "kdegree",
            Term::Gwd(_) => "gwd",
            Term::Gwesp(_) => "gwesp",
            Term::Gwnsp(_) => "gwnsp",
            Term::Gwdsp(_) => "gwdsp",
            Term::Nodematch(_) => "nodematch",
        }
    }

    pub fn decay(&self) -> Option<f64> {
        match *self {
            Term::Gwd(t) | Term::Gwesp(t) | Term::Gwnsp(t) | Term::Gwdsp(t) => Some(t),
            _ => None,
        }
    }

    /// Terms whose statistic is always an integer count.
    pub fn is_integer_valued(&self) -> bool {
        self.decay().is_none()
    }

    /// Dyad-independent terms leave the ERGM a Bernoulli-type model.
    pub fn is_dyad_independent(&self) -> bool {
        matches!(self, Term::Edges | Term::Nodematch(_))
    }

    fn shared_partner_kind(&self) -> Option<SpKind> {
        match self {
            Term::Gwesp(_) => Some(SpKind::Edgewise),
            Term::Gwnsp(_) => Some(SpKind::NonEdgewise),
            Term::Gwdsp(_) => Some(SpKind::Dyadwise),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SpKind {
    Edgewise,
    NonEdgewise,
    Dyadwise,
}

impl SpKind {
    #[inline]
    fn counts(self, edge: bool) -> bool {
        match self {
            SpKind::Edgewise => edge,
            SpKind::NonEdgewise => !edge,
            SpKind::Dyadwise => true,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Edges | Term::TwoPath => write!(f, "{}", self.name()),
            Term::KCycle(k) | Term::KDegree(k) => write!(f, "{}:{}", self.name(), k),
            Term::Gwd(t) | Term::Gwesp(t) | Term::Gwnsp(t) | Term::Gwdsp(t) => {
                write!(f, "{}:{}", self.name(), t)
            }
            Term::Nodematch(a) if a.is_empty() => write!(f, "nodematch"),
            Term::Nodematch(a) => write!(f, "nodematch:{a}"),
        }
    }
}

impl Term {
    /// Parses one `name[:param]` item. Geometrically weighted terms without
    /// a parameter take `default_decay`.
    pub fn parse(item: &str, default_decay: f64) -> Result<Term> {
        let item = item.trim();
        let (name, param) = match item.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (item, None),
        };
        let bad = |msg: &str| Error::TermParse(format!("`{item}`: {msg}"));
        let decay = |p: Option<&str>| -> Result<f64> {
            match p {
                None => Ok(default_decay),
                Some(p) => p.parse::<f64>().map_err(|_| bad("decay must be a number")),
            }
        };
        let int = |p: Option<&str>| -> Result<usize> {
            p.ok_or_else(|| bad("missing integer parameter"))?
                .parse::<usize>()
                .map_err(|_| bad("parameter must be a non-negative integer"))
        };
        let no_param = |t: Term| -> Result<Term> {
            match param {
                Some(_) => Err(bad("takes no parameter")),
                None => Ok(t),
            }
        };
        match name.to_ascii_lowercase().as_str() {
            "edges" => no_param(Term::Edges),
            "twopath" | "two-path" => no_param(Term::TwoPath),
            "kcycle" | "cycle" => {
                let k = int(param)?;
                if !(3..=4).contains(&k) {
                    return Err(bad("only 3- and 4-cycles are supported"));
                }
                Ok(Term::KCycle(k))
            }
            "kdegree" | "degree" => Ok(Term::KDegree(int(param)?)),
            "gwd" | "gwdegree" => Ok(Term::Gwd(decay(param)?)),
            "gwesp" => Ok(Term::Gwesp(decay(param)?)),
            "gwnsp" => Ok(Term::Gwnsp(decay(param)?)),
            "gwdsp" => Ok(Term::Gwdsp(decay(param)?)),
            "nodematch" => Ok(Term::Nodematch(param.unwrap_or("").to_string())),
            "" => Err(Error::TermParse("empty term".into())),
            _ => Err(bad("unknown term")),
        }
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Term> {
        Term::parse(s, DEFAULT_DECAY)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Term, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Ordered list of terms. The order fixes the coordinate order of every
/// statistic and parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModelSpec {
    pub terms: Vec<Term>,
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(Term::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<ModelSpec> {
        ModelSpec::parse(s, DEFAULT_DECAY)
    }
}

impl ModelSpec {
    pub fn new(terms: Vec<Term>) -> Self {
        ModelSpec { terms }
    }

    /// Parses the comma-separated term grammar, e.g.
    /// `edges,gwesp:0.75,gwnsp:0.75,nodematch:lobe`.
    pub fn parse(s: &str, default_decay: f64) -> Result<ModelSpec> {
        let terms = s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| Term::parse(t, default_decay))
            .collect::<Result<Vec<_>>>()?;
        if terms.is_empty() {
            return Err(Error::TermParse("no terms given".into()));
        }
        Ok(ModelSpec { terms })
    }

    /// Edges + GWESP + GWNSP.
    pub fn best_assessment(decay: f64) -> Self {
        ModelSpec::new(vec![Term::Edges, Term::Gwesp(decay), Term::Gwnsp(decay)])
    }

    /// Every candidate across the five term categories.
    pub fn full_candidate(decay: f64, attribute: Option<&str>) -> Self {
        let mut terms = vec![
            Term::Edges,
            Term::TwoPath,
            Term::Gwesp(decay),
            Term::Gwdsp(decay),
            Term::Gwnsp(decay),
            Term::Gwd(decay),
        ];
        if let Some(a) = attribute {
            terms.push(Term::Nodematch(a.to_string()));
        }
        ModelSpec::new(terms)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &Term) -> Option<usize> {
        self.terms.iter().position(|t| t == term)
    }

    pub fn without(&self, index: usize) -> ModelSpec {
        let mut terms = self.terms.clone();
        terms.remove(index);
        ModelSpec { terms }
    }

    pub fn is_dyad_independent(&self) -> bool {
        self.terms.iter().all(Term::is_dyad_independent)
    }

    pub fn validate(&self, n: usize, attrs: Option<&NodeAttributes>) -> Vec<ModelDiagnostic> {
        validate_model(self, n, attrs)
    }

    /// Like [`validate`](Self::validate) but folds diagnostics into one error.
    pub fn check(&self, n: usize, attrs: Option<&NodeAttributes>) -> Result<()> {
        let diags = self.validate(n, attrs);
        if diags.is_empty() {
            Ok(())
        } else {
            let msgs: Vec<String> = diags.iter().map(ToString::to_string).collect();
            Err(Error::InvalidModel(msgs.join("; ")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelDiagnostic {
    Empty,
    DuplicateTerm(String),
    InvalidDecay(String),
    MissingAttributes(String),
    AttributeLength { expected: usize, got: usize },
    DegreeOutOfRange { k: usize, n: usize },
    UnsupportedCycle(usize),
}

impl fmt::Display for ModelDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelDiagnostic::Empty => write!(f, "model has no terms"),
            ModelDiagnostic::DuplicateTerm(t) => write!(f, "duplicate term `{t}`"),
            ModelDiagnostic::InvalidDecay(t) => write!(f, "invalid decay in `{t}` (must be > 0)"),
            ModelDiagnostic::MissingAttributes(t) => {
                write!(f, "`{t}` needs node attributes that were not supplied")
            }
            ModelDiagnostic::AttributeLength { expected, got } => {
                write!(f, "attribute has {got} labels for {expected} nodes")
            }
            ModelDiagnostic::DegreeOutOfRange { k, n } => {
                write!(f, "kdegree:{k} is impossible with {n} nodes")
            }
            ModelDiagnostic::UnsupportedCycle(k) => write!(f, "kcycle:{k} is not supported"),
        }
    }
}

pub fn validate_model(
    model: &ModelSpec,
    n: usize,
    attrs: Option<&NodeAttributes>,
) -> Vec<ModelDiagnostic> {
    let mut out = Vec::new();
    if model.terms.is_empty() {
        out.push(ModelDiagnostic::Empty);
    }
    for (idx, term) in model.terms.iter().enumerate() {
        if model.terms[..idx].contains(term) {
            out.push(ModelDiagnostic::DuplicateTerm(term.to_string()));
        }
        if let Some(t) = term.decay() {
            if !(t > 0.0 && t.is_finite()) {
                out.push(ModelDiagnostic::InvalidDecay(term.to_string()));
            }
        }
        match term {
            Term::KDegree(k) if *k >= n => {
                out.push(ModelDiagnostic::DegreeOutOfRange { k: *k, n })
            }
            Term::KCycle(k) if !(3..=4).contains(k) => {
                out.push(ModelDiagnostic::UnsupportedCycle(*k))
            }
            Term::Nodematch(name) => match attrs {
                Some(a) if name.is_empty() || *name == a.name => {
                    if a.len() != n {
                        out.push(ModelDiagnostic::AttributeLength {
                            expected: n,
                            got: a.len(),
                        });
                    }
                }
                _ => out.push(ModelDiagnostic::MissingAttributes(term.to_string())),
            },
            _ => {}
        }
    }
    out
}

/// A model bound to a node count and optional attributes, with the
/// geometric weight tables precomputed. This is what the sampler and the
/// estimators hold on to.
#[derive(Debug, Clone)]
pub struct ModelEvaluator<'a> {
    model: &'a ModelSpec,
    attrs: Option<&'a NodeAttributes>,
    /// Per term: `(1 − e^{−τ})^k` for `k = 0..=n`, empty for other terms.
    increments: Vec<Vec<f64>>,
    sp_terms: Vec<(usize, SpKind)>,
}

impl<'a> ModelEvaluator<'a> {
    pub fn new(model: &'a ModelSpec, n: usize, attrs: Option<&'a NodeAttributes>) -> Result<Self> {
        model.check(n, attrs)?;
        let increments = model
            .terms
            .iter()
            .map(|t| match t.decay() {
                Some(tau) => {
                    let r = 1.0 - (-tau).exp();
                    let mut v = Vec::with_capacity(n + 1);
                    let mut acc = 1.0;
                    for _ in 0..=n {
                        v.push(acc);
                        acc *= r;
                    }
                    v
                }
                None => Vec::new(),
            })
            .collect();
        let sp_terms = model
            .terms
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.shared_partner_kind().map(|k| (i, k)))
            .collect();
        Ok(ModelEvaluator {
            model,
            attrs,
            increments,
            sp_terms,
        })
    }

    pub fn model(&self) -> &ModelSpec {
        self.model
    }

    pub fn len(&self) -> usize {
        self.model.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.model.terms.is_empty()
    }

    fn attrs(&self) -> &NodeAttributes {
        self.attrs.expect("validated model has attributes for nodematch")
    }

    /// Evaluates every term on `g` from scratch.
    pub fn evaluate(&self, g: &Graph) -> Vec<f64> {
        let needs_sp = !self.sp_terms.is_empty();
        let sp = needs_sp.then(|| g.shared_partner_distributions());
        let mut deg_dist: Option<Vec<u64>> = None;
        let mut deg_table = || deg_dist.get_or_insert_with(|| g.degree_distribution()).clone();
        self.model
            .terms
            .iter()
            .map(|term| match term {
                Term::Edges => g.edge_count() as f64,
                Term::TwoPath => g
                    .degrees()
                    .iter()
                    .map(|&d| (d * d.saturating_sub(1) / 2) as f64)
                    .sum(),
                Term::KCycle(3) => g.triangle_count() as f64,
                Term::KCycle(_) => four_cycles(g) as f64,
                Term::KDegree(k) => g.degrees().iter().filter(|&&d| d == *k).count() as f64,
                Term::Gwd(tau) => geometric_sum(*tau, &deg_table()),
                Term::Gwesp(tau) => geometric_sum(*tau, &sp.as_ref().unwrap().esp),
                Term::Gwnsp(tau) => geometric_sum(*tau, &sp.as_ref().unwrap().nsp),
                Term::Gwdsp(tau) => geometric_sum(*tau, &sp.as_ref().unwrap().dsp),
                Term::Nodematch(_) => {
                    let a = self.attrs();
                    g.edges().filter(|&(i, j)| a.matches(i, j)).count() as f64
                }
            })
            .collect()
    }

    /// Writes `g(y ∪ {ij}) − g(y \ {ij})` into `out`, whatever the current
    /// state of dyad `(i, j)`.
    pub fn change(&self, g: &Graph, i: usize, j: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        debug_assert!(i != j);
        let present = g.has_edge(i, j);
        let off = present as usize;
        // Degrees and partner counts as they would be with (i, j) absent.
        let di = g.degree(i) - off;
        let dj = g.degree(j) - off;
        let sij = g.common_neighbors(i, j);

        for (idx, term) in self.model.terms.iter().enumerate() {
            out[idx] = match term {
                Term::Edges => 1.0,
                Term::TwoPath => (di + dj) as f64,
                Term::KCycle(3) => sij as f64,
                Term::KCycle(_) => self.four_cycle_change(g, i, j) as f64,
                Term::KDegree(k) => {
                    let k = *k;
                    let step = |d: usize| (d + 1 == k) as i64 - (d == k) as i64;
                    (step(di) + step(dj)) as f64
                }
                Term::Gwd(_) => {
                    let inc = &self.increments[idx];
                    inc[di] + inc[dj]
                }
                Term::Gwesp(tau) => level_weight(*tau, &self.increments[idx], sij),
                Term::Gwnsp(tau) => -level_weight(*tau, &self.increments[idx], sij),
                Term::Gwdsp(_) => 0.0,
                Term::Nodematch(_) => self.attrs().matches(i, j) as u8 as f64,
            };
        }

        if self.sp_terms.is_empty() {
            return;
        }
        // Toggling (i, j) shifts the partner count of every dyad (i, w) with
        // w a neighbour of j, and of every (j, w) with w a neighbour of i.
        for (a, b) in [(i, j), (j, i)] {
            for w in g.neighbors(b) {
                if w == a {
                    continue;
                }
                let mut s = g.common_neighbors(a, w);
                if present {
                    // b is a common neighbour of a and w only through (a, b).
                    s -= 1;
                }
                let edge = g.has_edge(a, w);
                for &(idx, kind) in &self.sp_terms {
                    if kind.counts(edge) {
                        out[idx] += self.increments[idx][s];
                    }
                }
            }
        }
    }

    /// Paths `i − a − b − j` of length three avoiding the dyad itself.
    fn four_cycle_change(&self, g: &Graph, i: usize, j: usize) -> usize {
        let mut total = 0;
        for a in g.neighbors(i) {
            if a == j {
                continue;
            }
            let mut c = g.common_neighbors(a, j);
            if g.has_edge(a, i) && g.has_edge(i, j) {
                // i itself is a common neighbour of a and j.
                c -= 1;
            }
            total += c;
        }
        total
    }
}

/// Weight `e^τ [1 − (1 − e^{−τ})^k]` of one dyad sitting at level `k`.
#[inline]
fn level_weight(tau: f64, powers: &[f64], k: usize) -> f64 {
    tau.exp() * (1.0 - powers[k])
}

/// `e^τ Σ_{k≥1} [1 − (1 − e^{−τ})^k] counts[k]`.
fn geometric_sum(tau: f64, counts: &[u64]) -> f64 {
    let r = 1.0 - (-tau).exp();
    let scale = tau.exp();
    let mut acc = 0.0;
    let mut rk = 1.0;
    for &c in counts {
        if c > 0 {
            acc += (1.0 - rk) * c as f64;
        }
        rk *= r;
    }
    scale * acc
}

/// Number of 4-cycles via the closed-walk identity
/// `tr(A⁴) = 8·C4 + 2·Σd² − 2m`.
fn four_cycles(g: &Graph) -> u64 {
    let n = g.node_count();
    let mut trace_a4 = 0u64;
    let mut sum_d2 = 0u64;
    for i in 0..n {
        let d = g.degree(i) as u64;
        sum_d2 += d * d;
        trace_a4 += d * d;
        for j in (i + 1)..n {
            let c = g.common_neighbors(i, j) as u64;
            trace_a4 += 2 * c * c;
        }
    }
    (trace_a4 + 2 * g.edge_count() as u64 - 2 * sum_d2) / 8
}

/// One-shot evaluation. Prefer [`ModelEvaluator`] in loops.
pub fn evaluate_statistics(
    model: &ModelSpec,
    g: &Graph,
    attrs: Option<&NodeAttributes>,
) -> Result<Vec<f64>> {
    Ok(ModelEvaluator::new(model, g.node_count(), attrs)?.evaluate(g))
}

pub fn change_statistics(
    model: &ModelSpec,
    g: &Graph,
    i: usize,
    j: usize,
    attrs: Option<&NodeAttributes>,
) -> Result<Vec<f64>> {
    let n = g.node_count();
    for node in [i, j] {
        if node >= n {
            return Err(Error::NodeOutOfRange { node, n });
        }
    }
    if i == j {
        return Err(Error::SelfLoop(i));
    }
    let eval = ModelEvaluator::new(model, n, attrs)?;
    let mut out = vec![0.0; model.len()];
    eval.change(g, i, j, &mut out);
    Ok(out)
}
