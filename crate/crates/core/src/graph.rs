//! Weighted directed graphs, generators for the standard families, and
//! cohesiveness predicates.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::profile::PlayerSet;
use crate::rational::{parse_rational, Rational};

/// Largest set handled by [`uniformly_at_most_cohesive`] (`2^22` subsets).
pub const COHESION_MAX_SET: usize = 22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("node {index} out of range for a graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("arc {0} -> {1} listed twice")]
    DuplicateArc(usize, usize),
    #[error("arc {from} -> {to} has non-positive weight {weight}")]
    NonPositiveWeight { from: usize, to: usize, weight: i64 },
    #[error("node {node} is a sink (out-degree 0)")]
    Sink { node: usize },
    #[error("sink produced: node {node} is isolated in the draw with seed {seed}")]
    SinkProduced { node: usize, seed: u64 },
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("cohesiveness of the empty set is vacuous")]
    EmptySet,
    #[error("set of size {size} exceeds the subset-enumeration budget of {limit}")]
    BudgetExceeded { size: usize, limit: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Where a graph came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Complete { n: usize },
    Ring { n: usize },
    Path { n: usize },
    Grid { k: usize, d: usize },
    Tree { parents: Vec<Option<usize>> },
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    /// A tag read back from a graph file.
    Recorded(String),
    Unspecified,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Complete { n } => write!(f, "complete n={n}"),
            Provenance::Ring { n } => write!(f, "ring n={n}"),
            Provenance::Path { n } => write!(f, "path n={n}"),
            Provenance::Grid { k, d } => write!(f, "grid k={k} d={d}"),
            Provenance::Tree { parents } => {
                write!(f, "tree parents=")?;
                for (i, p) in parents.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    match p {
                        Some(p) => write!(f, "{p}")?,
                        None => f.write_str("-")?,
                    }
                }
                Ok(())
            }
            Provenance::ErdosRenyi { n, p, seed } => write!(f, "erdos_renyi n={n} p={p} seed={seed}"),
            Provenance::Recorded(tag) => f.write_str(tag),
            Provenance::Unspecified => f.write_str("unspecified"),
        }
    }
}

/// Generator families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Complete(usize),
    Ring(usize),
    Path(usize),
    Grid { k: usize, d: usize },
    /// `parents[i]` is the parent of node `i`; exactly one root has `None`.
    Tree(Vec<Option<usize>>),
    ErdosRenyi { n: usize, p: f64, seed: u64 },
}

/// A weighted directed graph with integer weights, no self-loops and no sinks.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    out: Vec<Vec<(usize, i64)>>,
    incoming: Vec<Vec<usize>>,
    degree: Vec<i64>,
    undirected: bool,
    provenance: Provenance,
}

impl WeightedGraph {
    /// Builds a graph from directed arcs `(i, j, W_ij)`.
    pub fn from_arcs<I>(n: usize, arcs: I, provenance: Provenance) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, i64)>,
    {
        Self::build(n, arcs, false, provenance)
    }

    /// Builds a graph from undirected edges; each edge yields both arcs.
    pub fn from_edges<I>(n: usize, edges: I, provenance: Provenance) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, i64)>,
    {
        let arcs: Vec<_> = edges
            .into_iter()
            .flat_map(|(i, j, w)| [(i, j, w), (j, i, w)])
            .collect();
        Self::build(n, arcs, true, provenance)
    }

    fn build<I>(n: usize, arcs: I, undirected: bool, provenance: Provenance) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, i64)>,
    {
        let mut out: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
        for (i, j, w) in arcs {
            for idx in [i, j] {
                if idx >= n {
                    return Err(GraphError::NodeOutOfRange { index: idx, n });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            if w <= 0 {
                return Err(GraphError::NonPositiveWeight { from: i, to: j, weight: w });
            }
            out[i].push((j, w));
        }
        let mut incoming = vec![Vec::new(); n];
        for (i, row) in out.iter_mut().enumerate() {
            row.sort_unstable();
            if let Some(pair) = row.windows(2).find(|p| p[0].0 == p[1].0) {
                return Err(GraphError::DuplicateArc(i, pair[0].0));
            }
            for &(j, _) in row.iter() {
                incoming[j].push(i);
            }
        }
        let degree: Vec<i64> = out.iter().map(|row| row.iter().map(|&(_, w)| w).sum()).collect();
        if let Some(node) = degree.iter().position(|&d| d == 0) {
            return Err(GraphError::Sink { node });
        }
        Ok(WeightedGraph {
            n,
            out,
            incoming,
            degree,
            undirected,
            provenance,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    /// Number of stored arcs (twice the edge count for undirected graphs).
    pub fn num_arcs(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Edge count as written in the text format.
    pub fn num_edges(&self) -> usize {
        if self.undirected {
            self.num_arcs() / 2
        } else {
            self.num_arcs()
        }
    }

    pub fn is_undirected(&self) -> bool {
        self.undirected
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Out-neighbours `j` of `i` with `W_ij`.
    pub fn neighbors(&self, i: usize) -> &[(usize, i64)] {
        &self.out[i]
    }

    /// Nodes `i` with `W_ij > 0`.
    pub fn in_neighbors(&self, j: usize) -> &[usize] {
        &self.incoming[j]
    }

    pub fn weight(&self, i: usize, j: usize) -> i64 {
        self.out[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .map(|pos| self.out[i][pos].1)
            .unwrap_or(0)
    }

    /// `w_i = Σ_j W_ij` without bounds checking.
    #[inline]
    pub fn degree(&self, i: usize) -> i64 {
        self.degree[i]
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degree
    }

    /// Checked `w_i`.
    pub fn out_degree(&self, i: usize) -> Result<i64, GraphError> {
        self.degree
            .get(i)
            .copied()
            .ok_or(GraphError::NodeOutOfRange { index: i, n: self.n })
    }

    /// Serializes to the line-oriented graph format.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "graph {} {} {}\n",
            self.n,
            self.num_edges(),
            if self.undirected { "undirected" } else { "directed" }
        );
        if !matches!(self.provenance, Provenance::Unspecified) {
            s.push_str(&format!("# provenance: {}\n", self.provenance));
        }
        for (i, row) in self.out.iter().enumerate() {
            for &(j, w) in row {
                if !self.undirected || i < j {
                    s.push_str(&format!("{i} {j} {w}\n"));
                }
            }
        }
        s
    }

    /// Parses the graph format; see [`parse_graph_lines`].
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(k, l)| (k + 1, l)).collect();
        let (g, rest) = parse_graph_lines(&lines)?;
        if let Some((line, _)) = rest.iter().find(|(_, l)| !is_blank_or_comment(l)) {
            return Err(GraphError::Parse {
                line: *line,
                message: "unexpected content after the edge list".into(),
            });
        }
        Ok(g)
    }
}

pub(crate) fn is_blank_or_comment(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

/// Source lines paired with their 1-based line numbers.
pub type NumberedLines<'a> = [(usize, &'a str)];

/// Parses a `graph <n> <m> directed|undirected` block followed by `m` lines
/// `i j w` from numbered lines, returning the graph and the unconsumed lines.
pub fn parse_graph_lines<'a>(lines: &'a NumberedLines<'a>) -> Result<(WeightedGraph, &'a NumberedLines<'a>), GraphError> {
    let perr = |line: usize, message: String| GraphError::Parse { line, message };
    let mut pos = 0;
    let mut provenance = Provenance::Unspecified;
    while pos < lines.len() && is_blank_or_comment(lines[pos].1) {
        pos += 1;
    }
    let (hline, header) = *lines
        .get(pos)
        .ok_or_else(|| perr(lines.last().map_or(1, |l| l.0), "missing graph header".into()))?;
    pos += 1;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "graph" {
        return Err(perr(hline, "expected `graph <n> <m> directed|undirected`".into()));
    }
    let n: usize = toks[1]
        .parse()
        .map_err(|_| perr(hline, format!("invalid node count `{}`", toks[1])))?;
    let m: usize = toks[2]
        .parse()
        .map_err(|_| perr(hline, format!("invalid edge count `{}`", toks[2])))?;
    let undirected = match toks[3] {
        "directed" => false,
        "undirected" => true,
        other => return Err(perr(hline, format!("unknown orientation `{other}`"))),
    };
    let mut arcs = Vec::with_capacity(m);
    let mut last_line = hline;
    while arcs.len() < m {
        let (lno, line) = *lines
            .get(pos)
            .ok_or_else(|| perr(last_line, format!("expected {m} edge lines, found {}", arcs.len())))?;
        pos += 1;
        last_line = lno;
        let t = line.trim();
        if let Some(tag) = t.strip_prefix("# provenance:") {
            provenance = Provenance::Recorded(tag.trim().to_string());
            continue;
        }
        if is_blank_or_comment(t) {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        if f.len() != 3 {
            return Err(perr(lno, "expected `i j w`".into()));
        }
        let i: usize = f[0].parse().map_err(|_| perr(lno, format!("invalid node `{}`", f[0])))?;
        let j: usize = f[1].parse().map_err(|_| perr(lno, format!("invalid node `{}`", f[1])))?;
        let w: i64 = f[2]
            .parse()
            .map_err(|_| perr(lno, format!("weight `{}` is not a positive integer", f[2])))?;
        if w <= 0 {
            return Err(perr(lno, format!("weight `{w}` is not a positive integer")));
        }
        if i >= n || j >= n {
            return Err(perr(lno, format!("node index out of range for n = {n}")));
        }
        if i == j {
            return Err(perr(lno, format!("self-loop at node {i}")));
        }
        arcs.push((lno, i, j, w));
    }
    let triples = arcs.iter().map(|&(_, i, j, w)| (i, j, w));
    let built = if undirected {
        WeightedGraph::from_edges(n, triples, provenance)
    } else {
        WeightedGraph::from_arcs(n, triples, provenance)
    };
    let g = built.map_err(|e| perr(last_line, e.to_string()))?;
    Ok((g, &lines[pos..]))
}

/// Builds a graph from one of the standard families.
pub fn generate(family: &Family) -> Result<WeightedGraph, GraphError> {
    let bad = |m: &str| Err(GraphError::InvalidParameters(m.to_string()));
    match family {
        &Family::Complete(n) => {
            if n < 2 {
                return bad("complete graph needs n >= 2");
            }
            let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1)));
            WeightedGraph::from_edges(n, edges, Provenance::Complete { n })
        }
        &Family::Ring(n) => {
            if n < 3 {
                return bad("ring needs n >= 3");
            }
            let edges = (0..n).map(|i| (i, (i + 1) % n, 1)).map(|(a, b, w)| (a.min(b), a.max(b), w));
            WeightedGraph::from_edges(n, edges, Provenance::Ring { n })
        }
        &Family::Path(n) => {
            if n < 2 {
                return bad("path needs n >= 2");
            }
            WeightedGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1, 1)), Provenance::Path { n })
        }
        &Family::Grid { k, d } => {
            if k < 2 || d < 1 {
                return bad("grid needs k >= 2 and d >= 1");
            }
            let n = k
                .checked_pow(d as u32)
                .filter(|&n| n <= 1 << 24)
                .ok_or_else(|| GraphError::InvalidParameters("grid too large".into()))?;
            let mut edges = Vec::new();
            for idx in 0..n {
                let mut stride = 1;
                for _ in 0..d {
                    if (idx / stride) % k + 1 < k {
                        edges.push((idx, idx + stride, 1));
                    }
                    stride *= k;
                }
            }
            WeightedGraph::from_edges(n, edges, Provenance::Grid { k, d })
        }
        Family::Tree(parents) => {
            let n = parents.len();
            if n < 2 {
                return bad("tree needs n >= 2");
            }
            if parents.iter().filter(|p| p.is_none()).count() != 1 {
                return bad("tree parent list needs exactly one root");
            }
            for (i, p) in parents.iter().enumerate() {
                if let Some(p) = *p {
                    if p >= n {
                        return bad(&format!("parent {p} of node {i} out of range"));
                    }
                }
                // Walking up from i must reach the root within n steps.
                let mut cur = i;
                let mut steps = 0;
                while let Some(p) = parents[cur] {
                    cur = p;
                    steps += 1;
                    if steps > n {
                        return bad("parent list contains a cycle");
                    }
                }
            }
            let edges: Vec<_> = parents
                .iter()
                .enumerate()
                .filter_map(|(i, p)| p.map(|p| (i.min(p), i.max(p), 1)))
                .collect();
            WeightedGraph::from_edges(n, edges, Provenance::Tree { parents: parents.clone() })
        }
        &Family::ErdosRenyi { n, p, seed } => {
            if n < 2 {
                return bad("Erdős–Rényi graph needs n >= 2");
            }
            if !(p > 0.0 && p <= 1.0) {
                return bad("Erdős–Rényi probability must lie in (0, 1]");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            let mut touched = vec![false; n];
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < p {
                        edges.push((i, j, 1));
                        touched[i] = true;
                        touched[j] = true;
                    }
                }
            }
            if let Some(node) = touched.iter().position(|t| !t) {
                return Err(GraphError::SinkProduced { node, seed });
            }
            WeightedGraph::from_edges(n, edges, Provenance::ErdosRenyi { n, p, seed })
        }
    }
}

/// Nodes of the `k^d` grid whose coordinates sum to `level`.
pub fn grid_level_set(k: usize, d: usize, level: usize) -> PlayerSet {
    let n = k.pow(d as u32);
    (0..n)
        .filter(|&idx| {
            let mut rest = idx;
            let mut sum = 0;
            for _ in 0..d {
                sum += rest % k;
                rest /= k;
            }
            sum == level
        })
        .collect()
}

fn check_members(g: &WeightedGraph, s: &PlayerSet) -> Result<(), GraphError> {
    match s.max_player() {
        Some(i) if i >= g.num_nodes() => Err(GraphError::NodeOutOfRange { index: i, n: g.num_nodes() }),
        _ => Ok(()),
    }
}

/// `inside · den <= num · w` (or `>=`) in 128-bit arithmetic.
#[inline]
fn cmp_fraction(inside: i64, w: i64, ratio: &Rational) -> std::cmp::Ordering {
    (inside as i128 * *ratio.denom() as i128).cmp(&(*ratio.numer() as i128 * w as i128))
}

/// True iff every member of `s` has at least `alpha · w_i` of its weight inside `s`.
pub fn alpha_cohesive(g: &WeightedGraph, s: &PlayerSet, alpha: &Rational) -> Result<bool, GraphError> {
    if s.is_empty() {
        return Err(GraphError::EmptySet);
    }
    check_members(g, s)?;
    Ok(s.iter().all(|&i| {
        let inside: i64 = g.neighbors(i).iter().filter(|(j, _)| s.contains(*j)).map(|&(_, w)| w).sum();
        cmp_fraction(inside, g.degree(i), alpha).is_ge()
    }))
}

/// True iff no subset of `s` is `θ′`-cohesive for any `θ′ > θ`, i.e. every
/// nonempty `S′ ⊆ s` has a member with `Σ_{j∈S′} W_ij <= θ·w_i`.
///
/// Enumerates all `2^|s|` subsets depth first, updating inside-weights
/// incrementally.
pub fn uniformly_at_most_cohesive(
    g: &WeightedGraph,
    s: &PlayerSet,
    theta: &Rational,
) -> Result<bool, GraphError> {
    check_members(g, s)?;
    let k = s.len();
    if k > COHESION_MAX_SET {
        return Err(GraphError::BudgetExceeded { size: k, limit: COHESION_MAX_SET });
    }
    if k == 0 {
        return Ok(true);
    }
    let members = s.as_slice();
    let local: Vec<Vec<i64>> = members
        .iter()
        .map(|&i| members.iter().map(|&j| g.weight(i, j)).collect())
        .collect();
    let degree: Vec<i64> = members.iter().map(|&i| g.degree(i)).collect();

    struct Walk<'a> {
        local: &'a [Vec<i64>],
        degree: &'a [i64],
        theta: &'a Rational,
        inside: Vec<i64>,
        chosen: Vec<usize>,
    }
    impl Walk<'_> {
        // Every subset of chosen ∪ (any of next..k) must have a weak member.
        fn visit(&mut self, next: usize) -> bool {
            let k = self.degree.len();
            for j in next..k {
                for (i, row) in self.local.iter().enumerate() {
                    self.inside[i] += row[j];
                }
                self.chosen.push(j);
                let has_weak = self
                    .chosen
                    .iter()
                    .any(|&i| cmp_fraction(self.inside[i], self.degree[i], self.theta).is_le());
                let ok = has_weak && self.visit(j + 1);
                self.chosen.pop();
                for (i, row) in self.local.iter().enumerate() {
                    self.inside[i] -= row[j];
                }
                if !ok {
                    return false;
                }
            }
            true
        }
    }
    let mut walk = Walk {
        local: &local,
        degree: &degree,
        theta,
        inside: vec![0; k],
        chosen: Vec::with_capacity(k),
    };
    Ok(walk.visit(0))
}

/// Parses a thresholds file: one rational per line, `#` comments allowed.
pub(crate) fn parse_rational_lines(text: &str) -> Result<Vec<Rational>, GraphError> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if is_blank_or_comment(line) {
            continue;
        }
        out.push(parse_rational(line).map_err(|e| GraphError::Parse {
            line: k + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[usize]) -> PlayerSet {
        PlayerSet::new(v.to_vec())
    }

    #[test]
    fn degrees_of_standard_families() {
        let k5 = generate(&Family::Complete(5)).unwrap();
        assert!((0..5).all(|i| k5.out_degree(i).unwrap() == 4));
        assert_eq!(k5.num_edges(), 10);
        let ring = generate(&Family::Ring(4)).unwrap();
        assert!((0..4).all(|i| ring.out_degree(i).unwrap() == 2));
        let grid = generate(&Family::Grid { k: 5, d: 2 }).unwrap();
        assert_eq!(grid.num_nodes(), 25);
        assert_eq!(grid.num_edges(), 40);
        assert_eq!(grid.out_degree(0).unwrap(), 2);
        assert_eq!(grid.out_degree(12).unwrap(), 4);
        assert!(matches!(grid.out_degree(25), Err(GraphError::NodeOutOfRange { .. })));
        let grid3 = generate(&Family::Grid { k: 3, d: 3 }).unwrap();
        // d·k^(d−1)·(k−1)
        assert_eq!(grid3.num_edges(), 3 * 9 * 2);
    }

    #[test]
    fn erdos_renyi_is_a_function_of_its_seed() {
        let fam = Family::ErdosRenyi { n: 10, p: 0.4, seed: 1 };
        let a = generate(&fam);
        let b = generate(&fam);
        assert_eq!(a, b);
    }

    #[test]
    fn erdos_renyi_reports_sink_seed() {
        let fam = Family::ErdosRenyi { n: 30, p: 0.001, seed: 99 };
        assert!(matches!(generate(&fam), Err(GraphError::SinkProduced { seed: 99, .. })));
        assert!(generate(&Family::ErdosRenyi { n: 5, p: 0.0, seed: 1 }).is_err());
        assert!(generate(&Family::ErdosRenyi { n: 5, p: 1.5, seed: 1 }).is_err());
    }

    #[test]
    fn tree_validation() {
        assert!(generate(&Family::Tree(vec![None, Some(0), Some(0), Some(1)])).is_ok());
        assert!(generate(&Family::Tree(vec![None, Some(2), Some(1)])).is_err());
        assert!(generate(&Family::Tree(vec![None, None])).is_err());
        assert!(generate(&Family::Tree(vec![None, Some(7)])).is_err());
    }

    #[test]
    fn rejects_invalid_graphs() {
        assert_eq!(
            WeightedGraph::from_arcs(2, [(0, 0, 1)], Provenance::Unspecified),
            Err(GraphError::SelfLoop(0))
        );
        assert_eq!(
            WeightedGraph::from_arcs(2, [(0, 1, 1)], Provenance::Unspecified),
            Err(GraphError::Sink { node: 1 })
        );
        assert!(WeightedGraph::from_arcs(2, [(0, 1, 0), (1, 0, 1)], Provenance::Unspecified).is_err());
    }

    #[test]
    fn cohesiveness_examples() {
        let k5 = generate(&Family::Complete(5)).unwrap();
        let half = Rational::new(1, 2);
        assert!(alpha_cohesive(&k5, &set(&[0, 1, 2]), &half).unwrap());
        let ring = generate(&Family::Ring(4)).unwrap();
        assert!(!alpha_cohesive(&ring, &set(&[0]), &Rational::new(1, 10)).unwrap());
        assert!(alpha_cohesive(&ring, &PlayerSet::all(4), &Rational::from_integer(1)).unwrap());
        assert_eq!(alpha_cohesive(&ring, &PlayerSet::empty(), &half), Err(GraphError::EmptySet));

        assert!(uniformly_at_most_cohesive(&k5, &set(&[0, 1]), &half).unwrap());
        let tri = generate(&Family::Complete(3)).unwrap();
        assert!(!uniformly_at_most_cohesive(&tri, &PlayerSet::all(3), &half).unwrap());
        assert!(uniformly_at_most_cohesive(&tri, &PlayerSet::empty(), &half).unwrap());
        let big = generate(&Family::Complete(24)).unwrap();
        assert!(matches!(
            uniformly_at_most_cohesive(&big, &PlayerSet::all(23), &half),
            Err(GraphError::BudgetExceeded { .. })
        ));
    }

    /// Independent oracle: descending bitmask order, direct summation.
    fn uniform_oracle(g: &WeightedGraph, s: &PlayerSet, theta: &Rational) -> bool {
        let m = s.as_slice();
        (1u32..1 << m.len()).rev().all(|mask| {
            let sub: Vec<usize> = (0..m.len()).filter(|b| mask >> b & 1 == 1).map(|b| m[b]).collect();
            sub.iter().any(|&i| {
                let inside: i64 = sub.iter().map(|&j| g.weight(i, j)).sum();
                Rational::from_integer(inside) <= theta * g.degree(i)
            })
        })
    }

    fn small_graph() -> impl Strategy<Value = WeightedGraph> {
        (3usize..9, any::<u64>()).prop_filter_map("sink", |(n, seed)| {
            generate(&Family::ErdosRenyi { n, p: 0.5, seed }).ok()
        })
    }

    proptest! {
        #[test]
        fn uniform_cohesion_matches_oracle(g in small_graph(), mask in any::<u16>(), t in 0i64..=4) {
            let n = g.num_nodes();
            let s: PlayerSet = (0..n).filter(|b| mask >> b & 1 == 1).collect();
            let theta = Rational::new(t, 4);
            prop_assert_eq!(uniformly_at_most_cohesive(&g, &s, &theta).unwrap(), uniform_oracle(&g, &s, &theta));
        }

        #[test]
        fn alpha_cohesion_is_monotone_in_alpha(g in small_graph(), mask in 1u16.., a in 0i64..=8, b in 0i64..=8) {
            let n = g.num_nodes();
            let s: PlayerSet = (0..n).filter(|k| mask >> k & 1 == 1).collect();
            prop_assume!(!s.is_empty());
            let (lo, hi) = (Rational::new(a.min(b), 8), Rational::new(a.max(b), 8));
            if alpha_cohesive(&g, &s, &hi).unwrap() {
                prop_assert!(alpha_cohesive(&g, &s, &lo).unwrap());
            }
        }

        #[test]
        fn text_format_roundtrips(g in small_graph()) {
            let text = g.to_text();
            let back = WeightedGraph::parse(&text).unwrap();
            prop_assert_eq!(back.to_text(), text);
            prop_assert_eq!(back.num_arcs(), g.num_arcs());
        }
    }

    #[test]
    fn directed_format_and_errors() {
        let text = "graph 3 3 directed\n0 1 2\n1 2 1\n2 0 5\n";
        let g = WeightedGraph::parse(text).unwrap();
        assert_eq!(g.to_text(), text);
        assert_eq!(g.out_degree(0).unwrap(), 2);
        let err = WeightedGraph::parse("graph 3 2 undirected\n0 1 1\n1 x 1\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }));
        let err = WeightedGraph::parse("graph 2 2 undirected\n0 1 1\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
        let err = WeightedGraph::parse("graph 2 1 undirected\n0 1 -3\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
        let err = WeightedGraph::parse("graph 2 1 undirected\n0 1 1\n0 1 1\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }));
    }
}
