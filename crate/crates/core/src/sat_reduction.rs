//! Reduction from exact-3-literal CNF satisfiability to the minimum
//! sufficient control set problem on majority games.
//!
//! For a formula with `s − 1` variables and `m` clauses the gadget graph has
//! one node per clause (`W`), one node per literal (`Y`, `Ȳ`), a hub `z`, a
//! fresh leaf per literal occurrence (`L`) and `m + 1` leaves on the hub
//! (`M`). The formula is satisfiable iff the gadget's majority game has a
//! sufficient control set of size `s`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coordination::CoordinationGame;
use crate::graph::{Provenance, WeightedGraph};
use crate::par::{map_collect, Execution};
use crate::profile::PlayerSet;
use crate::scs::{first_optimal_set, is_sufficient, ScsError};

/// Brute-force SAT enumeration limit.
pub const SAT_MAX_VARS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("clause {clause} has {got} literals, expected 3")]
    Arity { clause: usize, got: usize },
    #[error("clause {clause} repeats variable {var}")]
    RepeatedVariable { clause: usize, var: usize },
    #[error("clause {clause} uses variable {var}, but only {num_vars} are declared")]
    VariableOutOfRange { clause: usize, var: usize, num_vars: usize },
    #[error("assignment has length {got}, expected {expected}")]
    AssignmentLength { got: usize, expected: usize },
    #[error("control set is not sufficient: {0}")]
    NotSufficient(PlayerSet),
    #[error("normalization failed: {0}")]
    Normalization(String),
    #[error("too many variables for brute force: {got} > {limit}")]
    TooLarge { got: usize, limit: usize },
    #[error("need at least 3 variables for random clauses, got {0}")]
    TooFewVariables(usize),
    #[error(transparent)]
    Scs(#[from] ScsError),
}

/// A literal: 1-based variable index and polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn from_dimacs(v: i64) -> Self {
        Literal { var: v.unsigned_abs() as usize, positive: v > 0 }
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    /// Truth value under a 0-based assignment vector.
    pub fn eval(self, a: &[bool]) -> bool {
        a[self.var - 1] == self.positive
    }
}

/// A CNF formula whose clauses have exactly three distinct variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf3 {
    num_vars: usize,
    clauses: Vec<[Literal; 3]>,
}

impl Cnf3 {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self, SatError> {
        let mut out = Vec::with_capacity(clauses.len());
        for (c, lits) in clauses.iter().enumerate() {
            out.push(check_clause(c + 1, lits, num_vars)?);
        }
        Ok(Cnf3 { num_vars, clauses: out })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    /// Target control-set size `s = num_vars + 1`.
    pub fn target_size(&self) -> usize {
        self.num_vars + 1
    }

    pub fn eval(&self, a: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.eval(a)))
    }

    /// First satisfying assignment in binary counting order, if any.
    pub fn brute_force(&self) -> Result<Option<Vec<bool>>, SatError> {
        if self.num_vars > SAT_MAX_VARS {
            return Err(SatError::TooLarge { got: self.num_vars, limit: SAT_MAX_VARS });
        }
        Ok((0u64..1 << self.num_vars)
            .map(|mask| (0..self.num_vars).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .find(|a| self.eval(a)))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            out.push_str(&format!("{} {} {} 0\n", c[0].to_dimacs(), c[1].to_dimacs(), c[2].to_dimacs()));
        }
        out
    }

    /// `num_clauses` clauses over distinct random variables with random signs.
    pub fn random<R: Rng + ?Sized>(num_vars: usize, num_clauses: usize, rng: &mut R) -> Result<Self, SatError> {
        if num_vars < 3 {
            return Err(SatError::TooFewVariables(num_vars));
        }
        let clauses = (0..num_clauses)
            .map(|_| {
                rand::seq::index::sample(rng, num_vars, 3)
                    .into_iter()
                    .map(|v| if rng.random_bool(0.5) { v as i64 + 1 } else { -(v as i64 + 1) })
                    .collect()
            })
            .collect();
        Cnf3::new(num_vars, clauses)
    }
}

fn check_clause(clause: usize, lits: &[i64], num_vars: usize) -> Result<[Literal; 3], SatError> {
    if lits.len() != 3 {
        return Err(SatError::Arity { clause, got: lits.len() });
    }
    let l: Vec<Literal> = lits.iter().map(|&v| Literal::from_dimacs(v)).collect();
    for (k, lit) in l.iter().enumerate() {
        if lit.var == 0 || lit.var > num_vars {
            return Err(SatError::VariableOutOfRange { clause, var: lit.var, num_vars });
        }
        if l[..k].iter().any(|o| o.var == lit.var) {
            return Err(SatError::RepeatedVariable { clause, var: lit.var });
        }
    }
    Ok([l[0], l[1], l[2]])
}

/// Parses DIMACS CNF. Comment lines (`c`) and a trailing `%` section are
/// ignored; clauses may span lines and end at `0`.
pub fn parse_cnf(text: &str) -> Result<Cnf3, SatError> {
    let syntax = |line: usize, message: String| SatError::Syntax { line, message };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        if t.starts_with('%') {
            break;
        }
        if t.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line, "duplicate problem line".into()));
            }
            let f: Vec<&str> = t.split_whitespace().collect();
            if f.len() != 4 || f[0] != "p" || f[1] != "cnf" {
                return Err(syntax(line, format!("expected `p cnf <vars> <clauses>`, got `{t}`")));
            }
            let parse = |s: &str| s.parse::<usize>().map_err(|_| syntax(line, format!("invalid count `{s}`")));
            header = Some((parse(f[2])?, parse(f[3])?));
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(syntax(line, "clause before problem line".into()));
        };
        for tok in t.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| syntax(line, format!("invalid literal `{tok}`")))?;
            if v == 0 {
                let c = clauses.len() + 1;
                check_clause(c, &current, num_vars).map_err(|e| syntax(line, e.to_string()))?;
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(v);
            }
        }
    }
    let Some((num_vars, num_clauses)) = header else {
        return Err(syntax(last_line.max(1), "missing problem line".into()));
    };
    if !current.is_empty() {
        return Err(syntax(last_line, "last clause is not terminated by 0".into()));
    }
    if clauses.len() != num_clauses {
        return Err(syntax(last_line, format!("problem line declares {num_clauses} clauses, found {}", clauses.len())));
    }
    Cnf3::new(num_vars, clauses)
}

/// Role of a gadget node. Clause, variable and position indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeLabel {
    W(usize),
    Y(usize),
    YBar(usize),
    Z,
    L { clause: usize, position: usize },
    M(usize),
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeLabel::W(c) => write!(f, "w{c}"),
            NodeLabel::Y(i) => write!(f, "y{i}"),
            NodeLabel::YBar(i) => write!(f, "ybar{i}"),
            NodeLabel::Z => write!(f, "z"),
            NodeLabel::L { clause, position } => write!(f, "l{clause}.{position}"),
            NodeLabel::M(k) => write!(f, "m{k}"),
        }
    }
}

/// Node indices of the gadget layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub num_vars: usize,
    pub num_clauses: usize,
}

impl Layout {
    pub fn w(&self, clause: usize) -> usize {
        clause - 1
    }

    pub fn y(&self, var: usize) -> usize {
        self.num_clauses + var - 1
    }

    pub fn ybar(&self, var: usize) -> usize {
        self.num_clauses + self.num_vars + var - 1
    }

    pub fn literal(&self, l: Literal) -> usize {
        if l.positive {
            self.y(l.var)
        } else {
            self.ybar(l.var)
        }
    }

    pub fn z(&self) -> usize {
        self.num_clauses + 2 * self.num_vars
    }

    pub fn leaf(&self, clause: usize, position: usize) -> usize {
        self.z() + 1 + 3 * (clause - 1) + position - 1
    }

    pub fn m_leaf(&self, k: usize) -> usize {
        self.z() + 1 + 3 * self.num_clauses + k - 1
    }
}

/// The gadget graph together with node roles.
#[derive(Debug, Clone)]
pub struct GadgetGraph {
    pub graph: WeightedGraph,
    pub labels: Vec<NodeLabel>,
    pub layout: Layout,
}

impl std::ops::Deref for GadgetGraph {
    type Target = Layout;

    fn deref(&self) -> &Layout {
        &self.layout
    }
}

impl GadgetGraph {
    /// Majority game on the gadget.
    pub fn majority_game(&self) -> CoordinationGame {
        CoordinationGame::majority(self.graph.clone())
    }

    /// One `index label` line per node.
    pub fn label_map(&self) -> String {
        self.labels.iter().enumerate().map(|(i, l)| format!("{i} {l}\n")).collect()
    }
}

/// Builds the gadget. Node order: `W`, `Y`, `Ȳ`, `z`, `L` (clause-literal
/// order), `M`.
pub fn build_gadget(f: &Cnf3) -> GadgetGraph {
    let (nv, m) = (f.num_vars, f.clauses.len());
    let mut labels = Vec::with_capacity(2 * (nv + 1) + 5 * m);
    labels.extend((1..=m).map(NodeLabel::W));
    labels.extend((1..=nv).map(NodeLabel::Y));
    labels.extend((1..=nv).map(NodeLabel::YBar));
    labels.push(NodeLabel::Z);
    for clause in 1..=m {
        labels.extend((1..=3).map(|position| NodeLabel::L { clause, position }));
    }
    labels.extend((1..=m + 1).map(NodeLabel::M));

    let gadget = Layout { num_vars: nv, num_clauses: m };
    let mut edges = Vec::with_capacity(nv + 1 + 8 * m);
    for (c, clause) in f.clauses.iter().enumerate() {
        let c = c + 1;
        for (p, lit) in clause.iter().enumerate() {
            let node = gadget.literal(*lit);
            edges.push((gadget.w(c), node, 1));
            edges.push((node, gadget.leaf(c, p + 1), 1));
        }
        edges.push((gadget.z(), gadget.w(c), 1));
    }
    for k in 1..=m + 1 {
        edges.push((gadget.z(), gadget.m_leaf(k), 1));
    }
    for v in 1..=nv {
        edges.push((gadget.y(v), gadget.ybar(v), 1));
    }
    let provenance = Provenance::Recorded(format!("gadget vars={nv} clauses={m}"));
    let graph = WeightedGraph::from_edges(labels.len(), edges, provenance).expect("gadget edges are valid");
    GadgetGraph { graph, labels, layout: gadget }
}

/// `{z} ∪ {y_i : a_i} ∪ {ȳ_i : ¬a_i}`.
pub fn assignment_to_control_set(f: &Cnf3, g: &GadgetGraph, a: &[bool]) -> Result<PlayerSet, SatError> {
    if a.len() != f.num_vars {
        return Err(SatError::AssignmentLength { got: a.len(), expected: f.num_vars });
    }
    let mut set: Vec<usize> = a.iter().enumerate().map(|(i, &v)| if v { g.y(i + 1) } else { g.ybar(i + 1) }).collect();
    set.push(g.z());
    Ok(PlayerSet::new(set))
}

/// Replaces every `L` leaf by its literal node and every `M` leaf by `z`,
/// re-verifying sufficiency after each replacement. The result contains `z`
/// and exactly one of `y_i`, `ȳ_i` per variable.
pub fn normalize_control_set(f: &Cnf3, g: &GadgetGraph, s_raw: &PlayerSet) -> Result<PlayerSet, SatError> {
    let game = g.majority_game();
    if !is_sufficient(&game, s_raw)? {
        return Err(SatError::NotSufficient(s_raw.clone()));
    }
    let mut set = s_raw.clone();
    for &v in s_raw.iter() {
        let target = match g.labels[v] {
            NodeLabel::L { clause, position } => g.literal(f.clauses[clause - 1][position - 1]),
            NodeLabel::M(_) => g.z(),
            _ => continue,
        };
        if set.contains(target) {
            return Err(SatError::Normalization(format!("{} and its neighbour {} are both in {set}", g.labels[v], g.labels[target])));
        }
        set.remove(v);
        set.insert(target);
        if !is_sufficient(&game, &set)? {
            return Err(SatError::Normalization(format!("replacing {} by {} broke sufficiency", g.labels[v], g.labels[target])));
        }
    }
    if !set.contains(g.z()) {
        return Err(SatError::Normalization(format!("{set} does not contain z")));
    }
    for v in 1..=f.num_vars {
        if set.contains(g.y(v)) == set.contains(g.ybar(v)) {
            return Err(SatError::Normalization(format!("{set} does not pick exactly one of y{v}, ybar{v}")));
        }
    }
    Ok(set)
}

/// `a_i = 1` iff `y_i` is in the (normalized) set.
pub fn control_set_to_assignment(f: &Cnf3, g: &GadgetGraph, set: &PlayerSet) -> Vec<bool> {
    (1..=f.num_vars).map(|v| set.contains(g.y(v))).collect()
}

/// Outcome of checking the reduction on one formula.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub num_vars: usize,
    pub num_clauses: usize,
    pub num_nodes: usize,
    pub num_edges: usize,
    pub sizes_ok: bool,
    pub degrees_ok: bool,
    pub satisfying_assignment: Option<Vec<bool>>,
    /// Smallest sufficient set of size `<= s`, if any.
    pub control_set: Option<PlayerSet>,
    /// `assignment_to_control_set(a)` sufficient iff `a` satisfies, for all `a`.
    pub assignment_equivalence: bool,
    /// Assignment → set → normalized set → assignment round trips, and the
    /// oracle's set normalizes to a satisfying assignment.
    pub roundtrip_ok: bool,
}

impl ReductionReport {
    pub fn satisfiable(&self) -> bool {
        self.satisfying_assignment.is_some()
    }

    pub fn controllable(&self) -> bool {
        self.control_set.is_some()
    }

    pub fn agrees(&self) -> bool {
        self.satisfiable() == self.controllable()
    }

    pub fn ok(&self) -> bool {
        self.agrees() && self.sizes_ok && self.degrees_ok && self.assignment_equivalence && self.roundtrip_ok
    }
}

impl fmt::Display for ReductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits = |a: &[bool]| a.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        writeln!(f, "variables {}", self.num_vars)?;
        writeln!(f, "clauses {}", self.num_clauses)?;
        writeln!(f, "nodes {} edges {} sizes_ok {} degrees_ok {}", self.num_nodes, self.num_edges, self.sizes_ok, self.degrees_ok)?;
        match &self.satisfying_assignment {
            Some(a) => writeln!(f, "sat true assignment {}", bits(a))?,
            None => writeln!(f, "sat false")?,
        }
        match &self.control_set {
            Some(s) => writeln!(f, "scs_within_target true set {s}")?,
            None => writeln!(f, "scs_within_target false")?,
        }
        writeln!(f, "assignment_equivalence {}", self.assignment_equivalence)?;
        writeln!(f, "roundtrip {}", self.roundtrip_ok)?;
        write!(f, "agree {}", self.agrees())
    }
}

/// Checks the size identities and the degree profile of a gadget.
pub fn check_gadget(f: &Cnf3, g: &GadgetGraph) -> (bool, bool) {
    let (s, m) = (f.target_size(), f.num_clauses());
    let sizes = g.graph.num_nodes() == 2 * s + 5 * m && g.graph.num_edges() == s + 8 * m;
    let mut occurrences = vec![[0i64; 2]; f.num_vars + 1];
    for c in &f.clauses {
        for l in c {
            occurrences[l.var][usize::from(l.positive)] += 1;
        }
    }
    let degrees = g.labels.iter().enumerate().all(|(i, label)| {
        let d = g.graph.degree(i);
        match *label {
            NodeLabel::W(_) => d == 4,
            NodeLabel::L { .. } | NodeLabel::M(_) => d == 1,
            NodeLabel::Z => d == 2 * m as i64 + 1,
            NodeLabel::Y(v) => d == 2 * occurrences[v][1] + 1,
            NodeLabel::YBar(v) => d == 2 * occurrences[v][0] + 1,
        }
    });
    (sizes, degrees)
}

/// Decides satisfiability by brute force and controllability within `s` by
/// the exhaustive oracle, and cross-checks both maps between them.
pub fn verify_reduction(f: &Cnf3, exec: Execution) -> Result<ReductionReport, SatError> {
    let g = build_gadget(f);
    let (sizes_ok, degrees_ok) = check_gadget(f, &g);
    let game = g.majority_game();
    let sat = f.brute_force()?;
    let control_set = first_optimal_set(&game, f.target_size(), exec)?.witnesses().first().cloned();

    let mut assignment_equivalence = true;
    for mask in 0u64..1 << f.num_vars {
        let a: Vec<bool> = (0..f.num_vars).map(|i| mask >> i & 1 == 1).collect();
        let set = assignment_to_control_set(f, &g, &a)?;
        if is_sufficient(&game, &set)? != f.eval(&a) {
            assignment_equivalence = false;
            break;
        }
    }

    let mut roundtrip_ok = true;
    if let Some(a) = &sat {
        let set = assignment_to_control_set(f, &g, a)?;
        roundtrip_ok &= normalize_control_set(f, &g, &set).is_ok_and(|n| n == set && &control_set_to_assignment(f, &g, &n) == a);
    }
    if let Some(s) = &control_set {
        roundtrip_ok &= s.len() == f.target_size()
            && normalize_control_set(f, &g, s).is_ok_and(|n| f.eval(&control_set_to_assignment(f, &g, &n)));
    }

    Ok(ReductionReport {
        num_vars: f.num_vars,
        num_clauses: f.num_clauses(),
        num_nodes: g.graph.num_nodes(),
        num_edges: g.graph.num_edges(),
        sizes_ok,
        degrees_ok,
        satisfying_assignment: sat,
        control_set,
        assignment_equivalence,
        roundtrip_ok,
    })
}

/// `count` random formulas with `3..=max_vars` variables and
/// `1..=max_clauses` clauses, reproducible from `seed`.
pub fn random_instances(count: usize, max_vars: usize, max_clauses: usize, seed: u64) -> Result<Vec<Cnf3>, SatError> {
    if max_vars < 3 {
        return Err(SatError::TooFewVariables(max_vars));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let nv = rng.random_range(3..=max_vars);
            let m = rng.random_range(1..=max_clauses.max(1));
            Cnf3::random(nv, m, &mut rng)
        })
        .collect()
}

/// [`verify_reduction`] over many formulas, one job per formula.
pub fn verify_many(formulas: &[Cnf3], exec: Execution) -> Vec<Result<ReductionReport, SatError>> {
    map_collect(exec, formulas.iter().collect(), |f| verify_reduction(f, Execution::Sequential))
}

/// The 8 clauses over variables 1..3 covering every sign pattern.
pub fn all_sign_patterns() -> Cnf3 {
    let clauses = (0..8)
        .map(|mask: i64| (1..=3).map(|v| if mask >> (v - 1) & 1 == 1 { v } else { -v }).collect())
        .collect();
    Cnf3::new(3, clauses).expect("valid clauses")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single() -> Cnf3 {
        parse_cnf("c example\np cnf 3 1\n1 -2 3 0\n").unwrap()
    }

    #[test]
    fn parse_examples() {
        let f = single();
        assert_eq!((f.num_vars(), f.num_clauses()), (3, 1));
        assert!(matches!(parse_cnf("p cnf 3 1\n1 1 2 0\n"), Err(SatError::Syntax { line: 2, .. })));
        assert!(matches!(parse_cnf("p cnf 3 1\n1 2 0\n"), Err(SatError::Syntax { line: 2, .. })));
        assert!(matches!(parse_cnf("p cnf 3 1\n1 2 x 0\n"), Err(SatError::Syntax { line: 2, .. })));
        assert!(matches!(parse_cnf("p cnf 3 1\n1 2 4 0\n"), Err(SatError::Syntax { line: 2, .. })));
        assert!(matches!(parse_cnf("1 2 3 0\n"), Err(SatError::Syntax { line: 1, .. })));
        assert!(matches!(parse_cnf("p cnf 3 2\n1 2 3 0\n"), Err(SatError::Syntax { .. })));
        assert!(matches!(parse_cnf("p cnf 3 1\n1 2 3\n"), Err(SatError::Syntax { .. })));
        let spanning = parse_cnf("p cnf 4 2\n1 2\n3 0 -4\n-1 2 0\n%\n0\n").unwrap();
        assert_eq!(spanning.num_clauses(), 2);
        assert_eq!(parse_cnf(&spanning.to_dimacs()).unwrap(), spanning);
        assert!(matches!(Cnf3::new(3, vec![vec![1, -1, 2]]), Err(SatError::RepeatedVariable { clause: 1, var: 1 })));
    }

    #[test]
    fn gadget_of_single_clause() {
        let f = single();
        let g = build_gadget(&f);
        assert_eq!(g.graph.num_nodes(), 13);
        assert_eq!(g.graph.num_edges(), 12);
        let w1: Vec<usize> = g.graph.neighbors(g.w(1)).iter().map(|&(j, _)| j).collect();
        let mut expected = vec![g.y(1), g.ybar(2), g.y(3), g.z()];
        expected.sort();
        assert_eq!(w1, expected);
        assert_eq!(g.graph.degree(g.z()), 3);
        assert_eq!(check_gadget(&f, &g), (true, true));
        assert!(g.label_map().starts_with("0 w1\n1 y1\n"));
    }

    #[test]
    fn assignment_sets() {
        let f = single();
        let g = build_gadget(&f);
        let s = assignment_to_control_set(&f, &g, &[true, false, true]).unwrap();
        assert_eq!(s, PlayerSet::new(vec![g.z(), g.y(1), g.ybar(2), g.y(3)]));
        let game = g.majority_game();
        assert!(is_sufficient(&game, &s).unwrap());
        // x = (0, 1, 0) falsifies the clause: w1 sees only z.
        let bad = assignment_to_control_set(&f, &g, &[false, true, false]).unwrap();
        let out = crate::scs::cascade(&game, &bad).unwrap();
        assert!(!out.sufficient);
        assert!(!out.final_set.contains(g.w(1)));
        assert!(assignment_to_control_set(&f, &g, &[true]).is_err());
    }

    #[test]
    fn two_of_four_flips_w() {
        let f = single();
        let g = build_gadget(&f);
        let game = g.majority_game();
        let x = crate::profile::Profile::indicator(g.graph.num_nodes(), &PlayerSet::new(vec![g.z(), g.y(1)]));
        assert_eq!(crate::game::Game::marginal_sign(&game, g.w(1), &x), std::cmp::Ordering::Equal);
    }

    #[test]
    fn normalization() {
        let f = single();
        let g = build_gadget(&f);
        let base = assignment_to_control_set(&f, &g, &[true, false, true]).unwrap();
        assert_eq!(normalize_control_set(&f, &g, &base).unwrap(), base);
        let mut leafy = base.clone();
        leafy.remove(g.y(1));
        leafy.insert(g.leaf(1, 1));
        assert_eq!(normalize_control_set(&f, &g, &leafy).unwrap(), base);
        let mut hub = base.clone();
        hub.remove(g.z());
        hub.insert(g.m_leaf(2));
        assert_eq!(normalize_control_set(&f, &g, &hub).unwrap(), base);
        assert!(matches!(normalize_control_set(&f, &g, &PlayerSet::new(vec![g.z()])), Err(SatError::NotSufficient(_))));
        assert_eq!(control_set_to_assignment(&f, &g, &base), vec![true, false, true]);
    }

    #[test]
    fn verify_fixtures() {
        let r = verify_reduction(&single(), Execution::Parallel).unwrap();
        assert!(r.satisfiable() && r.controllable() && r.ok(), "{r}");
        let r = verify_reduction(&all_sign_patterns(), Execution::Parallel).unwrap();
        assert!(!r.satisfiable() && !r.controllable() && r.ok(), "{r}");
    }

    #[test]
    fn random_instances_are_reproducible() {
        let a = random_instances(5, 6, 6, 9).unwrap();
        assert_eq!(a, random_instances(5, 6, 6, 9).unwrap());
        assert!(a.iter().all(|f| (3..=6).contains(&f.num_vars()) && (1..=6).contains(&f.num_clauses())));
        assert!(verify_many(&a, Execution::Parallel).into_iter().all(|r| r.unwrap().ok()));
        assert!(random_instances(1, 2, 1, 0).is_err());
    }

    #[test]
    fn verify_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..12 {
            let nv = rng.random_range(3..=5);
            let m = rng.random_range(1..=5);
            let f = Cnf3::random(nv, m, &mut rng).unwrap();
            let r = verify_reduction(&f, Execution::Parallel).unwrap();
            assert!(r.ok(), "{}\n{r}", f.to_dimacs());
        }
    }
}
