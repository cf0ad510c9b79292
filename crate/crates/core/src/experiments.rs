//! Erdős–Rényi sweeps comparing the ε-chain, the exhaustive oracle and a
//! highest-degree heuristic, with CSV output and a plotting script.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use crate::chain::{best_run, run_restarts, ChainConfig, ChainError};
use crate::coordination::CoordinationGame;
use crate::game::Game;
use crate::graph::{generate, Family, GraphError, WeightedGraph};
use crate::par::{map_collect, Execution};
use crate::profile::PlayerSet;
use crate::rational::{to_f64, Rational};
use crate::rng::derive_seed;
use crate::scs::{cascade, first_optimal_set, is_sufficient, ScsError};

pub const DENSE_P: f64 = 0.4;
pub const DEFAULT_TRIALS: usize = 5;
pub const DEFAULT_RESTARTS: usize = 10;
pub const DEFAULT_ORACLE_CUTOFF: usize = 16;
/// Graph seeds tried per row before the row is marked skipped.
pub const MAX_SEED_ADVANCES: usize = 32;

pub const CSV_HEADER: [&str; 8] = ["n", "p", "trial", "chain_size", "oracle_size", "coverage", "runtime_ms", "status"];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment: {0}")]
    Invalid(String),
    /// A result contradicts a proven property; indicates a bug.
    #[error("internal check failed: {0}")]
    Assertion(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Scs(#[from] ScsError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

/// Edge-probability schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphFamily {
    /// `p = 0.4`
    Dense,
    /// `p = min(1, 4 ln n / n)`
    Sparse,
    /// The same `p` for every `n`.
    Fixed(f64),
}

impl GraphFamily {
    pub fn probability(self, n: usize) -> f64 {
        match self {
            GraphFamily::Dense => DENSE_P,
            GraphFamily::Sparse => (4.0 * (n as f64).ln() / n as f64).min(1.0),
            GraphFamily::Fixed(p) => p,
        }
    }
}

impl std::str::FromStr for GraphFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dense" => Ok(GraphFamily::Dense),
            "sparse" => Ok(GraphFamily::Sparse),
            other => match other.parse::<f64>() {
                Ok(p) if (0.0..=1.0).contains(&p) => Ok(GraphFamily::Fixed(p)),
                _ => Err(format!("unknown family `{other}` (expected dense, sparse or a probability)")),
            },
        }
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFamily::Dense => f.write_str("dense"),
            GraphFamily::Sparse => f.write_str("sparse"),
            GraphFamily::Fixed(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub family: GraphFamily,
    pub n_range: Vec<usize>,
    pub trials: usize,
    pub epsilon: Rational,
    /// Steps per walk; `None` means `100·n²`.
    pub steps: Option<u64>,
    pub restarts: usize,
    pub oracle_cutoff: usize,
    pub seed: u64,
    /// Record wall-clock time per row. Disable for byte-reproducible output.
    pub timing: bool,
}

impl ExperimentSpec {
    pub fn new(family: GraphFamily, n_range: Vec<usize>, seed: u64) -> Self {
        ExperimentSpec {
            family,
            n_range,
            trials: DEFAULT_TRIALS,
            epsilon: Rational::new(ChainConfig::DEFAULT_EPSILON.0, ChainConfig::DEFAULT_EPSILON.1),
            steps: None,
            restarts: DEFAULT_RESTARTS,
            oracle_cutoff: DEFAULT_ORACLE_CUTOFF,
            seed,
            timing: true,
        }
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if self.n_range.is_empty() {
            return Err(ExperimentError::Invalid("empty n range".into()));
        }
        if let Some(n) = self.n_range.iter().find(|&&n| n < 2) {
            return Err(ExperimentError::Invalid(format!("n = {n} is below 2")));
        }
        if self.trials == 0 {
            return Err(ExperimentError::Invalid("trials must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(ExperimentError::Invalid("restarts must be at least 1".into()));
        }
        if self.steps == Some(0) {
            return Err(ExperimentError::Invalid("steps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// No sink-free graph within [`MAX_SEED_ADVANCES`] seeds.
    Skipped(String),
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStatus::Ok => f.write_str("ok"),
            RowStatus::Skipped(why) => write!(f, "skipped: {why}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub n: usize,
    pub p: f64,
    pub trial: usize,
    /// Seed of the accepted graph draw.
    pub graph_seed: Option<u64>,
    pub chain_size: Option<usize>,
    pub chain_set: Option<PlayerSet>,
    pub oracle_size: Option<usize>,
    /// Fraction of nodes reached from the `chain_size` highest-degree nodes.
    pub coverage: Option<Rational>,
    pub runtime_ms: Option<u128>,
    pub status: RowStatus,
}

impl ResultRow {
    fn record(&self) -> [String; 8] {
        let opt = |v: Option<String>| v.unwrap_or_default();
        [
            self.n.to_string(),
            format!("{:.6}", self.p),
            self.trial.to_string(),
            opt(self.chain_size.map(|v| v.to_string())),
            opt(self.oracle_size.map(|v| v.to_string())),
            opt(self.coverage.map(|c| format!("{:.6}", to_f64(&c)))),
            opt(self.runtime_ms.map(|v| v.to_string())),
            self.status.to_string(),
        ]
    }
}

/// The `k` highest-degree nodes (ties to the smaller index) and the fraction
/// of nodes their cascade converts.
pub fn degree_heuristic<G: Game + ?Sized>(game: &G, g: &WeightedGraph, k: usize) -> Result<(PlayerSet, Rational), ScsError> {
    let n = g.num_nodes();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(g.degree(i)), i));
    let set = PlayerSet::new(order[..k.min(n)].to_vec());
    let out = cascade(game, &set)?;
    Ok((set, Rational::new(out.final_set.len() as i64, n as i64)))
}

fn first_graph(master: u64, n: usize, trial: usize, p: f64) -> Result<(u64, WeightedGraph), String> {
    let mut last = String::new();
    for attempt in 0..MAX_SEED_ADVANCES {
        let seed = derive_seed(master, &[n as u64, trial as u64, attempt as u64]);
        match generate(&Family::ErdosRenyi { n, p, seed }) {
            Ok(g) => return Ok((seed, g)),
            Err(e @ GraphError::SinkProduced { .. }) => last = e.to_string(),
            Err(e) => return Err(e.to_string()),
        }
    }
    Err(format!("{MAX_SEED_ADVANCES} draws produced a sink; last: {last}"))
}

fn run_row(spec: &ExperimentSpec, n: usize, trial: usize) -> Result<ResultRow, ExperimentError> {
    let start = Instant::now();
    let p = spec.family.probability(n);
    let mut row = ResultRow {
        n,
        p,
        trial,
        graph_seed: None,
        chain_size: None,
        chain_set: None,
        oracle_size: None,
        coverage: None,
        runtime_ms: None,
        status: RowStatus::Ok,
    };
    let (graph_seed, graph) = match first_graph(spec.seed, n, trial, p) {
        Ok(found) => found,
        Err(why) => {
            row.status = RowStatus::Skipped(why);
            return Ok(row);
        }
    };
    row.graph_seed = Some(graph_seed);
    let game = CoordinationGame::majority(graph);

    let cfg = ChainConfig {
        epsilon: spec.epsilon,
        steps: spec.steps.unwrap_or_else(|| ChainConfig::default_steps(n)),
        seed: derive_seed(graph_seed, &[0]),
        start: None,
        record_visits: false,
    };
    let runs = run_restarts(&game, &cfg, spec.restarts, Execution::Sequential)?;
    let best = best_run(&runs).expect("at least one restart").best_set();
    if !is_sufficient(&game, &best)? {
        return Err(ExperimentError::Assertion(format!("chain set {best} is not sufficient (n={n}, trial={trial}, graph seed {graph_seed})")));
    }
    let k = best.len();

    if n <= spec.oracle_cutoff {
        let m = first_optimal_set(&game, k, Execution::Sequential)?.min_size().ok_or_else(|| {
            ExperimentError::Assertion(format!("oracle found nothing within the chain size {k} (n={n}, graph seed {graph_seed})"))
        })?;
        row.oracle_size = Some(m);
    }
    let (_, coverage) = degree_heuristic(&game, game.graph(), k)?;
    row.chain_size = Some(k);
    row.chain_set = Some(best);
    row.coverage = Some(coverage);
    if spec.timing {
        row.runtime_ms = Some(start.elapsed().as_millis());
    }
    Ok(row)
}

/// One row per `(n, trial)` in `n_range × 0..trials` order.
pub fn run_experiment(spec: &ExperimentSpec, exec: Execution) -> Result<Vec<ResultRow>, ExperimentError> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = spec.n_range.iter().flat_map(|&n| (0..spec.trials).map(move |t| (n, t))).collect();
    map_collect(exec, jobs, |(n, t)| run_row(spec, n, t)).into_iter().collect()
}

/// RFC 4180 CSV with the fixed column order.
pub fn to_csv(rows: &[ResultRow]) -> Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Aligned plain-text table.
pub fn to_plain(rows: &[ResultRow]) -> String {
    let records: Vec<[String; 8]> = rows.iter().map(ResultRow::record).collect();
    let widths: Vec<usize> = (0..8)
        .map(|c| records.iter().map(|r| r[c].len()).chain([CSV_HEADER[c].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(CSV_HEADER.to_vec());
    for r in &records {
        out += &line(r.iter().map(String::as_str).collect());
    }
    out
}

pub const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plots control-set size and degree-heuristic coverage against n from results.csv."""
import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    rows = []
    with open(path, newline="") as f:
        for r in csv.DictReader(f):
            if r["status"] == "ok":
                rows.append(r)
    return rows


def mean_by_n(rows, column):
    acc = defaultdict(list)
    for r in rows:
        if r[column] != "":
            acc[int(r["n"])].append(float(r[column]))
    ns = sorted(acc)
    return ns, [sum(acc[n]) / len(acc[n]) for n in ns]


def main():
    src = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).with_name("results.csv")
    rows = load(src)
    out = src.parent

    fig, ax = plt.subplots()
    ns, chain = mean_by_n(rows, "chain_size")
    ax.plot(ns, chain, "o-", label="chain")
    ns_o, oracle = mean_by_n(rows, "oracle_size")
    if ns_o:
        ax.plot(ns_o, oracle, "s--", label="optimal")
    ax.set_xlabel("n")
    ax.set_ylabel("control set size")
    ax.set_title("Size of control sets")
    ax.legend()
    fig.savefig(out / "size_vs_n.png", dpi=150)

    fig, ax = plt.subplots()
    ns, cov = mean_by_n(rows, "coverage")
    ax.plot(ns, [100 * c for c in cov], "o-")
    ax.set_xlabel("n")
    ax.set_ylabel("nodes converted (%)")
    ax.set_ylim(0, 100)
    ax.set_title("Coverage of the k highest-degree nodes")
    fig.savefig(out / "coverage_vs_n.png", dpi=150)


if __name__ == "__main__":
    main()
"#;

/// Writes `results.csv` and `plot_results.py` into `dir`.
pub fn emit_outputs(rows: &[ResultRow], dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    if rows.is_empty() {
        return Err(ExperimentError::Invalid("no rows to write".into()));
    }
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ExperimentError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let csv_path = dir.join("results.csv");
    let text = to_csv(rows).map_err(|source| ExperimentError::Csv { path: csv_path.clone(), source })?;
    fs::write(&csv_path, text).map_err(io(&csv_path))?;
    let script = dir.join("plot_results.py");
    fs::write(&script, PLOT_SCRIPT).map_err(io(&script))?;
    Ok(vec![csv_path, script])
}

/// Mean of a per-row quantity for each `n`, skipping missing values.
pub fn mean_by_n(rows: &[ResultRow], value: impl Fn(&ResultRow) -> Option<f64>) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64, usize)> = Vec::new();
    for r in rows {
        let Some(v) = value(r) else { continue };
        match out.iter_mut().find(|(n, _, _)| *n == r.n) {
            Some(e) => {
                e.1 += v;
                e.2 += 1;
            }
            None => out.push((r.n, v, 1)),
        }
    }
    out.sort_by_key(|e| e.0);
    out.into_iter().map(|(n, s, c)| (n, s / c as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> ExperimentSpec {
        let mut spec = ExperimentSpec::new(GraphFamily::Dense, vec![8, 10], seed);
        spec.trials = 2;
        spec.timing = false;
        spec
    }

    #[test]
    fn probabilities() {
        assert_eq!(GraphFamily::Dense.probability(50), 0.4);
        assert!((GraphFamily::Sparse.probability(50) - 4.0 * 50f64.ln() / 50.0).abs() < 1e-15);
        assert_eq!(GraphFamily::Sparse.probability(3), 1.0);
        assert_eq!("sparse".parse::<GraphFamily>(), Ok(GraphFamily::Sparse));
        assert!("medium".parse::<GraphFamily>().is_err());
        assert_eq!("0.25".parse::<GraphFamily>(), Ok(GraphFamily::Fixed(0.25)));
    }

    #[test]
    fn degree_heuristic_examples() {
        let g = generate(&Family::Complete(7)).unwrap();
        let game = CoordinationGame::majority(g.clone());
        assert_eq!(degree_heuristic(&game, &g, 7).unwrap().1, Rational::from_integer(1));
        let (set, cov) = degree_heuristic(&game, &g, 3).unwrap();
        assert_eq!(set, PlayerSet::new(vec![0, 1, 2]));
        assert_eq!(cov, Rational::from_integer(1));
        let star = WeightedGraph::from_edges(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)], crate::graph::Provenance::Unspecified).unwrap();
        let star_game = CoordinationGame::majority(star.clone());
        assert_eq!(degree_heuristic(&star_game, &star, 1).unwrap().0, PlayerSet::new(vec![0]));
    }

    #[test]
    fn rows_are_consistent_and_reproducible() {
        let spec = small(7);
        let rows = run_experiment(&spec, Execution::Parallel).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert_eq!(r.status, RowStatus::Ok);
            assert!(r.chain_size.unwrap() >= r.oracle_size.unwrap());
            let c = r.coverage.unwrap();
            assert!(c >= Rational::from_integer(0) && c <= Rational::from_integer(1));
        }
        let again = run_experiment(&spec, Execution::Sequential).unwrap();
        assert_eq!(to_csv(&rows).unwrap(), to_csv(&again).unwrap());
    }

    #[test]
    fn csv_layout() {
        let mut rows = run_experiment(&small(1), Execution::Sequential).unwrap();
        rows.truncate(1);
        let text = to_csv(&rows).unwrap();
        let lines: Vec<&str> = text.split_terminator("\r\n").collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "n,p,trial,chain_size,oracle_size,coverage,runtime_ms,status");
        rows[0].status = RowStatus::Skipped("a, \"b\"".into());
        assert!(to_csv(&rows).unwrap().contains("\"skipped: a, \"\"b\"\"\""));
        assert!(to_plain(&rows).starts_with("n  "));
    }

    #[test]
    fn emit_writes_both_files() {
        let dir = tempfile::tempdir().unwrap();
        let rows = run_experiment(&small(2), Execution::Sequential).unwrap();
        let paths = emit_outputs(&rows, &dir.path().join("out")).unwrap();
        assert!(paths.iter().all(|p| p.exists()));
        assert!(emit_outputs(&[], dir.path()).is_err());
    }

    #[test]
    fn invalid_specs() {
        let mut spec = small(0);
        spec.n_range.clear();
        assert!(matches!(run_experiment(&spec, Execution::Sequential), Err(ExperimentError::Invalid(_))));
        let mut spec = small(0);
        spec.trials = 0;
        assert!(run_experiment(&spec, Execution::Sequential).is_err());
    }

    #[test]
    fn sink_draws_mark_rows_skipped() {
        let spec = ExperimentSpec { family: GraphFamily::Fixed(0.0), n_range: vec![3], trials: 1, ..small(0) };
        let rows = run_experiment(&spec, Execution::Sequential).unwrap();
        assert!(matches!(rows[0].status, RowStatus::Skipped(_)));
        assert_eq!(rows[0].chain_size, None);
        assert!(to_csv(&rows).unwrap().contains("skipped"));
        // Sparse p at n = 2 is 1, so the draw always succeeds.
        let spec = ExperimentSpec { family: GraphFamily::Sparse, n_range: vec![2], trials: 1, ..small(0) };
        let rows = run_experiment(&spec, Execution::Sequential).unwrap();
        assert_eq!(rows[0].status, RowStatus::Ok);
        assert_eq!(rows[0].chain_size, Some(1));
    }

    #[test]
    fn mean_by_n_groups() {
        let rows = run_experiment(&small(3), Execution::Sequential).unwrap();
        let means = mean_by_n(&rows, |r| r.chain_size.map(|v| v as f64));
        assert_eq!(means.iter().map(|m| m.0).collect::<Vec<_>>(), vec![8, 10]);
    }
}
