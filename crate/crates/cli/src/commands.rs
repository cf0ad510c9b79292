use std::fmt;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use scs_core::chain::{best_run, run_restarts, ChainConfig, ChainError};
use scs_core::complete_graph::{analytic_min_size, continuum_min_size, crosscheck_complete, empty_sufficient, sup_gap, CompleteGraphError, ThresholdDistribution};
use scs_core::experiments::{emit_outputs, run_experiment, to_csv, to_plain, ExperimentError, ExperimentSpec, GraphFamily};
use scs_core::game::check_supermodular;
use scs_core::game_file::{parse_game, GameSpec};
use scs_core::rational::{format_rational, parse_rational};
use scs_core::sat_reduction::{build_gadget, parse_cnf, random_instances, verify_many, Cnf3, ReductionReport};
use scs_core::scs::{cascade, first_optimal_set, is_sufficient, optimal_oracle};
use scs_core::{generate, CoordinationGame, Execution, Family, Game, OracleOutcome, PlayerSet};

use crate::output::{read_file, write_file, Table};
use crate::{AnalyticArgs, Cli, Command, ExperimentArgs, FamilyName, Format, GenerateArgs, OracleArgs, ReduceSatArgs, SearchArgs, VerifyArgs, VerifyReductionArgs, WORKERS_ENV};

/// A result that contradicts a proven property of the algorithms.
#[derive(Debug)]
pub struct Internal(pub String);

impl fmt::Display for Internal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "internal check failed: {}", self.0)
    }
}

impl std::error::Error for Internal {}

/// 2 for internal check failures, 1 for everything else.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    let internal = e.chain().any(|c| {
        c.is::<Internal>()
            || matches!(c.downcast_ref::<ExperimentError>(), Some(ExperimentError::Assertion(_)))
            || matches!(c.downcast_ref::<CompleteGraphError>(), Some(CompleteGraphError::Mismatch(_)))
            || matches!(
                c.downcast_ref::<ChainError>(),
                Some(ChainError::NotInvariant { .. } | ChainError::Reducible | ChainError::Singular)
            )
    });
    if internal {
        2
    } else {
        1
    }
}

/// Sizes the global worker pool from the environment.
pub fn configure_workers() -> Result<()> {
    let Ok(value) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let workers: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&w| w >= 1)
        .ok_or_else(|| anyhow!("{WORKERS_ENV} must be a positive integer, got `{value}`"))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .context("configuring the worker pool")?;
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    let ctx = Ctx { seed: cli.seed, out_dir: cli.out_dir.as_deref(), format: cli.format };
    match &cli.command {
        Command::Generate(a) => generate_cmd(&ctx, a),
        Command::Verify(a) => verify_cmd(&ctx, a),
        Command::Oracle(a) => oracle_cmd(&ctx, a),
        Command::Search(a) => search_cmd(&ctx, a),
        Command::Analytic(a) => analytic_cmd(&ctx, a),
        Command::ReduceSat(a) => reduce_sat_cmd(&ctx, a),
        Command::VerifyReduction(a) => verify_reduction_cmd(&ctx, a),
        Command::Experiment(a) => experiment_cmd(&ctx, a),
    }
}

struct Ctx<'a> {
    seed: u64,
    out_dir: Option<&'a Path>,
    format: Format,
}

impl Ctx<'_> {
    /// Writes to `out_dir/name` when an output directory is set, else to stdout.
    fn emit(&self, name: &str, content: &str) -> Result<()> {
        match self.out_dir {
            Some(dir) => {
                let path = write_file(dir, name, content)?;
                println!("wrote {}", path.display());
            }
            None => print!("{content}"),
        }
        Ok(())
    }
}

fn load_game(path: &Path) -> Result<GameSpec> {
    let text = read_file(path)?;
    parse_game(&text).with_context(|| format!("parsing {}", path.display()))
}

/// The oracle and the chain rely on increasing differences.
fn require_supermodular(game: &GameSpec) -> Result<()> {
    if let GameSpec::Table(t) = game {
        if !check_supermodular(t)? {
            bail!("table game is not super-modular");
        }
    }
    Ok(())
}

fn parse_set(text: &str, n: usize) -> Result<PlayerSet> {
    let set = PlayerSet::parse(text).map_err(|e| anyhow!("invalid set `{text}`: {e}"))?;
    if let Some(i) = set.max_player().filter(|&i| i >= n) {
        bail!("player {i} out of range for a game with {n} players");
    }
    Ok(set)
}

fn join(items: impl IntoIterator<Item = usize>) -> String {
    items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

fn generate_cmd(ctx: &Ctx, a: &GenerateArgs) -> Result<()> {
    let need_n = || a.n.ok_or_else(|| anyhow!("--n is required for this family"));
    let family = match a.family {
        FamilyName::Complete => Family::Complete(need_n()?),
        FamilyName::Ring => Family::Ring(need_n()?),
        FamilyName::Path => Family::Path(need_n()?),
        FamilyName::Grid => Family::Grid { k: a.k.ok_or_else(|| anyhow!("--k is required for grids"))?, d: a.d },
        FamilyName::Tree => {
            let text = a.parents.as_deref().ok_or_else(|| anyhow!("--parents is required for trees"))?;
            let parents = text
                .split(',')
                .map(|t| match t.trim() {
                    "-" => Ok(None),
                    t => t.parse().map(Some).map_err(|_| anyhow!("invalid parent `{t}`")),
                })
                .collect::<Result<Vec<_>>>()?;
            Family::Tree(parents)
        }
        FamilyName::Er => {
            let p = a.p.ok_or_else(|| anyhow!("--p is required for er"))?;
            if !(0.0..=1.0).contains(&p) {
                bail!("--p must lie in [0, 1], got {p}");
            }
            Family::ErdosRenyi { n: need_n()?, p, seed: ctx.seed }
        }
    };
    let graph = generate(&family)?;
    match &a.theta {
        None => ctx.emit("graph.txt", &graph.to_text()),
        Some(t) => {
            let theta = parse_rational(t)?;
            let game = CoordinationGame::homogeneous(graph, theta)?;
            ctx.emit("game.txt", &GameSpec::Coordination(game).to_text())
        }
    }
}

fn verify_cmd(ctx: &Ctx, a: &VerifyArgs) -> Result<()> {
    let game = load_game(&a.game)?;
    let n = game.num_players();
    let set = parse_set(&a.set, n)?;
    let out = cascade(&game, &set)?;
    match ctx.format {
        Format::Csv => {
            let mut t = Table::new(&["sufficient", "final_size", "n", "evaluations", "witness"]);
            t.push(vec![
                out.sufficient.to_string(),
                out.final_set.len().to_string(),
                n.to_string(),
                out.evaluations.to_string(),
                join(out.witness.iter().copied()),
            ]);
            print!("{}", t.render(Format::Csv));
        }
        Format::Plain => {
            println!("sufficient {}", if out.sufficient { "yes" } else { "no" });
            println!("final_size {}/{n}", out.final_set.len());
            println!("witness {}", join(out.witness.iter().copied()));
            if !out.sufficient {
                println!("unreached {}", join(out.final_set.complement(n).iter().copied()));
            }
        }
    }
    Ok(())
}

fn oracle_cmd(ctx: &Ctx, a: &OracleArgs) -> Result<()> {
    let game = load_game(&a.game)?;
    require_supermodular(&game)?;
    let budget = a.budget.unwrap_or(game.num_players());
    let out = if a.first {
        first_optimal_set(&game, budget, Execution::Parallel)?
    } else {
        optimal_oracle(&game, budget, Execution::Parallel)?
    };
    for s in out.witnesses() {
        if !is_sufficient(&game, s)? {
            return Err(Internal(format!("oracle witness {s} is not sufficient")).into());
        }
    }
    let mut t = Table::new(&["size", "set"]);
    for s in out.witnesses() {
        t.push(vec![s.len().to_string(), s.to_string()]);
    }
    match (ctx.format, &out) {
        (Format::Csv, _) => print!("{}", t.render(Format::Csv)),
        (Format::Plain, OracleOutcome::Found { min_size, witnesses }) => {
            println!("min_size {min_size}");
            println!("optimal_sets {}", witnesses.len());
            for s in witnesses {
                println!("{s}");
            }
        }
        (Format::Plain, OracleOutcome::NoneWithinBudget { budget }) => println!("none within budget {budget}"),
    }
    Ok(())
}

fn search_cmd(ctx: &Ctx, a: &SearchArgs) -> Result<()> {
    let game = load_game(&a.game)?;
    require_supermodular(&game)?;
    let n = game.num_players();
    let cfg = ChainConfig {
        epsilon: parse_rational(&a.epsilon)?,
        steps: a.steps.unwrap_or_else(|| ChainConfig::default_steps(n)),
        seed: ctx.seed,
        start: None,
        record_visits: false,
    };
    let runs = run_restarts(&game, &cfg, a.restarts, Execution::Parallel)?;
    let best = best_run(&runs).ok_or_else(|| anyhow!("no restarts"))?;
    if !is_sufficient(&game, &best.best_set())? {
        return Err(Internal(format!("chain returned {} which is not sufficient", best.best_set())).into());
    }
    if let Some(path) = &a.emit_trace {
        let mut trace = String::from("step,cardinality\n");
        for (step, c) in &best.cardinality_trace {
            trace.push_str(&format!("{step},{c}\n"));
        }
        let path = match ctx.out_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.clone(),
        };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        std::fs::write(&path, trace).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut t = Table::new(&["restart", "seed", "best_size", "best_step", "set"]);
    for (r, run) in runs.iter().enumerate() {
        t.push(vec![r.to_string(), run.seed.to_string(), run.best_size().to_string(), run.best_step.to_string(), run.best_set().to_string()]);
    }
    match ctx.format {
        Format::Csv => print!("{}", t.render(Format::Csv)),
        Format::Plain => {
            println!("best_size {}", best.best_size());
            println!("best_set {}", best.best_set());
            println!("epsilon {} steps {} restarts {}", format_rational(&cfg.epsilon), cfg.steps, runs.len());
            print!("{}", t.render(Format::Plain));
        }
    }
    Ok(())
}

fn analytic_cmd(ctx: &Ctx, a: &AnalyticArgs) -> Result<()> {
    let text = read_file(&a.thresholds)?;
    let d = ThresholdDistribution::parse(&text).with_context(|| format!("parsing {}", a.thresholds.display()))?;
    let (m, set) = analytic_min_size(&d);
    if a.crosscheck {
        crosscheck_complete(&d, Execution::Parallel)?;
    }
    let fields = [
        ("n", d.n().to_string()),
        ("min_size", m.to_string()),
        ("set", set.to_string()),
        ("sup_gap", format_rational(&sup_gap(&d))),
        ("continuum_bound", continuum_min_size(&d).to_string()),
        ("empty_sufficient", empty_sufficient(&d).to_string()),
    ];
    print_record(ctx.format, &fields);
    if a.crosscheck && ctx.format == Format::Plain {
        println!("crosscheck ok");
    }
    Ok(())
}

fn print_record(format: Format, fields: &[(&str, String)]) {
    match format {
        Format::Csv => {
            let header: Vec<&str> = fields.iter().map(|f| f.0).collect();
            let mut t = Table::new(&header);
            t.push(fields.iter().map(|f| f.1.clone()).collect());
            print!("{}", t.render(Format::Csv));
        }
        Format::Plain => {
            for (k, v) in fields {
                println!("{k} {v}");
            }
        }
    }
}

fn load_cnf(path: &Path) -> Result<Cnf3> {
    let text = read_file(path)?;
    parse_cnf(&text).with_context(|| format!("parsing {}", path.display()))
}

fn reduce_sat_cmd(ctx: &Ctx, a: &ReduceSatArgs) -> Result<()> {
    let f = load_cnf(&a.cnf)?;
    let g = build_gadget(&f);
    match ctx.out_dir {
        Some(dir) => {
            let graph = write_file(dir, "gadget.graph", &g.graph.to_text())?;
            let labels = write_file(dir, "gadget.labels", &g.label_map())?;
            println!("wrote {}", graph.display());
            println!("wrote {}", labels.display());
            println!("target_size {}", f.target_size());
        }
        None => {
            print!("{}", g.graph.to_text());
            println!("# target_size {}", f.target_size());
            for line in g.label_map().lines() {
                println!("# node {line}");
            }
        }
    }
    Ok(())
}

fn report_fields(r: &ReductionReport) -> Vec<(&'static str, String)> {
    let bits = |a: &[bool]| a.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
    vec![
        ("variables", r.num_vars.to_string()),
        ("clauses", r.num_clauses.to_string()),
        ("nodes", r.num_nodes.to_string()),
        ("edges", r.num_edges.to_string()),
        ("sat", r.satisfiable().to_string()),
        ("assignment", r.satisfying_assignment.as_deref().map(bits).unwrap_or_default()),
        ("scs_within_target", r.controllable().to_string()),
        ("set", r.control_set.as_ref().map(|s| s.to_string()).unwrap_or_default()),
        ("sizes_ok", r.sizes_ok.to_string()),
        ("degrees_ok", r.degrees_ok.to_string()),
        ("assignment_equivalence", r.assignment_equivalence.to_string()),
        ("roundtrip", r.roundtrip_ok.to_string()),
        ("agree", r.agrees().to_string()),
    ]
}

fn verify_reduction_cmd(ctx: &Ctx, a: &VerifyReductionArgs) -> Result<()> {
    let formulas = match (&a.cnf, a.random) {
        (Some(path), _) => vec![load_cnf(path)?],
        (None, Some(count)) => random_instances(count, a.max_vars, a.max_clauses, ctx.seed)?,
        (None, None) => bail!("give a CNF file or --random"),
    };
    let reports = verify_many(&formulas, Execution::Parallel);
    let mut failures = Vec::new();
    let mut table: Option<Table> = None;
    for (k, (f, r)) in formulas.iter().zip(reports).enumerate() {
        let r = r?;
        if !r.ok() {
            failures.push(format!("formula {k}:\n{}{r}", f.to_dimacs()));
        }
        let fields = report_fields(&r);
        if formulas.len() == 1 {
            print_record(ctx.format, &fields);
        } else {
            let t = table.get_or_insert_with(|| {
                let mut header = vec!["index"];
                header.extend(fields.iter().map(|f| f.0));
                Table::new(&header)
            });
            let mut row = vec![k.to_string()];
            row.extend(fields.into_iter().map(|f| f.1));
            t.push(row);
        }
    }
    if let Some(t) = table {
        print!("{}", t.render(ctx.format));
        if ctx.format == Format::Plain {
            println!("checked {} formulas, {} disagreements", formulas.len(), failures.len());
        }
    }
    if !failures.is_empty() {
        return Err(Internal(format!("reduction check failed\n{}", failures.join("\n"))).into());
    }
    Ok(())
}

/// Parses `8-14,20,30`.
pub fn parse_n_list(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| anyhow!("invalid node count `{s}` in `{text}`"));
        match part.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo > hi {
                    bail!("empty range `{part}`");
                }
                out.extend(lo..=hi);
            }
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() {
        bail!("no node counts in `{text}`");
    }
    Ok(out)
}

fn experiment_cmd(ctx: &Ctx, a: &ExperimentArgs) -> Result<()> {
    let family: GraphFamily = a.family.parse().map_err(|e: String| anyhow!(e))?;
    let mut spec = ExperimentSpec::new(family, parse_n_list(&a.n)?, ctx.seed);
    spec.trials = a.trials;
    spec.restarts = a.restarts;
    spec.epsilon = parse_rational(&a.epsilon)?;
    spec.steps = a.steps;
    spec.oracle_cutoff = a.oracle_cutoff;
    spec.timing = !a.no_timing;
    let rows = run_experiment(&spec, Execution::Parallel)?;
    match ctx.out_dir {
        Some(dir) => {
            for path in emit_outputs(&rows, dir)? {
                println!("wrote {}", path.display());
            }
        }
        None => match ctx.format {
            Format::Csv => print!("{}", to_csv(&rows)?),
            Format::Plain => print!("{}", to_plain(&rows)),
        },
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_lists() {
        assert_eq!(parse_n_list("8-10,20").unwrap(), vec![8, 9, 10, 20]);
        assert_eq!(parse_n_list("5").unwrap(), vec![5]);
        assert!(parse_n_list("10-8").is_err());
        assert!(parse_n_list("x").is_err());
        assert!(parse_n_list("").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&anyhow!("bad input")), 1);
        assert_eq!(exit_code(&anyhow::Error::new(Internal("x".into())).context("outer")), 2);
        assert_eq!(exit_code(&ExperimentError::Assertion("x".into()).into()), 2);
        assert_eq!(exit_code(&ChainError::NoSteps.into()), 1);
    }
}
