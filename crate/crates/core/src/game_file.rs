//! Line-oriented game description format.
//!
//! ```text
//! # comments and blank lines are ignored
//! game coordination
//! players 4
//! graph 4 4 undirected
//! 0 1 1
//! 1 2 1
//! 2 3 1
//! 0 3 1
//! theta 0 1/2          # or `bias i c`; the two kinds cannot be mixed
//! ```
//!
//! Players without a `bias`/`theta` line get bias 0 (threshold 1/2).
//!
//! ```text
//! game table
//! players 2
//! delta 0 -1 1         # 2^(n-1) values, others' actions as bits in player order
//! delta 1 -1 1
//! ```
//!
//! A bare graph block (starting with `graph`) is read as the majority game on it.

use std::cmp::Ordering;
use std::fmt::Write as _;

use thiserror::Error;

use crate::coordination::CoordinationGame;
use crate::game::{Game, GameKind, TableGame};
use crate::graph::{is_blank_or_comment, parse_graph_lines, WeightedGraph};
use crate::profile::Profile;
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct GameFileError {
    pub line: usize,
    pub message: String,
}

/// A game read from a file.
#[derive(Debug, Clone)]
pub enum GameSpec {
    Coordination(CoordinationGame),
    Table(TableGame),
}

impl GameSpec {
    pub fn as_coordination(&self) -> Option<&CoordinationGame> {
        match self {
            GameSpec::Coordination(g) => Some(g),
            GameSpec::Table(_) => None,
        }
    }

    /// Serializes in the format accepted by [`parse_game`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match self {
            GameSpec::Coordination(g) => {
                let n = g.num_players();
                let _ = writeln!(s, "game coordination\nplayers {n}");
                s.push_str(&g.graph().to_text());
                for (i, c) in g.biases().iter().enumerate() {
                    let _ = writeln!(s, "bias {i} {}", format_rational(c));
                }
            }
            GameSpec::Table(g) => {
                let n = g.num_players();
                let _ = writeln!(s, "game table\nplayers {n}");
                for (i, row) in g.table().iter().enumerate() {
                    let _ = write!(s, "delta {i}");
                    for v in row {
                        let _ = write!(s, " {}", format_rational(v));
                    }
                    s.push('\n');
                }
            }
        }
        s
    }
}

impl Game for GameSpec {
    fn num_players(&self) -> usize {
        match self {
            GameSpec::Coordination(g) => g.num_players(),
            GameSpec::Table(g) => g.num_players(),
        }
    }

    fn marginal(&self, player: usize, x: &Profile) -> Rational {
        match self {
            GameSpec::Coordination(g) => g.marginal(player, x),
            GameSpec::Table(g) => g.marginal(player, x),
        }
    }

    fn marginal_sign(&self, player: usize, x: &Profile) -> Ordering {
        match self {
            GameSpec::Coordination(g) => g.marginal_sign(player, x),
            GameSpec::Table(g) => g.marginal_sign(player, x),
        }
    }

    fn dependents(&self, player: usize) -> Option<&[usize]> {
        match self {
            GameSpec::Coordination(g) => g.dependents(player),
            GameSpec::Table(g) => g.dependents(player),
        }
    }

    fn kind(&self) -> GameKind {
        match self {
            GameSpec::Coordination(_) => GameKind::Coordination,
            GameSpec::Table(_) => GameKind::Table,
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> GameFileError {
    GameFileError { line, message: message.into() }
}

pub fn parse_game(text: &str) -> Result<GameSpec, GameFileError> {
    let all: Vec<(usize, &str)> = text.lines().enumerate().map(|(k, l)| (k + 1, strip_comment(l))).collect();
    let first = all.iter().position(|(_, l)| !is_blank_or_comment(l));
    let Some(first) = first else {
        return Err(err(1, "empty game description"));
    };
    let (hline, header) = all[first];
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.first() == Some(&"graph") {
        let (g, rest) = parse_graph_lines(&all[first..]).map_err(graph_err)?;
        ensure_consumed(rest)?;
        return Ok(GameSpec::Coordination(CoordinationGame::majority(g)));
    }
    if toks.len() != 2 || toks[0] != "game" {
        return Err(err(hline, "expected `game coordination|table`"));
    }
    let kind = toks[1];
    let rest = &all[first + 1..];
    let pos = rest.iter().position(|(_, l)| !is_blank_or_comment(l));
    let Some(pos) = pos else {
        return Err(err(hline, "missing `players n` line"));
    };
    let (pline, ptext) = rest[pos];
    let ptoks: Vec<&str> = ptext.split_whitespace().collect();
    if ptoks.len() != 2 || ptoks[0] != "players" {
        return Err(err(pline, "expected `players n`"));
    }
    let n: usize = ptoks[1].parse().map_err(|_| err(pline, format!("invalid player count `{}`", ptoks[1])))?;
    if n == 0 {
        return Err(err(pline, "a game needs at least one player"));
    }
    let body = &rest[pos + 1..];
    match kind {
        "coordination" => parse_coordination(n, pline, body),
        "table" => parse_table(n, pline, body),
        other => Err(err(hline, format!("unknown game kind `{other}`"))),
    }
}

// Inline `#` comments are allowed after payload tokens.
fn strip_comment(line: &str) -> &str {
    if line.trim_start().starts_with('#') {
        line
    } else {
        line.split('#').next().unwrap_or("")
    }
}

fn graph_err(e: crate::graph::GraphError) -> GameFileError {
    match e {
        crate::graph::GraphError::Parse { line, message } => err(line, message),
        other => err(0, other.to_string()),
    }
}

fn ensure_consumed(rest: &[(usize, &str)]) -> Result<(), GameFileError> {
    match rest.iter().find(|(_, l)| !is_blank_or_comment(l)) {
        Some((line, _)) => Err(err(*line, "unexpected trailing content")),
        None => Ok(()),
    }
}

fn parse_coordination(n: usize, pline: usize, body: &[(usize, &str)]) -> Result<GameSpec, GameFileError> {
    let (graph, rest): (WeightedGraph, _) = parse_graph_lines(body).map_err(graph_err)?;
    if graph.num_nodes() != n {
        return Err(err(pline, format!("players {n} but graph has {} nodes", graph.num_nodes())));
    }
    let mut values: Vec<Option<Rational>> = vec![None; n];
    let mut mode: Option<&str> = None;
    for &(lno, line) in rest {
        if is_blank_or_comment(line) {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 || !(f[0] == "bias" || f[0] == "theta") {
            return Err(err(lno, "expected `bias i c` or `theta i t`"));
        }
        match mode {
            Some(m) if m != f[0] => return Err(err(lno, "bias and theta lines cannot be mixed")),
            _ => mode = Some(f[0]),
        }
        let i: usize = f[1].parse().map_err(|_| err(lno, format!("invalid player `{}`", f[1])))?;
        if i >= n {
            return Err(err(lno, format!("player {i} out of range")));
        }
        let v = parse_rational(f[2]).map_err(|e| err(lno, e.to_string()))?;
        if values[i].replace(v).is_some() {
            return Err(err(lno, format!("player {i} given twice")));
        }
        // Range checks here so the error carries the line number.
        let w = Rational::from_integer(graph.degree(i));
        let in_range = if f[0] == "bias" {
            v >= -w && v <= w
        } else {
            v >= Rational::from_integer(0) && v <= Rational::from_integer(1)
        };
        if !in_range {
            return Err(err(lno, format!("{} {} of player {i} out of range", f[0], f[2])));
        }
    }
    let game = if mode == Some("theta") {
        let half = Rational::new(1, 2);
        CoordinationGame::from_thresholds(graph, values.into_iter().map(|v| v.unwrap_or(half)).collect())
    } else {
        CoordinationGame::new(graph, values.into_iter().map(|v| v.unwrap_or_default()).collect())
    };
    game.map(GameSpec::Coordination).map_err(|e| err(pline, e.to_string()))
}

fn parse_table(n: usize, pline: usize, body: &[(usize, &str)]) -> Result<GameSpec, GameFileError> {
    if n > TableGame::MAX_PLAYERS {
        return Err(err(pline, format!("table games support at most {} players", TableGame::MAX_PLAYERS)));
    }
    let row_len = 1usize << (n - 1);
    let mut rows: Vec<Option<Vec<Rational>>> = vec![None; n];
    let mut last = pline;
    for &(lno, line) in body {
        if is_blank_or_comment(line) {
            continue;
        }
        last = lno;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() < 2 || f[0] != "delta" {
            return Err(err(lno, "expected `delta i v...`"));
        }
        let i: usize = f[1].parse().map_err(|_| err(lno, format!("invalid player `{}`", f[1])))?;
        if i >= n {
            return Err(err(lno, format!("player {i} out of range")));
        }
        if f.len() - 2 != row_len {
            return Err(err(lno, format!("expected {row_len} values, found {}", f.len() - 2)));
        }
        let row = f[2..]
            .iter()
            .map(|t| parse_rational(t).map_err(|e| err(lno, e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if rows[i].replace(row).is_some() {
            return Err(err(lno, format!("player {i} given twice")));
        }
    }
    if let Some(missing) = rows.iter().position(Option::is_none) {
        return Err(err(last, format!("missing delta row for player {missing}")));
    }
    let table = rows.into_iter().map(Option::unwrap).collect();
    TableGame::new(table).map(GameSpec::Table).map_err(|e| err(pline, e.to_string()))
}
