//! Network coordination games.
//!
//! Player `i` earns `W_ij` for every neighbour `j` playing the same action and
//! a bias `c_i` for playing 1. Expanding the utility gives the marginal
//!
//! ```text
//! Δ_i(x) = 2·Σ_j W_ij x_j − w_i + c_i
//! ```
//!
//! so player `i` weakly prefers 1 exactly when the weighted fraction of
//! neighbours at 1 reaches the threshold `θ_i = (w_i − c_i) / (2 w_i)`.

use std::cmp::Ordering;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::game::{validate_extremal, Game, GameError, GameKind};
use crate::graph::WeightedGraph;
use crate::profile::Profile;
use crate::rational::{format_rational, is_unit_interval, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoordinationError {
    #[error("expected {expected} per-player values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("bias {bias} of player {player} is outside [-{degree}, {degree}]")]
    BiasOutOfRange { player: usize, bias: String, degree: i64 },
    #[error("threshold {theta} of player {player} is outside [0, 1]")]
    ThresholdOutOfRange { player: usize, theta: String },
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone)]
pub struct CoordinationGame {
    graph: Arc<WeightedGraph>,
    biases: Vec<Rational>,
    thresholds: Vec<Rational>,
}

impl CoordinationGame {
    /// Game with per-player biases `c_i ∈ [−w_i, w_i]`.
    pub fn new(graph: impl Into<Arc<WeightedGraph>>, biases: Vec<Rational>) -> Result<Self, CoordinationError> {
        let graph = graph.into();
        let n = graph.num_nodes();
        if biases.len() != n {
            return Err(CoordinationError::Length { expected: n, got: biases.len() });
        }
        for (i, c) in biases.iter().enumerate() {
            let w = Rational::from_integer(graph.degree(i));
            if *c < -w || *c > w {
                return Err(CoordinationError::BiasOutOfRange {
                    player: i,
                    bias: format_rational(c),
                    degree: graph.degree(i),
                });
            }
        }
        let game = Self::from_parts_unchecked(graph, biases);
        validate_extremal(&game)?;
        Ok(game)
    }

    /// Game with per-player thresholds `θ_i ∈ [0, 1]`, i.e. `c_i = w_i(1 − 2θ_i)`.
    pub fn from_thresholds(
        graph: impl Into<Arc<WeightedGraph>>,
        thresholds: Vec<Rational>,
    ) -> Result<Self, CoordinationError> {
        let graph = graph.into();
        let n = graph.num_nodes();
        if thresholds.len() != n {
            return Err(CoordinationError::Length { expected: n, got: thresholds.len() });
        }
        let mut biases = Vec::with_capacity(n);
        for (i, theta) in thresholds.iter().enumerate() {
            if !is_unit_interval(theta) {
                return Err(CoordinationError::ThresholdOutOfRange {
                    player: i,
                    theta: format_rational(theta),
                });
            }
            let two = Rational::from_integer(2);
            biases.push(Rational::from_integer(graph.degree(i)) * (Rational::one() - two * theta));
        }
        Self::new(graph, biases)
    }

    /// Every player has threshold `θ`.
    pub fn homogeneous(graph: impl Into<Arc<WeightedGraph>>, theta: Rational) -> Result<Self, CoordinationError> {
        let graph = graph.into();
        let n = graph.num_nodes();
        Self::from_thresholds(graph, vec![theta; n])
    }

    /// The majority game: zero bias, threshold 1/2 everywhere.
    pub fn majority(graph: impl Into<Arc<WeightedGraph>>) -> Self {
        let graph = graph.into();
        let n = graph.num_nodes();
        Self::from_parts_unchecked(graph, vec![Rational::zero(); n])
    }

    /// Skips the bias-range and equilibrium checks. Intended for building
    /// deliberately invalid instances.
    pub fn from_parts_unchecked(graph: impl Into<Arc<WeightedGraph>>, biases: Vec<Rational>) -> Self {
        let graph = graph.into();
        let thresholds = biases
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let w = Rational::from_integer(graph.degree(i));
                (w - c) / (w * 2)
            })
            .collect();
        CoordinationGame { graph, biases, thresholds }
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn shared_graph(&self) -> Arc<WeightedGraph> {
        Arc::clone(&self.graph)
    }

    pub fn biases(&self) -> &[Rational] {
        &self.biases
    }

    pub fn thresholds(&self) -> &[Rational] {
        &self.thresholds
    }

    /// `Σ_j W_ij x_j`
    #[inline]
    pub fn active_weight(&self, i: usize, x: &Profile) -> i64 {
        self.graph.neighbors(i).iter().filter(|(j, _)| x.get(*j)).map(|&(_, w)| w).sum()
    }

    /// Compares the weighted fraction of active neighbours with `θ_i`.
    pub fn threshold_comparison(&self, i: usize, x: &Profile) -> Ordering {
        let frac = Rational::new(self.active_weight(i, x), self.graph.degree(i));
        frac.cmp(&self.thresholds[i])
    }
}

impl Game for CoordinationGame {
    fn num_players(&self) -> usize {
        self.graph.num_nodes()
    }

    fn marginal(&self, player: usize, x: &Profile) -> Rational {
        let s = self.active_weight(player, x);
        Rational::from_integer(2 * s - self.graph.degree(player)) + self.biases[player]
    }

    #[inline]
    fn marginal_sign(&self, player: usize, x: &Profile) -> Ordering {
        let c = &self.biases[player];
        let base = 2 * self.active_weight(player, x) - self.graph.degree(player);
        (base as i128 * *c.denom() as i128 + *c.numer() as i128).cmp(&0)
    }

    fn dependents(&self, player: usize) -> Option<&[usize]> {
        Some(self.graph.in_neighbors(player))
    }

    fn kind(&self) -> GameKind {
        GameKind::Coordination
    }
}
