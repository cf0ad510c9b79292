//! Minimum sufficient control sets for binary-action super-modular games.
//!
//! A sufficient control set is a set of players that, once forced to play 1,
//! lets best-response dynamics carry every other player to 1. The crate
//! provides the cascade verifier, an exhaustive optimal-set oracle, the
//! reversible ε-chain search, a closed-form solver for the complete graph,
//! cohesiveness checks, and the 3-SAT gadget reduction.

pub mod chain;
pub mod complete_graph;
pub mod coordination;
pub mod experiments;
pub mod game;
pub mod game_file;
pub mod graph;
pub mod par;
pub mod profile;
pub mod rational;
pub mod rng;
pub mod sat_reduction;
pub mod scs;

pub use coordination::CoordinationGame;
pub use game::{best_response, check_extremal_equilibria, check_supermodular, marginal_utility, BestResponse, Game, GameKind, TableGame};
pub use graph::{generate, Family, WeightedGraph};
pub use par::Execution;
pub use profile::{PlayerSet, Profile};
pub use rational::Rational;
pub use scs::{cascade, is_sufficient, optimal_oracle, CascadeResult, OracleOutcome};
