//! Binary-action games presented through their marginal utilities.
//!
//! A game only ever exposes `Δ_i(x) = u_i(1, x₋ᵢ) − u_i(0, x₋ᵢ)`; every
//! condition the toolkit checks (best responses, increasing differences,
//! extremal equilibria, improvement paths) depends on these differences alone.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;
use rand::Rng;
use thiserror::Error;

use crate::profile::Profile;
use crate::rational::Rational;

/// Largest player count accepted by the exhaustive structural checks.
pub const EXHAUSTIVE_MAX_PLAYERS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameKind {
    Coordination,
    Table,
    Custom,
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameKind::Coordination => "coordination",
            GameKind::Table => "table",
            GameKind::Custom => "custom",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("player index {index} out of range for a game with {n} players")]
    PlayerOutOfRange { index: usize, n: usize },
    #[error("profile has length {got}, expected {expected}")]
    ProfileLength { got: usize, expected: usize },
    #[error("exhaustive check too large: {n} players exceeds the limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("the all-0 profile is not an equilibrium: player {player} has Δ = {delta} > 0")]
    ZeroNotEquilibrium { player: usize, delta: Rational },
    #[error("the all-1 profile is not an equilibrium: player {player} has Δ = {delta} < 0")]
    OneNotEquilibrium { player: usize, delta: Rational },
    #[error("a game needs at least one player")]
    NoPlayers,
    #[error("table game: {0}")]
    Table(String),
}

/// A finite game with binary actions, seen through marginal utilities.
///
/// Implementations must make `marginal(i, x)` independent of `x_i`.
pub trait Game: Send + Sync {
    fn num_players(&self) -> usize;

    /// `Δ_i(x)`. Callers guarantee `player < n` and `x.len() == n`.
    fn marginal(&self, player: usize, x: &Profile) -> Rational;

    /// Sign of `Δ_i(x)`; override when it can be decided without building the rational.
    fn marginal_sign(&self, player: usize, x: &Profile) -> Ordering {
        self.marginal(player, x).cmp(&Rational::zero())
    }

    /// Players whose marginal can change when `player` switches action.
    /// `None` means "possibly everyone".
    fn dependents(&self, _player: usize) -> Option<&[usize]> {
        None
    }

    fn kind(&self) -> GameKind {
        GameKind::Custom
    }
}

/// Best-response set `B_i(x₋ᵢ) ⊆ {0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BestResponse {
    Zero,
    One,
    Both,
}

impl BestResponse {
    pub fn from_sign(sign: Ordering) -> Self {
        match sign {
            Ordering::Less => BestResponse::Zero,
            Ordering::Equal => BestResponse::Both,
            Ordering::Greater => BestResponse::One,
        }
    }

    pub fn contains(self, action: bool) -> bool {
        match self {
            BestResponse::Zero => !action,
            BestResponse::One => action,
            BestResponse::Both => true,
        }
    }

    pub fn actions(self) -> &'static [u8] {
        match self {
            BestResponse::Zero => &[0],
            BestResponse::One => &[1],
            BestResponse::Both => &[0, 1],
        }
    }
}

fn check_args<G: Game + ?Sized>(game: &G, i: usize, x: &Profile) -> Result<(), GameError> {
    let n = game.num_players();
    if i >= n {
        return Err(GameError::PlayerOutOfRange { index: i, n });
    }
    if x.len() != n {
        return Err(GameError::ProfileLength {
            got: x.len(),
            expected: n,
        });
    }
    Ok(())
}

/// Checked `Δ_i(x)`.
pub fn marginal_utility<G: Game + ?Sized>(
    game: &G,
    i: usize,
    x: &Profile,
) -> Result<Rational, GameError> {
    check_args(game, i, x)?;
    Ok(game.marginal(i, x))
}

/// `{1}` if `Δ > 0`, `{0}` if `Δ < 0`, `{0,1}` on an exact tie.
pub fn best_response<G: Game + ?Sized>(
    game: &G,
    i: usize,
    x: &Profile,
) -> Result<BestResponse, GameError> {
    check_args(game, i, x)?;
    Ok(BestResponse::from_sign(game.marginal_sign(i, x)))
}

/// Exhaustively checks increasing differences: raising any single other
/// player's action never lowers `Δ_i`. Costs `n·(n−1)·2^(n−1)` evaluations.
pub fn check_supermodular<G: Game + ?Sized>(game: &G) -> Result<bool, GameError> {
    let n = game.num_players();
    if n > EXHAUSTIVE_MAX_PLAYERS {
        return Err(GameError::TooLarge {
            n,
            limit: EXHAUSTIVE_MAX_PLAYERS,
        });
    }
    for i in 0..n {
        for mask in 0u64..(1u64 << n) {
            if mask >> i & 1 == 1 {
                continue;
            }
            let x = Profile::from_mask(n, mask);
            let base = game.marginal(i, &x);
            for j in (0..n).filter(|&j| j != i && mask >> j & 1 == 0) {
                let raised = Profile::from_mask(n, mask | 1 << j);
                if game.marginal(i, &raised) < base {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// True iff `𝟘` and `𝟙` are both Nash equilibria.
pub fn check_extremal_equilibria<G: Game + ?Sized>(game: &G) -> bool {
    validate_extremal(game).is_ok()
}

/// Like [`check_extremal_equilibria`] but names the first offending player.
pub fn validate_extremal<G: Game + ?Sized>(game: &G) -> Result<(), GameError> {
    let n = game.num_players();
    if n == 0 {
        return Err(GameError::NoPlayers);
    }
    let zero = Profile::zeros(n);
    let one = Profile::ones(n);
    for i in 0..n {
        let d0 = game.marginal(i, &zero);
        if d0 > Rational::zero() {
            return Err(GameError::ZeroNotEquilibrium {
                player: i,
                delta: d0,
            });
        }
        let d1 = game.marginal(i, &one);
        if d1 < Rational::zero() {
            return Err(GameError::OneNotEquilibrium {
                player: i,
                delta: d1,
            });
        }
    }
    Ok(())
}

/// A small game given by an explicit marginal table.
///
/// Row `i` holds `2^(n−1)` values indexed by the actions of the other
/// players in increasing player order (bit `k` is the `k`-th other player).
#[derive(Debug, Clone, PartialEq)]
pub struct TableGame {
    n: usize,
    table: Vec<Vec<Rational>>,
}

impl TableGame {
    pub const MAX_PLAYERS: usize = EXHAUSTIVE_MAX_PLAYERS;

    /// Builds and validates the extremal-equilibrium assumption.
    pub fn new(table: Vec<Vec<Rational>>) -> Result<Self, GameError> {
        let game = Self::new_unchecked(table)?;
        validate_extremal(&game)?;
        Ok(game)
    }

    /// Shape checks only; the extremal equilibria are not enforced.
    pub fn new_unchecked(table: Vec<Vec<Rational>>) -> Result<Self, GameError> {
        let n = table.len();
        if n == 0 {
            return Err(GameError::NoPlayers);
        }
        if n > Self::MAX_PLAYERS {
            return Err(GameError::TooLarge {
                n,
                limit: Self::MAX_PLAYERS,
            });
        }
        let row_len = 1usize << (n - 1);
        for (i, row) in table.iter().enumerate() {
            if row.len() != row_len {
                return Err(GameError::Table(format!(
                    "row {i} has {} entries, expected {row_len}",
                    row.len()
                )));
            }
        }
        Ok(TableGame { n, table })
    }

    /// Random super-modular fixture: draws integer marginals in
    /// `[-spread, spread]` and assigns them in sorted order along the
    /// numeric order of the others' bitmask, a linear extension of the
    /// subset lattice. The extreme entries are clamped so that both `𝟘` and
    /// `𝟙` are equilibria.
    pub fn random_supermodular<R: Rng + ?Sized>(n: usize, spread: i64, rng: &mut R) -> Self {
        assert!((1..=Self::MAX_PLAYERS).contains(&n));
        let row_len = 1usize << (n - 1);
        let table = (0..n)
            .map(|_| {
                let mut row: Vec<i64> = (0..row_len)
                    .map(|_| rng.random_range(-spread..=spread))
                    .collect();
                row.sort_unstable();
                if row[0] > 0 {
                    row[0] = 0;
                }
                if row[row_len - 1] < 0 {
                    row[row_len - 1] = 0;
                }
                row.into_iter().map(Rational::from_integer).collect()
            })
            .collect();
        TableGame::new(table).expect("generator produces valid tables")
    }

    pub fn table(&self) -> &[Vec<Rational>] {
        &self.table
    }

    #[inline]
    fn index(&self, i: usize, x: &Profile) -> usize {
        let mask = x.to_mask() as usize;
        let low = mask & ((1usize << i) - 1);
        let high = (mask >> (i + 1)) << i;
        low | high
    }
}

impl Game for TableGame {
    fn num_players(&self) -> usize {
        self.n
    }

    fn marginal(&self, player: usize, x: &Profile) -> Rational {
        self.table[player][self.index(player, x)]
    }

    fn kind(&self) -> GameKind {
        GameKind::Table
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(v: i64) -> Rational {
        Rational::from_integer(v)
    }

    #[test]
    fn table_index_skips_own_bit() {
        // n = 3, player 1: others are (0, 2) -> bits (0, 1).
        let g = TableGame::new(vec![
            vec![r(-1), r(0), r(0), r(1)],
            vec![r(-3), r(-2), r(-1), r(5)],
            vec![r(-1), r(0), r(0), r(1)],
        ])
        .unwrap();
        let x = Profile::from_bits(&[true, false, true]);
        assert_eq!(g.marginal(1, &x), r(5));
        assert_eq!(g.marginal(1, &x.with(1, true)), r(5));
        let x = Profile::from_bits(&[false, true, true]);
        assert_eq!(g.marginal(1, &x), r(-1));
    }

    #[test]
    fn constructed_violation_is_not_supermodular() {
        // Player 0's marginal drops when player 1 raises.
        let g = TableGame::new(vec![vec![r(0), r(-1)], vec![r(-1), r(1)]]);
        // 𝟙 gives player 0 Δ = -1, so also reject via the extremal check.
        assert!(matches!(g, Err(GameError::OneNotEquilibrium { player: 0, .. })));
        let g = TableGame::new_unchecked(vec![vec![r(0), r(-1)], vec![r(-1), r(1)]]).unwrap();
        assert!(!check_supermodular(&g).unwrap());
        assert!(!check_extremal_equilibria(&g));

        let g = TableGame::new(vec![
            vec![r(-1), r(2), r(1), r(0)],
            vec![r(-1), r(0), r(0), r(1)],
            vec![r(-1), r(0), r(0), r(1)],
        ])
        .unwrap();
        assert!(!check_supermodular(&g).unwrap());
    }

    #[test]
    fn generated_tables_are_supermodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=7 {
            for _ in 0..5 {
                let g = TableGame::random_supermodular(n, 5, &mut rng);
                assert!(check_supermodular(&g).unwrap());
                assert!(check_extremal_equilibria(&g));
            }
        }
    }

    #[test]
    fn best_response_follows_sign_exhaustively() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = TableGame::random_supermodular(5, 3, &mut rng);
        for mask in 0..32 {
            let x = Profile::from_mask(5, mask);
            for i in 0..5 {
                let d = marginal_utility(&g, i, &x).unwrap();
                let br = best_response(&g, i, &x).unwrap();
                assert_eq!(br.contains(true), d >= Rational::zero());
                assert_eq!(br.contains(false), d <= Rational::zero());
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = TableGame::new(vec![vec![r(0), r(0)], vec![r(0), r(0)]]).unwrap();
        assert!(matches!(
            marginal_utility(&g, 2, &Profile::zeros(2)),
            Err(GameError::PlayerOutOfRange { index: 2, n: 2 })
        ));
        assert!(matches!(
            best_response(&g, 0, &Profile::zeros(3)),
            Err(GameError::ProfileLength { .. })
        ));
        assert!(TableGame::new(vec![vec![r(0)], vec![r(0), r(0)]]).is_err());
    }

    #[test]
    fn exhaustive_check_has_size_limit() {
        struct Big;
        impl Game for Big {
            fn num_players(&self) -> usize {
                13
            }
            fn marginal(&self, _: usize, _: &Profile) -> Rational {
                Rational::zero()
            }
        }
        assert!(matches!(
            check_supermodular(&Big),
            Err(GameError::TooLarge { n: 13, .. })
        ));
    }
}
