//! Closed-form minimum control sets for coordination games on `K_n`.
//!
//! On the complete graph a player at 0 switches once `k/(n−1) ≥ θ_i`, where
//! `k` counts the players already at 1, so the game is described entirely by
//! the threshold distribution `F(z) = |{i : θ_i ≤ z}| / n`. Seeding the
//! players with the largest thresholds is optimal, and the cascade from `M`
//! seeds completes iff `#{θ ≤ k/(n−1)} ≥ k + 1 − M` for every `k < n`, giving
//!
//! ```text
//! M = max(0, max_{0≤k<n} (k + 1 − n·F(k/(n−1))))
//! ```
//!
//! The continuum quantity `⌈n·sup_z [z − F(z)]₊⌉` is kept alongside for
//! comparison; it is a bound in the large-n limit but can overshoot by one at
//! finite `n` when a threshold sits exactly on a grid point `k/(n−1)`.

use std::cmp::Reverse;

use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::coordination::{CoordinationError, CoordinationGame};
use crate::graph::{generate, parse_rational_lines, Family, GraphError};
use crate::par::Execution;
use crate::profile::PlayerSet;
use crate::rational::{format_rational, is_unit_interval, Rational};
use crate::scs::{is_sufficient, optimal_oracle, ScsError};

/// Largest `n` for the oracle cross-check.
pub const CROSSCHECK_MAX_PLAYERS: usize = 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompleteGraphError {
    #[error("at least two players are required, got {0}")]
    TooFewPlayers(usize),
    #[error("threshold {theta} of player {player} is outside [0, 1]")]
    ThresholdOutOfRange { player: usize, theta: String },
    #[error("argument {0} is outside [0, 1]")]
    Domain(String),
    #[error("cross-check needs n <= {limit}, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("analytic and oracle results disagree: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Parse(#[from] GraphError),
    #[error(transparent)]
    Game(#[from] CoordinationError),
    #[error(transparent)]
    Scs(#[from] ScsError),
}

/// Per-player thresholds with a sorted copy for counting.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdDistribution {
    thetas: Vec<Rational>,
    sorted: Vec<Rational>,
}

impl ThresholdDistribution {
    pub fn new(thetas: Vec<Rational>) -> Result<Self, CompleteGraphError> {
        if thetas.len() < 2 {
            return Err(CompleteGraphError::TooFewPlayers(thetas.len()));
        }
        if let Some((player, t)) = thetas.iter().enumerate().find(|(_, t)| !is_unit_interval(t)) {
            return Err(CompleteGraphError::ThresholdOutOfRange { player, theta: format_rational(t) });
        }
        let mut sorted = thetas.clone();
        sorted.sort();
        Ok(ThresholdDistribution { thetas, sorted })
    }

    /// One rational per line, `#` comments and blank lines ignored.
    pub fn parse(text: &str) -> Result<Self, CompleteGraphError> {
        Self::new(parse_rational_lines(text)?)
    }

    pub fn n(&self) -> usize {
        self.thetas.len()
    }

    pub fn thetas(&self) -> &[Rational] {
        &self.thetas
    }

    /// `|{i : θ_i ≤ z}|`
    fn count_at_most(&self, z: &Rational) -> usize {
        self.sorted.partition_point(|t| t <= z)
    }

    /// `|{i : θ_i < z}|`
    fn count_below(&self, z: &Rational) -> usize {
        self.sorted.partition_point(|t| t < z)
    }
}

/// `F(z)`, exactly.
pub fn cdf(d: &ThresholdDistribution, z: &Rational) -> Result<Rational, CompleteGraphError> {
    if !is_unit_interval(z) {
        return Err(CompleteGraphError::Domain(format_rational(z)));
    }
    Ok(Rational::new(d.count_at_most(z) as i64, d.n() as i64))
}

/// `sup_{z∈[0,1]} [z − F(z)]₊`.
///
/// Between jumps `z − F(z)` increases, so the supremum is approached at the
/// left limit of some threshold (`θ − F(θ⁻)`) or reached at `z = 1`.
pub fn sup_gap(d: &ThresholdDistribution) -> Rational {
    let n = d.n() as i64;
    let at_one = Rational::one() - Rational::new(d.count_at_most(&Rational::one()) as i64, n);
    d.sorted
        .iter()
        .map(|t| t - Rational::new(d.count_below(t) as i64, n))
        .chain(std::iter::once(at_one))
        .fold(Rational::zero(), |acc, g| acc.max(g))
}

/// `⌈n·sup[z − F(z)]₊⌉`.
pub fn continuum_min_size(d: &ThresholdDistribution) -> usize {
    (sup_gap(d) * d.n() as i64).ceil().to_integer() as usize
}

/// Seeds needed so that the cascade on `K_n` never stalls.
fn discrete_deficit(d: &ThresholdDistribution) -> usize {
    let n = d.n();
    (0..n)
        .map(|k| {
            let z = Rational::new(k as i64, n as i64 - 1);
            (k + 1).saturating_sub(d.count_at_most(&z))
        })
        .max()
        .unwrap_or(0)
}

/// Whether the empty set already triggers a full cascade.
pub fn empty_sufficient(d: &ThresholdDistribution) -> bool {
    discrete_deficit(d) == 0
}

/// The minimum size `M` and the `M` players with the largest thresholds
/// (ties broken by smallest index).
pub fn analytic_min_size(d: &ThresholdDistribution) -> (usize, PlayerSet) {
    let m = discrete_deficit(d);
    let mut order: Vec<usize> = (0..d.n()).collect();
    order.sort_by_key(|&i| (Reverse(d.thetas[i]), i));
    (m, PlayerSet::new(order[..m].to_vec()))
}

/// The induced coordination game on `K_n`.
pub fn complete_game(d: &ThresholdDistribution) -> Result<CoordinationGame, CompleteGraphError> {
    let graph = generate(&Family::Complete(d.n()))?;
    Ok(CoordinationGame::from_thresholds(graph, d.thetas.clone())?)
}

/// Compares [`analytic_min_size`] with the exhaustive oracle on `K_n`.
pub fn crosscheck_complete(d: &ThresholdDistribution, exec: Execution) -> Result<(), CompleteGraphError> {
    let n = d.n();
    if n > CROSSCHECK_MAX_PLAYERS {
        return Err(CompleteGraphError::TooLarge { n, limit: CROSSCHECK_MAX_PLAYERS });
    }
    let game = complete_game(d)?;
    let (m, set) = analytic_min_size(d);
    let oracle = optimal_oracle(&game, n, exec)?.min_size();
    let dump = || {
        let thetas: Vec<String> = d.thetas.iter().map(format_rational).collect();
        format!("thetas=[{}] analytic M={m} set={set} oracle={oracle:?}", thetas.join(", "))
    };
    if oracle != Some(m) {
        return Err(CompleteGraphError::Mismatch(dump()));
    }
    if !is_sufficient(&game, &set)? {
        return Err(CompleteGraphError::Mismatch(format!("analytic set not sufficient: {}", dump())));
    }
    Ok(())
}

/// Thresholds `a/den` for `a` uniform on `0..=den`, as used by randomized checks.
pub fn random_distribution<R: rand::Rng + ?Sized>(n: usize, den: i64, rng: &mut R) -> ThresholdDistribution {
    let den = den.max(1);
    let thetas = (0..n).map(|_| Rational::new(rng.random_range(0..=den), den)).collect();
    ThresholdDistribution::new(thetas).expect("generated thresholds are in range")
}

/// Maximum of `[z − F(z)]₊` over the grid `{0, 1/steps, …, 1}`; a numeric
/// check on [`sup_gap`].
pub fn grid_gap(d: &ThresholdDistribution, steps: i64) -> Rational {
    let n = d.n() as i64;
    let mut best = Rational::zero();
    for k in 0..=steps {
        let z = Rational::new(k, steps);
        best = best.max(z - Rational::new(d.count_at_most(&z) as i64, n));
    }
    best
}

/// Least common multiple of the threshold denominators.
pub fn common_denominator(d: &ThresholdDistribution) -> i64 {
    d.thetas.iter().fold(1i64, |acc, t| acc.lcm(t.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn dist(v: &[(i64, i64)]) -> ThresholdDistribution {
        ThresholdDistribution::new(v.iter().map(|&(a, b)| q(a, b)).collect()).unwrap()
    }

    #[test]
    fn cdf_examples() {
        let d = dist(&[(1, 2); 4]);
        assert_eq!(cdf(&d, &q(1, 2)).unwrap(), q(1, 1));
        let d = dist(&[(1, 10), (3, 10), (1, 2), (7, 10), (9, 10)]);
        assert_eq!(cdf(&d, &q(1, 2)).unwrap(), q(3, 5));
        assert_eq!(cdf(&d, &q(1, 1)).unwrap(), q(1, 1));
        assert!(matches!(cdf(&d, &q(3, 2)), Err(CompleteGraphError::Domain(_))));
    }

    #[test]
    fn empty_sufficient_examples() {
        let n = 6;
        let d = ThresholdDistribution::new((0..n).map(|i| q(i, n)).collect()).unwrap();
        assert!(empty_sufficient(&d));
        assert!(empty_sufficient(&dist(&[(0, 1); 3])));
        // Player 1 switches immediately, which lifts player 0 to fraction 1.
        assert!(empty_sufficient(&dist(&[(1, 1), (0, 1)])));
        assert!(!empty_sufficient(&dist(&[(1, 1), (1, 1)])));
    }

    #[test]
    fn analytic_examples() {
        let d = dist(&[(1, 10), (3, 10), (1, 2), (7, 10), (9, 10)]);
        assert_eq!(sup_gap(&d), q(1, 10));
        assert_eq!(analytic_min_size(&d), (1, PlayerSet::new(vec![4])));
        for n in [4usize, 6, 8] {
            let d = ThresholdDistribution::new(vec![q(1, 2); n]).unwrap();
            let (m, set) = analytic_min_size(&d);
            assert_eq!(m, n / 2);
            assert_eq!(set, PlayerSet::new((0..n / 2).collect()));
        }
        // Odd n: continuum bound overshoots the true optimum by one.
        let d = ThresholdDistribution::new(vec![q(1, 2); 5]).unwrap();
        assert_eq!(continuum_min_size(&d), 3);
        assert_eq!(analytic_min_size(&d).0, 2);
    }

    #[test]
    fn crosscheck_examples() {
        crosscheck_complete(&dist(&[(1, 10), (3, 10), (1, 2), (7, 10), (9, 10)]), Execution::Sequential).unwrap();
        crosscheck_complete(&dist(&[(1, 2); 6]), Execution::Parallel).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let n = rng.random_range(3..=10);
            let den = rng.random_range(1..=12);
            crosscheck_complete(&random_distribution(n, den, &mut rng), Execution::Sequential).unwrap();
        }
    }

    #[test]
    fn parse_and_errors() {
        let d = ThresholdDistribution::parse("# thresholds\n1/2\n0.25\n\n1\n").unwrap();
        assert_eq!(d.thetas(), &[q(1, 2), q(1, 4), q(1, 1)]);
        assert!(matches!(ThresholdDistribution::parse("1/2\nx\n"), Err(CompleteGraphError::Parse(GraphError::Parse { line: 2, .. }))));
        assert_eq!(ThresholdDistribution::new(vec![q(1, 2)]), Err(CompleteGraphError::TooFewPlayers(1)));
        assert!(matches!(
            ThresholdDistribution::new(vec![q(1, 2), q(-1, 2)]),
            Err(CompleteGraphError::ThresholdOutOfRange { player: 1, .. })
        ));
        let big = ThresholdDistribution::new(vec![q(1, 2); 15]).unwrap();
        assert!(matches!(crosscheck_complete(&big, Execution::Sequential), Err(CompleteGraphError::TooLarge { .. })));
    }

    fn distribution() -> impl Strategy<Value = ThresholdDistribution> {
        (1i64..=12, proptest::collection::vec(0i64..=12, 2..=12)).prop_map(|(den, nums)| {
            ThresholdDistribution::new(nums.into_iter().map(|a| q(a.min(den), den)).collect()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sup_gap_bounds_grid_scan(d in distribution()) {
            // A grid containing every threshold denominator cannot exceed the
            // supremum, and gets within one grid cell of it.
            let steps = common_denominator(&d) * 16;
            let grid = grid_gap(&d, steps);
            let sup = sup_gap(&d);
            prop_assert!(grid <= sup);
            prop_assert!(sup - grid <= q(1, steps));
        }

        #[test]
        fn zero_threshold_newcomer_never_raises_m(d in distribution()) {
            let mut thetas = d.thetas().to_vec();
            thetas.push(Rational::zero());
            let bigger = ThresholdDistribution::new(thetas).unwrap();
            prop_assert!(analytic_min_size(&bigger).0 <= analytic_min_size(&d).0);
        }

        #[test]
        fn m_zero_iff_empty_sufficient(d in distribution()) {
            prop_assert_eq!(analytic_min_size(&d).0 == 0, empty_sufficient(&d));
        }

        #[test]
        fn analytic_matches_oracle(d in distribution()) {
            prop_assert!(crosscheck_complete(&d, Execution::Sequential).is_ok());
        }
    }
}
