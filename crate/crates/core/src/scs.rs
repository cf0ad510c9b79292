//! Sufficient control sets: the monotone cascade verifier, the exhaustive
//! optimal-set oracle and the cohesiveness cross-check.
//!
//! A set `S` is sufficient when forcing `S` to 1 admits an improvement path
//! to `𝟙`. In a super-modular game it is enough to look at monotone paths,
//! so the check is the closure of weak-improvement `0 → 1` flips from `𝟙_S`.

use std::cmp::Ordering;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use thiserror::Error;

use crate::coordination::CoordinationGame;
use crate::game::Game;
use crate::graph::{uniformly_at_most_cohesive, GraphError, WeightedGraph};
use crate::par::{map_collect, Execution};
use crate::profile::{PlayerSet, Profile};
use crate::rational::Rational;

/// Largest number of candidate sets the oracle will enumerate.
pub const ORACLE_MAX_CANDIDATES: u128 = 20_000_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScsError {
    #[error("player {index} out of range for a game with {n} players")]
    PlayerOutOfRange { index: usize, n: usize },
    #[error("oracle too large: {candidates} candidate sets for n = {n}, budget = {budget}")]
    TooLarge { n: usize, budget: usize, candidates: u128 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Outcome of the lowest-index cascade from a seed set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeResult {
    pub final_set: PlayerSet,
    /// Players in the order they switched to 1.
    pub witness: Vec<usize>,
    pub sufficient: bool,
    /// Best-response evaluations performed.
    pub evaluations: usize,
}

fn check_seed<G: Game + ?Sized>(game: &G, seed: &PlayerSet) -> Result<(), ScsError> {
    let n = game.num_players();
    match seed.max_player() {
        Some(i) if i >= n => Err(ScsError::PlayerOutOfRange { index: i, n }),
        _ => Ok(()),
    }
}

/// Starting at `𝟙_seed`, repeatedly switches the lowest-index player with
/// `x_i = 0` and `Δ_i(x) >= 0` to 1 until no such player exists.
pub fn cascade<G: Game + ?Sized>(game: &G, seed: &PlayerSet) -> Result<CascadeResult, ScsError> {
    check_seed(game, seed)?;
    let n = game.num_players();
    let mut x = Profile::indicator(n, seed);
    let mut witness = Vec::new();
    let mut evaluations = 0;

    if n > 0 && game.dependents(0).is_some() {
        // Event-driven: only dependents of a switched player are re-examined.
        let mut heap = BinaryHeap::new();
        let mut queued = vec![false; n];
        for (i, q) in queued.iter_mut().enumerate() {
            if !x.get(i) {
                evaluations += 1;
                if game.marginal_sign(i, &x) != Ordering::Less {
                    heap.push(Reverse(i));
                    *q = true;
                }
            }
        }
        while let Some(Reverse(i)) = heap.pop() {
            queued[i] = false;
            evaluations += 1;
            if game.marginal_sign(i, &x) == Ordering::Less {
                continue;
            }
            x.set(i, true);
            witness.push(i);
            let deps = game.dependents(i).unwrap_or(&[]);
            for &d in deps {
                if !x.get(d) && !queued[d] {
                    evaluations += 1;
                    if game.marginal_sign(d, &x) != Ordering::Less {
                        heap.push(Reverse(d));
                        queued[d] = true;
                    }
                }
            }
        }
    } else {
        // Generic games: scan from the lowest index after every switch. At
        // most (n−s)(n−s+1)/2 evaluations.
        'outer: loop {
            for i in 0..n {
                if x.get(i) {
                    continue;
                }
                evaluations += 1;
                if game.marginal_sign(i, &x) != Ordering::Less {
                    x.set(i, true);
                    witness.push(i);
                    continue 'outer;
                }
            }
            break;
        }
    }
    let sufficient = x.is_all_ones();
    Ok(CascadeResult {
        final_set: x.support(),
        witness,
        sufficient,
        evaluations,
    })
}

/// Whether `s` is a sufficient control set.
pub fn is_sufficient<G: Game + ?Sized>(game: &G, s: &PlayerSet) -> Result<bool, ScsError> {
    Ok(cascade(game, s)?.sufficient)
}

/// Switches `start` to 1 in a cascade-closed profile and restores closure.
/// Flip order is irrelevant for super-modular games. Returns the new `‖x‖₁`.
pub(crate) fn extend_closure<G: Game + ?Sized>(game: &G, x: &mut Profile, mut ones: usize, start: usize) -> usize {
    let n = game.num_players();
    if !x.get(start) {
        x.set(start, true);
        ones += 1;
    }
    if game.dependents(start).is_some() {
        let mut stack = vec![start];
        while let Some(j) = stack.pop() {
            for &d in game.dependents(j).unwrap_or(&[]) {
                if !x.get(d) && game.marginal_sign(d, x) != Ordering::Less {
                    x.set(d, true);
                    ones += 1;
                    stack.push(d);
                }
            }
        }
    } else {
        loop {
            let mut changed = false;
            for i in 0..n {
                if !x.get(i) && game.marginal_sign(i, x) != Ordering::Less {
                    x.set(i, true);
                    ones += 1;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
    ones
}

/// Closure of `𝟙_seed` under weak-improvement flips, in any order.
pub(crate) fn closure_of<G: Game + ?Sized>(game: &G, seed: &PlayerSet) -> (Profile, usize) {
    let n = game.num_players();
    let mut x = Profile::indicator(n, seed);
    let mut ones = seed.len();
    for i in 0..n {
        if !x.get(i) && game.marginal_sign(i, &x) != Ordering::Less {
            ones = extend_closure(game, &mut x, ones, i);
        }
    }
    (x, ones)
}

/// Result of the exhaustive search for optimal sufficient control sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    /// Minimum cardinality and the sets attaining it (all of them, or the
    /// lexicographically first in first-witness mode).
    Found { min_size: usize, witnesses: Vec<PlayerSet> },
    /// No sufficient set of size `<= budget`; the optimum is unknown.
    NoneWithinBudget { budget: usize },
}

impl OracleOutcome {
    pub fn min_size(&self) -> Option<usize> {
        match self {
            OracleOutcome::Found { min_size, .. } => Some(*min_size),
            OracleOutcome::NoneWithinBudget { .. } => None,
        }
    }

    pub fn witnesses(&self) -> &[PlayerSet] {
        match self {
            OracleOutcome::Found { witnesses, .. } => witnesses,
            OracleOutcome::NoneWithinBudget { .. } => &[],
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of sets of size `<= budget` over `n` players.
pub fn oracle_candidates(n: usize, budget: usize) -> u128 {
    (0..=budget.min(n)).map(|k| binomial(n, k)).sum()
}

/// Exhaustive optimum: enumerates sets by ascending cardinality, stops at the
/// first cardinality with a sufficient set and returns every set of that size.
pub fn optimal_oracle<G: Game + ?Sized>(game: &G, budget: usize, exec: Execution) -> Result<OracleOutcome, ScsError> {
    run_oracle(game, budget, exec, false)
}

/// Like [`optimal_oracle`] but returns only the lexicographically first
/// witness at the optimal cardinality.
pub fn first_optimal_set<G: Game + ?Sized>(game: &G, budget: usize, exec: Execution) -> Result<OracleOutcome, ScsError> {
    run_oracle(game, budget, exec, true)
}

fn run_oracle<G: Game + ?Sized>(game: &G, budget: usize, exec: Execution, first_only: bool) -> Result<OracleOutcome, ScsError> {
    let n = game.num_players();
    let budget = budget.min(n);
    let candidates = oracle_candidates(n, budget);
    if candidates > ORACLE_MAX_CANDIDATES {
        return Err(ScsError::TooLarge { n, budget, candidates });
    }
    let (base, base_ones) = closure_of(game, &PlayerSet::empty());
    if base_ones == n {
        return Ok(OracleOutcome::Found { min_size: 0, witnesses: vec![PlayerSet::empty()] });
    }
    for k in 1..=budget {
        let witnesses = level(game, &base, base_ones, k, exec, first_only);
        if !witnesses.is_empty() {
            return Ok(OracleOutcome::Found { min_size: k, witnesses });
        }
    }
    Ok(OracleOutcome::NoneWithinBudget { budget })
}

struct Search<'a, G: ?Sized> {
    game: &'a G,
    n: usize,
    first_only: bool,
    // Lowest top-level branch that has produced a witness (first-only mode).
    found_branch: &'a AtomicUsize,
    branch: usize,
}

impl<G: Game + ?Sized> Search<'_, G> {
    fn stop(&self) -> bool {
        self.first_only && self.found_branch.load(AtomicOrdering::Relaxed) < self.branch
    }

    // `x` is closed; every set of size < k is known to be insufficient, so a
    // candidate already inside the closure makes the set non-minimal.
    fn dfs(&self, x: &Profile, ones: usize, start: usize, remaining: usize, chosen: &mut Vec<usize>, out: &mut Vec<PlayerSet>) {
        if remaining == 0 {
            if ones == self.n {
                out.push(PlayerSet::new(chosen.clone()));
                if self.first_only {
                    self.found_branch.fetch_min(self.branch, AtomicOrdering::Relaxed);
                }
            }
            return;
        }
        for j in start..=self.n - remaining {
            if x.get(j) {
                continue;
            }
            if self.stop() || (self.first_only && !out.is_empty()) {
                return;
            }
            let mut y = x.clone();
            let ones2 = extend_closure(self.game, &mut y, ones, j);
            chosen.push(j);
            self.dfs(&y, ones2, j + 1, remaining - 1, chosen, out);
            chosen.pop();
        }
    }
}

fn level<G: Game + ?Sized>(game: &G, base: &Profile, base_ones: usize, k: usize, exec: Execution, first_only: bool) -> Vec<PlayerSet> {
    let n = game.num_players();
    let found_branch = AtomicUsize::new(usize::MAX);
    let branches: Vec<usize> = (0..=n - k).filter(|&j| !base.get(j)).collect();
    let per_branch = map_collect(exec, branches, |j| {
        let search = Search { game, n, first_only, found_branch: &found_branch, branch: j };
        let mut out = Vec::new();
        if search.stop() {
            return out;
        }
        let mut x = base.clone();
        let ones = extend_closure(game, &mut x, base_ones, j);
        let mut chosen = vec![j];
        search.dfs(&x, ones, j + 1, k - 1, &mut chosen, &mut out);
        out
    });
    let mut all: Vec<PlayerSet> = per_branch.into_iter().flatten().collect();
    if first_only {
        all.truncate(1);
    }
    all
}

/// Sufficiency via cohesiveness for a homogeneous coordination game with
/// threshold `θ`: `V ∖ S` must be uniformly no more than `(1 − θ)`-cohesive.
pub fn cohesiveness_crosscheck(g: &WeightedGraph, theta: &Rational, s: &PlayerSet) -> Result<bool, ScsError> {
    let n = g.num_nodes();
    if let Some(i) = s.max_player().filter(|&i| i >= n) {
        return Err(ScsError::PlayerOutOfRange { index: i, n });
    }
    let complement = s.complement(n);
    Ok(uniformly_at_most_cohesive(g, &complement, &(Rational::from_integer(1) - theta))?)
}

/// Convenience: the homogeneous game that [`cohesiveness_crosscheck`] mirrors.
pub fn homogeneous_game(g: &WeightedGraph, theta: Rational) -> Option<CoordinationGame> {
    CoordinationGame::homogeneous(g.clone(), theta).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::TableGame;
    use crate::graph::{generate, Family};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn majority(f: Family) -> CoordinationGame {
        CoordinationGame::majority(generate(&f).unwrap())
    }

    fn set(v: &[usize]) -> PlayerSet {
        PlayerSet::new(v.to_vec())
    }

    #[test]
    fn complete_graph_cascades() {
        let g = majority(Family::Complete(5));
        let r = cascade(&g, &set(&[0, 1])).unwrap();
        assert!(r.sufficient);
        assert_eq!(r.witness, vec![2, 3, 4]);
        let r = cascade(&g, &set(&[3])).unwrap();
        assert_eq!(r.final_set, set(&[3]));
        assert!(r.witness.is_empty());
        let r = cascade(&g, &PlayerSet::all(5)).unwrap();
        assert!(r.sufficient && r.witness.is_empty());
        assert!(!is_sufficient(&g, &PlayerSet::empty()).unwrap());
        assert!(matches!(cascade(&g, &set(&[5])), Err(ScsError::PlayerOutOfRange { .. })));
    }

    #[test]
    fn ring_cascades() {
        let g = majority(Family::Ring(4));
        assert!(is_sufficient(&g, &set(&[0])).unwrap());
        assert!(is_sufficient(&g, &set(&[0, 2])).unwrap());
        // Lowest-index order: 1 (tie with neighbour 0), then 2, then 3.
        assert_eq!(cascade(&g, &set(&[0])).unwrap().witness, vec![1, 2, 3]);
    }

    /// Replays the witness and checks every switch was a weak improvement.
    fn replay_ok<G: Game>(g: &G, seed: &PlayerSet, r: &CascadeResult) -> bool {
        let mut x = Profile::indicator(g.num_players(), seed);
        let mut seen = std::collections::HashSet::new();
        for &i in &r.witness {
            if seed.contains(i) || !seen.insert(i) || g.marginal_sign(i, &x) == Ordering::Less {
                return false;
            }
            x.set(i, true);
        }
        x.support() == r.final_set && r.sufficient == (r.final_set.len() == g.num_players())
    }

    #[test]
    fn witnesses_replay_on_table_games() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.random_range(2..=9);
            let g = TableGame::random_supermodular(n, 4, &mut rng);
            for mask in 0u64..(1 << n) {
                let seed = Profile::from_mask(n, mask).support();
                let r = cascade(&g, &seed).unwrap();
                assert!(replay_ok(&g, &seed, &r));
                let free = n - seed.len();
                assert!(r.evaluations <= free * (free + 1) / 2, "{} > bound", r.evaluations);
                let (closed, ones) = closure_of(&g, &seed);
                assert_eq!(closed.support(), r.final_set);
                assert_eq!(ones, r.final_set.len());
            }
        }
    }

    /// Cascade with an arbitrary (random) choice among eligible players.
    fn random_order_closure<G: Game, R: Rng>(g: &G, seed: &PlayerSet, rng: &mut R) -> PlayerSet {
        let n = g.num_players();
        let mut x = Profile::indicator(n, seed);
        loop {
            let mut eligible: Vec<usize> = (0..n)
                .filter(|&i| !x.get(i) && g.marginal_sign(i, &x) != Ordering::Less)
                .collect();
            if eligible.is_empty() {
                return x.support();
            }
            eligible.shuffle(rng);
            x.set(eligible[0], true);
        }
    }

    #[test]
    fn cascade_is_confluent_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let n = rng.random_range(3..=12);
            let g = TableGame::random_supermodular(n, 3, &mut rng);
            for _ in 0..10 {
                let seed: PlayerSet = (0..n).filter(|_| rng.random_bool(0.25)).collect();
                let base = cascade(&g, &seed).unwrap().final_set;
                for _ in 0..20 {
                    assert_eq!(random_order_closure(&g, &seed, &mut rng), base);
                }
                let sup: PlayerSet = seed.union(&(0..n).filter(|_| rng.random_bool(0.3)).collect());
                let big = cascade(&g, &sup).unwrap();
                assert!(base.is_subset(&big.final_set));
            }
        }
    }

    #[test]
    fn oracle_small_families() {
        for n in 4..=8 {
            let out = optimal_oracle(&majority(Family::Complete(n)), n, Execution::Sequential).unwrap();
            assert_eq!(out.min_size(), Some(n / 2));
            // every ⌊n/2⌋-set is optimal
            assert_eq!(out.witnesses().len() as u128, binomial(n, n / 2));
        }
        let ring = majority(Family::Ring(6));
        let out = optimal_oracle(&ring, 6, Execution::Parallel).unwrap();
        assert_eq!(out.min_size(), Some(1));
        assert_eq!(out.witnesses().len(), 6);
        let out = optimal_oracle(&majority(Family::Complete(6)), 2, Execution::Sequential).unwrap();
        assert_eq!(out, OracleOutcome::NoneWithinBudget { budget: 2 });
    }

    #[test]
    fn oracle_grid_anti_diagonal() {
        let g = majority(Family::Grid { k: 5, d: 2 });
        let anti = crate::graph::grid_level_set(5, 2, 4);
        assert_eq!(anti.len(), 5);
        assert!(is_sufficient(&g, &anti).unwrap());
        // Weak ties let a corner plus an interior node do better than the
        // anti-diagonal: optima are 2, 3, 4 for k = 3, 4, 5.
        for (k, best) in [(3, 2), (4, 3), (5, 4)] {
            let g = majority(Family::Grid { k, d: 2 });
            let out = first_optimal_set(&g, k, Execution::Parallel).unwrap();
            assert_eq!(out.min_size(), Some(best));
        }
        assert!(is_sufficient(&majority(Family::Grid { k: 3, d: 2 }), &set(&[0, 4])).unwrap());
    }

    #[test]
    fn oracle_tree_example() {
        // Root 0 with children 1, 2; 1 has children 3 (with leaf 7) and leaf 4;
        // 2 has children 5 (with leaves 8, 9) and leaf 6.
        let parents = vec![None, Some(0), Some(0), Some(1), Some(1), Some(2), Some(2), Some(3), Some(5), Some(5)];
        let g = majority(Family::Tree(parents));
        let highlighted = set(&[1, 5]);
        assert!(is_sufficient(&g, &highlighted).unwrap());
        assert!(is_sufficient(&g, &set(&[4, 6, 7, 8, 9])).unwrap());
        assert!(is_sufficient(&g, &set(&[1, 2, 3, 5])).unwrap());
        let out = optimal_oracle(&g, 10, Execution::Sequential).unwrap();
        assert_eq!(out.min_size(), Some(2));
        assert!(out.witnesses().contains(&highlighted));
    }

    #[test]
    fn oracle_witnesses_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let n = rng.random_range(3..=10);
            let g = TableGame::random_supermodular(n, 3, &mut rng);
            let out = optimal_oracle(&g, n, Execution::Parallel).unwrap();
            let m = out.min_size().unwrap();
            let mut expected = Vec::new();
            for mask in 0u64..(1 << n) {
                let s = Profile::from_mask(n, mask).support();
                let ok = is_sufficient(&g, &s).unwrap();
                if s.len() + 1 == m {
                    assert!(!ok);
                }
                if s.len() < m {
                    assert!(!ok);
                }
                if s.len() == m && ok {
                    expected.push(s);
                }
            }
            expected.sort();
            let mut got = out.witnesses().to_vec();
            got.sort();
            assert_eq!(got, expected);
            let first = first_optimal_set(&g, n, Execution::Parallel).unwrap();
            assert_eq!(first.witnesses(), &expected[..1]);
        }
    }

    #[test]
    fn cohesiveness_examples() {
        let k5 = generate(&Family::Complete(5)).unwrap();
        let half = Rational::new(1, 2);
        assert!(cohesiveness_crosscheck(&k5, &half, &set(&[0, 1])).unwrap());
        assert!(is_sufficient(&homogeneous_game(&k5, half).unwrap(), &set(&[0, 1])).unwrap());
        let ring = generate(&Family::Ring(4)).unwrap();
        assert!(cohesiveness_crosscheck(&ring, &half, &set(&[0])).unwrap());
        let tri = generate(&Family::Complete(3)).unwrap();
        assert!(!cohesiveness_crosscheck(&tri, &half, &PlayerSet::empty()).unwrap());
    }
}
