//! The ε-chain over strategy profiles.
//!
//! At each step a player `i` is drawn uniformly. If `Δ_i(x) < 0` nothing
//! happens. Otherwise a player at 1 switches to 0, and a player at 0 switches
//! to 1 with probability ε. Started at `𝟙`, the chain never leaves the set
//! `Z` of profiles reachable by downward moves alone, is reversible there
//! with stationary law `ε^‖x‖₁ / K_ε`, and concentrates on minimum-norm
//! profiles (the optimal sufficient control sets) as ε → 0.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::game::Game;
use crate::par::{map_collect, Execution};
use crate::profile::{PlayerSet, Profile};
use crate::rational::{big_pow, to_big, Rational};
use crate::rng::{derive_seed, ChainRng};

/// Largest player count for explicit enumeration of `Z`.
pub const EXACT_MAX_PLAYERS: usize = 16;
/// Largest `|Z|` for which a transition matrix is built.
pub const MATRIX_MAX_STATES: usize = 4096;
/// Largest `|Z|` for the exact rational stationary solve.
pub const EXACT_SOLVE_MAX_STATES: usize = 512;
/// Number of points kept in a cardinality trace.
pub const TRACE_POINTS: u64 = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("epsilon {0} must lie in [0, 1]")]
    Epsilon(String),
    #[error("step budget must be at least 1")]
    NoSteps,
    #[error("start profile has length {got}, expected {expected}")]
    StartLength { got: usize, expected: usize },
    #[error("{what} too large: {size} exceeds the limit of {limit}")]
    TooLarge { what: &'static str, size: usize, limit: usize },
    #[error("transition from {from} leaves the reachable set (to {to})")]
    NotInvariant { from: String, to: String },
    #[error("transition matrix is reducible")]
    Reducible,
    #[error("singular system in stationary solve")]
    Singular,
}

/// Parameters of one chain run.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub epsilon: Rational,
    pub steps: u64,
    pub seed: u64,
    /// Defaults to `𝟙`.
    pub start: Option<Profile>,
    /// Count visits per state (small games only).
    pub record_visits: bool,
}

impl ChainConfig {
    pub const DEFAULT_EPSILON: (i64, i64) = (3, 10);

    /// ε = 3/10 and `100·n²` steps from `𝟙`.
    pub fn protocol(n: usize, seed: u64) -> Self {
        ChainConfig {
            epsilon: Rational::new(Self::DEFAULT_EPSILON.0, Self::DEFAULT_EPSILON.1),
            steps: Self::default_steps(n),
            seed,
            start: None,
            record_visits: false,
        }
    }

    pub fn default_steps(n: usize) -> u64 {
        100 * (n as u64) * (n as u64)
    }

    fn validate(&self, n: usize) -> Result<(), ChainError> {
        check_epsilon(&self.epsilon)?;
        if self.steps == 0 {
            return Err(ChainError::NoSteps);
        }
        if let Some(s) = &self.start {
            if s.len() != n {
                return Err(ChainError::StartLength { got: s.len(), expected: n });
            }
        }
        Ok(())
    }
}

fn check_epsilon(eps: &Rational) -> Result<(), ChainError> {
    if *eps < Rational::zero() || *eps > Rational::one() {
        return Err(ChainError::Epsilon(crate::rational::format_rational(eps)));
    }
    Ok(())
}

/// Summary of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRun {
    /// First visited profile of minimum norm.
    pub best_profile: Profile,
    pub best_step: u64,
    /// `(step, ‖x‖₁)` every `⌈steps / 10⁴⌉` steps, plus the final step.
    pub cardinality_trace: Vec<(u64, usize)>,
    /// Per-state visit counts over steps `1..=steps` when requested.
    pub visits: Option<HashMap<Profile, u64>>,
    pub final_profile: Profile,
    pub seed: u64,
}

impl ChainRun {
    pub fn best_set(&self) -> PlayerSet {
        self.best_profile.support()
    }

    pub fn best_size(&self) -> usize {
        self.best_profile.count_ones()
    }
}

/// One transition applied in place. Returns whether the state changed.
#[inline]
pub fn step_in_place<G: Game + ?Sized>(game: &G, x: &mut Profile, rng: &mut ChainRng, epsilon: &Rational) -> bool {
    let i = rng.player(game.num_players());
    if game.marginal_sign(i, x) == Ordering::Less {
        return false;
    }
    if x.get(i) {
        x.set(i, false);
        true
    } else if rng.coin(*epsilon.numer(), *epsilon.denom()) {
        x.set(i, true);
        true
    } else {
        false
    }
}

/// One transition of the ε-chain from `x`.
pub fn chain_step<G: Game + ?Sized>(game: &G, x: &Profile, rng: &mut ChainRng, epsilon: &Rational) -> Profile {
    let mut y = x.clone();
    step_in_place(game, &mut y, rng, epsilon);
    y
}

/// Simulates `cfg.steps` transitions and keeps the minimum-norm profile seen.
pub fn run_search<G: Game + ?Sized>(game: &G, cfg: &ChainConfig) -> Result<ChainRun, ChainError> {
    let n = game.num_players();
    cfg.validate(n)?;
    let mut rng = ChainRng::new(cfg.seed);
    let mut x = cfg.start.clone().unwrap_or_else(|| Profile::ones(n));
    let mut norm = x.count_ones();
    let mut best = x.clone();
    let mut best_norm = norm;
    let mut best_step = 0;
    let stride = cfg.steps.div_ceil(TRACE_POINTS).max(1);
    let mut trace = vec![(0, norm)];
    let mut visits = cfg.record_visits.then(HashMap::new);
    for t in 1..=cfg.steps {
        if step_in_place(game, &mut x, &mut rng, &cfg.epsilon) {
            norm = x.count_ones();
            if norm < best_norm {
                best_norm = norm;
                best = x.clone();
                best_step = t;
            }
        }
        if let Some(v) = visits.as_mut() {
            *v.entry(x.clone()).or_insert(0) += 1;
        }
        if t % stride == 0 || t == cfg.steps {
            trace.push((t, norm));
        }
    }
    Ok(ChainRun {
        best_profile: best,
        best_step,
        cardinality_trace: trace,
        visits,
        final_profile: x,
        seed: cfg.seed,
    })
}

/// Independent runs with seeds derived from `cfg.seed`; the smallest best
/// profile wins, ties going to the lowest restart index.
pub fn run_restarts<G: Game + ?Sized>(game: &G, cfg: &ChainConfig, restarts: usize, exec: Execution) -> Result<Vec<ChainRun>, ChainError> {
    let n = game.num_players();
    cfg.validate(n)?;
    let seeds: Vec<u64> = (0..restarts.max(1) as u64).map(|r| derive_seed(cfg.seed, &[r])).collect();
    map_collect(exec, seeds, |seed| {
        let mut c = cfg.clone();
        c.seed = seed;
        run_search(game, &c)
    })
    .into_iter()
    .collect()
}

/// Picks the best run (smallest norm, then earliest restart).
pub fn best_run(runs: &[ChainRun]) -> Option<&ChainRun> {
    runs.iter().min_by_key(|r| r.best_size())
}

fn check_exact_size(n: usize) -> Result<(), ChainError> {
    if n > EXACT_MAX_PLAYERS {
        return Err(ChainError::TooLarge { what: "player count", size: n, limit: EXACT_MAX_PLAYERS });
    }
    Ok(())
}

/// Profiles reachable from `𝟙` by downward moves (`x_i = 1`, `Δ_i(x) >= 0`).
pub fn reachable_set<G: Game + ?Sized>(game: &G) -> Result<Vec<Profile>, ChainError> {
    let n = game.num_players();
    check_exact_size(n)?;
    let start = Profile::ones(n);
    let mut seen = BTreeSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for i in x.iter_ones().collect::<Vec<_>>() {
            if game.marginal_sign(i, &x) != Ordering::Less {
                let y = x.with(i, false);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Members of `Z` with no available downward move.
pub fn absorbing_set<G: Game + ?Sized>(game: &G) -> Result<Vec<Profile>, ChainError> {
    Ok(reachable_set(game)?
        .into_iter()
        .filter(|x| x.iter_ones().all(|i| game.marginal_sign(i, x) == Ordering::Less))
        .collect())
}

/// Profiles of minimum norm within `states`.
pub fn minimum_norm_profiles(states: &[Profile]) -> Vec<Profile> {
    let min = states.iter().map(Profile::count_ones).min().unwrap_or(0);
    states.iter().filter(|x| x.count_ones() == min).cloned().collect()
}

/// Sparse exact transition matrix of the ε-chain restricted to `Z`.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    pub states: Vec<Profile>,
    pub epsilon: Rational,
    /// Row `a`: `(b, P_ab)` with `b` ascending, self-loop included when nonzero.
    pub rows: Vec<Vec<(usize, BigRational)>>,
}

impl TransitionMatrix {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, a: usize, b: usize) -> BigRational {
        self.rows[a]
            .binary_search_by_key(&b, |(k, _)| *k)
            .map(|pos| self.rows[a][pos].1.clone())
            .unwrap_or_else(|_| BigRational::zero())
    }

    pub fn index_of(&self, x: &Profile) -> Option<usize> {
        self.states.binary_search(x).ok()
    }

    /// Whether every state reaches every other through positive entries.
    pub fn is_irreducible(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return false;
        }
        let mut reverse = vec![Vec::new(); n];
        for (a, row) in self.rows.iter().enumerate() {
            for (b, _) in row {
                reverse[*b].push(a);
            }
        }
        let forward: Vec<Vec<usize>> = self.rows.iter().map(|r| r.iter().map(|(b, _)| *b).collect()).collect();
        let reach_all = |adj: &[Vec<usize>]| {
            let mut seen = vec![false; n];
            seen[0] = true;
            let mut stack = vec![0];
            while let Some(a) = stack.pop() {
                for &b in &adj[a] {
                    if !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach_all(&forward) && reach_all(&reverse)
    }
}

/// Exact transition matrix over `Z` for the given ε.
pub fn transition_matrix<G: Game + ?Sized>(game: &G, epsilon: &Rational) -> Result<TransitionMatrix, ChainError> {
    check_epsilon(epsilon)?;
    let n = game.num_players();
    let states = reachable_set(game)?;
    if states.len() > MATRIX_MAX_STATES {
        return Err(ChainError::TooLarge { what: "reachable set", size: states.len(), limit: MATRIX_MAX_STATES });
    }
    let index: HashMap<&Profile, usize> = states.iter().enumerate().map(|(k, x)| (x, k)).collect();
    let down = BigRational::new(BigInt::one(), BigInt::from(n));
    let up = to_big(epsilon) / BigInt::from(n);
    let mut rows = Vec::with_capacity(states.len());
    for (a, x) in states.iter().enumerate() {
        let mut row: Vec<(usize, BigRational)> = Vec::new();
        let mut out_mass = BigRational::zero();
        for i in 0..n {
            if game.marginal_sign(i, x) == Ordering::Less {
                continue;
            }
            let p = if x.get(i) { down.clone() } else { up.clone() };
            if p.is_zero() {
                continue;
            }
            let y = x.with(i, !x.get(i));
            let b = *index.get(&y).ok_or_else(|| ChainError::NotInvariant { from: x.to_string(), to: y.to_string() })?;
            out_mass += &p;
            row.push((b, p));
        }
        let stay = BigRational::one() - out_mass;
        if !stay.is_zero() {
            row.push((a, stay));
        }
        row.sort_by_key(|(b, _)| *b);
        rows.push(row);
    }
    Ok(TransitionMatrix { states, epsilon: *epsilon, rows })
}

/// `ε^‖x‖₁ / K_ε` over the given states.
pub fn stationary_law(states: &[Profile], epsilon: &Rational) -> Vec<BigRational> {
    let eps = to_big(epsilon);
    let weights: Vec<BigRational> = states.iter().map(|x| big_pow(&eps, x.count_ones())).collect();
    let total: BigRational = weights.iter().fold(BigRational::zero(), |acc, w| acc + w);
    weights.into_iter().map(|w| w / &total).collect()
}

/// Exact stationary vector by rational Gaussian elimination.
pub fn stationary_distribution(p: &TransitionMatrix) -> Result<Vec<BigRational>, ChainError> {
    let n = p.len();
    if n > EXACT_SOLVE_MAX_STATES {
        return Err(ChainError::TooLarge { what: "exact solve", size: n, limit: EXACT_SOLVE_MAX_STATES });
    }
    if !p.is_irreducible() {
        return Err(ChainError::Reducible);
    }
    // Rows of (P − I)^T with the last equation replaced by Σπ = 1.
    let mut a = vec![vec![BigRational::zero(); n + 1]; n];
    for (src, row) in p.rows.iter().enumerate() {
        for (dst, v) in row {
            a[*dst][src] += v;
        }
    }
    for (k, row) in a.iter_mut().enumerate() {
        row[k] -= BigRational::one();
    }
    for v in a[n - 1].iter_mut().take(n) {
        *v = BigRational::one();
    }
    a[n - 1][n] = BigRational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(ChainError::Singular)?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut().skip(col) {
            *v *= &inv;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for c in col..=n {
                if !pivot_row[c].is_zero() {
                    row[c] -= &factor * &pivot_row[c];
                }
            }
        }
    }
    let pi: Vec<BigRational> = a.into_iter().map(|row| row[n].clone()).collect();
    if pi.iter().any(|v| v.is_negative()) {
        return Err(ChainError::Singular);
    }
    Ok(pi)
}

/// Floating-point stationary vector by power iteration on the lazy chain
/// `(P + I) / 2`, stopping when the sup-norm change falls below `tol`.
pub fn stationary_power(p: &TransitionMatrix, tol: f64, max_iter: usize) -> Result<Vec<f64>, ChainError> {
    if !p.is_irreducible() {
        return Err(ChainError::Reducible);
    }
    let n = p.len();
    let rows: Vec<Vec<(usize, f64)>> = p
        .rows
        .iter()
        .map(|r| r.iter().map(|(b, v)| (*b, crate::rational::big_to_f64(v))).collect())
        .collect();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..max_iter {
        let mut next: Vec<f64> = pi.iter().map(|v| 0.5 * v).collect();
        for (a, row) in rows.iter().enumerate() {
            for &(b, v) in row {
                next[b] += 0.5 * pi[a] * v;
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        let delta = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        pi = next;
        if delta < tol {
            break;
        }
    }
    Ok(pi)
}

/// Checks `ε^‖x‖₁ P_xy = ε^‖y‖₁ P_yx` for every pair; returns the first violating pair.
pub fn detailed_balance_violation(p: &TransitionMatrix) -> Option<(usize, usize)> {
    let eps = to_big(&p.epsilon);
    let weight: Vec<BigRational> = p.states.iter().map(|x| big_pow(&eps, x.count_ones())).collect();
    for (a, row) in p.rows.iter().enumerate() {
        for (b, v) in row {
            if &weight[a] * v != &weight[*b] * p.get(*b, a) {
                return Some((a, *b));
            }
        }
    }
    // Entries zero in row a but nonzero in row b are caught from row b.
    None
}
