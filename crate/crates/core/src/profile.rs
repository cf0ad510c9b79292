//! Binary strategy profiles and the player sets they indicate.

use std::fmt;

/// A length-`n` binary action vector, packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    len: usize,
    words: Vec<u64>,
}

impl Profile {
    pub fn zeros(len: usize) -> Self {
        Profile {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut p = Profile::zeros(len);
        for i in 0..len {
            p.set(i, true);
        }
        p
    }

    /// The indicator vector of `set` over `len` players.
    pub fn indicator(len: usize, set: &PlayerSet) -> Self {
        let mut p = Profile::zeros(len);
        for &i in set.iter() {
            p.set(i, true);
        }
        p
    }

    /// Builds a profile from the low `len` bits of `mask` (bit `i` is player `i`).
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64);
        let mut p = Profile::zeros(len);
        if len > 0 {
            p.words[0] = if len == 64 { mask } else { mask & ((1u64 << len) - 1) };
        }
        p
    }

    /// Low-word bitmask; only meaningful for `len <= 64`.
    pub fn to_mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut p = Profile::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            p.set(i, b);
        }
        p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// Returns a copy with player `i`'s action replaced.
    pub fn with(&self, i: usize, value: bool) -> Self {
        let mut p = self.clone();
        p.set(i, value);
        p
    }

    /// `‖x‖₁`
    #[inline]
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_all_ones(&self) -> bool {
        self.count_ones() == self.len
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn iter_zeros(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| !self.get(i))
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Profile) -> bool {
        self.len == other.len
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    pub fn support(&self) -> PlayerSet {
        PlayerSet::from_sorted_unchecked(self.iter_ones().collect())
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Profile({self})")
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A set of players, kept sorted and duplicate free.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlayerSet(Vec<usize>);

impl PlayerSet {
    pub fn new(mut players: Vec<usize>) -> Self {
        players.sort_unstable();
        players.dedup();
        PlayerSet(players)
    }

    pub fn empty() -> Self {
        PlayerSet(Vec::new())
    }

    pub fn all(n: usize) -> Self {
        PlayerSet((0..n).collect())
    }

    pub(crate) fn from_sorted_unchecked(players: Vec<usize>) -> Self {
        PlayerSet(players)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn max_player(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn is_subset(&self, other: &PlayerSet) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    pub fn union(&self, other: &PlayerSet) -> PlayerSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        PlayerSet::new(v)
    }

    /// `V ∖ self` over `n` players.
    pub fn complement(&self, n: usize) -> PlayerSet {
        PlayerSet((0..n).filter(|&i| !self.contains(i)).collect())
    }

    pub fn insert(&mut self, i: usize) -> bool {
        match self.0.binary_search(&i) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, i);
                true
            }
        }
    }

    pub fn remove(&mut self, i: usize) -> bool {
        match self.0.binary_search(&i) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    /// Parses `1,4,7` (or whitespace separated); the empty string is the empty set.
    pub fn parse(text: &str) -> Result<PlayerSet, String> {
        let mut out = Vec::new();
        for tok in text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            out.push(
                tok.parse::<usize>()
                    .map_err(|_| format!("invalid player index `{tok}`"))?,
            );
        }
        Ok(PlayerSet::new(out))
    }
}

impl fmt::Display for PlayerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<usize> for PlayerSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        PlayerSet::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a PlayerSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
