//! The index space Λ: every way of picking an ordered-by-block family of
//! `d_k`-subsets from blocks of sizes `n_k`, for `k = 1..K`.
//!
//! The cardinality `#Λ = ∏ C(n_k, d_k)` explodes quickly, so it is kept both
//! as an exact big integer and as a log-space double (computed from log-gamma
//! sums, never from the big integer). Tuples can be enumerated in
//! lexicographic order, or addressed by rank through the combinatorial
//! number system, which is what makes uniform sampling of tuples possible
//! without enumerating Λ.

use num_bigint::BigUint;
use rand::RngCore as _;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rng::SplitRng;

/// Default guard: refuse to enumerate more than this many tuples unless the
/// caller explicitly overrides.
pub const DEFAULT_ENUMERATION_CAP: u128 = 100_000_000;

/// One element of Λ: per block, a strictly increasing list of `d_k`
/// 0-based indices. Strict monotonicity is the canonical form, so equality
/// of tuples is plain structural equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexTuple {
    blocks: Vec<Vec<usize>>,
}

impl IndexTuple {
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        for (k, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "block {k} of index tuple is empty"
                )));
            }
            if !b.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "block {k} indices {b:?} are not strictly increasing"
                )));
            }
        }
        Ok(IndexTuple { blocks })
    }

    pub(crate) fn from_sorted_unchecked(blocks: Vec<Vec<usize>>) -> Self {
        IndexTuple { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &[usize] {
        &self.blocks[k]
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }
}

/// Per-block Pascal table of binomial coefficients, used by rank/unrank.
/// The u128 form covers everything at practical scale; blocks whose table
/// would overflow u128 fall back to big integers.
#[derive(Debug, Clone)]
enum BlockTable {
    Small { n: usize, d: usize, c: Vec<u128> },
    Big { n: usize, d: usize, c: Vec<BigUint> },
}

impl BlockTable {
    fn build(n: usize, d: usize) -> BlockTable {
        // Pascal recurrence with checked arithmetic; overflow switches the
        // whole block to the BigUint table.
        let cols = d + 1;
        let mut c: Vec<u128> = vec![0; (n + 1) * cols];
        c[0] = 1;
        for m in 1..=n {
            c[m * cols] = 1;
            for t in 1..=d.min(m) {
                let a = c[(m - 1) * cols + t - 1];
                let b = c[(m - 1) * cols + t];
                match a.checked_add(b) {
                    Some(v) => c[m * cols + t] = v,
                    None => return Self::build_big(n, d),
                }
            }
        }
        BlockTable::Small { n, d, c }
    }

    fn build_big(n: usize, d: usize) -> BlockTable {
        let cols = d + 1;
        let mut c: Vec<BigUint> = vec![BigUint::zero(); (n + 1) * cols];
        c[0] = BigUint::from(1u32);
        for m in 1..=n {
            c[m * cols] = BigUint::from(1u32);
            for t in 1..=d.min(m) {
                c[m * cols + t] = &c[(m - 1) * cols + t - 1] + &c[(m - 1) * cols + t];
            }
        }
        BlockTable::Big { n, d, c }
    }

    fn cardinality(&self) -> BigUint {
        match self {
            BlockTable::Small { n, d, c } => BigUint::from(c[n * (d + 1) + d]),
            BlockTable::Big { n, d, c } => c[n * (d + 1) + d].clone(),
        }
    }

    /// Unrank a d-combination of [0, n) in lexicographic order.
    fn unrank(&self, rank: &BigUint) -> Vec<usize> {
        match self {
            BlockTable::Small { n, d, c } => {
                let r = rank.to_u128().expect("block rank below u128 cardinality");
                let cols = d + 1;
                let choose = |m: usize, t: usize| -> u128 {
                    if t > m {
                        0
                    } else {
                        c[m * cols + t]
                    }
                };
                let mut out = Vec::with_capacity(*d);
                let mut rem = r;
                let mut prev: isize = -1;
                for pos in 0..*d {
                    let t = d - pos;
                    let base = choose(n - (prev + 1) as usize, t);
                    // consumed(v) = base - C(n - v, t); smallest v with
                    // consumed(v + 1) > rem.
                    let mut lo = (prev + 1) as usize;
                    let mut hi = n - t;
                    while lo < hi {
                        let mid = lo + (hi - lo) / 2;
                        if base - choose(n - (mid + 1), t) > rem {
                            hi = mid;
                        } else {
                            lo = mid + 1;
                        }
                    }
                    rem -= base - choose(n - lo, t);
                    out.push(lo);
                    prev = lo as isize;
                }
                out
            }
            BlockTable::Big { n, d, c } => {
                let cols = d + 1;
                let zero = BigUint::zero();
                let choose = |m: usize, t: usize| -> &BigUint {
                    if t > m {
                        &zero
                    } else {
                        &c[m * cols + t]
                    }
                };
                let mut out = Vec::with_capacity(*d);
                let mut rem = rank.clone();
                let mut prev: isize = -1;
                for pos in 0..*d {
                    let t = d - pos;
                    let base = choose(n - (prev + 1) as usize, t);
                    let mut lo = (prev + 1) as usize;
                    let mut hi = n - t;
                    while lo < hi {
                        let mid = lo + (hi - lo) / 2;
                        if base - choose(n - (mid + 1), t) > rem {
                            hi = mid;
                        } else {
                            lo = mid + 1;
                        }
                    }
                    rem -= base - choose(n - lo, t);
                    out.push(lo);
                    prev = lo as isize;
                }
                out
            }
        }
    }

    /// Lexicographic rank of a strictly increasing combination.
    fn rank(&self, combo: &[usize]) -> BigUint {
        let (n, d) = match self {
            BlockTable::Small { n, d, .. } => (*n, *d),
            BlockTable::Big { n, d, .. } => (*n, *d),
        };
        debug_assert_eq!(combo.len(), d);
        let mut rank = BigUint::zero();
        let mut prev: isize = -1;
        for (pos, &v) in combo.iter().enumerate() {
            let t = d - pos;
            match self {
                BlockTable::Small { c, .. } => {
                    let cols = d + 1;
                    let choose = |m: usize, tt: usize| -> u128 {
                        if tt > m {
                            0
                        } else {
                            c[m * cols + tt]
                        }
                    };
                    let consumed = choose(n - (prev + 1) as usize, t) - choose(n - v, t);
                    rank += BigUint::from(consumed);
                }
                BlockTable::Big { c, .. } => {
                    let cols = d + 1;
                    let zero = BigUint::zero();
                    let choose = |m: usize, tt: usize| -> &BigUint {
                        if tt > m {
                            &zero
                        } else {
                            &c[m * cols + tt]
                        }
                    };
                    rank += choose(n - (prev + 1) as usize, t) - choose(n - v, t);
                }
            }
            prev = v as isize;
        }
        rank
    }
}

/// The set Λ of valid index tuples for K blocks with sizes `n_k` and
/// degrees `d_k`.
#[derive(Debug, Clone)]
pub struct IndexSpace {
    sizes: Vec<usize>,
    degrees: Vec<usize>,
    tables: Vec<BlockTable>,
    block_cards: Vec<BigUint>,
    cardinality: BigUint,
    cardinality_u128: Option<u128>,
    log_cardinality: f64,
}

impl IndexSpace {
    /// Build the index space; `#Λ = ∏ C(n_k, d_k)` exactly, and
    /// `ln #Λ` from log-gamma sums so it stays finite when the exact count
    /// overflows doubles.
    pub fn build(sizes: &[usize], degrees: &[usize]) -> Result<Self> {
        if sizes.is_empty() || degrees.is_empty() {
            return Err(Error::EmptyProblem);
        }
        if sizes.len() != degrees.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} sizes vs {} degrees",
                sizes.len(),
                degrees.len()
            )));
        }
        for (k, (&n, &d)) in sizes.iter().zip(degrees.iter()).enumerate() {
            if d == 0 || d > n {
                return Err(Error::InvalidDegrees {
                    block: k,
                    degree: d,
                    size: n,
                });
            }
        }
        let tables: Vec<BlockTable> = sizes
            .iter()
            .zip(degrees.iter())
            .map(|(&n, &d)| BlockTable::build(n, d))
            .collect();
        let block_cards: Vec<BigUint> = tables.iter().map(BlockTable::cardinality).collect();
        let mut cardinality = BigUint::from(1u32);
        for c in &block_cards {
            cardinality *= c;
        }
        let cardinality_u128 = cardinality.to_u128();
        let log_cardinality: f64 = sizes
            .iter()
            .zip(degrees.iter())
            .map(|(&n, &d)| log_binomial(n, d))
            .sum();
        Ok(IndexSpace {
            sizes: sizes.to_vec(),
            degrees: degrees.to_vec(),
            tables,
            block_cards,
            cardinality,
            cardinality_u128,
            log_cardinality,
        })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn block_count(&self) -> usize {
        self.sizes.len()
    }

    /// Exact `#Λ`.
    pub fn cardinality(&self) -> &BigUint {
        &self.cardinality
    }

    pub fn cardinality_u128(&self) -> Option<u128> {
        self.cardinality_u128
    }

    /// `#Λ` as a double; +inf when it does not fit.
    pub fn cardinality_f64(&self) -> f64 {
        self.cardinality.to_f64().unwrap_or(f64::INFINITY)
    }

    /// `ln #Λ`, always finite.
    pub fn log_cardinality(&self) -> f64 {
        self.log_cardinality
    }

    /// `ln(1 + #Λ)`, the quantity the deviation bounds consume.
    pub fn log1p_cardinality(&self) -> f64 {
        let c = self.cardinality_f64();
        if c.is_finite() {
            c.ln_1p()
        } else {
            self.log_cardinality + (-self.log_cardinality).exp().ln_1p()
        }
    }

    /// `N = min_k floor(n_k / d_k)`, the effective independent-block count.
    pub fn effective_block_count(&self) -> usize {
        self.sizes
            .iter()
            .zip(self.degrees.iter())
            .map(|(&n, &d)| n / d)
            .min()
            .expect("at least one block")
    }

    /// Check that a tuple is canonical and in range for this space.
    pub fn validate_tuple(&self, tuple: &IndexTuple) -> Result<()> {
        if tuple.block_count() != self.block_count() {
            return Err(Error::DimensionMismatch(format!(
                "tuple has {} blocks, space has {}",
                tuple.block_count(),
                self.block_count()
            )));
        }
        for (k, b) in tuple.blocks().iter().enumerate() {
            if b.len() != self.degrees[k] {
                return Err(Error::DimensionMismatch(format!(
                    "tuple block {k} has {} indices, degree is {}",
                    b.len(),
                    self.degrees[k]
                )));
            }
            if !b.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "tuple block {k} is not strictly increasing: {b:?}"
                )));
            }
            if *b.last().expect("degree >= 1") >= self.sizes[k] {
                return Err(Error::InvalidArgument(format!(
                    "tuple block {k} index {} out of range 0..{}",
                    b.last().unwrap(),
                    self.sizes[k]
                )));
            }
        }
        Ok(())
    }

    /// Tuple at lexicographic rank `r` (block 1 most significant).
    /// Bijective with [`IndexSpace::rank`].
    pub fn unrank(&self, r: &BigUint) -> Result<IndexTuple> {
        if r >= &self.cardinality {
            return Err(Error::RankOutOfRange {
                rank: r.to_string(),
                cardinality: self.cardinality.to_string(),
            });
        }
        let mut rem = r.clone();
        let mut block_ranks = vec![BigUint::zero(); self.block_count()];
        for k in (0..self.block_count()).rev() {
            let card = &self.block_cards[k];
            block_ranks[k] = &rem % card;
            rem /= card;
        }
        let blocks = self
            .tables
            .iter()
            .zip(block_ranks.iter())
            .map(|(t, br)| t.unrank(br))
            .collect();
        Ok(IndexTuple::from_sorted_unchecked(blocks))
    }

    /// Lexicographic rank of a tuple; inverse of [`IndexSpace::unrank`].
    pub fn rank(&self, tuple: &IndexTuple) -> Result<BigUint> {
        self.validate_tuple(tuple)?;
        let mut rank = BigUint::zero();
        for (k, b) in tuple.blocks().iter().enumerate() {
            rank *= &self.block_cards[k];
            rank += self.tables[k].rank(b);
        }
        Ok(rank)
    }

    /// Uniform random rank in `[0, #Λ)`.
    pub fn random_rank(&self, rng: &mut SplitRng) -> BigUint {
        match self.cardinality_u128 {
            Some(c) => BigUint::from(rng.below_u128(c)),
            None => {
                // Rejection from the covering power of two.
                let bits = self.cardinality.bits();
                let words = bits.div_ceil(64) as usize;
                let top_mask: u64 = if bits % 64 == 0 {
                    u64::MAX
                } else {
                    (1u64 << (bits % 64)) - 1
                };
                loop {
                    let mut digits = vec![0u64; words];
                    for d in digits.iter_mut() {
                        *d = rng.next_u64();
                    }
                    digits[words - 1] &= top_mask;
                    let candidate = BigUint::from_slice(
                        &digits
                            .iter()
                            .flat_map(|w| [*w as u32, (*w >> 32) as u32])
                            .collect::<Vec<_>>(),
                    );
                    if candidate < self.cardinality {
                        return candidate;
                    }
                }
            }
        }
    }

    /// Uniform random tuple.
    pub fn random_tuple(&self, rng: &mut SplitRng) -> IndexTuple {
        let r = self.random_rank(rng);
        self.unrank(&r).expect("random rank is in range")
    }
}

/// `ln C(n, k)` in log space. A compensated sum of `ln((n-k+i)/i)` terms
/// rather than a log-gamma difference: the latter cancels two values of
/// order `n ln n` and loses the last digits exactly where the bounds need
/// them.
pub fn log_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for i in 1..=k {
        let term = (((n - k + i) as f64) / (i as f64)).ln();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Lexicographic stream over every element of Λ, each yielded exactly once.
pub struct TupleIter<'a> {
    space: &'a IndexSpace,
    state: Option<Vec<Vec<usize>>>,
}

impl<'a> TupleIter<'a> {
    fn first_combination(d: usize) -> Vec<usize> {
        (0..d).collect()
    }

    fn new(space: &'a IndexSpace) -> Self {
        let state = space
            .degrees
            .iter()
            .map(|&d| Self::first_combination(d))
            .collect();
        TupleIter {
            space,
            state: Some(state),
        }
    }

    fn starting_at(space: &'a IndexSpace, rank: &BigUint) -> Result<Self> {
        let tuple = space.unrank(rank)?;
        Ok(TupleIter {
            space,
            state: Some(tuple.blocks.clone()),
        })
    }

    /// Advance `combo` to its lexicographic successor among d-subsets of
    /// [0, n); returns false (and resets to the first combination) on wrap.
    fn advance_combination(combo: &mut [usize], n: usize) -> bool {
        let d = combo.len();
        let mut j = d;
        while j > 0 {
            j -= 1;
            if combo[j] < n - d + j {
                combo[j] += 1;
                for l in j + 1..d {
                    combo[l] = combo[l - 1] + 1;
                }
                return true;
            }
        }
        for (l, c) in combo.iter_mut().enumerate() {
            *c = l;
        }
        false
    }
}

impl Iterator for TupleIter<'_> {
    type Item = IndexTuple;

    fn next(&mut self) -> Option<IndexTuple> {
        let state = self.state.as_mut()?;
        let item = IndexTuple::from_sorted_unchecked(state.clone());
        // Odometer: last block varies fastest.
        let mut k = self.space.block_count();
        loop {
            if k == 0 {
                self.state = None;
                break;
            }
            k -= 1;
            if Self::advance_combination(&mut state[k], self.space.sizes[k]) {
                break;
            }
        }
        Some(item)
    }
}

/// Enumerate Λ under the default cap; fails loudly for astronomically large
/// spaces so a complete computation is never started by accident.
pub fn enumerate_tuples(space: &IndexSpace) -> Result<TupleIter<'_>> {
    enumerate_tuples_capped(space, DEFAULT_ENUMERATION_CAP)
}

/// Enumerate Λ with an explicit cap override.
pub fn enumerate_tuples_capped(space: &IndexSpace, cap: u128) -> Result<TupleIter<'_>> {
    match space.cardinality_u128() {
        Some(c) if c <= cap => Ok(TupleIter::new(space)),
        _ => Err(Error::EnumerationCap {
            cardinality: space.cardinality.to_string(),
            cap,
        }),
    }
}

/// Enumerate Λ starting at a given rank (used by chunked reductions).
pub(crate) fn enumerate_from<'a>(space: &'a IndexSpace, rank: &BigUint) -> Result<TupleIter<'a>> {
    TupleIter::starting_at(space, rank)
}
