//! Sampling designs over Λ for incomplete U-statistics: i.i.d. sampling
//! with replacement, uniform without-replacement (rejective) sampling of a
//! fixed size, and Bernoulli sampling where each tuple is included
//! independently.
//!
//! All three designs here have equal first-order inclusion probabilities
//! `π = B / #Λ`; that scalar is carried on the [`TermSet`] for the
//! Horvitz-Thompson estimator. Samplers are deterministic functions of
//! `(space, B, seed)`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng as _;
use rand::RngCore as _;
use rand_distr::Distribution;

use crate::error::{Error, Result};
use crate::index::{IndexSpace, IndexTuple};
use crate::rng::SplitRng;

/// Threshold below which Bernoulli sampling walks Λ tuple by tuple.
const BERNOULLI_LOOP_CAP: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    WithReplacement,
    WithoutReplacement,
    Bernoulli,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::WithReplacement => "with_replacement",
            Scheme::WithoutReplacement => "without_replacement",
            Scheme::Bernoulli => "bernoulli",
        }
    }

    pub fn parse(s: &str) -> Result<Scheme> {
        match s {
            "with_replacement" | "wr" => Ok(Scheme::WithReplacement),
            "without_replacement" | "wor" => Ok(Scheme::WithoutReplacement),
            "bernoulli" => Ok(Scheme::Bernoulli),
            other => Err(Error::InvalidArgument(format!(
                "unknown sampling scheme {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The sampled collection of terms D_B, with its inclusion metadata.
///
/// `requested_b` is the target term count; it is integral for the two
/// fixed-size schemes and may be fractional for Bernoulli sampling, where it
/// is only the expected count.
#[derive(Debug, Clone)]
pub struct TermSet {
    scheme: Scheme,
    terms: Vec<IndexTuple>,
    requested_b: f64,
    inclusion_probability: Option<f64>,
    seed: u64,
}

impl TermSet {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn terms(&self) -> &[IndexTuple] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn requested_b(&self) -> f64 {
        self.requested_b
    }

    /// First-order inclusion probability `π = B / #Λ`; `None` for sampling
    /// with replacement, where inclusion probabilities play no role.
    pub fn inclusion_probability(&self) -> Option<f64> {
        self.inclusion_probability
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Serialize for experiment reproducibility: a `scheme,seed,B` metadata
    /// header followed by one tuple per row, blocks separated by `;`,
    /// indices by `,`. Indices are 0-based.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("scheme,seed,B\n");
        let _ = writeln!(out, "{},{},{}", self.scheme, self.seed, self.requested_b);
        for t in &self.terms {
            let row = t
                .blocks()
                .iter()
                .map(|b| {
                    b.iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&row);
            out.push('\n');
        }
        let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path, space: &IndexSpace) -> Result<TermSet> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let pathstr = path.display().to_string();
        let parse_err = |line: usize, message: String| Error::Parse {
            path: pathstr.clone(),
            line,
            column: 1,
            message,
        };
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "scheme,seed,B" => {}
            _ => return Err(parse_err(1, "expected `scheme,seed,B` header".into())),
        }
        let meta = lines
            .next()
            .ok_or_else(|| parse_err(2, "missing metadata row".into()))?;
        let cells: Vec<&str> = meta.split(',').collect();
        if cells.len() != 3 {
            return Err(parse_err(2, format!("expected 3 metadata cells: {meta:?}")));
        }
        let scheme = Scheme::parse(cells[0].trim())?;
        let seed: u64 = cells[1]
            .trim()
            .parse()
            .map_err(|_| parse_err(2, format!("bad seed {:?}", cells[1])))?;
        let requested_b: f64 = cells[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(2, format!("bad B {:?}", cells[2])))?;
        let mut terms = Vec::new();
        for (idx, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let blocks = line
                .split(';')
                .map(|b| {
                    b.split(',')
                        .map(|i| {
                            i.trim()
                                .parse::<usize>()
                                .map_err(|_| parse_err(idx + 3, format!("bad index {i:?}")))
                        })
                        .collect::<Result<Vec<usize>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let tuple = IndexTuple::new(blocks)?;
            space.validate_tuple(&tuple)?;
            terms.push(tuple);
        }
        let inclusion_probability = match scheme {
            Scheme::WithReplacement => None,
            _ => Some(requested_b / space.cardinality_f64()),
        };
        Ok(TermSet {
            scheme,
            terms,
            requested_b,
            inclusion_probability,
            seed,
        })
    }
}

/// B i.i.d. uniform draws from Λ; duplicates are kept with multiplicity,
/// in draw order.
pub fn sample_with_replacement(
    space: &IndexSpace,
    b: u64,
    rng: &mut SplitRng,
) -> Result<TermSet> {
    if b == 0 {
        return Err(Error::EmptyBudget);
    }
    let seed = rng.seed();
    let terms = (0..b)
        .map(|_| space.random_tuple(rng))
        .collect::<Vec<_>>();
    Ok(TermSet {
        scheme: Scheme::WithReplacement,
        terms,
        requested_b: b as f64,
        inclusion_probability: None,
        seed,
    })
}

/// Uniformly random B-subset of Λ via Floyd's algorithm on ranks; terms are
/// returned in rank (= enumeration) order.
pub fn sample_without_replacement(
    space: &IndexSpace,
    b: u64,
    rng: &mut SplitRng,
) -> Result<TermSet> {
    if b == 0 {
        return Err(Error::EmptyBudget);
    }
    if BigUint::from(b) > *space.cardinality() {
        return Err(Error::BudgetTooLarge {
            requested: b.to_string(),
            cardinality: space.cardinality().to_string(),
        });
    }
    let seed = rng.seed();
    let pi = b as f64 / space.cardinality_f64();
    let terms = floyd_ranks(space, b, rng)
        .into_iter()
        .map(|r| space.unrank(&r).expect("sampled rank in range"))
        .collect();
    Ok(TermSet {
        scheme: Scheme::WithoutReplacement,
        terms,
        requested_b: b as f64,
        inclusion_probability: Some(pi),
        seed,
    })
}

/// Each tuple of Λ included independently with probability
/// `π = expected_b / #Λ`. `|terms|` is random with expectation `expected_b`;
/// an empty draw is a valid outcome.
pub fn sample_bernoulli(
    space: &IndexSpace,
    expected_b: f64,
    rng: &mut SplitRng,
) -> Result<TermSet> {
    if !(expected_b > 0.0) {
        return Err(Error::EmptyBudget);
    }
    let pi = expected_b / space.cardinality_f64();
    if pi > 1.0 {
        return Err(Error::InvalidInclusionProbability(pi));
    }
    let seed = rng.seed();
    let terms = match space.cardinality_u128() {
        // Enumerable: one coin per element of Λ, walking ranks in order.
        Some(card) if card <= BERNOULLI_LOOP_CAP => {
            let mut terms = Vec::new();
            for r in 0..card {
                if rng.random::<f64>() < pi {
                    terms.push(space.unrank(&BigUint::from(r)).expect("rank in range"));
                }
            }
            terms
        }
        // Not enumerable: draw the count, then a uniform subset of that
        // size. Distributionally identical to the loop.
        _ => {
            let count = bernoulli_count(space, pi, rng);
            if count == 0 {
                Vec::new()
            } else {
                floyd_ranks(space, count, rng)
                    .into_iter()
                    .map(|r| space.unrank(&r).expect("sampled rank in range"))
                    .collect()
            }
        }
    };
    Ok(TermSet {
        scheme: Scheme::Bernoulli,
        terms,
        requested_b: expected_b,
        inclusion_probability: Some(pi),
        seed,
    })
}

/// Floyd's subset-sampling algorithm over tuple ranks: exactly uniform over
/// B-subsets, O(B) expected work, returned sorted ascending.
fn floyd_ranks(space: &IndexSpace, b: u64, rng: &mut SplitRng) -> Vec<BigUint> {
    match space.cardinality_u128() {
        Some(card) => {
            let mut chosen: HashSet<u128> = HashSet::with_capacity(b as usize);
            for j in (card - b as u128)..card {
                let t = rng.below_u128(j + 1);
                if chosen.contains(&t) {
                    chosen.insert(j);
                } else {
                    chosen.insert(t);
                }
            }
            let mut ranks: Vec<u128> = chosen.into_iter().collect();
            ranks.sort_unstable();
            ranks.into_iter().map(BigUint::from).collect()
        }
        None => {
            let card = space.cardinality().clone();
            let mut chosen: HashSet<BigUint> = HashSet::with_capacity(b as usize);
            let mut j = &card - BigUint::from(b);
            while j < card {
                let t = random_below_big(space, &(&j + 1u32), rng);
                if chosen.contains(&t) {
                    chosen.insert(j.clone());
                } else {
                    chosen.insert(t);
                }
                j += 1u32;
            }
            let mut ranks: Vec<BigUint> = chosen.into_iter().collect();
            ranks.sort_unstable();
            ranks
        }
    }
}

fn random_below_big(_space: &IndexSpace, bound: &BigUint, rng: &mut SplitRng) -> BigUint {
    if let Some(b) = bound.to_u128() {
        return BigUint::from(rng.below_u128(b));
    }
    let bits = bound.bits();
    let words = bits.div_ceil(64) as usize;
    let top_mask: u64 = if bits % 64 == 0 {
        u64::MAX
    } else {
        (1u64 << (bits % 64)) - 1
    };
    loop {
        let mut digits = Vec::with_capacity(words * 2);
        for w in 0..words {
            let mut x = rng.next_u64();
            if w == words - 1 {
                x &= top_mask;
            }
            digits.push(x as u32);
            digits.push((x >> 32) as u32);
        }
        let candidate = BigUint::from_slice(&digits);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Realized size of a Bernoulli sample over a non-enumerable Λ.
fn bernoulli_count(space: &IndexSpace, pi: f64, rng: &mut SplitRng) -> u64 {
    if let Some(card) = space.cardinality_u128() {
        if let Ok(n64) = u64::try_from(card) {
            let dist = rand_distr::Binomial::new(n64, pi).expect("validated probability");
            return dist.sample(rng);
        }
    }
    // #Λ beyond u64: with π = B/#Λ this small, Binomial(#Λ, π) and
    // Poisson(B) agree beyond double precision.
    poisson_from_mode(pi * space.cardinality_f64().min(f64::MAX), space, rng)
}

fn poisson_from_mode(lambda_raw: f64, space: &IndexSpace, rng: &mut SplitRng) -> u64 {
    // lambda = π·#Λ can lose precision through cardinality_f64; recompute
    // from log space when the direct product is not finite.
    let lambda = if lambda_raw.is_finite() && lambda_raw > 0.0 {
        lambda_raw
    } else {
        space.log_cardinality().exp()
    };
    let mode = lambda.floor().max(0.0) as u64;
    let ln_pmf_mode =
        mode as f64 * lambda.ln() - lambda - libm::lgamma(mode as f64 + 1.0);
    let p_mode = ln_pmf_mode.exp();
    let u: f64 = rng.random();
    let mut cum = p_mode;
    if u < cum {
        return mode;
    }
    // Symmetric outward walk from the mode, accumulating mass.
    let mut p_up = p_mode;
    let mut p_down = p_mode;
    let mut k_up = mode;
    let mut k_down = mode;
    loop {
        if p_up > 0.0 {
            k_up += 1;
            p_up *= lambda / k_up as f64;
            cum += p_up;
            if u < cum {
                return k_up;
            }
        }
        if k_down > 0 && p_down > 0.0 {
            p_down *= k_down as f64 / lambda;
            k_down -= 1;
            cum += p_down;
            if u < cum {
                return k_down;
            }
        }
        if p_up <= 0.0 && (k_down == 0 || p_down <= 0.0) {
            // Numerical tail exhausted; the remaining mass is below 1e-300.
            return mode;
        }
    }
}
