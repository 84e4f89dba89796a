//! Scans for sets `A` with `|A| >= q^e` whose `2A² = A·A + A·A` misses part
//! of `F_q`. Exceptions are data, never errors.

use rand::SeedableRng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::random_k_subset;
use super::{DEFAULT_BUDGET, GENERATOR};
use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::setalg::FSet;
use crate::Rational;

/// Exceptions listed in full up to this many; the count is always exact.
const EXCEPTION_KEEP: usize = 10_000;
const CHUNK: u64 = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HiConfig {
    pub exponent: Rational,
    /// Exhaustive when `2^q <= budget`, sampled otherwise.
    pub budget: u128,
    pub sample_count: u64,
    pub seed: u64,
}

impl HiConfig {
    pub fn new(exponent: Rational) -> HiConfig {
        HiConfig {
            exponent,
            budget: DEFAULT_BUDGET,
            sample_count: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HiReport {
    pub field: FieldSpec,
    pub exponent: Rational,
    /// Smallest `k` with `k >= q^e`.
    pub threshold: u32,
    pub mode: String,
    pub seed: Option<u64>,
    pub generator: Option<String>,
    pub sets_checked: u64,
    pub full_count: u64,
    pub exception_count: u64,
    /// Each exception is the index list of `A`; replay with [`two_a_squared`].
    pub exceptions: Vec<Vec<u32>>,
}

/// `A·A + A·A`.
pub fn two_a_squared(a: &FSet) -> Result<FSet> {
    let sq = a.product_set(a)?;
    sq.sumset(&sq)
}

/// Smallest `k` with `k^den >= q^num` for the exponent `num/den ∈ [0, 1]`.
pub fn hi_threshold(q: u32, exponent: Rational) -> Result<u32> {
    let (num, den) = (*exponent.numer(), *exponent.denom());
    if num < 0 || num > den || den > 6 {
        return Err(Error::InvalidArgument(format!(
            "exponent {exponent} must lie in [0, 1] with denominator at most 6"
        )));
    }
    let target = (q as u128).pow(num as u32);
    Ok((0..=q).find(|&k| (k as u128).pow(den as u32) >= target).expect("k = q qualifies"))
}

/// Checks `2A² = F_q` for every `A` above the threshold, or for a seeded
/// sample when `2^q` exceeds the budget.
pub fn hart_iosevich_scan(field: &Field, cfg: &HiConfig) -> Result<HiReport> {
    let q = field.q();
    let threshold = hi_threshold(q, cfg.exponent)?.max(1);
    let exhaustive = q < 64 && (1u128 << q) <= cfg.budget;
    let mut exceptions = Vec::new();
    let (mut checked, mut full, mut missed) = (0u64, 0u64, 0u64);
    let mut tally = |sets: Vec<(FSet, bool)>| {
        for (a, is_full) in sets {
            checked += 1;
            if is_full {
                full += 1;
            } else {
                missed += 1;
                if exceptions.len() < EXCEPTION_KEEP {
                    exceptions.push(a.to_indices());
                }
            }
        }
    };
    let test = |a: FSet| {
        let ok = two_a_squared(&a).expect("same field").is_full();
        (a, ok)
    };
    if exhaustive {
        let top = 1u64 << q;
        let mut start = 1;
        while start < top {
            let end = (start + CHUNK).min(top);
            let sets: Vec<(FSet, bool)> = (start..end)
                .into_par_iter()
                .filter(|m| m.count_ones() >= threshold)
                .map(|m| test(FSet::from_mask(field, m).expect("q < 64")))
                .collect();
            tally(sets);
            start = end;
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut left = cfg.sample_count;
        while left > 0 {
            let n = left.min(CHUNK);
            let drawn: Vec<FSet> = (0..n)
                .map(|_| {
                    let k = rng.random_range(threshold..=q) as usize;
                    random_k_subset(&mut rng, field, k)
                })
                .collect();
            tally(drawn.into_par_iter().map(test).collect());
            left -= n;
        }
    }
    Ok(HiReport {
        field: field.spec().clone(),
        exponent: cfg.exponent,
        threshold,
        mode: if exhaustive { "exhaustive" } else { "sample" }.into(),
        seed: (!exhaustive).then_some(cfg.seed),
        generator: (!exhaustive).then(|| GENERATOR.to_string()),
        sets_checked: checked,
        full_count: full,
        exception_count: missed,
        exceptions,
    })
}
