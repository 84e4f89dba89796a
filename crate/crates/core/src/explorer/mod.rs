//! Surveys over many `(A, B)` pairs: empirical `d(c)` and coverage, the
//! lemma verification suite, Hart–Iosevich scans and the dot-product view of
//! `dAB`.
//!
//! Every run is a pure function of its configuration. Pairs are enumerated
//! (or drawn from one seeded generator) sequentially, processed in parallel
//! chunks and merged back in index order, so reports do not depend on the
//! thread count.

mod hart_iosevich;
mod sampling;
mod survey;
mod verify;

pub use hart_iosevich::{hart_iosevich_scan, hi_threshold, two_a_squared, HiConfig, HiReport};
pub use sampling::{random_pair, random_subset, GENERATOR};
pub use survey::{
    survey, ExtremalCell, SearchRecord, SurveyConfig, SurveyOutcome, SurveyReport, SurveyViolation, TrivialOnlyExample,
    TrivialOnlyStats,
};
pub use verify::{energy_sum_expected, verify_suite, CheckSummary, VerifyConfig, VerifyReport, VerifyViolation};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::setalg::FSet;
use crate::Rational;

/// Default cap on enumerated configurations, `2^22 = 4^11`.
pub const DEFAULT_BUDGET: u128 = 1 << 22;

/// Pairs handed to the thread pool per merge step.
const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum Mode {
    Exhaustive,
    Sample { count: u64, seed: u64 },
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Sample { .. } => "sample",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Mode::Exhaustive => None,
            Mode::Sample { seed, .. } => Some(*seed),
        }
    }
}

/// Keeps pairs with `|A||B| > ratio·q`; the default ratio 1 is the size
/// condition of the theorem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairFilter {
    pub min_ratio: Rational,
}

impl Default for PairFilter {
    fn default() -> Self {
        PairFilter {
            min_ratio: Rational::from_integer(1),
        }
    }
}

impl PairFilter {
    pub fn accepts(&self, q: u32, card_a: usize, card_b: usize) -> bool {
        let m = card_a as i128 * card_b as i128;
        m * self.min_ratio.denom() > self.min_ratio.numer() * q as i128
    }

    fn check(&self, q: u32) -> Result<()> {
        if self.min_ratio < Rational::from_integer(0) || !self.accepts(q, q as usize, q as usize) {
            return Err(Error::InvalidArgument(format!(
                "min ratio {} admits no pair at q = {q}",
                self.min_ratio
            )));
        }
        Ok(())
    }
}

/// Rejects an exhaustive run over `4^q` pairs above `budget`.
pub fn check_pair_budget(field: &Field, budget: u128) -> Result<()> {
    let q = field.q();
    let needed = if q >= 64 { u128::MAX } else { 1u128 << (2 * q) };
    if needed > budget {
        return Err(Error::BudgetExceeded {
            what: "exhaustive pair space 4^q",
            needed,
            budget,
        });
    }
    Ok(())
}

/// Runs `work` on every admissible pair and feeds the results to `sink` in
/// pair order. Exhaustive order is `mask(A)` outer, `mask(B)` inner.
pub(crate) fn run_pairs<R, W, S>(field: &Field, mode: Mode, filter: PairFilter, budget: u128, work: W, mut sink: S) -> Result<u64>
where
    R: Send,
    W: Fn(&FSet, &FSet) -> R + Sync,
    S: FnMut(&FSet, &FSet, R),
{
    filter.check(field.q())?;
    let mut count = 0u64;
    match mode {
        Mode::Exhaustive => {
            check_pair_budget(field, budget)?;
            let top = 1u64 << field.q();
            let masks: Vec<u64> = (1..top).collect();
            let per_a = (CHUNK / masks.len()).max(1);
            for chunk in masks.chunks(per_a) {
                let results: Vec<Vec<(FSet, FSet, R)>> = chunk
                    .par_iter()
                    .map(|&ma| {
                        let a = FSet::from_mask(field, ma).expect("q <= 63");
                        masks
                            .iter()
                            .filter(|mb| filter.accepts(field.q(), a.len(), mb.count_ones() as usize))
                            .map(|&mb| {
                                let b = FSet::from_mask(field, mb).expect("q <= 63");
                                let r = work(&a, &b);
                                (a.clone(), b, r)
                            })
                            .collect()
                    })
                    .collect();
                for (a, b, r) in results.into_iter().flatten() {
                    sink(&a, &b, r);
                    count += 1;
                }
            }
        }
        Mode::Sample { count: total, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut left = total;
            while left > 0 {
                let n = left.min(CHUNK as u64);
                let pairs: Vec<(FSet, FSet)> = (0..n).map(|_| random_pair(&mut rng, field, &filter)).collect();
                let results: Vec<R> = pairs.par_iter().map(|(a, b)| work(a, b)).collect();
                for ((a, b), r) in pairs.iter().zip(results) {
                    sink(a, b, r);
                }
                count += n;
                left -= n;
            }
        }
    }
    Ok(count)
}

/// `{a·b : a ∈ A^d, b ∈ B^d}` built one coordinate at a time with the field
/// operations only.
pub fn dot_product_set(a: &FSet, b: &FSet, d: u32) -> Result<FSet> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    if d == 0 {
        return Err(Error::ZeroMultiplicity);
    }
    let field = a.field();
    let q = field.q() as usize;
    let mut reach = vec![false; q];
    reach[0] = true;
    for _ in 0..d {
        let mut next = vec![false; q];
        for s in (0..q).filter(|&s| reach[s]) {
            for x in a.iter() {
                for y in b.iter() {
                    next[field.add(Elem(s as u32), field.mul(x, y)).index()] = true;
                }
            }
        }
        reach = next;
    }
    Ok(FSet::from_elems(field, (0..q).filter(|&s| reach[s]).map(|s| Elem(s as u32))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setalg::d_ab;

    #[test]
    fn dot_products_match_iterated_sumsets() {
        let f5 = Field::new(5, 1).unwrap();
        let a = FSet::parse(&f5, "1,2,3").unwrap();
        let b = FSet::parse(&f5, "1,2").unwrap();
        assert_eq!(dot_product_set(&a, &b, 1).unwrap(), a.product_set(&b).unwrap());
        assert!(dot_product_set(&a, &b, 2).unwrap().is_full());
        let f9 = Field::new(3, 2).unwrap();
        let a = FSet::parse(&f9, "0,4,5").unwrap();
        for d in 1..=4 {
            assert_eq!(dot_product_set(&a, &a, d).unwrap(), d_ab(&a, &a, d).unwrap());
        }
    }

    #[test]
    fn filter_and_budget() {
        let f5 = Field::new(5, 1).unwrap();
        let f = PairFilter::default();
        assert!(!f.accepts(5, 1, 5));
        assert!(f.accepts(5, 2, 3));
        let strict = PairFilter {
            min_ratio: Rational::new(3, 2),
        };
        assert!(!strict.accepts(5, 2, 3));
        assert!(strict.accepts(5, 2, 4));
        assert!(check_pair_budget(&f5, 1 << 10).is_ok());
        assert!(matches!(
            check_pair_budget(&f5, 1 << 9),
            Err(Error::BudgetExceeded { needed: 1024, .. })
        ));
        let never = PairFilter {
            min_ratio: Rational::from_integer(5),
        };
        assert!(never.check(5).is_err());
    }

    #[test]
    fn exhaustive_pair_count_q3() {
        let f3 = Field::new(3, 1).unwrap();
        let n = run_pairs(&f3, Mode::Exhaustive, PairFilter::default(), DEFAULT_BUDGET, |_, _| (), |_, _, _| ()).unwrap();
        // cards (1..3)×(1..3) with product > 3, weighted by C(3,k).
        let binom = [0u64, 3, 3, 1];
        let expected: u64 = (1..=3)
            .flat_map(|i| (1..=3).map(move |j| (i, j)))
            .filter(|(i, j)| i * j > 3)
            .map(|(i, j)| binom[i] * binom[j])
            .sum();
        assert_eq!(n, expected);
    }
}
