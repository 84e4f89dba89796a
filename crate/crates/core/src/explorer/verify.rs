//! The lemma suite: every checked statement is counted and every failure is
//! kept as a replayable record.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{run_pairs, Mode, PairFilter, DEFAULT_BUDGET, GENERATOR};
use crate::decomposer::{cover_pair, Case, Decomposer, MAX_PRODUCTS};
use crate::error::{Error, Result};
use crate::field::{Elem, Field, FieldSpec};
use crate::machinery::{c_sets, energy, find_good_xi};
use crate::oracle::{energy_naive, min_d, NAIVE_ENERGY_BUDGET};
use crate::setalg::FSet;

const VIOLATION_KEEP: usize = 1000;

/// Fields up to this order get the naive energy at every ξ, larger ones only
/// at the selected ξ.
const NAIVE_ALL_XI_MAX_Q: u32 = 9;

const CHECKS: [&str; 7] = [
    "energy_identity",
    "energy_oracle",
    "energy_bound",
    "half_cover",
    "cover_pair",
    "decomposer",
    "min_d",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub mode: Mode,
    pub budget: u128,
}

impl VerifyConfig {
    pub fn new(mode: Mode) -> VerifyConfig {
        VerifyConfig {
            mode,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: String,
    pub checked: u64,
    pub failed: u64,
}

/// One failed statement. Pair checks fill `a`, `b`; the standalone cover check fills `c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyViolation {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub b: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub xi: Option<u32>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub field: FieldSpec,
    pub mode: String,
    pub seed: Option<u64>,
    pub generator: Option<String>,
    pub pair_count: u64,
    /// Subsets `C` with `|C| > q/2` checked directly (exhaustive mode only).
    pub cover_sets: u64,
    pub checks: Vec<CheckSummary>,
    pub case_histogram: BTreeMap<Case, u64>,
    pub violation_count: u64,
    pub violations: Vec<VerifyViolation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.check == name)
    }
}

/// `Σ_{ξ≠0} E(ξ) = (q−1)|A||B| + |A|(|A|−1)|B|(|B|−1)`.
pub fn energy_sum_expected(q: u32, card_a: u64, card_b: u64) -> u64 {
    (q as u64 - 1) * card_a * card_b + card_a * (card_a - 1) * card_b * card_b.saturating_sub(1)
}

#[derive(Default)]
struct Tally {
    counts: [(u64, u64); CHECKS.len()],
    violations: Vec<VerifyViolation>,
    case: Option<Case>,
}

impl Tally {
    fn record(&mut self, check: usize, ok: bool, make: impl FnOnce() -> VerifyViolation) {
        self.counts[check].0 += 1;
        if !ok {
            self.counts[check].1 += 1;
            self.violations.push(make());
        }
    }
}

fn pair_violation(check: usize, a: &FSet, b: &FSet, t: Option<Elem>, xi: Option<Elem>, detail: String) -> VerifyViolation {
    VerifyViolation {
        check: CHECKS[check].into(),
        a: Some(a.to_indices()),
        b: Some(b.to_indices()),
        c: None,
        t: t.map(|e| e.0),
        xi: xi.map(|e| e.0),
        detail,
    }
}

fn cover_check(c: &FSet, tally: &mut Tally, pair: Option<(&FSet, &FSet)>) {
    let field = c.field();
    let full = c.sumset(c).map(|s| s.is_full()).unwrap_or(false);
    let mut ok = full;
    let mut detail = String::from("2C is not F_q");
    if full {
        for t in field.elements() {
            match cover_pair(c, t) {
                Ok((c1, c2)) if c.contains(c1) && c.contains(c2) && field.add(c1, c2) == t => {}
                Ok(p) => {
                    ok = false;
                    detail = format!("cover_pair({t}) returned {p:?}");
                    break;
                }
                Err(e) => {
                    ok = false;
                    detail = e.to_string();
                    break;
                }
            }
        }
    }
    tally.record(4, ok, || VerifyViolation {
        check: CHECKS[4].into(),
        a: pair.map(|(a, _)| a.to_indices()),
        b: pair.map(|(_, b)| b.to_indices()),
        c: Some(c.to_indices()),
        t: None,
        xi: None,
        detail,
    });
}

fn verify_pair(a: &FSet, b: &FSet, sampled: bool) -> Tally {
    let field = a.field();
    let q = field.q();
    let mut tally = Tally::default();

    let mut sum = 0u64;
    let mut energies = Vec::with_capacity(q as usize - 1);
    for xi in field.nonzero() {
        let e = energy(a, b, xi).expect("nonempty pair, nonzero xi");
        sum += e;
        energies.push((xi, e));
    }
    let expected = energy_sum_expected(q, a.len() as u64, b.len() as u64);
    tally.record(0, sum == expected, || {
        pair_violation(0, a, b, None, None, format!("sum {sum}, expected {expected}"))
    });

    let naive_at = |tally: &mut Tally, xi: Elem, e: u64| {
        if let Ok(n) = energy_naive(a, b, xi, NAIVE_ENERGY_BUDGET) {
            tally.record(1, n == e, || {
                pair_violation(1, a, b, None, Some(xi), format!("histogram {e}, naive {n}"))
            });
        }
    };
    if q <= NAIVE_ALL_XI_MAX_Q {
        for &(xi, e) in &energies {
            naive_at(&mut tally, xi, e);
        }
    }

    let report = match find_good_xi(a, b) {
        Ok(r) => r,
        Err(e) => {
            let check = match &e {
                Error::LemmaViolation(v) if v.kind == crate::error::LemmaKind::HalfCover => 3,
                _ => 2,
            };
            tally.record(check, false, || pair_violation(check, a, b, None, None, e.to_string()));
            return tally;
        }
    };
    let xi = report.xi;
    if q > NAIVE_ALL_XI_MAX_Q {
        naive_at(&mut tally, xi, report.energy);
    }
    let (plus, minus) = c_sets(a, b, xi).expect("nonzero xi");
    let m = a.len() as u128 * b.len() as u128;
    let e = report.energy as u128;
    // Cauchy–Schwarz: |C±|·E ≥ m² for both signs.
    let bound_ok = report.meets_bound() && plus.len() as u128 * e >= m * m && minus.len() as u128 * e >= m * m;
    tally.record(2, bound_ok, || {
        pair_violation(2, a, b, None, Some(xi), format!("E = {}, |C+| = {}, |C-| = {}", report.energy, plus.len(), minus.len()))
    });
    let half = 2 * plus.len() > q as usize && 2 * minus.len() > q as usize;
    tally.record(3, half, || {
        pair_violation(3, a, b, None, Some(xi), format!("|C+| = {}, |C-| = {}", plus.len(), minus.len()))
    });
    if sampled {
        cover_check(&plus, &mut tally, Some((a, b)));
        cover_check(&minus, &mut tally, Some((a, b)));
    }

    match Decomposer::new(a, b) {
        Ok(dec) => {
            tally.case = Some(dec.case());
            for t in field.elements() {
                let res = dec.witness(t);
                let ok = matches!(&res, Ok(w) if w.d <= MAX_PRODUCTS
                    && w.case.exact_len().is_none_or(|n| w.d == n));
                tally.record(5, ok, || {
                    let detail = match res {
                        Ok(w) => format!("{} witness has d = {}", w.case, w.d),
                        Err(e) => e.to_string(),
                    };
                    pair_violation(5, a, b, Some(t), Some(xi), detail)
                });
            }
        }
        Err(e) => tally.record(5, false, || pair_violation(5, a, b, None, Some(xi), e.to_string())),
    }

    let oracle = min_d(a, b, MAX_PRODUCTS as u32).expect("nonempty pair");
    tally.record(6, oracle.min_d.is_some(), || {
        pair_violation(6, a, b, None, None, format!("coverage {:?}", oracle.layer_sizes))
    });
    tally
}

/// Runs the suite over every admissible pair (or a seeded sample). Exhaustive
/// mode also checks every `C ⊆ F_q` with `|C| > q/2`; sample mode checks the
/// sets `C±` of each pair instead.
pub fn verify_suite(field: &Field, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let sampled = matches!(cfg.mode, Mode::Sample { .. });
    let mut total = Tally::default();
    let mut violation_count = 0u64;
    let mut absorb = |t: Tally, total: &mut Tally| {
        for (acc, c) in total.counts.iter_mut().zip(t.counts) {
            acc.0 += c.0;
            acc.1 += c.1;
        }
        violation_count += t.violations.len() as u64;
        for v in t.violations {
            if total.violations.len() < VIOLATION_KEEP {
                total.violations.push(v);
            }
        }
    };

    let mut cover_sets = 0u64;
    if !sampled {
        super::check_pair_budget(field, cfg.budget)?;
        let mut t = Tally::default();
        let q = field.q();
        for mask in 1..1u64 << q {
            if 2 * mask.count_ones() > q {
                cover_check(&FSet::from_mask(field, mask)?, &mut t, None);
                cover_sets += 1;
            }
        }
        absorb(t, &mut total);
    }

    let mut cases: BTreeMap<Case, u64> = BTreeMap::new();
    let pair_count = run_pairs(
        field,
        cfg.mode,
        PairFilter::default(),
        cfg.budget,
        |a, b| verify_pair(a, b, sampled),
        |_, _, mut t| {
            if let Some(c) = t.case.take() {
                *cases.entry(c).or_insert(0) += 1;
            }
            absorb(t, &mut total);
        },
    )?;

    Ok(VerifyReport {
        field: field.spec().clone(),
        mode: cfg.mode.name().into(),
        seed: cfg.mode.seed(),
        generator: cfg.mode.seed().map(|_| GENERATOR.to_string()),
        pair_count,
        cover_sets,
        checks: CHECKS
            .iter()
            .zip(total.counts)
            .map(|(name, (checked, failed))| CheckSummary {
                check: (*name).into(),
                checked,
                failed,
            })
            .collect(),
        case_histogram: cases,
        violation_count,
        violations: total.violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_value() {
        // A = {1,2}, B = {1,3} in F_5: energies 4,6,6,4 at ξ = 1..4.
        assert_eq!(energy_sum_expected(5, 2, 2), 4 * 4 + 4);
        assert_eq!(energy_sum_expected(5, 1, 1), 4);
    }

    #[test]
    fn q5_exhaustive_passes() {
        let f5 = Field::new(5, 1).unwrap();
        let r = verify_suite(&f5, &VerifyConfig::new(Mode::Exhaustive)).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        assert_eq!(r.cover_sets, 16);
        assert_eq!(r.check("cover_pair").unwrap().checked, 16);
        assert_eq!(r.check("decomposer").unwrap().checked, 5 * r.pair_count);
    }

    #[test]
    fn over_budget() {
        let f13 = Field::new(13, 1).unwrap();
        assert!(matches!(
            verify_suite(&f13, &VerifyConfig::new(Mode::Exhaustive)),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
