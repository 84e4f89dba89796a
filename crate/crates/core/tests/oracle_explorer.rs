mod common;

use common::{admissible_pair, field, field_and_pair};
use proptest::prelude::*;
use sumprod::explorer::{dot_product_set, survey, verify_suite, Mode, SurveyConfig, VerifyConfig};
use sumprod::{d_ab, min_d, FSet, Rational};

fn pool(n: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dot_products_equal_iterated_sumsets((_f, a, b) in field_and_pair(11), d in 1u32..=4) {
        prop_assume!(!a.is_empty() && !b.is_empty());
        prop_assert_eq!(dot_product_set(&a, &b, d).unwrap(), d_ab(&a, &b, d).unwrap());
    }

    #[test]
    fn min_d_agrees_with_bitset_layers((f, a, b) in admissible_pair(16)) {
        let r = min_d(&a, &b, 10).unwrap();
        prop_assert!(r.min_d.is_some_and(|d| d <= 10));
        for d in 1..=10u32 {
            let layer = d_ab(&a, &b, d).unwrap();
            prop_assert_eq!(r.layer_sizes[d as usize - 1] as usize, layer.len());
            prop_assert_eq!(r.coverage(d), Rational::new(layer.len() as i128, f.q() as i128));
            prop_assert_eq!(layer.is_full(), r.min_d.is_some_and(|m| d >= m));
        }
    }
}

#[test]
fn survey_q5_counts_every_admissible_pair() {
    let f = field(5);
    let binom = [1u64, 5, 10, 10, 5, 1];
    let expected: u64 = (1..=5)
        .flat_map(|i| (1..=5).map(move |j| (i, j)))
        .filter(|(i, j)| i * j > 5)
        .map(|(i, j)| binom[i] * binom[j])
        .sum();
    let r = survey(&f, &SurveyConfig::new(Mode::Exhaustive)).unwrap().report;
    assert_eq!(r.pair_count, expected);
    assert_eq!(r.histogram_total(), expected);
    assert_eq!(r.violation_count, 0);
    assert!(r.max_min_d.is_some_and(|d| d <= 10));
    assert!(r.extremal.iter().all(|c| c.examples.len() <= 10));
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let f = field(9);
    let cfg = SurveyConfig::new(Mode::Sample { count: 3000, seed: 11 });
    let one = pool(1).install(|| survey(&f, &cfg)).unwrap().report;
    let four = pool(4).install(|| survey(&f, &cfg)).unwrap().report;
    assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&four).unwrap());

    let f7 = field(7);
    let v1 = pool(1).install(|| verify_suite(&f7, &VerifyConfig::new(Mode::Exhaustive))).unwrap();
    let v3 = pool(3).install(|| verify_suite(&f7, &VerifyConfig::new(Mode::Exhaustive))).unwrap();
    assert_eq!(v1, v3);
    assert!(v1.passed());
}

#[test]
fn survey_records_flag_extremal_pairs() {
    let f = field(7);
    let mut cfg = SurveyConfig::new(Mode::Exhaustive);
    cfg.keep_records = true;
    cfg.oracle_only = true;
    let out = survey(&f, &cfg).unwrap();
    let records = out.records.unwrap();
    for cell in &out.report.extremal {
        let in_cell = records.iter().filter(|r| (r.card_a, r.card_b) == (cell.card_a, cell.card_b));
        let flagged = in_cell.clone().filter(|r| r.is_extremal).count() as u64;
        assert_eq!(flagged, cell.pairs_at_max);
        assert_eq!(in_cell.map(|r| r.min_d).max(), Some(cell.max_min_d));
    }
    assert!(records.iter().all(|r| r.case_used.is_none()));
    assert!(out.report.case_histogram.is_empty());
}

#[test]
fn sampled_verify_checks_cover_sets_per_pair() {
    let f = field(11);
    let r = verify_suite(&f, &VerifyConfig::new(Mode::Sample { count: 300, seed: 42 })).unwrap();
    assert!(r.passed(), "{:?}", r.violations);
    assert_eq!(r.check("cover_pair").unwrap().checked, 600);
    let again = verify_suite(&f, &VerifyConfig::new(Mode::Sample { count: 300, seed: 42 })).unwrap();
    assert_eq!(r, again);
}

#[test]
fn singleton_layers_never_fill() {
    let f = field(5);
    let one = FSet::parse(&f, "1").unwrap();
    let r = min_d(&one, &one, 10).unwrap();
    assert_eq!(r.min_d, None);
}
