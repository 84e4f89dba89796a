mod common;

use common::{admissible_pair, field, field_and_pair};
use proptest::prelude::*;
use sumprod::explorer::energy_sum_expected;
use sumprod::machinery::{certificate_at, find_nontrivial_x, Intersection};
use sumprod::oracle::NAIVE_ENERGY_BUDGET;
use sumprod::{c_sets, energy, energy_naive, find_good_xi, find_involved, Elem, FSet, Sign};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn energy_equals_naive_count((f, a, b) in field_and_pair(31), k in 1u32..1000) {
        prop_assume!(!a.is_empty() && !b.is_empty());
        let xi = Elem(1 + k % (f.q() - 1));
        prop_assert_eq!(energy(&a, &b, xi).unwrap(), energy_naive(&a, &b, xi, NAIVE_ENERGY_BUDGET).unwrap());
    }

    #[test]
    fn energy_sum_identity((f, a, b) in field_and_pair(25)) {
        prop_assume!(!a.is_empty() && !b.is_empty());
        let total: u64 = f.nonzero().map(|xi| energy(&a, &b, xi).unwrap()).sum();
        prop_assert_eq!(total, energy_sum_expected(f.q(), a.len() as u64, b.len() as u64));
    }

    #[test]
    fn selected_xi_meets_both_bounds((f, a, b) in admissible_pair(25)) {
        let r = find_good_xi(&a, &b).unwrap();
        prop_assert!(r.meets_bound());
        let m = (a.len() * b.len()) as u128;
        prop_assert!((r.energy as u128) * (f.q() as u128) < 2 * m * m);
        let (plus, minus) = c_sets(&a, &b, r.xi).unwrap();
        prop_assert_eq!((plus.len(), minus.len()), (r.card_plus, r.card_minus));
        prop_assert!(2 * plus.len() > f.q() as usize && 2 * minus.len() > f.q() as usize);
        prop_assert!(plus.len() as u128 * r.energy as u128 >= m * m);
        // No smaller-index ξ has smaller or equal energy.
        for xi in f.nonzero().take_while(|&x| x != r.xi) {
            prop_assert!(energy(&a, &b, xi).unwrap() > r.energy);
        }
    }

    #[test]
    fn involved_elements_have_two_representations((f, a, b) in admissible_pair(25)) {
        let xi = find_good_xi(&a, &b).unwrap().xi;
        for sign in [Sign::Plus, Sign::Minus] {
            let inv = find_involved(&a, &b, xi, sign).unwrap();
            let coef = sign.apply(&f, xi);
            prop_assert!(inv.reps.len() >= 2);
            for &(x, y) in &inv.reps {
                prop_assert!(a.contains(x) && b.contains(y));
                prop_assert_eq!(f.add(x, f.mul(coef, y)), inv.y);
            }
        }
    }

    #[test]
    fn certificates_replay((_f, a, b) in admissible_pair(25)) {
        let xi = find_good_xi(&a, &b).unwrap().xi;
        for which in Intersection::ORDER {
            if let Some(c) = certificate_at(&a, &b, xi, which).unwrap() {
                prop_assert!(c.verify(&a, &b, xi));
                prop_assert_eq!(c.pair, which);
            }
        }
        if let Some(c) = find_nontrivial_x(&a, &b, xi).unwrap() {
            prop_assert!(c.verify(&a, &b, xi));
        }
    }
}

#[test]
fn energy_matches_naive_exhaustively_q7() {
    let f = field(7);
    for ma in 1u64..128 {
        let a = FSet::from_mask(&f, ma).unwrap();
        for mb in (1u64..128).step_by(3) {
            let b = FSet::from_mask(&f, mb).unwrap();
            for xi in f.nonzero() {
                assert_eq!(energy(&a, &b, xi).unwrap(), energy_naive(&a, &b, xi, NAIVE_ENERGY_BUDGET).unwrap());
            }
        }
    }
}
