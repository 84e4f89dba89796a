mod common;

use std::sync::OnceLock;

use common::field;
use proptest::prelude::*;
use sumprod::field::is_prime;
use sumprod::{Elem, Field};

fn prime_powers(max: u64) -> Vec<u64> {
    (2..=max)
        .filter(|&q| sumprod::field::factor_prime_power(q).is_ok())
        .collect()
}

#[test]
fn axioms_exhaustively_up_to_64() {
    for q in prime_powers(64) {
        let f = field(q);
        let els: Vec<Elem> = f.elements().collect();
        for &a in &els {
            assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
            assert_eq!(f.mul(a, Elem::ONE), a);
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE, "q = {q}, a = {a}");
            }
            for &b in &els {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for &c in &els {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }
}

#[test]
fn frobenius_is_additive() {
    for q in prime_powers(256) {
        let f = field(q);
        let p = f.p() as u64;
        for a in f.elements() {
            for b in f.elements().step_by(((q / 32) as usize).max(1)) {
                assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)), "q = {q}");
            }
        }
    }
}

#[test]
fn multiplicative_group_is_cyclic_of_order_q_minus_1() {
    for q in prime_powers(128) {
        let f = field(q);
        for a in f.nonzero() {
            assert_eq!(f.pow(a, q - 1), Elem::ONE);
        }
    }
}

#[test]
fn canonical_moduli_are_smallest_irreducibles() {
    // Independent check: a degree-2 or degree-3 monic is irreducible iff it has no root.
    for (p, n) in [(2, 2), (2, 3), (3, 2), (3, 3), (5, 2), (5, 3), (7, 2)] {
        let f = Field::new(p, n).unwrap();
        let modulus = f.spec().modulus.clone().unwrap();
        let packed = |c: &[u32]| c.iter().rev().fold(0u64, |acc, &x| acc * p + x as u64);
        let has_root = |c: &[u32]| {
            (0..p).any(|x| c.iter().rev().fold(0u64, |acc, &k| (acc * x + k as u64) % p) == 0)
        };
        assert!(!has_root(&modulus));
        let lead = p.pow(n);
        for code in lead..packed(&modulus) {
            let mut c = Vec::new();
            let mut r = code;
            for _ in 0..=n {
                c.push((r % p) as u32);
                r /= p;
            }
            assert!(has_root(&c), "{c:?} is irreducible and smaller than {modulus:?}");
        }
    }
}

#[test]
fn primality() {
    let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
    assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
}

const LARGE: [u64; 10] = [81, 125, 243, 256, 343, 729, 1024, 2187, 65521, 65536];

fn large_fields() -> &'static [Field] {
    static FIELDS: OnceLock<Vec<Field>> = OnceLock::new();
    FIELDS.get_or_init(|| LARGE.iter().map(|&q| field(q)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn axioms_sampled_on_large_fields(
        i in 0..LARGE.len(),
        x in any::<u64>(), y in any::<u64>(), z in any::<u64>(),
    ) {
        let f = &large_fields()[i];
        let q = f.q() as u64;
        let (a, b, c) = (Elem((x % q) as u32), Elem((y % q) as u32), Elem((z % q) as u32));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
            prop_assert_eq!(f.div(f.mul(b, a), a).unwrap(), b);
        }
        let p = f.p() as u64;
        prop_assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
    }
}
