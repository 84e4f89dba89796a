#![allow(dead_code)]

use proptest::prelude::*;
use sumprod::{FSet, Field};

pub const SMALL_ORDERS: [u64; 11] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25];

pub fn field(q: u64) -> Field {
    Field::from_order(q).unwrap()
}

pub fn set_from_bits(field: &Field, bits: &[bool]) -> FSet {
    FSet::from_elems(field, field.elements().filter(|e| bits[e.index()]))
}

/// A field of order at most `max_q` with two subsets.
pub fn field_and_pair(max_q: u64) -> impl Strategy<Value = (Field, FSet, FSet)> {
    let orders: Vec<u64> = SMALL_ORDERS.iter().copied().filter(|&q| q <= max_q).collect();
    prop::sample::select(orders).prop_flat_map(|q| {
        let n = q as usize;
        (
            Just(q),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(|(q, x, y)| {
                let f = field(q);
                let (a, b) = (set_from_bits(&f, &x), set_from_bits(&f, &y));
                (f, a, b)
            })
    })
}

/// Same, restricted to nonempty pairs with `|A||B| > q`.
pub fn admissible_pair(max_q: u64) -> impl Strategy<Value = (Field, FSet, FSet)> {
    field_and_pair(max_q).prop_filter("|A||B| > q", |(f, a, b)| a.len() * b.len() > f.q() as usize)
}
