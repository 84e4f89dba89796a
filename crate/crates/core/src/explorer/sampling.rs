use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::PairFilter;
use crate::field::{Elem, Field};
use crate::setalg::FSet;

/// Name recorded in reports next to the seed.
pub const GENERATOR: &str = "ChaCha8Rng";

/// Each element joins independently with probability 1/2.
pub fn random_subset(rng: &mut ChaCha8Rng, field: &Field) -> FSet {
    FSet::from_elems(field, field.elements().filter(|_| rng.random::<bool>()))
}

/// Draws `(A, B)` by [`random_subset`] until the filter accepts.
pub fn random_pair(rng: &mut ChaCha8Rng, field: &Field, filter: &PairFilter) -> (FSet, FSet) {
    loop {
        let a = random_subset(rng, field);
        let b = random_subset(rng, field);
        if filter.accepts(field.q(), a.len(), b.len()) {
            return (a, b);
        }
    }
}

/// A uniform `k`-subset.
pub(crate) fn random_k_subset(rng: &mut ChaCha8Rng, field: &Field, k: usize) -> FSet {
    let idx = rand::seq::index::sample(rng, field.q() as usize, k);
    FSet::from_elems(field, idx.into_iter().map(|i| Elem(i as u32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn seeded_draws_repeat() {
        let f11 = Field::new(11, 1).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (a, b) = random_pair(&mut r1, &f11, &PairFilter::default());
            assert!(a.len() * b.len() > 11);
            assert_eq!((a.clone(), b.clone()), random_pair(&mut r2, &f11, &PairFilter::default()));
        }
        assert_eq!(random_k_subset(&mut r1, &f11, 4).len(), 4);
    }
}
