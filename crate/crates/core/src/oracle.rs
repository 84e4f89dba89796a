//! Brute-force ground truth.
//!
//! Nothing here touches the bitset kernels of [`crate::setalg`] or the
//! histogram path of [`crate::machinery`]: sets are walked element by element
//! with the field's `add` and `mul` only.

use serde::{Deserialize, Serialize};

use crate::decomposer::{Case, ProductPair, Witness};
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::setalg::FSet;
use crate::Rational;

pub const DEFAULT_D_MAX: u32 = 10;

/// Largest `|A|²|B|²` the four-loop energy count will attempt.
pub const NAIVE_ENERGY_BUDGET: u128 = 100_000_000;

fn elems(s: &FSet) -> Vec<Elem> {
    s.iter().collect()
}

/// Four nested loops over `A×B×A×B` counting `a₁ + ξb₁ = a₂ + ξb₂`.
pub fn energy_naive(a: &FSet, b: &FSet, xi: Elem, budget: u128) -> Result<u64> {
    if xi.is_zero() {
        return Err(Error::ZeroXi);
    }
    let m = a.len() as u128 * b.len() as u128;
    if m * m > budget {
        return Err(Error::BudgetExceeded {
            what: "naive energy quadruples",
            needed: m * m,
            budget,
        });
    }
    let f = a.field();
    let (av, bv) = (elems(a), elems(b));
    let mut count = 0;
    for &a1 in &av {
        for &b1 in &bv {
            let lhs = f.add(a1, f.mul(xi, b1));
            for &a2 in &av {
                for &b2 in &bv {
                    if lhs == f.add(a2, f.mul(xi, b2)) {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// Smallest `d` with `dAB = F_q`, and the coverage `|dAB|/q` of every layer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub q: u32,
    pub min_d: Option<u32>,
    /// `|dAB|` for `d = 1..=d_max`.
    pub layer_sizes: Vec<u32>,
}

impl OracleResult {
    /// `|dAB|/q`, for `1 <= d <= d_max`.
    pub fn coverage(&self, d: u32) -> Rational {
        Rational::new(self.layer_sizes[d as usize - 1] as i128, self.q as i128)
    }

    pub fn coverage_list(&self) -> Vec<Rational> {
        (1..=self.layer_sizes.len() as u32).map(|d| self.coverage(d)).collect()
    }
}

fn naive_products(field: &Field, a: &FSet, b: &FSet) -> Vec<bool> {
    let mut hit = vec![false; field.q() as usize];
    for x in a.iter() {
        for y in b.iter() {
            hit[field.mul(x, y).index()] = true;
        }
    }
    hit
}

fn next_layer(field: &Field, layer: &[bool], products: &[Elem]) -> Vec<bool> {
    let mut next = vec![false; layer.len()];
    for (s, _) in layer.iter().enumerate().filter(|(_, &h)| h) {
        for &p in products {
            next[field.add(Elem(s as u32), p).index()] = true;
        }
    }
    next
}

fn check_operands(a: &FSet, b: &FSet) -> Result<()> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(())
}

/// Builds `dAB` layer by layer up to `d_max`, stopping early once a layer is full.
pub fn min_d(a: &FSet, b: &FSet, d_max: u32) -> Result<OracleResult> {
    check_operands(a, b)?;
    let field = a.field();
    let q = field.q();
    let mut layer = naive_products(field, a, b);
    let products: Vec<Elem> = (0..q).filter(|&i| layer[i as usize]).map(Elem).collect();
    let mut sizes = Vec::with_capacity(d_max as usize);
    let mut min = None;
    for d in 1..=d_max {
        if d > 1 && min.is_none() {
            layer = next_layer(field, &layer, &products);
        }
        let size = if min.is_some() {
            q
        } else {
            layer.iter().filter(|&&h| h).count() as u32
        };
        if size == q && min.is_none() {
            min = Some(d);
        }
        sizes.push(size);
    }
    Ok(OracleResult {
        q,
        min_d: min,
        layer_sizes: sizes,
    })
}

/// All layers `dAB`, `d = 1..=d_max`, kept for repeated witness extraction.
#[derive(Clone, Debug)]
pub struct WitnessSearch {
    field: Field,
    d_max: u32,
    layers: Vec<Vec<bool>>,
    first_product: Vec<Option<(Elem, Elem)>>,
}

impl WitnessSearch {
    pub fn new(a: &FSet, b: &FSet, d_max: u32) -> Result<WitnessSearch> {
        check_operands(a, b)?;
        if d_max < 1 {
            return Err(Error::ZeroMultiplicity);
        }
        let field = a.field().clone();
        let mut first_product = vec![None; field.q() as usize];
        for x in a.iter() {
            for y in b.iter() {
                let slot = &mut first_product[field.mul(x, y).index()];
                if slot.is_none() {
                    *slot = Some((x, y));
                }
            }
        }
        let base: Vec<bool> = first_product.iter().map(Option::is_some).collect();
        let products: Vec<Elem> = field.elements().filter(|e| base[e.index()]).collect();
        let mut layers = vec![base];
        for _ in 1..d_max {
            let next = next_layer(&field, layers.last().unwrap(), &products);
            layers.push(next);
        }
        Ok(WitnessSearch {
            field,
            d_max,
            layers,
            first_product,
        })
    }

    fn in_layer(&self, d: u32, t: Elem) -> bool {
        self.layers[d as usize - 1][t.index()]
    }

    /// Smallest `d <= d_max` with `t ∈ dAB`.
    pub fn min_length(&self, t: Elem) -> Option<u32> {
        (1..=self.d_max).find(|&d| self.in_layer(d, t))
    }

    /// Shortest witness for `t`, split as `⌈d/2⌉ + ⌊d/2⌋` and back-chained
    /// choosing the smallest-index left summand at each level.
    pub fn find(&self, t: Elem) -> Result<Witness> {
        if t.0 >= self.field.q() {
            return Err(Error::IndexOutOfRange {
                index: t.0 as u64,
                q: self.field.q(),
            });
        }
        let d = self.min_length(t).ok_or(Error::NoWitness {
            t: t.0,
            d_max: self.d_max,
        })?;
        let mut pairs = Vec::with_capacity(d as usize);
        self.chain(t, d, &mut pairs);
        Ok(Witness {
            t,
            case: Case::Fallback,
            xi: None,
            d: pairs.len(),
            pairs,
        })
    }

    fn chain(&self, t: Elem, d: u32, out: &mut Vec<ProductPair>) {
        if d == 1 {
            let (a, b) = self.first_product[t.index()].expect("t lies in the first layer");
            out.push(ProductPair { a, b });
            return;
        }
        let (d1, d2) = (d.div_ceil(2), d / 2);
        let s = self
            .field
            .elements()
            .find(|&s| self.in_layer(d1, s) && self.in_layer(d2, self.field.sub(t, s)))
            .expect("t lies in layer d1 + d2");
        self.chain(s, d1, out);
        self.chain(self.field.sub(t, s), d2, out);
    }
}

/// Shortest witness for `t ∈ dAB`, `d <= d_max`.
pub fn witness_search(a: &FSet, b: &FSet, t: Elem, d_max: u32) -> Result<Witness> {
    WitnessSearch::new(a, b, d_max)?.find(t)
}
