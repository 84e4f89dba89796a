//! Subsets of F_q as characteristic bitsets.
//!
//! Bit `i` of an [`FSet`] is set iff the element with index `i` belongs to the
//! set. Operations never mutate their operands and return fresh sets.
//!
//! For prime fields addition is translation of indices modulo `q`, so the
//! sumset `A + B` is the union of the cyclic rotations of `B`'s bitset by each
//! `a ∈ A`. Extension fields fall back to a pairwise loop.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

const WORD: usize = 64;

#[derive(Clone)]
pub struct FSet {
    field: Field,
    bits: Vec<u64>,
    card: usize,
}

impl PartialEq for FSet {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.bits == other.bits
    }
}

impl Eq for FSet {}

impl fmt::Debug for FSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|e| e.0)).finish()
    }
}

impl Serialize for FSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter().map(|e| e.0))
    }
}

fn words_for(q: u32) -> usize {
    (q as usize).div_ceil(WORD)
}

impl FSet {
    pub fn empty(field: &Field) -> FSet {
        FSet {
            field: field.clone(),
            bits: vec![0; words_for(field.q())],
            card: 0,
        }
    }

    pub fn full(field: &Field) -> FSet {
        let mut s = FSet::empty(field);
        s.bits.iter_mut().for_each(|w| *w = !0);
        s.trim();
        s
    }

    pub fn from_elems<I: IntoIterator<Item = Elem>>(field: &Field, elems: I) -> FSet {
        let mut s = FSet::empty(field);
        for e in elems {
            s.insert(e);
        }
        s
    }

    /// Builds a set from raw indices, rejecting any index `>= q`.
    pub fn from_indices(field: &Field, indices: &[u32]) -> Result<FSet> {
        let mut s = FSet::empty(field);
        for &i in indices {
            s.insert(field.elem(i as u64)?);
        }
        Ok(s)
    }

    /// Builds a set from a bitmask; bit `i` selects element `i`. Requires `q <= 64`.
    pub fn from_mask(field: &Field, mask: u64) -> Result<FSet> {
        let q = field.q();
        if q < 64 && mask >> q != 0 {
            return Err(Error::IndexOutOfRange {
                index: 63 - mask.leading_zeros() as u64,
                q,
            });
        }
        if q > 64 {
            return Err(Error::InvalidArgument(format!("bitmask sets need q <= 64, got {q}")));
        }
        Ok(FSet {
            field: field.clone(),
            bits: vec![mask],
            card: mask.count_ones() as usize,
        })
    }

    /// Low 64 bits of the characteristic vector.
    pub fn mask(&self) -> u64 {
        self.bits[0]
    }

    /// Parses `"1,2,3"` or a hex bitmask such as `"0x17"`.
    pub fn parse(field: &Field, text: &str) -> Result<FSet> {
        let text = text.trim();
        let bad = |reason: &str| Error::Parse {
            literal: text.to_string(),
            reason: reason.to_string(),
        };
        if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
            if hex.is_empty() || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
                return Err(bad("expected hexadecimal digits after 0x"));
            }
            let mut s = FSet::empty(field);
            // Least significant nibble is the last character.
            for (k, c) in hex.chars().rev().enumerate() {
                let nib = c.to_digit(16).unwrap();
                for j in 0..4 {
                    if nib >> j & 1 == 1 {
                        s.insert(field.elem((4 * k + j) as u64)?);
                    }
                }
            }
            return Ok(s);
        }
        let mut s = FSet::empty(field);
        if text.is_empty() {
            return Ok(s);
        }
        for part in text.split(',') {
            let part = part.trim();
            let idx: u64 = part.parse().map_err(|_| bad(&format!("{part:?} is not an index")))?;
            s.insert(field.elem(idx)?);
        }
        Ok(s)
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.card
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    #[inline]
    pub fn is_full(&self) -> bool {
        self.card == self.field.q() as usize
    }

    #[inline]
    pub fn contains(&self, e: Elem) -> bool {
        let i = e.index();
        i < self.field.q() as usize && self.bits[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn insert(&mut self, e: Elem) -> bool {
        let i = e.index();
        assert!(i < self.field.q() as usize, "element {i} outside F_{}", self.field.q());
        let (w, b) = (i / WORD, i % WORD);
        let fresh = self.bits[w] >> b & 1 == 0;
        if fresh {
            self.bits[w] |= 1 << b;
            self.card += 1;
        }
        fresh
    }

    pub fn remove(&mut self, e: Elem) -> bool {
        if !self.contains(e) {
            return false;
        }
        let i = e.index();
        self.bits[i / WORD] &= !(1 << (i % WORD));
        self.card -= 1;
        true
    }

    /// Elements in increasing index order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            bits: &self.bits,
            word: 0,
            cur: self.bits.first().copied().unwrap_or(0),
        }
    }

    pub fn first(&self) -> Option<Elem> {
        self.iter().next()
    }

    pub fn to_indices(&self) -> Vec<u32> {
        self.iter().map(|e| e.0).collect()
    }

    fn check_same(&self, other: &FSet) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn zip_with(&self, other: &FSet, op: impl Fn(u64, u64) -> u64) -> Result<FSet> {
        self.check_same(other)?;
        let bits: Vec<u64> = self.bits.iter().zip(&other.bits).map(|(&x, &y)| op(x, y)).collect();
        Ok(FSet::from_bits(&self.field, bits))
    }

    fn from_bits(field: &Field, bits: Vec<u64>) -> FSet {
        let mut s = FSet {
            field: field.clone(),
            bits,
            card: 0,
        };
        s.trim();
        s
    }

    /// Clears bits at positions `>= q` and refreshes the cached cardinality.
    fn trim(&mut self) {
        let q = self.field.q() as usize;
        if !q.is_multiple_of(WORD) {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << (q % WORD)) - 1;
            }
        }
        self.card = self.bits.iter().map(|w| w.count_ones() as usize).sum();
    }

    pub fn union(&self, other: &FSet) -> Result<FSet> {
        self.zip_with(other, |x, y| x | y)
    }

    pub fn intersection(&self, other: &FSet) -> Result<FSet> {
        self.zip_with(other, |x, y| x & y)
    }

    /// Set difference `self \ other` (not the difference set `A - B`).
    pub fn without(&self, other: &FSet) -> Result<FSet> {
        self.zip_with(other, |x, y| x & !y)
    }

    pub fn is_disjoint(&self, other: &FSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(x, y)| x & y == 0)
    }

    pub fn is_subset(&self, other: &FSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(x, y)| x & !y == 0)
    }

    pub fn complement(&self) -> FSet {
        FSet::from_bits(&self.field, self.bits.iter().map(|w| !w).collect())
    }

    /// The sumset `{a + b : a ∈ self, b ∈ other}`.
    pub fn sumset(&self, other: &FSet) -> Result<FSet> {
        self.check_same(other)?;
        if self.is_empty() || other.is_empty() {
            return Ok(FSet::empty(&self.field));
        }
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let words = self.bits.len();
        if self.field.is_prime_field() && large.len() > 2 * words {
            Ok(rotate_union(small, large))
        } else {
            Ok(self.pairwise(other, |f, a, b| f.add(a, b)))
        }
    }

    /// The difference set `{a - b : a ∈ self, b ∈ other}`.
    pub fn difference_set(&self, other: &FSet) -> Result<FSet> {
        self.sumset(&other.negate())
    }

    /// The product set `{ab : a ∈ self, b ∈ other}`.
    pub fn product_set(&self, other: &FSet) -> Result<FSet> {
        self.check_same(other)?;
        Ok(self.pairwise(other, |f, a, b| f.mul(a, b)))
    }

    fn pairwise(&self, other: &FSet, op: impl Fn(&Field, Elem, Elem) -> Elem) -> FSet {
        let mut out = FSet::empty(&self.field);
        'outer: for a in self.iter() {
            for b in other.iter() {
                out.insert(op(&self.field, a, b));
            }
            if out.is_full() {
                break 'outer;
            }
        }
        out
    }

    /// The dilate `ξ·self`. `ξ = 0` collapses a nonempty set to `{0}`.
    pub fn dilate(&self, xi: Elem) -> FSet {
        FSet::from_elems(&self.field, self.iter().map(|b| self.field.mul(xi, b)))
    }

    /// `-self`.
    pub fn negate(&self) -> FSet {
        FSet::from_elems(&self.field, self.iter().map(|a| self.field.neg(a)))
    }

    /// The d-fold sumset `dS = S + ... + S`.
    pub fn iterate_sum(&self, d: u32) -> Result<FSet> {
        if d < 1 {
            return Err(Error::ZeroMultiplicity);
        }
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut acc = self.clone();
        for _ in 1..d {
            if acc.is_full() {
                break;
            }
            acc = acc.sumset(self)?;
        }
        Ok(acc)
    }
}

/// `dAB`, the d-fold sumset of the product set.
pub fn d_ab(a: &FSet, b: &FSet, d: u32) -> Result<FSet> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    a.product_set(b)?.iterate_sum(d)
}

/// Prime-field sumset: OR of `large` rotated by every element of `small`.
fn rotate_union(small: &FSet, large: &FSet) -> FSet {
    let q = large.field.q() as usize;
    let words = large.bits.len();
    // `doubled` holds `large` at bit offsets 0 and q so any q-bit window is a rotation.
    let mut doubled = vec![0u64; words_for(2 * q as u32) + 2];
    for (w, &x) in large.bits.iter().enumerate() {
        doubled[w] |= x;
        let (dw, db) = ((w * WORD + q) / WORD, (w * WORD + q) % WORD);
        doubled[dw] |= x << db;
        if db != 0 {
            doubled[dw + 1] |= x >> (WORD - db);
        }
    }
    let mut out = vec![0u64; words];
    let mut since_check = 0;
    for a in small.iter() {
        // out bit j takes large bit (j - a) mod q, i.e. doubled bit j + q - a.
        let off = (q - a.index()) % q;
        let (base, shift) = (off / WORD, off % WORD);
        if shift == 0 {
            for (w, o) in out.iter_mut().enumerate() {
                *o |= doubled[base + w];
            }
        } else {
            for (w, o) in out.iter_mut().enumerate() {
                *o |= (doubled[base + w] >> shift) | (doubled[base + w + 1] << (WORD - shift));
            }
        }
        since_check += 1;
        if since_check == 32 {
            since_check = 0;
            let probe = FSet::from_bits(&large.field, out.clone());
            if probe.is_full() {
                return probe;
            }
        }
    }
    FSet::from_bits(&large.field, out)
}

pub struct Iter<'a> {
    bits: &'a [u64],
    word: usize,
    cur: u64,
}

impl Iterator for Iter<'_> {
    type Item = Elem;

    #[inline]
    fn next(&mut self) -> Option<Elem> {
        loop {
            if self.cur != 0 {
                let tz = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(Elem((self.word * WORD + tz) as u32));
            }
            self.word += 1;
            if self.word >= self.bits.len() {
                return None;
            }
            self.cur = self.bits[self.word];
        }
    }
}

impl<'a> IntoIterator for &'a FSet {
    type Item = Elem;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}
