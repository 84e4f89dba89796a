//! Exact arithmetic in F_q, q = p^n.
//!
//! Every element is addressed by a single index in `[0, q)`. For a prime field
//! the index is the residue itself. For an extension the index packs the
//! coefficient vector `(c_0, ..., c_{n-1})` of the polynomial representative as
//! `c_0 + c_1 p + ... + c_{n-1} p^{n-1}`, so index 0 is zero and index 1 is one
//! in every field. The polynomial model is fixed by the canonical modulus: the
//! monic irreducible of degree n whose packed integer (leading term included)
//! is smallest.
//!
//! ```
//! use sumprod::field::{Elem, Field};
//!
//! let f4 = Field::new(2, 2).unwrap();
//! assert_eq!(f4.spec().modulus, Some(vec![1, 1, 1])); // x^2 + x + 1
//! assert_eq!(f4.mul(Elem(2), Elem(2)), Elem(3));      // x * x = x + 1
//! ```

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 20;

/// Fields up to this order carry full addition and multiplication tables.
const TABLE_LIMIT: u32 = 256;

/// Longest coefficient vector ever needed: 2^20 bounds n by 20.
const MAX_DEGREE: usize = 20;

/// A field element, identified by its canonical index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Serializable description of a field: `{"p": 3, "n": 2, "q": 9, "modulus": [1,0,1]}`.
///
/// `modulus` lists coefficients constant term first and is `null` for prime fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub n: u32,
    pub q: u32,
    pub modulus: Option<Vec<u32>>,
}

/// Handle to an immutable finite field. Cloning is cheap.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

struct Inner {
    spec: FieldSpec,
    /// Monic modulus, constant term first; `[0, 1]` for prime fields.
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Field").field(&self.0.spec).finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Field {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits `q` into `(p, n)` with `q = p^n`, or reports that it is not a prime power.
pub fn factor_prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let (mut rest, mut n) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        n += 1;
    }
    if rest != 1 {
        return Err(Error::NotPrimePower(q));
    }
    Ok((p, n))
}

impl Field {
    /// Builds F_{p^n} with the canonical modulus.
    pub fn new(p: u64, n: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n < 1 {
            return Err(Error::ZeroDegree);
        }
        let q = p
            .checked_pow(n)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(Error::OrderTooLarge { p, n })?;
        let (p, q) = (p as u32, q as u32);
        let modulus = if n == 1 {
            vec![0, 1]
        } else {
            canonical_modulus(p, n)
        };
        let spec = FieldSpec {
            p,
            n,
            q,
            modulus: (n > 1).then(|| modulus.clone()),
        };
        let mut inner = Inner {
            spec,
            modulus,
            tables: None,
        };
        if q <= TABLE_LIMIT {
            inner.tables = Some(Tables::build(&inner));
        }
        Ok(Field(Arc::new(inner)))
    }

    /// Resolves a prime power to its canonical `(p, n)` field.
    pub fn from_order(q: u64) -> Result<Field> {
        let (p, n) = factor_prime_power(q)?;
        Field::new(p, n)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.spec.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.0.spec.n
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.spec.q
    }

    #[inline]
    pub fn is_prime_field(&self) -> bool {
        self.0.spec.n == 1
    }

    /// Validates an index.
    pub fn elem(&self, index: u64) -> Result<Elem> {
        if index < self.q() as u64 {
            Ok(Elem(index as u32))
        } else {
            Err(Error::IndexOutOfRange {
                index,
                q: self.q(),
            })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q()).map(Elem)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Elem> {
        (1..self.q()).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        debug_assert!(a.0 < self.q() && b.0 < self.q());
        match &self.0.tables {
            Some(t) => Elem(t.add[a.index() * self.q() as usize + b.index()]),
            None => Elem(self.0.raw_add(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        debug_assert!(a.0 < self.q());
        match &self.0.tables {
            Some(t) => Elem(t.neg[a.index()]),
            None => Elem(self.0.raw_neg(a.0)),
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        debug_assert!(a.0 < self.q() && b.0 < self.q());
        match &self.0.tables {
            Some(t) => Elem(t.mul[a.index() * self.q() as usize + b.index()]),
            None => Elem(self.0.raw_mul(a.0, b.0)),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(match &self.0.tables {
            Some(t) => Elem(t.inv[a.index()]),
            None => Elem(self.0.raw_inv(a.0)),
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        Elem(self.0.raw_pow(a.0, e))
    }

    /// Sum of a slice of elements.
    pub fn sum<I: IntoIterator<Item = Elem>>(&self, items: I) -> Elem {
        items.into_iter().fold(Elem::ZERO, |acc, x| self.add(acc, x))
    }
}

impl Inner {
    fn raw_add(&self, a: u32, b: u32) -> u32 {
        let FieldSpec { p, n, .. } = self.spec;
        if n == 1 {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        if p == 2 {
            return a ^ b;
        }
        let (mut a, mut b, mut out, mut w) = (a, b, 0, 1);
        for _ in 0..n {
            let d = (a % p + b % p) % p;
            out += d * w;
            w *= p;
            a /= p;
            b /= p;
        }
        out
    }

    fn raw_neg(&self, a: u32) -> u32 {
        let FieldSpec { p, n, .. } = self.spec;
        if n == 1 {
            return if a == 0 { 0 } else { p - a };
        }
        if p == 2 {
            return a;
        }
        let (mut a, mut out, mut w) = (a, 0, 1);
        for _ in 0..n {
            out += ((p - a % p) % p) * w;
            w *= p;
            a /= p;
        }
        out
    }

    fn raw_mul(&self, a: u32, b: u32) -> u32 {
        let FieldSpec { p, n, .. } = self.spec;
        if n == 1 {
            return ((a as u64 * b as u64) % p as u64) as u32;
        }
        let n = n as usize;
        let (ca, cb) = (unpack(a, p, n), unpack(b, p, n));
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..n {
            if ca[i] == 0 {
                continue;
            }
            for j in 0..n {
                prod[i + j] += ca[i] as u64 * cb[j] as u64;
            }
        }
        let p64 = p as u64;
        for c in prod.iter_mut().take(2 * n - 1) {
            *c %= p64;
        }
        // Eliminate x^k for k >= n using x^n = -(m_0 + ... + m_{n-1} x^{n-1}).
        for k in (n..2 * n - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..n {
                let m = self.modulus[i] as u64;
                prod[k - n + i] = (prod[k - n + i] + (p64 - c) * m) % p64;
            }
        }
        let mut out = 0u32;
        for i in (0..n).rev() {
            out = out * p + prod[i] as u32;
        }
        out
    }

    fn raw_pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1u32);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn raw_inv(&self, a: u32) -> u32 {
        self.raw_pow(a, self.spec.q as u64 - 2)
    }
}

impl Tables {
    fn build(inner: &Inner) -> Tables {
        let q = inner.spec.q as usize;
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            for b in 0..q {
                add[a * q + b] = inner.raw_add(a as u32, b as u32);
                mul[a * q + b] = inner.raw_mul(a as u32, b as u32);
            }
        }
        let neg = (0..q as u32).map(|a| inner.raw_neg(a)).collect();
        let inv = (0..q as u32).map(|a| if a == 0 { 0 } else { inner.raw_inv(a) }).collect();
        Tables { add, mul, neg, inv }
    }
}

fn unpack(mut x: u32, p: u32, n: usize) -> [u32; MAX_DEGREE] {
    let mut out = [0; MAX_DEGREE];
    for c in out.iter_mut().take(n) {
        *c = x % p;
        x /= p;
    }
    out
}

/// Coefficients (constant first) of the monic polynomial of degree `deg`
/// whose lower coefficients pack to `k`.
fn monic_from_packed(k: u64, p: u32, deg: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(deg + 1);
    let mut k = k;
    for _ in 0..deg {
        out.push((k % p as u64) as u32);
        k /= p as u64;
    }
    out.push(1);
    out
}

/// Remainder of `f` modulo the monic `g` over F_p.
fn poly_rem(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    let p = p as u64;
    while r.len() > dg {
        let lead = r.pop().unwrap() % p;
        if lead != 0 {
            let base = r.len() - dg;
            for i in 0..dg {
                r[base + i] = (r[base + i] + (p - lead) * g[i] as u64) % p;
            }
        }
    }
    r.into_iter().map(|c| (c % p) as u32).collect()
}

/// Irreducibility by trial division against every monic polynomial of degree
/// at most `deg(f) / 2`.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    for d in 1..=n / 2 {
        let count = (p as u64).pow(d as u32);
        for k in 0..count {
            let g = monic_from_packed(k, p, d);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn canonical_modulus(p: u32, n: u32) -> Vec<u32> {
    let count = (p as u64).pow(n);
    (0..count)
        .map(|k| monic_from_packed(k, p, n as usize))
        .find(|f| is_irreducible(f, p))
        .expect("an irreducible polynomial exists in every degree")
}
