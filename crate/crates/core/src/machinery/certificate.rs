//! Non-trivial elements of the pairwise intersections of `C⁺, C⁻, −C⁺, −C⁻`.
//!
//! An element `x` lying in two of the four sets carries a pair of
//! representations, and the pair pins ξ down as a ratio of element sums unless
//! the denominator vanishes. Four intersections are scanned, in this order:
//!
//! | intersection | equation                  | ξ                          | uses |
//! |--------------|---------------------------|----------------------------|------|
//! | `C⁺ ∩ −C⁺`   | `a₁+ξb₁ = −a₂−ξb₂`        | `−(a₁+a₂)/(b₁+b₂)`         | `C⁻` |
//! | `C⁻ ∩ −C⁻`   | `a₁−ξb₁ = −a₂+ξb₂`        | `(a₁+a₂)/(b₁+b₂)`          | `C⁺` |
//! | `C⁺ ∩ C⁻`    | `a₁+ξb₁ = a₂−ξb₂`         | `(a₂+a₃+a₄)/(b₁+b₂)`       | `C⁺` |
//! | `C⁺ ∩ −C⁻`   | `a₁+ξb₁ = −a₂+ξb₂`        | `(a₁+a₂)/(b₂+b₃+b₄)`       | `C⁺` |
//!
//! where `−a₁ = a₃+a₄` and `−b₁ = b₃+b₄` are taken from `A+A` and `B+B`. The
//! other two intersections are negations of the last two and add nothing.

use serde::{Deserialize, Serialize};

use super::{check_pair, RepTable, Sign};
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::setalg::FSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CertCase {
    /// Two-term numerator and denominator.
    #[serde(rename = "X_PP_NP")]
    PlusNegPlus,
    /// Three-term numerator via `−a₁ ∈ A+A`.
    #[serde(rename = "X_PP_PM")]
    PlusPlusMinus,
    /// Three-term denominator via `−b₁ ∈ B+B`.
    #[serde(rename = "X_PP_NM")]
    PlusNegMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Intersection {
    #[serde(rename = "C+ & -C+")]
    PlusNegPlus,
    #[serde(rename = "C- & -C-")]
    MinusNegMinus,
    #[serde(rename = "C+ & C-")]
    PlusMinus,
    #[serde(rename = "C+ & -C-")]
    PlusNegMinus,
}

/// ξ written as a ratio of sums of set elements.
///
/// `ξ · Σ denominator_terms = ± Σ numerator_terms`, the sign being `+` for
/// `orientation = Plus` and `−` for `Minus`. Scaling `C^orientation` by the
/// denominator then lands inside `(|num| + |den|)·AB`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiCertificate {
    pub case: CertCase,
    pub pair: Intersection,
    pub x: Elem,
    /// `(a₁, b₁, a₂, b₂)`.
    pub rep: [Elem; 4],
    pub numerator_terms: Vec<Elem>,
    pub denominator_terms: Vec<Elem>,
    pub orientation: Sign,
}

impl XiCertificate {
    pub fn numerator(&self, field: &Field) -> Elem {
        field.sum(self.numerator_terms.iter().copied())
    }

    pub fn denominator(&self, field: &Field) -> Elem {
        field.sum(self.denominator_terms.iter().copied())
    }

    /// Replays every claim of the certificate against `(A, B, ξ)`.
    pub fn verify(&self, a: &FSet, b: &FSet, xi: Elem) -> bool {
        let field = a.field();
        let (nn, nd) = (self.numerator_terms.len(), self.denominator_terms.len());
        if nn > 3 || nd > 3 || nn + nd > 5 {
            return false;
        }
        if !self.numerator_terms.iter().all(|&t| a.contains(t))
            || !self.denominator_terms.iter().all(|&t| b.contains(t))
        {
            return false;
        }
        let den = self.denominator(field);
        if den.is_zero() {
            return false;
        }
        let num = match self.orientation {
            Sign::Plus => self.numerator(field),
            Sign::Minus => field.neg(self.numerator(field)),
        };
        if field.mul(xi, den) != num {
            return false;
        }
        let [a1, b1, a2, b2] = self.rep;
        if !(a.contains(a1) && a.contains(a2) && b.contains(b1) && b.contains(b2)) {
            return false;
        }
        let plus = |x, y| field.add(x, field.mul(xi, y));
        let minus = |x, y| field.sub(x, field.mul(xi, y));
        let (lhs, rhs) = match self.pair {
            Intersection::PlusNegPlus => (plus(a1, b1), field.neg(plus(a2, b2))),
            Intersection::MinusNegMinus => (minus(a1, b1), field.neg(minus(a2, b2))),
            Intersection::PlusMinus => (plus(a1, b1), minus(a2, b2)),
            Intersection::PlusNegMinus => (plus(a1, b1), field.neg(minus(a2, b2))),
        };
        lhs == self.x && rhs == self.x
    }
}

/// For every `s`, the lexicographically first `(x, y) ∈ S×S` with `x + y = s`.
pub fn first_pair_sums(s: &FSet) -> Vec<Option<(Elem, Elem)>> {
    let field = s.field();
    let mut out = vec![None; field.q() as usize];
    for x in s.iter() {
        for y in s.iter() {
            let slot = &mut out[field.add(x, y).index()];
            if slot.is_none() {
                *slot = Some((x, y));
            }
        }
    }
    out
}

impl Intersection {
    /// Scan order of [`find_nontrivial_x`].
    pub const ORDER: [Intersection; 4] = [
        Intersection::PlusNegPlus,
        Intersection::MinusNegMinus,
        Intersection::PlusMinus,
        Intersection::PlusNegMinus,
    ];
}

/// Scans the intersections for an element whose representation pair fixes ξ
/// with a nonzero denominator.
///
/// Representations that would need `−a₁ ∈ A+A` (resp. `−b₁ ∈ B+B`) are passed
/// over when that membership fails. `None` means every usable pair is
/// degenerate.
pub fn find_nontrivial_x(a: &FSet, b: &FSet, xi: Elem) -> Result<Option<XiCertificate>> {
    for which in Intersection::ORDER {
        if let Some(c) = certificate_at(a, b, xi, which)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// The first non-trivial element of one intersection, in index order.
pub fn certificate_at(a: &FSet, b: &FSet, xi: Elem, which: Intersection) -> Result<Option<XiCertificate>> {
    check_pair(a, b)?;
    if xi.is_zero() {
        return Err(Error::ZeroXi);
    }
    let field = a.field();
    let plus = RepTable::build(a, b, xi);
    let found = match which {
        Intersection::PlusNegPlus => scan(field, &plus, &plus, true, |&(a1, b1), &(a2, b2)| {
            let den = field.add(b1, b2);
            (!den.is_zero()).then(|| (vec![a1, a2], vec![b1, b2], Sign::Minus))
        }),
        Intersection::MinusNegMinus => {
            let minus = RepTable::build(a, b, field.neg(xi));
            scan(field, &minus, &minus, true, |&(a1, b1), &(a2, b2)| {
                let den = field.add(b1, b2);
                (!den.is_zero()).then(|| (vec![a1, a2], vec![b1, b2], Sign::Plus))
            })
        }
        Intersection::PlusMinus => {
            let minus = RepTable::build(a, b, field.neg(xi));
            let a_sums = first_pair_sums(a);
            scan(field, &plus, &minus, false, |&(a1, b1), &(a2, b2)| {
                if field.add(b1, b2).is_zero() {
                    return None;
                }
                let (a3, a4) = a_sums[field.neg(a1).index()]?;
                Some((vec![a2, a3, a4], vec![b1, b2], Sign::Plus))
            })
        }
        Intersection::PlusNegMinus => {
            let minus = RepTable::build(a, b, field.neg(xi));
            let b_sums = first_pair_sums(b);
            scan(field, &plus, &minus, true, |&(a1, b1), &(a2, b2)| {
                if b1 == b2 {
                    return None;
                }
                let (b3, b4) = b_sums[field.neg(b1).index()]?;
                Some((vec![a1, a2], vec![b2, b3, b4], Sign::Plus))
            })
        }
    };
    let case = match which {
        Intersection::PlusNegPlus | Intersection::MinusNegMinus => CertCase::PlusNegPlus,
        Intersection::PlusMinus => CertCase::PlusPlusMinus,
        Intersection::PlusNegMinus => CertCase::PlusNegMinus,
    };
    Ok(found.map(|(x, rep, (num, den, orientation))| XiCertificate {
        case,
        pair: which,
        x,
        rep,
        numerator_terms: num,
        denominator_terms: den,
        orientation,
    }))
}

type Terms = (Vec<Elem>, Vec<Elem>, Sign);

/// Walks `x` in index order and pairs every representation of `x` in `first`
/// with every representation in `second` (taken at `−x` when `negate_second`).
fn scan(
    field: &Field,
    first: &RepTable,
    second: &RepTable,
    negate_second: bool,
    mut accept: impl FnMut(&(Elem, Elem), &(Elem, Elem)) -> Option<Terms>,
) -> Option<(Elem, [Elem; 4], Terms)> {
    for x in field.elements() {
        let lhs = first.get(x);
        if lhs.is_empty() {
            continue;
        }
        let other = if negate_second { field.neg(x) } else { x };
        for r1 in lhs {
            for r2 in second.get(other) {
                if let Some(terms) = accept(r1, r2) {
                    return Some((x, [r1.0, r1.1, r2.0, r2.1], terms));
                }
            }
        }
    }
    None
}
