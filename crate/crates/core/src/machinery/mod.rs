//! Collision counting, choice of a good dilation ξ, the sets `C± = A ± ξB`,
//! involved elements, symmetric splits and non-trivial intersection
//! certificates.
//!
//! For nonempty `A, B ⊆ F_q` and `ξ ≠ 0` the energy `E(ξ)` counts quadruples
//! `(a₁, b₁, a₂, b₂) ∈ A×B×A×B` with `a₁ + ξb₁ = a₂ + ξb₂`. It is computed from
//! the representation histogram `r(y) = #{(a, b) : a + ξb = y}` as `Σ r(y)²`.
//! When `|A||B| > q` some ξ has `E(ξ) < 2|A|²|B|²/q`, and then by
//! Cauchy–Schwarz both `|A + ξB|` and `|A − ξB|` exceed `q/2`.

mod certificate;
mod fuv;
mod split;

pub use certificate::{certificate_at, find_nontrivial_x, first_pair_sums, CertCase, Intersection, XiCertificate};
pub use fuv::{f_uv, grid_check, CriticalPoint, GridCheck};
pub use split::{nine_sets, sym_split, NineLabel, NineSets, SymSplit};

use serde::{Deserialize, Serialize};

use crate::error::{Error, LemmaKind, LemmaViolation, Result};
use crate::field::{Elem, Field};
use crate::setalg::FSet;
use crate::Rational;

/// Which of `A + ξB` / `A − ξB` an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `±ξ` as a field element.
    pub fn apply(self, field: &Field, xi: Elem) -> Elem {
        match self {
            Sign::Plus => xi,
            Sign::Minus => field.neg(xi),
        }
    }
}

/// Collision statistics for one ξ, serialized as
/// `{"xi": 2, "energy": 8, "bound_num": 72, "bound_den": 5, "card_plus": 5, "card_minus": 5}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub xi: Elem,
    pub energy: u64,
    /// `2|A|²|B|²/q` in lowest terms.
    pub bound_num: u128,
    pub bound_den: u128,
    pub card_plus: usize,
    pub card_minus: usize,
}

impl EnergyReport {
    pub fn bound(&self) -> Rational {
        Rational::new(self.bound_num as i128, self.bound_den as i128)
    }

    /// Strict `energy < 2|A|²|B|²/q`, compared exactly.
    pub fn meets_bound(&self) -> bool {
        (self.energy as u128) * self.bound_den < self.bound_num
    }
}

pub(crate) fn check_pair(a: &FSet, b: &FSet) -> Result<()> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(())
}

/// Rejects `|A||B| <= q`.
pub fn check_size_condition(a: &FSet, b: &FSet) -> Result<()> {
    check_pair(a, b)?;
    let q = a.field().q();
    if (a.len() as u64) * (b.len() as u64) <= q as u64 {
        return Err(Error::SizeCondition {
            card_a: a.len() as u64,
            card_b: b.len() as u64,
            q,
        });
    }
    Ok(())
}

fn fill_histogram(a: &FSet, b: &FSet, coef: Elem, counts: &mut [u32]) {
    let field = a.field();
    counts.iter_mut().for_each(|c| *c = 0);
    let scaled: Vec<Elem> = b.iter().map(|y| field.mul(coef, y)).collect();
    for x in a.iter() {
        for &s in &scaled {
            counts[field.add(x, s).index()] += 1;
        }
    }
}

fn energy_with(a: &FSet, b: &FSet, xi: Elem, counts: &mut [u32]) -> u64 {
    fill_histogram(a, b, xi, counts);
    counts.iter().map(|&r| r as u64 * r as u64).sum()
}

/// Number of solutions of `a₁ + ξb₁ = a₂ + ξb₂` over `A×B×A×B`.
pub fn energy(a: &FSet, b: &FSet, xi: Elem) -> Result<u64> {
    check_pair(a, b)?;
    if xi.is_zero() {
        return Err(Error::ZeroXi);
    }
    let mut counts = vec![0u32; a.field().q() as usize];
    Ok(energy_with(a, b, xi, &mut counts))
}

/// `(|A + ξB|, |A − ξB|)` for `ξ ≠ 0`.
pub fn c_sets(a: &FSet, b: &FSet, xi: Elem) -> Result<(FSet, FSet)> {
    check_pair(a, b)?;
    if xi.is_zero() {
        return Err(Error::ZeroXi);
    }
    let field = a.field();
    let plus = a.sumset(&b.dilate(xi))?;
    let minus = a.sumset(&b.dilate(field.neg(xi)))?;
    Ok((plus, minus))
}

/// Energy, bound and `|C±|` for a given ξ. Makes no claim about the bound.
pub fn energy_report(a: &FSet, b: &FSet, xi: Elem) -> Result<EnergyReport> {
    let e = energy(a, b, xi)?;
    let (plus, minus) = c_sets(a, b, xi)?;
    Ok(report_from(a, b, xi, e, plus.len(), minus.len()))
}

fn report_from(a: &FSet, b: &FSet, xi: Elem, energy: u64, card_plus: usize, card_minus: usize) -> EnergyReport {
    let m = a.len() as i128 * b.len() as i128;
    let bound = Rational::new(2 * m * m, a.field().q() as i128);
    EnergyReport {
        xi,
        energy,
        bound_num: *bound.numer() as u128,
        bound_den: *bound.denom() as u128,
        card_plus,
        card_minus,
    }
}

/// Scans every ξ ≠ 0 and returns the report for the smallest-index ξ of
/// minimum energy, after checking `E(ξ) < 2|A|²|B|²/q` and `|C±| > q/2`.
///
/// A failed check is returned as [`Error::LemmaViolation`].
pub fn find_good_xi(a: &FSet, b: &FSet) -> Result<EnergyReport> {
    check_size_condition(a, b)?;
    let field = a.field();
    let q = field.q();
    let mut counts = vec![0u32; q as usize];
    let mut best: Option<(Elem, u64)> = None;
    for xi in field.nonzero() {
        let e = energy_with(a, b, xi, &mut counts);
        if best.is_none_or(|(_, be)| e < be) {
            best = Some((xi, e));
        }
    }
    let (xi, e) = best.expect("q >= 2 has a nonzero element");
    let violation = |kind, detail: String| {
        Error::LemmaViolation(Box::new(LemmaViolation {
            kind,
            q,
            a: a.to_indices(),
            b: b.to_indices(),
            min_energy: Some(e),
            detail,
        }))
    };
    let (plus, minus) = c_sets(a, b, xi)?;
    let report = report_from(a, b, xi, e, plus.len(), minus.len());
    if !report.meets_bound() {
        return Err(violation(
            LemmaKind::EnergyBound,
            format!("minimum energy {e} at xi = {} is not below {}", xi, report.bound()),
        ));
    }
    if 2 * plus.len() <= q as usize || 2 * minus.len() <= q as usize {
        return Err(violation(
            LemmaKind::HalfCover,
            format!("|C+| = {}, |C-| = {} at xi = {}", plus.len(), minus.len(), xi),
        ));
    }
    Ok(report)
}

/// All representations `y = a + c·b` bucketed by `y`, each bucket in scan
/// order (`a` ascending, then `b` ascending).
#[derive(Clone, Debug)]
pub struct RepTable {
    offsets: Vec<u32>,
    reps: Vec<(Elem, Elem)>,
}

impl RepTable {
    /// Representations of `a + coef·b`; `coef = ±ξ` gives `C±`.
    pub fn build(a: &FSet, b: &FSet, coef: Elem) -> RepTable {
        let field = a.field();
        let q = field.q() as usize;
        let mut counts = vec![0u32; q];
        fill_histogram(a, b, coef, &mut counts);
        let mut offsets = vec![0u32; q + 1];
        for y in 0..q {
            offsets[y + 1] = offsets[y] + counts[y];
        }
        let mut cursor = offsets.clone();
        let mut reps = vec![(Elem::ZERO, Elem::ZERO); offsets[q] as usize];
        for x in a.iter() {
            for y in b.iter() {
                let s = field.add(x, field.mul(coef, y)).index();
                reps[cursor[s] as usize] = (x, y);
                cursor[s] += 1;
            }
        }
        RepTable { offsets, reps }
    }

    #[inline]
    pub fn get(&self, y: Elem) -> &[(Elem, Elem)] {
        let i = y.index();
        &self.reps[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// First representation of `y` in scan order.
    pub fn first(&self, y: Elem) -> Option<(Elem, Elem)> {
        self.get(y).first().copied()
    }
}

/// An element of `A ± ξB` with more than one representation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Involved {
    pub y: Elem,
    pub sign: Sign,
    pub reps: Vec<(Elem, Elem)>,
}

/// Smallest-index `y ∈ A ± ξB` with at least two representations, with all of
/// its representations in scan order. Exists by pigeonhole once `|A||B| > q`.
pub fn find_involved(a: &FSet, b: &FSet, xi: Elem, sign: Sign) -> Result<Involved> {
    check_size_condition(a, b)?;
    if xi.is_zero() {
        return Err(Error::ZeroXi);
    }
    let field = a.field();
    let table = RepTable::build(a, b, sign.apply(field, xi));
    field
        .elements()
        .find(|&y| table.get(y).len() >= 2)
        .map(|y| Involved {
            y,
            sign,
            reps: table.get(y).to_vec(),
        })
        .ok_or_else(|| {
            Error::LemmaViolation(Box::new(LemmaViolation {
                kind: LemmaKind::NoInvolved,
                q: field.q(),
                a: a.to_indices(),
                b: b.to_indices(),
                min_energy: None,
                detail: format!("no element of A {} xi*B has two representations", if sign == Sign::Plus { "+" } else { "-" }),
            }))
        })
}
