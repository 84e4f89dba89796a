//! Explicit witnesses `t = a₁b₁ + ... + a_d b_d` with `d <= 10`.
//!
//! Every constructive branch has the same shape. Pick ξ with small energy, so
//! `|C±| > q/2` where `C± = A ± ξB`. Write ξ as a ratio of short sums of set
//! elements, `ξ·S = ±N` with `S = Σ βᵢ` and `N = Σ αᵢ`. Then every element of
//! `S·C±` expands as
//!
//! ```text
//! S·(a + (±ξ)b) = Σ βᵢ·a + Σ αᵢ·b
//! ```
//!
//! which is a sum of `|β| + |α|` products. Because `|S·C±| = |C±| > q/2`, any
//! `t` is a sum of two such elements, giving `d = 2(|β| + |α|)`.
//!
//! The branches differ only in where the ratio comes from:
//!
//! * `L4A` / `L4B`: an element of `−A` outside `A + A` (or the same for `B`),
//!   giving `|α| = 3, |β| = 2`.
//! * `X_PP_NP`, `X_PP_PM`, `X_PP_NM`: a non-trivial intersection certificate,
//!   see [`crate::machinery::find_nontrivial_x`].
//! * `SYM_A` / `SYM_B`: an involved element when `A` (resp. `B`) is symmetric.
//!   Unreachable in the automatic order, since a symmetric set always yields a
//!   certificate first, but available through [`Branch`].
//! * `FALLBACK`: shortest witness by layered search.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, LemmaKind, LemmaViolation, Result, TheoremViolation};
use crate::field::{Elem, Field};
use crate::machinery::{
    c_sets, certificate_at, check_size_condition, find_good_xi, find_involved, find_nontrivial_x, sym_split,
    CertCase, EnergyReport, Intersection, RepTable, Sign, XiCertificate,
};
use crate::oracle::{WitnessSearch, DEFAULT_D_MAX};
use crate::setalg::FSet;

/// Upper bound on the length of any witness.
pub const MAX_PRODUCTS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Case {
    #[serde(rename = "L4A")]
    MissingNegA,
    #[serde(rename = "L4B")]
    MissingNegB,
    #[serde(rename = "X_PP_NP")]
    PlusNegPlus,
    #[serde(rename = "X_PP_PM")]
    PlusPlusMinus,
    #[serde(rename = "X_PP_NM")]
    PlusNegMinus,
    #[serde(rename = "SYM_A")]
    SymmetricA,
    #[serde(rename = "SYM_B")]
    SymmetricB,
    #[serde(rename = "FALLBACK")]
    Fallback,
}

impl Case {
    pub const ALL: [Case; 8] = [
        Case::MissingNegA,
        Case::MissingNegB,
        Case::PlusNegPlus,
        Case::PlusPlusMinus,
        Case::PlusNegMinus,
        Case::SymmetricA,
        Case::SymmetricB,
        Case::Fallback,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Case::MissingNegA => "L4A",
            Case::MissingNegB => "L4B",
            Case::PlusNegPlus => "X_PP_NP",
            Case::PlusPlusMinus => "X_PP_PM",
            Case::PlusNegMinus => "X_PP_NM",
            Case::SymmetricA => "SYM_A",
            Case::SymmetricB => "SYM_B",
            Case::Fallback => "FALLBACK",
        }
    }

    /// Longest witness the case may emit.
    pub fn max_len(self) -> usize {
        match self {
            Case::PlusNegPlus | Case::SymmetricA | Case::SymmetricB => 8,
            _ => MAX_PRODUCTS,
        }
    }

    /// Length emitted by a constructive branch; `None` for the fallback.
    pub fn exact_len(self) -> Option<usize> {
        match self {
            Case::Fallback => None,
            c => Some(c.max_len()),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl From<CertCase> for Case {
    fn from(c: CertCase) -> Case {
        match c {
            CertCase::PlusNegPlus => Case::PlusNegPlus,
            CertCase::PlusPlusMinus => Case::PlusPlusMinus,
            CertCase::PlusNegMinus => Case::PlusNegMinus,
        }
    }
}

/// One product `a·b` with `a ∈ A`, `b ∈ B`. Serialized as `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProductPair {
    pub a: Elem,
    pub b: Elem,
}

impl Serialize for ProductPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a.0, self.b.0].serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProductPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[u32; 2]>::deserialize(d)?;
        Ok(ProductPair { a: Elem(a), b: Elem(b) })
    }
}

/// `{"t": 0, "case": "X_PP_NP", "xi": 2, "d": 8, "pairs": [[1,1],[2,2],...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub t: Elem,
    pub case: Case,
    pub xi: Option<Elem>,
    pub d: usize,
    pub pairs: Vec<ProductPair>,
}

impl Witness {
    pub fn value(&self, field: &Field) -> Elem {
        field.sum(self.pairs.iter().map(|p| field.mul(p.a, p.b)))
    }
}

/// True iff every pair lies in `A×B`, the products sum to `t`, and the length
/// respects the case's bound.
pub fn verify_witness(a: &FSet, b: &FSet, w: &Witness) -> bool {
    let field = a.field();
    if field != b.field() || w.t.0 >= field.q() {
        return false;
    }
    if w.d != w.pairs.len() || w.d == 0 || w.d > w.case.max_len() {
        return false;
    }
    if !w.pairs.iter().all(|p| a.contains(p.a) && b.contains(p.b)) {
        return false;
    }
    w.value(field) == w.t
}

/// `(c₁, c₂) ∈ C×C` with `c₁ + c₂ = t`, `c₁` the smallest such index.
/// Requires `|C| > q/2`, which forces `C ∩ (t − C)` to be nonempty.
pub fn cover_pair(c: &FSet, t: Elem) -> Result<(Elem, Elem)> {
    let field = c.field();
    let q = field.q();
    if 2 * c.len() <= q as usize {
        return Err(Error::CoverSize {
            card: c.len() as u64,
            q,
        });
    }
    c.iter()
        .map(|c1| (c1, field.sub(t, c1)))
        .find(|&(_, c2)| c.contains(c2))
        .ok_or_else(|| {
            Error::LemmaViolation(Box::new(LemmaViolation {
                kind: LemmaKind::CoverPair,
                q,
                a: c.to_indices(),
                b: vec![],
                min_energy: None,
                detail: format!("{t} is not a sum of two elements of C"),
            }))
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    /// Permit the layered search when no constructive branch applies.
    pub allow_fallback: bool,
    pub d_max: u32,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            allow_fallback: true,
            d_max: DEFAULT_D_MAX,
        }
    }
}

/// Branch selection. `Auto` tries the constructive branches in order and
/// falls back last; the others force one branch or fail with
/// [`Error::BranchNotApplicable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Auto,
    MissingNegA,
    MissingNegB,
    Certificate,
    /// A certificate from one intersection only.
    CertificateAt(Intersection),
    SymmetricA,
    SymmetricB,
    Fallback,
}

#[derive(Clone, Copy, Debug)]
struct Term {
    elem: Elem,
    negated: bool,
}

impl Term {
    fn pos(elem: Elem) -> Term {
        Term { elem, negated: false }
    }

    fn neg(elem: Elem) -> Term {
        Term { elem, negated: true }
    }
}

/// `target = scale·C^sign` in the frame `(X, Y, η)`; `swapped` means the
/// frame is `(B, A, ξ⁻¹)` and pairs come out reversed.
#[derive(Clone, Debug)]
struct ScaledRoute {
    case: Case,
    swapped: bool,
    field: Field,
    scale: Elem,
    scale_inv: Elem,
    den: Vec<Term>,
    num: Vec<Term>,
    target: FSet,
    reps: RepTable,
}

impl ScaledRoute {
    /// Checks `η·Σ±β = ±Σ±α` and builds `scale·C^sign`.
    #[allow(clippy::too_many_arguments)]
    fn build(
        case: Case,
        swapped: bool,
        x: &FSet,
        y: &FSet,
        eta: Elem,
        sign: Sign,
        den: Vec<Term>,
        num: Vec<Term>,
    ) -> Result<ScaledRoute> {
        let field = x.field().clone();
        let signed = |t: &Term| if t.negated { field.neg(t.elem) } else { t.elem };
        let scale = field.sum(den.iter().map(signed));
        let n = field.sum(num.iter().map(signed));
        let expected = match sign {
            Sign::Plus => n,
            Sign::Minus => field.neg(n),
        };
        if scale.is_zero() || field.mul(eta, scale) != expected {
            return Err(Error::Internal(format!("{case}: ratio for xi does not hold")));
        }
        let coef = sign.apply(&field, eta);
        let c = x.sumset(&y.dilate(coef))?;
        Ok(ScaledRoute {
            case,
            swapped,
            scale,
            scale_inv: field.inv(scale)?,
            target: c.dilate(scale),
            reps: RepTable::build(x, y, coef),
            field,
            den,
            num,
        })
    }

    fn expand(&self, value: Elem, out: &mut Vec<ProductPair>) -> Result<()> {
        let f = &self.field;
        let c = f.mul(value, self.scale_inv);
        let (a, b) = self
            .reps
            .first(c)
            .ok_or_else(|| Error::Internal(format!("{c} has no representation")))?;
        for t in &self.den {
            let x = if t.negated { f.neg(a) } else { a };
            out.push(self.orient(x, t.elem));
        }
        for t in &self.num {
            let y = if t.negated { f.neg(b) } else { b };
            out.push(self.orient(t.elem, y));
        }
        Ok(())
    }

    fn orient(&self, x: Elem, y: Elem) -> ProductPair {
        if self.swapped {
            ProductPair { a: y, b: x }
        } else {
            ProductPair { a: x, b: y }
        }
    }

    fn witness(&self, t: Elem, xi: Elem) -> Result<Witness> {
        let (d1, d2) = cover_pair(&self.target, t)?;
        let mut pairs = Vec::with_capacity(MAX_PRODUCTS);
        self.expand(d1, &mut pairs)?;
        self.expand(d2, &mut pairs)?;
        Ok(Witness {
            t,
            case: self.case,
            xi: Some(xi),
            d: pairs.len(),
            pairs,
        })
    }
}

#[derive(Clone, Debug)]
enum Route {
    Scaled(Box<ScaledRoute>),
    Fallback(WitnessSearch),
}

/// Per-pair setup shared by every target `t`.
#[derive(Clone, Debug)]
pub struct Decomposer {
    a: FSet,
    b: FSet,
    report: EnergyReport,
    certificate: Option<XiCertificate>,
    route: Route,
    d_max: u32,
}

/// Route for `−X ⊄ X + X` in the frame `(X, Y, η)`.
fn missing_neg_route(case: Case, swapped: bool, x: &FSet, y: &FSet, eta: Elem) -> Result<Option<ScaledRoute>> {
    let field = x.field();
    let Some(a) = x.negate().without(&x.sumset(x)?)?.first() else {
        return Ok(None);
    };
    let plus = RepTable::build(x, y, eta);
    let (c_plus, _) = c_sets(x, y, eta)?;
    let (c1, c2) = cover_pair(&c_plus, a)?;
    let rep = |c| plus.first(c).ok_or_else(|| Error::Internal(format!("{c} not in C+")));
    let ((a1, b1), (a2, b2)) = (rep(c1)?, rep(c2)?);
    let a3 = field.neg(a);
    ScaledRoute::build(
        case,
        swapped,
        x,
        y,
        eta,
        Sign::Minus,
        vec![Term::pos(b1), Term::pos(b2)],
        vec![Term::pos(a1), Term::pos(a2), Term::pos(a3)],
    )
    .map(Some)
}

fn symmetric_route(case: Case, a: &FSet, b: &FSet, xi: Elem) -> Result<Option<ScaledRoute>> {
    let field = a.field();
    let symmetric = match case {
        Case::SymmetricA => sym_split(a)?.is_symmetric(),
        _ => sym_split(b)?.is_symmetric(),
    };
    if !symmetric {
        return Ok(None);
    }
    let inv = find_involved(a, b, xi, Sign::Plus)?;
    let ((a1, b1), (a2, b2)) = (inv.reps[0], inv.reps[1]);
    let route = match case {
        // ξ(b₁ − b₂) = a₂ + (−a₁); the −b₂ term becomes the pair (−a, b₂).
        Case::SymmetricA => ScaledRoute::build(
            case,
            false,
            a,
            b,
            xi,
            Sign::Plus,
            vec![Term::pos(b1), Term::neg(b2)],
            vec![Term::pos(a2), Term::pos(field.neg(a1))],
        ),
        // ξ(b₁ + (−b₂)) = −(a₁ − a₂); the −a₂ term becomes the pair (a₂, −b).
        _ => ScaledRoute::build(
            case,
            false,
            a,
            b,
            xi,
            Sign::Minus,
            vec![Term::pos(b1), Term::pos(field.neg(b2))],
            vec![Term::pos(a1), Term::neg(a2)],
        ),
    };
    route.map(Some)
}

impl Decomposer {
    pub fn new(a: &FSet, b: &FSet) -> Result<Decomposer> {
        Decomposer::with_branch(a, b, Branch::Auto, Options::default())
    }

    pub fn with_options(a: &FSet, b: &FSet, options: Options) -> Result<Decomposer> {
        Decomposer::with_branch(a, b, Branch::Auto, options)
    }

    pub fn with_branch(a: &FSet, b: &FSet, branch: Branch, options: Options) -> Result<Decomposer> {
        check_size_condition(a, b)?;
        let field = a.field();
        let report = find_good_xi(a, b)?;
        let xi = report.xi;
        let mut certificate = None;

        let l4a = || missing_neg_route(Case::MissingNegA, false, a, b, xi);
        let l4b = || missing_neg_route(Case::MissingNegB, true, b, a, field.inv(xi)?);
        let mut cert = |only: Option<Intersection>| -> Result<Option<ScaledRoute>> {
            let found = match only {
                Some(which) => certificate_at(a, b, xi, which)?,
                None => find_nontrivial_x(a, b, xi)?,
            };
            let Some(c) = found else {
                return Ok(None);
            };
            let route = ScaledRoute::build(
                c.case.into(),
                false,
                a,
                b,
                xi,
                c.orientation,
                c.denominator_terms.iter().copied().map(Term::pos).collect(),
                c.numerator_terms.iter().copied().map(Term::pos).collect(),
            )?;
            certificate = Some(c);
            Ok(Some(route))
        };
        let sym_a = || symmetric_route(Case::SymmetricA, a, b, xi);
        let sym_b = || symmetric_route(Case::SymmetricB, a, b, xi);

        let scaled = match branch {
            Branch::Auto => {
                let mut found = l4a()?;
                if found.is_none() {
                    found = l4b()?;
                }
                if found.is_none() {
                    found = cert(None)?;
                }
                if found.is_none() {
                    found = sym_a()?;
                }
                if found.is_none() {
                    found = sym_b()?;
                }
                found
            }
            Branch::MissingNegA => Some(l4a()?.ok_or(Error::BranchNotApplicable("L4A"))?),
            Branch::MissingNegB => Some(l4b()?.ok_or(Error::BranchNotApplicable("L4B"))?),
            Branch::Certificate => Some(cert(None)?.ok_or(Error::BranchNotApplicable("X_PP"))?),
            Branch::CertificateAt(which) => Some(cert(Some(which))?.ok_or(Error::BranchNotApplicable("X_PP"))?),
            Branch::SymmetricA => Some(sym_a()?.ok_or(Error::BranchNotApplicable("SYM_A"))?),
            Branch::SymmetricB => Some(sym_b()?.ok_or(Error::BranchNotApplicable("SYM_B"))?),
            Branch::Fallback => None,
        };
        let route = match scaled {
            Some(r) => Route::Scaled(Box::new(r)),
            None if options.allow_fallback || branch == Branch::Fallback => {
                Route::Fallback(WitnessSearch::new(a, b, options.d_max)?)
            }
            None => return Err(Error::NoBranch),
        };
        Ok(Decomposer {
            a: a.clone(),
            b: b.clone(),
            report,
            certificate,
            route,
            d_max: options.d_max,
        })
    }

    pub fn case(&self) -> Case {
        match &self.route {
            Route::Scaled(r) => r.case,
            Route::Fallback(_) => Case::Fallback,
        }
    }

    pub fn xi(&self) -> Elem {
        self.report.xi
    }

    pub fn energy_report(&self) -> &EnergyReport {
        &self.report
    }

    /// The intersection certificate behind an `X_PP_*` route.
    pub fn certificate(&self) -> Option<&XiCertificate> {
        self.certificate.as_ref()
    }

    /// The scaled set `S·C±` that every target is split over; `None` for the fallback.
    pub fn target_set(&self) -> Option<&FSet> {
        match &self.route {
            Route::Scaled(r) => Some(&r.target),
            Route::Fallback(_) => None,
        }
    }

    /// The multiplier `S` with `S·C±` inside `(|α| + |β|)·AB`; `None` for the fallback.
    pub fn scale(&self) -> Option<Elem> {
        match &self.route {
            Route::Scaled(r) => Some(r.scale),
            Route::Fallback(_) => None,
        }
    }

    /// A verified witness for `t`.
    pub fn witness(&self, t: Elem) -> Result<Witness> {
        let field = self.a.field();
        field.elem(t.0 as u64)?;
        let w = match &self.route {
            Route::Scaled(r) => r.witness(t, self.report.xi)?,
            Route::Fallback(search) => match search.find(t) {
                Ok(mut w) => {
                    w.xi = Some(self.report.xi);
                    w
                }
                Err(Error::NoWitness { .. }) => {
                    return Err(Error::TheoremViolation(Box::new(TheoremViolation {
                        q: field.q(),
                        a: self.a.to_indices(),
                        b: self.b.to_indices(),
                        t: Some(t.0),
                        d_max: self.d_max,
                        detail: "layered search exhausted".into(),
                    })))
                }
                Err(e) => return Err(e),
            },
        };
        if !verify_witness(&self.a, &self.b, &w) {
            return Err(Error::Internal(format!("{} witness for t = {t} failed verification", w.case)));
        }
        Ok(w)
    }

    /// Witnesses for every `t ∈ F_q`, in index order.
    pub fn all_witnesses(&self) -> Result<Vec<Witness>> {
        self.a.field().elements().map(|t| self.witness(t)).collect()
    }
}

/// One-shot decomposition of `t` over `A`, `B` with `|A||B| > q`.
pub fn decompose(a: &FSet, b: &FSet, t: Elem) -> Result<Witness> {
    Decomposer::new(a, b)?.witness(t)
}
