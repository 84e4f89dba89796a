//! Arithmetic of subsets of a finite field and constructive witnesses for
//! `10AB = F_q` whenever `|A||B| > q`.
//!
//! ```
//! use sumprod::{decompose, verify_witness, Elem, FSet, Field};
//!
//! let f5 = Field::new(5, 1)?;
//! let a = FSet::parse(&f5, "1,2,3")?;
//! let b = FSet::parse(&f5, "1,2")?;
//! let w = decompose(&a, &b, Elem(0))?;
//! assert!(w.d <= 10 && verify_witness(&a, &b, &w));
//! # Ok::<(), sumprod::Error>(())
//! ```
//!
//! Modules, bottom up:
//!
//! * [`field`]: `F_q` with a canonical modulus and packed element indices.
//! * [`setalg`]: subsets as bitsets; sumsets, product sets, dilates.
//! * [`machinery`]: energy, the choice of ξ, involved elements, certificates.
//! * [`decomposer`]: the branch analysis that emits witnesses.
//! * [`oracle`]: brute-force ground truth.
//! * [`explorer`]: exhaustive and sampled surveys.

pub mod decomposer;
pub mod error;
pub mod explorer;
pub mod field;
pub mod machinery;
pub mod oracle;
pub mod setalg;

/// Exact rationals used for ratios such as `|A||B|/q` and `f(u, v)`.
pub type Rational = num_rational::Ratio<i128>;

pub use decomposer::{cover_pair, decompose, verify_witness, Branch, Case, Decomposer, Options, ProductPair, Witness};
pub use error::{Error, LemmaKind, LemmaViolation, Result, TheoremViolation};
pub use field::{Elem, Field, FieldSpec};
pub use machinery::{c_sets, energy, energy_report, find_good_xi, find_involved, EnergyReport, Sign};
pub use oracle::{energy_naive, min_d, witness_search, OracleResult};
pub use setalg::{d_ab, FSet};
