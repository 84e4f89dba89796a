use serde::{Deserialize, Serialize};
use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{n} exceeds the supported bound 2^20")]
    OrderTooLarge { p: u64, n: u32 },
    #[error("element index {index} out of range for q = {q}")]
    IndexOutOfRange { index: u64, q: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("malformed set literal {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
    #[error("|A||B| = {card_a}*{card_b} = {} <= q = {q}", card_a * card_b)]
    SizeCondition { card_a: u64, card_b: u64, q: u32 },
    #[error("|C| = {card} <= q/2 for q = {q}")]
    CoverSize { card: u64, q: u32 },
    #[error("set must be nonempty")]
    EmptySet,
    #[error("sum multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("dilation factor must be nonzero")]
    ZeroXi,
    #[error("u and v must lie in [0, 1]")]
    OutOfUnitInterval,
    #[error("{0}")]
    LemmaViolation(Box<LemmaViolation>),
    #[error("{0}")]
    TheoremViolation(Box<TheoremViolation>),
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },
    #[error("no witness for t = {t} with at most {d_max} products")]
    NoWitness { t: u32, d_max: u32 },
    #[error("branch {0} does not apply to this pair")]
    BranchNotApplicable(&'static str),
    #[error("no constructive branch applies and fallback is disabled")]
    NoBranch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Precondition failures: the inputs do not satisfy a hypothesis.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::SizeCondition { .. }
                | Error::CoverSize { .. }
                | Error::EmptySet
                | Error::ZeroMultiplicity
                | Error::ZeroXi
                | Error::BranchNotApplicable(_)
        )
    }

    /// A checked mathematical statement failed on concrete data.
    pub fn is_violation(&self) -> bool {
        matches!(self, Error::LemmaViolation(_) | Error::TheoremViolation(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaKind {
    /// No nonzero ξ has energy strictly below 2|A|²|B|²/q.
    EnergyBound,
    /// |A ± ξB| ≤ q/2 for the selected ξ.
    HalfCover,
    /// No element of A ± ξB has two representations.
    NoInvolved,
    /// |C| > q/2 but C + C misses an element.
    CoverPair,
}

/// Replayable record of a failed lemma check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaViolation {
    pub kind: LemmaKind,
    pub q: u32,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub min_energy: Option<u64>,
    pub detail: String,
}

impl fmt::Display for LemmaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lemma violation ({:?}) at q = {}, A = {:?}, B = {:?}: {}",
            self.kind, self.q, self.a, self.b, self.detail
        )
    }
}

/// Replayable record of a target the decomposition failed to reach.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremViolation {
    pub q: u32,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub t: Option<u32>,
    pub d_max: u32,
    pub detail: String,
}

impl fmt::Display for TheoremViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "theorem violation at q = {}, A = {:?}, B = {:?}, t = {:?}: {}",
            self.q, self.a, self.b, self.t, self.detail
        )
    }
}
