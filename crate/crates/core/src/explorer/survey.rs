use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{run_pairs, Mode, PairFilter, DEFAULT_BUDGET, GENERATOR};
use crate::decomposer::{Case, Decomposer, Options, MAX_PRODUCTS};
use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::machinery::{nine_sets, sym_split};
use crate::oracle::min_d;
use crate::setalg::FSet;
use crate::Rational;

/// Extremal pairs kept per `(|A|, |B|)` cell.
const EXTREMAL_KEEP: usize = 10;
const VIOLATION_KEEP: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurveyConfig {
    pub mode: Mode,
    pub filter: PairFilter,
    /// Layers examined by the oracle; `min_d` beyond this is absent.
    pub d_max: u32,
    /// Skip the decomposer and record the oracle columns only.
    pub oracle_only: bool,
    pub budget: u128,
    /// Return every [`SearchRecord`] along with the report.
    pub keep_records: bool,
}

impl SurveyConfig {
    pub fn new(mode: Mode) -> SurveyConfig {
        SurveyConfig {
            mode,
            filter: PairFilter::default(),
            d_max: MAX_PRODUCTS as u32,
            oracle_only: false,
            budget: DEFAULT_BUDGET,
            keep_records: false,
        }
    }
}

/// One surveyed pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub q: u32,
    pub card_a: u32,
    pub card_b: u32,
    pub m_over_q: Rational,
    pub min_d: Option<u32>,
    /// `|2AB|/q`.
    pub coverage_at_2: Rational,
    /// `None` when the decomposer was skipped.
    pub case_used: Option<Case>,
    /// `min_d` is the largest seen in this `(q, |A|, |B|)` cell.
    pub is_extremal: bool,
}

impl SearchRecord {
    pub const CSV_HEADER: [&'static str; 10] = [
        "q",
        "cardA",
        "cardB",
        "m_num",
        "m_den",
        "min_d",
        "coverage2_num",
        "coverage2_den",
        "case",
        "extremal",
    ];

    /// Fields in [`Self::CSV_HEADER`] order; absent values are empty.
    pub fn csv_fields(&self) -> [String; 10] {
        [
            self.q.to_string(),
            self.card_a.to_string(),
            self.card_b.to_string(),
            self.m_over_q.numer().to_string(),
            self.m_over_q.denom().to_string(),
            self.min_d.map(|d| d.to_string()).unwrap_or_default(),
            self.coverage_at_2.numer().to_string(),
            self.coverage_at_2.denom().to_string(),
            self.case_used.map(|c| c.tag().to_string()).unwrap_or_default(),
            self.is_extremal.to_string(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyViolation {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub t: Option<u32>,
    pub kind: String,
    pub detail: String,
}

/// The sets with the largest `min_d` in one `(|A|, |B|)` cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalCell {
    pub card_a: u32,
    pub card_b: u32,
    /// `None` when some pair of the cell never filled `F_q` within `d_max`.
    pub max_min_d: Option<u32>,
    pub pairs_at_max: u64,
    pub min_coverage_at_2: Rational,
    pub examples: Vec<(Vec<u32>, Vec<u32>)>,
}

/// Pairs where no branch before the fallback applied.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialOnlyStats {
    pub count: u64,
    /// Of these, pairs with `0 < u < 1` and `0 < v < 1`.
    pub mixed_count: u64,
    pub examples: Vec<TrivialOnlyExample>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialOnlyExample {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub u: Rational,
    pub v: Rational,
    pub nine_set_total: usize,
    pub nine_sets_disjoint: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub field: FieldSpec,
    pub mode: String,
    pub seed: Option<u64>,
    pub generator: Option<String>,
    pub min_ratio: Rational,
    pub d_max: u32,
    pub oracle_only: bool,
    pub pair_count: u64,
    pub min_d_histogram: BTreeMap<u32, u64>,
    pub min_d_absent: u64,
    pub max_min_d: Option<u32>,
    pub case_histogram: BTreeMap<Case, u64>,
    pub fallback_count: u64,
    pub fallback_rate: Rational,
    /// Fallback pairs for which some constructive branch would have applied.
    pub fallback_with_branch_applicable: u64,
    pub trivial_only: TrivialOnlyStats,
    pub extremal: Vec<ExtremalCell>,
    pub violation_count: u64,
    pub violations: Vec<SurveyViolation>,
}

impl SurveyReport {
    /// Histogram mass equals `pair_count`.
    pub fn histogram_total(&self) -> u64 {
        self.min_d_histogram.values().sum::<u64>() + self.min_d_absent
    }
}

#[derive(Clone, Debug)]
pub struct SurveyOutcome {
    pub report: SurveyReport,
    /// Present when [`SurveyConfig::keep_records`] is set.
    pub records: Option<Vec<SearchRecord>>,
}

struct PairResult {
    record: SearchRecord,
    fallback_with_branch: bool,
    trivial: Option<TrivialOnlyExample>,
    violations: Vec<SurveyViolation>,
}

/// Ranks absent above every present value.
fn rank(d: Option<u32>) -> u32 {
    d.unwrap_or(u32::MAX)
}

fn violation(a: &FSet, b: &FSet, t: Option<u32>, kind: &str, detail: String) -> SurveyViolation {
    SurveyViolation {
        a: a.to_indices(),
        b: b.to_indices(),
        t,
        kind: kind.into(),
        detail,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::LemmaViolation(_) => "lemma",
        Error::TheoremViolation(_) => "theorem",
        _ => "error",
    }
}

fn survey_pair(a: &FSet, b: &FSet, cfg: &SurveyConfig) -> PairResult {
    let q = a.field().q();
    let oracle = min_d(a, b, cfg.d_max).expect("nonempty operands");
    let mut violations = Vec::new();
    if oracle.min_d.is_none() && cfg.d_max >= MAX_PRODUCTS as u32 {
        violations.push(violation(a, b, None, "min_d", format!("{}AB is not F_q", cfg.d_max)));
    }
    let mut record = SearchRecord {
        q,
        card_a: a.len() as u32,
        card_b: b.len() as u32,
        m_over_q: Rational::new(a.len() as i128 * b.len() as i128, q as i128),
        min_d: oracle.min_d,
        coverage_at_2: oracle.coverage(2),
        case_used: None,
        is_extremal: false,
    };
    let mut fallback_with_branch = false;
    let mut trivial = None;
    if !cfg.oracle_only {
        match Decomposer::new(a, b) {
            Ok(dec) => {
                record.case_used = Some(dec.case());
                for t in a.field().elements() {
                    if let Err(e) = dec.witness(t) {
                        violations.push(violation(a, b, Some(t.0), error_kind(&e), e.to_string()));
                    }
                }
                if dec.case() == Case::Fallback {
                    let strict = Options {
                        allow_fallback: false,
                        ..Options::default()
                    };
                    fallback_with_branch = !matches!(Decomposer::with_options(a, b, strict), Err(Error::NoBranch));
                    trivial = Some(trivial_example(a, b, dec.xi()));
                }
            }
            Err(e) => violations.push(violation(a, b, None, error_kind(&e), e.to_string())),
        }
    }
    PairResult {
        record,
        fallback_with_branch,
        trivial,
        violations,
    }
}

fn trivial_example(a: &FSet, b: &FSet, xi: crate::field::Elem) -> TrivialOnlyExample {
    let (sa, sb) = (sym_split(a).expect("nonempty"), sym_split(b).expect("nonempty"));
    let nine = nine_sets(&sa, &sb, xi).expect("xi is nonzero");
    TrivialOnlyExample {
        a: a.to_indices(),
        b: b.to_indices(),
        u: sa.u,
        v: sb.u,
        nine_set_total: nine.total_size(),
        nine_sets_disjoint: nine.pairwise_disjoint(),
    }
}

struct CellState {
    max: Option<u32>,
    at_max: u64,
    min_cov: Rational,
    examples: Vec<(Vec<u32>, Vec<u32>)>,
}

/// Surveys every admissible pair (or a seeded sample) and aggregates.
pub fn survey(field: &Field, cfg: &SurveyConfig) -> Result<SurveyOutcome> {
    if cfg.d_max < 2 {
        return Err(Error::InvalidArgument("survey needs d_max >= 2".into()));
    }
    let mut hist = BTreeMap::new();
    let mut absent = 0u64;
    let mut cases = BTreeMap::new();
    let mut fallback_with_branch_applicable = 0;
    let mut trivial = TrivialOnlyStats::default();
    let mut cells: BTreeMap<(u32, u32), CellState> = BTreeMap::new();
    let mut violations = Vec::new();
    let mut violation_count = 0u64;
    let mut records = cfg.keep_records.then(Vec::new);

    let pair_count = run_pairs(
        field,
        cfg.mode,
        cfg.filter,
        cfg.budget,
        |a, b| survey_pair(a, b, cfg),
        |a, b, r| {
            let rec = &r.record;
            match rec.min_d {
                Some(d) => *hist.entry(d).or_insert(0) += 1,
                None => absent += 1,
            }
            if let Some(c) = rec.case_used {
                *cases.entry(c).or_insert(0u64) += 1;
            }
            fallback_with_branch_applicable += r.fallback_with_branch as u64;
            if let Some(ex) = r.trivial {
                trivial.count += 1;
                let mixed = |u: Rational| u > Rational::from_integer(0) && u < Rational::from_integer(1);
                if mixed(ex.u) && mixed(ex.v) {
                    trivial.mixed_count += 1;
                }
                if trivial.examples.len() < EXTREMAL_KEEP {
                    trivial.examples.push(ex);
                }
            }
            let cell = cells.entry((rec.card_a, rec.card_b)).or_insert(CellState {
                max: rec.min_d,
                at_max: 0,
                min_cov: rec.coverage_at_2,
                examples: Vec::new(),
            });
            cell.min_cov = cell.min_cov.min(rec.coverage_at_2);
            if rank(rec.min_d) > rank(cell.max) {
                cell.max = rec.min_d;
                cell.at_max = 0;
                cell.examples.clear();
            }
            if rec.min_d == cell.max {
                cell.at_max += 1;
                if cell.examples.len() < EXTREMAL_KEEP {
                    cell.examples.push((a.to_indices(), b.to_indices()));
                }
            }
            violation_count += r.violations.len() as u64;
            for v in r.violations {
                if violations.len() < VIOLATION_KEEP {
                    violations.push(v);
                }
            }
            if let Some(all) = records.as_mut() {
                all.push(r.record);
            }
        },
    )?;

    if let Some(all) = records.as_mut() {
        for rec in all.iter_mut() {
            rec.is_extremal = cells[&(rec.card_a, rec.card_b)].max == rec.min_d;
        }
    }
    let fallback_count = cases.get(&Case::Fallback).copied().unwrap_or(0);
    let max_min_d = cells.values().map(|c| c.max).max_by_key(|&d| rank(d)).flatten();
    let report = SurveyReport {
        field: field.spec().clone(),
        mode: cfg.mode.name().into(),
        seed: cfg.mode.seed(),
        generator: cfg.mode.seed().map(|_| GENERATOR.to_string()),
        min_ratio: cfg.filter.min_ratio,
        d_max: cfg.d_max,
        oracle_only: cfg.oracle_only,
        pair_count,
        min_d_histogram: hist,
        min_d_absent: absent,
        max_min_d: if absent > 0 { None } else { max_min_d },
        case_histogram: cases,
        fallback_count,
        fallback_rate: if pair_count == 0 || cfg.oracle_only {
            Rational::from_integer(0)
        } else {
            Rational::new(fallback_count as i128, pair_count as i128)
        },
        fallback_with_branch_applicable,
        trivial_only: trivial,
        extremal: cells
            .into_iter()
            .map(|((ca, cb), c)| ExtremalCell {
                card_a: ca,
                card_b: cb,
                max_min_d: c.max,
                pairs_at_max: c.at_max,
                min_coverage_at_2: c.min_cov,
                examples: c.examples,
            })
            .collect(),
        violation_count,
        violations,
    };
    Ok(SurveyOutcome { report, records })
}
