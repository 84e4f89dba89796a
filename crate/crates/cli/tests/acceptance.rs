//! Acceptance gate: one line per criterion, nonzero exit if any fails.
//!
//! Runs as `cargo test -p sumprod-cli --test acceptance`.

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sumprod::explorer::{
    energy_sum_expected, hart_iosevich_scan, random_pair, survey, two_a_squared, HiConfig, HiReport, Mode, PairFilter,
    SurveyConfig,
};
use sumprod::machinery::{f_uv, grid_check, Intersection};
use sumprod::oracle::NAIVE_ENERGY_BUDGET;
use sumprod::{
    c_sets, cover_pair, energy, energy_naive, find_good_xi, verify_witness, Branch, Case, Decomposer, Error, FSet, Field,
    Options, Rational,
};

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn field(q: u32) -> Field {
    Field::from_order(q as u64).unwrap()
}

fn masks(f: &Field) -> impl Iterator<Item = FSet> + '_ {
    (1u64..1 << f.q()).map(move |m| FSet::from_mask(f, m).unwrap())
}

fn admissible_pairs(f: &Field) -> Vec<(FSet, FSet)> {
    let sets: Vec<FSet> = masks(f).collect();
    let q = f.q() as usize;
    let mut out = Vec::new();
    for a in &sets {
        for b in &sets {
            if a.len() * b.len() > q {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

/// Decomposes every target; returns `(witnesses, failures, first failure)`.
fn decompose_all(a: &FSet, b: &FSet) -> (u64, u64, Option<String>) {
    let f = a.field();
    match Decomposer::new(a, b) {
        Ok(dec) => {
            let mut fails = 0;
            let mut first = None;
            for t in f.elements() {
                match dec.witness(t) {
                    Ok(w) if verify_witness(a, b, &w) && w.d <= 10 => {}
                    res => {
                        fails += 1;
                        first.get_or_insert_with(|| format!("A={a:?} B={b:?} t={t}: {:?}", res.map(|w| w.d)));
                    }
                }
            }
            (f.q() as u64, fails, first)
        }
        Err(e) => (0, 1, Some(format!("A={a:?} B={b:?}: {e}"))),
    }
}

fn merge(acc: (u64, u64, Option<String>), x: (u64, u64, Option<String>)) -> (u64, u64, Option<String>) {
    (acc.0 + x.0, acc.1 + x.1, acc.2.or(x.2))
}

fn theorem_exhaustive() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0;
    let mut total = (0, 0, None);
    for q in [2, 3, 4, 5, 7] {
        let f = field(q);
        let all = admissible_pairs(&f);
        pairs += all.len();
        let r = all.par_iter().map(|(a, b)| decompose_all(a, b)).reduce(|| (0, 0, None), merge);
        total = merge(total, r);
    }
    let took = start.elapsed();
    outcome(
        total.1 == 0 && took < Duration::from_secs(5 * 60),
        format!(
            "{pairs} pairs, {} witnesses, {} failures, {took:.1?} (limit 5 min) {}",
            total.0,
            total.1,
            total.2.unwrap_or_default()
        ),
    )
}

fn theorem_sampled() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut fails = 0;
    for (q, seed) in [(8, 8), (9, 9), (11, 11)] {
        let f = field(q);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs: Vec<(FSet, FSet)> = (0..10_000).map(|_| random_pair(&mut rng, &f, &PairFilter::default())).collect();
        let r = pairs.par_iter().map(|(a, b)| decompose_all(a, b)).reduce(|| (0, 0, None), merge);
        fails += r.1;
        parts.push(format!("q={q}: {} witnesses, {} failures {}", r.0, r.1, r.2.unwrap_or_default()));
    }
    let took = start.elapsed();
    outcome(
        fails == 0 && took < Duration::from_secs(10 * 60),
        format!("10^4 pairs per field, seed = q, {took:.1?} (limit 10 min); {}", parts.join("; ")),
    )
}

fn energy_lemma() -> Outcome {
    let mut checked = 0u64;
    let mut bad = Vec::new();
    for q in [2, 3, 4, 5, 7] {
        let f = field(q);
        for (a, b) in admissible_pairs(&f) {
            checked += 1;
            match find_good_xi(&a, &b) {
                Ok(r) => {
                    let m = (a.len() * b.len()) as u128;
                    let strict = (r.energy as u128) * (q as u128) < 2 * m * m;
                    let (plus, minus) = c_sets(&a, &b, r.xi).unwrap();
                    let half = 2 * plus.len() > q as usize && 2 * minus.len() > q as usize;
                    if !(strict && half && r.meets_bound()) {
                        bad.push(format!("q={q} A={a:?} B={b:?} E={} |C+|={} |C-|={}", r.energy, plus.len(), minus.len()));
                    }
                }
                Err(e) => bad.push(e.to_string()),
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{checked} pairs, {} failures {}", bad.len(), bad.first().cloned().unwrap_or_default()),
    )
}

fn cover_lemma() -> Outcome {
    let start = Instant::now();
    let mut sets = 0u64;
    let mut bad = Vec::new();
    for q in [2, 3, 4, 5, 7, 8, 9, 11] {
        let f = field(q);
        for c in masks(&f).filter(|c| 2 * c.len() > q as usize) {
            sets += 1;
            if !c.sumset(&c).unwrap().is_full() {
                bad.push(format!("q={q} C={c:?}: 2C not full"));
            }
            for t in f.elements() {
                match cover_pair(&c, t) {
                    Ok((x, y)) if c.contains(x) && c.contains(y) && f.add(x, y) == t => {}
                    r => bad.push(format!("q={q} C={c:?} t={t}: {r:?}")),
                }
            }
        }
    }
    let took = start.elapsed();
    outcome(
        bad.is_empty() && took < Duration::from_secs(60),
        format!("{sets} sets, {} failures, {took:.1?} (limit 1 min) {}", bad.len(), bad.first().cloned().unwrap_or_default()),
    )
}

/// Identity and naive agreement at every ξ; returns the number of failures.
fn energy_instance(a: &FSet, b: &FSet) -> (u64, u64) {
    let f = a.field();
    let mut sum = 0;
    let mut fails = 0;
    for xi in f.nonzero() {
        let e = energy(a, b, xi).unwrap();
        if energy_naive(a, b, xi, NAIVE_ENERGY_BUDGET).unwrap() != e {
            fails += 1;
        }
        sum += e;
    }
    if sum != energy_sum_expected(f.q(), a.len() as u64, b.len() as u64) {
        fails += 1;
    }
    (1, fails)
}

fn energy_identity() -> Outcome {
    let mut exhaustive = (0, 0);
    for q in [2, 3, 4, 5, 7, 8, 9] {
        let f = field(q);
        let sets: Vec<FSet> = masks(&f).collect();
        let r = sets
            .par_iter()
            .map(|a| sets.iter().map(|b| energy_instance(a, b)).fold((0, 0), |x, y| (x.0 + y.0, x.1 + y.1)))
            .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
        exhaustive = (exhaustive.0 + r.0, exhaustive.1 + r.1);
    }
    let orders: Vec<u32> = (2..=31).filter(|&q| sumprod::field::factor_prime_power(q as u64).is_ok()).collect();
    let fields: Vec<Field> = orders.iter().map(|&q| field(q)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut random = (0, 0);
    while random.0 < 1000 {
        let f = &fields[rng.random_range(0..fields.len())];
        let a = sumprod::explorer::random_subset(&mut rng, f);
        let b = sumprod::explorer::random_subset(&mut rng, f);
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let r = energy_instance(&a, &b);
        random = (random.0 + r.0, random.1 + r.1);
    }
    outcome(
        exhaustive.1 == 0 && random.1 == 0,
        format!(
            "exhaustive q<=9: {} pairs, {} failures; random q<=31: {} pairs, {} failures",
            exhaustive.0, exhaustive.1, random.0, random.1
        ),
    )
}

fn polynomial() -> Outcome {
    let half = Rational::new(1, 2);
    let center = f_uv(half, half).unwrap();
    let grid = grid_check(1000);
    outcome(
        center == Rational::new(3, 8) && grid.nonnegative() && grid.points == 1001 * 1001,
        format!(
            "f(1/2,1/2) = {center}; {} grid points, {} negative, min {} at ({}, {})",
            grid.points, grid.negative_points, grid.min_value, grid.argmin.0, grid.argmin.1
        ),
    )
}

fn case_contract() -> Outcome {
    let mut lengths: BTreeMap<Case, BTreeSet<usize>> = BTreeMap::new();
    let mut bad = Vec::new();
    let mut branches = vec![Branch::Auto, Branch::MissingNegA, Branch::MissingNegB, Branch::Certificate];
    branches.extend(Intersection::ORDER.map(Branch::CertificateAt));
    branches.extend([Branch::SymmetricA, Branch::SymmetricB, Branch::Fallback]);
    for q in [2, 3, 4, 5, 7] {
        let f = field(q);
        for (a, b) in admissible_pairs(&f) {
            for &branch in &branches {
                let dec = match Decomposer::with_branch(&a, &b, branch, Options::default()) {
                    Ok(d) => d,
                    Err(Error::BranchNotApplicable(_)) => continue,
                    Err(e) => {
                        bad.push(format!("{branch:?} q={q} A={a:?} B={b:?}: {e}"));
                        continue;
                    }
                };
                for t in f.elements() {
                    let w = dec.witness(t).unwrap();
                    let expected = match w.case {
                        Case::PlusNegPlus | Case::SymmetricA | Case::SymmetricB => w.d == 8,
                        Case::MissingNegA | Case::MissingNegB | Case::PlusPlusMinus | Case::PlusNegMinus => w.d == 10,
                        Case::Fallback => w.d <= 10,
                    };
                    if !expected || !verify_witness(&a, &b, &w) {
                        bad.push(format!("{} with d = {} for A={a:?} B={b:?} t={t}", w.case, w.d));
                    }
                    lengths.entry(w.case).or_default().insert(w.d);
                }
            }
        }
    }
    let mut rates = Vec::new();
    let mut branch_fallbacks = 0;
    for q in [2, 3, 4, 5, 7, 8, 9] {
        let r = survey(&field(q), &SurveyConfig::new(Mode::Exhaustive)).unwrap().report;
        branch_fallbacks += r.fallback_with_branch_applicable;
        rates.push(format!("q={q}: {}", r.fallback_rate));
    }
    let all_tags = lengths.len() == Case::ALL.len();
    let shown: Vec<String> = lengths.iter().map(|(c, d)| format!("{c} {d:?}")).collect();
    outcome(
        bad.is_empty() && all_tags && branch_fallbacks == 0,
        format!(
            "lengths {}; fallback rate {}; fallbacks where a branch applies: {branch_fallbacks} {}",
            shown.join(", "),
            rates.join(", "),
            bad.first().cloned().unwrap_or_default()
        ),
    )
}

fn run_cli(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_sumprod")).args(args).output().expect("binary runs");
    (out.status.code(), out.stdout)
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 2] = [
        &["verify", "--q", "7", "--exhaustive"],
        &["survey", "--q", "11", "--sample", "100000", "--seed", "7"],
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for base in runs {
        let mut outputs = Vec::new();
        for threads in ["1", "1", "8"] {
            let mut args = base.to_vec();
            args.extend(["--threads", threads]);
            outputs.push(run_cli(&args));
        }
        let same = outputs.iter().all(|o| o == &outputs[0]);
        let ok = same && outputs[0].0 == Some(0) && !outputs[0].1.is_empty();
        pass &= ok;
        parts.push(format!(
            "`{}`: {} bytes, exit {:?}, identical across threads 1/1/8: {same}",
            base.join(" "),
            outputs[0].1.len(),
            outputs[0].0
        ));
    }
    outcome(pass, parts.join("; "))
}

fn performance() -> Outcome {
    let f = field(65521);
    let full = FSet::full(&f);
    let start = Instant::now();
    let s = full.sumset(&full).unwrap();
    let sumset_time = start.elapsed();

    let f11 = field(11);
    let mut cfg = SurveyConfig::new(Mode::Exhaustive);
    cfg.oracle_only = true;
    let start = Instant::now();
    let report = survey(&f11, &cfg).unwrap().report;
    let survey_time = start.elapsed();
    let threads = rayon::current_num_threads();
    outcome(
        s.is_full() && sumset_time < Duration::from_secs(2) && survey_time < Duration::from_secs(30 * 60),
        format!(
            "q=65521 full sumset {sumset_time:.2?} (limit 2 s); q=11 exhaustive oracle survey of {} pairs {survey_time:.1?} on {threads} thread(s) (limit 30 min)",
            report.pair_count
        ),
    )
}

fn hart_iosevich() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for q in [7, 11, 13] {
        let f = field(q);
        let report = match hart_iosevich_scan(&f, &HiConfig::new(Rational::new(3, 4))) {
            Ok(r) => r,
            Err(e) => {
                pass = false;
                parts.push(format!("q={q}: {e}"));
                continue;
            }
        };
        let json = serde_json::to_string(&report).unwrap();
        let back: HiReport = serde_json::from_str(&json).unwrap();
        let replayed = back.exceptions.iter().all(|e| {
            let a = FSet::from_indices(&f, e).unwrap();
            a.len() as u32 >= back.threshold && !two_a_squared(&a).unwrap().is_full()
        });
        let complete = back.exceptions.len() as u64 == back.exception_count;
        pass &= replayed && complete && back == report;
        parts.push(format!(
            "q={q}: |A|>={}, {} sets, {} exceptions, replayed: {replayed}",
            report.threshold, report.sets_checked, report.exception_count
        ));
    }
    outcome(pass, parts.join("; "))
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("10AB = F_q, exhaustive q in {2,3,4,5,7}", theorem_exhaustive),
        ("10AB = F_q, 10^4 seeded pairs for q in {8,9,11}", theorem_sampled),
        ("energy below 2|A|^2|B|^2/q and |C+-| > q/2", energy_lemma),
        ("|C| > q/2 implies 2C = F_q, q <= 11", cover_lemma),
        ("energy sum identity and naive agreement", energy_identity),
        ("f(1/2,1/2) = 3/8 and f >= 0 on the 1001^2 grid", polynomial),
        ("case tags carry their lengths", case_contract),
        ("CLI reports are byte-identical across runs and threads", determinism),
        ("performance floor", performance),
        ("2A^2 scan at exponent 3/4", hart_iosevich),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = check();
        let mark = if r.pass { "PASS" } else { "FAIL" };
        println!("{mark} [{:>2}] {name} ({:.1?}): {}", i + 1, start.elapsed(), r.detail.trim_end());
        failed += !r.pass as u32;
    }
    println!("{} of {} criteria passed", criteria.len() as u32 - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
