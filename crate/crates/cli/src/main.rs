//! `sumprod`: decompositions, lemma verification and surveys from the shell.
//!
//! Exit codes: 0 ok, 1 parse error, 2 precondition failure, 3 lemma or
//! theorem violation, 4 budget exceeded, 5 rejected witness on
//! `--check-witness`. Reports go to stdout, diagnostics to stderr.

use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sumprod::explorer::{
    hart_iosevich_scan, survey, verify_suite, HiConfig, Mode, PairFilter, SearchRecord, SurveyConfig, VerifyConfig,
    DEFAULT_BUDGET,
};
use sumprod::{energy_report, find_good_xi, verify_witness, Decomposer, Elem, Error, FSet, Field, Options, Rational, Witness};

const BUDGET_VAR: &str = "SUMPROD_BUDGET";

#[derive(Parser)]
#[command(name = "sumprod", version, about = "Sum-of-products witnesses over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write t as a sum of at most ten products a·b with a in A, b in B.
    Decompose(DecomposeArgs),
    /// Run the lemma suite over all pairs or a seeded sample.
    Verify(RunArgs),
    /// Record min d, coverage and branch for each pair.
    Survey(SurveyArgs),
    /// Scan sets above q^e for 2A² = F_q.
    Hi(HiArgs),
    /// Collision counts E(ξ) and the selected ξ.
    Energy(EnergyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct FieldArgs {
    /// Field order, a prime power.
    #[arg(long)]
    q: Option<u64>,
    /// Characteristic; use with --n instead of --q.
    #[arg(long)]
    p: Option<u64>,
    /// Extension degree.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

impl FieldArgs {
    fn field(&self) -> Result<Field, Fail> {
        let field = match (self.q, self.p, self.n) {
            (Some(q), None, None) => Field::from_order(q)?,
            (q, Some(p), n) => {
                let f = Field::new(p, n.unwrap_or(1))?;
                if q.is_some_and(|q| q != f.q() as u64) {
                    return Err(Fail::Parse(format!("--q {} disagrees with --p {p} --n {}", q.unwrap(), f.n())));
                }
                f
            }
            (_, None, Some(_)) => return Err(Fail::Parse("--n needs --p".into())),
            (None, None, None) => return Err(Fail::Parse("give --q or --p [--n]".into())),
        };
        Ok(field)
    }
}

#[derive(Args)]
struct PairArgs {
    /// Set literal: comma-separated indices, or a hex mask such as 0x17.
    #[arg(long = "A", short = 'A')]
    a: String,
    #[arg(long = "B", short = 'B')]
    b: String,
}

impl PairArgs {
    fn sets(&self, field: &Field) -> Result<(FSet, FSet), Fail> {
        Ok((FSet::parse(field, &self.a)?, FSet::parse(field, &self.b)?))
    }
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    pair: PairArgs,
    /// Target element; every t when omitted.
    #[arg(long)]
    t: Option<u64>,
    /// Layers searched by the fallback.
    #[arg(long, default_value_t = 10)]
    d_max: u32,
    /// Replay a JSON witness (file path, or - for stdin) instead of decomposing.
    #[arg(long, value_name = "FILE")]
    check_witness: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Enumerate every pair (4^q must fit the budget).
    #[arg(long, conflicts_with = "sample")]
    exhaustive: bool,
    /// Number of seeded random pairs.
    #[arg(long)]
    sample: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; output does not depend on it.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

impl RunArgs {
    fn mode(&self) -> Result<Mode, Fail> {
        match (self.exhaustive, self.sample) {
            (true, None) => Ok(Mode::Exhaustive),
            (false, Some(count)) => Ok(Mode::Sample { count, seed: self.seed }),
            _ => Err(Fail::Parse("give --exhaustive or --sample N".into())),
        }
    }
}

#[derive(Args)]
struct SurveyArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, default_value_t = 10)]
    d_max: u32,
    /// Only keep pairs with |A||B| > ratio·q.
    #[arg(long, default_value = "1")]
    min_ratio: String,
    /// Oracle columns only; skip the decomposer.
    #[arg(long)]
    oracle_only: bool,
}

#[derive(Args)]
struct HiArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Size threshold exponent e, as a fraction such as 3/4.
    #[arg(long, default_value = "3/4")]
    exponent: String,
    /// Sets drawn when the scan cannot be exhaustive.
    #[arg(long, default_value_t = 10_000)]
    sample: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct EnergyArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    pair: PairArgs,
    /// Report this ξ only.
    #[arg(long)]
    xi: Option<u64>,
}

#[derive(Debug)]
enum Fail {
    Parse(String),
    Lib(Error),
    /// A report was written and contains violations.
    Violations,
    BadWitness(String),
    Io(io::Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail::Lib(e)
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Fail {
        Fail::Io(e)
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Fail {
        Fail::Io(e.into())
    }
}

impl From<csv::Error> for Fail {
    fn from(e: csv::Error) -> Fail {
        Fail::Io(e.into())
    }
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Parse(_) => 1,
            Fail::Lib(e) if e.is_precondition() => 2,
            Fail::Lib(e) if e.is_violation() => 3,
            Fail::Lib(Error::BudgetExceeded { .. }) => 4,
            Fail::Lib(
                Error::NotPrime(_)
                | Error::NotPrimePower(_)
                | Error::ZeroDegree
                | Error::OrderTooLarge { .. }
                | Error::IndexOutOfRange { .. }
                | Error::Parse { .. }
                | Error::InvalidArgument(_),
            ) => 1,
            Fail::Violations => 3,
            Fail::BadWitness(_) => 5,
            Fail::Lib(_) | Fail::Io(_) => 3,
        }
    }
}

fn env_budget() -> Result<u128, Fail> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Fail::Parse(format!("{BUDGET_VAR}={v:?} is not an integer"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn parse_ratio(text: &str) -> Result<Rational, Fail> {
    let bad = || Fail::Parse(format!("{text:?} is not a fraction"));
    let parse = |s: &str| s.trim().parse::<i128>().map_err(|_| bad());
    match text.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational::new(parse(n)?, d))
        }
        None => Ok(Rational::from_integer(parse(text)?)),
    }
}

fn with_threads<T: Send>(threads: usize, run: impl FnOnce() -> T + Send) -> Result<T, Fail> {
    if threads == 0 {
        return Err(Fail::Parse("--threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Fail::Io(io::Error::other(e)))?;
    Ok(pool.install(run))
}

fn emit_json<T: Serialize>(out: &mut impl Write, value: &T) -> Result<(), Fail> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn no_csv(format: Format) -> Result<(), Fail> {
    if format == Format::Csv {
        return Err(Fail::Parse("csv output is only available for survey".into()));
    }
    Ok(())
}

fn witness_text(w: &Witness) -> String {
    let terms: Vec<String> = w.pairs.iter().map(|p| format!("{}*{}", p.a, p.b)).collect();
    format!("{} = {}    [{}, d = {}]", w.t, terms.join(" + "), w.case, w.d)
}

fn cmd_decompose(args: &DecomposeArgs, out: &mut impl Write) -> Result<(), Fail> {
    no_csv(args.field.format)?;
    let field = args.field.field()?;
    let (a, b) = args.pair.sets(&field)?;
    if let Some(src) = &args.check_witness {
        let mut text = String::new();
        if src == "-" {
            io::stdin().read_to_string(&mut text)?;
        } else {
            text = std::fs::read_to_string(src)?;
        }
        let w: Witness = serde_json::from_str(&text).map_err(|e| Fail::Parse(format!("witness: {e}")))?;
        if args.t.is_some_and(|t| t != w.t.0 as u64) {
            return Err(Fail::BadWitness(format!("witness targets {}, not {}", w.t, args.t.unwrap())));
        }
        if !verify_witness(&a, &b, &w) {
            return Err(Fail::BadWitness(format!("witness for t = {} does not verify", w.t)));
        }
        match args.field.format {
            Format::Text => writeln!(out, "ok: {}", witness_text(&w))?,
            _ => writeln!(out, "{}", serde_json::json!({ "valid": true, "t": w.t, "case": w.case, "d": w.d }))?,
        }
        return Ok(());
    }
    let options = Options {
        d_max: args.d_max,
        ..Options::default()
    };
    let dec = Decomposer::with_options(&a, &b, options)?;
    let witnesses = match args.t {
        Some(t) => vec![dec.witness(field.elem(t)?)?],
        None => dec.all_witnesses()?,
    };
    match args.field.format {
        Format::Text => {
            for w in &witnesses {
                writeln!(out, "{}", witness_text(w))?;
            }
        }
        _ => {
            for w in &witnesses {
                serde_json::to_writer(&mut *out, w)?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

fn cmd_verify(args: &RunArgs, out: &mut impl Write) -> Result<(), Fail> {
    no_csv(args.field.format)?;
    let field = args.field.field()?;
    let cfg = VerifyConfig {
        mode: args.mode()?,
        budget: env_budget()?,
    };
    let report = with_threads(args.threads, || verify_suite(&field, &cfg))??;
    match args.field.format {
        Format::Text => {
            writeln!(out, "verify {} q = {}: {} pairs, {} cover sets", report.mode, report.field.q, report.pair_count, report.cover_sets)?;
            for c in &report.checks {
                writeln!(out, "  {:<16} {:>10} checked {:>6} failed", c.check, c.checked, c.failed)?;
            }
            for (case, n) in &report.case_histogram {
                writeln!(out, "  case {case:<9} {n}")?;
            }
            for v in &report.violations {
                writeln!(out, "  violation: {}", serde_json::to_string(v)?)?;
            }
        }
        _ => emit_json(out, &report)?,
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Fail::Violations)
    }
}

fn cmd_survey(args: &SurveyArgs, out: &mut impl Write) -> Result<(), Fail> {
    let field = args.run.field.field()?;
    let format = args.run.field.format;
    let cfg = SurveyConfig {
        mode: args.run.mode()?,
        filter: PairFilter {
            min_ratio: parse_ratio(&args.min_ratio)?,
        },
        d_max: args.d_max,
        oracle_only: args.oracle_only,
        budget: env_budget()?,
        keep_records: format == Format::Csv,
    };
    let outcome = with_threads(args.run.threads, || survey(&field, &cfg))??;
    let report = &outcome.report;
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(SearchRecord::CSV_HEADER)?;
            for rec in outcome.records.iter().flatten() {
                w.write_record(rec.csv_fields())?;
            }
            w.flush()?;
        }
        Format::Text => {
            writeln!(out, "survey {} q = {}: {} pairs", report.mode, report.field.q, report.pair_count)?;
            for (d, n) in &report.min_d_histogram {
                writeln!(out, "  min_d {d:>2}: {n}")?;
            }
            if report.min_d_absent > 0 {
                writeln!(out, "  min_d absent: {}", report.min_d_absent)?;
            }
            for (case, n) in &report.case_histogram {
                writeln!(out, "  case {case:<9} {n}")?;
            }
            writeln!(out, "  fallback rate {}", report.fallback_rate)?;
            writeln!(out, "  violations {}", report.violation_count)?;
        }
        Format::Json => emit_json(out, report)?,
    }
    if report.violation_count == 0 {
        Ok(())
    } else {
        Err(Fail::Violations)
    }
}

fn cmd_hi(args: &HiArgs, out: &mut impl Write) -> Result<(), Fail> {
    no_csv(args.field.format)?;
    let field = args.field.field()?;
    let cfg = HiConfig {
        exponent: parse_ratio(&args.exponent)?,
        budget: env_budget()?,
        sample_count: args.sample,
        seed: args.seed,
    };
    let report = with_threads(args.threads, || hart_iosevich_scan(&field, &cfg))??;
    match args.field.format {
        Format::Text => {
            writeln!(
                out,
                "2A^2 scan q = {}, |A| >= {}: {} sets, {} full, {} exceptions",
                report.field.q, report.threshold, report.sets_checked, report.full_count, report.exception_count
            )?;
            for e in &report.exceptions {
                let items: Vec<String> = e.iter().map(u32::to_string).collect();
                writeln!(out, "  {{{}}}", items.join(","))?;
            }
        }
        _ => emit_json(out, &report)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct EnergyTable {
    field: sumprod::FieldSpec,
    a: Vec<u32>,
    b: Vec<u32>,
    energies: Vec<(Elem, u64)>,
    selected: sumprod::EnergyReport,
}

fn cmd_energy(args: &EnergyArgs, out: &mut impl Write) -> Result<(), Fail> {
    no_csv(args.field.format)?;
    let field = args.field.field()?;
    let (a, b) = args.pair.sets(&field)?;
    let text = args.field.format == Format::Text;
    if let Some(xi) = args.xi {
        let r = energy_report(&a, &b, field.elem(xi)?)?;
        if text {
            writeln!(out, "xi = {}: E = {}, bound {}, |C+| = {}, |C-| = {}", r.xi, r.energy, r.bound(), r.card_plus, r.card_minus)?;
        } else {
            emit_json(out, &r)?;
        }
        return Ok(());
    }
    let energies = field
        .nonzero()
        .map(|xi| Ok((xi, sumprod::energy(&a, &b, xi)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let selected = find_good_xi(&a, &b)?;
    if text {
        for (xi, e) in &energies {
            writeln!(out, "xi = {xi}: E = {e}")?;
        }
        writeln!(out, "selected xi = {}, bound {}", selected.xi, selected.bound())?;
    } else {
        emit_json(
            out,
            &EnergyTable {
                field: field.spec().clone(),
                a: a.to_indices(),
                b: b.to_indices(),
                energies,
                selected,
            },
        )?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = match &cli.command {
        Command::Decompose(a) => cmd_decompose(a, &mut out),
        Command::Verify(a) => cmd_verify(a, &mut out),
        Command::Survey(a) => cmd_survey(a, &mut out),
        Command::Hi(a) => cmd_hi(a, &mut out),
        Command::Energy(a) => cmd_energy(a, &mut out),
    };
    if let Err(Fail::Lib(e)) = &result {
        let dumped = match e {
            Error::LemmaViolation(v) => serde_json::to_writer_pretty(&mut out, v),
            Error::TheoremViolation(v) => serde_json::to_writer_pretty(&mut out, v),
            _ => Ok(()),
        };
        if dumped.is_ok() && e.is_violation() {
            let _ = writeln!(out);
        }
    }
    let flushed = out.flush();
    match result.and(flushed.map_err(Fail::Io)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(fail) => {
            match &fail {
                Fail::Parse(m) | Fail::BadWitness(m) => eprintln!("error: {m}"),
                Fail::Lib(e) => eprintln!("error: {e}"),
                Fail::Io(e) => eprintln!("error: {e}"),
                Fail::Violations => eprintln!("error: violations found; see report"),
            }
            ExitCode::from(fail.code())
        }
    }
}
