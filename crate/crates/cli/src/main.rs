use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use ohl_core::catalog::{verify_record, Catalog, IdentityRecord, Status, VerificationReport};
use ohl_core::error::Error;
use ohl_core::numeric::{context, digits_agreed, to_decimal, to_scientific};
use ohl_core::recurrence::{FamilyName, LambdaEntry, Provenance, RecurrenceEngine};
use ohl_core::relation::{
    basis_preset, find_relation, truncate_to_digits, RelationQuery, RelationResult,
    DEFAULT_COEFFICIENT_BITS, DEFAULT_CONFIDENCE_DIGITS,
};
use ohl_core::series::{summation, SeriesSpec};

const EXIT_FAIL: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_ENGINE: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "ohl", version, about = "Verify, evaluate and extend central binomial series identities")]
struct Cli {
    /// Decimal digits to work to.
    #[arg(long, global = true, env = "OHL_DIGITS", default_value_t = 30)]
    digits: u32,

    /// Catalog file; defaults to the bundled catalog.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,

    /// Worker threads for verification (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check catalog records numerically.
    Verify {
        /// Record id; may be repeated.
        #[arg(long = "id")]
        ids: Vec<String>,
        /// Every Proved and External record.
        #[arg(long, conflicts_with = "ids")]
        all: bool,
        /// Also report the conjectures (they never fail the run).
        #[arg(long)]
        include_conjectural: bool,
    },
    /// Sum a series.
    Eval {
        #[arg(long)]
        series: String,
    },
    /// Closed form of a family at a given lambda.
    Extend {
        /// main, first, second or aux
        #[arg(long)]
        family: String,
        #[arg(long)]
        lambda: u32,
    },
    /// Look for an integer relation between a value and a constant basis.
    Discover {
        /// File holding a decimal value, or `-` for stdin.
        #[arg(long, conflicts_with = "series")]
        value: Option<String>,
        /// Compute the value from a series instead.
        #[arg(long)]
        series: Option<String>,
        /// Preset name or comma separated monomials.
        #[arg(long, default_value = "default")]
        basis: String,
        #[arg(long, default_value_t = DEFAULT_COEFFICIENT_BITS)]
        max_bits: u32,
        #[arg(long, default_value_t = DEFAULT_CONFIDENCE_DIGITS)]
        confidence: u32,
    },
    /// One JSON document with every verification and the recurrence tables.
    Report {
        /// Largest lambda tabulated per family.
        #[arg(long, default_value_t = 8)]
        max_lambda: u32,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnknownId(_) => EXIT_UNKNOWN,
            Error::SeriesSyntax { .. }
            | Error::ClosedFormSyntax { .. }
            | Error::ExprSyntax { .. }
            | Error::InvalidQuery(_)
            | Error::Catalog(_) => EXIT_UNKNOWN,
            _ => EXIT_ENGINE,
        };
        Failure::new(code, e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .ok();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_catalog(cli: &Cli) -> Result<Catalog, Failure> {
    match &cli.catalog {
        Some(p) => Ok(Catalog::load(p)?),
        None => Ok(Catalog::bundled().clone()),
    }
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Verify {
            ids,
            all,
            include_conjectural,
        } => cmd_verify(cli, ids, *all, *include_conjectural),
        Command::Eval { series } => cmd_eval(cli, series),
        Command::Extend { family, lambda } => cmd_extend(cli, family, *lambda),
        Command::Discover {
            value,
            series,
            basis,
            max_bits,
            confidence,
        } => cmd_discover(cli, value.as_deref(), series.as_deref(), basis, *max_bits, *confidence),
        Command::Report { max_lambda } => cmd_report(cli, *max_lambda),
    }
}

fn select<'a>(
    catalog: &'a Catalog,
    ids: &[String],
    all: bool,
    include_conjectural: bool,
) -> Result<Vec<&'a IdentityRecord>, Failure> {
    if all || ids.is_empty() {
        if !all {
            return Err(Failure::new(EXIT_UNKNOWN, "give --id <ID> or --all"));
        }
        return Ok(catalog
            .records()
            .iter()
            .filter(|r| include_conjectural || r.status != Status::Conjectural)
            .collect());
    }
    let mut out = Vec::new();
    for id in ids {
        match catalog.get(id) {
            Ok(r) => out.push(r),
            Err(_) => {
                let near = catalog.near_matches(id);
                let hint = if near.is_empty() {
                    String::new()
                } else {
                    format!("; did you mean: {}", near.join(", "))
                };
                return Err(Failure::new(EXIT_UNKNOWN, format!("unknown identity id `{id}`{hint}")));
            }
        }
    }
    Ok(out)
}

fn verify_all(records: &[&IdentityRecord], digits: u32) -> Vec<VerificationReport> {
    let mut reports: Vec<VerificationReport> =
        records.par_iter().map(|r| verify_record(r, digits)).collect();
    reports.sort_by(|a, b| a.id.cmp(&b.id));
    reports
}

/// 0 if every counted record passed, 3 on an engine failure, else 1.
fn exit_code(reports: &[VerificationReport]) -> u8 {
    let counted = || reports.iter().filter(|r| r.status != Status::Conjectural);
    if counted().any(|r| r.method == "error") {
        EXIT_ENGINE
    } else if counted().all(|r| r.pass) {
        0
    } else {
        EXIT_FAIL
    }
}

fn cmd_verify(cli: &Cli, ids: &[String], all: bool, include_conjectural: bool) -> Outcome {
    if cli.digits < 10 {
        return Err(Failure::new(EXIT_UNKNOWN, "verify needs --digits of at least 10"));
    }
    let catalog = load_catalog(cli)?;
    let records = select(&catalog, ids, all, include_conjectural)?;
    let reports = verify_all(&records, cli.digits);
    let code = exit_code(&reports);
    match cli.format {
        Format::Json => print_json(&reports),
        Format::Text => {
            for r in &reports {
                let verdict = match (r.pass, r.status) {
                    (true, _) => "PASS",
                    (false, Status::Conjectural) => "open",
                    (false, _) if r.method == "error" => "ERROR",
                    (false, _) => "FAIL",
                };
                println!(
                    "{verdict:5} {:<32} {:>3}/{} digits  {:<11} {}",
                    r.id,
                    r.digits_agreed,
                    r.requested_digits,
                    format!("{:?}", r.status),
                    r.method
                );
                if let Some(e) = &r.error {
                    println!("      {e}");
                }
            }
            let passed = reports.iter().filter(|r| r.pass).count();
            println!("{passed}/{} passed at {} digits", reports.len(), cli.digits);
        }
    }
    if code == EXIT_ENGINE {
        let names: Vec<&str> = reports
            .iter()
            .filter(|r| r.status != Status::Conjectural && r.method == "error")
            .map(|r| r.id.as_str())
            .collect();
        eprintln!("error: engine failure in {}", names.join(", "));
    }
    Ok(code)
}

#[derive(Serialize)]
struct EvalOutput {
    series: String,
    digits: u32,
    value: String,
    error: String,
    method: String,
}

fn cmd_eval(cli: &Cli, text: &str) -> Outcome {
    let spec: SeriesSpec = text.parse()?;
    let ctx = context(cli.digits)?;
    let s = summation(&spec, &ctx)?;
    let out = EvalOutput {
        series: spec.to_string(),
        digits: cli.digits,
        value: to_decimal(&s.value, cli.digits),
        error: to_scientific(&s.error, 3),
        method: s.method.name().to_string(),
    };
    match cli.format {
        Format::Json => print_json(&out),
        Format::Text => {
            println!("series  {}", out.series);
            println!("value   {}", out.value);
            println!("error   {}", out.error);
            println!("method  {}", out.method);
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct ExtendOutput {
    family: FamilyName,
    lambda: u32,
    series: String,
    closed_form: String,
    provenance: Provenance,
    closed_form_value: String,
    series_value: String,
    digits_agreed: u32,
    pass: bool,
}

fn check_entry(family: FamilyName, lambda: u32, entry: &LambdaEntry, digits: u32) -> Result<ExtendOutput, Failure> {
    let ctx = context(digits)?;
    let spec = family.series(lambda)?;
    let s = summation(&spec, &ctx)?;
    let v = entry.value.eval(&ctx);
    let diff = Float::with_val(ctx.bits(), &s.value - &v);
    let agreed = digits_agreed(&diff, ctx.working_digits());
    Ok(ExtendOutput {
        family,
        lambda,
        series: spec.to_string(),
        closed_form: entry.value.to_string(),
        provenance: entry.provenance,
        closed_form_value: to_decimal(&v, digits),
        series_value: to_decimal(&s.value, digits),
        digits_agreed: agreed,
        pass: agreed + 5 >= digits,
    })
}

fn cmd_extend(cli: &Cli, family: &str, lambda: u32) -> Outcome {
    let family: FamilyName = family.parse().map_err(|e: Error| Failure::new(EXIT_UNKNOWN, e.to_string()))?;
    let catalog = load_catalog(cli)?;
    let mut engine = RecurrenceEngine::new(&catalog);
    engine.extend(family, lambda)?;
    let entry = engine.table(family).entries[&lambda].clone();
    let out = check_entry(family, lambda, &entry, cli.digits)?;
    match cli.format {
        Format::Json => print_json(&out),
        Format::Text => {
            println!("{}", out.series);
            println!("  = {}", out.closed_form);
            println!(
                "  {:?}; closed form {} vs sum {} ({} digits agree)",
                out.provenance, out.closed_form_value, out.series_value, out.digits_agreed
            );
        }
    }
    Ok(if out.pass { 0 } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct Candidate {
    id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    lhs: Option<String>,
    rhs: String,
    status: Status,
    verified: bool,
}

#[derive(Serialize)]
struct DiscoverOutput {
    target: String,
    target_digits: u32,
    result: RelationResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    candidate: Option<Candidate>,
}

fn read_value(source: Option<&str>) -> Result<String, Failure> {
    let mut text = String::new();
    match source {
        None | Some("-") => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::new(EXIT_UNKNOWN, format!("stdin: {e}")))?;
        }
        Some(path) => {
            text = std::fs::read_to_string(path)
                .map_err(|e| Failure::new(EXIT_UNKNOWN, format!("{path}: {e}")))?;
        }
    }
    Ok(text.trim().to_string())
}

/// Parses a decimal literal, keeping as many digits as it carries.
fn parse_decimal(text: &str) -> Result<Float, Failure> {
    let mantissa = text.split(['e', 'E']).next().unwrap_or("");
    let digits = mantissa
        .chars()
        .filter(|c| c.is_ascii_digit())
        .skip_while(|&c| c == '0')
        .count()
        .max(1) as u32;
    let parsed = Float::parse(text)
        .map_err(|e| Failure::new(EXIT_UNKNOWN, format!("not a decimal number: {e}")))?;
    let bits = (digits as f64 / std::f64::consts::LOG10_2).ceil() as u32;
    Ok(Float::with_val(bits.max(2), parsed))
}

fn cmd_discover(
    cli: &Cli,
    value: Option<&str>,
    series: Option<&str>,
    basis: &str,
    max_bits: u32,
    confidence: u32,
) -> Outcome {
    let basis = basis_preset(basis)?;
    let (target, lhs) = match series {
        Some(text) => {
            let spec: SeriesSpec = text.parse()?;
            let ctx = context(cli.digits)?;
            let s = summation(&spec, &ctx)?;
            (truncate_to_digits(&s.value, cli.digits), Some(spec.to_string()))
        }
        None => (parse_decimal(&read_value(value)?)?, None),
    };
    let mut q = RelationQuery::new(target, basis);
    q.max_coefficient_bits = max_bits;
    q.confidence_digits = confidence;
    let digits = q.target_digits();
    let ctx = context(digits)?;
    let result = find_relation(&q, &ctx)?;
    let candidate = result.closed_form().map(|cf| Candidate {
        id: "discovered".to_string(),
        lhs: lhs.clone(),
        rhs: cf.to_string(),
        status: Status::External,
        verified: false,
    });
    let out = DiscoverOutput {
        target: to_decimal(&q.target, digits),
        target_digits: digits,
        result,
        candidate,
    };
    match cli.format {
        Format::Json => print_json(&out),
        Format::Text => {
            println!("target  {} ({} digits)", out.target, out.target_digits);
            if let Some(c) = &out.candidate {
                let coeffs: Vec<String> = out.result.coefficients.iter().map(|c| c.to_string()).collect();
                println!("found   {}", c.rhs);
                println!("coefficients [{}]", coeffs.join(", "));
                println!("residual below 1e-{}", out.result.residual_digits);
            } else {
                println!(
                    "no relation with norm below 1e{} over {} basis elements",
                    out.result.norm_bound_digits,
                    out.result.basis.len()
                );
            }
        }
    }
    Ok(if out.result.found { 0 } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct FamilyReport {
    family: FamilyName,
    entries: Vec<ExtendOutput>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct Summary {
    records: usize,
    passed: usize,
    failed: Vec<String>,
    conjectural: Vec<String>,
    exit_code: u8,
}

#[derive(Serialize)]
struct Report {
    digits: u32,
    summary: Summary,
    verification: Vec<VerificationReport>,
    recurrences: Vec<FamilyReport>,
}

fn cmd_report(cli: &Cli, max_lambda: u32) -> Outcome {
    let catalog = load_catalog(cli)?;
    let records: Vec<&IdentityRecord> = catalog.records().iter().collect();
    let verification = verify_all(&records, cli.digits);
    let families: Vec<FamilyReport> = FamilyName::ALL
        .par_iter()
        .map(|&family| {
            let mut engine = RecurrenceEngine::new(&catalog);
            let mut entries = Vec::new();
            for lambda in 1..=max_lambda {
                let step = engine
                    .extend(family, lambda)
                    .map_err(Failure::from)
                    .and_then(|_| {
                        let entry = engine.table(family).entries[&lambda].clone();
                        check_entry(family, lambda, &entry, cli.digits)
                    });
                match step {
                    Ok(e) => entries.push(e),
                    Err(f) => {
                        return FamilyReport {
                            family,
                            entries,
                            error: Some(f.message),
                        }
                    }
                }
            }
            FamilyReport {
                family,
                entries,
                error: None,
            }
        })
        .collect();
    let mut code = exit_code(&verification);
    if code == 0
        && families
            .iter()
            .any(|f| f.error.is_some() || f.entries.iter().any(|e| !e.pass))
    {
        code = EXIT_FAIL;
    }
    let summary = Summary {
        records: verification.len(),
        passed: verification.iter().filter(|r| r.pass).count(),
        failed: verification
            .iter()
            .filter(|r| !r.pass && r.status != Status::Conjectural)
            .map(|r| r.id.clone())
            .collect(),
        conjectural: verification
            .iter()
            .filter(|r| r.status == Status::Conjectural)
            .map(|r| r.id.clone())
            .collect(),
        exit_code: code,
    };
    print_json(&Report {
        digits: cli.digits,
        summary,
        verification,
        recurrences: families,
    });
    Ok(code)
}
