//! `flipsig`: command-line front end. Reports go to stdout as JSON,
//! diagnostics to stderr, and the exit code encodes the verdict.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use flipsig::dynamics::{
    count_flip_fixed, count_periodic, higher_block, DynamicsError, DEFAULT_BUDGET,
};
use flipsig::equivalence::{
    compose_sse, distinguish, higher_block_chain, search_hee, search_se, verify_se,
    EquivalenceError, SearchOptions,
};
use flipsig::flip::{enumerate_flips, permutation_cycles, FlipError, DEFAULT_FLIP_ALPHABET_LIMIT};
use flipsig::io::{
    parse_pair_json, parse_pair_txt, render_pair_txt, ChainFile, FormatError, PairFile, WitnessFile,
};
use flipsig::kernel::flip_signature;
use flipsig::linalg::{
    char_poly, jordan_profile, small_factors, IntPolynomial, JordanProfile, LinalgError,
};
use flipsig::zeta::{fixed_point_counts, lind_zeta, DEFAULT_DEGREE};
use flipsig::{FlipPair, ZeroOneMatrix};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_VALIDATION: u8 = 4;
const EXIT_LIMIT: u8 = 5;
const EXIT_ORACLE: u8 = 6;
const EXIT_MATH: u8 = 7;

#[derive(Parser)]
#[command(
    name = "flipsig",
    version,
    about = "Invariants and equivalences of Markov shifts with flips"
)]
struct Cli {
    /// Input matrix format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Include elapsed milliseconds in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Txt,
}

#[derive(Subcommand)]
enum Command {
    /// Check AJ = JA^T and J^2 = I.
    Validate { file: PathBuf },
    /// Flip signature of a pair.
    Signature { file: PathBuf },
    /// Lind zeta series.
    Zeta {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEGREE)]
        degree: usize,
    },
    /// Periodic and flip-fixed point counts.
    FixedPoints {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_m: usize,
        /// Cross-check every count by enumeration where the budget allows.
        #[arg(long)]
        oracle: bool,
    },
    /// The n-block pair, or with --chain the recoding chain to it.
    HigherBlock {
        file: PathBuf,
        #[arg(short, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        chain: bool,
    },
    /// Search for a zero-one half elementary equivalence.
    HeeSearch {
        from: PathBuf,
        to: PathBuf,
        #[arg(long, default_value_t = SearchOptions::default().max_cells)]
        max_cells: usize,
    },
    /// Verify a shift-equivalence witness, or search for one.
    SeVerify {
        from: PathBuf,
        to: PathBuf,
        #[arg(long, required_unless_present = "search")]
        witness: Option<PathBuf>,
        #[arg(long, conflicts_with = "witness")]
        search: bool,
        #[arg(long, default_value_t = 1)]
        lag: usize,
        #[arg(long, default_value_t = 2)]
        max_entry: u32,
    },
    /// Multiply out a chain of half elementary equivalences.
    SseCompose { chain: PathBuf },
    /// Look for an invariant that separates two pairs.
    Distinguish {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEGREE)]
        degree: usize,
    },
    /// Jordan block sizes of A at an irreducible factor.
    Jordan {
        #[arg(required = true, num_args = 1..)]
        files: Vec<PathBuf>,
        /// Defaults to every small factor of the characteristic polynomial other than t.
        #[arg(long)]
        factor: Option<String>,
    },
    /// All flips J compatible with the matrix A of a file.
    Flips {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FLIP_ALPHABET_LIMIT)]
        limit: usize,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Flip(f) => f.into(),
            other => Failure::new(EXIT_INPUT, other.to_string()),
        }
    }
}

impl From<FlipError> for Failure {
    fn from(e: FlipError) -> Self {
        let code = match e {
            FlipError::AlphabetTooLarge { .. } => EXIT_LIMIT,
            _ => EXIT_VALIDATION,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Self {
        let code = match e {
            DynamicsError::BudgetExceeded { .. } => EXIT_LIMIT,
            _ => EXIT_MATH,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<EquivalenceError> for Failure {
    fn from(e: EquivalenceError) -> Self {
        let code = match &e {
            EquivalenceError::SearchBudgetExceeded { .. } | EquivalenceError::SizeLimit { .. } => {
                EXIT_LIMIT
            }
            EquivalenceError::Dynamics(DynamicsError::BudgetExceeded { .. }) => EXIT_LIMIT,
            _ => EXIT_MATH,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<LinalgError> for Failure {
    fn from(e: LinalgError) -> Self {
        let code = match e {
            LinalgError::PolynomialParse(_) => EXIT_USAGE,
            _ => EXIT_MATH,
        };
        Failure::new(code, e.to_string())
    }
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    inputs: Vec<InputDigest>,
    outputs: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<u128>,
}

/// Files read by a command, with their digests recorded for the report.
#[derive(Default)]
struct Inputs {
    format: Option<Format>,
    digests: Vec<InputDigest>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = fs::read(path)
            .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
        self.digests.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes)
            .map_err(|_| Failure::new(EXIT_INPUT, format!("{}: not UTF-8", path.display())))
    }

    fn pair_file(&mut self, path: &Path) -> Result<PairFile, Failure> {
        let src = self.read(path)?;
        let parsed = match self.format.unwrap_or(Format::Json) {
            Format::Json => parse_pair_json(&src),
            Format::Txt => parse_pair_txt(&src),
        };
        parsed.map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))
    }

    fn pair(&mut self, path: &Path) -> Result<FlipPair, Failure> {
        let file = self.pair_file(path)?;
        file.to_pair().map_err(|e| {
            let f = Failure::from(e);
            Failure::new(f.code, format!("{}: {}", path.display(), f.message))
        })
    }

    fn json<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> Result<T, Failure> {
        let src = self.read(path)?;
        serde_json::from_str(&src)
            .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))
    }
}

/// The command's payload and whether its verdict is affirmative.
struct Outcome {
    outputs: Value,
    affirmative: bool,
}

impl Outcome {
    fn done(outputs: Value) -> Self {
        Outcome {
            outputs,
            affirmative: true,
        }
    }
}

fn budget() -> Result<u64, Failure> {
    match std::env::var("FLIPSIG_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::new(
                EXIT_USAGE,
                format!("FLIPSIG_BUDGET={v:?} is not a positive integer"),
            )
        }),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn search_options(max_cells: usize) -> Result<SearchOptions, Failure> {
    Ok(SearchOptions {
        max_cells,
        max_nodes: budget()?,
    })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn profile_value(p: &JordanProfile) -> Value {
    json!({
        "factor": p.factor.to_string(),
        "block_sizes": p.block_sizes,
        "rank_sequence": p.rank_sequence,
    })
}

fn cmd_validate(inputs: &mut Inputs, file: &Path) -> Result<Outcome, Failure> {
    let raw = inputs.pair_file(file)?;
    match raw.to_pair() {
        Ok(p) => Ok(Outcome::done(json!({
            "valid": true,
            "size": p.size(),
            "tau": p.tau_cycles(),
        }))),
        Err(FormatError::Flip(e)) => {
            let code = Failure::from(e.clone()).code;
            eprintln!("flipsig: {}: {e}", file.display());
            print_report(
                "validate",
                inputs,
                json!({"valid": false, "error": e.to_string()}),
                None,
            );
            Err(Failure::new(code, String::new()))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_fixed_points(
    inputs: &mut Inputs,
    file: &Path,
    max_m: usize,
    oracle: bool,
) -> Result<Outcome, Failure> {
    let p = inputs.pair(file)?;
    let table = fixed_point_counts(&p, max_m);
    let mut outputs = json!({ "table": to_value(&table) });
    if !oracle {
        return Ok(Outcome::done(outputs));
    }
    let budget = budget()?;
    let (mut checked, mut skipped, mut mismatches) = (Vec::new(), Vec::new(), Vec::new());
    let mut compare =
        |label: String, period: usize, formula: &BigInt, brute: Result<u64, DynamicsError>| {
            match brute {
                Ok(count) if BigInt::from(count) == *formula => checked.push(label),
                Ok(count) => mismatches.push(
                    json!({"count": label, "formula": formula.to_string(), "enumerated": count}),
                ),
                Err(DynamicsError::BudgetExceeded { .. }) => {
                    skipped.push(json!({"count": label, "period": period}))
                }
                Err(e) => mismatches.push(json!({"count": label, "error": e.to_string()})),
            }
        };
    for m in 1..=max_m {
        compare(
            format!("p_{m}"),
            m,
            &table.p_m[m - 1],
            count_periodic(p.a(), m, budget),
        );
        let odd = 2 * m - 1;
        compare(
            format!("p_{odd},0"),
            odd,
            &table.p_odd0[m - 1],
            count_flip_fixed(&p, odd, 0, budget),
        );
        let even = 2 * m;
        compare(
            format!("p_{even},0"),
            even,
            &table.p_even0[m - 1],
            count_flip_fixed(&p, even, 0, budget),
        );
        compare(
            format!("p_{even},1"),
            even,
            &table.p_even1[m - 1],
            count_flip_fixed(&p, even, 1, budget),
        );
    }
    let agree = mismatches.is_empty();
    outputs["oracle"] = json!({
        "agree": agree,
        "budget": budget,
        "checked": checked.len(),
        "skipped": skipped,
        "mismatches": mismatches,
    });
    if !agree {
        print_report("fixed-points", inputs, outputs, None);
        return Err(Failure::new(
            EXIT_ORACLE,
            "enumerated counts disagree with the formulas",
        ));
    }
    Ok(Outcome::done(outputs))
}

fn cmd_higher_block(
    inputs: &mut Inputs,
    file: &Path,
    n: usize,
    chain: bool,
) -> Result<Outcome, Failure> {
    if n == 0 {
        return Err(Failure::new(EXIT_USAGE, "block length must be positive"));
    }
    let p = inputs.pair(file)?;
    if chain {
        let c = higher_block_chain(&p, n)?;
        return Ok(Outcome::done(to_value(&ChainFile::from_chain(&c))));
    }
    let hb = higher_block(&p, n)?;
    let mut outputs = to_value(&PairFile::from_pair(None, &hb.pair));
    outputs["blocks"] = to_value(&hb.blocks);
    if inputs.format == Some(Format::Txt) {
        outputs["txt"] = Value::String(render_pair_txt(&hb.pair));
    }
    Ok(Outcome::done(outputs))
}

fn cmd_hee_search(
    inputs: &mut Inputs,
    from: &Path,
    to: &Path,
    max_cells: usize,
) -> Result<Outcome, Failure> {
    let (p, q) = (inputs.pair(from)?, inputs.pair(to)?);
    let opts = search_options(max_cells)?;
    let found = search_hee(&p, &q, opts)?;
    Ok(Outcome {
        affirmative: found.is_some(),
        outputs: json!({
            "bound": {"max_cells": opts.max_cells, "max_nodes": opts.max_nodes, "cells": p.size() * q.size()},
            "witness": found.as_ref().map(|w| to_value(&WitnessFile::from(w))),
        }),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_se_verify(
    inputs: &mut Inputs,
    from: &Path,
    to: &Path,
    witness: Option<&Path>,
    lag: usize,
    max_entry: u32,
) -> Result<Outcome, Failure> {
    let (p, q) = (inputs.pair(from)?, inputs.pair(to)?);
    let Some(path) = witness else {
        let opts = search_options(SearchOptions::default().max_cells)?;
        let found = search_se(&p, &q, lag, max_entry, opts)?;
        return Ok(Outcome {
            affirmative: found.is_some(),
            outputs: json!({
                "bound": {"lag": lag, "max_entry": max_entry, "max_nodes": opts.max_nodes},
                "witness": found.as_ref().map(|w| to_value(&WitnessFile::from(w))),
            }),
        });
    };
    let w: WitnessFile = inputs.json(path)?;
    Ok(match verify_se(&p, &q, &w.d, &w.e, w.lag) {
        Ok(_) => Outcome::done(json!({"valid": true, "lag": w.lag})),
        Err(EquivalenceError::IdentityFails(identity)) => Outcome {
            affirmative: false,
            outputs: json!({"valid": false, "lag": w.lag, "failed_identity": to_value(&identity), "detail": identity.to_string()}),
        },
        Err(e) => return Err(e.into()),
    })
}

fn cmd_sse_compose(inputs: &mut Inputs, path: &Path) -> Result<Outcome, Failure> {
    let file: ChainFile = inputs.json(path)?;
    let chain = file.to_chain()?;
    let w = compose_sse(&chain)?;
    Ok(Outcome::done(to_value(&WitnessFile::from(&w))))
}

fn cmd_distinguish(
    inputs: &mut Inputs,
    left: &Path,
    right: &Path,
    degree: usize,
) -> Result<Outcome, Failure> {
    let (p, q) = (inputs.pair(left)?, inputs.pair(right)?);
    let certificate = distinguish(&p, &q, degree);
    Ok(Outcome {
        affirmative: certificate.is_some(),
        outputs: match certificate {
            Some(c) => json!({"verdict": "not conjugate", "certificate": to_value(&c)}),
            None => json!({"verdict": "inconclusive", "degree": degree}),
        },
    })
}

fn cmd_jordan(
    inputs: &mut Inputs,
    files: &[PathBuf],
    factor: Option<&str>,
) -> Result<Outcome, Failure> {
    let pairs: Vec<FlipPair> = files
        .iter()
        .map(|f| inputs.pair(f))
        .collect::<Result<_, _>>()?;
    let factors: Vec<IntPolynomial> = match factor {
        Some(src) => vec![IntPolynomial::parse(src)?],
        None => {
            let mut all: Vec<IntPolynomial> = Vec::new();
            for p in &pairs {
                for (f, _) in small_factors(&char_poly(&p.a().to_rational())?).factors {
                    if f != IntPolynomial::t() && !all.contains(&f) {
                        all.push(f);
                    }
                }
            }
            all
        }
    };
    let mut per_file = Vec::new();
    let mut profiles: Vec<Vec<JordanProfile>> = Vec::new();
    for (path, p) in files.iter().zip(&pairs) {
        let ps = factors
            .iter()
            .map(|f| jordan_profile(&p.a().to_rational(), f))
            .collect::<Result<Vec<_>, _>>()?;
        per_file.push(json!({
            "path": path.display().to_string(),
            "profiles": ps.iter().map(profile_value).collect::<Vec<_>>(),
        }));
        profiles.push(ps);
    }
    let mut outputs = json!({"files": per_file});
    if profiles.len() == 2 {
        let differing: Vec<String> = factors
            .iter()
            .zip(profiles[0].iter().zip(&profiles[1]))
            .filter(|(_, (l, r))| l.block_sizes != r.block_sizes)
            .map(|(f, _)| f.to_string())
            .collect();
        outputs["shift_equivalence_obstructed"] = json!(!differing.is_empty());
        outputs["differing_factors"] = json!(differing);
    }
    Ok(Outcome::done(outputs))
}

fn cmd_flips(inputs: &mut Inputs, file: &Path, limit: usize) -> Result<Outcome, Failure> {
    let src = inputs.read(file)?;
    let rows: Vec<Vec<u8>> = match inputs.format.unwrap_or(Format::Json) {
        Format::Json => {
            let v: Value =
                serde_json::from_str(&src).map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
            serde_json::from_value(v.get("A").cloned().unwrap_or(Value::Null)).map_err(|e| {
                Failure::new(EXIT_INPUT, format!("{}: field A: {e}", file.display()))
            })?
        }
        // a lone matrix is enough here
        Format::Txt => match parse_pair_txt(&src) {
            Ok(pf) => pf.a,
            Err(_) => parse_pair_txt(&format!("{src}\n\n1\n"))?.a,
        },
    };
    let a = ZeroOneMatrix::from_rows(&rows)?;
    let flips = enumerate_flips(&a, limit)?;
    let list: Vec<Value> = flips
        .iter()
        .map(|j| {
            let tau: Vec<usize> = (0..j.size())
                .map(|r| j.successors(r).next().expect("permutation"))
                .collect();
            json!({"tau": permutation_cycles(&tau), "J": j.to_rows()})
        })
        .collect();
    Ok(Outcome {
        affirmative: !list.is_empty(),
        outputs: json!({"count": list.len(), "flips": list}),
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Signature { .. } => "signature",
        Command::Zeta { .. } => "zeta",
        Command::FixedPoints { .. } => "fixed-points",
        Command::HigherBlock { .. } => "higher-block",
        Command::HeeSearch { .. } => "hee-search",
        Command::SeVerify { .. } => "se-verify",
        Command::SseCompose { .. } => "sse-compose",
        Command::Distinguish { .. } => "distinguish",
        Command::Jordan { .. } => "jordan",
        Command::Flips { .. } => "flips",
    }
}

fn run(command: &Command, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    match command {
        Command::Validate { file } => cmd_validate(inputs, file),
        Command::Signature { file } => Ok(Outcome::done(to_value(&flip_signature(
            &inputs.pair(file)?,
        )))),
        Command::Zeta { file, degree } => Ok(Outcome::done(to_value(&lind_zeta(
            &inputs.pair(file)?,
            *degree,
        )))),
        Command::FixedPoints {
            file,
            max_m,
            oracle,
        } => {
            if *max_m == 0 {
                return Err(Failure::new(EXIT_USAGE, "--max-m must be positive"));
            }
            cmd_fixed_points(inputs, file, *max_m, *oracle)
        }
        Command::HigherBlock { file, n, chain } => cmd_higher_block(inputs, file, *n, *chain),
        Command::HeeSearch {
            from,
            to,
            max_cells,
        } => cmd_hee_search(inputs, from, to, *max_cells),
        Command::SeVerify {
            from,
            to,
            witness,
            lag,
            max_entry,
            ..
        } => cmd_se_verify(inputs, from, to, witness.as_deref(), *lag, *max_entry),
        Command::SseCompose { chain } => cmd_sse_compose(inputs, chain),
        Command::Distinguish {
            left,
            right,
            degree,
        } => cmd_distinguish(inputs, left, right, *degree),
        Command::Jordan { files, factor } => cmd_jordan(inputs, files, factor.as_deref()),
        Command::Flips { file, limit } => cmd_flips(inputs, file, *limit),
    }
}

fn print_report(
    command: &'static str,
    inputs: &mut Inputs,
    outputs: Value,
    timing_ms: Option<u128>,
) {
    let report = RunReport {
        command,
        inputs: std::mem::take(&mut inputs.digests),
        outputs,
        timing_ms,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let name = command_name(&cli.command);
    let mut inputs = Inputs {
        format: Some(cli.format),
        ..Inputs::default()
    };
    match run(&cli.command, &mut inputs) {
        Ok(outcome) => {
            let timing = cli.timing.then(|| started.elapsed().as_millis());
            print_report(name, &mut inputs, outcome.outputs, timing);
            if outcome.affirmative {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_NEGATIVE)
            }
        }
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("flipsig: {}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}
