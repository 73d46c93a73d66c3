use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qslice_core::flags::{self, FlagPair};
use qslice_core::harness::{self, CombBounds, CombPredicates, GenMode, SuiteSpec};
use qslice_core::par::Exec;
use qslice_core::paths::{self, AdmissiblePath};
use qslice_core::phi::{self, TildeData};
use qslice_core::quiver::{self, ADHMData};
use qslice_core::weight::{self, DimData};

/// Exact verification tools for ADHM quiver data and their slice embedding.
///
/// Parallel batch commands honour QSLICE_THREADS.
#[derive(Parser)]
#[command(name = "qslice", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    General,
    Lagrangian,
    OneSidedA,
    OneSidedB,
}

impl From<Mode> for GenMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::General => GenMode::General,
            Mode::Lagrangian => GenMode::Lagrangian,
            Mode::OneSidedA => GenMode::OneSidedA,
            Mode::OneSidedB => GenMode::OneSidedB,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample admissible data.
    Gen {
        /// Dimension vectors, e.g. "d=1,1;v=1,1".
        #[arg(long)]
        dims: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "general")]
        mode: Mode,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Admissibility, both stability tests and the invariant signature hash.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Embed data into the tilde quiver.
    Embed {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the invariant report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Recover data from transversal tilde data.
    Invert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form coefficient tables with positivity checks.
    Coeffs {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Combinatorial summary of one (d, v) or (d, a), or an exhaustive scan.
    Comb {
        /// JSON file with {n, d, v} or {n, d, a}.
        #[arg(long = "in", conflicts_with = "scan")]
        input: Option<PathBuf>,
        /// Scan every (d, v) in the bounds below.
        #[arg(long)]
        scan: bool,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 3)]
        d_max: i64,
        #[arg(long, default_value_t = 4)]
        v_abs_max: i64,
    },
    /// Flag-case tools.
    Flag {
        #[command(subcommand)]
        cmd: FlagCmd,
    },
    /// Path algebra tools.
    Paths {
        #[command(subcommand)]
        cmd: PathsCmd,
    },
    /// Run a suite file and print the report; exits nonzero on any failure.
    Verify {
        /// Suite file: {"cases": [...], "comb": {...}}.
        #[arg(long, conflicts_with = "default")]
        spec: Option<PathBuf>,
        /// Use the built-in desk-scale matrix instead of a file.
        #[arg(long)]
        default: bool,
        /// Seeds per case for --default.
        #[arg(long, default_value_t = 50)]
        seeds: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Force the sequential path.
        #[arg(long)]
        sequential: bool,
    },
    /// Re-run one case or one recorded sample ("key" or "key#seed").
    Replay {
        #[arg(long = "case")]
        key: String,
    },
}

#[derive(Subcommand)]
enum FlagCmd {
    /// Sample a flag pair of type a.
    Gen {
        /// Flag type, e.g. "1,1,1".
        #[arg(long)]
        a: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pair to data and back; reports whether both roundtrips are exact.
    Roundtrip {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum PathsCmd {
    /// Evaluate an admissible path such as "[1 b1 2^1 a1 1]".
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        path: String,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn int_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<i64>().map_err(|_| anyhow!("not an integer: {x:?}")))
        .collect()
}

/// "d=…;v=…" with an optional "n=…".
fn parse_dims(s: &str) -> Result<DimData> {
    let (mut n, mut d, mut v) = (None, None, None);
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('=') {
            Some(("n", x)) => n = Some(x.trim().parse::<usize>()?),
            Some(("d", x)) => d = Some(int_list(x)?),
            Some(("v", x)) => v = Some(int_list(x)?),
            _ => bail!("bad dims component {part:?}"),
        }
    }
    let (d, v) = (d.context("dims need d=")?, v.context("dims need v=")?);
    let n = n.unwrap_or(d.len() + 1);
    Ok(DimData::new(n, d, v)?)
}

fn embed_report(z: &ADHMData, t: &TildeData) -> Result<Value> {
    let transversal = phi::check_transversal(t);
    let u = phi::slice_point(t)?;
    let slice = phi::slice_report(&t.layout, &u);
    let stable = quiver::check_stable_criterion(z)?;
    Ok(json!({
        "transversal": transversal.ok,
        "violation": transversal.violation,
        "tilde_adhm": phi::check_tilde_adhm(t),
        "phi_equations": phi::check_phi_equations(z, t),
        "roundtrip": phi::phi_inverse(t)? == *z,
        "stable": stable,
        "tilde_stable": phi::tilde_stability(t)?,
        "filtration": phi::filtration_check(t)?,
        "slice_nilpotent": slice.nilpotent,
        "slice_commutes": slice.in_slice,
        "jordan_type": slice.jordan_type,
        "lambda_a": slice.lambda_a,
        "dominated": slice.dominated,
    }))
}

fn comb_summary(spec: &Value) -> Result<Value> {
    let field = |k: &str| -> Option<Vec<i64>> { spec.get(k).and_then(|x| serde_json::from_value(x.clone()).ok()) };
    let d = field("d").context("missing d")?;
    let n = spec.get("n").and_then(Value::as_u64).map_or(d.len() + 1, |x| x as usize);
    let v = match (field("v"), field("a")) {
        (Some(v), _) => v,
        (None, Some(a)) => weight::v_of(&d, &a)?,
        (None, None) => bail!("need v or a"),
    };
    Ok(serde_json::to_value(weight::summarize(&DimData::new(n, d, v)?))?)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Gen { dims, seed, mode, out } => {
            let dims = parse_dims(&dims)?;
            let z = harness::sample_data(&dims, mode.into(), seed)?
                .ok_or_else(|| anyhow!("no data of this shape from the {} generator", GenMode::from(mode).name()))?;
            emit(&serde_json::to_value(&z)?, out.as_deref())?;
        }
        Cmd::Check { input } => {
            let z: ADHMData = read_json(&input)?;
            let admissible = quiver::check_admissible(&z);
            let mut out = json!({ "admissible": admissible });
            if admissible {
                out["stable"] = json!(quiver::check_stable_criterion(&z)?);
                out["stable_by_definition"] = json!(quiver::check_stable_definition(&z)?);
                out["signature_hash"] = json!(quiver::signature_hash(&quiver::invariant_signature(&z)?));
            }
            emit(&out, None)?;
            return Ok(admissible);
        }
        Cmd::Embed { input, out, report } => {
            let z: ADHMData = read_json(&input)?;
            let t = phi::phi(&z)?;
            emit(&serde_json::to_value(&t)?, out.as_deref())?;
            if let Some(path) = report {
                emit(&embed_report(&z, &t)?, Some(&path))?;
            }
        }
        Cmd::Invert { input, out } => {
            let t: TildeData = read_json(&input)?;
            let z = phi::phi_inverse(&t)?;
            emit(&serde_json::to_value(&z)?, out.as_deref())?;
        }
        Cmd::Coeffs { n, out } => {
            if n < 2 {
                bail!("n must be at least 2");
            }
            let table = phi::coefficient_tables(n);
            let bad = table.positivity_violations();
            let mut value = serde_json::to_value(&table)?;
            value["positivity_violations"] = json!(bad);
            emit(&value, out.as_deref())?;
            return Ok(bad.is_empty());
        }
        Cmd::Comb { input, scan, n_max, d_max, v_abs_max } => {
            if scan {
                let bounds = CombBounds { n_max, d_max, v_abs_max };
                let rep = harness::exhaustive_comb_scan(&bounds, &CombPredicates::default(), Exec::from_env());
                emit(&serde_json::to_value(&rep)?, None)?;
                return Ok(rep.disagreements.is_empty());
            }
            let input = input.context("give --in or --scan")?;
            emit(&comb_summary(&read_json(&input)?)?, None)?;
        }
        Cmd::Flag { cmd: FlagCmd::Gen { a, seed, out } } => {
            let a = int_list(&a)?;
            if a.iter().any(|&x| x < 0) {
                bail!("flag type entries must be nonnegative");
            }
            let a: Vec<usize> = a.into_iter().map(|x| x as usize).collect();
            emit(&serde_json::to_value(flags::gen_flag_pair(&a, seed))?, out.as_deref())?;
        }
        Cmd::Flag { cmd: FlagCmd::Roundtrip { input } } => {
            let p: FlagPair = read_json(&input)?;
            let z = flags::data_of_flag(&p)?;
            let back = flags::flag_of_data(&z)?;
            let pair_exact = back == p;
            let data_exact = flags::gauge_to_normal_form(&z).is_ok();
            emit(&json!({ "data": z, "pair_roundtrip": pair_exact, "data_roundtrip": data_exact }), None)?;
            return Ok(pair_exact && data_exact);
        }
        Cmd::Paths { cmd: PathsCmd::Eval { input, path } } => {
            let z: ADHMData = read_json(&input)?;
            let p: AdmissiblePath = path.parse()?;
            emit(&serde_json::to_value(paths::eval_admissible(&p, &z)?)?, None)?;
        }
        Cmd::Verify { spec, default, seeds, out, sequential } => {
            let suite = match (spec, default) {
                (Some(path), _) => SuiteSpec::parse(&fs::read_to_string(&path)?)?,
                (None, true) => harness::default_suite(seeds),
                (None, false) => bail!("give --spec or --default"),
            };
            let exec = if sequential { Exec::Sequential } else { Exec::from_env() };
            let rep = harness::run_suite_with(&suite, exec);
            emit(&serde_json::to_value(&rep)?, out.as_deref())?;
            eprintln!(
                "{} cases, {} failures{}",
                rep.cases.len(),
                rep.failures().count(),
                rep.comb.as_ref().map_or(String::new(), |c| format!(", comb disagreements {}", c.disagreements.len()))
            );
            return Ok(rep.passed);
        }
        Cmd::Replay { key } => {
            let rep = harness::replay(&key)?;
            let ok = rep.passed();
            emit(&serde_json::to_value(&rep)?, None)?;
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
