//! Command-line front door for the algstat workbench.
//!
//! Exit codes: 0 success, 2 usage, 3 resource budget, 4 io, 5 verification
//! or profile failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use algstat::bits::BitString;
use algstat::enumerate::{CacheError, EnumerateError};
use algstat::pipeline::{self, CacheOutcome, PipelineError, TableSource};
use algstat::profiles::{self, Epsilons, SlackBound};
use algstat::verify;
use algstat::vm::MachineConfig;

const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_VERIFY: u8 = 5;

#[derive(Parser)]
#[command(
    name = "algstat",
    version,
    about = "Exhaustive program enumeration on the KVM-8 machine: complexity tables, \
             profile curves, and the verification suite",
    after_help = "Exit codes: 2 usage, 3 enumeration budget, 4 io, 5 verification/profile \
                  failure.\nBit strings are written len:hex (MSB-first, zero-padded), e.g. \
                  `4:60` for 0110 and `0:` for the empty string.\nALGSTAT_CACHE_DIR \
                  overrides the default cache directory (.algstat-cache)."
)]
struct Cli {
    /// Worker threads for enumeration (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build (or load from cache) the exhaustive run table for a condition.
    Table {
        /// Condition on the input tape, as len:hex.
        #[arg(long, default_value = "0:")]
        condition: String,
        /// Maximal program length in bits.
        #[arg(long = "L")]
        max_len: u32,
        /// Step cap per program.
        #[arg(long = "T")]
        step_cap: u32,
        /// Cache directory (default: $ALGSTAT_CACHE_DIR or .algstat-cache).
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Emit the three profile curves, the coincidence report and the model
    /// dump for a string.
    Profiles {
        /// The string, as len:hex.
        #[arg(long)]
        x: String,
        #[arg(long = "L")]
        max_len: u32,
        #[arg(long = "T")]
        step_cap: u32,
        /// Also emit the enumeration-rank point file.
        #[arg(long)]
        rank: bool,
        /// Output directory for the emitted files.
        #[arg(long, default_value = "algstat-out")]
        out: PathBuf,
        #[arg(long)]
        cache: Option<PathBuf>,
        /// JSON file with the slack line {a, b}; default: built-in golden.
        #[arg(long)]
        slack: Option<PathBuf>,
        /// Keep only models whose elements are at most this long.
        #[arg(long)]
        max_elem_len: Option<u32>,
    },
    /// Run the verification suite and print one line per check.
    Verify {
        #[arg(long, value_enum, default_value_t = VerifyScale::Smoke)]
        scale: VerifyScale,
        /// Report path (the full scale writes verify-report.json by default).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Evaluate the analytic helpers to 10 decimal places.
    Analytic {
        /// Shannon entropy H(p).
        #[arg(long)]
        shannon: Option<f64>,
        /// Two-part length hints for binomial(N, M).
        #[arg(long, num_args = 2, value_names = ["N", "M"])]
        binom: Option<Vec<u64>>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyScale {
    Smoke,
    Full,
}

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

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 0 {
        // Global pool; ignore the error if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Table {
            condition,
            max_len,
            step_cap,
            cache,
        } => cmd_table(&condition, max_len, step_cap, cache),
        Command::Profiles {
            x,
            max_len,
            step_cap,
            rank,
            out,
            cache,
            slack,
            max_elem_len,
        } => cmd_profiles(&x, max_len, step_cap, rank, out, cache, slack, max_elem_len),
        Command::Verify { scale, report } => cmd_verify(scale, report),
        Command::Analytic { shannon, binom } => cmd_analytic(shannon, binom),
    }
}

fn parse_bits(what: &str, s: &str) -> Result<BitString, Failure> {
    BitString::from_str(s).map_err(|e| Failure::new(EXIT_USAGE, format!("bad {what} {s:?}: {e}")))
}

fn cache_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("ALGSTAT_CACHE_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(".algstat-cache"))
}

fn pipeline_failure(e: PipelineError) -> Failure {
    let code = match &e {
        PipelineError::Budget(_) => EXIT_BUDGET,
        PipelineError::Cache(CacheError::Io(_)) | PipelineError::Io(_) => EXIT_IO,
        PipelineError::Cache(_) => EXIT_IO,
        PipelineError::Model(algstat::models::ModelError::Budget(_)) => EXIT_BUDGET,
        PipelineError::Model(_) | PipelineError::Profile(_) => EXIT_VERIFY,
    };
    Failure::new(code, e.to_string())
}

fn cmd_table(
    condition: &str,
    max_len: u32,
    step_cap: u32,
    cache: Option<PathBuf>,
) -> Result<(), Failure> {
    let condition = parse_bits("condition", condition)?;
    let source = TableSource::new(MachineConfig::default(), Some(cache_dir(cache)));
    let (table, outcome) = source
        .table(&condition, max_len, step_cap)
        .map_err(|e| match e {
            PipelineError::Budget(EnumerateError::ResourceBudget { .. }) => {
                Failure::new(EXIT_BUDGET, e.to_string())
            }
            other => pipeline_failure(other),
        })?;
    match outcome {
        CacheOutcome::Hit => println!("cache hit"),
        CacheOutcome::Rebuilt => println!("cache invalid, rebuilt"),
        CacheOutcome::Built | CacheOutcome::Disabled => {}
    }
    println!("rows={}", table.rows().len());
    println!("bb_by_len={:?}", table.bb_by_len());
    Ok(())
}

/// Everything a run was produced under; embedded in the emitted report and
/// written alongside the data files. No timestamps: reruns are
/// byte-identical.
#[derive(Serialize)]
struct RunManifest {
    machine: String,
    #[serde(rename = "L")]
    max_len: u32,
    #[serde(rename = "T")]
    step_cap: u32,
    cache: String,
    out: String,
    slack: SlackBound,
    command: String,
    args: Vec<String>,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    x: &'a BitString,
    epsilons: &'a Epsilons,
    slack: &'a SlackBound,
    pass: bool,
    manifest: &'a RunManifest,
}

#[allow(clippy::too_many_arguments)]
fn cmd_profiles(
    x: &str,
    max_len: u32,
    step_cap: u32,
    rank: bool,
    out: PathBuf,
    cache: Option<PathBuf>,
    slack_path: Option<PathBuf>,
    max_elem_len: Option<u32>,
) -> Result<(), Failure> {
    let x = parse_bits("string", x)?;
    let slack = match &slack_path {
        None => profiles::golden_slack(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::new(EXIT_IO, format!("slack file: {e}")))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::new(EXIT_USAGE, format!("slack file: {e}")))?
        }
    };
    let cache = cache_dir(cache);
    let source = TableSource::new(MachineConfig::default(), Some(cache.clone()));
    let bundle = pipeline::build_profile_bundle(
        &source,
        &x,
        max_len,
        step_cap,
        max_elem_len.unwrap_or(max_len),
        slack,
        rank.then_some(0..=max_len),
    )
    .map_err(pipeline_failure)?;

    let manifest = RunManifest {
        machine: source.machine.version_tag.clone(),
        max_len,
        step_cap,
        cache: cache.display().to_string(),
        out: out.display().to_string(),
        slack,
        command: "profiles".into(),
        args: std::env::args().skip(1).collect(),
    };

    std::fs::create_dir_all(&out).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    let io_fail = |e: std::io::Error| Failure::new(EXIT_IO, e.to_string());
    for (name, bytes) in pipeline::render_bundle_files(&bundle) {
        if name == pipeline::COINCIDENCE_JSON {
            // The report additionally embeds the manifest it ran under.
            let doc = ReportDoc {
                x: &bundle.report.x,
                epsilons: &bundle.report.epsilons,
                slack: &bundle.report.slack,
                pass: bundle.report.pass,
                manifest: &manifest,
            };
            let mut text = serde_json::to_string_pretty(&doc).expect("report serialization");
            text.push('\n');
            std::fs::write(out.join(&name), text).map_err(io_fail)?;
        } else {
            std::fs::write(out.join(&name), bytes).map_err(io_fail)?;
        }
        println!("wrote {}", out.join(&name).display());
    }
    let mut manifest_text =
        serde_json::to_string_pretty(&manifest).expect("manifest serialization");
    manifest_text.push('\n');
    std::fs::write(out.join("manifest.json"), manifest_text).map_err(io_fail)?;
    println!("wrote {}", out.join("manifest.json").display());
    println!(
        "coincidence: eps(sb={}, ss={}, bs={}) {} slack a={} b={}",
        bundle.report.epsilons.sb,
        bundle.report.epsilons.ss,
        bundle.report.epsilons.bs,
        if bundle.report.pass {
            "within"
        } else {
            "ABOVE"
        },
        slack.a,
        slack.b
    );
    if !bundle.report.pass {
        return Err(Failure::new(
            EXIT_VERIFY,
            "coincidence above the slack bound",
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport {
    run_id: String,
    scale: String,
    #[serde(rename = "L")]
    max_len: u32,
    #[serde(rename = "T")]
    step_cap: u32,
    machine: String,
    checks: Vec<CheckLine>,
    pass: bool,
}

#[derive(Serialize)]
struct CheckLine {
    name: String,
    passed: bool,
    detail: String,
}

fn cmd_verify(scale_arg: VerifyScale, report: Option<PathBuf>) -> Result<(), Failure> {
    let scale = match scale_arg {
        VerifyScale::Smoke => verify::smoke_scale(),
        VerifyScale::Full => verify::full_scale(),
    };
    let results = verify::run_all(scale);
    for r in &results {
        println!("{r}");
    }
    let pass = results.iter().all(|r| r.passed);
    println!(
        "verify {}: {}",
        scale.label,
        if pass { "PASS" } else { "FAIL" }
    );

    let report_path = report.or_else(|| {
        matches!(scale_arg, VerifyScale::Full).then(|| PathBuf::from("verify-report.json"))
    });
    if let Some(path) = report_path {
        // The run id lives only here, never in data files.
        let run_id = format!(
            "{}-{}",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0)
        );
        let doc = VerifyReport {
            run_id,
            scale: scale.label.to_string(),
            max_len: scale.max_len,
            step_cap: scale.step_cap,
            machine: MachineConfig::default().version_tag,
            checks: results
                .iter()
                .map(|r| CheckLine {
                    name: r.name.to_string(),
                    passed: r.passed,
                    detail: r.detail.clone(),
                })
                .collect(),
            pass,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("report serialization");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
        println!("report written to {}", path.display());
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::new(EXIT_VERIFY, "verification failed"))
    }
}

fn cmd_analytic(shannon: Option<f64>, binom: Option<Vec<u64>>) -> Result<(), Failure> {
    match (shannon, binom) {
        (Some(p), None) => {
            let h = profiles::shannon_entropy(p)
                .map_err(|_| Failure::new(EXIT_USAGE, format!("p={p} outside [0, 1]")))?;
            println!("{h:.10}");
            Ok(())
        }
        (None, Some(nm)) => {
            let (n, m) = (nm[0], nm[1]);
            let t = profiles::bernoulli_two_part(n, m)
                .map_err(|_| Failure::new(EXIT_USAGE, format!("need M <= N, got {n} {m}")))?;
            println!("log_count {:.10}", t.log_count);
            println!("total_hint {:.10}", t.total_hint);
            Ok(())
        }
        _ => Err(Failure::new(
            EXIT_USAGE,
            "pass exactly one of --shannon P or --binom N M",
        )),
    }
}
