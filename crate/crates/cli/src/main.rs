mod parse;
mod run;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug, Serialize)]
#[command(name = "tmpow", version, about = "Thue-Morse sums along powers: witnesses, lemmas, residuals, statistics")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// No progress on standard error.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
enum Command {
    /// Congruence witness for k.
    Witness(WitnessArgs),
    /// Exact checks of the shift-invariance lemmas.
    VerifyLemmas(LemmaArgs),
    /// Certified residual sum and its bounds.
    Residual(ResidualArgs),
    /// Explicit-constant norm contradiction.
    NormAudit(NormArgs),
    /// Greedy β-expansion of num/den.
    BetaExpand(BetaArgs),
    /// Sequence statistics.
    #[command(subcommand)]
    Stats(StatsCommand),
}

#[derive(Args, Debug, Serialize)]
struct WitnessArgs {
    #[arg(long)]
    k: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
enum LemmaChoice {
    #[value(name = "2.2", alias = "shift")]
    #[serde(rename = "2.2")]
    Shift,
    #[value(name = "2.3", alias = "special")]
    #[serde(rename = "2.3")]
    Special,
    #[value(name = "2.4", alias = "lower")]
    #[serde(rename = "2.4")]
    Lower,
    #[value(name = "all")]
    #[serde(rename = "all")]
    All,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct LemmaArgs {
    #[arg(long)]
    k: u32,
    /// Defaults to the least valid N for k.
    #[arg(long = "N")]
    n: Option<u64>,
    #[arg(long, value_enum, default_value_t = LemmaChoice::All)]
    lemma: LemmaChoice,
    /// Power r for the lower-power check (default: every r < k).
    #[arg(long)]
    r: Option<u32>,
    /// Exhaustive up to this many j, sampled beyond.
    #[arg(long, default_value_t = tmpow::lemma::DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    allow_below_threshold: bool,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct ResidualArgs {
    #[arg(long)]
    k: u32,
    #[arg(long, allow_hyphen_values = true)]
    field: String,
    #[arg(long, allow_hyphen_values = true)]
    coeffs: String,
    #[arg(long = "N")]
    n: u64,
    /// `p` or `2^-p`.
    #[arg(long, default_value = "64")]
    tol: String,
    #[arg(long, default_value_t = 4096)]
    sample_budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reject N below the least valid N instead of flagging it.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct NormArgs {
    #[arg(long)]
    k: u32,
    #[arg(long, allow_hyphen_values = true)]
    field: String,
    #[arg(long, allow_hyphen_values = true)]
    coeffs: String,
    #[arg(long = "N")]
    n: u64,
    /// Coordinates A_0,A_1,… of the hypothesized ξ.
    #[arg(long, allow_hyphen_values = true, default_value = "10,10")]
    xi: String,
    #[arg(long, default_value_t = 128)]
    precision: u64,
    #[arg(long, default_value_t = 64)]
    max_n: u64,
    #[arg(long, default_value_t = 1 << 22)]
    term_budget: u64,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct BetaArgs {
    #[arg(long, allow_hyphen_values = true)]
    field: String,
    /// Numerator coordinates c_0:c_1:…
    #[arg(long, allow_hyphen_values = true)]
    num: String,
    #[arg(long, default_value = "1")]
    den: String,
    #[arg(long, default_value_t = 1000)]
    digits: usize,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "stat")]
enum StatsCommand {
    /// Factor complexity of t(n^k) with Moshe's lower bound.
    Complexity {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m_max: usize,
        #[arg(long)]
        prefix_len: usize,
    },
    /// Block frequencies of t(n^k).
    Frequencies {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        prefix_len: usize,
    },
    /// Cube-freeness of t(1..L).
    Cubefree {
        #[arg(long)]
        prefix_len: usize,
    },
    /// Complexity of q1·ξ + q2 against ξ = Σ t(n^k) b^-n.
    Affine {
        #[arg(long, allow_hyphen_values = true)]
        q1: String,
        #[arg(long, allow_hyphen_values = true)]
        q2: String,
        #[arg(long, default_value_t = 2)]
        base: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        digits: usize,
        #[arg(long)]
        m_max: usize,
    },
}

/// JSON numbers in the echoed configuration become decimal strings.
fn stringify(v: Value) -> Value {
    match v {
        Value::Number(n) => Value::String(n.to_string()),
        Value::Array(a) => Value::Array(a.into_iter().map(stringify).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, stringify(v))).collect()),
        v => v,
    }
}

fn exit_code(e: &tmpow::Error) -> u8 {
    use tmpow::Error::*;
    match e {
        InvalidArgument(_) | Reducible { .. } | NoRealRootAboveOne | FieldMismatch | BelowThreshold { .. } => 2,
        BudgetExceeded(_) | PrecisionExhausted(_) => 1,
        Invariant(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool is configured once");
    }
    let start = Instant::now();
    if !cli.quiet {
        eprintln!("tmpow: running {}", run::name(&cli.command));
    }
    let outcome = match run::dispatch(&cli.command, cli.format) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let elapsed = start.elapsed();
    if !cli.quiet {
        eprintln!("tmpow: done in {:.3} s, passed = {}", elapsed.as_secs_f64(), outcome.passed);
    }
    let text = match (&outcome.csv, cli.format) {
        (Some(csv), Format::Csv) => csv.clone(),
        _ => {
            let doc = json!({
                "tool": "tmpow",
                "version": env!("CARGO_PKG_VERSION"),
                "config": stringify(serde_json::to_value(&cli).expect("config serializes")),
                "timings": { "totalSeconds": format!("{:.6}", elapsed.as_secs_f64()) },
                "passed": outcome.passed,
                "report": stringify(outcome.report),
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
