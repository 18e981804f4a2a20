//! `symsecant` command-line tool.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 numerically unstable
//! result, 4 domain error.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};
use symsecant::catalecticant::secant_dim_estimate;
use symsecant::io::{parse_operator, parse_scalar, parse_state, state_json, StateInput};
use symsecant::rdm::{interaction_length_with, parent_hamiltonian_with, HamiltonianOptions};
use symsecant::slocc::{asymptotic_sweep, slocc_apply, sweep_to_csv};
use symsecant::states::{standard_state, x_parameter_from_z, MultiIndex, StandardState, FULL_TENSOR_CAP};
use symsecant::sylvester::{classify_with, ClassifyOptions};
use symsecant::{Error, Execution, Field, GaussianRational, Mode, RankMode};

#[derive(Parser)]
#[command(name = "symsecant", version, about = "Secant-variety classification of symmetric multiqubit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Border rank, symmetric rank, label and witness of a state.
    Classify {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// GHZ₃ → W₃ asymptotic conversion table.
    Sweep {
        #[arg(long, value_enum, default_value_t = Protocol::GhzToW)]
        protocol: Protocol,
        /// Comma-separated positive ε values.
        #[arg(long, allow_hyphen_values = true)]
        eps_grid: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Frustration-free parent Hamiltonian with verification.
    ParentHam {
        #[command(flatten)]
        state: StateArgs,
        /// Interaction length: `auto` or an integer.
        #[arg(long, default_value = "auto")]
        j: String,
        /// Include the nonzero entries of H as (row, col, value) triplets (N ≤ 14).
        #[arg(long)]
        sparse: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Sampled dimension of the k-th secant variety against min(2k−1, N).
    SecantDim {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Apply A^{⊗N} and compare labels before and after.
    Slocc {
        #[command(flatten)]
        state: StateArgs,
        /// JSON operator file: [[a00, a01], [a10, a11]] or {"matrix": …}.
        #[arg(long)]
        matrix: PathBuf,
        /// Write the transformed state file here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Clone)]
struct StateArgs {
    /// Named state.
    #[arg(long, value_enum)]
    state: Option<Named>,
    /// Number of parties for named states.
    #[arg(long)]
    n: Option<usize>,
    /// X_N parameter: X_N = [0 : 1 : 0 : … : 0 : w].
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    /// X_N(z) parameter; converted by w = z^{-(N-1)}.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Dicke occupation numbers, e.g. `2,1`.
    #[arg(long, value_delimiter = ',')]
    dicke: Option<Vec<usize>>,
    /// JSON state file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Relative singular-value tolerance in float mode.
    #[arg(long, default_value_t = symsecant::linalg::DEFAULT_RANK_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Largest full tensor dimension 2^N used for Hamiltonian checks.
    #[arg(long, default_value_t = FULL_TENSOR_CAP)]
    cap: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Named {
    Ghz,
    W,
    X,
    Dicke,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Protocol {
    GhzToW,
}

/// Why a command stopped.
enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// A rendered report plus whether any instability flag was raised.
struct Output {
    body: String,
    unstable: bool,
}

type Outcome = Result<Output, Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

impl RunArgs {
    fn validate(&self) -> Result<(), Failure> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return usage("--tol must be positive");
        }
        if self.cap == 0 {
            return usage("--cap must be positive");
        }
        Ok(())
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn rank_mode<F: Field>(&self) -> RankMode {
        match F::MODE {
            Mode::Exact => RankMode::Exact,
            Mode::Float => RankMode::Float { tol: self.tol },
        }
    }

    fn mode_name(&self) -> &'static str {
        match self.mode {
            ModeArg::Exact => "exact",
            ModeArg::Float => "float",
        }
    }
}

fn scalar_arg<F: Field>(text: &str, flag: &str) -> Result<F, Failure> {
    let value = serde_json::from_str::<Value>(text).unwrap_or_else(|_| Value::String(text.to_string()));
    let value = match value {
        Value::Number(_) | Value::Array(_) => value,
        _ => Value::String(text.to_string()),
    };
    parse_scalar(&value).map_err(|e| Failure::Usage(format!("{flag}: {e}")))
}

fn load_state<F: Field>(args: &StateArgs) -> Result<StateInput<F>, Failure> {
    match (&args.file, args.state) {
        (Some(_), Some(_)) => usage("give either --file or --state, not both"),
        (None, None) => usage("a state is required: --state {ghz,w,x,dicke} or --file"),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            Ok(parse_state(&text)?)
        }
        (None, Some(named)) => {
            let kind = match named {
                Named::Ghz => StandardState::Ghz,
                Named::W => StandardState::W,
                Named::X => {
                    let n = args.n.ok_or_else(|| Failure::Usage("--state x needs --n".into()))?;
                    let w = match (&args.w, &args.z) {
                        (Some(_), Some(_)) => return usage("give --w or --z, not both"),
                        (Some(w), None) => scalar_arg::<F>(w, "--w")?,
                        (None, Some(z)) => x_parameter_from_z(&scalar_arg::<F>(z, "--z")?, n)?,
                        (None, None) => F::one(),
                    };
                    StandardState::X { w }
                }
                Named::Dicke => {
                    let occ = args.dicke.clone().ok_or_else(|| Failure::Usage("--state dicke needs --dicke n0,n1".into()))?;
                    if occ.len() < 2 {
                        return usage("--dicke needs at least two occupation numbers");
                    }
                    StandardState::Dicke(MultiIndex(occ))
                }
            };
            let n = match (&kind, args.n) {
                (StandardState::Dicke(idx), Some(n)) if n != idx.parties() => {
                    return usage(format!("--n {n} disagrees with --dicke (sum {})", idx.parties()))
                }
                (StandardState::Dicke(idx), _) => idx.parties(),
                (_, Some(n)) => n,
                (_, None) => return usage("named states need --n"),
            };
            Ok(StateInput { state: standard_state(&kind, n)?, decomposition: None })
        }
    }
}

fn with_mode<R>(run: &RunArgs, exact: impl FnOnce() -> R, float: impl FnOnce() -> R) -> R {
    match run.mode {
        ModeArg::Exact => exact(),
        ModeArg::Float => float(),
    }
}

fn cmd_classify<F: Field>(state: &StateArgs, run: &RunArgs) -> Outcome {
    let input = load_state::<F>(state)?;
    let opts = ClassifyOptions { rank_mode: run.rank_mode::<F>(), seed: run.seed };
    let report = classify_with(&input.state, opts)?;
    let body = match run.format(Format::Text) {
        Format::Json => render::json_line(&render::classify_json(&report, run.mode_name())),
        Format::Text => render::classify_text(&report, run.mode_name()),
        Format::Csv => return usage("classify supports --format text|json"),
    };
    Ok(Output { body, unstable: report.unstable })
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if parts.is_empty() {
        return usage("--eps-grid is empty");
    }
    parts
        .iter()
        .map(|p| match p.parse::<f64>() {
            Ok(e) if e > 0.0 && e.is_finite() => Ok(e),
            _ => usage(format!("--eps-grid: `{p}` is not a positive number")),
        })
        .collect()
}

fn cmd_sweep(grid: &str, run: &RunArgs) -> Outcome {
    let eps = parse_grid(grid)?;
    let rows = asymptotic_sweep(&eps, Execution::default())?;
    let body = match run.format(Format::Csv) {
        Format::Csv => sweep_to_csv(&rows),
        Format::Json => render::json_line(&json!({
            "schema": 1,
            "command": "sweep",
            "protocol": "ghz-to-w",
            "rows": rows,
        })),
        Format::Text => render::sweep_text(&rows),
    };
    Ok(Output { body, unstable: false })
}

fn cmd_parent_ham<F: Field>(state: &StateArgs, j: &str, sparse: bool, run: &RunArgs) -> Outcome {
    let input = load_state::<F>(state)?;
    let s = &input.state;
    let mode = run.rank_mode::<F>();
    let (auto_j, len_unstable) = interaction_length_with(s, mode)?;
    let (j, source) = match j {
        "auto" => (auto_j, "auto"),
        other => match other.parse::<usize>() {
            Ok(v) => (v, "given"),
            Err(_) => return usage(format!("--j must be `auto` or an integer, got `{other}`")),
        },
    };
    let h = parent_hamiltonian_with(s, j, HamiltonianOptions { rank_mode: mode, cap: run.cap })?;
    let triplets = if sparse { Some(h.sparse_triplets()?) } else { None };
    let unstable = !h.verification.passed || (source == "auto" && len_unstable);
    let body = match run.format(Format::Json) {
        Format::Json => {
            let mut v = json!({
                "schema": 1,
                "command": "parent-ham",
                "mode": run.mode_name(),
                "j_source": source,
                "interaction_length": auto_j,
                "generic_bound": s.parties() / 2 + 1,
                "hamiltonian": h,
            });
            if let Some(t) = triplets {
                v["triplets"] = json!(t);
            }
            render::json_line(&v)
        }
        Format::Text => render::hamiltonian_text(&h, auto_j, source),
        Format::Csv => return usage("parent-ham supports --format json|text"),
    };
    Ok(Output { body, unstable })
}

fn cmd_secant_dim(n: usize, k: usize, samples: usize, run: &RunArgs) -> Outcome {
    let est = secant_dim_estimate(n, k, samples, run.seed, Execution::default())?;
    let body = match run.format(Format::Text) {
        Format::Text => format!(
            "N = {}, k = {}: estimated dim = {}, predicted min(2k-1, N) = {} {}\n  {} samples, {:.0}% attain the maximum rank{}\n",
            est.n,
            est.k,
            est.estimated,
            est.predicted,
            if est.matches() { "✓" } else { "✗" },
            est.samples,
            est.attained * 100.0,
            if est.warning { " (warning: low attainment)" } else { "" },
        ),
        Format::Json => render::json_line(&json!({
            "schema": 1,
            "command": "secant-dim",
            "estimate": est,
            "matches": est.matches(),
        })),
        Format::Csv => format!(
            "n,k,estimated,predicted,match,samples,attained\n{},{},{},{},{},{},{}\n",
            est.n,
            est.k,
            est.estimated,
            est.predicted,
            est.matches(),
            est.samples,
            est.attained
        ),
    };
    Ok(Output { body, unstable: est.warning })
}

fn cmd_slocc<F: Field>(state: &StateArgs, matrix: &PathBuf, out: &Option<PathBuf>, run: &RunArgs) -> Outcome {
    let input = load_state::<F>(state)?;
    let text = std::fs::read_to_string(matrix)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", matrix.display())))?;
    let a = parse_operator::<F>(&text)?;
    let image = slocc_apply(&input.state, &a)?;
    let opts = ClassifyOptions { rank_mode: run.rank_mode::<F>(), seed: run.seed };
    let before = classify_with(&input.state, opts)?;
    let after = classify_with(&image, opts)?;
    let image_json = state_json(&image);
    if let Some(path) = out {
        std::fs::write(path, render::json_line(&image_json))
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let unstable = before.unstable || after.unstable || before.label != after.label;
    let body = match run.format(Format::Text) {
        Format::Text => {
            let mut t = format!(
                "before: {} [{}]\nafter:  {} [{}]\nlabels {}\n",
                before.label,
                before.label.taxonomy(before.n),
                after.label,
                after.label.taxonomy(after.n),
                if before.label == after.label { "match" } else { "DIFFER" }
            );
            if out.is_none() {
                t.push_str(&render::json_line(&image_json));
            }
            t
        }
        Format::Json => render::json_line(&json!({
            "schema": 1,
            "command": "slocc",
            "mode": run.mode_name(),
            "before": before.label.name(),
            "after": after.label.name(),
            "labels_match": before.label == after.label,
            "state": image_json,
        })),
        Format::Csv => return usage("slocc supports --format text|json"),
    };
    Ok(Output { body, unstable })
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Classify { state, run } => {
            run.validate()?;
            with_mode(run, || cmd_classify::<GaussianRational>(state, run), || cmd_classify::<Complex64>(state, run))
        }
        Command::Sweep { protocol: Protocol::GhzToW, eps_grid, run } => {
            run.validate()?;
            cmd_sweep(eps_grid, run)
        }
        Command::ParentHam { state, j, sparse, run } => {
            run.validate()?;
            with_mode(
                run,
                || cmd_parent_ham::<GaussianRational>(state, j, *sparse, run),
                || cmd_parent_ham::<Complex64>(state, j, *sparse, run),
            )
        }
        Command::SecantDim { n, k, samples, run } => {
            run.validate()?;
            cmd_secant_dim(*n, *k, *samples, run)
        }
        Command::Slocc { state, matrix, out, run } => {
            run.validate()?;
            with_mode(
                run,
                || cmd_slocc::<GaussianRational>(state, matrix, out, run),
                || cmd_slocc::<Complex64>(state, matrix, out, run),
            )
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) | Error::Parse(_) | Error::Mode(_) => 2,
        Error::Numerical(_) => 3,
        Error::Domain(_) | Error::Resource(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{}", out.body);
            if out.unstable {
                eprintln!("warning: numerically unstable result (see flags)");
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
