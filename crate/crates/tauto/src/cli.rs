//! Argument parsing and the five subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tauto_core::heights::{height_coefficients, neron_tate_height};
use tauto_core::hodge::{alternating_cycle_matrix, check_constraint};
use tauto_core::{evaluate_graph, evaluate_graph_by, CurveParams, InvariantValues, PullbackSpec};

use crate::error::CliError;
use crate::format::{parse_fraction, parse_graph, parse_matrix, parse_tensor, OutputFormat, Record};
use crate::parallel::{expand_bruteforce_par, hodge_form_par, intersect_arithmetic_par, intersect_geometric_par};
use crate::verify::{run_suite, VerifyOptions};

/// Exact intersection numbers of tautological line bundles on products of a
/// curve.
#[derive(Debug, Parser)]
#[command(name = "tauto", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output rendering.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    pub format: OutputFormat,

    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an intersection graph.
    Graph(GraphArgs),
    /// Intersect the bundles of a coefficient tensor.
    Intersect(IntersectArgs),
    /// Néron–Tate height of a tautological cycle.
    Height(HeightArgs),
    /// Lower bound for ω̂² in terms of φ from a coefficient matrix.
    Bound(BoundArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub genus: String,
    /// Re-evaluate with random contraction orders and compare.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct IntersectArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub genus: String,
    /// Also expand into graphs and compare.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct HeightArgs {
    /// Comma-separated nonzero integers.
    #[arg(long, allow_hyphen_values = true)]
    pub m: String,
    #[arg(long)]
    pub genus: String,
    #[arg(long = "dK", default_value_t = 1)]
    pub d_k: i64,
    /// Values for the invariants, e.g. `omega2=16,phi=1/2,hnt=0`; missing
    /// names are zero.
    #[arg(long, allow_hyphen_values = true)]
    pub eval: Option<String>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m: String,
    #[arg(long)]
    pub genus: String,
    /// JSON matrix file.
    #[arg(long, conflicts_with = "alternating", required_unless_present = "alternating")]
    pub matrix: Option<PathBuf>,
    /// Use the alternating cycle matrix.
    #[arg(long)]
    pub alternating: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long = "max-r", default_value_t = 4)]
    pub max_r: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn parse_m(text: &str) -> Result<PullbackSpec, CliError> {
    let m = text
        .split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|_| CliError::Validation(format!("bad entry {s:?} in --m"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PullbackSpec::new(m)?)
}

fn parse_eval(text: &str) -> Result<InvariantValues, CliError> {
    let mut inv = InvariantValues::default();
    let mut seen = Vec::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("expected name=fraction, got {part:?}")))?;
        let name = name.trim();
        if seen.contains(&name) {
            return Err(CliError::Validation(format!("{name} given twice")));
        }
        seen.push(name);
        let value = parse_fraction(value)?;
        match name {
            "omega2" => inv.omega2_val = value,
            "phi" => inv.phi_val = value,
            "hnt" => inv.hnt_val = value,
            _ => return Err(CliError::Validation(format!("unknown invariant {name:?}"))),
        }
    }
    Ok(inv)
}

fn integer_genus(text: &str) -> Result<i64, CliError> {
    parse_fraction(text)?
        .to_i64()
        .ok_or_else(|| CliError::Validation(format!("genus must be an integer, got {text}")))
}

fn cmd_graph(args: &GraphArgs) -> Result<Record, CliError> {
    let graph = parse_graph(&read(&args.file)?)?;
    let g = parse_fraction(&args.genus)?;
    let value = evaluate_graph(&graph, &g)?;
    if args.oracle {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        for trial in 0..8 {
            let other = evaluate_graph_by(&graph, &g, |c| rng.gen_range(0..c.len()))?;
            if other != value {
                return Err(CliError::CrossCheck(format!(
                    "contraction order {trial} gives {other}, expected {value}"
                )));
            }
        }
    }
    Ok(Record::from_value(&value))
}

fn cmd_intersect(args: &IntersectArgs, jobs: usize) -> Result<Record, CliError> {
    let tensor = parse_tensor(&read(&args.file)?)?;
    let g = parse_fraction(&args.genus)?;
    let (r, n) = (tensor.r(), tensor.n());
    let value = if n == r {
        tauto_core::SymbolicValue::from_scalar(intersect_geometric_par(&tensor, &g, jobs)?)
    } else if n == r + 1 {
        intersect_arithmetic_par(&tensor, &g, jobs)?
    } else {
        return Err(CliError::Validation(format!("need r or r + 1 factors, got {n} with r = {r}")));
    };
    if args.oracle {
        let brute = expand_bruteforce_par(&tensor, &g, jobs)?;
        if brute != value {
            return Err(CliError::CrossCheck(format!("closed form {value}, expansion {brute}")));
        }
    }
    Ok(Record::from_value(&value))
}

fn cmd_height(args: &HeightArgs) -> Result<Record, CliError> {
    let spec = parse_m(&args.m)?;
    let params = CurveParams::new(integer_genus(&args.genus)?, args.d_k)?;
    let coeffs = height_coefficients(&spec, &params)?;
    let mut rec = Record::default();
    match &args.eval {
        Some(text) => rec.push("height", neron_tate_height(&spec, &params, &parse_eval(text)?)?),
        None => {
            rec.push("prefactor", &coeffs.prefactor);
            rec.push("a", &coeffs.a);
            rec.push("b", &coeffs.b);
            rec.push("c", &coeffs.c);
        }
    }
    Ok(rec)
}

fn cmd_bound(args: &BoundArgs, jobs: usize) -> Result<Record, CliError> {
    let spec = parse_m(&args.m)?;
    let g = parse_fraction(&args.genus)?;
    let matrix = match &args.matrix {
        Some(path) => parse_matrix(&read(path)?)?,
        None => alternating_cycle_matrix(spec.r())?,
    };
    if matrix.r() != spec.r() {
        return Err(CliError::Validation(format!("matrix has r = {}, m has {} entries", matrix.r(), spec.r())));
    }
    if !check_constraint(&matrix, &g) {
        return Err(CliError::Validation(
            "matrix violates g·Σ t_jj = Σ_{j≠k} t_jk".into(),
        ));
    }
    let form = hodge_form_par(&spec, &matrix, &g, jobs)?;
    let mut rec = Record::default();
    match form.without_hnt().derive_phi_bound()? {
        Some(ratio) => rec.push("ratio", ratio),
        None => rec.push("ratio", "none"),
    }
    rec.extend_value(&form);
    Ok(rec)
}

/// Parses `args` (program name first) and runs the command, writing results
/// to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    if cli.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let record = match &cli.command {
        Command::Graph(a) => cmd_graph(a)?,
        Command::Intersect(a) => cmd_intersect(a, cli.jobs)?,
        Command::Height(a) => cmd_height(a)?,
        Command::Bound(a) => cmd_bound(a, cli.jobs)?,
        Command::Verify(a) => {
            let opts = VerifyOptions { max_r: a.max_r, seed: a.seed, jobs: cli.jobs };
            let checks = run_suite(&a.suite, &opts)?;
            for c in &checks {
                writeln!(out, "{c}")?;
            }
            return Ok(if checks.iter().all(|c| c.passed()) { 0 } else { 3 });
        }
    };
    out.write_all(record.render(cli.format).as_bytes())?;
    Ok(0)
}
