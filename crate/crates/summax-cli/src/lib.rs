//! Command-line surface: evaluate C-L exponents on grids, dump samples, run
//! convergence reports, and tabulate Lévy rectangle masses.
//!
//! Exit codes are a stable contract: 0 success, 1 tolerance-gate failure,
//! 2 invalid configuration, 3 numeric (quadrature) failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use summax_core::empirical::{ConvergencePlan, EmpiricalError};
use summax_core::exponent::{EvalError, EvalPoint};
use summax_core::measures::MeasureError;
use summax_core::{
    atom_slice_mass, eta_upper_mass, evaluate_grid, format_float17, grid_csv, rect_mass,
    scale_levy_rect, RandomStream, SumMaxSampler, SumMaxStableParams,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_GATE_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Relative tolerance for the per-row scaling-law check in `levy-mass`.
const SCALING_CHECK_RTOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "summax",
    about = "Sum-max stable laws: exponent evaluation, sampling, and convergence diagnostics",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate the C-L exponent psi and transform exp(-psi) on an (s, y) grid
    Exponent {
        /// Parameter JSON file
        #[arg(long)]
        params: PathBuf,
        /// Output CSV path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// s grid: `a:b:k` (linspace) or comma list
        #[arg(long, default_value = "0,0.1,1,10")]
        grid_s: String,
        /// y grid: `a:b:k` or comma list; `inf` marks the unconstrained max coordinate
        #[arg(long, default_value = "0.2,1,5,inf")]
        grid_y: String,
    },
    /// Draw pair samples (w, j) and dump them as CSV
    Sample {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// RNG seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// RNG stream id
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// Number of rows
        #[arg(long, default_value_t = 1000)]
        m: u64,
        /// Aggregate size: rows are (n^{-1/beta} S(n), n^{-1/alpha} M(n)); 1 = raw pairs
        #[arg(long, default_value_t = 1)]
        n: u64,
    },
    /// Run the domain-of-attraction convergence report
    Converge {
        #[arg(long)]
        params: PathBuf,
        /// Optional mismatched theoretical target (negative control)
        #[arg(long)]
        target_params: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Aggregate sizes, comma separated
        #[arg(long, default_value = "16,256,4096")]
        n: String,
        /// Replicates per estimate
        #[arg(long, default_value_t = 1_000_000)]
        m: u64,
        #[arg(long, default_value = "0,0.3,1,3")]
        grid_s: String,
        #[arg(long, default_value = "0.5,1,2,inf")]
        grid_y: String,
        /// Rectangles `r,x` separated by `;`
        #[arg(long, default_value = "1,1;1,4;0.2,1;1,0;0,1")]
        rect: String,
        /// Truncation thresholds, descending
        #[arg(long, default_value = "1,0.5,0.1,0.01")]
        eps: String,
    },
    /// Tabulate Levy-measure rectangle masses and the scaling-law check
    LevyMass {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Rectangles `r,x` separated by `;`
        #[arg(long, default_value = "1,1;1,4;0.5,0")]
        rect: String,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    GateFailure,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::GateFailure => EXIT_GATE_FAILURE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numeric(msg) => write!(f, "numeric failure: {msg}"),
            CliError::GateFailure => write!(f, "tolerance gates failed"),
        }
    }
}

/// Parse a single grid token: a float, `inf`, or `-inf`.
pub fn parse_value(tok: &str) -> Result<f64, CliError> {
    match tok.trim() {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => t
            .parse::<f64>()
            .map_err(|_| CliError::Config(format!("cannot parse `{t}` as a number"))),
    }
}

/// Parse a grid spec: either `a:b:k` (k points linearly from a to b, both
/// finite unless a = b) or a comma-separated value list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!("grid `{spec}` is not a:b:k")));
        }
        let a = parse_value(parts[0])?;
        let b = parse_value(parts[1])?;
        let k: usize = parts[2]
            .parse()
            .map_err(|_| CliError::Config(format!("grid count `{}` invalid", parts[2])))?;
        if k == 0 {
            return Err(CliError::Config("grid needs at least one point".into()));
        }
        if a == b {
            return Ok(vec![a; k]);
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(CliError::Config(
                "linspace endpoints must be finite; use a comma list to mix in `inf`".into(),
            ));
        }
        if k == 1 {
            return Ok(vec![a]);
        }
        let step = (b - a) / (k - 1) as f64;
        Ok((0..k).map(|i| a + step * i as f64).collect())
    } else {
        spec.split(',').map(parse_value).collect()
    }
}

/// Parse `r,x[;r,x...]` rectangle lists.
pub fn parse_rects(spec: &str) -> Result<Vec<(f64, f64)>, CliError> {
    spec.split(';')
        .map(|pair| {
            let parts: Vec<&str> = pair.split(',').collect();
            if parts.len() != 2 {
                return Err(CliError::Config(format!("rectangle `{pair}` is not r,x")));
            }
            Ok((parse_value(parts[0])?, parse_value(parts[1])?))
        })
        .collect()
}

pub fn parse_counts(spec: &str) -> Result<Vec<u64>, CliError> {
    spec.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Config(format!("cannot parse count `{t}`")))
        })
        .collect()
}

fn load_params(path: &Path) -> Result<SumMaxStableParams, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    SumMaxStableParams::from_json_str(&text)
        .map_err(|e| CliError::Config(format!("invalid params in {}: {e}", path.display())))
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn eval_error(e: EvalError) -> CliError {
    match e {
        EvalError::Quadrature { .. } => CliError::Numeric(e.to_string()),
        EvalError::Measure(MeasureError::Special(s)) => CliError::Numeric(s.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn measure_error(e: MeasureError) -> CliError {
    match e {
        MeasureError::Special(s) => CliError::Numeric(s.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn empirical_error(e: EmpiricalError) -> CliError {
    match e {
        EmpiricalError::Eval(inner) => eval_error(inner),
        EmpiricalError::Measure(inner) => measure_error(inner),
        other => CliError::Config(other.to_string()),
    }
}

fn cmd_exponent(
    params: &Path,
    out: &Option<PathBuf>,
    grid_s: &str,
    grid_y: &str,
) -> Result<(), CliError> {
    let params = load_params(params)?;
    let s_grid = parse_grid(grid_s)?;
    let y_grid = parse_grid(grid_y)?;
    if s_grid.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(CliError::Config(
            "grid-s values must be finite and >= 0".into(),
        ));
    }
    let rows = evaluate_grid(&params, &s_grid, &y_grid).map_err(eval_error)?;
    write_output(out, &grid_csv(&rows))
}

fn cmd_sample(
    params: &Path,
    out: &Option<PathBuf>,
    seed: u64,
    stream_id: u64,
    m: u64,
    n: u64,
) -> Result<(), CliError> {
    let params = load_params(params)?;
    if n == 0 {
        return Err(CliError::Config("n must be at least 1".into()));
    }
    let mut stream = RandomStream::new(seed, stream_id);
    let sampler = SumMaxSampler::new(&params, n);
    let mut content = format!("# seed={seed},stream={stream_id}\nw,j\n");
    for _ in 0..m {
        let p = sampler.sample(&mut stream);
        content.push_str(&format!(
            "{},{}\n",
            format_float17(p.w),
            format_float17(p.j)
        ));
    }
    write_output(out, &content)
}

#[allow(clippy::too_many_arguments)]
fn cmd_converge(
    params: &Path,
    target_params: &Option<PathBuf>,
    out: &Option<PathBuf>,
    seed: u64,
    n: &str,
    m: u64,
    grid_s: &str,
    grid_y: &str,
    rect: &str,
    eps: &str,
) -> Result<(), CliError> {
    let params = load_params(params)?;
    let target = match target_params {
        Some(path) => load_params(path)?,
        None => params.clone(),
    };
    let s_grid = parse_grid(grid_s)?;
    let y_grid = parse_grid(grid_y)?;
    let mut grid = Vec::with_capacity(s_grid.len() * y_grid.len());
    for &y in &y_grid {
        for &s in &s_grid {
            grid.push(EvalPoint::new(s, y).map_err(eval_error)?);
        }
    }
    let plan = ConvergencePlan {
        n_values: parse_counts(n)?,
        m,
        grid,
        rectangles: parse_rects(rect)?,
        epsilons: parse_grid(eps)?,
    };
    let report = summax_core::convergence_report_with_target(&params, &target, &plan, seed)
        .map_err(empirical_error)?;
    write_output(out, &report.to_json())?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::GateFailure)
    }
}

fn cmd_levy_mass(params: &Path, out: &Option<PathBuf>, rect: &str) -> Result<(), CliError> {
    let params = load_params(params)?;
    let rects = parse_rects(rect)?;
    let mut content = String::from("r,x,eta_rect,eta_atom_slice,scaling_check\n");
    for (r, x) in rects {
        let eta_rect = rect_mass(&params, r, x).map_err(measure_error)?;
        let slice = if x > 0.0 {
            atom_slice_mass(&params, x)
        } else if params.c() == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let direct = 2.0 * eta_upper_mass(&params, r, x).map_err(measure_error)?;
        let scaled = scale_levy_rect(&params, 2.0, r, x).map_err(measure_error)?;
        let check = if (direct - scaled).abs() <= SCALING_CHECK_RTOL * direct.abs() {
            "ok"
        } else {
            "fail"
        };
        content.push_str(&format!(
            "{},{},{},{},{}\n",
            format_float17(r),
            format_float17(x),
            format_float17(eta_rect),
            format_float17(slice),
            check
        ));
    }
    write_output(out, &content)
}

/// Run a parsed command, returning the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Exponent {
            params,
            out,
            grid_s,
            grid_y,
        } => cmd_exponent(params, out, grid_s, grid_y),
        Command::Sample {
            params,
            out,
            seed,
            stream,
            m,
            n,
        } => cmd_sample(params, out, *seed, *stream, *m, *n),
        Command::Converge {
            params,
            target_params,
            out,
            seed,
            n,
            m,
            grid_s,
            grid_y,
            rect,
            eps,
        } => cmd_converge(
            params,
            target_params,
            out,
            *seed,
            n,
            *m,
            grid_s,
            grid_y,
            rect,
            eps,
        ),
        Command::LevyMass { params, out, rect } => cmd_levy_mass(params, out, rect),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("summax: {e}");
            e.exit_code()
        }
    }
}
