//! The `plpoly` command line.
//!
//! JSON goes to stdout (or `--out`), CSV likewise. Complex numbers are written
//! as `[re, im]` pairs, big integers as decimal strings, and CSV floats with
//! 17 significant digits. Exit status: 0 on success, 1 when the input is
//! rejected (bad literal, wrong region, out-of-range argument), 2 when a
//! computation fails or a verification does not hold.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use plpoly::asymptotics::{
    estimate_auto, estimate_boundary, estimate_oscillatory, estimate_r1, estimate_r2, RegionEstimate,
};
use plpoly::exact::{evaluate, plane_partition_polynomial, PlanePartitionTable, DEFAULT_PRECISION_BITS};
use plpoly::phase::{
    circle_crossing, classify, real_crossing, trace_boundary, PhaseLabel, BOUNDARY_TOL, DEFAULT_K_MAX,
};
use plpoly::verify::{
    arcsum_suite, bounds_suite, default_saddle_cases, dominance_suite, factorization_suite, saddle_suite,
};
use plpoly::zeros::{match_zeros, predicted_interval_zeros, roots, DEFAULT_MATCH_MARGIN};
use plpoly::Error;

/// Environment variable overriding the default working precision.
pub const PRECISION_ENV: &str = "PLPOLY_PRECISION_BITS";

#[derive(Debug, Parser)]
#[command(name = "plpoly", version, about = "Plane partition polynomials Q_n(x) = sum_k pp_k(n) x^k and their asymptotics")]
pub struct Cli {
    /// Worker threads for parallel subcommands (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact coefficients of Q_n from n Q_n = sum_{j=1}^n a_j(x) Q_{n-j},
    /// a_j(x) = sum_{d | j} (j/d)^2 x^d.
    Coeffs(CoeffsArgs),
    /// Q_n(x) by Horner's rule in binary floating point with a rounding-error
    /// bound (3n+2) 2^-p sum_k c_k |x|^k.
    Eval(EvalArgs),
    /// Main-term estimate omega_{1,m,n}(x) sqrt(L_m / (6 pi n^{4/3})) exp((3/2) n^{2/3} L_m),
    /// L_m(x) = (1/m) (2 Li3(x^m))^{1/3}; the oscillatory and two-term forms on
    /// (x*, 0) and on the boundary.
    Asym(AsymArgs),
    /// Phases R(m) = {x : Re L_m(x) > Re L_k(x) for all k != m}.
    #[command(subcommand)]
    Phase(PhaseCommand),
    /// Zeros of Q_n by Aberth-Ehrlich iteration, or the predicted real zeros
    /// where (3 sqrt3/4) 2^{1/3} n^{2/3} |Li3(x)|^{1/3} + pi/6 = pi/2 + j pi.
    Zeros(ZerosArgs),
    /// Seeded numerical audits of the circle-method identities and bounds.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Disk raster of the phase label and |Q_n(x) / estimate - 1|.
    Grid(GridArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub n: usize,
    /// Evaluation point, written a+bi (for example -0.5+0.2i).
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    /// Mantissa bits (default: $PLPOLY_PRECISION_BITS or 256).
    #[arg(long)]
    pub precision: Option<u32>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Region {
    Auto,
    R1,
    R2,
    Osc,
    Boundary,
}

#[derive(Debug, Args)]
pub struct AsymArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, value_enum, default_value_t = Region::Auto)]
    pub region: Region,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Subcommand)]
pub enum PhaseCommand {
    /// R1 if Re L_1 > Re L_2 + tol, R2 if Re L_2 > Re L_1 + tol, else BOUNDARY;
    /// fails if some Re L_k, 3 <= k <= k_max, reaches max(Re L_1, Re L_2).
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: u32,
        #[arg(long, default_value_t = BOUNDARY_TOL)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// The level set Re L_1(x) = Re L_2(x), traced by radial bisection; CSV
    /// columns theta,re,im,residual.
    Boundary {
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// x* (Re L_1(-r) = Re L_2(-r)) and theta* (Re L_1(e^{i theta}) = Re L_2(e^{i theta})).
    Constants {
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct ZerosArgs {
    #[command(subcommand)]
    pub action: Option<ZerosCommand>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Mantissa bits (default: $PLPOLY_PRECISION_BITS or 256).
    #[arg(long)]
    pub precision: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Subcommand)]
pub enum ZerosCommand {
    /// Real zeros on (x*, 0) from cos((3 sqrt3/4) 2^{1/3} n^{2/3} |Li3(x)|^{1/3} + pi/6) = 0,
    /// optionally paired with the computed zeros of Q_n.
    Predict {
        #[arg(long)]
        n: u64,
        /// Also compute the zeros of Q_n and pair them with the predictions.
        #[arg(long = "match")]
        match_zeros: bool,
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_MATCH_MARGIN)]
        margin: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// ln P(x, e^{-w + 2 pi i h/k}) = ln omega_{h,k,n} + 2 pi i n h/k + Li3(x^k)/(k^3 w^2) + g_{h,k}(x, w).
    Factorization(SampleArgs),
    /// |g| <= 2|w|/(1-|x|) [k^3 + ...] + [M |w|^2 k + ...]/(1-|x|^2), the A and B
    /// pieces separately, and |omega_{h,k,n}| <= 2^{1/12} exp((k^2/16)(zeta(3) - ln(1-|x|))).
    Bounds {
        #[command(flatten)]
        samples: SampleArgs,
        #[arg(long, default_value_t = 100)]
        omega_samples: usize,
    },
    /// max_{3<=k<=k_max} Re L_k(x) < max(Re L_1(x), Re L_2(x)) on random disk points.
    Dominance {
        #[command(flatten)]
        samples: SampleArgs,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: u32,
    },
    /// (1/(2 pi n^{1/3})) int exp[n^{2/3}(L^3/(2(Re L - iz)^2) + Re L - iz)] dz
    /// against sqrt(L/3) exp((3/2) n^{2/3} L) / sqrt(2 pi n^{4/3}).
    Saddle(Output),
    /// sum over Farey arcs of omega_{h,k,n} int exp(Psi + g + 2 pi n (alpha - iv)) dv
    /// against the trapezoidal Cauchy integral.
    Arcsum {
        #[arg(long, default_value = "0.5+0i", allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 200)]
        n: u64,
        #[arg(long, default_value_t = 6)]
        order: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub n: usize,
    /// Lattice points per axis.
    #[arg(long, default_value_t = 41)]
    pub resolution: usize,
    /// Only points with |x| <= radius are kept.
    #[arg(long, default_value_t = 0.95)]
    pub radius: f64,
    #[command(flatten)]
    pub output: Output,
}

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn refusal(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_refusal() { 1 } else { 2 };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

/// Parses `<decimal>[+|-]<decimal>i`; a bare decimal is read as a real number.
pub fn parse_complex(s: &str) -> CmdResult<Complex64> {
    let bad = || Failure::refusal(format!("cannot parse complex literal {s:?}; expected a+bi, e.g. -0.5+0.2i"));
    let is_decimal = |t: &str| {
        let body = t.strip_prefix(['+', '-']).unwrap_or(t);
        !body.is_empty()
            && body.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'))
            && body.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '.')
    };
    let parse = |t: &str| -> CmdResult<f64> {
        if !is_decimal(t) {
            return Err(bad());
        }
        t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad)
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re = parse(&body[..split])?;
    let im = parse(&body[split..])?;
    Ok(Complex64::new(re, im))
}

fn precision(flag: Option<u32>) -> CmdResult<u32> {
    if let Some(p) = flag {
        return Ok(p);
    }
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::refusal(format!("{PRECISION_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_PRECISION_BITS),
    }
}

fn to_json<T: Serialize>(v: &T) -> CmdResult<String> {
    serde_json::to_string(v)
        .map(|s| s + "\n")
        .map_err(|e| Failure::numerical(format!("serialisation failed: {e}")))
}

fn emit(output: &Output, text: &str, stdout: &mut dyn Write) -> CmdResult<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::refusal(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::numerical(format!("cannot write to stdout: {e}"))),
    }
}

fn f17(v: f64) -> String {
    format!("{v:.16e}")
}

fn cmd_coeffs(a: &CoeffsArgs, out: &mut dyn Write) -> CmdResult<()> {
    let p = plane_partition_polynomial(a.n)?;
    let text = match a.format {
        Format::Json => to_json(&p.to_json())?,
        Format::Csv => {
            let mut s = String::from("k,coefficient\n");
            for (k, c) in p.coeffs().iter().enumerate() {
                let _ = writeln!(s, "{k},{c}");
            }
            s
        }
    };
    emit(&a.output, &text, out)
}

#[derive(Serialize)]
struct EvalOutput {
    n: usize,
    x: Complex64,
    value: Complex64,
    ln_value: Complex64,
    abs_error_bound: f64,
    precision_bits: u32,
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> CmdResult<()> {
    let x = parse_complex(&a.x)?;
    let bits = precision(a.precision)?;
    let p = plane_partition_polynomial(a.n)?;
    let r = evaluate(&p, x, bits)?;
    let o = EvalOutput {
        n: a.n,
        x,
        value: r.to_complex64(),
        ln_value: r.value.ln(),
        abs_error_bound: r.abs_error_bound,
        precision_bits: r.precision_bits,
    };
    emit(&a.output, &to_json(&o)?, out)
}

fn cmd_asym(a: &AsymArgs, out: &mut dyn Write) -> CmdResult<()> {
    let x = parse_complex(&a.x)?;
    let est = match a.region {
        Region::Auto => estimate_auto(x, a.n)?,
        Region::R1 => RegionEstimate::R1(estimate_r1(x, a.n)?),
        Region::R2 => RegionEstimate::R2(estimate_r2(x, a.n)?),
        Region::Osc => {
            if x.im != 0.0 {
                return Err(Failure::refusal(format!(
                    "the oscillatory estimate needs a real x in (x*, 0), got {x}"
                )));
            }
            RegionEstimate::Oscillatory {
                value: estimate_oscillatory(x.re, a.n)?,
            }
        }
        Region::Boundary => RegionEstimate::Boundary(estimate_boundary(x, a.n)?),
    };
    emit(&a.output, &to_json(&est)?, out)
}

#[derive(Serialize)]
struct Label {
    label: PhaseLabel,
}

#[derive(Serialize)]
struct Constants {
    x_star: f64,
    theta_star: f64,
    theta_star_over_pi: f64,
}

fn cmd_phase(c: &PhaseCommand, out: &mut dyn Write) -> CmdResult<()> {
    match c {
        PhaseCommand::Classify { x, k_max, tol, output } => {
            let x = parse_complex(x)?;
            let label = classify(x, *k_max, *tol)?;
            emit(output, &to_json(&Label { label })?, out)
        }
        PhaseCommand::Boundary { points, tol, output } => {
            let curve = trace_boundary(*points, *tol)?;
            for g in &curve.gaps {
                eprintln!("warning: no boundary crossing on the ray at theta = {g}");
            }
            emit(output, &curve.to_csv(), out)
        }
        PhaseCommand::Constants { tol, output } => {
            let x_star = real_crossing(*tol)?;
            let theta_star = circle_crossing(tol.max(1e-10))?;
            let c = Constants {
                x_star,
                theta_star,
                theta_star_over_pi: theta_star / std::f64::consts::PI,
            };
            emit(output, &to_json(&c)?, out)
        }
    }
}

#[derive(Serialize)]
struct Predicted {
    n: u64,
    predicted: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matching: Option<plpoly::zeros::ZeroMatchReport>,
}

fn cmd_zeros(a: &ZerosArgs, out: &mut dyn Write) -> CmdResult<()> {
    match &a.action {
        Some(ZerosCommand::Predict {
            n,
            match_zeros: do_match,
            precision: prec,
            margin,
            output,
        }) => {
            let predicted = predicted_interval_zeros(*n)?;
            let matching = if *do_match {
                let set = roots(*n as usize, precision(*prec)?)?;
                Some(match_zeros(&set, &predicted, *margin))
            } else {
                None
            };
            let p = Predicted {
                n: *n,
                predicted,
                matching,
            };
            emit(output, &to_json(&p)?, out)
        }
        None => {
            let n = a.n.ok_or_else(|| Failure::refusal("zeros needs --n"))?;
            let set = roots(n, precision(a.precision)?)?;
            if !set.converged {
                eprintln!("warning: iteration stopped after {} sweeps without converging", set.iterations);
            }
            let text = match a.format {
                Format::Json => to_json(&set)?,
                Format::Csv => set.to_csv(),
            };
            emit(&a.output, &text, out)?;
            if set.converged {
                Ok(())
            } else {
                Err(Failure::numerical("root iteration did not converge"))
            }
        }
    }
}

fn verdict(ok: bool, what: &str) -> CmdResult<()> {
    if ok {
        Ok(())
    } else {
        Err(Failure::numerical(format!("{what} check failed")))
    }
}

fn cmd_verify(c: &VerifyCommand, out: &mut dyn Write) -> CmdResult<()> {
    match c {
        VerifyCommand::Factorization(s) => {
            let r = factorization_suite(s.samples, s.seed)?;
            #[derive(Serialize)]
            struct Summary {
                samples: usize,
                seed: u64,
                max_residual: f64,
                worst: Option<plpoly::verify::ArcSample>,
            }
            let summary = Summary {
                samples: r.samples,
                seed: r.seed,
                max_residual: r.max_residual,
                worst: r.worst,
            };
            emit(&s.output, &to_json(&summary)?, out)?;
            verdict(r.max_residual < 1e-9, "factorisation")
        }
        VerifyCommand::Bounds { samples, omega_samples } => {
            let r = bounds_suite(samples.samples, *omega_samples, samples.seed)?;
            emit(&samples.output, &to_json(&r)?, out)?;
            verdict(r.holds(), "bound")
        }
        VerifyCommand::Dominance { samples, k_max } => {
            let r = dominance_suite(samples.samples, samples.seed, *k_max)?;
            emit(&samples.output, &to_json(&r)?, out)?;
            verdict(r.violations == 0, "dominance")
        }
        VerifyCommand::Saddle(output) => {
            let rows = saddle_suite(&default_saddle_cases())?;
            emit(output, &to_json(&rows)?, out)?;
            verdict(rows.iter().all(|r| r.holds()), "saddle")
        }
        VerifyCommand::Arcsum { x, n, order, output } => {
            let x = parse_complex(x)?;
            let r = arcsum_suite(x, *n, *order)?;
            emit(output, &to_json(&r)?, out)?;
            verdict(r.relative_difference < 1e-8, "arc-sum")
        }
    }
}

struct GridRow {
    x: Complex64,
    label: String,
    region: &'static str,
    relative_error: f64,
}

fn grid_row(table: &PlanePartitionTable, n: usize, x: Complex64) -> GridRow {
    let label = match classify(x, DEFAULT_K_MAX, BOUNDARY_TOL) {
        Ok(l) => l.as_str().to_string(),
        Err(_) => "ERROR".to_string(),
    };
    let (region, relative_error) = match estimate_auto(x, n as u64) {
        Ok(est) => {
            let exact = table
                .get(n)
                .and_then(|p| plpoly::exact::evaluate_adaptive(p, x, 128).ok())
                .map(|r| r.to_complex64());
            let err = match exact {
                Some(q) => (q / est.value() - 1.0).norm(),
                None => f64::NAN,
            };
            (est.region(), err)
        }
        Err(_) => ("none", f64::NAN),
    };
    GridRow {
        x,
        label,
        region,
        relative_error,
    }
}

fn cmd_grid(a: &GridArgs, out: &mut dyn Write) -> CmdResult<()> {
    use rayon::prelude::*;
    if a.resolution < 2 {
        return Err(Failure::refusal("grid needs --resolution >= 2"));
    }
    if !(a.radius > 0.0 && a.radius < 1.0) {
        return Err(Failure::refusal(format!("grid needs 0 < radius < 1, got {}", a.radius)));
    }
    if a.n == 0 {
        return Err(Failure::refusal("grid needs --n >= 1"));
    }
    let table = PlanePartitionTable::build(a.n)?;
    let step = 2.0 / (a.resolution - 1) as f64;
    let mut points = Vec::new();
    for i in 0..a.resolution {
        for j in 0..a.resolution {
            let x = Complex64::new(-1.0 + step * j as f64, -1.0 + step * i as f64);
            if x.norm() <= a.radius && x.norm() > 0.0 {
                points.push(x);
            }
        }
    }
    let rows: Vec<GridRow> = points.par_iter().map(|&x| grid_row(&table, a.n, x)).collect();
    let mut s = String::from("re,im,label,region,relative_error\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            f17(r.x.re),
            f17(r.x.im),
            r.label,
            r.region,
            f17(r.relative_error)
        );
    }
    emit(&a.output, &s, out)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CmdResult<()> {
    match &cli.command {
        Command::Coeffs(a) => cmd_coeffs(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Asym(a) => cmd_asym(a, out),
        Command::Phase(c) => cmd_phase(c, out),
        Command::Zeros(a) => cmd_zeros(a, out),
        Command::Verify(c) => cmd_verify(c, out),
        Command::Grid(a) => cmd_grid(a, out),
    }
}

/// Runs the command line `argv` (including the program name), writing
/// results to `stdout` and diagnostics to `stderr`. Returns the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            let _ = writeln!(stderr, "error: --jobs must be at least 1");
            return 1;
        }
        builder = builder.num_threads(j);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker pool: {e}");
            return 2;
        }
    };
    let mut buf = Vec::new();
    let result = pool.install(|| dispatch(&cli, &mut buf));
    if stdout.write_all(&buf).and_then(|_| stdout.flush()).is_err() {
        let _ = writeln!(stderr, "error: cannot write to stdout");
        return 2;
    }
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
