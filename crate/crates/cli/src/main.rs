//! `ptheta`: command-line surface over the partial theta function toolkit.
//!
//! Exit codes: 0 success/feasible, 1 infeasible or check failed, 2 usage
//! error, 3 numeric failure (stall, unreachable tolerance, unresolved
//! bracket).

mod parse;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use parse::{format_complex, parse_complex};
use ptheta_core::certify::decimal_approx;
use ptheta_core::dd::Dd;
use ptheta_core::eval::eval_theta_dd;
use ptheta_core::spectrum::asymptotics_csv;
use ptheta_core::*;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

/// Built-in reference block for `delta --check-table`: the first 10
/// coefficients of Delta_1 .. Delta_5.
const REFERENCE_TABLE: [[i64; 10]; 5] = [
    [1, -1, -1, -1, -2, -4, -10, -25, -66, -178],
    [1, 0, 0, 1, 3, 9, 24, 66, 180, 498],
    [1, 0, 0, 0, 0, 0, -1, -3, -9, -22],
    [1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
];

#[derive(Parser)]
#[command(
    name = "ptheta",
    version,
    about = "Partial theta function toolkit: certified evaluation, zero-correction series, \
             simplicity certificates, zero localization, and the double-zero spectrum"
)]
struct Cli {
    /// Working precision in bits (>= 100 selects the double-double path for
    /// real inputs; the spectrum solver always runs at >= 100 bits)
    #[arg(long, global = true, env = "THETA_PRECISION_BITS", default_value_t = 53)]
    precision_bits: u32,

    /// Residual / truncation-tail tolerance
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write output to a file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate theta(q, x) with a rigorous truncation tail
    Eval {
        /// q as a complex literal RE[+-]IMi, |q| < 1
        #[arg(long)]
        q: String,
        /// x as a complex literal RE[+-]IMi
        #[arg(long)]
        x: String,
    },
    /// Solve the zero-correction factors Delta_1..Delta_S through order K
    Delta {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        k: usize,
        /// Compare the S<=5, K<=9 block against the built-in reference table
        /// and exit nonzero on mismatch
        #[arg(long)]
        check_table: bool,
        /// Report the alternating-sign structure of each row
        #[arg(long)]
        probe_signs: bool,
    },
    /// Certify in exact rational arithmetic that all zeros of theta(q,.) are
    /// simple on the disk |q| <= a
    Certify {
        /// Disk radius as an exact rational (`27/250` or `0.108`)
        #[arg(long)]
        a: Option<String>,
        /// Optional explicit witness u = 1 + beta (searched when omitted)
        #[arg(long, requires = "a")]
        u: Option<String>,
        /// Search for the largest certifiable radius on a grid instead
        #[arg(long, conflicts_with = "a")]
        max_radius: bool,
        /// Grid step for --max-radius, exact rational
        #[arg(long, default_value = "1e-4")]
        grid_step: String,
    },
    /// Locate the first n zeros of theta(q, .)
    Zeros {
        #[arg(long)]
        q: String,
        #[arg(long)]
        n: usize,
    },
    /// Scan a polar grid over the disk |q| <= rmax and emit distinctness
    /// diagnostics as CSV
    Scan {
        #[arg(long)]
        rmax: f64,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = 6)]
        n: usize,
    },
    /// Locate the real spectral values q~_1..q~_jmax (double real zeros)
    Spectrum {
        #[arg(long)]
        jmax: usize,
    },
}

enum CliError {
    Usage(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) => m,
        }
    }
}

macro_rules! numeric_from {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Numeric(e.to_string())
            }
        }
    )*};
}
numeric_from!(EvalError, DeltaError, ZerosError, SpectrumError);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if cli.precision_bits < 53 {
        return Err(CliError::Usage(
            "precision-bits must be at least 53".into(),
        ));
    }
    if cli.tol <= 0.0 {
        return Err(CliError::Usage("tol must be positive".into()));
    }
    match &cli.cmd {
        Cmd::Eval { q, x } => cmd_eval(&cli, q, x),
        Cmd::Delta {
            s,
            k,
            check_table,
            probe_signs,
        } => cmd_delta(&cli, *s, *k, *check_table, *probe_signs),
        Cmd::Certify {
            a,
            u,
            max_radius,
            grid_step,
        } => cmd_certify(&cli, a.as_deref(), u.as_deref(), *max_radius, grid_step),
        Cmd::Zeros { q, n } => cmd_zeros(&cli, q, *n),
        Cmd::Scan { rmax, grid, n } => cmd_scan(&cli, *rmax, *grid, *n),
        Cmd::Spectrum { jmax } => cmd_spectrum(&cli, *jmax),
    }
}

fn emit(cli: &Cli, content: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Numeric(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_eval(cli: &Cli, q_str: &str, x_str: &str) -> Result<u8, CliError> {
    let q = parse_complex(q_str).map_err(CliError::Usage)?;
    let x = parse_complex(x_str).map_err(CliError::Usage)?;
    let high_precision = cli.precision_bits > 53 && q.im == 0.0 && x.im == 0.0;
    let out = if high_precision {
        let opts = EvalOptions::default();
        let (value, tail, terms) =
            eval_theta_dd(Dd::from_f64(q.re), Dd::from_f64(x.re), cli.tol, &opts)?;
        match cli.format {
            Format::Json => format!(
                "{}\n",
                serde_json::json!({
                    "value": value.to_decimal(30),
                    "tail_bound": tail,
                    "terms_used": terms,
                    "precision_bits": 106,
                })
            ),
            _ => format!(
                "theta(q, x) = {}\n  tail_bound = {:e}\n  terms_used = {}\n",
                value.to_decimal(30),
                tail,
                terms
            ),
        }
    } else {
        let r = eval_theta(q, x, cli.tol)?;
        match cli.format {
            Format::Json => format!(
                "{}\n",
                serde_json::json!({
                    "value_re": r.value.re,
                    "value_im": r.value.im,
                    "tail_bound": r.tail_bound,
                    "terms_used": r.terms_used,
                })
            ),
            _ => format!(
                "theta(q, x) = {}\n  tail_bound = {:e}\n  terms_used = {}\n",
                format_complex(r.value),
                r.tail_bound,
                r.terms_used
            ),
        }
    };
    emit(cli, &out)?;
    Ok(0)
}

fn cmd_delta(
    cli: &Cli,
    s: usize,
    k: usize,
    check_table: bool,
    probe_signs: bool,
) -> Result<u8, CliError> {
    if s < 1 {
        return Err(CliError::Usage("--s must be at least 1".into()));
    }
    let table = solve_delta(s, k)?;

    if check_table {
        let mut mismatches = Vec::new();
        for row in 0..s.min(5) {
            let d = table.delta(row + 1);
            for col in 0..=k.min(9) {
                let expected = REFERENCE_TABLE[row][col];
                if d.coeff(col) != BigInt::from(expected) {
                    mismatches.push(format!(
                        "Delta_{} coefficient of q^{}: got {}, reference {}",
                        row + 1,
                        col,
                        d.coeff(col),
                        expected
                    ));
                }
            }
        }
        return if mismatches.is_empty() {
            emit(cli, "check-table: PASS\n")?;
            Ok(0)
        } else {
            emit(cli, &format!("check-table: FAIL\n{}\n", mismatches.join("\n")))?;
            Ok(EXIT_CHECK_FAILED)
        };
    }

    let out = match cli.format {
        Format::Json => {
            let mut value: serde_json::Value =
                serde_json::from_str(&table.to_json()).expect("table json");
            if probe_signs {
                let probe = sign_pattern_probe(&table);
                value["sign_probe"] = serde_json::to_value(&probe).expect("probe json");
            }
            format!("{}\n", serde_json::to_string_pretty(&value).unwrap())
        }
        _ => {
            let mut t = String::new();
            for row in 1..=s {
                let d = table.delta(row);
                let kappa = match leading_gap(d) {
                    Some(g) => format!("kappa_{row} = {g}"),
                    None => format!("kappa_{row} > {k}"),
                };
                let coeffs = d
                    .coeff_strings()
                    .join(", ");
                t.push_str(&format!("Delta_{row}: [{coeffs}]  ({kappa})\n"));
            }
            if probe_signs {
                t.push_str("sign probe ((-1)^s (Delta_s - 1) >= 0 coefficientwise):\n");
                for row in sign_pattern_probe(&table) {
                    t.push_str(&format!("  s={}: {:?}\n", row.s, row.pattern));
                }
            }
            t
        }
    };
    emit(cli, &out)?;
    Ok(0)
}

fn parse_rat_arg(text: &str, what: &str) -> Result<BigRational, CliError> {
    parse_rational(text).map_err(|e| CliError::Usage(format!("{what}: {e}")))
}

fn cmd_certify(
    cli: &Cli,
    a: Option<&str>,
    u: Option<&str>,
    max_radius: bool,
    grid_step: &str,
) -> Result<u8, CliError> {
    if max_radius {
        let step = parse_rat_arg(grid_step, "--grid-step")?;
        if step <= BigRational::from_integer(0.into()) {
            return Err(CliError::Usage("--grid-step must be positive".into()));
        }
        let reach = max_certified_radius(&step);
        if reach == BigRational::from_integer(0.into()) {
            emit(cli, "no grid radius certifies\n")?;
            return Ok(EXIT_CHECK_FAILED);
        }
        let cert = certify_disk(&reach);
        let out = match cli.format {
            Format::Json => {
                let mut v: serde_json::Value =
                    serde_json::from_str(&cert.to_json()).expect("cert json");
                v["max_radius"] = serde_json::Value::String(reach.to_string());
                v["max_radius_decimal"] = serde_json::Value::String(decimal_approx(&reach, 8));
                format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
            }
            _ => format!(
                "largest certified radius on the grid (step {}): {} (= {})\n\n{}",
                grid_step,
                reach,
                decimal_approx(&reach, 8),
                cert.transcript()
            ),
        };
        emit(cli, &out)?;
        return Ok(if cert.feasible { 0 } else { EXIT_CHECK_FAILED });
    }

    let a = parse_rat_arg(
        a.ok_or_else(|| CliError::Usage("either --a or --max-radius is required".into()))?,
        "--a",
    )?;
    if a <= BigRational::from_integer(0.into()) {
        return Err(CliError::Usage("--a must be positive".into()));
    }
    let cert = match u {
        Some(u_str) => {
            let u = parse_rat_arg(u_str, "--u")?;
            if u <= BigRational::from_integer(1.into()) {
                return Err(CliError::Usage("--u must exceed 1".into()));
            }
            Certificate::evaluate(a, u)
        }
        None => certify_disk(&a),
    };
    let out = match cli.format {
        Format::Json => format!("{}\n", cert.to_json()),
        _ => cert.transcript(),
    };
    emit(cli, &out)?;
    Ok(if cert.feasible { 0 } else { EXIT_CHECK_FAILED })
}

fn cmd_zeros(cli: &Cli, q_str: &str, n: usize) -> Result<u8, CliError> {
    if n < 1 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let q = parse_complex(q_str).map_err(CliError::Usage)?;
    let zs = find(q, n, cli.tol)?;
    let out = match cli.format {
        Format::Json => {
            let entries: Vec<serde_json::Value> = zs
                .entries
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    serde_json::json!({
                        "j": i + 1,
                        "zero_re": -e.xi.re,
                        "zero_im": -e.xi.im,
                        "residual": e.residual,
                        "delta_re": e.delta.re,
                        "delta_im": e.delta.im,
                        "err_bound": e.err_bound,
                    })
                })
                .collect();
            format!(
                "{}\n",
                serde_json::json!({
                    "q_re": q.re, "q_im": q.im, "count": zs.count(), "zeros": entries,
                })
            )
        }
        Format::Csv => {
            let mut t =
                String::from("j,zero_re,zero_im,residual,delta_re,delta_im,err_bound\n");
            for (i, e) in zs.entries.iter().enumerate() {
                t.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    i + 1,
                    -e.xi.re,
                    -e.xi.im,
                    e.residual,
                    e.delta.re,
                    e.delta.im,
                    e.err_bound
                ));
            }
            t
        }
        Format::Text => {
            if zs.count() == 0 {
                "no zeros: theta(0, .) is identically 1\n".to_string()
            } else {
                let mut t = format!("zeros of theta(q, .) at q = {}\n", format_complex(q));
                for (i, e) in zs.entries.iter().enumerate() {
                    t.push_str(&format!(
                        "  j={:<2} zero = {:<40} residual = {:9.3e}  Delta_j = {}\n",
                        i + 1,
                        format_complex(-e.xi),
                        e.residual,
                        format_complex(e.delta),
                    ));
                }
                if zs.count() >= 2 {
                    let rep = separation_report(&zs)?;
                    t.push_str(&format!(
                        "  separation: min_ratio = {:.6}, max_ratio = {:.6}, min_pair_distance = {:.6e}, distinct = {}\n",
                        rep.min_ratio, rep.max_ratio, rep.min_pair_distance, rep.distinct
                    ));
                }
                t
            }
        }
    };
    emit(cli, &out)?;
    Ok(0)
}

fn cmd_scan(cli: &Cli, rmax: f64, grid: usize, n: usize) -> Result<u8, CliError> {
    if !(rmax > 0.0 && rmax <= 0.35) {
        return Err(CliError::Usage("--rmax must lie in (0, 0.35]".into()));
    }
    if grid < 1 || grid > 512 {
        return Err(CliError::Usage("--grid must lie in [1, 512]".into()));
    }
    let rows = scan_disk(rmax, grid, n, cli.tol)?;
    let out = match cli.format {
        Format::Json => {
            let v: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "re_q": r.re_q, "im_q": r.im_q, "n_found": r.n_found,
                        "min_ratio": r.min_ratio, "min_pair_distance": r.min_pair_distance,
                        "max_delta_dev": r.max_delta_dev, "stalled": r.stalled,
                    })
                })
                .collect();
            format!("{}\n", serde_json::Value::Array(v))
        }
        _ => scan_csv(&rows),
    };
    emit(cli, &out)?;
    Ok(0)
}

fn cmd_spectrum(cli: &Cli, jmax: usize) -> Result<u8, CliError> {
    if jmax < 1 {
        return Err(CliError::Usage("--jmax must be at least 1".into()));
    }
    let points = spectrum_table(jmax, cli.tol)?;
    let out = match cli.format {
        Format::Json => {
            let asym = if points.len() >= 3 {
                Some(asymptotic_report(&points)?)
            } else {
                None
            };
            format!(
                "{}\n",
                serde_json::json!({
                    "points": points,
                    "asymptotics": asym,
                })
            )
        }
        Format::Csv => {
            if points.len() >= 3 {
                asymptotics_csv(&asymptotic_report(&points)?)
            } else {
                let mut t = String::from("j,q_tilde,j_times_one_minus_q,x_double\n");
                for p in &points {
                    t.push_str(&format!(
                        "{},{},{},{}\n",
                        p.index,
                        p.q_tilde,
                        p.index as f64 * (1.0 - p.q_tilde),
                        p.x_double
                    ));
                }
                t
            }
        }
        Format::Text => {
            let mut t = String::from(
                "spectral values (double real zeros of theta):\n  j   q_tilde          x_double        |theta|      |theta_x|    |theta_xx|\n",
            );
            for p in &points {
                t.push_str(&format!(
                    "  {:<3} {:<16.12} {:<15.8} {:<12.3e} {:<12.3e} {:.6}\n",
                    p.index, p.q_tilde, p.x_double, p.theta_abs, p.theta_x_abs, p.theta_xx_abs
                ));
            }
            if points.len() >= 3 {
                let rep = asymptotic_report(&points)?;
                t.push_str("asymptotics (j*(1 - q_tilde) -> pi/2, x_double -> -e^pi):\n");
                for r in &rep.rows {
                    t.push_str(&format!(
                        "  j={:<3} j*(1-q~) = {:<10.6} x~ = {:.6}\n",
                        r.index, r.j_times_gap, r.x_double
                    ));
                }
                t.push_str(&format!(
                    "  trends: gap_toward_pi_over_2 = {}, x_decreasing = {}, x_above_-e^pi = {}\n",
                    rep.gap_trend_ok, rep.x_trend_ok, rep.x_above_limit
                ));
            }
            t
        }
    };
    emit(cli, &out)?;
    Ok(0)
}

