//! Command-line front end.
//!
//! Every subcommand validates its flags before any computation starts, writes
//! its primary artifact to --out (or stdout), and reports failures on stderr
//! with a stable exit-code split: 1 for validation problems, 2 for numerical
//! ones. All randomness is seeded (default 42), so repeated runs are
//! byte-identical.

use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{compute_moments, MomentTable, QuadratureConfig};
use crate::projection::{kernel_eval, project};
use crate::regularity::{
    cutoff_moment_convergence, dual_operator_bound, estimate_pairing_constant, sobolev_ratio_sweep,
    PAIRING_DEGREE_CAP,
};
use crate::series::MonomialSeries;
use crate::sobolev::{sobolev_norm, MAX_SOBOLEV_ORDER};
use crate::weights::{RadialWeight, MAX_WIRTINGER};

/// Hard cap on moment-table size through the CLI.
pub const MAX_TABLE_N: usize = 100_000;
/// Default mode-scan depth for `constants`.
pub const DEFAULT_CONSTANTS_N: usize = 1024;
/// Degree cap for the randomized projection sweep in `verify`.
pub const VERIFY_DEGREE_CAP: u32 = 40;

const MAX_SAMPLES: u32 = 1_000_000;

#[derive(Parser, Debug)]
#[command(
    name = "bergman",
    about = "Weighted Bergman projections, kernels, Sobolev norms, and operator constants for radial weights on the unit disc",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the moment table as CSV (n, log_mu, log_alpha).
    Moments {
        /// Weight spec, e.g. power:t=1 or cutoff:t=0.3;base=power:t=1
        #[arg(long)]
        weight: String,
        /// Largest moment index (inclusive), up to 100000.
        #[arg(long = "N")]
        n: usize,
        /// Output path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the truncated kernel at a pair of points, with a tail bound.
    Kernel {
        #[arg(long)]
        weight: String,
        /// Point z as "re,im", inside the open disc.
        #[arg(long)]
        z: String,
        /// Point w as "re,im", inside the open disc.
        #[arg(long)]
        w: String,
        /// Truncation index, up to 100000.
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Project a series (JSON on stdin or --in) onto the holomorphic part.
    Project {
        #[arg(long)]
        weight: String,
        /// Input series JSON path (stdin if omitted).
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weighted Sobolev norm of a series (JSON on stdin or --in).
    SobolevNorm {
        #[arg(long)]
        weight: String,
        /// Sobolev order, 0..=6.
        #[arg(long)]
        k: u32,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the dual-operator mode factors: CSV sweep plus a JSON summary.
    Constants {
        #[arg(long)]
        weight: String,
        /// Derivative order, 1..=6.
        #[arg(long)]
        j: u32,
        /// Scan modes 1..=N, up to 100000.
        #[arg(long = "N", default_value_t = DEFAULT_CONSTANTS_N)]
        n: usize,
        /// CSV path; with it the summary goes to stdout, without it both do.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assemble the regularity constants and a randomized projection sweep.
    Verify {
        #[arg(long)]
        weight: String,
        /// Sobolev order for the projection sweep, 0..=6.
        #[arg(long)]
        k: u32,
        /// Derivative order for the constants, 1..=6.
        #[arg(long)]
        j: u32,
        /// Mode-scan depth, up to 100000.
        #[arg(long = "N")]
        n: usize,
        /// Random samples per estimate, 1..=1000000.
        #[arg(long)]
        samples: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Moment convergence of cutoff weights toward a base weight as t -> 0.
    CutoffConvergence {
        /// Base weight spec (must not itself be a cutoff).
        #[arg(long)]
        weight: String,
        /// Comma-separated strictly decreasing cutoff parameters in (0,1).
        #[arg(long, default_value = "0.5,0.2,0.1,0.05,0.01")]
        t_list: String,
        /// Comma-separated moment indices (overrides --n-max).
        #[arg(long)]
        n_list: Option<String>,
        /// Scan all indices 0..=n-max instead.
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residual of the radial Wirtinger identity at sample points.
    CheckIdentity {
        #[arg(long)]
        weight: String,
        /// Derivative order, 1..=2.
        #[arg(long)]
        l: u32,
        /// Single point "re,im" (nonzero, inside the disc); random if omitted.
        #[arg(long)]
        z: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Run a parsed command; the i32 is the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Moments { weight, n, out } => cmd_moments(&weight, n, out.as_deref()),
        Command::Kernel {
            weight,
            z,
            w,
            n,
            out,
        } => cmd_kernel(&weight, &z, &w, n, out.as_deref()),
        Command::Project { weight, input, out } => {
            cmd_project(&weight, input.as_deref(), out.as_deref())
        }
        Command::SobolevNorm {
            weight,
            k,
            input,
            out,
        } => cmd_sobolev(&weight, k, input.as_deref(), out.as_deref()),
        Command::Constants { weight, j, n, out } => cmd_constants(&weight, j, n, out.as_deref()),
        Command::Verify {
            weight,
            k,
            j,
            n,
            samples,
            seed,
            out,
        } => cmd_verify(&weight, k, j, n, samples, seed, out.as_deref()),
        Command::CutoffConvergence {
            weight,
            t_list,
            n_list,
            n_max,
            out,
        } => cmd_cutoff_convergence(&weight, &t_list, n_list.as_deref(), n_max, out.as_deref()),
        Command::CheckIdentity {
            weight,
            l,
            z,
            samples,
            seed,
            out,
        } => cmd_check_identity(&weight, l, z.as_deref(), samples, seed, out.as_deref()),
    }
}

fn parse_weight(spec: &str) -> Result<RadialWeight> {
    spec.parse()
}

fn check_table_n(n: usize) -> Result<()> {
    if n > MAX_TABLE_N {
        return Err(Error::InvalidConfig(format!(
            "--N must be at most {MAX_TABLE_N}, got {n}"
        )));
    }
    Ok(())
}

fn check_order(name: &str, value: u32, lo: u32, hi: u32) -> Result<()> {
    if !(lo..=hi).contains(&value) {
        return Err(Error::InvalidConfig(format!(
            "--{name} must lie in {lo}..={hi}, got {value}"
        )));
    }
    Ok(())
}

fn check_samples(samples: u32) -> Result<()> {
    if !(1..=MAX_SAMPLES).contains(&samples) {
        return Err(Error::InvalidConfig(format!(
            "--samples must lie in 1..={MAX_SAMPLES}, got {samples}"
        )));
    }
    Ok(())
}

fn parse_point(name: &str, text: &str) -> Result<Complex64> {
    let parts: Vec<&str> = text.split(',').collect();
    let bad = || Error::InvalidConfig(format!("--{name} must be \"re,im\", got {text:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let re: f64 = parts[0].parse().map_err(|_| bad())?;
    let im: f64 = parts[1].parse().map_err(|_| bad())?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn parse_list<T: std::str::FromStr>(name: &str, text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|part| {
            // No trimming: stray whitespace is a spelling error, not a value.
            part.parse::<T>().map_err(|_| {
                Error::InvalidConfig(format!("--{name}: bad entry {part:?} in {text:?}"))
            })
        })
        .collect()
}

fn read_series(input: Option<&Path>) -> Result<MonomialSeries> {
    let text = match input {
        Some(path) => std::fs::read_to_string(path)?,
        None => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    MonomialSeries::from_json(&text)
}

fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report serialization cannot fail");
    s.push('\n');
    s
}

fn cmd_moments(weight: &str, n: usize, out: Option<&Path>) -> Result<()> {
    check_table_n(n)?;
    let w = parse_weight(weight)?;
    let table = compute_moments(&w, n, &QuadratureConfig::default())?;
    write_output(out, &moments_csv(&table))
}

fn moments_csv(table: &MomentTable) -> String {
    let mut csv = String::from("n,log_mu,log_alpha\n");
    for n in 0..=table.n_max() {
        let lm = table.log_mu(n).expect("in range");
        csv.push_str(&format!("{n},{lm:.16e},{:.16e}\n", -lm));
    }
    csv
}

#[derive(Serialize)]
struct KernelJson {
    re: f64,
    im: f64,
    tail_bound: f64,
    #[serde(rename = "N")]
    n: usize,
}

fn cmd_kernel(weight: &str, z: &str, w: &str, n: usize, out: Option<&Path>) -> Result<()> {
    check_table_n(n)?;
    let wt = parse_weight(weight)?;
    let z = parse_point("z", z)?;
    let w = parse_point("w", w)?;
    let table = compute_moments(&wt, n, &QuadratureConfig::default())?;
    let kernel = kernel_eval(&table, z, w, n)?;
    write_output(
        out,
        &json_line(&KernelJson {
            re: kernel.value.re,
            im: kernel.value.im,
            tail_bound: kernel.tail_bound,
            n: kernel.truncation,
        }),
    )
}

fn cmd_project(weight: &str, input: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let w = parse_weight(weight)?;
    let f = read_series(input)?;
    let needed = f
        .terms()
        .filter(|((a, b), _)| a >= b)
        .map(|(&(a, _), _)| a as usize)
        .max()
        .unwrap_or(0);
    check_table_n(needed)?;
    let table = compute_moments(&w, needed, &QuadratureConfig::default())?;
    let projected = project(&f, &table)?;
    let mut text = projected.to_json();
    text.push('\n');
    write_output(out, &text)
}

fn cmd_sobolev(weight: &str, k: u32, input: Option<&Path>, out: Option<&Path>) -> Result<()> {
    check_order("k", k, 0, MAX_SOBOLEV_ORDER)?;
    let w = parse_weight(weight)?;
    let f = read_series(input)?;
    let needed = f.degree().unwrap_or(0) as usize;
    check_table_n(needed)?;
    let table = compute_moments(&w, needed, &QuadratureConfig::default())?;
    let norm = sobolev_norm(&f, k, &table)?;
    write_output(out, &json_line(&norm))
}

#[derive(Serialize)]
struct ConstantsSummaryJson {
    j: u32,
    #[serde(rename = "N")]
    n: usize,
    bracket_sup: f64,
    argmax: usize,
    opnorm_bound: f64,
}

fn cmd_constants(weight: &str, j: u32, n: usize, out: Option<&Path>) -> Result<()> {
    check_order("j", j, 1, MAX_SOBOLEV_ORDER)?;
    check_table_n(n)?;
    if n < 1 {
        return Err(Error::InvalidConfig("--N must be at least 1".into()));
    }
    let w = parse_weight(weight)?;
    let table = compute_moments(&w, n + 2 * j as usize, &QuadratureConfig::default())?;
    let bound = dual_operator_bound(j, n, &table)?;

    let mut csv = String::from("n,bracket\n");
    for mode in 1..=n {
        let factor = crate::regularity::dual_mode_factor(j, mode, &table)?;
        csv.push_str(&format!("{mode},{factor:.16e}\n"));
    }
    let summary = json_line(&ConstantsSummaryJson {
        j,
        n,
        bracket_sup: bound.factor_sup,
        argmax: bound.argmax,
        opnorm_bound: bound.operator_bound,
    });
    match out {
        Some(path) => {
            std::fs::write(path, csv)?;
            print!("{summary}");
        }
        None => print!("{csv}{summary}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyJson {
    j: u32,
    #[serde(rename = "N")]
    n: usize,
    bracket_sup: f64,
    argmax: usize,
    opnorm_bound: f64,
    bracket_tail: f64,
    d_j_estimate: f64,
    samples: u32,
    seed: u64,
    sobolev_ratio: SobolevRatioJson,
}

#[derive(Serialize)]
struct SobolevRatioJson {
    k: u32,
    degree_cap: u32,
    max_ratio: f64,
    used: u32,
    skipped: u32,
}

fn cmd_verify(
    weight: &str,
    k: u32,
    j: u32,
    n: usize,
    samples: u32,
    seed: u64,
    out: Option<&Path>,
) -> Result<()> {
    check_order("k", k, 0, MAX_SOBOLEV_ORDER)?;
    check_order("j", j, 1, MAX_SOBOLEV_ORDER)?;
    check_table_n(n)?;
    if n < 1 {
        return Err(Error::InvalidConfig("--N must be at least 1".into()));
    }
    check_samples(samples)?;
    let w = parse_weight(weight)?;
    let n_table = (n + 2 * j as usize)
        .max(PAIRING_DEGREE_CAP as usize)
        .max(VERIFY_DEGREE_CAP as usize);
    let table = compute_moments(&w, n_table, &QuadratureConfig::default())?;

    let bound = dual_operator_bound(j, n, &table)?;
    let pairing = estimate_pairing_constant(j, samples, seed, &table)?;
    let sweep = sobolev_ratio_sweep(k, VERIFY_DEGREE_CAP, samples, seed, &table)?;

    write_output(
        out,
        &json_line(&VerifyJson {
            j,
            n,
            bracket_sup: bound.factor_sup,
            argmax: bound.argmax,
            opnorm_bound: bound.operator_bound,
            bracket_tail: bound.factor_at_cap,
            d_j_estimate: pairing.d_j,
            samples,
            seed,
            sobolev_ratio: SobolevRatioJson {
                k,
                degree_cap: VERIFY_DEGREE_CAP,
                max_ratio: sweep.max_ratio,
                used: sweep.used,
                skipped: sweep.skipped,
            },
        }),
    )
}

fn cmd_cutoff_convergence(
    weight: &str,
    t_list: &str,
    n_list: Option<&str>,
    n_max: usize,
    out: Option<&Path>,
) -> Result<()> {
    let base = parse_weight(weight)?;
    let t_list: Vec<f64> = parse_list("t-list", t_list)?;
    let n_list: Vec<usize> = match n_list {
        Some(text) => parse_list("n-list", text)?,
        None => (0..=n_max).collect(),
    };
    if let Some(&n) = n_list.iter().max() {
        check_table_n(n)?;
    }
    let report = cutoff_moment_convergence(&base, &n_list, &t_list, &QuadratureConfig::default())?;
    write_output(out, &json_line(&report))
}

#[derive(Serialize)]
struct IdentityJson {
    l: u32,
    samples: u32,
    max_residual: f64,
}

fn cmd_check_identity(
    weight: &str,
    l: u32,
    z: Option<&str>,
    samples: u32,
    seed: u64,
    out: Option<&Path>,
) -> Result<()> {
    check_order("l", l, 1, MAX_WIRTINGER)?;
    check_samples(samples)?;
    let w = parse_weight(weight)?;
    let points: Vec<Complex64> = match z {
        Some(text) => vec![parse_point("z", text)?],
        None => {
            // Seeded points with radius in [0.05, 0.95]: away from the origin
            // (where the identity is undefined) and the boundary.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .map(|_| {
                    let radius = 0.05 + 0.90 * rng.gen::<f64>();
                    let angle = std::f64::consts::TAU * rng.gen::<f64>();
                    Complex64::from_polar(radius, angle)
                })
                .collect()
        }
    };
    let mut max_residual = 0.0f64;
    for &point in &points {
        max_residual = max_residual.max(w.radial_identity_residual(l, point)?);
    }
    write_output(
        out,
        &json_line(&IdentityJson {
            l,
            samples: points.len() as u32,
            max_residual,
        }),
    )
}
