//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a relation was violated beyond tolerance,
//! 2 input or usage error.

pub mod instance;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::json;

use crate::explorer::{
    gaussian_hermitian, haar_state, probe_achievability, random_density, scan_grid, spin_demo, stream_rng,
    GridSpec, Pauli, ProbeConfig, SpinDemoConfig, SpinRow, DEFAULT_PROBE_DIMS, DEFAULT_SCAN_TOL, GENERATOR_ID,
};
use crate::moments::normalized_correlations;
use crate::relations::{gur_n, gur_normalized, gur_raw, heisenberg_pair, schroedinger_pair, RhoSigmaPoint};
use crate::tolerance::{Tolerance, DEFAULT_TOL};
use instance::{InstanceFile, LoadedInstance, SCHEMA_VERSION};
use output::{f17, Sink};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gurlab", version, about = "Uncertainty relations for several observables")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Relative tolerance (default 1e-9; scan boundary tolerance defaults to 1e-12).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for the random generator; drawn from entropy when omitted.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleEnsemble {
    State,
    Density,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every relation for an instance file.
    Verify { instance: PathBuf },
    /// Map the normalized relation over a (rho12, rho23, rho31, Sigma) grid.
    Scan {
        #[arg(long, default_value_t = 21)]
        rho_steps: usize,
        #[arg(long, default_value_t = 13)]
        sigma_steps: usize,
    },
    /// Search for an instance realizing a target rho-triple.
    Probe {
        #[arg(long, num_args = 3, required = true, allow_negative_numbers = true)]
        target: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_PROBE_DIMS.to_vec())]
        dims: Vec<usize>,
        /// Skip the direct construction attempted on the first trial.
        #[arg(long)]
        no_construction: bool,
    },
    /// Polarization correlations of three spins in random states.
    DemoSpin {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Pauli projection measured on each spin (x, y or z).
        #[arg(long, num_args = 3, default_values = ["x", "x", "x"])]
        projections: Vec<String>,
    },
    /// Write a random instance file.
    Sample {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        observables: usize,
        #[arg(long, value_enum, default_value_t = SampleEnsemble::State)]
        ensemble: SampleEnsemble,
    },
}

#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = Result<i32, InputError>;

/// Parses `args` and runs the selected command, writing reports to `stdout`
/// and diagnostics to `stderr`. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(&cli, stdout) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> CmdResult {
    if let Some(t) = cli.common.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(InputError(format!("--tol must be a nonnegative number, got {t}")));
        }
    }
    match &cli.command {
        Command::Verify { instance } => cmd_verify(&cli.common, instance, stdout),
        Command::Scan { rho_steps, sigma_steps } => cmd_scan(&cli.common, *rho_steps, *sigma_steps, stdout),
        Command::Probe {
            target,
            budget,
            dims,
            no_construction,
        } => cmd_probe(&cli.common, target, *budget, dims, !no_construction, stdout),
        Command::DemoSpin { trials, projections } => cmd_demo_spin(&cli.common, *trials, projections, stdout),
        Command::Sample {
            dim,
            observables,
            ensemble,
        } => cmd_sample(&cli.common, *dim, *observables, *ensemble, stdout),
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| rand::rng().random())
}

fn cmd_verify(common: &CommonArgs, path: &Path, stdout: &mut dyn Write) -> CmdResult {
    let tau = common.tol.unwrap_or(DEFAULT_TOL);
    let loaded = InstanceFile::load(path)
        .and_then(|f| f.validate(tau))
        .map_err(InputError)?;
    let report = verify_report(&loaded, Tolerance::new(tau))?;
    let all_ok = report["all_satisfied"].as_bool().unwrap_or(false);

    let mut sink = Sink::open(common.output.as_deref(), stdout)?;
    match common.format.unwrap_or(Format::Text) {
        Format::Json => writeln!(sink, "{}", serde_json::to_string_pretty(&report)?)?,
        Format::Text => output::write_verify_text(&mut sink, &report)?,
        Format::Csv => return Err(InputError("verify supports --format text or json".into())),
    }
    sink.finish()?;
    Ok(if all_ok { EXIT_OK } else { EXIT_VIOLATION })
}

/// Structured verification report for a loaded instance.
pub fn verify_report(inst: &LoadedInstance, tol: Tolerance) -> Result<serde_json::Value, crate::Error> {
    let m = inst.moments()?;
    let n = m.n();
    let mut all_ok = true;

    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let h = heisenberg_pair(&m, i, j, tol)?;
            let s = schroedinger_pair(&m, i, j, tol)?;
            all_ok &= h.satisfied && s.report.satisfied;
            pairs.push(json!({
                "i": i + 1,
                "j": j + 1,
                "heisenberg": h,
                "schroedinger": s.report,
                "schroedinger_at_least_as_restrictive": s.at_least_as_restrictive,
            }));
        }
    }

    let nc = normalized_correlations(&m);
    let mut table = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            table.push(json!({
                "i": i + 1,
                "j": j + 1,
                "rho": nc.rho[(i, j)],
                "phi": nc.phi[(i, j)],
                "degenerate": nc.degenerate[(i, j)],
            }));
        }
    }

    let (raw, normalized) = if n == 3 {
        let raw = gur_raw(&m, tol)?;
        all_ok &= raw.satisfied;
        let normalized = match RhoSigmaPoint::from_correlations(&nc) {
            Ok(p) => {
                let r = gur_normalized(&p, tol)?;
                all_ok &= r.satisfied;
                json!(r)
            }
            Err(e) => json!({ "degenerate": true, "note": e.to_string() }),
        };
        (json!(raw), normalized)
    } else {
        (serde_json::Value::Null, serde_json::Value::Null)
    };

    let moment_matrix = if n >= 2 {
        let (rep, verdict) = gur_n(&m, tol)?;
        all_ok &= verdict.is_psd;
        json!({
            "report": rep,
            "is_psd": verdict.is_psd,
            "min_eigenvalue": verdict.min_eigenvalue,
            "worst_minor": verdict.worst_minor,
            "worst_minor_rows": verdict.worst_minor_rows,
            "minors_nonnegative": verdict.minors_nonnegative,
        })
    } else {
        serde_json::Value::Null
    };

    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "tol": tol.satisfy,
        "source": m.source,
        "dim": inst.dim(),
        "means": m.means,
        "sigma2": m.sigma2,
        "pairs": pairs,
        "correlations": table,
        "sigma_sum": nc.sigma_sum,
        "sigma_sum_wrapped": nc.sigma_sum_wrapped,
        "cos_sigma": nc.cos_sigma(),
        "gur_raw": raw,
        "gur_normalized": normalized,
        "gur_n": moment_matrix,
        "all_satisfied": all_ok,
    }))
}

fn cmd_scan(common: &CommonArgs, rho_steps: usize, sigma_steps: usize, stdout: &mut dyn Write) -> CmdResult {
    let tol = common.tol.unwrap_or(DEFAULT_SCAN_TOL);
    let grid = GridSpec::new(rho_steps, sigma_steps)?;
    let cells = scan_grid(&grid, tol)?;
    let mut sink = Sink::open(common.output.as_deref(), stdout)?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            output::write_meta_lines(
                &mut sink,
                &[
                    ("command", "scan".into()),
                    ("schema_version", SCHEMA_VERSION.into()),
                    ("tol", f17(tol)),
                    ("seed", "none".into()),
                    ("generator", GENERATOR_ID.into()),
                    ("rho_steps", rho_steps.to_string()),
                    ("sigma_steps", sigma_steps.to_string()),
                ],
            )?;
            writeln!(sink, "rho12,rho23,rho31,cos_sigma,margin,class")?;
            for c in &cells {
                let p = c.point;
                writeln!(
                    sink,
                    "{},{},{},{},{},{}",
                    f17(p.rho12),
                    f17(p.rho23),
                    f17(p.rho31),
                    f17(p.cos_sigma),
                    f17(c.margin),
                    c.class
                )?;
            }
        }
        Format::Json => {
            let v = json!({
                "schema_version": SCHEMA_VERSION,
                "tol": tol,
                "seed": null,
                "generator": GENERATOR_ID,
                "grid": grid,
                "cells": cells,
            });
            writeln!(sink, "{}", serde_json::to_string(&v)?)?;
        }
        Format::Text => return Err(InputError("scan supports --format csv or json".into())),
    }
    sink.finish()?;
    Ok(EXIT_OK)
}

fn cmd_probe(
    common: &CommonArgs,
    target: &[f64],
    budget: u64,
    dims: &[usize],
    construction: bool,
    stdout: &mut dyn Write,
) -> CmdResult {
    let target: [f64; 3] = target
        .try_into()
        .map_err(|_| InputError("--target needs exactly three values".into()))?;
    if target.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(InputError(format!("--target components must lie in [0, 1], got {target:?}")));
    }
    let seed = resolve_seed(common.seed);
    let config = ProbeConfig {
        relation_tol: Tolerance::new(common.tol.unwrap_or(DEFAULT_TOL)),
        construction_seed: construction,
        ..ProbeConfig::default()
    };
    let r = probe_achievability(target, dims, budget, seed, &config)?;
    let best = r.best_instance.as_ref().map(InstanceFile::from_instance);
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "generator": GENERATOR_ID,
        "seed": seed,
        "tol": config.relation_tol.satisfy,
        "probe_tol": r.tol,
        "target": target,
        "dims": dims,
        "budget": budget,
        "trials": r.trials,
        "best_distance": r.best_distance,
        "reached": r.reached,
        "violations": r.violations,
        "forbidden_hits": r.forbidden_hits,
        "degenerate_trials": r.degenerate_trials,
        "realized": r.best_point,
        "best_instance": best,
    });
    let mut sink = Sink::open(common.output.as_deref(), stdout)?;
    match common.format.unwrap_or(Format::Json) {
        Format::Json => writeln!(sink, "{}", serde_json::to_string_pretty(&v)?)?,
        Format::Text => {
            writeln!(sink, "target          {:?}", target)?;
            writeln!(sink, "seed            {seed}")?;
            writeln!(sink, "trials          {}", r.trials)?;
            writeln!(sink, "best distance   {}", f17(r.best_distance))?;
            writeln!(sink, "reached         {}", r.reached)?;
            writeln!(sink, "violations      {}", r.violations)?;
            writeln!(sink, "forbidden hits  {}", r.forbidden_hits)?;
            if let Some(p) = r.best_point {
                writeln!(
                    sink,
                    "realized rho    ({}, {}, {}), cos_sigma {}",
                    f17(p.rho12),
                    f17(p.rho23),
                    f17(p.rho31),
                    f17(p.cos_sigma)
                )?;
            }
        }
        Format::Csv => return Err(InputError("probe supports --format json or text".into())),
    }
    sink.finish()?;
    Ok(if r.violations == 0 { EXIT_OK } else { EXIT_VIOLATION })
}

fn spin_row_line(name: &str, r: &SpinRow) -> String {
    format!(
        "{name:<8} rho = ({}, {}, {})  cos_sigma = {}  margin = {}",
        f17(r.rho12),
        f17(r.rho23),
        f17(r.rho31),
        f17(r.cos_sigma),
        f17(r.margin)
    )
}

fn cmd_demo_spin(common: &CommonArgs, trials: usize, projections: &[String], stdout: &mut dyn Write) -> CmdResult {
    let parsed = projections
        .iter()
        .map(|s| s.parse::<Pauli>())
        .collect::<Result<Vec<_>, _>>()?;
    let projections: [Pauli; 3] = parsed
        .try_into()
        .map_err(|_| InputError("--projections needs exactly three values".into()))?;
    let seed = resolve_seed(common.seed);
    let tau = common.tol.unwrap_or(DEFAULT_TOL);
    let config = SpinDemoConfig {
        seed,
        trials,
        projections,
        tol: Tolerance::new(tau),
    };
    let rep = spin_demo(&config)?;

    match common.format.unwrap_or(Format::Text) {
        Format::Json => {
            let v = json!({
                "schema_version": SCHEMA_VERSION,
                "generator": GENERATOR_ID,
                "seed": seed,
                "tol": tau,
                "projections": projections,
                "trials": trials,
                "ghz": rep.ghz,
                "product": rep.product,
                "violations": rep.violations,
                "forbidden_hits": rep.forbidden_hits,
                "degenerate": rep.degenerate,
                "rho_stats": rep.rho_stats,
            });
            writeln!(stdout, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Text | Format::Csv => {
            writeln!(stdout, "three-spin polarization correlations ({GENERATOR_ID})")?;
            writeln!(stdout, "seed {seed}, tol {}, projections {projections:?}", f17(tau))?;
            writeln!(stdout, "{}", spin_row_line("ghz", &rep.ghz))?;
            writeln!(stdout, "{}", spin_row_line("product", &rep.product))?;
            writeln!(stdout, "samples {trials}, degenerate {}", rep.degenerate)?;
            if let Some(stats) = rep.rho_stats {
                for (name, s) in ["rho12", "rho23", "rho31"].iter().zip(stats) {
                    writeln!(stdout, "{name}: min {} max {} mean {}", f17(s.min), f17(s.max), f17(s.mean))?;
                }
            }
            writeln!(stdout, "violations {}, forbidden-region hits {}", rep.violations, rep.forbidden_hits)?;
        }
    }

    if let Some(path) = common.output.as_deref() {
        let mut sink = Sink::open(Some(path), stdout)?;
        output::write_meta_lines(
            &mut sink,
            &[
                ("command", "demo-spin".into()),
                ("schema_version", SCHEMA_VERSION.into()),
                ("tol", f17(tau)),
                ("seed", seed.to_string()),
                ("generator", GENERATOR_ID.into()),
                ("projections", format!("{projections:?}")),
            ],
        )?;
        writeln!(sink, "rho12,rho23,rho31,cos_sigma,margin")?;
        for r in &rep.samples {
            writeln!(
                sink,
                "{},{},{},{},{}",
                f17(r.rho12),
                f17(r.rho23),
                f17(r.rho31),
                f17(r.cos_sigma),
                f17(r.margin)
            )?;
        }
        sink.finish()?;
    }
    Ok(if rep.violations == 0 && rep.ghz.satisfied && rep.product.satisfied {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn cmd_sample(
    common: &CommonArgs,
    dim: usize,
    n_observables: usize,
    ensemble: SampleEnsemble,
    stdout: &mut dyn Write,
) -> CmdResult {
    if dim < 1 || n_observables < 1 {
        return Err(InputError("--dim and --observables must be >= 1".into()));
    }
    let seed = resolve_seed(common.seed);
    let observables: Vec<_> = (0..n_observables)
        .map(|k| gaussian_hermitian(dim, &mut stream_rng(seed, k as u64 + 1)))
        .collect();
    let mut rng = stream_rng(seed, 0);
    let file = match ensemble {
        SampleEnsemble::State => InstanceFile::from_pure(&haar_state(dim, &mut rng), &observables),
        SampleEnsemble::Density => InstanceFile::from_mixed(&random_density(dim, &mut rng), &observables),
    }
    .with_meta(json!({
        "seed": seed,
        "generator": GENERATOR_ID,
        "ensemble": format!("{ensemble:?}").to_lowercase(),
    }));
    let mut sink = Sink::open(common.output.as_deref(), stdout)?;
    writeln!(sink, "{}", file.to_json())?;
    sink.finish()?;
    Ok(EXIT_OK)
}
