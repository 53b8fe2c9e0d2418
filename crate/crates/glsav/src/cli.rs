//! Command-line front end: `run`, `converge` and `audit`.
//!
//! Exit codes: 0 success / all checks pass, 1 usage error, 2 solver failure,
//! 3 audit failure.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::harness::{audit_result, temporal_convergence, SimConfig};
use crate::io::{parse_config, write_snapshot, write_timeseries, RunManifest};
use crate::observables::vortex_count;
use crate::stepper::{run_with, RunAbort};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_AUDIT: i32 = 3;

#[derive(Parser)]
#[command(
    name = "glsav",
    version,
    about = "Time-dependent Ginzburg-Landau solver (generalized SAV scheme)"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a configured simulation, writing time series and snapshots.
    Run(RunArgs),
    /// Temporal self-convergence study on a fixed mesh.
    Converge(ConvergeArgs),
    /// Run and check every step against the scheme's guarantees.
    Audit(AuditArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override the domain preset (square | multiconnected).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// Final time T.
    #[arg(long = "T")]
    t_final: Option<f64>,
    /// Mesh subdivisions.
    #[arg(long)]
    n: Option<usize>,
    /// Output directory.
    #[arg(long = "out")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated list of step sizes, e.g. 0.04,0.02,0.01.
    #[arg(long, value_delimiter = ',')]
    taus: Vec<f64>,
    /// Reference step size (must be below min(taus)/4).
    #[arg(long = "tau-ref")]
    tau_ref: f64,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    config: PathBuf,
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Solver { .. } => EXIT_SOLVER,
        Error::Io { .. } => EXIT_SOLVER,
        _ => EXIT_USAGE,
    }
}

fn exit_code_for_abort(abort: &RunAbort) -> i32 {
    exit_code_for(&abort.source)
}

pub fn main() -> i32 {
    run_cli(std::env::args_os())
}

pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match cli.cmd {
        Cmd::Run(args) => cmd_run(&args),
        Cmd::Converge(args) => cmd_converge(&args),
        Cmd::Audit(args) => cmd_audit(&args),
    }
}

fn run_overrides(args: &RunArgs) -> Vec<(String, String)> {
    let mut ov = Vec::new();
    if let Some(v) = &args.preset {
        ov.push(("preset".into(), v.clone()));
    }
    if let Some(v) = args.kappa {
        ov.push(("kappa".into(), v.to_string()));
    }
    if let Some(v) = args.tau {
        ov.push(("tau".into(), v.to_string()));
    }
    if let Some(v) = args.t_final {
        ov.push(("t_final".into(), v.to_string()));
    }
    if let Some(v) = args.n {
        ov.push(("n".into(), v.to_string()));
    }
    if let Some(v) = &args.out {
        ov.push(("out_dir".into(), v.display().to_string()));
    }
    ov
}

fn load_config(path: &std::path::Path, overrides: &[(String, String)]) -> Result<SimConfig, i32> {
    parse_config(path, overrides).map_err(|e| {
        eprintln!("error: {e}");
        exit_code_for(&e)
    })
}

fn cmd_run(args: &RunArgs) -> i32 {
    let config = match load_config(&args.config, &run_overrides(args)) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let out_dir = config
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("glsav_run"));
    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return EXIT_USAGE;
    }

    let started = Instant::now();
    let mut outputs: Vec<PathBuf> = Vec::new();
    let interval = config.snapshot_interval;
    let total_steps = (config.t_final / config.tau).round() as usize;
    let progress_every = if total_steps >= 500 {
        (total_steps / 10).max(1)
    } else {
        0
    };
    let run_result = run_with(&config, |sim, rep| {
        if progress_every > 0 && rep.sav.step % progress_every == 0 {
            eprintln!(
                "step {}/{total_steps}: t = {:.3}, energy = {:.6e}, max|psi| = {:.6}",
                rep.sav.step, rep.sav.time, rep.g_new.total, rep.max_psi
            );
        }
        if interval > 0 && rep.sav.step % interval == 0 {
            let path = out_dir.join(format!("snapshot_{:06}.vtk", rep.sav.step));
            write_snapshot(&sim.space, sim.psi(), sim.a(), &path)?;
            outputs.push(path);
        }
        Ok(())
    });

    let (result, sim) = match run_result {
        Ok(pair) => pair,
        Err(abort) => {
            eprintln!("error: {abort}");
            // Keep whatever was produced for diagnosis.
            let path = out_dir.join("timeseries_partial.csv");
            if write_timeseries(&abort.partial.reports, &path).is_ok() {
                eprintln!("partial series written to {}", path.display());
            }
            return exit_code_for_abort(&abort);
        }
    };

    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let series_path = out_dir.join("timeseries.csv");
    let final_path = out_dir.join("snapshot_final.vtk");
    let write_outputs = (|| -> crate::error::Result<()> {
        write_timeseries(&result.reports, &series_path)?;
        write_snapshot(&sim.space, sim.psi(), sim.a(), &final_path)?;
        Ok(())
    })();
    if let Err(e) = write_outputs {
        eprintln!("error: {e}");
        return exit_code_for(&e);
    }
    outputs.push(series_path);
    outputs.push(final_path);

    let audit = audit_result(&result, config.eta);
    let vortices = vortex_count(
        sim.psi(),
        &sim.space.mesh,
        &sim.space.dofmap,
        config.vortex_threshold,
    );
    let manifest = RunManifest {
        config: config.clone(),
        duration_seconds: started.elapsed().as_secs_f64(),
        audit: Some(audit.clone()),
        outputs,
        warnings: result.warnings.clone(),
    };
    let manifest_path = out_dir.join("manifest.txt");
    if let Err(e) = manifest.write(&manifest_path) {
        eprintln!("error: {e}");
        return exit_code_for(&e);
    }

    let final_energy = result
        .reports
        .last()
        .map(|r| r.g_new.total)
        .unwrap_or(result.initial_energy.total);
    println!(
        "completed {} steps to T = {} (tau = {})",
        result.steps,
        result.final_time(),
        result.tau
    );
    println!("final energy = {final_energy:.6e}");
    println!(
        "max |psi| over run = {:.6}",
        result
            .reports
            .iter()
            .map(|r| r.max_psi)
            .fold(0.0f64, f64::max)
    );
    println!(
        "vortex count at T (threshold {}) = {vortices}",
        config.vortex_threshold
    );
    println!("audit verdict = {}", if audit.pass() { "pass" } else { "fail" });
    println!("outputs in {}", out_dir.display());
    EXIT_OK
}

fn cmd_converge(args: &ConvergeArgs) -> i32 {
    let config = match load_config(&args.config, &[]) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if args.taus.is_empty() {
        eprintln!("error: --taus needs at least one value");
        return EXIT_USAGE;
    }
    let report = match temporal_convergence(&config, &args.taus, args.tau_ref) {
        Ok(r) => r,
        Err(abort) => {
            eprintln!("error: {abort}");
            return exit_code_for_abort(&abort);
        }
    };
    println!("reference tau = {}", report.tau_ref);
    println!(
        "{:>12} {:>14} {:>10} {:>14} {:>10}",
        "tau", "err_psi", "order", "err_A", "order"
    );
    for i in 0..report.taus.len() {
        let fmt_order = |o: Option<f64>| match o {
            Some(v) => format!("{v:.3}"),
            None => "-".into(),
        };
        let (po, ao) = if i == 0 {
            (None, None)
        } else {
            (report.psi_orders[i - 1], report.a_orders[i - 1])
        };
        println!(
            "{:>12.6} {:>14.6e} {:>10} {:>14.6e} {:>10}",
            report.taus[i],
            report.psi_errors[i],
            fmt_order(po),
            report.a_errors[i],
            fmt_order(ao)
        );
    }
    if let Some(dir) = &config.out_dir {
        if let Err(e) = std::fs::create_dir_all(dir) {
            eprintln!("error: cannot create {}: {e}", dir.display());
            return EXIT_USAGE;
        }
        let path = dir.join("convergence.csv");
        let mut s = String::from("tau,err_psi,order_psi,err_a,order_a\n");
        for i in 0..report.taus.len() {
            let o = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let (po, ao) = if i == 0 {
                (None, None)
            } else {
                (report.psi_orders[i - 1], report.a_orders[i - 1])
            };
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                report.taus[i],
                report.psi_errors[i],
                o(po),
                report.a_errors[i],
                o(ao)
            ));
        }
        if let Err(e) = std::fs::write(&path, s) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_SOLVER;
        }
        println!("table written to {}", path.display());
    }
    EXIT_OK
}

fn cmd_audit(args: &AuditArgs) -> i32 {
    let config = match load_config(&args.config, &[]) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let (summary, _result) = match crate::harness::audit_run(&config) {
        Ok(pair) => pair,
        Err(abort) => {
            eprintln!("error: {abort}");
            return exit_code_for_abort(&abort);
        }
    };
    for (k, v) in summary.key_values() {
        println!("{k}={v}");
    }
    if summary.pass() {
        EXIT_OK
    } else {
        EXIT_AUDIT
    }
}
