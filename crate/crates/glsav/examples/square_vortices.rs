//! Vortex formation in the unit square under an applied field H = 3.5.
//!
//! By default this runs a desk-scale version (n = 16, T = 2) that finishes
//! in seconds. Pass `--full` for the full-resolution run (n = 40, T = 20,
//! roughly 2000 steps) and `--kappa <value>` to change the GL parameter:
//! kappa = 1 stays vortex-free, kappa = 10 settles into four vortices.
//!
//!     cargo run --release --example square_vortices -- --kappa 10
//!     cargo run --release --example square_vortices -- --kappa 10 --full

use glsav::{audit_result, run, vortex_count, SimConfig};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut kappa = 10.0;
    let mut full = false;
    let mut i = 0;
    while i < args.len() {
        match args[i].as_str() {
            "--kappa" => {
                kappa = args[i + 1].parse().expect("numeric --kappa");
                i += 2;
            }
            "--full" => {
                full = true;
                i += 1;
            }
            other => panic!("unknown argument {other}"),
        }
    }

    let config = if full {
        SimConfig::square(kappa)
    } else {
        SimConfig::square(kappa).scaled(16, 2.0)
    };
    println!(
        "unit square, kappa = {kappa}, H = {}, n = {:?}, tau = {}, T = {}",
        config.h_applied, config.domain, config.tau, config.t_final
    );

    let (result, sim) = match run(&config) {
        Ok(pair) => pair,
        Err(abort) => {
            eprintln!("aborted: {abort}");
            std::process::exit(2);
        }
    };

    println!("\n{:>8} {:>12} {:>12} {:>10} {:>8}", "t", "energy", "r", "max|psi|", "case");
    let stride = (result.reports.len() / 10).max(1);
    for rep in result.reports.iter().step_by(stride) {
        println!(
            "{:>8.2} {:>12.5e} {:>12.5e} {:>10.6} {:>8}",
            rep.sav.time, rep.g_new.total, rep.sav.r, rep.max_psi, rep.sav.case_id
        );
    }

    let vortices = vortex_count(
        sim.psi(),
        &sim.space.mesh,
        &sim.space.dofmap,
        config.vortex_threshold,
    );
    let audit = audit_result(&result, config.eta);
    println!("\nvortices at T = {vortices} (threshold {})", config.vortex_threshold);
    println!(
        "energy decayed {:.4e} -> {:.4e}",
        result.initial_energy.total,
        result.reports.last().map(|r| r.g_new.total).unwrap_or(0.0)
    );
    println!("invariant audit: {}", if audit.pass() { "pass" } else { "FAIL" });
}
