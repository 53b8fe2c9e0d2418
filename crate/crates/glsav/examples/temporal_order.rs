//! Temporal self-convergence of the scheme: rerun one configuration with a
//! ladder of step sizes against a fine Richardson reference and report the
//! observed orders (first order in tau once tau resolves the initial
//! magnetic quench).
//!
//!     cargo run --release --example temporal_order
//!     cargo run --release --example temporal_order -- --coarse

use glsav::{temporal_convergence, SimConfig};

fn main() {
    let coarse = std::env::args().any(|a| a == "--coarse");
    let base = SimConfig::square(5.0).scaled(8, 0.5);
    // The coarse ladder includes tau = 0.04, where the first step's
    // auxiliary-variable overshoot still dominates the error; the default
    // ladder sits inside the first-order regime.
    let (taus, tau_ref): (Vec<f64>, f64) = if coarse {
        (vec![0.04, 0.02, 0.01], 0.00125)
    } else {
        (vec![0.01, 0.005, 0.0025], 0.0003125)
    };
    println!(
        "square domain, kappa = {}, n = 8, T = {}, reference tau = {tau_ref}",
        base.kappa, base.t_final
    );
    let report = match temporal_convergence(&base, &taus, tau_ref) {
        Ok(r) => r,
        Err(abort) => {
            eprintln!("study aborted: {abort}");
            std::process::exit(2);
        }
    };
    println!(
        "\n{:>10} {:>13} {:>7} {:>13} {:>7}",
        "tau", "err_psi", "order", "err_A", "order"
    );
    for i in 0..report.taus.len() {
        let fmt = |o: Option<f64>| o.map_or("-".to_string(), |v| format!("{v:.3}"));
        let (po, ao) = if i == 0 {
            (None, None)
        } else {
            (report.psi_orders[i - 1], report.a_orders[i - 1])
        };
        println!(
            "{:>10.6} {:>13.6e} {:>7} {:>13.6e} {:>7}",
            report.taus[i],
            report.psi_errors[i],
            fmt(po),
            report.a_errors[i],
            fmt(ao)
        );
    }
}
