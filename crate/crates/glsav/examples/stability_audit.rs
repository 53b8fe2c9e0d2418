//! Per-step audit of the scheme's guarantees on a scaled run: the nodal
//! bound |psi| <= 1, monotone auxiliary variable, case-resolved energy
//! dissipation, and the two algebraic identities of the auxiliary updates.
//!
//!     cargo run --release --example stability_audit
//!     cargo run --release --example stability_audit -- --kappa 20

use glsav::{audit_run, SimConfig};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut kappa = 10.0;
    let mut i = 0;
    while i < args.len() {
        match args[i].as_str() {
            "--kappa" => {
                kappa = args[i + 1].parse().expect("numeric --kappa");
                i += 2;
            }
            other => panic!("unknown argument {other}"),
        }
    }
    let config = SimConfig::square(kappa).scaled(16, 2.0);
    println!("auditing: square, kappa = {kappa}, n = 16, T = 2, tau = {}\n", config.tau);
    let (summary, result) = match audit_run(&config) {
        Ok(pair) => pair,
        Err(abort) => {
            eprintln!("aborted: {abort}");
            std::process::exit(2);
        }
    };
    for (k, v) in summary.key_values() {
        println!("{k}={v}");
    }
    let cases: [usize; 4] = result.reports.iter().fold([0; 4], |mut acc, r| {
        acc[(r.sav.case_id - 1) as usize] += 1;
        acc
    });
    println!("\nrelaxation cases 1/2/3/4: {}/{}/{}/{}", cases[0], cases[1], cases[2], cases[3]);
    std::process::exit(if summary.pass() { 0 } else { 3 });
}
