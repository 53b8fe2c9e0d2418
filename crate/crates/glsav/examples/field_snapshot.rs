//! Run a short simulation and write its outputs: the per-step CSV series
//! (energy split, auxiliary scalar, tracking factors, |psi| bound, solver
//! iterations) and a legacy-ASCII VTK snapshot of the final fields for
//! contour plotting in ParaView or similar.
//!
//!     cargo run --release --example field_snapshot

use glsav::io::{rows_from_reports, timeseries_to_string, write_snapshot, write_timeseries};
use glsav::{run, SimConfig};

fn main() {
    let config = SimConfig::square(10.0).scaled(16, 1.0);
    let (result, sim) = match run(&config) {
        Ok(pair) => pair,
        Err(abort) => {
            eprintln!("aborted: {abort}");
            std::process::exit(2);
        }
    };

    let dir = std::env::temp_dir().join("glsav_snapshot_demo");
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("timeseries.csv");
    let vtk = dir.join("final.vtk");
    write_timeseries(&result.reports, &csv).unwrap();
    write_snapshot(&sim.space, sim.psi(), sim.a(), &vtk).unwrap();

    println!("wrote {}", csv.display());
    println!("wrote {}", vtk.display());
    let text = timeseries_to_string(&rows_from_reports(&result.reports));
    println!("\nCSV header:\n{}", text.lines().next().unwrap());
    println!("last row:\n{}", text.lines().last().unwrap());
    println!(
        "\nsnapshot points = {} (P2 dof count), cells = {} (4 per triangle)",
        sim.space.n_dofs(),
        4 * sim.space.mesh.n_triangles()
    );
}
