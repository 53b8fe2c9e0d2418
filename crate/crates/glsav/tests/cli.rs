//! End-to-end checks of the `glsav` binary: exit codes, output files and
//! determinism of the CSV series.

use std::path::Path;
use std::process::Command;

fn glsav() -> Command {
    Command::new(env!("CARGO_BIN_EXE_glsav"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.txt");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn usage_errors_exit_with_code_one() {
    let status = glsav().arg("frobnicate").output().unwrap();
    assert_eq!(status.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "preset = square\nkappa = 1\ntau = 0\n");
    let out = glsav().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("tau"), "stderr: {stderr}");

    let out = glsav()
        .args(["run", "--config", "/nonexistent/config.txt"])
        .output()
        .unwrap();
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn run_writes_outputs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "preset = square\nkappa = 5\nn = 4\nt_final = 0.05\nsnapshot_interval = 2\n",
    );
    let out1 = dir.path().join("run1");
    let out2 = dir.path().join("run2");
    for out_dir in [&out1, &out2] {
        let out = glsav()
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out_dir)
            .output()
            .unwrap();
        assert_eq!(
            out.status.code(),
            Some(0),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(out_dir.join("timeseries.csv").exists());
        assert!(out_dir.join("snapshot_final.vtk").exists());
        assert!(out_dir.join("snapshot_000002.vtk").exists());
        assert!(out_dir.join("manifest.txt").exists());
    }
    let csv1 = std::fs::read(out1.join("timeseries.csv")).unwrap();
    let csv2 = std::fs::read(out2.join("timeseries.csv")).unwrap();
    assert_eq!(csv1, csv2, "series must be bit-identical across reruns");

    let manifest = std::fs::read_to_string(out1.join("manifest.txt")).unwrap();
    assert!(manifest.contains("config.preset = square"));
    assert!(manifest.contains("audit.verdict = pass"));
    // Every listed output exists.
    for line in manifest.lines().filter(|l| l.starts_with("output = ")) {
        let path = line.trim_start_matches("output = ");
        assert!(Path::new(path).exists(), "missing {path}");
    }
}

#[test]
fn flag_overrides_beat_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "preset = square\nkappa = 5\nn = 4\nt_final = 0.04\ntau = 0.01\nsnapshot_interval = 0\n",
    );
    let out_dir = dir.path().join("out");
    let out = glsav()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--tau", "0.005"])
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let manifest = std::fs::read_to_string(out_dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("config.tau = 5.0000000000000001e-3"), "{manifest}");
    // 0.04 / 0.005 = 8 steps in the series (header + 8 rows).
    let csv = std::fs::read_to_string(out_dir.join("timeseries.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
}

#[test]
fn audit_command_reports_and_exits_zero_on_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "preset = square\nkappa = 10\nn = 4\nt_final = 0.1\n",
    );
    let out = glsav().args(["audit", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("verdict=pass"), "{stdout}");
    assert!(stdout.contains("max_bound.failed=0"));
    assert!(stdout.contains("energy.failed=0"));
}

#[test]
fn converge_command_prints_order_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "preset = square\nkappa = 5\nn = 4\nt_final = 0.1\n",
    );
    let out = glsav()
        .args(["converge", "--config"])
        .arg(&cfg)
        .args(["--taus", "0.01,0.005", "--tau-ref", "0.001"])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("err_psi"), "{stdout}");
    assert!(stdout.lines().count() >= 4);

    // A reference that is too coarse is a usage error.
    let out = glsav()
        .args(["converge", "--config"])
        .arg(&cfg)
        .args(["--taus", "0.01", "--tau-ref", "0.005"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn custom_mesh_preset_runs_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = glsav::unit_square_mesh(3).unwrap();
    let mesh_path = dir.path().join("mesh.txt");
    mesh.write_file(&mesh_path).unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(
            "preset = custom\nmesh_file = {}\nkappa = 2\nh = 1.0\nt_final = 0.02\nsnapshot_interval = 0\n",
            mesh_path.display()
        ),
    );
    let out_dir = dir.path().join("out");
    let out = glsav()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("timeseries.csv").exists());
}
