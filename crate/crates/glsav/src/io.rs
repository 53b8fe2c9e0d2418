//! Configuration files, CSV time series, VTK field snapshots and the run
//! manifest.
//!
//! The config format is flat `key = value` text with `#` comments. CLI flags
//! override file values; preset defaults fill whatever is left.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::assemble::FemSpace;
use crate::error::{Error, Result};
use crate::harness::{AuditSummary, DomainSpec, SimConfig};
use crate::sparse::Preconditioner;
use crate::stepper::StepReport;
use crate::system::{ComplexField, VectorField};

pub const CONFIG_KEYS: [&str; 19] = [
    "preset",
    "mesh_file",
    "n",
    "order",
    "kappa",
    "eta",
    "h",
    "tau",
    "t_final",
    "psi0_re",
    "psi0_im",
    "a0_x",
    "a0_y",
    "zeta_cap",
    "gmres_restart",
    "gmres_tol",
    "gmres_max_iter",
    "gmres_precond",
    "snapshot_interval",
];
// out_dir and vortex_threshold are also accepted; kept separate from the
// numeric block above only for readability of this table.
pub const CONFIG_KEYS_EXTRA: [&str; 2] = ["out_dir", "vortex_threshold"];

/// Parse `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn read_config_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`, got `{line}`", i + 1))
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Resolve a full configuration from file pairs plus CLI overrides (which
/// win on conflicts). The preset supplies defaults; explicit keys override.
pub fn resolve_config(
    file_pairs: &[(String, String)],
    overrides: &[(String, String)],
) -> Result<SimConfig> {
    let known: HashSet<&str> = CONFIG_KEYS
        .iter()
        .chain(CONFIG_KEYS_EXTRA.iter())
        .copied()
        .collect();
    let mut merged: Vec<(String, String)> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (k, v) in file_pairs {
        if !known.contains(k.as_str()) {
            return Err(Error::Config(format!("unknown key `{k}`")));
        }
        if !seen.insert(k.clone()) {
            return Err(Error::Config(format!("duplicate key `{k}`")));
        }
        merged.push((k.clone(), v.clone()));
    }
    for (k, v) in overrides {
        if !known.contains(k.as_str()) {
            return Err(Error::Config(format!("unknown key `{k}`")));
        }
        merged.retain(|(mk, _)| mk != k);
        merged.push((k.clone(), v.clone()));
    }

    let get = |key: &str| merged.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let parse_f64 = |key: &str| -> Result<Option<f64>> {
        match get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::Config(format!("key `{key}`: unparseable number `{v}`"))),
        }
    };
    let parse_usize = |key: &str| -> Result<Option<usize>> {
        match get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| Error::Config(format!("key `{key}`: unparseable integer `{v}`"))),
        }
    };

    let preset = get("preset")
        .ok_or_else(|| Error::Config("missing required key `preset`".into()))?;
    let kappa = parse_f64("kappa")?
        .ok_or_else(|| Error::Config("missing required key `kappa`".into()))?;
    let mut config = match preset {
        "square" => SimConfig::square(kappa),
        "multiconnected" => SimConfig::multiconnected(kappa),
        "custom" => {
            let path = get("mesh_file").ok_or_else(|| {
                Error::Config("missing required key `mesh_file` (preset = custom)".into())
            })?;
            let h = parse_f64("h")?.ok_or_else(|| {
                Error::Config("missing required key `h` (preset = custom)".into())
            })?;
            let mut c = SimConfig::square(kappa);
            c.domain = DomainSpec::MeshFile {
                path: PathBuf::from(path),
            };
            c.h_applied = h;
            c
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset `{other}` (expected square, multiconnected or custom)"
            )))
        }
    };

    if let Some(n) = parse_usize("n")? {
        match &mut config.domain {
            DomainSpec::Square { n: m } | DomainSpec::Multiconnected { n: m } => *m = n,
            DomainSpec::MeshFile { .. } => {
                return Err(Error::Config(
                    "key `n` does not apply to preset = custom".into(),
                ))
            }
        }
    }
    if let Some(v) = parse_usize("order")? {
        config.order = v;
    }
    if let Some(v) = parse_f64("eta")? {
        config.eta = v;
    }
    if preset != "custom" {
        if let Some(v) = parse_f64("h")? {
            config.h_applied = v;
        }
    }
    if let Some(v) = parse_f64("tau")? {
        config.tau = v;
    }
    if let Some(v) = parse_f64("t_final")? {
        config.t_final = v;
    }
    if let Some(v) = parse_f64("psi0_re")? {
        config.psi0.re = v;
    }
    if let Some(v) = parse_f64("psi0_im")? {
        config.psi0.im = v;
    }
    if let Some(v) = parse_f64("a0_x")? {
        config.a0[0] = v;
    }
    if let Some(v) = parse_f64("a0_y")? {
        config.a0[1] = v;
    }
    if let Some(v) = parse_f64("zeta_cap")? {
        config.zeta_cap = v;
    }
    if let Some(v) = parse_usize("gmres_restart")? {
        config.gmres.restart = v;
    }
    if let Some(v) = parse_f64("gmres_tol")? {
        config.gmres.rel_tol = v;
    }
    if let Some(v) = parse_usize("gmres_max_iter")? {
        config.gmres.max_iters = v;
    }
    if let Some(v) = get("gmres_precond") {
        config.gmres.preconditioner = match v {
            "none" => Preconditioner::None,
            "jacobi" => Preconditioner::Jacobi,
            other => {
                return Err(Error::Config(format!(
                    "key `gmres_precond`: expected none or jacobi, got `{other}`"
                )))
            }
        };
    }
    if let Some(v) = parse_usize("snapshot_interval")? {
        config.snapshot_interval = v;
    }
    if let Some(v) = get("out_dir") {
        config.out_dir = Some(PathBuf::from(v));
    }
    if let Some(v) = parse_f64("vortex_threshold")? {
        config.vortex_threshold = v;
    }
    config.validate()?;
    Ok(config)
}

/// Load and resolve a config file with CLI overrides applied on top.
pub fn parse_config(path: &Path, overrides: &[(String, String)]) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let pairs = read_config_pairs(&text)?;
    resolve_config(&pairs, overrides)
}

/// Config echo in the same `key = value` format `parse_config` accepts.
pub fn config_to_pairs(config: &SimConfig) -> Vec<(String, String)> {
    let mut kv: Vec<(String, String)> = Vec::new();
    match &config.domain {
        DomainSpec::Square { n } => {
            kv.push(("preset".into(), "square".into()));
            kv.push(("n".into(), n.to_string()));
        }
        DomainSpec::Multiconnected { n } => {
            kv.push(("preset".into(), "multiconnected".into()));
            kv.push(("n".into(), n.to_string()));
        }
        DomainSpec::MeshFile { path } => {
            kv.push(("preset".into(), "custom".into()));
            kv.push(("mesh_file".into(), path.display().to_string()));
        }
    }
    kv.push(("order".into(), config.order.to_string()));
    kv.push(("kappa".into(), fmt_f64(config.kappa)));
    kv.push(("eta".into(), fmt_f64(config.eta)));
    kv.push(("h".into(), fmt_f64(config.h_applied)));
    kv.push(("tau".into(), fmt_f64(config.tau)));
    kv.push(("t_final".into(), fmt_f64(config.t_final)));
    kv.push(("psi0_re".into(), fmt_f64(config.psi0.re)));
    kv.push(("psi0_im".into(), fmt_f64(config.psi0.im)));
    kv.push(("a0_x".into(), fmt_f64(config.a0[0])));
    kv.push(("a0_y".into(), fmt_f64(config.a0[1])));
    kv.push(("zeta_cap".into(), fmt_f64(config.zeta_cap)));
    kv.push(("gmres_restart".into(), config.gmres.restart.to_string()));
    kv.push(("gmres_tol".into(), fmt_f64(config.gmres.rel_tol)));
    kv.push(("gmres_max_iter".into(), config.gmres.max_iters.to_string()));
    kv.push((
        "gmres_precond".into(),
        match config.gmres.preconditioner {
            Preconditioner::None => "none".into(),
            Preconditioner::Jacobi => "jacobi".to_string(),
        },
    ));
    kv.push((
        "snapshot_interval".into(),
        config.snapshot_interval.to_string(),
    ));
    if let Some(dir) = &config.out_dir {
        kv.push(("out_dir".into(), dir.display().to_string()));
    }
    kv.push(("vortex_threshold".into(), fmt_f64(config.vortex_threshold)));
    kv
}

/// 17 significant digits: enough to reproduce any f64 bit-exactly.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

// ---------------------------------------------------------------------------
// Time series CSV
// ---------------------------------------------------------------------------

pub const TIMESERIES_HEADER: &str = "step,t,energy,kinetic,condensation,magnetic,gauge,r,\
tilde_r,zeta,xi,case_id,max_psi,gmres_psi_iters,gmres_A_iters";

/// One CSV row of the per-step series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeseriesRow {
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub condensation: f64,
    pub magnetic: f64,
    pub gauge: f64,
    pub r: f64,
    pub tilde_r: f64,
    pub zeta: f64,
    pub xi: f64,
    pub case_id: u8,
    pub max_psi: f64,
    pub gmres_psi_iters: usize,
    pub gmres_a_iters: usize,
}

pub fn rows_from_reports(reports: &[StepReport]) -> Vec<TimeseriesRow> {
    reports
        .iter()
        .map(|rep| TimeseriesRow {
            step: rep.sav.step,
            t: rep.sav.time,
            energy: rep.g_new.total,
            kinetic: rep.g_new.kinetic,
            condensation: rep.g_new.condensation,
            magnetic: rep.g_new.magnetic,
            gauge: rep.g_new.gauge,
            r: rep.sav.r,
            tilde_r: rep.sav.tilde_r,
            zeta: rep.sav.zeta,
            xi: rep.sav.xi,
            case_id: rep.sav.case_id,
            max_psi: rep.max_psi,
            gmres_psi_iters: rep.psi_iterations,
            gmres_a_iters: rep.a_iterations,
        })
        .collect()
}

pub fn timeseries_to_string(rows: &[TimeseriesRow]) -> String {
    let mut s = String::with_capacity(64 + rows.len() * 300);
    s.push_str(TIMESERIES_HEADER);
    s.push('\n');
    for row in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.step,
            fmt_f64(row.t),
            fmt_f64(row.energy),
            fmt_f64(row.kinetic),
            fmt_f64(row.condensation),
            fmt_f64(row.magnetic),
            fmt_f64(row.gauge),
            fmt_f64(row.r),
            fmt_f64(row.tilde_r),
            fmt_f64(row.zeta),
            fmt_f64(row.xi),
            row.case_id,
            fmt_f64(row.max_psi),
            row.gmres_psi_iters,
            row.gmres_a_iters,
        );
    }
    s
}

pub fn write_timeseries(reports: &[StepReport], path: impl AsRef<Path>) -> Result<()> {
    let rows = rows_from_reports(reports);
    std::fs::write(path.as_ref(), timeseries_to_string(&rows))
        .map_err(|e| Error::io(path.as_ref(), e))
}

pub fn read_timeseries(path: impl AsRef<Path>) -> Result<Vec<TimeseriesRow>> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
    parse_timeseries(&text)
}

pub fn parse_timeseries(text: &str) -> Result<Vec<TimeseriesRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TIMESERIES_HEADER => {}
        other => {
            return Err(Error::Config(format!(
                "bad time series header: {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 15 {
            return Err(Error::Config(format!(
                "time series line {}: expected 15 fields, got {}",
                i + 2,
                f.len()
            )));
        }
        let bad = |what: &str| Error::Config(format!("time series line {}: bad {what}", i + 2));
        let pf = |s: &str, what: &str| s.parse::<f64>().map_err(|_| bad(what));
        rows.push(TimeseriesRow {
            step: f[0].parse().map_err(|_| bad("step"))?,
            t: pf(f[1], "t")?,
            energy: pf(f[2], "energy")?,
            kinetic: pf(f[3], "kinetic")?,
            condensation: pf(f[4], "condensation")?,
            magnetic: pf(f[5], "magnetic")?,
            gauge: pf(f[6], "gauge")?,
            r: pf(f[7], "r")?,
            tilde_r: pf(f[8], "tilde_r")?,
            zeta: pf(f[9], "zeta")?,
            xi: pf(f[10], "xi")?,
            case_id: f[11].parse().map_err(|_| bad("case_id"))?,
            max_psi: pf(f[12], "max_psi")?,
            gmres_psi_iters: f[13].parse().map_err(|_| bad("gmres_psi_iters"))?,
            gmres_a_iters: f[14].parse().map_err(|_| bad("gmres_A_iters"))?,
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// VTK snapshots (legacy ASCII unstructured grid)
// ---------------------------------------------------------------------------

/// Field snapshot with point data psi_re, psi_im, psi_abs, A_x, A_y. P2
/// fields are written at all dofs, each triangle subdivided into four.
pub fn snapshot_to_string(space: &FemSpace, psi: &ComplexField, a: &VectorField) -> String {
    let n = space.n_dofs();
    let order = space.dofmap.order;
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    s.push_str("glsav field snapshot\n");
    s.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {n} double");
    for p in &space.dofmap.coords {
        let _ = writeln!(s, "{} {} 0", fmt_f64(p[0]), fmt_f64(p[1]));
    }
    let cells: Vec<[usize; 3]> = if order == 1 {
        space.mesh.triangles.clone()
    } else {
        let mut cells = Vec::with_capacity(4 * space.mesh.n_triangles());
        for d in &space.dofmap.tri_dofs {
            cells.push([d[0], d[3], d[5]]);
            cells.push([d[1], d[4], d[3]]);
            cells.push([d[2], d[5], d[4]]);
            cells.push([d[3], d[4], d[5]]);
        }
        cells
    };
    let _ = writeln!(s, "CELLS {} {}", cells.len(), 4 * cells.len());
    for c in &cells {
        let _ = writeln!(s, "3 {} {} {}", c[0], c[1], c[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {}", cells.len());
    for _ in &cells {
        s.push_str("5\n");
    }
    let _ = writeln!(s, "POINT_DATA {n}");
    let scalar = |s: &mut String, name: &str, values: &mut dyn Iterator<Item = f64>| {
        let _ = writeln!(s, "SCALARS {name} double 1");
        s.push_str("LOOKUP_TABLE default\n");
        for v in values {
            let _ = writeln!(s, "{}", fmt_f64(v));
        }
    };
    scalar(&mut s, "psi_re", &mut psi.coeffs.iter().map(|c| c.re));
    scalar(&mut s, "psi_im", &mut psi.coeffs.iter().map(|c| c.im));
    scalar(&mut s, "psi_abs", &mut psi.coeffs.iter().map(|c| c.norm()));
    scalar(&mut s, "A_x", &mut a.x.iter().copied());
    scalar(&mut s, "A_y", &mut a.y.iter().copied());
    s
}

pub fn write_snapshot(
    space: &FemSpace,
    psi: &ComplexField,
    a: &VectorField,
    path: impl AsRef<Path>,
) -> Result<()> {
    std::fs::write(path.as_ref(), snapshot_to_string(space, psi, a))
        .map_err(|e| Error::io(path.as_ref(), e))
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config: SimConfig,
    pub duration_seconds: f64,
    pub audit: Option<AuditSummary>,
    pub outputs: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn to_string_report(&self) -> String {
        let mut s = String::new();
        s.push_str("# glsav run manifest\n");
        let _ = writeln!(s, "version = {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "duration_seconds = {}", fmt_f64(self.duration_seconds));
        for w in &self.warnings {
            let _ = writeln!(s, "# warning: {w}");
        }
        for note in &self.config.provenance {
            let _ = writeln!(s, "# provenance: {note}");
        }
        s.push_str("# resolved configuration (strip the `config.` prefix to rerun)\n");
        for (k, v) in config_to_pairs(&self.config) {
            let _ = writeln!(s, "config.{k} = {v}");
        }
        if let Some(audit) = &self.audit {
            for (k, v) in audit.key_values() {
                let _ = writeln!(s, "audit.{k} = {v}");
            }
        }
        for out in &self.outputs {
            let _ = writeln!(s, "output = {}", out.display());
        }
        s
    }

    /// Write the manifest after verifying every listed output exists.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        for out in &self.outputs {
            if !out.exists() {
                return Err(Error::InvalidArgument(format!(
                    "manifest lists missing output file {}",
                    out.display()
                )));
            }
        }
        std::fs::write(path.as_ref(), self.to_string_report())
            .map_err(|e| Error::io(path.as_ref(), e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::unit_square_mesh;
    use crate::observables::EnergyBreakdown;
    use crate::stepper::{SavState, StepFlags};
    use num_complex::Complex64;

    fn demo_report(step: usize) -> StepReport {
        StepReport {
            sav: SavState {
                r: 1.0 / (step as f64 + 1.0),
                tilde_r: 0.9,
                zeta: 1.0 + 1e-3,
                xi: 1.0 - 1e-6,
                alpha0: 0.0,
                gamma: 0.25,
                case_id: 3,
                step,
                time: step as f64 * 0.01,
            },
            g_bar: 1.01,
            g_new: EnergyBreakdown {
                kinetic: 0.1,
                condensation: 0.2,
                magnetic: 0.3,
                gauge: 0.4,
                total: 1.0,
            },
            k_bar: 3.0,
            k_new: 2.5,
            max_psi: 0.999,
            psi_iterations: 12,
            a_iterations: 34,
            flags: StepFlags::default(),
        }
    }

    #[test]
    fn config_resolution_square_preset() {
        let pairs = read_config_pairs("preset = square\nkappa = 10\n").unwrap();
        let c = resolve_config(&pairs, &[]).unwrap();
        assert_eq!(c.domain, DomainSpec::Square { n: 40 });
        assert_eq!(c.kappa, 10.0);
        assert_eq!(c.h_applied, 3.5);
        assert_eq!(c.tau, 0.01);
        assert_eq!(c.t_final, 20.0);
    }

    #[test]
    fn config_rejects_bad_values() {
        let pairs = read_config_pairs("preset = square\nkappa = 10\ntau = 0\n").unwrap();
        assert!(matches!(resolve_config(&pairs, &[]), Err(Error::Config(_))));
        let pairs = read_config_pairs("preset = square\nkappa = ten\n").unwrap();
        let err = resolve_config(&pairs, &[]).unwrap_err();
        assert!(err.to_string().contains("kappa"), "{err}");
        let pairs = read_config_pairs("preset = square\nkappa = 1\nwhatever = 3\n").unwrap();
        let err = resolve_config(&pairs, &[]).unwrap_err();
        assert!(err.to_string().contains("whatever"), "{err}");
        let pairs = read_config_pairs("kappa = 1\n").unwrap();
        let err = resolve_config(&pairs, &[]).unwrap_err();
        assert!(err.to_string().contains("preset"), "{err}");
    }

    #[test]
    fn cli_flags_override_file_values() {
        let pairs = read_config_pairs("preset = square\nkappa = 10\ntau = 0.01\n").unwrap();
        let c = resolve_config(&pairs, &[("tau".into(), "0.005".into())]).unwrap();
        assert_eq!(c.tau, 0.005);
    }

    #[test]
    fn config_echo_round_trips() {
        let mut config = SimConfig::multiconnected(30.0);
        config.tau = 0.0125;
        config.out_dir = Some(PathBuf::from("runs/demo"));
        let pairs = config_to_pairs(&config);
        let back = resolve_config(&pairs, &[]).unwrap();
        assert_eq!(back.domain, config.domain);
        assert_eq!(back.kappa, config.kappa);
        assert_eq!(back.tau, config.tau);
        assert_eq!(back.h_applied, config.h_applied);
        assert_eq!(back.out_dir, config.out_dir);
    }

    #[test]
    fn empty_series_is_header_only() {
        let s = timeseries_to_string(&[]);
        assert_eq!(s.trim_end(), TIMESERIES_HEADER);
        assert_eq!(s.lines().count(), 1);
    }

    #[test]
    fn three_step_series_has_four_lines() {
        let reports: Vec<StepReport> = (1..=3).map(demo_report).collect();
        let rows = rows_from_reports(&reports);
        let s = timeseries_to_string(&rows);
        assert_eq!(s.lines().count(), 4);
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.csv");
        let mut reports: Vec<StepReport> = (1..=5).map(demo_report).collect();
        // Values with awkward binary expansions.
        reports[2].sav.r = 1.0 / 3.0;
        reports[2].g_new.total = f64::from_bits(0x3FF123456789ABCD);
        reports[2].sav.time = 0.1 + 0.2;
        write_timeseries(&reports, &path).unwrap();
        let rows = read_timeseries(&path).unwrap();
        assert_eq!(rows, rows_from_reports(&reports));
        assert_eq!(rows[2].energy.to_bits(), reports[2].g_new.total.to_bits());
    }

    #[test]
    fn snapshot_p1_smallest_mesh() {
        let space = FemSpace::new(unit_square_mesh(1).unwrap(), 1).unwrap();
        let psi = ComplexField::constant(4, Complex64::new(0.8, 0.6));
        let a = VectorField::zeros(4);
        let text = snapshot_to_string(&space, &psi, &a);
        assert!(text.contains("POINTS 4 double"));
        assert!(text.contains("CELLS 2 8"));
        // Every psi_abs value is 1.
        let abs_section = text.split("SCALARS psi_abs double 1").nth(1).unwrap();
        let values: Vec<f64> = abs_section
            .lines()
            .skip(2) // remainder of the split line, then LOOKUP_TABLE
            .take(4)
            .map(|l| l.parse().unwrap())
            .collect();
        for v in values {
            assert!((v - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn snapshot_p2_point_count_equals_dof_count() {
        let space = FemSpace::new(unit_square_mesh(2).unwrap(), 2).unwrap();
        let n = space.n_dofs();
        let psi = ComplexField::zeros(n);
        let a = VectorField::zeros(n);
        let text = snapshot_to_string(&space, &psi, &a);
        assert!(text.contains(&format!("POINTS {n} double")));
        // Four subcells per triangle.
        assert!(text.contains(&format!("CELLS {} ", 4 * space.mesh.n_triangles())));
    }

    #[test]
    fn manifest_requires_outputs_to_exist() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("series.csv");
        let manifest = RunManifest {
            config: SimConfig::square(1.0),
            duration_seconds: 0.5,
            audit: None,
            outputs: vec![out.clone()],
            warnings: vec![],
        };
        let path = dir.path().join("manifest.txt");
        assert!(manifest.write(&path).is_err());
        std::fs::write(&out, "x").unwrap();
        manifest.write(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("config.preset = square"));
        assert!(text.contains("version = "));
    }
}
