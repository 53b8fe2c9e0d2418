//! Run configuration, experiment presets, the temporal self-convergence
//! study and the per-step invariant audit.

use std::path::PathBuf;

use num_complex::Complex64;

use crate::assemble::FemSpace;
use crate::error::{Error, Result};
use crate::mesh::{multiconnected_mesh, unit_square_mesh, Mesh};
use crate::sparse::{GmresConfig, SparseMatrix};
use crate::stepper::{run, RunAbort, SimResult};
use crate::system::PhysParams;

#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Square { n: usize },
    Multiconnected { n: usize },
    MeshFile { path: PathBuf },
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub domain: DomainSpec,
    pub order: usize,
    pub kappa: f64,
    pub eta: f64,
    pub h_applied: f64,
    pub tau: f64,
    pub t_final: f64,
    pub psi0: Complex64,
    pub a0: [f64; 2],
    pub zeta_cap: f64,
    pub gmres: GmresConfig,
    /// Steps between field snapshots (0 = final state only).
    pub snapshot_interval: usize,
    pub out_dir: Option<PathBuf>,
    pub vortex_threshold: f64,
    /// Notes on where parameter values come from.
    pub provenance: Vec<String>,
}

impl SimConfig {
    fn base(domain: DomainSpec, kappa: f64, h_applied: f64) -> Self {
        SimConfig {
            domain,
            order: 2,
            kappa,
            eta: 1.0,
            h_applied,
            tau: 0.01,
            t_final: 20.0,
            psi0: Complex64::new(0.8, 0.6),
            a0: [0.0, 0.0],
            zeta_cap: 1.0 + 3.0f64.sqrt(),
            gmres: GmresConfig::default(),
            snapshot_interval: 100,
            out_dir: None,
            vortex_threshold: 0.3,
            provenance: Vec::new(),
        }
    }

    /// Unit-square vortex experiment: H = 3.5, h = sqrt(2)/40, tau = 0.01,
    /// T = 20, psi0 = 0.8 + 0.6i, A0 = 0.
    pub fn square(kappa: f64) -> Self {
        Self::base(DomainSpec::Square { n: 40 }, kappa, 3.5)
    }

    /// Multi-connected-domain experiment: H = 5.0, otherwise as the square
    /// preset. The mesh resolution n = 24 is a solver default, not a
    /// published value.
    pub fn multiconnected(kappa: f64) -> Self {
        let mut c = Self::base(DomainSpec::Multiconnected { n: 24 }, kappa, 5.0);
        c.provenance
            .push("multiconnected mesh resolution n=24 is a solver default".into());
        c
    }

    /// Desk-scale override: coarser mesh and shorter horizon.
    pub fn scaled(mut self, n: usize, t_final: f64) -> Self {
        match &mut self.domain {
            DomainSpec::Square { n: m } | DomainSpec::Multiconnected { n: m } => *m = n,
            DomainSpec::MeshFile { .. } => {}
        }
        self.t_final = t_final;
        self.provenance
            .push(format!("scaled run: n={n}, T={t_final}"));
        self
    }

    pub fn phys_params(&self) -> PhysParams {
        PhysParams {
            kappa: self.kappa,
            eta: self.eta,
            h_applied: self.h_applied,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.phys_params().validate()?;
        if self.order != 1 && self.order != 2 {
            return Err(Error::Config(format!(
                "order must be 1 or 2, got {}",
                self.order
            )));
        }
        if !(self.tau > 0.0) {
            return Err(Error::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.t_final >= 0.0) {
            return Err(Error::Config(format!(
                "t_final must be nonnegative, got {}",
                self.t_final
            )));
        }
        if !(self.zeta_cap > 0.0) {
            return Err(Error::Config(format!(
                "zeta_cap must be positive, got {}",
                self.zeta_cap
            )));
        }
        if !(self.vortex_threshold > 0.0 && self.vortex_threshold < 1.0) {
            return Err(Error::Config(format!(
                "vortex_threshold must lie in (0, 1), got {}",
                self.vortex_threshold
            )));
        }
        if self.gmres.restart == 0 || !(self.gmres.rel_tol > 0.0) || self.gmres.max_iters == 0 {
            return Err(Error::Config("invalid gmres settings".into()));
        }
        match &self.domain {
            DomainSpec::Square { n } if *n == 0 => {
                Err(Error::Config("square mesh needs n >= 1".into()))
            }
            DomainSpec::Multiconnected { n } if *n < 3 || n % 3 != 0 => Err(Error::Config(
                format!("multiconnected mesh needs n divisible by 3, got {n}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn build_mesh(&self) -> Result<Mesh> {
        match &self.domain {
            DomainSpec::Square { n } => unit_square_mesh(*n),
            DomainSpec::Multiconnected { n } => multiconnected_mesh(*n),
            DomainSpec::MeshFile { path } => Mesh::read_file(path),
        }
    }

    pub fn build_space(&self) -> Result<FemSpace> {
        FemSpace::new(self.build_mesh()?, self.order)
    }
}

/// Unit-square preset reproducing the published vortex experiment.
pub fn preset_square(kappa: f64) -> SimConfig {
    SimConfig::square(kappa)
}

/// Multi-connected-domain preset.
pub fn preset_multiconnected(kappa: f64) -> SimConfig {
    SimConfig::multiconnected(kappa)
}

// ---------------------------------------------------------------------------
// Temporal convergence
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// Actual step sizes used, largest first.
    pub taus: Vec<f64>,
    pub psi_errors: Vec<f64>,
    pub a_errors: Vec<f64>,
    /// Observed order between consecutive taus; absent when undefined.
    pub psi_orders: Vec<Option<f64>>,
    pub a_orders: Vec<Option<f64>>,
    pub tau_ref: f64,
}

/// log(e_i / e_{i+1}) / log(tau_i / tau_{i+1}), absent for zero errors or
/// repeated step sizes.
pub fn observed_orders(taus: &[f64], errors: &[f64]) -> Vec<Option<f64>> {
    assert_eq!(taus.len(), errors.len());
    let mut orders = Vec::new();
    for i in 1..taus.len() {
        let (t0, t1) = (taus[i - 1], taus[i]);
        let (e0, e1) = (errors[i - 1], errors[i]);
        if e0 > 0.0 && e1 > 0.0 && t0 != t1 {
            orders.push(Some((e0 / e1).ln() / (t0 / t1).ln()));
        } else {
            orders.push(None);
        }
    }
    orders
}

/// Discrete L2 distance through the mass matrix.
pub fn l2_error_complex(mass: &SparseMatrix<f64>, a: &[Complex64], b: &[Complex64]) -> f64 {
    let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mut total = 0.0;
    for r in 0..mass.n_rows {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in mass.row_offsets[r]..mass.row_offsets[r + 1] {
            acc += d[mass.col_indices[k]] * mass.values[k];
        }
        total += (d[r].conj() * acc).re;
    }
    total.max(0.0).sqrt()
}

pub fn l2_error_real(mass: &SparseMatrix<f64>, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mut total = 0.0;
    for r in 0..mass.n_rows {
        let mut acc = 0.0;
        for k in mass.row_offsets[r]..mass.row_offsets[r + 1] {
            acc += d[mass.col_indices[k]] * mass.values[k];
        }
        total += d[r] * acc;
    }
    total.max(0.0).sqrt()
}

/// Self-convergence study at fixed mesh: run every tau plus a fine reference
/// and compare final-time fields in the discrete L2 norm.
pub fn temporal_convergence(
    base: &SimConfig,
    taus: &[f64],
    tau_ref: f64,
) -> std::result::Result<ConvergenceReport, Box<RunAbort>> {
    let invalid = |msg: String| {
        Box::new(RunAbort {
            step: 0,
            source: Error::InvalidArgument(msg),
            partial: empty_result(base.tau),
        })
    };
    if taus.is_empty() {
        return Err(invalid("temporal_convergence needs at least one tau".into()));
    }
    if taus.iter().any(|&t| !(t > 0.0)) || !(tau_ref > 0.0) {
        return Err(invalid("step sizes must be positive".into()));
    }
    let min_tau = taus.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(tau_ref < min_tau / 4.0) {
        return Err(invalid(format!(
            "tau_ref = {tau_ref} must be smaller than min(taus)/4 = {}",
            min_tau / 4.0
        )));
    }
    let mut sorted: Vec<f64> = taus.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));

    let mut cfg_ref = base.clone();
    cfg_ref.tau = tau_ref;
    let (ref_result, ref_sim) = run(&cfg_ref)?;
    let mass = ref_sim.mass();

    let mut actual_taus = Vec::with_capacity(sorted.len());
    let mut psi_errors = Vec::with_capacity(sorted.len());
    let mut a_errors = Vec::with_capacity(sorted.len());
    for &tau in &sorted {
        let mut cfg = base.clone();
        cfg.tau = tau;
        let (result, _) = run(&cfg)?;
        actual_taus.push(result.tau);
        psi_errors.push(l2_error_complex(
            mass,
            &result.psi.coeffs,
            &ref_result.psi.coeffs,
        ));
        let ax = l2_error_real(mass, &result.a.x, &ref_result.a.x);
        let ay = l2_error_real(mass, &result.a.y, &ref_result.a.y);
        a_errors.push(ax.hypot(ay));
    }
    let psi_orders = observed_orders(&actual_taus, &psi_errors);
    let a_orders = observed_orders(&actual_taus, &a_errors);
    Ok(ConvergenceReport {
        taus: actual_taus,
        psi_errors,
        a_errors,
        psi_orders,
        a_orders,
        tau_ref: ref_result.tau,
    })
}

fn empty_result(tau: f64) -> SimResult {
    SimResult {
        reports: Vec::new(),
        psi: crate::system::ComplexField::zeros(0),
        a: crate::system::VectorField::zeros(0),
        initial_energy: crate::observables::EnergyBreakdown::zero(),
        tau,
        steps: 0,
        warnings: Vec::new(),
    }
}

// ---------------------------------------------------------------------------
// Invariant audit
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct CheckCounts {
    pub checked: usize,
    pub failed: usize,
    /// Largest normalized violation measure seen (compare to `tolerance`).
    pub worst: f64,
    pub worst_step: Option<usize>,
    pub tolerance: f64,
}

impl CheckCounts {
    fn new(tolerance: f64) -> Self {
        CheckCounts {
            checked: 0,
            failed: 0,
            worst: f64::NEG_INFINITY,
            worst_step: None,
            tolerance,
        }
    }

    fn record(&mut self, step: usize, measure: f64) {
        self.checked += 1;
        if measure > self.worst {
            self.worst = measure;
            self.worst_step = Some(step);
        }
        if measure > self.tolerance {
            self.failed += 1;
        }
    }

    pub fn pass(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone)]
pub struct AuditSummary {
    /// Nodal max |psi| - 1 against 1e-6.
    pub max_bound: CheckCounts,
    /// (r_n - r_{n-1}) / max(1, r_{n-1}) against 1e-12.
    pub r_monotone: CheckCounts,
    /// Case-resolved energy increase, relative, against 1e-10. Checked only
    /// when tau <= eta (the energy-dissipation guarantee assumes it).
    pub energy: CheckCounts,
    /// Relaxation identity residual, relative, against 1e-10.
    pub relax_identity: CheckCounts,
    /// Implicit r~ relation residual, relative, against 1e-12.
    pub tilde_residual: CheckCounts,
    pub tau_le_eta: bool,
    pub steps: usize,
}

impl AuditSummary {
    pub fn pass(&self) -> bool {
        self.max_bound.pass()
            && self.r_monotone.pass()
            && self.energy.pass()
            && self.relax_identity.pass()
            && self.tilde_residual.pass()
    }

    pub fn key_values(&self) -> Vec<(String, String)> {
        let mut kv = Vec::new();
        kv.push(("steps".into(), self.steps.to_string()));
        kv.push(("tau_le_eta".into(), self.tau_le_eta.to_string()));
        for (name, c) in [
            ("max_bound", &self.max_bound),
            ("r_monotone", &self.r_monotone),
            ("energy", &self.energy),
            ("relax_identity", &self.relax_identity),
            ("tilde_residual", &self.tilde_residual),
        ] {
            kv.push((format!("{name}.checked"), c.checked.to_string()));
            kv.push((format!("{name}.failed"), c.failed.to_string()));
            if c.checked > 0 {
                kv.push((format!("{name}.worst"), format!("{:.3e}", c.worst)));
                if let Some(s) = c.worst_step {
                    kv.push((format!("{name}.worst_step"), s.to_string()));
                }
            }
            kv.push((format!("{name}.tolerance"), format!("{:.0e}", c.tolerance)));
        }
        kv.push((
            "verdict".into(),
            if self.pass() { "pass" } else { "fail" }.to_string(),
        ));
        kv
    }
}

/// Check every step of a finished run against the scheme's guarantees.
pub fn audit_result(result: &SimResult, eta: f64) -> AuditSummary {
    let tau = result.tau;
    let tau_le_eta = tau <= eta;
    let mut max_bound = CheckCounts::new(1e-6);
    let mut r_monotone = CheckCounts::new(1e-12);
    let mut energy = CheckCounts::new(1e-10);
    let mut relax_identity = CheckCounts::new(1e-10);
    let mut tilde_residual = CheckCounts::new(1e-12);

    let mut r_prev = result.initial_energy.total;
    let mut g_prev = result.initial_energy.total;
    for rep in &result.reports {
        let step = rep.sav.step;
        max_bound.record(step, rep.max_psi - 1.0);
        r_monotone.record(step, (rep.sav.r - r_prev) / r_prev.abs().max(1.0));
        if tau_le_eta {
            let g_case = if rep.sav.case_id == 4 {
                rep.g_bar
            } else {
                rep.g_new.total
            };
            energy.record(step, (g_case - g_prev) / g_prev.abs().max(1.0));
        }
        if !rep.flags.g_floor {
            let drive = rep.sav.tilde_r / rep.g_bar * rep.k_bar;
            if !rep.flags.k_new_zero {
                let dr = (rep.sav.r - rep.sav.tilde_r) / tau;
                let damp = rep.sav.gamma * rep.k_new;
                let res = dr + damp - drive;
                let scale = dr.abs().max(damp.abs()).max(drive.abs()).max(1.0);
                relax_identity.record(step, res.abs() / scale);
            }
            let dtr = (rep.sav.tilde_r - r_prev) / tau;
            let res = dtr + drive;
            let scale = dtr.abs().max(drive.abs()).max(1.0);
            tilde_residual.record(step, res.abs() / scale);
        }
        r_prev = rep.sav.r;
        g_prev = rep.g_new.total;
    }
    AuditSummary {
        max_bound,
        r_monotone,
        energy,
        relax_identity,
        tilde_residual,
        tau_le_eta,
        steps: result.reports.len(),
    }
}

/// Run a configuration and audit every step.
pub fn audit_run(config: &SimConfig) -> std::result::Result<(AuditSummary, SimResult), Box<RunAbort>> {
    let (result, _) = run(config)?;
    let summary = audit_result(&result, config.eta);
    Ok((summary, result))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_preset_matches_experiment_parameters() {
        for kappa in [1.0, 10.0] {
            let c = preset_square(kappa);
            assert_eq!(c.domain, DomainSpec::Square { n: 40 });
            assert_eq!(c.order, 2);
            assert_eq!(c.kappa, kappa);
            assert_eq!(c.eta, 1.0);
            assert_eq!(c.h_applied, 3.5);
            assert_eq!(c.tau, 0.01);
            assert_eq!(c.t_final, 20.0);
            assert_eq!(c.psi0, Complex64::new(0.8, 0.6));
            assert_eq!(c.a0, [0.0, 0.0]);
        }
    }

    #[test]
    fn square_preset_scaling_override() {
        let c = preset_square(10.0).scaled(16, 2.0);
        assert_eq!(c.domain, DomainSpec::Square { n: 16 });
        assert_eq!(c.t_final, 2.0);
        assert_eq!(c.h_applied, 3.5);
    }

    #[test]
    fn multiconnected_preset() {
        let c = preset_multiconnected(30.0);
        assert_eq!(c.domain, DomainSpec::Multiconnected { n: 24 });
        assert_eq!(c.h_applied, 5.0);
        assert_eq!(c.t_final, 20.0);
        assert!(c.provenance.iter().any(|p| p.contains("n=24")));
        let c1 = preset_multiconnected(1.0);
        assert_eq!(c1.kappa, 1.0);
    }

    #[test]
    fn orders_recover_exact_first_order_model() {
        // e(tau) = c * tau must give order exactly 1.
        let taus = [0.04, 0.02, 0.01];
        let errors: Vec<f64> = taus.iter().map(|t| 3.7 * t).collect();
        for o in observed_orders(&taus, &errors) {
            let o = o.unwrap();
            assert!((o - 1.0).abs() <= 1e-12, "order {o}");
        }
    }

    #[test]
    fn orders_undefined_for_degenerate_input() {
        assert_eq!(observed_orders(&[0.01, 0.01], &[1.0, 1.0]), vec![None]);
        assert_eq!(observed_orders(&[0.02, 0.01], &[0.0, 0.0]), vec![None]);
    }

    #[test]
    fn convergence_rejects_coarse_reference() {
        let base = SimConfig::square(5.0).scaled(4, 0.1);
        let err = temporal_convergence(&base, &[0.02, 0.01], 0.005).unwrap_err();
        assert!(matches!(err.source, Error::InvalidArgument(_)));
    }

    #[test]
    fn stationary_audit_passes_trivially() {
        let mut c = SimConfig::square(1.0).scaled(4, 0.5);
        c.h_applied = 0.0;
        c.psi0 = Complex64::new(1.0, 0.0);
        let (summary, result) = audit_run(&c).unwrap();
        assert!(summary.pass(), "{:?}", summary.key_values());
        for rep in &result.reports {
            assert!(rep.g_new.total <= 1e-12);
        }
    }

    #[test]
    fn corrupted_step_fails_the_bound_audit() {
        let c = SimConfig::square(5.0).scaled(4, 0.1);
        let (result, _) = run(&c).unwrap();
        let clean = audit_result(&result, c.eta);
        assert!(clean.max_bound.pass());
        let mut corrupted = result.clone();
        corrupted.reports[4].sav.xi = 1.5;
        corrupted.reports[4].max_psi = 1.5;
        let dirty = audit_result(&corrupted, c.eta);
        assert!(!dirty.max_bound.pass());
        assert_eq!(dirty.max_bound.failed, 1);
    }

    #[test]
    fn scaled_square_audit_passes() {
        let c = SimConfig::square(10.0).scaled(6, 0.3);
        let (summary, _) = audit_run(&c).unwrap();
        assert!(summary.pass(), "{:?}", summary.key_values());
        assert_eq!(summary.steps, 30);
        assert!(summary.tau_le_eta);
    }

    #[test]
    fn reruns_are_bit_identical() {
        let c = SimConfig::square(7.0).scaled(4, 0.1);
        let (r1, _) = run(&c).unwrap();
        let (r2, _) = run(&c).unwrap();
        let csv1 = crate::io::timeseries_to_string(&crate::io::rows_from_reports(&r1.reports));
        let csv2 = crate::io::timeseries_to_string(&crate::io::rows_from_reports(&r2.reports));
        assert_eq!(csv1, csv2);
    }

    #[test]
    fn config_validation_catches_bad_values() {
        let mut c = SimConfig::square(10.0);
        c.tau = 0.0;
        assert!(c.validate().is_err());
        let mut c = SimConfig::square(10.0);
        c.kappa = -1.0;
        assert!(c.validate().is_err());
        let mut c = SimConfig::multiconnected(10.0);
        c.domain = DomainSpec::Multiconnected { n: 4 };
        assert!(c.validate().is_err());
    }
}
