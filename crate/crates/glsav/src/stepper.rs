//! The generalized-SAV backward-Euler time stepper.
//!
//! Each step runs three stages:
//!   1. solve the linearized order-parameter and vector-potential systems,
//!      then update the auxiliary scalar through its closed form
//!      r~ = r_prev / (1 + (tau / G(psi_bar, A)) K_tau);
//!   2. correction: zeta = min(r~ / G(psi_bar, A), cap), xi = 1 - (1 - zeta)^2,
//!      psi = xi psi_bar;
//!   3. relaxation: r = alpha0 r~ + (1 - alpha0) G(psi, A) with the four-case
//!      choice of (alpha0, gamma) keeping gamma >= 0 and the dissipation
//!      identity (r - r~)/tau = -gamma K_new + (r~/G_bar) K_bar exact.

use num_complex::Complex64;

use crate::assemble::{FemSpace, Pattern};
use crate::error::{Error, Result};
use crate::harness::SimConfig;
use crate::observables::{energy, max_modulus, EnergyBreakdown};
use crate::sparse::{gmres_solve, GmresConfig, SparseMatrix};
use crate::system::{
    apply_normal_constraints, assemble_a_system, assemble_psi_system, ComplexField, PhysParams,
    VectorField,
};

/// Cap on the tracking ratio zeta.
pub fn default_zeta_cap() -> f64 {
    1.0 + 3.0f64.sqrt()
}

/// Energies below this are treated as a fully relaxed state; the auxiliary
/// updates are degenerate there and the step reduces to the linear solves.
pub const G_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
pub struct SavState {
    pub r: f64,
    pub tilde_r: f64,
    pub zeta: f64,
    pub xi: f64,
    pub alpha0: f64,
    pub gamma: f64,
    pub case_id: u8,
    pub step: usize,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StepFlags {
    /// xi left [-1, 1] and was clamped before scaling psi_bar.
    pub xi_clamped: bool,
    /// G(psi_bar, A) was below the floor; auxiliary updates skipped.
    pub g_floor: bool,
    /// K_tau of the corrected fields was exactly zero in a case needing it.
    pub k_new_zero: bool,
}

#[derive(Debug, Clone)]
pub struct StepReport {
    pub sav: SavState,
    /// G(psi_bar^n, A^n).
    pub g_bar: f64,
    /// G(psi^n, A^n), split into parts.
    pub g_new: EnergyBreakdown,
    /// K_tau(psi_bar^n, psi^{n-1}, A^n, A^{n-1}).
    pub k_bar: f64,
    /// K_tau(psi^n, psi^{n-1}, A^n, A^{n-1}).
    pub k_new: f64,
    pub max_psi: f64,
    pub psi_iterations: usize,
    pub a_iterations: usize,
    pub flags: StepFlags,
}

/// Discrete dissipation rate: the L2 norms of the difference quotients of
/// both fields, as the quadratic form of the scalar mass matrix. No factor 2.
pub fn compute_ktau(
    mass: &SparseMatrix<f64>,
    psi_new: &ComplexField,
    psi_old: &ComplexField,
    a_new: &VectorField,
    a_old: &VectorField,
    tau: f64,
) -> f64 {
    let n = mass.n_rows;
    assert_eq!(psi_new.len(), n);
    assert_eq!(a_new.len(), n);
    let dpsi: Vec<Complex64> = psi_new
        .coeffs
        .iter()
        .zip(&psi_old.coeffs)
        .map(|(a, b)| a - b)
        .collect();
    let dax: Vec<f64> = a_new.x.iter().zip(&a_old.x).map(|(a, b)| a - b).collect();
    let day: Vec<f64> = a_new.y.iter().zip(&a_old.y).map(|(a, b)| a - b).collect();
    let mut total = 0.0;
    for r in 0..n {
        let mut mc = Complex64::new(0.0, 0.0);
        let mut mx = 0.0;
        let mut my = 0.0;
        for k in mass.row_offsets[r]..mass.row_offsets[r + 1] {
            let c = mass.col_indices[k];
            let v = mass.values[k];
            mc += dpsi[c] * v;
            mx += dax[c] * v;
            my += day[c] * v;
        }
        total += (dpsi[r].conj() * mc).re + dax[r] * mx + day[r] * my;
    }
    (total / (tau * tau)).max(0.0)
}

/// Closed form of the implicit auxiliary update
/// (r~ - r_prev)/tau = -(r~/g_bar) k_bar.
pub fn update_tilde_r(r_prev: f64, g_bar: f64, k_bar: f64, tau: f64) -> f64 {
    debug_assert!(g_bar > 0.0);
    r_prev / (1.0 + tau * k_bar / g_bar)
}

/// Step-2 correction. Returns (zeta, xi, psi, xi_clamped).
///
/// The cap keeps zeta <= 1 + sqrt(3); the bound proof additionally needs
/// |xi| <= 1, so xi is clamped into [-1, 1] when zeta exceeds 1 + sqrt(2).
/// A negative xi flips the global sign of psi, which the equations are
/// invariant under; clamping at 0 instead would park the run on the
/// invariant normal state psi = 0.
pub fn correction_step(
    tilde_r: f64,
    g_bar: f64,
    zeta_cap: f64,
    psi_bar: &ComplexField,
) -> (f64, f64, ComplexField, bool) {
    debug_assert!(g_bar > 0.0);
    let zeta = (tilde_r / g_bar).min(zeta_cap);
    let xi_raw = 1.0 - (1.0 - zeta) * (1.0 - zeta);
    let xi = xi_raw.clamp(-1.0, 1.0);
    let clamped = xi != xi_raw;
    (zeta, xi, psi_bar.scaled(xi), clamped)
}

#[derive(Debug, Clone, Copy)]
pub struct Relaxation {
    pub r: f64,
    pub alpha0: f64,
    pub gamma: f64,
    pub case_id: u8,
    pub k_new_zero: bool,
}

/// Step-3 relaxation: pick (alpha0, gamma) by the four cases and recombine
/// r from r~ and the true energy of the corrected fields.
pub fn relax_r(tilde_r: f64, g_new: f64, k_new: f64, g_bar: f64, k_bar: f64, tau: f64) -> Relaxation {
    debug_assert!(g_bar > 0.0);
    let dissipated = tau * (tilde_r / g_bar) * k_bar;
    let (case_id, is_case4) = if tilde_r == g_new {
        (1u8, false)
    } else if tilde_r > g_new {
        (2u8, false)
    } else if tilde_r - g_new + dissipated >= 0.0 {
        (3u8, false)
    } else {
        (4u8, true)
    };
    if is_case4 {
        let alpha0 = 1.0 - dissipated / (g_new - tilde_r);
        return Relaxation {
            r: alpha0 * tilde_r + (1.0 - alpha0) * g_new,
            alpha0,
            gamma: 0.0,
            case_id,
            k_new_zero: false,
        };
    }
    if k_new == 0.0 {
        // Fields did not move; the identity degenerates and r keeps r~.
        return Relaxation {
            r: tilde_r,
            alpha0: 1.0,
            gamma: 0.0,
            case_id,
            k_new_zero: true,
        };
    }
    let gamma = match case_id {
        1 => tilde_r * k_bar / (g_bar * k_new),
        _ => (tilde_r - g_new) / (tau * k_new) + tilde_r * k_bar / (g_bar * k_new),
    };
    Relaxation {
        r: g_new,
        alpha0: 0.0,
        gamma,
        case_id,
        k_new_zero: false,
    }
}

/// One run in progress: current fields, auxiliary state and cached operators.
#[derive(Debug)]
pub struct Simulation {
    pub space: FemSpace,
    pub params: PhysParams,
    pub tau: f64,
    pub zeta_cap: f64,
    pub gmres: GmresConfig,
    psi_pattern: Pattern,
    a_pattern: Pattern,
    mass: SparseMatrix<f64>,
    psi: ComplexField,
    a: VectorField,
    state: SavState,
    /// Energy of the current corrected fields, G(psi^n, A^n).
    g_current: EnergyBreakdown,
}

impl Simulation {
    pub fn new(
        space: FemSpace,
        params: PhysParams,
        tau: f64,
        zeta_cap: f64,
        gmres: GmresConfig,
        psi0: ComplexField,
        a0: VectorField,
    ) -> Result<Self> {
        params.validate()?;
        if !(tau > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time step must be positive, got {tau}"
            )));
        }
        if !(zeta_cap > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "zeta cap must be positive, got {zeta_cap}"
            )));
        }
        let n = space.n_dofs();
        if psi0.len() != n || a0.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "initial fields must have {n} dofs"
            )));
        }
        if !psi0.is_finite() || !a0.is_finite() {
            return Err(Error::InvalidArgument(
                "initial fields contain non-finite entries".into(),
            ));
        }
        let psi_pattern = Pattern::build(&space, 1);
        let a_pattern = Pattern::build(&space, 2);
        let mass = crate::assemble::mass_matrix(&space);
        let g0 = energy(&space, &psi0, &a0, &params)?;
        let state = SavState {
            r: g0.total,
            tilde_r: g0.total,
            zeta: 1.0,
            xi: 1.0,
            alpha0: 0.0,
            gamma: 0.0,
            case_id: 0,
            step: 0,
            time: 0.0,
        };
        Ok(Simulation {
            space,
            params,
            tau,
            zeta_cap,
            gmres,
            psi_pattern,
            a_pattern,
            mass,
            psi: psi0,
            a: a0,
            state,
            g_current: g0,
        })
    }

    pub fn psi(&self) -> &ComplexField {
        &self.psi
    }

    pub fn a(&self) -> &VectorField {
        &self.a
    }

    pub fn state(&self) -> &SavState {
        &self.state
    }

    pub fn energy_current(&self) -> EnergyBreakdown {
        self.g_current
    }

    pub fn mass(&self) -> &SparseMatrix<f64> {
        &self.mass
    }

    /// Advance one step of the scheme; the report carries every scalar the
    /// stability theory constrains.
    pub fn advance(&mut self) -> Result<StepReport> {
        let step = self.state.step + 1;
        let solver_err = |what: &str, e: String| Error::Solver {
            step,
            detail: format!("{what}: {e}"),
        };

        // Stage 1a: order-parameter solve with A and |psi|^2 frozen.
        let (pmat, prhs) = assemble_psi_system(
            &self.space,
            &self.psi,
            &self.a,
            &self.params,
            self.tau,
            &self.psi_pattern,
        );
        let psi_out = gmres_solve(&pmat, &prhs, Some(&self.psi.coeffs), &self.gmres)
            .map_err(|e| solver_err("psi system", e.to_string()))?;
        let psi_bar = ComplexField { coeffs: psi_out.x };

        // Stage 1b: vector-potential solve using psi_bar.
        let (mut amat, mut arhs) = assemble_a_system(
            &self.space,
            &psi_bar,
            &self.a,
            &self.params,
            self.tau,
            &self.a_pattern,
        );
        apply_normal_constraints(&self.space, &mut amat, &mut arhs)?;
        let a_out = gmres_solve(&amat, &arhs, Some(&self.a.to_flat()), &self.gmres)
            .map_err(|e| solver_err("A system", e.to_string()))?;
        let a_new = VectorField::from_flat(&a_out.x);

        // Stage 1c: auxiliary scalar.
        let k_bar = compute_ktau(&self.mass, &psi_bar, &self.psi, &a_new, &self.a, self.tau);
        let g_bar = energy(&self.space, &psi_bar, &a_new, &self.params)?.total;

        let mut flags = StepFlags::default();
        let (tilde_r, zeta, xi, psi_new) = if g_bar < G_FLOOR {
            flags.g_floor = true;
            (self.state.r, 1.0, 1.0, psi_bar.clone())
        } else {
            let tilde_r = update_tilde_r(self.state.r, g_bar, k_bar, self.tau);
            let (zeta, xi, psi_new, clamped) =
                correction_step(tilde_r, g_bar, self.zeta_cap, &psi_bar);
            flags.xi_clamped = clamped;
            (tilde_r, zeta, xi, psi_new)
        };

        let g_new = energy(&self.space, &psi_new, &a_new, &self.params)?;
        let k_new = compute_ktau(&self.mass, &psi_new, &self.psi, &a_new, &self.a, self.tau);

        let relax = if flags.g_floor {
            Relaxation {
                r: g_new.total,
                alpha0: 0.0,
                gamma: 0.0,
                case_id: 1,
                k_new_zero: false,
            }
        } else {
            relax_r(tilde_r, g_new.total, k_new, g_bar, k_bar, self.tau)
        };
        flags.k_new_zero = relax.k_new_zero;

        self.psi = psi_new;
        self.a = a_new;
        self.state = SavState {
            r: relax.r,
            tilde_r,
            zeta,
            xi,
            alpha0: relax.alpha0,
            gamma: relax.gamma,
            case_id: relax.case_id,
            step,
            time: step as f64 * self.tau,
        };
        self.g_current = g_new;

        Ok(StepReport {
            sav: self.state,
            g_bar,
            g_new,
            k_bar,
            k_new,
            max_psi: max_modulus(&self.psi),
            psi_iterations: psi_out.iterations,
            a_iterations: a_out.iterations,
            flags,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub reports: Vec<StepReport>,
    pub psi: ComplexField,
    pub a: VectorField,
    pub initial_energy: EnergyBreakdown,
    /// Step actually used (T divided into a whole number of steps).
    pub tau: f64,
    pub steps: usize,
    pub warnings: Vec<String>,
}

impl SimResult {
    pub fn final_time(&self) -> f64 {
        self.steps as f64 * self.tau
    }
}

/// A failed run carrying everything produced before the failing step.
#[derive(Debug, thiserror::Error)]
#[error("run aborted at step {step}: {source}")]
pub struct RunAbort {
    pub step: usize,
    #[source]
    pub source: Error,
    pub partial: SimResult,
}

/// Run a configured simulation to completion. Deterministic given the config.
pub fn run(config: &SimConfig) -> std::result::Result<(SimResult, Simulation), Box<RunAbort>> {
    run_with(config, |_, _| Ok(()))
}

/// Run with a per-step observer (snapshot writers and the like). Observer
/// errors abort the run and carry the partial result.
pub fn run_with(
    config: &SimConfig,
    mut on_step: impl FnMut(&Simulation, &StepReport) -> Result<()>,
) -> std::result::Result<(SimResult, Simulation), Box<RunAbort>> {
    let abort_setup = |e: Error| {
        Box::new(RunAbort {
            step: 0,
            source: e,
            partial: SimResult {
                reports: Vec::new(),
                psi: ComplexField::zeros(0),
                a: VectorField::zeros(0),
                initial_energy: EnergyBreakdown::zero(),
                tau: config.tau,
                steps: 0,
                warnings: Vec::new(),
            },
        })
    };
    config.validate().map_err(abort_setup)?;
    let mut warnings = Vec::new();
    if config.tau > config.eta {
        warnings.push(format!(
            "tau = {} exceeds eta = {}; the energy-stability guarantee assumes tau <= eta",
            config.tau, config.eta
        ));
    }
    let steps = if config.t_final > 0.0 {
        ((config.t_final / config.tau).round() as usize).max(1)
    } else {
        0
    };
    let tau = if steps > 0 {
        config.t_final / steps as f64
    } else {
        config.tau
    };
    if steps > 0 && (tau - config.tau).abs() > 1e-12 * config.tau {
        warnings.push(format!(
            "tau adjusted from {} to {tau} so that {} steps end exactly at T = {}",
            config.tau, steps, config.t_final
        ));
    }
    let space = config.build_space().map_err(abort_setup)?;
    let n = space.n_dofs();
    let psi0 = ComplexField::constant(n, config.psi0);
    let a0 = VectorField::constant(n, config.a0);
    let mut sim = Simulation::new(
        space,
        config.phys_params(),
        tau,
        config.zeta_cap,
        config.gmres.clone(),
        psi0,
        a0,
    )
    .map_err(abort_setup)?;

    let initial_energy = sim.energy_current();
    let mut reports = Vec::with_capacity(steps);
    for step in 1..=steps {
        let report = match sim.advance().and_then(|rep| {
            on_step(&sim, &rep)?;
            Ok(rep)
        }) {
            Ok(rep) => rep,
            Err(e) => {
                return Err(Box::new(RunAbort {
                    step,
                    source: e,
                    partial: SimResult {
                        reports,
                        psi: sim.psi().clone(),
                        a: sim.a().clone(),
                        initial_energy,
                        tau,
                        steps,
                        warnings,
                    },
                }))
            }
        };
        reports.push(report);
    }
    Ok((
        SimResult {
            reports,
            psi: sim.psi().clone(),
            a: sim.a().clone(),
            initial_energy,
            tau,
            steps,
            warnings,
        },
        sim,
    ))
}
