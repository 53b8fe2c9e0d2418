//! 2D finite-element solver for the time-dependent Ginzburg-Landau equations
//! in the zero electric gauge, discretized with a generalized scalar
//! auxiliary variable (GSAV) backward-Euler scheme on P1/P2 triangles.
//!
//! The scheme solves two linear systems per step (order parameter, then
//! vector potential), updates the auxiliary scalar through a closed form,
//! corrects the order parameter by the tracking factor xi, and relaxes the
//! auxiliary scalar back toward the true free energy. It preserves the
//! maximum bound |psi| <= 1 and dissipates the free energy unconditionally;
//! both properties are monitored per step and checked by the audit suite.
//!
//! Entry points:
//! - [`harness::SimConfig`] / [`stepper::run`] for full simulations,
//! - [`harness::temporal_convergence`] for the first-order-in-time study,
//! - [`harness::audit_run`] for the invariant audit,
//! - `examples/` for one runnable program per capability,
//! - the `glsav` binary for the `run` / `converge` / `audit` commands.

pub mod assemble;
pub mod cli;
pub mod error;
pub mod harness;
pub mod io;
pub mod mesh;
pub mod observables;
pub mod quadrature;
pub mod shapes;
pub mod sparse;
pub mod stepper;
pub mod system;

pub use error::{Error, Result};
pub use harness::{
    audit_result, audit_run, preset_multiconnected, preset_square, temporal_convergence,
    AuditSummary, ConvergenceReport, DomainSpec, SimConfig,
};
pub use mesh::{build_dof_map, multiconnected_mesh, unit_square_mesh, DofMap, Mesh};
pub use observables::{energy, max_modulus, vortex_count, EnergyBreakdown};
pub use sparse::{gmres_solve, GmresConfig, GmresOutcome, Preconditioner, SparseMatrix};
pub use stepper::{run, run_with, SimResult, Simulation, StepReport};
pub use system::{ComplexField, PhysParams, VectorField};
