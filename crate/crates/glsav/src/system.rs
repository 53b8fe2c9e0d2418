//! The two linear systems solved once per time step: the complex
//! order-parameter update and the real vector-potential update, in their
//! finite element weak forms, with the A·n = 0 essential constraint.
//!
//! Order-parameter system (unknown psi_bar, frozen A = A_prev, w = |psi_prev|^2):
//!   (eta/tau)(psi_bar, phi) + ((i/kappa) grad psi_bar + A psi_bar,
//!   (i/kappa) grad phi + A phi) + (w psi_bar, phi)
//!     = (eta/tau)(psi_prev, phi) + (psi_prev, phi)
//!
//! Vector-potential system (unknown A, weight |psi_bar|^2):
//!   (1/tau)(A, B) + (curl A, curl B) + (div A, div B) + (|psi_bar|^2 A, B)
//!     = (1/tau)(A_prev, B) + (H, curl B) + (1/kappa)(Im(psi_bar* grad psi_bar), B)
//!
//! with 2D scalars curl A = dAy/dx - dAx/dy and H constant.

use num_complex::Complex64;

use crate::assemble::{mirror_hermitian, mirror_symmetric, ElementCtx, FemSpace, Pattern};
use crate::error::{Error, Result};
use crate::mesh::{BoundaryClass, DofMap};
use crate::sparse::SparseMatrix;

/// Order-parameter coefficients over the scalar dofs.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub coeffs: Vec<Complex64>,
}

impl ComplexField {
    pub fn constant(n: usize, value: Complex64) -> Self {
        ComplexField {
            coeffs: vec![value; n],
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, Complex64::new(0.0, 0.0))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        ComplexField {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Magnetic potential as two real coefficient vectors over the same dofs.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl VectorField {
    pub fn zeros(n: usize) -> Self {
        VectorField {
            x: vec![0.0; n],
            y: vec![0.0; n],
        }
    }

    pub fn constant(n: usize, v: [f64; 2]) -> Self {
        VectorField {
            x: vec![v[0]; n],
            y: vec![v[1]; n],
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Flat layout [x..., y...] used by the assembled 2n x 2n system.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.x.len());
        out.extend_from_slice(&self.x);
        out.extend_from_slice(&self.y);
        out
    }

    pub fn from_flat(flat: &[f64]) -> Self {
        let n = flat.len() / 2;
        VectorField {
            x: flat[..n].to_vec(),
            y: flat[n..].to_vec(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.y).all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PhysParams {
    /// Ginzburg-Landau parameter.
    pub kappa: f64,
    /// Relaxation constant multiplying the psi time derivative.
    pub eta: f64,
    /// Applied magnetic field (constant scalar, out of plane).
    pub h_applied: f64,
}

impl PhysParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        if !(self.eta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        Ok(())
    }
}

/// Evaluate a complex FE expansion and its gradient at one quadrature point.
#[inline]
fn eval_complex(
    field: &ComplexField,
    dofs: &[usize],
    values: &[f64],
    grads: &[[f64; 2]],
) -> (Complex64, [Complex64; 2]) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut gx = Complex64::new(0.0, 0.0);
    let mut gy = Complex64::new(0.0, 0.0);
    for (l, &d) in dofs.iter().enumerate() {
        let c = field.coeffs[d];
        v += c * values[l];
        gx += c * grads[l][0];
        gy += c * grads[l][1];
    }
    (v, [gx, gy])
}

/// Evaluate a vector FE expansion, its divergence and curl at one point.
#[inline]
fn eval_vector(
    field: &VectorField,
    dofs: &[usize],
    values: &[f64],
    grads: &[[f64; 2]],
) -> ([f64; 2], f64, f64) {
    let mut ax = 0.0;
    let mut ay = 0.0;
    let mut div = 0.0;
    let mut curl = 0.0;
    for (l, &d) in dofs.iter().enumerate() {
        let cx = field.x[d];
        let cy = field.y[d];
        ax += cx * values[l];
        ay += cy * values[l];
        div += cx * grads[l][0] + cy * grads[l][1];
        curl += cy * grads[l][0] - cx * grads[l][1];
    }
    ([ax, ay], div, curl)
}

fn fill_psi_block(
    ctx: &ElementCtx<'_>,
    psi_prev: &ComplexField,
    a_prev: &VectorField,
    p: &PhysParams,
    tau: f64,
    local_mat: &mut [Complex64],
    local_rhs: &mut [Complex64],
) {
    let nloc = ctx.n_local();
    let dofs = ctx.dofs();
    let inv_k2 = 1.0 / (p.kappa * p.kappa);
    let eta_tau = p.eta / tau;
    for k in 0..ctx.n_qp() {
        let qp = ctx.qp(k);
        let (psi_p, _) = eval_complex(psi_prev, dofs, qp.values, qp.grads);
        let (a, _, _) = eval_vector(a_prev, dofs, qp.values, qp.grads);
        let a2 = a[0] * a[0] + a[1] * a[1];
        let w_real = eta_tau + a2 + psi_p.norm_sqr();
        let rhs_val = psi_p * (qp.weight * (eta_tau + 1.0));
        for i in 0..nloc {
            let vi = qp.values[i];
            let gi = qp.grads[i];
            let adot_i = a[0] * gi[0] + a[1] * gi[1];
            local_rhs[i] += rhs_val * vi;
            for j in i..nloc {
                let vj = qp.values[j];
                let gj = qp.grads[j];
                // (i/kappa grad + A) psi_bar against (i/kappa grad + A) phi,
                // expanded with frozen A; plus mass and weighted mass terms.
                let re = w_real * vi * vj + inv_k2 * (gi[0] * gj[0] + gi[1] * gj[1]);
                let adot_j = a[0] * gj[0] + a[1] * gj[1];
                let im = (vi * adot_j - vj * adot_i) / p.kappa;
                local_mat[i * nloc + j] += Complex64::new(re, im) * qp.weight;
            }
        }
    }
    mirror_hermitian(local_mat, nloc);
}

/// Assemble the complex order-parameter system. The matrix is Hermitian
/// positive definite.
pub fn assemble_psi_system(
    space: &FemSpace,
    psi_prev: &ComplexField,
    a_prev: &VectorField,
    p: &PhysParams,
    tau: f64,
    pattern: &Pattern,
) -> (SparseMatrix<Complex64>, Vec<Complex64>) {
    debug_assert_eq!(pattern.components, 1);
    let n = space.n_dofs();
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    let nloc = space.n_local();
    let mut local_rhs = vec![Complex64::new(0.0, 0.0); nloc];
    let mat = pattern.assemble_matrix(space, |ctx, local| {
        local_rhs.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        fill_psi_block(ctx, psi_prev, a_prev, p, tau, local, &mut local_rhs);
        for (l, &d) in ctx.dofs().iter().enumerate() {
            rhs[d] += local_rhs[l];
        }
    });
    (mat, rhs)
}

fn fill_a_block(
    ctx: &ElementCtx<'_>,
    psi_bar: &ComplexField,
    a_prev: &VectorField,
    p: &PhysParams,
    tau: f64,
    local_mat: &mut [f64],
    local_rhs: &mut [f64],
) {
    let nloc = ctx.n_local();
    let block = 2 * nloc;
    let dofs = ctx.dofs();
    let inv_tau = 1.0 / tau;
    for k in 0..ctx.n_qp() {
        let qp = ctx.qp(k);
        let (psi_b, gpsi) = eval_complex(psi_bar, dofs, qp.values, qp.grads);
        let (ap, _, _) = eval_vector(a_prev, dofs, qp.values, qp.grads);
        let w = qp.weight;
        let weight_mass = inv_tau + psi_b.norm_sqr();
        // Supercurrent (i/2k)(psi* grad psi - psi grad psi*) = -(1/k) Im(psi* grad psi).
        let jx = -(psi_b.conj() * gpsi[0]).im / p.kappa;
        let jy = -(psi_b.conj() * gpsi[1]).im / p.kappa;
        for i in 0..nloc {
            let vi = qp.values[i];
            let gi = qp.grads[i];
            // curl/div coefficients of the test function per component.
            let curl_i = [-gi[1], gi[0]];
            let div_i = [gi[0], gi[1]];
            local_rhs[i] += w * (inv_tau * ap[0] * vi + p.h_applied * curl_i[0] - jx * vi);
            local_rhs[nloc + i] += w * (inv_tau * ap[1] * vi + p.h_applied * curl_i[1] - jy * vi);
            for bi in 0..2 {
                let row = bi * nloc + i;
                for bj in 0..2 {
                    for j in 0..nloc {
                        let col = bj * nloc + j;
                        if col < row {
                            continue;
                        }
                        let vj = qp.values[j];
                        let gj = qp.grads[j];
                        let curl_j = [-gj[1], gj[0]];
                        let div_j = [gj[0], gj[1]];
                        let mut e = curl_i[bi] * curl_j[bj] + div_i[bi] * div_j[bj];
                        if bi == bj {
                            e += weight_mass * vi * vj;
                        }
                        local_mat[row * block + col] += w * e;
                    }
                }
            }
        }
    }
    mirror_symmetric(local_mat, block);
}

/// Assemble the real vector-potential system (unconstrained). The matrix is
/// symmetric positive definite; apply `apply_normal_constraints` before
/// solving.
pub fn assemble_a_system(
    space: &FemSpace,
    psi_bar: &ComplexField,
    a_prev: &VectorField,
    p: &PhysParams,
    tau: f64,
    pattern: &Pattern,
) -> (SparseMatrix<f64>, Vec<f64>) {
    debug_assert_eq!(pattern.components, 2);
    let n = space.n_dofs();
    let nloc = space.n_local();
    let mut rhs = vec![0.0; 2 * n];
    let mut local_rhs = vec![0.0; 2 * nloc];
    let mat = pattern.assemble_matrix(space, |ctx, local| {
        local_rhs.iter_mut().for_each(|v| *v = 0.0);
        fill_a_block(ctx, psi_bar, a_prev, p, tau, local, &mut local_rhs);
        for (l, &d) in ctx.dofs().iter().enumerate() {
            rhs[d] += local_rhs[l];
            rhs[n + d] += local_rhs[nloc + l];
        }
    });
    (mat, rhs)
}

/// Global indices (into the flat [Ax..., Ay...] layout) pinned to zero by
/// the A·n = 0 condition on an axis-aligned boundary.
pub fn pinned_a_dofs(dofmap: &DofMap) -> Vec<usize> {
    let n = dofmap.n_dofs;
    let mut pinned = Vec::new();
    for (d, class) in dofmap.class.iter().enumerate() {
        match class {
            BoundaryClass::OnVerticalEdge => pinned.push(d),
            BoundaryClass::OnHorizontalEdge => pinned.push(n + d),
            BoundaryClass::Corner => {
                pinned.push(d);
                pinned.push(n + d);
            }
            BoundaryClass::Interior => {}
        }
    }
    pinned
}

/// Symmetric elimination of the pinned normal components: zero the pinned
/// rows and columns, unit diagonal, zero rhs entry. The curl/H terms stay
/// natural (weak).
pub fn apply_normal_constraints(
    space: &FemSpace,
    mat: &mut SparseMatrix<f64>,
    rhs: &mut [f64],
) -> Result<()> {
    let n = space.n_dofs();
    if mat.n_rows != 2 * n || rhs.len() != 2 * n {
        return Err(Error::DimensionMismatch(format!(
            "constraint application expects a {} x {} system",
            2 * n,
            2 * n
        )));
    }
    // All boundary edges must be axis-aligned for nodal component pinning
    // to represent A·n = 0 exactly.
    let mut extent: f64 = 0.0;
    for v in &space.mesh.vertices {
        extent = extent.max(v[0].abs()).max(v[1].abs());
    }
    let tol = 1e-9 * extent.max(1.0);
    for e in &space.mesh.boundary_edges {
        if crate::mesh::edge_orientation(space.mesh.vertices[e.v0], space.mesh.vertices[e.v1], tol)
            .is_none()
        {
            return Err(Error::UnsupportedGeometry(format!(
                "boundary edge ({}, {}) is not axis-aligned; A·n = 0 needs \
                 axis-aligned boundaries",
                e.v0, e.v1
            )));
        }
    }
    let mut is_pinned = vec![false; 2 * n];
    for k in pinned_a_dofs(&space.dofmap) {
        is_pinned[k] = true;
        rhs[k] = 0.0;
    }
    for r in 0..mat.n_rows {
        for k in mat.row_offsets[r]..mat.row_offsets[r + 1] {
            let c = mat.col_indices[k];
            if is_pinned[r] || is_pinned[c] {
                mat.values[k] = if r == c { 1.0 } else { 0.0 };
            }
        }
    }
    Ok(())
}
