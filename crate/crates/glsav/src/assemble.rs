//! Element-loop assembly of sparse operators over a Lagrange space.
//!
//! `FemSpace` precomputes per-triangle affine geometry and physical basis
//! gradients at the quadrature points. `Pattern` fixes the CSR skeleton once
//! so repeated assemblies (one per time step) only accumulate values.

use crate::error::{Error, Result};
use crate::mesh::{build_dof_map, DofMap, Mesh};
use crate::quadrature::QuadratureRule;
use crate::shapes::{eval_shapes, n_local, ShapeEval};
use crate::sparse::{Scalar, SparseMatrix};

#[derive(Debug, Clone)]
struct TriGeometry {
    /// Columns of the affine map x = p0 + J xi.
    j: [[f64; 2]; 2],
    /// Inverse transpose of J, for gradient push-forward.
    jinv_t: [[f64; 2]; 2],
    det_j: f64,
    p0: [f64; 2],
}

impl TriGeometry {
    fn physical_point(&self, xi: [f64; 2]) -> [f64; 2] {
        [
            self.p0[0] + self.j[0][0] * xi[0] + self.j[0][1] * xi[1],
            self.p0[1] + self.j[1][0] * xi[0] + self.j[1][1] * xi[1],
        ]
    }

    fn physical_grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.jinv_t[0][0] * g[0] + self.jinv_t[0][1] * g[1],
            self.jinv_t[1][0] * g[0] + self.jinv_t[1][1] * g[1],
        ]
    }
}

fn tri_geometry(mesh: &Mesh, tri: usize) -> Result<TriGeometry> {
    let [a, b, c] = mesh.triangles[tri];
    let pa = mesh.vertices[a];
    let pb = mesh.vertices[b];
    let pc = mesh.vertices[c];
    let j = [
        [pb[0] - pa[0], pc[0] - pa[0]],
        [pb[1] - pa[1], pc[1] - pa[1]],
    ];
    let det_j = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if !(det_j > 0.0) || !det_j.is_finite() {
        return Err(Error::DegenerateElement { index: tri });
    }
    // inv(J)^T = 1/det * [[j11, -j10], [-j01, j00]]
    let jinv_t = [
        [j[1][1] / det_j, -j[1][0] / det_j],
        [-j[0][1] / det_j, j[0][0] / det_j],
    ];
    Ok(TriGeometry { j, jinv_t, det_j, p0: pa })
}

/// A Lagrange space with cached quadrature-point data.
#[derive(Debug)]
pub struct FemSpace {
    pub mesh: Mesh,
    pub dofmap: DofMap,
    pub quad: QuadratureRule,
    ref_shapes: Vec<ShapeEval>,
    geo: Vec<TriGeometry>,
    /// Physical gradients, indexed [tri][qp * n_local + local].
    phys_grads: Vec<Vec<[f64; 2]>>,
    /// Physical quadrature weights, indexed [tri][qp].
    weights: Vec<Vec<f64>>,
    points: Vec<Vec<[f64; 2]>>,
}

/// Assembly quadrature degree making every bilinear form of the scheme a
/// polynomial integrated exactly: degree 5 covers P1, degree 8 covers P2
/// (the heaviest integrand, |psi|^2 phi phi with P2 psi, has degree 8).
pub fn default_quad_degree(order: usize) -> usize {
    if order == 1 {
        5
    } else {
        8
    }
}

impl FemSpace {
    pub fn new(mesh: Mesh, order: usize) -> Result<Self> {
        let degree = default_quad_degree(order);
        Self::with_quadrature(mesh, order, degree)
    }

    pub fn with_quadrature(mesh: Mesh, order: usize, quad_degree: usize) -> Result<Self> {
        let dofmap = build_dof_map(&mesh, order)?;
        let quad = QuadratureRule::for_degree(quad_degree)?;
        let nloc = n_local(order);
        let ref_shapes: Vec<ShapeEval> =
            quad.points.iter().map(|&p| eval_shapes(order, p)).collect();
        let mut geo = Vec::with_capacity(mesh.n_triangles());
        let mut phys_grads = Vec::with_capacity(mesh.n_triangles());
        let mut weights = Vec::with_capacity(mesh.n_triangles());
        let mut points = Vec::with_capacity(mesh.n_triangles());
        for tri in 0..mesh.n_triangles() {
            let g = tri_geometry(&mesh, tri)?;
            let mut tg = Vec::with_capacity(quad.len() * nloc);
            let mut tw = Vec::with_capacity(quad.len());
            let mut tp = Vec::with_capacity(quad.len());
            for (k, shape) in ref_shapes.iter().enumerate() {
                for l in 0..nloc {
                    tg.push(g.physical_grad(shape.grads[l]));
                }
                tw.push(quad.weights[k] * g.det_j);
                tp.push(g.physical_point(quad.points[k]));
            }
            geo.push(g);
            phys_grads.push(tg);
            weights.push(tw);
            points.push(tp);
        }
        Ok(FemSpace {
            mesh,
            dofmap,
            quad,
            ref_shapes,
            geo,
            phys_grads,
            weights,
            points,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.dofmap.n_dofs
    }

    pub fn n_local(&self) -> usize {
        n_local(self.dofmap.order)
    }

    pub fn element(&self, tri: usize) -> ElementCtx<'_> {
        ElementCtx { space: self, tri }
    }

    /// Affine map data for evaluating with a different quadrature rule.
    pub fn map_gradient(&self, tri: usize, ref_grad: [f64; 2]) -> [f64; 2] {
        self.geo[tri].physical_grad(ref_grad)
    }

    pub fn jacobian_det(&self, tri: usize) -> f64 {
        self.geo[tri].det_j
    }

    pub fn physical_point(&self, tri: usize, xi: [f64; 2]) -> [f64; 2] {
        self.geo[tri].physical_point(xi)
    }
}

/// Per-element view used by assembly kernels.
pub struct ElementCtx<'a> {
    space: &'a FemSpace,
    pub tri: usize,
}

/// Basis data at one quadrature point of one element.
pub struct QpData<'a> {
    /// Physical weight (reference weight times Jacobian determinant).
    pub weight: f64,
    pub point: [f64; 2],
    /// Reference basis values (shared across elements).
    pub values: &'a [f64],
    /// Physical basis gradients.
    pub grads: &'a [[f64; 2]],
}

impl<'a> ElementCtx<'a> {
    pub fn dofs(&self) -> &'a [usize] {
        &self.space.dofmap.tri_dofs[self.tri]
    }

    pub fn n_local(&self) -> usize {
        self.space.n_local()
    }

    pub fn n_qp(&self) -> usize {
        self.space.quad.len()
    }

    pub fn qp(&self, k: usize) -> QpData<'a> {
        let nloc = self.space.n_local();
        QpData {
            weight: self.space.weights[self.tri][k],
            point: self.space.points[self.tri][k],
            values: &self.space.ref_shapes[k].values[..nloc],
            grads: &self.space.phys_grads[self.tri][k * nloc..(k + 1) * nloc],
        }
    }
}

/// Fixed CSR skeleton for a space with `components` unknowns per dof
/// (1 for scalar fields, 2 for the vector potential). Dof `d` of component
/// `c` has global index `c * n_dofs + d`.
#[derive(Debug)]
pub struct Pattern {
    pub components: usize,
    pub n_scalar: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    /// Per triangle, row-major (components*nloc)^2 indices into the value array.
    scatter: Vec<Vec<u32>>,
}

impl Pattern {
    pub fn build(space: &FemSpace, components: usize) -> Pattern {
        let n = space.n_dofs();
        let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
        for dofs in &space.dofmap.tri_dofs {
            for &i in dofs {
                neighbors[i].extend_from_slice(dofs);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        let rows = components * n;
        let mut row_offsets = Vec::with_capacity(rows + 1);
        row_offsets.push(0usize);
        let mut col_indices = Vec::new();
        for _comp_row in 0..components {
            for d in 0..n {
                for comp_col in 0..components {
                    col_indices.extend(neighbors[d].iter().map(|&j| comp_col * n + j));
                }
                let start = *row_offsets.last().unwrap();
                col_indices[start..].sort_unstable();
                row_offsets.push(col_indices.len());
            }
        }
        let mut scatter = Vec::with_capacity(space.mesh.n_triangles());
        for dofs in &space.dofmap.tri_dofs {
            let nloc = dofs.len();
            let block = components * nloc;
            let mut idx = Vec::with_capacity(block * block);
            for cr in 0..components {
                for &di in dofs {
                    let row = cr * n + di;
                    let cols = &col_indices[row_offsets[row]..row_offsets[row + 1]];
                    for cc in 0..components {
                        for &dj in dofs {
                            let col = cc * n + dj;
                            let k = cols.binary_search(&col).expect("pattern covers element");
                            idx.push((row_offsets[row] + k) as u32);
                        }
                    }
                }
            }
            scatter.push(idx);
        }
        Pattern {
            components,
            n_scalar: n,
            row_offsets,
            col_indices,
            scatter,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.components * self.n_scalar
    }

    /// Assemble a matrix; the kernel fills the element block in row-major
    /// order with local index `component * n_local + local_node`.
    pub fn assemble_matrix<T: Scalar>(
        &self,
        space: &FemSpace,
        mut kernel: impl FnMut(&ElementCtx<'_>, &mut [T]),
    ) -> SparseMatrix<T> {
        let mut values = vec![T::zero(); self.col_indices.len()];
        let block = self.components * space.n_local();
        let mut local = vec![T::zero(); block * block];
        for tri in 0..space.mesh.n_triangles() {
            local.iter_mut().for_each(|v| *v = T::zero());
            let ctx = space.element(tri);
            kernel(&ctx, &mut local);
            for (v, &k) in local.iter().zip(&self.scatter[tri]) {
                values[k as usize] += *v;
            }
        }
        SparseMatrix {
            n_rows: self.n_rows(),
            n_cols: self.n_rows(),
            row_offsets: self.row_offsets.clone(),
            col_indices: self.col_indices.clone(),
            values,
        }
    }
}

/// Assemble a matrix without a prebuilt pattern.
pub fn assemble_matrix<T: Scalar>(
    space: &FemSpace,
    components: usize,
    kernel: impl FnMut(&ElementCtx<'_>, &mut [T]),
) -> SparseMatrix<T> {
    Pattern::build(space, components).assemble_matrix(space, kernel)
}

/// Assemble a load vector; local layout matches `assemble_matrix`.
pub fn assemble_vector<T: Scalar>(
    space: &FemSpace,
    components: usize,
    mut kernel: impl FnMut(&ElementCtx<'_>, &mut [T]),
) -> Vec<T> {
    let n = space.n_dofs();
    let mut out = vec![T::zero(); components * n];
    let block = components * space.n_local();
    let mut local = vec![T::zero(); block];
    for tri in 0..space.mesh.n_triangles() {
        local.iter_mut().for_each(|v| *v = T::zero());
        let ctx = space.element(tri);
        kernel(&ctx, &mut local);
        let dofs = ctx.dofs();
        for c in 0..components {
            for (l, &d) in dofs.iter().enumerate() {
                out[c * n + d] += local[c * dofs.len() + l];
            }
        }
    }
    out
}

/// Scalar mass matrix (integral of phi_i phi_j).
pub fn mass_matrix(space: &FemSpace) -> SparseMatrix<f64> {
    assemble_matrix(space, 1, |ctx, local| {
        let nloc = ctx.n_local();
        for k in 0..ctx.n_qp() {
            let qp = ctx.qp(k);
            for i in 0..nloc {
                for j in i..nloc {
                    local[i * nloc + j] += qp.weight * qp.values[i] * qp.values[j];
                }
            }
        }
        mirror_symmetric(local, nloc);
    })
}

/// Scalar stiffness matrix (integral of grad phi_i . grad phi_j).
pub fn stiffness_matrix(space: &FemSpace) -> SparseMatrix<f64> {
    assemble_matrix(space, 1, |ctx, local| {
        let nloc = ctx.n_local();
        for k in 0..ctx.n_qp() {
            let qp = ctx.qp(k);
            for i in 0..nloc {
                for j in i..nloc {
                    let g = qp.grads[i][0] * qp.grads[j][0] + qp.grads[i][1] * qp.grads[j][1];
                    local[i * nloc + j] += qp.weight * g;
                }
            }
        }
        mirror_symmetric(local, nloc);
    })
}

/// Copy the strict upper triangle onto the lower one.
pub fn mirror_symmetric<T: Scalar>(local: &mut [T], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            local[j * n + i] = local[i * n + j];
        }
    }
}

/// Copy the conjugate of the strict upper triangle onto the lower one.
pub fn mirror_hermitian<T: Scalar>(local: &mut [T], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            local[j * n + i] = local[i * n + j].conj();
        }
    }
}
