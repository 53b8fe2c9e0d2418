//! Free energy, modulus statistics and vortex diagnostics of the FE fields.

use num_complex::Complex64;

use crate::assemble::FemSpace;
use crate::error::Result;
use crate::mesh::{DofMap, Mesh};
use crate::quadrature::QuadratureRule;
use crate::shapes::eval_shapes;
use crate::system::{ComplexField, PhysParams, VectorField};

/// Free energy split into its four nonnegative integrands:
/// kinetic |（i/kappa) grad psi + A psi|^2, condensation (|psi|^2-1)^2 / 2,
/// magnetic |curl A - H|^2 and gauge |div A|^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub condensation: f64,
    pub magnetic: f64,
    pub gauge: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    fn new(kinetic: f64, condensation: f64, magnetic: f64, gauge: f64) -> Self {
        EnergyBreakdown {
            kinetic,
            condensation,
            magnetic,
            gauge,
            total: kinetic + condensation + magnetic + gauge,
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }
}

/// Quadrature degree used for energy evaluation: (|psi|^2 - 1)^2 with P2 psi
/// has total degree 8.
pub const ENERGY_QUAD_DEGREE: usize = 8;

/// Evaluate the free energy with its own degree-8 rule (independent of the
/// assembly rule; both integrate the P1/P2 integrands exactly).
pub fn energy(
    space: &FemSpace,
    psi: &ComplexField,
    a: &VectorField,
    p: &PhysParams,
) -> Result<EnergyBreakdown> {
    let rule = QuadratureRule::for_degree(ENERGY_QUAD_DEGREE)?;
    let order = space.dofmap.order;
    let shapes: Vec<_> = rule.points.iter().map(|&q| eval_shapes(order, q)).collect();
    let nloc = space.n_local();
    let inv_k = 1.0 / p.kappa;

    let mut kinetic = 0.0;
    let mut condensation = 0.0;
    let mut magnetic = 0.0;
    let mut gauge = 0.0;
    for tri in 0..space.mesh.n_triangles() {
        let dofs = &space.dofmap.tri_dofs[tri];
        let det_j = space.jacobian_det(tri);
        for (k, shape) in shapes.iter().enumerate() {
            let w = rule.weights[k] * det_j;
            let mut psi_v = Complex64::new(0.0, 0.0);
            let mut gpsi = [Complex64::new(0.0, 0.0); 2];
            let mut av = [0.0f64; 2];
            let mut div = 0.0f64;
            let mut curl = 0.0f64;
            for l in 0..nloc {
                let d = dofs[l];
                let phi = shape.values[l];
                let g = space.map_gradient(tri, shape.grads[l]);
                let c = psi.coeffs[d];
                psi_v += c * phi;
                gpsi[0] += c * g[0];
                gpsi[1] += c * g[1];
                av[0] += a.x[d] * phi;
                av[1] += a.y[d] * phi;
                div += a.x[d] * g[0] + a.y[d] * g[1];
                curl += a.y[d] * g[0] - a.x[d] * g[1];
            }
            let cx = Complex64::new(0.0, inv_k) * gpsi[0] + psi_v * av[0];
            let cy = Complex64::new(0.0, inv_k) * gpsi[1] + psi_v * av[1];
            kinetic += w * (cx.norm_sqr() + cy.norm_sqr());
            let dev = psi_v.norm_sqr() - 1.0;
            condensation += w * 0.5 * dev * dev;
            let b = curl - p.h_applied;
            magnetic += w * b * b;
            gauge += w * div * div;
        }
    }
    Ok(EnergyBreakdown::new(kinetic, condensation, magnetic, gauge))
}

/// Maximum of |psi| over the dof coefficients (nodal convention).
pub fn max_modulus(psi: &ComplexField) -> f64 {
    psi.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Number of connected components (by shared triangle edges) of the region
/// where the vertex-averaged |psi| drops below the threshold.
pub fn vortex_count(psi: &ComplexField, mesh: &Mesh, dofmap: &DofMap, threshold: f64) -> usize {
    assert_eq!(dofmap.n_vertices, mesh.n_vertices());
    let low: Vec<bool> = mesh
        .triangles
        .iter()
        .map(|&[a, b, c]| {
            let avg =
                (psi.coeffs[a].norm() + psi.coeffs[b].norm() + psi.coeffs[c].norm()) / 3.0;
            avg < threshold
        })
        .collect();
    // Triangle adjacency through shared edges.
    let mut edge_owner: std::collections::HashMap<(usize, usize), usize> =
        std::collections::HashMap::new();
    let mut parent: Vec<usize> = (0..mesh.n_triangles()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (t, &[a, b, c]) in mesh.triangles.iter().enumerate() {
        if !low[t] {
            continue;
        }
        for (i, j) in [(a, b), (b, c), (c, a)] {
            let key = if i < j { (i, j) } else { (j, i) };
            match edge_owner.get(&key) {
                Some(&other) if low[other] => {
                    let (ra, rb) = (find(&mut parent, t), find(&mut parent, other));
                    if ra != rb {
                        parent[ra] = rb;
                    }
                }
                _ => {
                    edge_owner.insert(key, t);
                }
            }
        }
    }
    (0..mesh.n_triangles())
        .filter(|&t| low[t] && find(&mut parent, t) == t)
        .count()
}
