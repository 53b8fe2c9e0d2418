//! Shared fixtures and independent oracles for the acceptance suite.

use num_complex::Complex64;

use glsav::harness::{audit_result, AuditSummary, SimConfig};
use glsav::quadrature::QuadratureRule;
use glsav::shapes::eval_shapes;
use glsav::stepper::SimResult;
use glsav::system::{ComplexField, PhysParams, VectorField};
use glsav::Mesh;

/// Dense complex Gaussian elimination with partial pivoting.
pub fn dense_solve_complex(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
            .unwrap();
        a.swap(k, piv);
        b.swap(k, piv);
        assert!(a[k][k].norm() > 0.0, "singular oracle system");
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                let akj = a[k][j];
                a[i][j] -= f * akj;
            }
            let bk = b[k];
            b[i] -= f * bk;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in (i + 1)..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    x
}

/// Free-energy oracle: direct degree-12 quadrature over the mesh with its own
/// affine maps, independent of the solver's cached geometry.
pub fn energy_oracle(
    mesh: &Mesh,
    tri_dofs: &[Vec<usize>],
    order: usize,
    psi: &ComplexField,
    a: &VectorField,
    p: &PhysParams,
) -> f64 {
    let rule = QuadratureRule::for_degree(12).unwrap();
    let shapes: Vec<_> = rule.points.iter().map(|&q| eval_shapes(order, q)).collect();
    let nloc = if order == 1 { 3 } else { 6 };
    let mut total = 0.0;
    for (t, &[va, vb, vc]) in mesh.triangles.iter().enumerate() {
        let pa = mesh.vertices[va];
        let pb = mesh.vertices[vb];
        let pc = mesh.vertices[vc];
        let j = [
            [pb[0] - pa[0], pc[0] - pa[0]],
            [pb[1] - pa[1], pc[1] - pa[1]],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let jinv_t = [
            [j[1][1] / det, -j[1][0] / det],
            [-j[0][1] / det, j[0][0] / det],
        ];
        for (k, sh) in shapes.iter().enumerate() {
            let w = rule.weights[k] * det;
            let mut psi_v = Complex64::new(0.0, 0.0);
            let mut gps = [Complex64::new(0.0, 0.0); 2];
            let mut av = [0.0f64; 2];
            let mut div = 0.0;
            let mut curl = 0.0;
            for l in 0..nloc {
                let d = tri_dofs[t][l];
                let g = [
                    jinv_t[0][0] * sh.grads[l][0] + jinv_t[0][1] * sh.grads[l][1],
                    jinv_t[1][0] * sh.grads[l][0] + jinv_t[1][1] * sh.grads[l][1],
                ];
                psi_v += psi.coeffs[d] * sh.values[l];
                gps[0] += psi.coeffs[d] * g[0];
                gps[1] += psi.coeffs[d] * g[1];
                av[0] += a.x[d] * sh.values[l];
                av[1] += a.y[d] * sh.values[l];
                div += a.x[d] * g[0] + a.y[d] * g[1];
                curl += a.y[d] * g[0] - a.x[d] * g[1];
            }
            let ik = Complex64::new(0.0, 1.0 / p.kappa);
            let cx = ik * gps[0] + psi_v * av[0];
            let cy = ik * gps[1] + psi_v * av[1];
            let dev = psi_v.norm_sqr() - 1.0;
            let b = curl - p.h_applied;
            total += w * (cx.norm_sqr() + cy.norm_sqr() + 0.5 * dev * dev + b * b + div * div);
        }
    }
    total
}

pub struct NamedRun {
    pub name: &'static str,
    pub config: SimConfig,
    pub result: SimResult,
    pub audit: AuditSummary,
}

/// The scaled runs shared by the stability criteria: both square presets at
/// n = 16, T = 2, a multiconnected run exercising the two-loop constraints,
/// and the stationary configuration.
pub fn audit_runs() -> &'static Vec<NamedRun> {
    use std::sync::OnceLock;
    static RUNS: OnceLock<Vec<NamedRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let mut runs = Vec::new();
        for (name, config) in [
            ("square_kappa1", SimConfig::square(1.0).scaled(16, 2.0)),
            ("square_kappa10", SimConfig::square(10.0).scaled(16, 2.0)),
            (
                "multiconnected_kappa10",
                SimConfig::multiconnected(10.0).scaled(12, 1.0),
            ),
            ("stationary", stationary_config()),
        ] {
            let (result, _) = glsav::run(&config).unwrap_or_else(|e| {
                panic!("run {name} aborted: {e}");
            });
            let audit = audit_result(&result, config.eta);
            runs.push(NamedRun {
                name,
                config,
                result,
                audit,
            });
        }
        runs
    })
}

pub fn stationary_config() -> SimConfig {
    let mut c = SimConfig::square(1.0).scaled(16, 1.0);
    c.h_applied = 0.0;
    c.psi0 = Complex64::new(1.0, 0.0);
    c
}

pub fn line(criterion: &str, pass: bool, detail: &str) {
    println!(
        "[acceptance] {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}
