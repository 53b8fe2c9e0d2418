//! Symmetric Gauss quadrature rules on the reference triangle
//! {(x, y) : x >= 0, y >= 0, x + y <= 1}.
//!
//! All stored rules have strictly positive weights and points inside the
//! closed triangle. Weights sum to the reference area 1/2.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    /// Reference coordinates (x, y) of the evaluation points.
    pub points: Vec<[f64; 2]>,
    /// Reference-triangle weights (sum to 1/2).
    pub weights: Vec<f64>,
    /// Highest total polynomial degree integrated exactly.
    pub exact_degree: usize,
}

/// Degrees for which a dedicated rule is stored.
pub const SUPPORTED_DEGREES: [usize; 8] = [1, 2, 4, 5, 6, 8, 10, 12];

impl QuadratureRule {
    /// Smallest stored rule with `exact_degree >= degree`.
    pub fn for_degree(degree: usize) -> Result<Self> {
        let stored = SUPPORTED_DEGREES
            .iter()
            .copied()
            .find(|&d| d >= degree)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "no quadrature rule of exact degree >= {degree} (max {})",
                    SUPPORTED_DEGREES[SUPPORTED_DEGREES.len() - 1]
                ))
            })?;
        Ok(build_rule(stored))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sum of w_i * f(p_i) over the reference triangle.
    pub fn integrate(&self, f: impl Fn([f64; 2]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }
}

struct RuleBuilder {
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl RuleBuilder {
    fn new() -> Self {
        RuleBuilder {
            points: Vec::new(),
            weights: Vec::new(),
        }
    }

    fn push_bary(&mut self, l: [f64; 3], w: f64) {
        // Reference vertices (0,0), (1,0), (0,1): x = l1, y = l2.
        self.points.push([l[1], l[2]]);
        // Published weights are normalized to total 1; reference area is 1/2.
        self.weights.push(0.5 * w);
    }

    fn centroid(&mut self, w: f64) {
        let c = 1.0 / 3.0;
        self.push_bary([c, c, c], w);
    }

    /// Orbit of (a, b, b), a + 2b = 1: three points.
    fn sym3(&mut self, a: f64, b: f64, w: f64) {
        self.push_bary([a, b, b], w);
        self.push_bary([b, a, b], w);
        self.push_bary([b, b, a], w);
    }

    /// Orbit of (a, b, c), all distinct: six points.
    fn sym6(&mut self, a: f64, b: f64, c: f64, w: f64) {
        for l in [
            [a, b, c],
            [a, c, b],
            [b, a, c],
            [b, c, a],
            [c, a, b],
            [c, b, a],
        ] {
            self.push_bary(l, w);
        }
    }

    fn finish(self, exact_degree: usize) -> QuadratureRule {
        QuadratureRule {
            points: self.points,
            weights: self.weights,
            exact_degree,
        }
    }
}

fn build_rule(degree: usize) -> QuadratureRule {
    let mut b = RuleBuilder::new();
    match degree {
        1 => {
            b.centroid(1.0);
        }
        2 => {
            b.sym3(2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0);
        }
        4 => {
            b.sym3(0.108103018168070, 0.445948490915965, 0.223381589678011);
            b.sym3(0.816847572980459, 0.091576213509771, 0.109951743655322);
        }
        5 => {
            b.centroid(0.225);
            b.sym3(0.059715871789770, 0.470142064105115, 0.132394152788506);
            b.sym3(0.797426985353087, 0.101286507323456, 0.125939180544827);
        }
        6 => {
            b.sym3(0.501426509658179, 0.249286745170910, 0.116786275726379);
            b.sym3(0.873821971016996, 0.063089014491502, 0.050844906370207);
            b.sym6(
                0.053145049844817,
                0.310352451033784,
                0.636502499121399,
                0.082851075618374,
            );
        }
        8 => {
            b.centroid(0.144315607677787);
            b.sym3(0.081414823414554, 0.459292588292723, 0.095091634267285);
            b.sym3(0.658861384496480, 0.170569307751760, 0.103217370534718);
            b.sym3(0.898905543365938, 0.050547228317031, 0.032458497623198);
            b.sym6(
                0.008394777409958,
                0.263112829634638,
                0.728492392955404,
                0.027230314174435,
            );
        }
        10 => {
            b.centroid(0.090817990382754);
            b.sym3(0.028844733232685, 0.485577633383657, 0.036725957756467);
            b.sym3(0.781036849029926, 0.109481575485037, 0.045321059435528);
            b.sym6(
                0.141707219414880,
                0.307939838764121,
                0.550352941820999,
                0.072757916845420,
            );
            b.sym6(
                0.025003534762686,
                0.246672560639903,
                0.728323904597411,
                0.028327242531057,
            );
            b.sym6(
                0.009540815400299,
                0.066803251012200,
                0.923655933587500,
                0.009421666963733,
            );
        }
        12 => {
            b.sym3(0.023565220452390, 0.488217389773805, 0.025731066440455);
            b.sym3(0.120551215411079, 0.439724392294460, 0.043692544538038);
            b.sym3(0.457579229975768, 0.271210385012116, 0.062858224217885);
            b.sym3(0.744847708916828, 0.127576145541586, 0.034796112930709);
            b.sym3(0.957365299093579, 0.021317350453210, 0.006166261051559);
            b.sym6(
                0.115343494534698,
                0.275713269685514,
                0.608943235779788,
                0.040371557766381,
            );
            b.sym6(
                0.022838332222257,
                0.281325580989940,
                0.695836086787803,
                0.022356773202303,
            );
            b.sym6(
                0.025734050548330,
                0.116251915907597,
                0.858014033544073,
                0.017316231108659,
            );
        }
        _ => unreachable!("not a stored degree: {degree}"),
    }
    b.finish(degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact integral of x^p y^q over the reference triangle: p! q! / (p+q+2)!.
    fn monomial_integral(p: u32, q: u32) -> f64 {
        let fact = |k: u32| (1..=k).map(|i| i as f64).product::<f64>();
        fact(p) * fact(q) / fact(p + q + 2)
    }

    #[test]
    fn weights_positive_and_sum_to_half() {
        for &d in &SUPPORTED_DEGREES {
            let rule = QuadratureRule::for_degree(d).unwrap();
            assert!(rule.weights.iter().all(|&w| w > 0.0), "degree {d}");
            let sum: f64 = rule.weights.iter().sum();
            assert!((sum - 0.5).abs() <= 1e-14, "degree {d}: sum {sum}");
        }
    }

    #[test]
    fn points_inside_reference_triangle() {
        for &d in &SUPPORTED_DEGREES {
            let rule = QuadratureRule::for_degree(d).unwrap();
            for &[x, y] in &rule.points {
                assert!(x >= 0.0 && y >= 0.0 && x + y <= 1.0 + 1e-15, "degree {d}");
            }
        }
    }

    #[test]
    fn monomial_exactness() {
        for &d in &SUPPORTED_DEGREES {
            let rule = QuadratureRule::for_degree(d).unwrap();
            for p in 0..=d as u32 {
                for q in 0..=(d as u32 - p) {
                    let got = rule.integrate(|[x, y]| x.powi(p as i32) * y.powi(q as i32));
                    let want = monomial_integral(p, q);
                    assert!(
                        (got - want).abs() <= 1e-13,
                        "degree {d}, x^{p} y^{q}: got {got}, want {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn integrates_constant_to_reference_area() {
        let rule = QuadratureRule::for_degree(2).unwrap();
        assert!((rule.integrate(|_| 1.0) - 0.5).abs() <= 1e-15);
    }

    #[test]
    fn integrates_xy() {
        let rule = QuadratureRule::for_degree(2).unwrap();
        let got = rule.integrate(|[x, y]| x * y);
        assert!((got - 1.0 / 24.0).abs() <= 1e-15, "got {got}");
    }

    #[test]
    fn integrates_x_fourth() {
        // Independent oracle: p! q! / (p+q+2)! gives 24/720 = 1/30.
        let rule = QuadratureRule::for_degree(4).unwrap();
        let got = rule.integrate(|[x, _]| x.powi(4));
        assert!((got - 1.0 / 30.0).abs() <= 1e-15, "got {got}");
    }

    #[test]
    fn for_degree_picks_next_stored_rule() {
        assert_eq!(QuadratureRule::for_degree(3).unwrap().exact_degree, 4);
        assert_eq!(QuadratureRule::for_degree(7).unwrap().exact_degree, 8);
        assert!(QuadratureRule::for_degree(13).is_err());
    }
}
