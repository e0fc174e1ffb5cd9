//! Gaussian quadrature rules: Gauss–Hermite for integrals against
//! `exp(-‖u‖²)` on `R^d`, and generalized Gauss–Laguerre for radial integrals.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

/// Nodes and weights of the `order`-point rule for `∫ f(x) e^{-x²} dx`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Newton iteration on the orthonormal Hermite recurrence.
    ///
    /// Panics if `order == 0`.
    pub fn new(order: usize) -> Self {
        assert!(order > 0, "quadrature order must be positive");
        let n = order;
        let pim4 = PI.powf(-0.25);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 0..m {
            // standard asymptotic starting guesses for the largest roots first
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `∫ f(x) e^{-x²} dx` in one dimension.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Visits every node of the `d`-fold product rule with its weight.
    pub fn for_each_product_node(&self, d: usize, mut visit: impl FnMut(&[f64], f64)) {
        let m = self.order();
        let mut idx = vec![0usize; d];
        let mut point = vec![0.0; d];
        loop {
            let mut w = 1.0;
            for (k, &i) in idx.iter().enumerate() {
                point[k] = self.nodes[i];
                w *= self.weights[i];
            }
            visit(&point, w);
            // odometer increment
            let mut k = 0;
            loop {
                if k == d {
                    return;
                }
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

/// Nodes and weights of the `order`-point rule for `∫_0^∞ f(x) x^α e^{-x} dx`.
#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub alpha: f64,
}

impl GaussLaguerre {
    /// Panics if `order == 0` or `alpha <= -1`.
    pub fn new(order: usize, alpha: f64) -> Self {
        assert!(order > 0, "quadrature order must be positive");
        assert!(alpha > -1.0, "alpha must exceed -1");
        let n = order;
        let nf = n as f64;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let mut z = 0.0f64;
        for i in 0..n {
            z = match i {
                0 => (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * nf + 1.8 * alpha),
                1 => z + (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * nf),
                _ => {
                    let ai = (i - 1) as f64;
                    z + ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alpha / (1.0 + 3.5 * ai))
                        * (z - nodes[i - 2])
                        / (1.0 + 0.3 * alpha)
                }
            };
            let (mut pp, mut p2) = (0.0, 0.0);
            for _ in 0..200 {
                let mut p1 = 1.0;
                p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = ((2.0 * jf - 1.0 + alpha - z) * p2 - (jf - 1.0 + alpha) * p3) / jf;
                }
                pp = (nf * p1 - (nf + alpha) * p2) / z;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs() {
                    break;
                }
            }
            nodes[i] = z;
            weights[i] = -(ln_gamma(alpha + nf) - ln_gamma(nf)).exp() / (pp * nf * p2);
        }
        Self {
            nodes,
            weights,
            alpha,
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `∫_{R^d} h(‖p‖²) e^{-a‖p‖²} dp` expressed as a one-dimensional Laguerre rule:
/// returns `(r_k, w_k)` with `∫ ≈ Σ_k w_k h(r_k)`.
pub fn radial_rule(d: usize, a: f64, order: usize) -> Vec<(f64, f64)> {
    let half = d as f64 / 2.0;
    let gl = GaussLaguerre::new(order, half - 1.0);
    let norm = PI.powf(half) / statrs::function::gamma::gamma(half) * a.powf(-half);
    gl.nodes
        .iter()
        .zip(&gl.weights)
        .map(|(&z, &w)| (z / a, w * norm))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_sqrt_pi() {
        for order in [1, 2, 5, 20, 64, 128] {
            let gh = GaussHermite::new(order);
            let s: f64 = gh.weights.iter().sum();
            assert!((s - PI.sqrt()).abs() < 1e-12, "order {order}: {s}");
        }
    }

    #[test]
    fn exact_for_polynomials() {
        let gh = GaussHermite::new(10);
        // ∫ x^2 e^{-x²} = √π/2, ∫ x^4 e^{-x²} = 3√π/4, ∫ x^18 e^{-x²} = 17!!/2^9 √π
        assert!((gh.integrate(|x| x * x) - PI.sqrt() / 2.0).abs() < 1e-13);
        assert!((gh.integrate(|x| x.powi(4)) - 0.75 * PI.sqrt()).abs() < 1e-13);
        let dfact: f64 = (1..=17).step_by(2).map(|k| k as f64).product();
        let exact = dfact / 2f64.powi(9) * PI.sqrt();
        assert!((gh.integrate(|x| x.powi(18)) / exact - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_shift_integral() {
        // ∫ e^{2x} e^{-x²} dx = √π e
        let gh = GaussHermite::new(40);
        let v = gh.integrate(|x| (2.0 * x).exp());
        assert!((v / (PI.sqrt() * 1f64.exp()) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn product_rule_visits_all_nodes() {
        let gh = GaussHermite::new(7);
        let mut count = 0;
        let mut total = 0.0;
        gh.for_each_product_node(3, |_, w| {
            count += 1;
            total += w;
        });
        assert_eq!(count, 343);
        assert!((total - PI.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn laguerre_moments() {
        for alpha in [0.0, -0.5, 0.5, 1.5] {
            let gl = GaussLaguerre::new(30, alpha);
            // ∫ x^k x^α e^{-x} dx = Γ(α + k + 1)
            for k in 0..5 {
                let v = gl.integrate(|x| x.powi(k));
                let exact = statrs::function::gamma::gamma(alpha + k as f64 + 1.0);
                assert!((v / exact - 1.0).abs() < 1e-12, "alpha={alpha} k={k}");
            }
        }
    }

    #[test]
    fn radial_rule_gaussian_volume() {
        // ∫_{R^d} e^{-a‖p‖²} dp = (π/a)^{d/2}
        for d in 1..=4 {
            let rule = radial_rule(d, 2.5, 20);
            let v: f64 = rule.iter().map(|(_, w)| w).sum();
            assert!((v / (PI / 2.5).powf(d as f64 / 2.0) - 1.0).abs() < 1e-12);
        }
    }
}
