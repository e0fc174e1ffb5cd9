//! Moments of the limiting null distribution `T_{∞,β} = ‖W‖²`, where `W` is the
//! centred Gaussian process with covariance kernel [`kernel_c`].

use std::f64::consts::PI;

use super::Beta;
use crate::error::Result;
use crate::linalg::{dot, norm_sq};

/// `C(s,t) = exp((‖s‖²+‖t‖²)/2) (e^{sᵀt} - 1 - sᵀt - (sᵀt)²/2)`.
pub fn kernel_c(s: &[f64], t: &[f64]) -> f64 {
    let x = dot(s, t);
    let scale = (0.5 * (norm_sq(s) + norm_sq(t))).exp();
    scale * exp_taylor_remainder3(x)
}

/// `e^x - 1 - x - x²/2`, accurate near zero.
fn exp_taylor_remainder3(x: f64) -> f64 {
    if x.abs() < 0.1 {
        // x³/6 + x⁴/24 + ... summed until negligible
        let mut term = x * x * x / 6.0;
        let mut sum = 0.0f64;
        let mut k = 3.0;
        while term.abs() > 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            sum += term;
            k += 1.0;
            term *= x / k;
        }
        sum
    } else {
        x.exp_m1() - x - 0.5 * x * x
    }
}

/// `E(T_{∞,β}) = ∫ C(t,t) exp(-β‖t‖²) dt`.
pub fn asymptotic_mean(d: usize, beta: Beta) -> Result<f64> {
    beta.require_asymptotic()?;
    let b = beta.value();
    let h = d as f64 / 2.0;
    let df = d as f64;
    let g = b - 1.0;
    Ok(PI.powf(h)
        * ((b - 2.0).powf(-h)
            - g.powf(-h)
            - df / (2.0 * g.powf(h + 1.0))
            - df * (df + 2.0) / (8.0 * g.powf(h + 2.0))))
}

/// `V(T_{∞,β}) = 2 ∬ C(s,t)² exp(-β‖s‖²) exp(-β‖t‖²) ds dt`.
pub fn asymptotic_variance(d: usize, beta: Beta) -> Result<f64> {
    beta.require_asymptotic()?;
    let b = beta.value();
    let h = d as f64 / 2.0;
    let df = d as f64;
    let g = b - 1.0;
    let eta = beta.eta();
    let two_d = 2f64.powi(d as i32);
    let cross = 2.0 * two_d / eta.powf(h)
        + 3.0 * df * two_d / eta.powf(h + 1.0)
        + df * (df + 2.0) * two_d / eta.powf(h + 2.0);
    let square = g.powf(-df)
        + df / (2.0 * g.powf(df + 2.0))
        + 3.0 * df * (df + 2.0) / (64.0 * g.powf(df + 4.0));
    Ok(2.0 * PI.powf(df) * ((b * (b - 2.0)).powf(-h) - cross + square))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{radial_rule, GaussHermite};

    fn beta(v: f64) -> Beta {
        Beta::new(v).unwrap()
    }

    /// ∫ C(t,t) e^{-β‖t‖²} dt with t = u/√(β-2); the leftover factor
    /// `1 - e^{-r}(1 + r + r²/2)` is bounded.
    fn mean_oracle(d: usize, b: f64, order: usize) -> f64 {
        let gh = GaussHermite::new(order);
        let scale = 1.0 / (b - 2.0).sqrt();
        let mut total = 0.0;
        gh.for_each_product_node(d, |u, w| {
            let r = norm_sq(u) * scale * scale;
            total += w * (1.0 - (-r).exp() * (1.0 + r + 0.5 * r * r));
        });
        total * (b - 2.0).powf(-(d as f64) / 2.0)
    }

    /// 2 ∬ C² w w in rotated coordinates p = (s+t)/√2, q = (s-t)/√2, with
    /// p = u/√(β-2), q = v/√(β-1); the leftover factor
    /// `e^{-‖p‖²}(e^x - 1 - x - x²/2)²`, x = (‖p‖² - ‖q‖²)/2, is bounded by a polynomial.
    fn variance_oracle(d: usize, b: f64, order: usize) -> f64 {
        let gh = GaussHermite::new(order);
        let sp = 1.0 / (b - 2.0).sqrt();
        let sq = 1.0 / (b - 1.0).sqrt();
        let mut total = 0.0;
        gh.for_each_product_node(2 * d, |uv, w| {
            let p2 = norm_sq(&uv[..d]) * sp * sp;
            let q2 = norm_sq(&uv[d..]) * sq * sq;
            let x = 0.5 * (p2 - q2);
            total += w * (-p2).exp() * exp_taylor_remainder3(x).powi(2);
        });
        2.0 * total * ((b - 2.0) * (b - 1.0)).powf(-(d as f64) / 2.0)
    }

    /// Same integral reduced to radii: the integrand only depends on ‖p‖², ‖q‖².
    fn variance_oracle_radial(d: usize, b: f64, order: usize) -> f64 {
        let rp = radial_rule(d, b - 2.0, order);
        let rq = radial_rule(d, b - 1.0, order);
        let mut total = 0.0;
        for &(p2, wp) in &rp {
            for &(q2, wq) in &rq {
                let x = 0.5 * (p2 - q2);
                total += wp * wq * (-p2).exp() * exp_taylor_remainder3(x).powi(2);
            }
        }
        2.0 * total
    }

    #[test]
    fn kernel_basic_properties() {
        assert_eq!(kernel_c(&[0.0, 0.0], &[0.7, -1.2]), 0.0);
        let s = [0.3, -0.4];
        let t = [1.1, 0.2];
        assert_eq!(kernel_c(&s, &t), kernel_c(&t, &s));
        for r in [0.5f64, 1.0, 2.0] {
            let tt = [r, 0.0];
            let r2: f64 = r * r;
            let expect = r2.exp() * (r2.exp() - 1.0 - r2 - r2 * r2 / 2.0);
            assert!(kernel_c(&tt, &tt) >= 0.0);
            assert!((kernel_c(&tt, &tt) - expect).abs() <= 1e-12 * expect.abs().max(1e-300) + 1e-18);
        }
    }

    #[test]
    fn mean_hand_value() {
        let expected = PI.sqrt()
            * (1.0 - 1.0 / 2f64.sqrt() - 1.0 / (2.0 * 2f64.powf(1.5)) - 3.0 / (8.0 * 2f64.powf(2.5)));
        let v = asymptotic_mean(1, beta(3.0)).unwrap();
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.0883126).abs() < 1e-6);
    }

    #[test]
    fn mean_matches_kernel_integral() {
        for d in 1..=3 {
            for b in [2.5, 3.0, 4.0, 6.0] {
                let f = asymptotic_mean(d, beta(b)).unwrap();
                let o = mean_oracle(d, b, 64);
                assert!(((f - o) / o).abs() < 1e-8, "d={d} beta={b}: {f} vs {o}");
            }
        }
    }

    #[test]
    fn mean_decreases_to_zero() {
        for d in 1..=5 {
            let mut prev = f64::INFINITY;
            for b in [2.5, 3.0, 5.0, 10.0, 100.0, 1e4] {
                let v = asymptotic_mean(d, beta(b)).unwrap();
                assert!(v > 0.0 && v < prev);
                prev = v;
            }
            assert!(prev < 1e-10);
        }
    }

    #[test]
    fn moments_need_beta_above_two() {
        assert!(asymptotic_mean(2, beta(2.0)).is_err());
        assert!(asymptotic_variance(2, beta(1.5)).is_err());
    }

    #[test]
    fn variance_matches_kernel_integral() {
        for d in 1..=3 {
            for b in [2.5, 3.0, 4.0, 6.0] {
                let f = asymptotic_variance(d, beta(b)).unwrap();
                let o = variance_oracle_radial(d, b, 80);
                assert!(((f - o) / o).abs() < 1e-6, "d={d} beta={b}: {f} vs {o}");
            }
        }
        for (d, order) in [(1, 64), (2, 40)] {
            for b in [2.5, 3.0, 4.0, 6.0] {
                let f = asymptotic_variance(d, beta(b)).unwrap();
                let o = variance_oracle(d, b, order);
                assert!(((f - o) / o).abs() < 1e-6, "d={d} beta={b}: {f} vs {o}");
            }
        }
    }

    #[test]
    fn cross_term_coefficient() {
        // The η^{-d/2-1} coefficient is 3d·2^d. The variant (1+2d)·2^d coincides
        // with it only for d = 1 and misses the kernel integral for d >= 2.
        let b = 3.0;
        let eta: f64 = 15.0;
        let f = asymptotic_variance(2, beta(b)).unwrap();
        let variant = f - 2.0 * PI.powi(2) * (5.0 - 6.0) * 4.0 / eta.powi(2);
        let o = variance_oracle_radial(2, b, 80);
        assert!(((f - o) / o).abs() < 1e-9);
        assert!(((variant - o) / o).abs() > 0.1);
    }

    #[test]
    fn variance_positive_on_grid() {
        for d in 1..=10 {
            for b in [2.05, 2.1, 2.5, 3.0, 4.0, 6.0, 10.0, 50.0] {
                assert!(asymptotic_variance(d, beta(b)).unwrap() > 0.0, "d={d} b={b}");
            }
        }
    }
}
