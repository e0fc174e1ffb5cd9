//! Henze–Wagner (BHEP) statistic built on the empirical characteristic function.
//!
//! Comparator only. With the weight `φ_β(t) = (2πβ²)^{-d/2} exp(-‖t‖²/(2β²))`,
//!
//! ```text
//! HW_{n,β} = n ∫ |ψ_n(t) - exp(-‖t‖²/2)|² φ_β(t) dt
//!          = n^{-1} Σ_{j,k} exp(-β²‖y_j - y_k‖²/2)
//!            - 2 (1+β²)^{-d/2} Σ_j exp(-β²‖y_j‖² / (2(1+β²)))
//!            + n (1+2β²)^{-d/2}
//! ```
//!
//! where `ψ_n` is the empirical characteristic function of the scaled residuals.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm_sq, CompensatedSum, ScaledResiduals};
use crate::quadrature::GaussHermite;

use super::MAX_QUADRATURE_DIM;

fn check_beta(beta_hw: f64) -> Result<()> {
    if !(beta_hw.is_finite() && beta_hw > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "HW smoothing parameter must be positive, got {beta_hw}"
        )));
    }
    Ok(())
}

/// Closed-form BHEP statistic.
pub fn hw_statistic(y: &ScaledResiduals, beta_hw: f64) -> Result<f64> {
    check_beta(beta_hw)?;
    let (n, d) = (y.n(), y.d());
    let b2 = beta_hw * beta_hw;
    let m = y.matrix();
    let mut pairs = CompensatedSum::new();
    for i in 0..n {
        let yi = m.row(i);
        let mut row = 0.0;
        for j in i + 1..n {
            let diff: f64 = yi.iter().zip(m.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            row += (-0.5 * b2 * diff).exp();
        }
        // diagonal terms are exp(0) = 1
        pairs.add(1.0 + 2.0 * row);
    }
    let singles: CompensatedSum = y
        .rows()
        .map(|r| (-b2 * norm_sq(r) / (2.0 * (1.0 + b2))).exp())
        .collect();
    let h = d as f64 / 2.0;
    let nf = n as f64;
    Ok(pairs.value() / nf - 2.0 * (1.0 + b2).powf(-h) * singles.value()
        + nf * (1.0 + 2.0 * b2).powf(-h))
}

/// The defining integral, by Gauss–Hermite after `t = √2 β u`.
pub fn hw_statistic_quadrature(y: &ScaledResiduals, beta_hw: f64, order: usize) -> Result<f64> {
    check_beta(beta_hw)?;
    let (n, d) = (y.n(), y.d());
    if d > MAX_QUADRATURE_DIM {
        return Err(Error::DimensionTooLarge {
            d,
            max: MAX_QUADRATURE_DIM,
        });
    }
    let scale = 2f64.sqrt() * beta_hw;
    let gh = GaussHermite::new(order);
    let mut t = vec![0.0; d];
    let mut total = CompensatedSum::new();
    gh.for_each_product_node(d, |u, w| {
        for (tk, uk) in t.iter_mut().zip(u) {
            *tk = uk * scale;
        }
        let (mut re, mut im) = (0.0, 0.0);
        for row in y.rows() {
            let (s, c) = dot(&t, row).sin_cos();
            re += c;
            im += s;
        }
        re = re / n as f64 - (-0.5 * norm_sq(&t)).exp();
        im /= n as f64;
        total.add(w * (re * re + im * im));
    });
    Ok(n as f64 * PI.powf(-(d as f64) / 2.0) * total.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{scale_residuals, Matrix, Sample};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn all_zero_collapse() {
        // 1 - 2/√2 + 1/√3
        let y = ScaledResiduals::from_raw(Matrix::zeros(1, 1));
        let expected = 1.0 - 2.0 / 2f64.sqrt() + 1.0 / 3f64.sqrt();
        let v = hw_statistic(&y, 1.0).unwrap();
        assert!((v - expected).abs() < 1e-15);
        let q = hw_statistic_quadrature(&y, 1.0, 64).unwrap();
        assert!((q - expected).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for &(n, d, b) in &[(15usize, 1usize, 1.0), (12, 1, 0.5), (10, 2, 0.5)] {
            let v = (0..n * d).map(|_| rng.sample::<f64, _>(StandardNormal).powi(3)).collect();
            let y = scale_residuals(&Sample::new(Matrix::from_vec(n, d, v)).unwrap()).unwrap();
            let closed = hw_statistic(&y, b).unwrap();
            let quad = hw_statistic_quadrature(&y, b, 80).unwrap();
            assert!((closed - quad).abs() < 1e-6, "n={n} d={d}: {closed} vs {quad}");
        }
    }

    #[test]
    fn rejects_non_positive_beta() {
        let y = ScaledResiduals::from_raw(Matrix::zeros(2, 1));
        assert!(hw_statistic(&y, 0.0).is_err());
    }
}
