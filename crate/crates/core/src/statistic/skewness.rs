//! Sample skewness and kurtosis of scaled residuals.
//!
//! As `β → ∞`, `β^{3+d/2} · 96 T_{n,β} / (n π^{d/2})` tends to `2 b_{1,d} + 3 b̃_{1,d}`,
//! a combination of Mardia's and Móri–Rohatgi–Székely's skewness.

use crate::linalg::{dot, norm_sq, CompensatedSum, ScaledResiduals};

/// Mardia's skewness `b_{1,d} = n^{-2} Σ_{j,k} (y_jᵀ y_k)³`.
pub fn mardia_skewness(y: &ScaledResiduals) -> f64 {
    let n = y.n();
    let m = y.matrix();
    let mut acc = CompensatedSum::new();
    for i in 0..n {
        let yi = m.row(i);
        acc.add(norm_sq(yi).powi(3));
        let mut row = 0.0;
        for j in i + 1..n {
            row += dot(yi, m.row(j)).powi(3);
        }
        acc.add(2.0 * row);
    }
    acc.value() / (n * n) as f64
}

/// Móri–Rohatgi–Székely skewness `‖n^{-1} Σ_j y_j ‖y_j‖²‖²`.
///
/// This equals the double sum `n^{-2} Σ_{j,k} y_jᵀ y_k ‖y_j‖² ‖y_k‖²`.
pub fn mrs_skewness(y: &ScaledResiduals) -> f64 {
    let (n, d) = (y.n(), y.d());
    let mut v = vec![CompensatedSum::new(); d];
    for row in y.rows() {
        let s = norm_sq(row);
        for (acc, x) in v.iter_mut().zip(row) {
            acc.add(x * s);
        }
    }
    v.iter().map(|a| (a.value() / n as f64).powi(2)).sum()
}

/// Mardia's kurtosis `b_{2,d} = n^{-1} Σ_j ‖y_j‖⁴`.
pub fn mardia_kurtosis(y: &ScaledResiduals) -> f64 {
    let s: CompensatedSum = y.rows().map(|r| norm_sq(r).powi(2)).collect();
    s.value() / y.n() as f64
}

/// `2 b_{1,d} + 3 b̃_{1,d}`.
pub fn skewness_limit_statistic(y: &ScaledResiduals) -> f64 {
    2.0 * mardia_skewness(y) + 3.0 * mrs_skewness(y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewnessSummary {
    pub b1d: f64,
    pub b1d_tilde: f64,
    pub b2d: f64,
    pub limit_combo: f64,
}

impl SkewnessSummary {
    pub fn compute(y: &ScaledResiduals) -> Self {
        let b1d = mardia_skewness(y);
        let b1d_tilde = mrs_skewness(y);
        Self {
            b1d,
            b1d_tilde,
            b2d: mardia_kurtosis(y),
            limit_combo: 2.0 * b1d + 3.0 * b1d_tilde,
        }
    }

    /// Soft check: for standardized data Cauchy–Schwarz gives `b_{2,d} ≥ d²`.
    pub fn kurtosis_bound_holds(&self, d: usize) -> bool {
        self.b2d >= (d * d) as f64 * (1.0 - 1e-10)
    }
}
