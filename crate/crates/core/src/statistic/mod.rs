//! The weighted L² statistic `T_{n,β}` built on the empirical moment
//! generating function of scaled residuals.
//!
//! `T_{n,β} = n ∫ (M_n(t) - exp(‖t‖²/2))² exp(-β‖t‖²) dt`, where `M_n` is the
//! empirical MGF of the residuals. The integral has a closed form in terms of
//! the residual norms and pairwise inner products, so the statistic costs
//! `O(n² d)` time and `O(n d)` memory. [`tn_beta_quadrature`] evaluates the
//! defining integral numerically and serves as an independent check.

mod asymptotic;
mod bhep;
mod skewness;

pub use asymptotic::{asymptotic_mean, asymptotic_variance, kernel_c};
pub use bhep::{hw_statistic, hw_statistic_quadrature};
pub use skewness::{
    mardia_kurtosis, mardia_skewness, mrs_skewness, skewness_limit_statistic, SkewnessSummary,
};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm_sq, CompensatedSum, ScaledResiduals};
use crate::quadrature::GaussHermite;

/// Largest argument for which `exp` stays finite.
const MAX_EXP_ARG: f64 = 709.0;

/// Rows beyond which the inner pair sums also use compensated summation.
const COMPENSATED_INNER_THRESHOLD: usize = 10_000;

/// Decay parameter of the Gaussian weight `exp(-β‖t‖²)`.
///
/// Any `β > 1` gives a finite statistic; the asymptotic null theory needs `β > 2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Beta(f64);

impl Beta {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 1.0) {
            return Err(Error::BetaOutOfRange {
                value,
                requirement: "beta must be finite and > 1",
            });
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// True when the limiting null distribution exists (`β > 2`).
    pub fn asymptotics_valid(self) -> bool {
        self.0 > 2.0
    }

    /// `β - 1`, the decay left after absorbing the normal MGF into the weight.
    pub fn gamma(self) -> f64 {
        self.0 - 1.0
    }

    /// `4(β - 1)² - 1`.
    pub fn eta(self) -> f64 {
        4.0 * (self.0 - 1.0).powi(2) - 1.0
    }

    pub(crate) fn require_asymptotic(self) -> Result<()> {
        if self.asymptotics_valid() {
            Ok(())
        } else {
            Err(Error::BetaOutOfRange {
                value: self.0,
                requirement: "asymptotic null moments need beta > 2",
            })
        }
    }
}

impl TryFrom<f64> for Beta {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Beta::new(value)
    }
}

/// A computed value of the statistic on both reporting scales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatisticValue {
    /// `T_{n,β}` itself.
    pub t_raw: f64,
    /// `π^{-d/2} T_{n,β}`, the scale critical-value tables are reported on.
    pub t_scaled: f64,
    pub n: usize,
    pub d: usize,
    pub beta: Beta,
}

impl StatisticValue {
    fn new(t_raw: f64, n: usize, d: usize, beta: Beta) -> Self {
        Self {
            t_raw,
            t_scaled: t_raw / pi_pow_half(d),
            n,
            d,
            beta,
        }
    }
}

/// `π^{d/2}`.
pub fn pi_pow_half(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0)
}

/// Closed-form `T_{n,β}`.
///
/// The symmetric double sum is folded: each pair `i < j` is visited once and
/// doubled, diagonal terms use `exp(‖y_j‖²/β)` directly.
pub fn compute_tn_beta(y: &ScaledResiduals, beta: Beta) -> Result<StatisticValue> {
    let (n, d) = (y.n(), y.d());
    let b = beta.value();
    let m = y.matrix();
    let sq: Vec<f64> = y.rows().map(norm_sq).collect();
    if sq.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSample("residuals contain non-finite values".into()));
    }
    let max_sq = sq.iter().copied().fold(0.0, f64::max);
    // ‖y_i + y_j‖² ≤ 4 max‖y‖², so the largest exponent is max‖y‖²/β
    let max_exponent = max_sq / b;
    if max_exponent > MAX_EXP_ARG {
        return Err(Error::NonFiniteResult {
            exponent: max_exponent,
        });
    }

    let quarter: Vec<f64> = sq.iter().map(|s| (s / (4.0 * b)).exp()).collect();
    let half_inv = 1.0 / (2.0 * b);
    let mut pairs = CompensatedSum::new();
    for i in 0..n {
        pairs.add((sq[i] / b).exp());
        let yi = m.row(i);
        let row_sum = if n > COMPENSATED_INNER_THRESHOLD {
            let mut acc = CompensatedSum::new();
            for j in i + 1..n {
                acc.add(quarter[j] * (dot(yi, m.row(j)) * half_inv).exp());
            }
            acc.value()
        } else {
            let mut acc = 0.0;
            for j in i + 1..n {
                acc += quarter[j] * (dot(yi, m.row(j)) * half_inv).exp();
            }
            acc
        };
        pairs.add(2.0 * quarter[i] * row_sum);
    }

    let singles: CompensatedSum = sq.iter().map(|s| (s / (4.0 * b - 2.0)).exp()).collect();

    let half_d = d as f64 / 2.0;
    let nf = n as f64;
    let term_pairs = b.powf(-half_d) * pairs.value() / nf;
    let term_const = nf * (b - 1.0).powf(-half_d);
    let term_single = 2.0 * (b - 0.5).powf(-half_d) * singles.value();
    let bracket = (term_pairs + term_const) - term_single;
    let t_raw = (pi_pow_half(d) * bracket).max(0.0);
    if !t_raw.is_finite() {
        return Err(Error::NonFiniteResult {
            exponent: max_exponent,
        });
    }
    Ok(StatisticValue::new(t_raw, n, d, beta))
}

/// Largest dimension [`tn_beta_quadrature`] accepts.
pub const MAX_QUADRATURE_DIM: usize = 3;

/// Default Gauss–Hermite order per axis for the quadrature oracles.
pub const DEFAULT_QUADRATURE_ORDER: usize = 64;

/// `n ∫ (M_n(t) - m(t))² exp(-β‖t‖²) dt` by a product Gauss–Hermite rule.
///
/// Uses `(M_n - m)² e^{-β‖t‖²} = (M_n e^{-‖t‖²/2} - 1)² e^{-(β-1)‖t‖²}` and the
/// substitution `t = u / √(β-1)`, which leaves a bounded, smooth integrand.
pub fn tn_beta_quadrature(y: &ScaledResiduals, beta: Beta, quad_order: usize) -> Result<f64> {
    let (n, d) = (y.n(), y.d());
    if d > MAX_QUADRATURE_DIM {
        return Err(Error::DimensionTooLarge {
            d,
            max: MAX_QUADRATURE_DIM,
        });
    }
    let gamma = beta.gamma();
    let scale = 1.0 / gamma.sqrt();
    let gh = GaussHermite::new(quad_order);
    let mut t = vec![0.0; d];
    let mut total = CompensatedSum::new();
    gh.for_each_product_node(d, |u, w| {
        for (tk, uk) in t.iter_mut().zip(u) {
            *tk = uk * scale;
        }
        let half_t2 = 0.5 * norm_sq(&t);
        let a_n: f64 = y.rows().map(|row| (dot(&t, row) - half_t2).exp()).sum::<f64>() / n as f64;
        total.add(w * (a_n - 1.0).powi(2));
    });
    Ok(n as f64 * gamma.powf(-(d as f64) / 2.0) * total.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{scale_residuals, Matrix, Sample};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_residuals(seed: u64, n: usize, d: usize) -> ScaledResiduals {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..n * d)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                z + 0.3 * z * z
            })
            .collect();
        scale_residuals(&Sample::new(Matrix::from_vec(n, d, data)).unwrap()).unwrap()
    }

    #[test]
    fn beta_validation() {
        assert!(Beta::new(1.0).is_err());
        assert!(Beta::new(f64::NAN).is_err());
        assert!(Beta::new(1.5).is_ok());
        assert!(!Beta::new(2.0).unwrap().asymptotics_valid());
        assert!(Beta::new(2.1).unwrap().asymptotics_valid());
        assert_eq!(Beta::new(3.0).unwrap().eta(), 15.0);
    }

    #[test]
    fn all_zero_residual_collapse() {
        // √π (1/√2 + 1 - 2/√1.5)
        let expected = PI.sqrt() * (0.5f64.sqrt() + 1.0 - 2.0 / 1.5f64.sqrt());
        assert!((expected - 0.131363).abs() < 1e-6);
        let y = ScaledResiduals::from_raw(Matrix::zeros(1, 1));
        let beta = Beta::new(2.0).unwrap();
        let t = compute_tn_beta(&y, beta).unwrap();
        assert!((t.t_raw - expected).abs() < 1e-15);
        let q = tn_beta_quadrature(&y, beta, 64).unwrap();
        assert!((q - expected).abs() < 1e-12);
    }

    #[test]
    fn scaled_value_is_raw_over_pi_power() {
        let y = random_residuals(1, 30, 3);
        let t = compute_tn_beta(&y, Beta::new(3.0).unwrap()).unwrap();
        assert_eq!(t.t_scaled, t.t_raw / pi_pow_half(3));
        assert!(t.t_raw >= 0.0);
    }

    #[test]
    fn quadrature_self_convergence_2d() {
        let y = random_residuals(2, 10, 2);
        let beta = Beta::new(3.0).unwrap();
        let a = tn_beta_quadrature(&y, beta, 48).unwrap();
        let b = tn_beta_quadrature(&y, beta, 64).unwrap();
        assert!(((a - b) / b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn quadrature_matches_closed_form_1d() {
        let y = random_residuals(3, 20, 1);
        let beta = Beta::new(2.5).unwrap();
        let closed = compute_tn_beta(&y, beta).unwrap().t_raw;
        let quad = tn_beta_quadrature(&y, beta, 64).unwrap();
        assert!(((closed - quad) / quad).abs() < 1e-6, "{closed} vs {quad}");
    }

    #[test]
    fn quadrature_rejects_high_dimension() {
        let y = random_residuals(4, 10, 4);
        assert!(matches!(
            tn_beta_quadrature(&y, Beta::new(3.0).unwrap(), 8),
            Err(Error::DimensionTooLarge { d: 4, .. })
        ));
    }

    #[test]
    fn overflow_fails_loudly() {
        let y = ScaledResiduals::from_raw(Matrix::from_rows(&[[40.0], [-40.0], [0.0]]));
        assert!(matches!(
            compute_tn_beta(&y, Beta::new(1.5).unwrap()),
            Err(Error::NonFiniteResult { .. })
        ));
    }

    #[test]
    fn beta_below_two_is_allowed_for_the_statistic() {
        let y = random_residuals(5, 25, 2);
        let t = compute_tn_beta(&y, Beta::new(1.5).unwrap()).unwrap();
        assert!(t.t_raw.is_finite() && t.t_raw >= 0.0);
    }
}
