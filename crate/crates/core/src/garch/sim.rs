use crate::alternatives::Family;
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix, Sample};
use crate::rng::Stream;

use super::GarchParams;

/// Steps discarded before a simulated series is returned.
pub const BURN_IN: usize = 500;

/// Conditional variances above this abort a simulation.
pub const EXPLOSION_LIMIT: f64 = 1e12;

/// Values standing in for the unobserved `X²_j` and `σ²_j`, `j ≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Presample {
    pub x2: Vec<f64>,
    pub sigma2: Vec<f64>,
}

impl Presample {
    /// `X̃_j = 0` and `σ̃²_j` equal to the per-coordinate sample variance (divisor `n`).
    pub fn from_data(x: &Matrix) -> Self {
        let (n, d) = (x.rows(), x.cols());
        let mut sigma2 = vec![0.0; d];
        for (j, s) in sigma2.iter_mut().enumerate() {
            let mean = x.row_iter().map(|r| r[j]).sum::<f64>() / n as f64;
            *s = x.row_iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n as f64;
        }
        Self {
            x2: vec![0.0; d],
            sigma2,
        }
    }

    /// Start of a burn-in run: `X̃ = 0`, `σ̃² = b`.
    pub fn intercepts(params: &GarchParams) -> Self {
        Self {
            x2: vec![0.0; params.d()],
            sigma2: params.b.clone(),
        }
    }
}

/// A simulated series with its conditional variances.
#[derive(Debug, Clone, PartialEq)]
pub struct GarchPath {
    pub x: Matrix,
    pub sigma2: Matrix,
}

/// Writes `σ²_j` into `out` from rows `< j` of `x2` and `s2`.
pub(crate) fn sigma2_step(
    params: &GarchParams,
    j: usize,
    x2: &Matrix,
    s2: &Matrix,
    pre: &Presample,
    out: &mut [f64],
) {
    let d = params.d();
    out.copy_from_slice(&params.b);
    for (k, bk) in params.arch.iter().enumerate() {
        let lag = k + 1;
        let prev = if j >= lag { x2.row(j - lag) } else { &pre.x2[..] };
        for (i, o) in out.iter_mut().enumerate() {
            let row = &bk.as_slice()[i * d..(i + 1) * d];
            *o += row.iter().zip(prev).map(|(a, b)| a * b).sum::<f64>();
        }
    }
    for (k, gk) in params.garch.iter().enumerate() {
        let lag = k + 1;
        let prev = if j >= lag { s2.row(j - lag) } else { &pre.sigma2[..] };
        for (i, o) in out.iter_mut().enumerate() {
            let row = &gk.as_slice()[i * d..(i + 1) * d];
            *o += row.iter().zip(prev).map(|(a, b)| a * b).sum::<f64>();
        }
    }
}

/// Symmetric square root (or its inverse) of a small SPD matrix.
///
/// `d = 2` uses `√M = (M + √det·I)/√(tr + 2√det)`; larger `d` goes through
/// the Jacobi eigendecomposition.
pub(crate) fn sym_sqrt(m: &Matrix, inverse: bool) -> Matrix {
    match m.rows() {
        1 => {
            let v = m[(0, 0)].sqrt();
            Matrix::from_vec(1, 1, vec![if inverse { 1.0 / v } else { v }])
        }
        2 => {
            let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
            let s = (a * c - b * b).sqrt();
            let t = (a + c + 2.0 * s).sqrt();
            let (r00, r01, r11) = ((a + s) / t, b / t, (c + s) / t);
            if inverse {
                // det √M = √det M = s
                Matrix::from_vec(2, 2, vec![r11 / s, -r01 / s, -r01 / s, r00 / s])
            } else {
                Matrix::from_vec(2, 2, vec![r00, r01, r01, r11])
            }
        }
        _ => {
            let eig = symmetric_eigen(m);
            if inverse {
                eig.reconstruct_with(|l| 1.0 / l.sqrt())
            } else {
                eig.reconstruct_with(f64::sqrt)
            }
        }
    }
}

/// `Σ_j = D_j R D_j`.
fn conditional_cov(r: &Matrix, sigma2: &[f64], out: &mut Matrix) {
    let d = sigma2.len();
    for i in 0..d {
        for k in 0..d {
            out[(i, k)] = r[(i, k)] * (sigma2[i] * sigma2[k]).sqrt();
        }
    }
}

/// Runs the recursion driven by `innovations` (one row per step).
pub fn simulate_from_presample(
    params: &GarchParams,
    innovations: &Matrix,
    pre: &Presample,
) -> Result<GarchPath> {
    let d = params.d();
    if innovations.cols() != d {
        return Err(Error::InvalidSpec(format!(
            "innovations have {} columns, model has d = {d}",
            innovations.cols()
        )));
    }
    let n = innovations.rows();
    let mut x = Matrix::zeros(n, d);
    let mut x2 = Matrix::zeros(n, d);
    let mut s2 = Matrix::zeros(n, d);
    let mut cur = vec![0.0; d];
    let mut cov = Matrix::zeros(d, d);
    for j in 0..n {
        sigma2_step(params, j, &x2, &s2, pre, &mut cur);
        if cur.iter().any(|v| !(v.is_finite() && *v <= EXPLOSION_LIMIT)) {
            return Err(Error::NonStationaryExplosion {
                step: j,
                limit: EXPLOSION_LIMIT,
            });
        }
        s2.row_mut(j).copy_from_slice(&cur);
        conditional_cov(&params.r, &cur, &mut cov);
        let root = sym_sqrt(&cov, false);
        root.mul_vec_into(innovations.row(j), x.row_mut(j));
        for (o, v) in x2.row_mut(j).iter_mut().zip(x.row(j)) {
            *o = v * v;
        }
    }
    Ok(GarchPath { x, sigma2: s2 })
}

/// Drops the first `k` rows of a matrix.
fn drop_rows(m: &Matrix, k: usize) -> Matrix {
    let d = m.cols();
    Matrix::from_vec(m.rows() - k, d, m.as_slice()[k * d..].to_vec())
}

/// Simulates `n` observations; `innovations` must have `n + BURN_IN` rows with
/// zero mean and identity covariance. The first `BURN_IN` steps are discarded.
pub fn simulate_ccc_garch(params: &GarchParams, n: usize, innovations: &Sample) -> Result<Sample> {
    let eps = innovations.data();
    if eps.rows() != n + BURN_IN {
        return Err(Error::InvalidSpec(format!(
            "need {} innovation rows (n + burn-in), got {}",
            n + BURN_IN,
            eps.rows()
        )));
    }
    let path = simulate_from_presample(params, eps, &Presample::intercepts(params))?;
    Sample::new(drop_rows(&path.x, BURN_IN))
}

/// Draws standardized innovations from `family` and simulates `n`
/// observations after a burn-in.
pub fn simulate_with_burn_in(
    params: &GarchParams,
    n: usize,
    family: Family,
    rng: &mut Stream,
) -> Result<GarchPath> {
    let eps = family.sample_innovations(n + BURN_IN, params.d(), rng)?;
    let path = simulate_from_presample(params, &eps, &Presample::intercepts(params))?;
    Ok(GarchPath {
        x: drop_rows(&path.x, BURN_IN),
        sigma2: drop_rows(&path.sigma2, BURN_IN),
    })
}

/// Residuals `ε̃_j = Σ̃_j^{-1/2} X_j` and the filtered variances `σ̃²_j`.
pub fn garch_residuals(params: &GarchParams, x: &Matrix, pre: &Presample) -> Result<(Matrix, Matrix)> {
    let d = params.d();
    let n = x.rows();
    let mut x2 = Matrix::zeros(n, d);
    for (o, v) in x2.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *o = v * v;
    }
    let mut s2 = Matrix::zeros(n, d);
    let mut eps = Matrix::zeros(n, d);
    let mut cur = vec![0.0; d];
    let mut cov = Matrix::zeros(d, d);
    for j in 0..n {
        sigma2_step(params, j, &x2, &s2, pre, &mut cur);
        if cur.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::NonStationaryExplosion {
                step: j,
                limit: EXPLOSION_LIMIT,
            });
        }
        s2.row_mut(j).copy_from_slice(&cur);
        conditional_cov(&params.r, &cur, &mut cov);
        sym_sqrt(&cov, true).mul_vec_into(x.row(j), eps.row_mut(j));
    }
    Ok((eps, s2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::garch::GarchSpec;
    use crate::linalg::SymmetricPd;
    use crate::null_sim::standard_normal_matrix;
    use crate::rng::SeedTree;

    #[test]
    fn closed_form_root_matches_eigen_root() {
        let m = Matrix::from_rows(&[[2.0, 0.7], [0.7, 1.3]]);
        let closed = sym_sqrt(&m, false);
        let eig = SymmetricPd::new(m.clone()).unwrap().sqrt();
        assert!(closed.max_abs_diff(eig.matrix()) < 1e-14);
        let inv = sym_sqrt(&m, true);
        let prod = inv.matmul(&m).matmul(&inv);
        assert!(prod.max_abs_diff(&Matrix::identity(2)) < 1e-14);
    }

    #[test]
    fn no_dynamics_gives_constant_variance() {
        let spec = GarchSpec::new(2, 1, 1).unwrap();
        let r = Matrix::from_rows(&[[1.0, 0.5], [0.5, 1.0]]);
        let p = GarchParams::constant(vec![2.0, 0.5], spec, r).unwrap();
        let eps = standard_normal_matrix(50_000 + BURN_IN, 2, &mut SeedTree::new(1).stream(0));
        let path = simulate_from_presample(&p, &eps, &Presample::intercepts(&p)).unwrap();
        assert!(path.sigma2.row_iter().all(|r| r == [2.0, 0.5]));
        // covariance of X is D R D = [[2, .5], [.5, .5]]
        let n = path.x.rows() as f64;
        let c01 = path.x.row_iter().map(|r| r[0] * r[1]).sum::<f64>() / n;
        let c00 = path.x.row_iter().map(|r| r[0] * r[0]).sum::<f64>() / n;
        assert!((c01 - 0.5).abs() < 0.03 && (c00 - 2.0).abs() < 0.06);
    }

    #[test]
    fn long_run_variance_matches_fixed_point() {
        let p = GarchParams::design(2, 0.4, 0.3).unwrap();
        let target = p.unconditional_variance().unwrap();
        let path = simulate_with_burn_in(&p, 100_000, Family::Normal, &mut SeedTree::new(2).stream(0)).unwrap();
        for i in 0..2 {
            let avg = path.sigma2.row_iter().map(|r| r[i]).sum::<f64>() / 100_000.0;
            assert!((avg / target[i] - 1.0).abs() < 0.05, "{avg} vs {}", target[i]);
        }
    }

    #[test]
    fn simulation_is_deterministic() {
        let p = GarchParams::design(3, 0.4, 0.3).unwrap();
        let a = simulate_with_burn_in(&p, 200, Family::T(10.0), &mut SeedTree::new(3).stream(0)).unwrap();
        let b = simulate_with_burn_in(&p, 200, Family::T(10.0), &mut SeedTree::new(3).stream(0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn residuals_invert_the_simulation() {
        let p = GarchParams::design(2, 0.4, 0.3).unwrap();
        let eps = standard_normal_matrix(300, 2, &mut SeedTree::new(4).stream(0));
        let pre = Presample {
            x2: vec![0.0; 2],
            sigma2: vec![0.3, 0.2],
        };
        let path = simulate_from_presample(&p, &eps, &pre).unwrap();
        let (res, s2) = garch_residuals(&p, &path.x, &pre).unwrap();
        assert!(res.max_abs_diff(&eps) < 1e-10);
        assert!(s2.max_abs_diff(&path.sigma2) < 1e-12);
    }

    #[test]
    fn explosion_is_reported() {
        let mut p = GarchParams::design(2, 0.4, 0.0).unwrap();
        p.garch[0] = Matrix::from_rows(&[[1.5, 0.0], [0.0, 1.5]]);
        let eps = standard_normal_matrix(2000, 2, &mut SeedTree::new(5).stream(0));
        let r = simulate_from_presample(&p, &eps, &Presample::intercepts(&p));
        assert!(matches!(r, Err(Error::NonStationaryExplosion { .. })));
    }

    #[test]
    fn burn_in_length_is_enforced() {
        let p = GarchParams::design(2, 0.4, 0.0).unwrap();
        let eps = Sample::new(standard_normal_matrix(BURN_IN + 10, 2, &mut SeedTree::new(6).stream(0))).unwrap();
        assert_eq!(simulate_ccc_garch(&p, 10, &eps).unwrap().n(), 10);
        assert!(simulate_ccc_garch(&p, 11, &eps).is_err());
    }
}
