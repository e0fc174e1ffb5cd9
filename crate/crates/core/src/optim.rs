//! Unconstrained quasi-Newton minimization (BFGS) with finite-difference
//! gradients and Armijo backtracking.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsOptions {
    pub max_iter: usize,
    /// Stop when the largest gradient component falls below this.
    pub grad_tol: f64,
    /// Stop when an accepted step lowers `f` by less than this, relative.
    pub f_rel_tol: f64,
    /// Relative step of the central differences.
    pub fd_step: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            grad_tol: 1e-6,
            f_rel_tol: 1e-12,
            fd_step: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    /// True when the gradient test was met; false when progress stalled first.
    pub converged: bool,
    pub grad_norm: f64,
}

/// Central-difference gradient.
pub fn numeric_gradient(f: &impl Fn(&[f64]) -> f64, x: &[f64], rel_step: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    let mut g = vec![0.0; x.len()];
    for i in 0..x.len() {
        let h = rel_step * x[i].abs().max(1.0);
        let orig = xp[i];
        xp[i] = orig + h;
        let fp = f(&xp);
        xp[i] = orig - h;
        let fm = f(&xp);
        xp[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimizes `f` from `x0`. `f` may return `+∞` (or NaN) outside its domain;
/// the line search backs off from such points.
pub fn minimize_bfgs(f: impl Fn(&[f64]) -> f64, x0: &[f64], opts: BfgsOptions) -> Result<BfgsResult> {
    let k = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if !fx.is_finite() {
        return Err(Error::ExplosiveRegion);
    }
    let mut g = numeric_gradient(&f, &x, opts.fd_step);
    // inverse Hessian approximation, row-major
    let mut h = identity(k);
    let mut stalls = 0;
    for iter in 0..opts.max_iter {
        let gnorm = max_abs(&g);
        if !gnorm.is_finite() {
            return Err(Error::OptimizerFailed {
                iterations: iter,
                gradient_norm: gnorm,
            });
        }
        if gnorm < opts.grad_tol {
            return Ok(BfgsResult {
                x,
                f: fx,
                iterations: iter,
                converged: true,
                grad_norm: gnorm,
            });
        }
        let mut dir: Vec<f64> = (0..k).map(|i| -dot_row(&h, k, i, &g)).collect();
        let mut slope = dot(&dir, &g);
        if slope >= 0.0 {
            h = identity(k);
            dir = g.iter().map(|v| -v).collect();
            slope = dot(&dir, &g);
        }
        // Armijo backtracking
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + step * b).collect();
            let ft = f(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            // no descent possible at working precision
            return Ok(BfgsResult {
                x,
                f: fx,
                iterations: iter,
                converged: false,
                grad_norm: gnorm,
            });
        };
        let g_new = numeric_gradient(&f, &x_new, opts.fd_step);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let improvement = fx - f_new;
        x = x_new;
        fx = f_new;
        g = g_new;
        if improvement <= opts.f_rel_tol * fx.abs().max(1.0) {
            stalls += 1;
            if stalls >= 3 {
                return Ok(BfgsResult {
                    x,
                    f: fx,
                    iterations: iter + 1,
                    converged: max_abs(&g) < opts.grad_tol,
                    grad_norm: max_abs(&g),
                });
            }
        } else {
            stalls = 0;
        }
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            bfgs_update(&mut h, k, &s, &y, sy);
        }
    }
    Err(Error::OptimizerFailed {
        iterations: opts.max_iter,
        gradient_norm: max_abs(&g),
    })
}

fn identity(k: usize) -> Vec<f64> {
    let mut h = vec![0.0; k * k];
    for i in 0..k {
        h[i * k + i] = 1.0;
    }
    h
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_row(h: &[f64], k: usize, i: usize, v: &[f64]) -> f64 {
    dot(&h[i * k..(i + 1) * k], v)
}

/// `H ← (I - ρsyᵀ) H (I - ρysᵀ) + ρssᵀ`, `ρ = 1/(sᵀy)`.
fn bfgs_update(h: &mut [f64], k: usize, s: &[f64], y: &[f64], sy: f64) {
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..k).map(|i| dot_row(h, k, i, y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..k {
        for j in 0..k {
            h[i * k + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}
