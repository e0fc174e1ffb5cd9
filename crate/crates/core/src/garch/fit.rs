use crate::error::{Error, Result};
use crate::linalg::{Matrix, ResidualSource, Sample, ScaledResiduals};
use crate::optim::{minimize_bfgs, BfgsOptions};

use super::sim::{garch_residuals, sigma2_step, Presample};
use super::{GarchParams, GarchSpec};

/// Smallest value a non-negative coefficient is encoded as (log scale).
const ENCODE_FLOOR: f64 = 1e-10;

/// Which entries of the `Γ_k` matrices are estimated.
///
/// When the rows of `B_k` are alike the conditional variances move together
/// and the columns of a free `Γ_k` are poorly separated: the likelihood is
/// nearly flat along directions that trade diagonal for off-diagonal mass.
/// The diagonal restriction removes that ridge; `B_k` stays full in both cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GarchStructure {
    /// Every entry of every `Γ_k` is free.
    Full,
    /// Off-diagonal entries of every `Γ_k` are fixed at zero.
    #[default]
    DiagonalGamma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub bfgs: BfgsOptions,
    pub structure: GarchStructure,
    /// Presample values; `None` uses [`Presample::from_data`].
    pub presample: Option<Presample>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            bfgs: BfgsOptions {
                max_iter: 1000,
                grad_tol: 1e-6,
                f_rel_tol: 1e-13,
                fd_step: 1e-5,
            },
            structure: GarchStructure::default(),
            presample: None,
        }
    }
}

/// Result of a Gaussian QMLE fit.
#[derive(Debug, Clone, PartialEq)]
pub struct GarchFit {
    pub params: GarchParams,
    /// `L_n(θ̂) = -½ Σ_j (X_jᵀ Σ̃_j^{-1} X_j + log|Σ̃_j|)`.
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `ε̃_j = Σ̃_j^{-1/2}(θ̂) X_j`.
    pub residuals: ScaledResiduals,
    pub sigma2: Matrix,
    pub presample: Presample,
}

impl GarchFit {
    /// Warning when the sample is small relative to the parameter count.
    pub fn small_sample_warning(n: usize, spec: GarchSpec) -> Option<String> {
        let v = spec.n_params();
        (n < 50 * v).then(|| format!("n = {n} is below 50 x {v} parameters; QMLE may be unreliable"))
    }
}

/// Maps an unconstrained vector to parameters: `exp` for `b`, `B_k`, `Γ_k`;
/// `tanh` partial correlations assembled into a Cholesky factor for `R`.
struct Codec {
    spec: GarchSpec,
    structure: GarchStructure,
}

impl Codec {
    fn len(&self) -> usize {
        let GarchSpec { d, p, q } = self.spec;
        let gamma = match self.structure {
            GarchStructure::Full => d * d,
            GarchStructure::DiagonalGamma => d,
        };
        d + p * d * d + q * gamma + d * (d - 1) / 2
    }

    fn decode(&self, phi: &[f64]) -> (GarchParams, Matrix) {
        let GarchSpec { d, p, q } = self.spec;
        let mut it = phi.iter().copied();
        let b: Vec<f64> = it.by_ref().take(d).map(f64::exp).collect();
        let arch: Vec<Matrix> = (0..p)
            .map(|_| Matrix::from_vec(d, d, it.by_ref().take(d * d).map(f64::exp).collect()))
            .collect();
        let garch: Vec<Matrix> = (0..q)
            .map(|_| match self.structure {
                GarchStructure::Full => Matrix::from_vec(d, d, it.by_ref().take(d * d).map(f64::exp).collect()),
                GarchStructure::DiagonalGamma => {
                    let diag: Vec<f64> = it.by_ref().take(d).map(f64::exp).collect();
                    Matrix::from_diagonal(&diag)
                }
            })
            .collect();
        let mut l = Matrix::zeros(d, d);
        for i in 0..d {
            let mut rem = 1.0f64;
            for j in 0..i {
                let z = it.next().expect("layout").tanh();
                l[(i, j)] = z * rem.sqrt();
                rem -= l[(i, j)] * l[(i, j)];
            }
            l[(i, i)] = rem.max(0.0).sqrt();
        }
        let r = l.matmul(&l.transpose());
        let mut r = r;
        for i in 0..d {
            r[(i, i)] = 1.0;
        }
        (GarchParams { b, arch, garch, r }, l)
    }

    fn encode(&self, params: &GarchParams) -> Result<Vec<f64>> {
        let d = self.spec.d;
        let enc = |v: f64| v.max(ENCODE_FLOOR).ln();
        let mut phi: Vec<f64> = params.b.iter().map(|&v| enc(v)).collect();
        for m in &params.arch {
            phi.extend(m.as_slice().iter().map(|&v| enc(v)));
        }
        for m in &params.garch {
            match self.structure {
                GarchStructure::Full => phi.extend(m.as_slice().iter().map(|&v| enc(v))),
                GarchStructure::DiagonalGamma => phi.extend((0..d).map(|i| enc(m[(i, i)]))),
            }
        }
        let l = cholesky(&params.r)
            .ok_or_else(|| Error::InvalidSpec("R is not positive definite".into()))?;
        for i in 0..d {
            let mut rem = 1.0f64;
            for j in 0..i {
                let z = (l[(i, j)] / rem.sqrt()).clamp(-1.0 + 1e-12, 1.0 - 1e-12);
                phi.push(z.atanh());
                rem -= l[(i, j)] * l[(i, j)];
            }
        }
        Ok(phi)
    }
}

/// Lower Cholesky factor, `None` unless positive definite.
fn cholesky(m: &Matrix) -> Option<Matrix> {
    let d = m.rows();
    let mut l = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum();
            if i == j {
                let v = m[(i, i)] - s;
                if !(v > 0.0) {
                    return None;
                }
                l[(i, i)] = v.sqrt();
            } else {
                l[(i, j)] = (m[(i, j)] - s) / l[(j, j)];
            }
        }
    }
    Some(l)
}

/// Average negative log-likelihood `-L_n(θ)/n`; `+∞` where undefined.
fn objective(params: &GarchParams, l: &Matrix, x: &Matrix, x2: &Matrix, pre: &Presample, s2: &mut Matrix) -> f64 {
    let (n, d) = (x.rows(), x.cols());
    let mut log_det_r = 0.0;
    for i in 0..d {
        let v = l[(i, i)];
        if !(v > 0.0) {
            return f64::INFINITY;
        }
        log_det_r += 2.0 * v.ln();
    }
    let mut cur = vec![0.0; d];
    let mut w = vec![0.0; d];
    let mut total = 0.0;
    for j in 0..n {
        sigma2_step(params, j, x2, s2, pre, &mut cur);
        let mut log_s = 0.0;
        for i in 0..d {
            if !(cur[i] > 0.0 && cur[i].is_finite()) {
                return f64::INFINITY;
            }
            log_s += cur[i].ln();
        }
        s2.row_mut(j).copy_from_slice(&cur);
        // w = L^{-1} z, z_i = X_i / σ_i
        let xj = x.row(j);
        let mut quad = 0.0;
        for i in 0..d {
            let mut v = xj[i] / cur[i].sqrt();
            for k in 0..i {
                v -= l[(i, k)] * w[k];
            }
            w[i] = v / l[(i, i)];
            quad += w[i] * w[i];
        }
        total += quad + log_s;
    }
    let f = 0.5 * (total / n as f64 + log_det_r);
    if f.is_finite() {
        f
    } else {
        f64::INFINITY
    }
}

/// Variance-targeted starting values with moderate persistence and the
/// sample correlation for `R`.
pub fn default_start(x: &Matrix, spec: GarchSpec) -> Result<GarchParams> {
    let GarchSpec { d, p, q } = spec;
    let pre = Presample::from_data(x);
    let var = &pre.sigma2;
    let n = x.rows() as f64;
    let means: Vec<f64> = (0..d).map(|j| x.row_iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let mut r = Matrix::identity(d);
    for i in 0..d {
        for k in 0..i {
            let c = x.row_iter().map(|row| (row[i] - means[i]) * (row[k] - means[k])).sum::<f64>() / n;
            let rho = (c / (var[i] * var[k]).sqrt()).clamp(-0.95, 0.95);
            r[(i, k)] = rho;
            r[(k, i)] = rho;
        }
    }
    let lagged = |diag: f64, off: f64| {
        let mut m = Matrix::zeros(d, d);
        for i in 0..d {
            for k in 0..d {
                m[(i, k)] = if i == k { diag } else { off };
            }
        }
        m
    };
    let arch: Vec<Matrix> = (0..p)
        .map(|k| if k == 0 { lagged(0.05, 0.01) } else { lagged(0.01, 0.001) })
        .collect();
    let garch: Vec<Matrix> = (0..q)
        .map(|k| if k == 0 { lagged(0.8, 0.01) } else { lagged(0.01, 0.001) })
        .collect();
    let mut start = GarchParams {
        b: vec![0.0; d],
        arch,
        garch,
        r,
    };
    let persistence = start.persistence_matrix();
    for i in 0..d {
        let row: f64 = (0..d).map(|k| persistence[(i, k)] * var[k]).sum();
        start.b[i] = (var[i] - row).max(0.05 * var[i]).max(1e-8);
    }
    if cholesky(&start.r).is_none() {
        start.r = Matrix::identity(d);
    }
    start.validate()?;
    Ok(start)
}

/// Gaussian QMLE with default options.
pub fn qmle_fit(x: &Sample, spec: GarchSpec, init: Option<&GarchParams>) -> Result<GarchFit> {
    qmle_fit_with(x, spec, init, &FitOptions::default())
}

pub fn qmle_fit_with(
    x: &Sample,
    spec: GarchSpec,
    init: Option<&GarchParams>,
    opts: &FitOptions,
) -> Result<GarchFit> {
    let data = x.data();
    if data.cols() != spec.d {
        return Err(Error::InvalidSpec(format!(
            "data has {} columns, model has d = {}",
            data.cols(),
            spec.d
        )));
    }
    let start = match init {
        Some(p) => {
            if p.spec() != spec {
                return Err(Error::InvalidSpec("initial parameters do not match the model orders".into()));
            }
            p.clone()
        }
        None => default_start(data, spec)?,
    };
    let pre = opts.presample.clone().unwrap_or_else(|| Presample::from_data(data));
    let codec = Codec {
        spec,
        structure: opts.structure,
    };
    let phi0 = codec.encode(&start)?;
    debug_assert_eq!(phi0.len(), codec.len());
    let mut x2 = data.clone();
    x2.as_mut_slice().iter_mut().for_each(|v| *v *= *v);
    let work = std::cell::RefCell::new(Matrix::zeros(data.rows(), spec.d));
    let f = |phi: &[f64]| {
        let (params, l) = codec.decode(phi);
        objective(&params, &l, data, &x2, &pre, &mut work.borrow_mut())
    };
    let res = minimize_bfgs(f, &phi0, opts.bfgs)?;
    let (mut params, _) = codec.decode(&res.x);
    params.r = symmetrize_unit(&params.r);
    let (eps, sigma2) = garch_residuals(&params, data, &pre)?;
    let n = data.rows() as f64;
    Ok(GarchFit {
        params,
        loglik: -n * res.f,
        iterations: res.iterations,
        converged: res.converged,
        residuals: ScaledResiduals::new(eps, ResidualSource::GarchResidual),
        sigma2,
        presample: pre,
    })
}

fn symmetrize_unit(r: &Matrix) -> Matrix {
    let d = r.rows();
    let mut out = r.clone();
    for i in 0..d {
        out[(i, i)] = 1.0;
        for k in 0..i {
            let v = 0.5 * (r[(i, k)] + r[(k, i)]);
            out[(i, k)] = v;
            out[(k, i)] = v;
        }
    }
    out
}

/// Unconstrained coordinates of `params`, for perturbed restarts.
pub(crate) fn encode(params: &GarchParams, structure: GarchStructure) -> Result<Vec<f64>> {
    Codec {
        spec: params.spec(),
        structure,
    }
    .encode(params)
}

pub(crate) fn decode(spec: GarchSpec, structure: GarchStructure, phi: &[f64]) -> GarchParams {
    let (mut p, _) = Codec { spec, structure }.decode(phi);
    p.r = symmetrize_unit(&p.r);
    p
}
