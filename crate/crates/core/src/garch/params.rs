use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};

/// Model orders: `p` lags of squared observations, `q` lags of variances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GarchSpec {
    pub d: usize,
    pub p: usize,
    pub q: usize,
}

impl GarchSpec {
    pub fn new(d: usize, p: usize, q: usize) -> Result<Self> {
        if d == 0 || p == 0 {
            return Err(Error::InvalidSpec(format!(
                "CCC-GARCH needs d >= 1 and p >= 1, got d={d}, p={p}, q={q}"
            )));
        }
        Ok(Self { d, p, q })
    }

    /// Number of free parameters `v`.
    pub fn n_params(&self) -> usize {
        let d = self.d;
        d + (self.p + self.q) * d * d + d * (d - 1) / 2
    }
}

/// Parameter vector `θ = (b, B_1..B_p, Γ_1..Γ_q, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GarchParams {
    pub b: Vec<f64>,
    pub arch: Vec<Matrix>,
    pub garch: Vec<Matrix>,
    pub r: Matrix,
}

impl GarchParams {
    pub fn new(b: Vec<f64>, arch: Vec<Matrix>, garch: Vec<Matrix>, r: Matrix) -> Result<Self> {
        let p = Self { b, arch, garch, r };
        p.validate()?;
        Ok(p)
    }

    /// The bivariate/trivariate simulation design: `b = 0.1`, every `B₁`
    /// entry `0.1`, `Γ₁` with `γ` on the diagonal and `0.01` off it, and an
    /// equicorrelation `R` with off-diagonal `r`.
    pub fn design(d: usize, gamma: f64, r: f64) -> Result<Self> {
        let mut g = Matrix::zeros(d, d);
        let mut corr = Matrix::identity(d);
        for i in 0..d {
            for j in 0..d {
                g[(i, j)] = if i == j { gamma } else { 0.01 };
                if i != j {
                    corr[(i, j)] = r;
                }
            }
        }
        let b_mat = Matrix::from_vec(d, d, vec![0.1; d * d]);
        Self::new(vec![0.1; d], vec![b_mat], vec![g], corr)
    }

    /// No volatility dynamics: `B = Γ = 0`, so `σ² ≡ b`.
    pub fn constant(b: Vec<f64>, spec: GarchSpec, r: Matrix) -> Result<Self> {
        let d = spec.d;
        Self::new(
            b,
            vec![Matrix::zeros(d, d); spec.p],
            vec![Matrix::zeros(d, d); spec.q],
            r,
        )
    }

    pub fn d(&self) -> usize {
        self.b.len()
    }

    pub fn spec(&self) -> GarchSpec {
        GarchSpec {
            d: self.d(),
            p: self.arch.len(),
            q: self.garch.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.b.len();
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if d == 0 || self.arch.is_empty() {
            return bad("need d >= 1 and at least one ARCH lag".into());
        }
        if self.b.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return bad(format!("intercepts must be positive, got {:?}", self.b));
        }
        for (name, mats) in [("B", &self.arch), ("Gamma", &self.garch)] {
            for (k, m) in mats.iter().enumerate() {
                if m.rows() != d || m.cols() != d {
                    return bad(format!("{name}{} must be {d}x{d}", k + 1));
                }
                if m.as_slice().iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
                    return bad(format!("{name}{} must have non-negative entries", k + 1));
                }
            }
        }
        if self.r.rows() != d || self.r.cols() != d {
            return bad(format!("R must be {d}x{d}"));
        }
        for i in 0..d {
            if (self.r[(i, i)] - 1.0).abs() > 1e-12 {
                return bad("R must have unit diagonal".into());
            }
        }
        if !self.r.is_symmetric(1e-12) {
            return bad("R must be symmetric".into());
        }
        let eig = symmetric_eigen(&self.r);
        if !(eig.values[0] > 1e-12) {
            return bad("R must be positive definite".into());
        }
        Ok(())
    }

    /// `Σ_k B_k + Σ_k Γ_k`.
    pub fn persistence_matrix(&self) -> Matrix {
        let d = self.d();
        let mut a = Matrix::zeros(d, d);
        for m in self.arch.iter().chain(&self.garch) {
            for (x, y) in a.as_mut_slice().iter_mut().zip(m.as_slice()) {
                *x += y;
            }
        }
        a
    }

    /// Spectral radius of the persistence matrix. Below 1 is a sufficient
    /// screen for a stationary second-order process.
    pub fn persistence_radius(&self) -> f64 {
        spectral_radius_nonneg(&self.persistence_matrix())
    }

    /// Human-readable warning when the stationarity screen fails.
    pub fn stationarity_warning(&self) -> Option<String> {
        let rho = self.persistence_radius();
        (rho >= 1.0).then(|| {
            format!("spectral radius of sum(B) + sum(Gamma) is {rho:.4} >= 1; the process may be non-stationary")
        })
    }

    /// `(I - Σ B_k - Σ Γ_k)^{-1} b`, the stationary mean of `σ²_j` and of `X²_j`.
    pub fn unconditional_variance(&self) -> Option<Vec<f64>> {
        let d = self.d();
        let a = self.persistence_matrix();
        let mut m = Matrix::identity(d);
        for (x, y) in m.as_mut_slice().iter_mut().zip(a.as_slice()) {
            *x -= y;
        }
        let sol = solve(&m, &self.b)?;
        sol.iter().all(|&v| v > 0.0).then_some(sol)
    }

    /// Column names of the flat record.
    pub fn flat_header(spec: GarchSpec) -> Vec<String> {
        let d = spec.d;
        let mut h = vec!["d".to_string(), "p".to_string(), "q".to_string()];
        h.extend((1..=d).map(|i| format!("b{i}")));
        for (name, lags) in [("B", spec.p), ("Gamma", spec.q)] {
            for k in 1..=lags {
                for i in 1..=d {
                    for j in 1..=d {
                        h.push(format!("{name}{k}_{i}{j}"));
                    }
                }
            }
        }
        for i in 1..=d {
            for j in 1..i {
                h.push(format!("R_{i}{j}"));
            }
        }
        h
    }

    /// `d,p,q,b…,B1…,Gamma1…,R-lower-triangle…`, matrices row-major and the
    /// strictly lower triangle of `R` row by row.
    pub fn to_flat(&self) -> Vec<f64> {
        let spec = self.spec();
        let mut v = vec![spec.d as f64, spec.p as f64, spec.q as f64];
        v.extend(&self.b);
        for m in self.arch.iter().chain(&self.garch) {
            v.extend(m.as_slice());
        }
        for i in 0..spec.d {
            for j in 0..i {
                v.push(self.r[(i, j)]);
            }
        }
        v
    }

    pub fn from_flat(v: &[f64]) -> Result<Self> {
        let count = |x: f64, what: &str| -> Result<usize> {
            if x >= 0.0 && x.fract() == 0.0 && x < 1e6 {
                Ok(x as usize)
            } else {
                Err(Error::InvalidSpec(format!("{what} must be a non-negative integer, got {x}")))
            }
        };
        if v.len() < 3 {
            return Err(Error::InvalidSpec("parameter record too short".into()));
        }
        let spec = GarchSpec::new(count(v[0], "d")?, count(v[1], "p")?, count(v[2], "q")?)?;
        let d = spec.d;
        let expected = 3 + spec.n_params();
        if v.len() != expected {
            return Err(Error::InvalidSpec(format!(
                "parameter record for d={d}, p={}, q={} needs {expected} values, got {}",
                spec.p,
                spec.q,
                v.len()
            )));
        }
        let mut it = v[3..].iter().copied();
        let b: Vec<f64> = it.by_ref().take(d).collect();
        let mut take_mat = || Matrix::from_vec(d, d, it.by_ref().take(d * d).collect());
        let arch: Vec<Matrix> = (0..spec.p).map(|_| take_mat()).collect();
        let garch: Vec<Matrix> = (0..spec.q).map(|_| take_mat()).collect();
        let mut r = Matrix::identity(d);
        for i in 0..d {
            for j in 0..i {
                let x = it.next().expect("length checked");
                r[(i, j)] = x;
                r[(j, i)] = x;
            }
        }
        Self::new(b, arch, garch, r)
    }

    /// Header line plus one data line.
    pub fn to_csv(&self) -> String {
        let header = Self::flat_header(self.spec()).join(",");
        let values: Vec<String> = self.to_flat().iter().map(|v| format!("{v:e}")).collect();
        format!("{header}\n{}\n", values.join(","))
    }

    /// Parses the output of [`GarchParams::to_csv`]; the header line is optional.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut last = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('d') {
                continue;
            }
            let mut vals = Vec::new();
            for (j, field) in line.split(',').enumerate() {
                vals.push(field.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: i + 1,
                    column: j + 1,
                    message: e.to_string(),
                })?);
            }
            last = Some(vals);
        }
        let vals = last.ok_or_else(|| Error::InvalidSpec("no parameter record found".into()))?;
        Self::from_flat(&vals)
    }

    pub fn to_json(&self) -> String {
        let rec = JsonRecord {
            d: self.d(),
            p: self.arch.len(),
            q: self.garch.len(),
            values: self.to_flat()[3..].to_vec(),
            names: Self::flat_header(self.spec())[3..].to_vec(),
        };
        serde_json::to_string_pretty(&rec).expect("plain numbers serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: JsonRecord =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("parameter JSON: {e}")))?;
        let mut flat = vec![rec.d as f64, rec.p as f64, rec.q as f64];
        flat.extend(rec.values);
        Self::from_flat(&flat)
    }
}

/// JSON form of the flat record; `names` documents each value.
#[derive(Serialize, Deserialize)]
struct JsonRecord {
    d: usize,
    p: usize,
    q: usize,
    values: Vec<f64>,
    #[serde(default)]
    names: Vec<String>,
}

/// Perron root of a non-negative matrix by normalized power iteration on `I + A`.
fn spectral_radius_nonneg(a: &Matrix) -> f64 {
    let d = a.rows();
    // I + A is primitive whenever A is irreducible and shares A's Perron vector
    let mut m = a.clone();
    for i in 0..d {
        m[(i, i)] += 1.0;
    }
    let mut v = vec![1.0; d];
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let w = m.mul_vec(&v);
        let norm = w.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        if norm == 0.0 {
            return 0.0;
        }
        let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        let delta = next.iter().zip(&v).fold(0.0f64, |s, (x, y)| s.max((x - y).abs()));
        v = next;
        lambda = norm;
        if delta < 1e-14 {
            break;
        }
    }
    lambda - 1.0
}

/// Gaussian elimination with partial pivoting.
fn solve(m: &Matrix, rhs: &[f64]) -> Option<Vec<f64>> {
    let d = m.rows();
    let mut a = m.clone();
    let mut x = rhs.to_vec();
    for c in 0..d {
        let piv = (c..d).max_by(|&i, &j| a[(i, c)].abs().total_cmp(&a[(j, c)].abs()))?;
        if a[(piv, c)].abs() < 1e-300 {
            return None;
        }
        if piv != c {
            for j in 0..d {
                let t = a[(c, j)];
                a[(c, j)] = a[(piv, j)];
                a[(piv, j)] = t;
            }
            x.swap(c, piv);
        }
        for i in c + 1..d {
            let f = a[(i, c)] / a[(c, c)];
            for j in c..d {
                a[(i, j)] -= f * a[(c, j)];
            }
            x[i] -= f * x[c];
        }
    }
    for c in (0..d).rev() {
        let s: f64 = (c + 1..d).map(|j| a[(c, j)] * x[j]).sum();
        x[c] = (x[c] - s) / a[(c, c)];
    }
    Some(x)
}
