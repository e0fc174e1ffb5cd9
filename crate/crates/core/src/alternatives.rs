//! Heavy-tailed alternatives for power studies.
//!
//! * `T(θ)`: multivariate Student t, `Z / √(χ²_θ/θ)` with `Z ~ N_d(0, I)`.
//! * `ASE(θ)`: sub-Gaussian elliptical θ-stable, `√S · Z` with `S` a positive
//!   (θ/2)-stable variable with Laplace transform `exp(-s^{θ/2})` (Kanter's
//!   representation). `θ = 2` is the Gaussian case, `S ≡ 1`.
//! * `GN(θ)`: i.i.d. marginals with density `∝ exp(-|x|^θ/θ)`.
//! * `AEP(α, p₁, p₂)`: i.i.d. asymmetric exponential power marginals,
//!   location 0 and scale 1.
//!
//! The test is affine invariant, so none of these scale conventions affects
//! power. [`Family::sample_innovations`] rescales to zero mean and identity
//! covariance for use as GARCH innovations.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, Gamma, StandardNormal};
use statrs::function::gamma::{gamma, gamma_lr, gamma_ur};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Sample};
use crate::rng::Stream;

/// Distribution family of a power-study alternative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Normal,
    T(f64),
    Ase(f64),
    Gn(f64),
    Aep(Aep),
}

/// Family together with the dimension to sample in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternativeSpec {
    pub family: Family,
    pub d: usize,
}

impl AlternativeSpec {
    pub fn new(family: Family, d: usize) -> Result<Self> {
        family.validate()?;
        if d == 0 {
            return Err(Error::InvalidSpec("dimension must be at least 1".into()));
        }
        Ok(Self { family, d })
    }

    pub fn sample(&self, n: usize, rng: &mut Stream) -> Result<Sample> {
        Sample::new(self.family.sample_matrix(n, self.d, rng))
    }
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Family::Normal => true,
            Family::T(df) => df.is_finite() && df > 0.0,
            Family::Ase(theta) => theta > 0.0 && theta <= 2.0,
            Family::Gn(theta) => theta.is_finite() && theta > 0.0,
            Family::Aep(a) => return Aep::new(a.alpha, a.p1, a.p2).map(|_| ()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("invalid parameter for {self}")))
        }
    }

    /// `n × d` draws on the family's native scale.
    pub fn sample_matrix(&self, n: usize, d: usize, rng: &mut Stream) -> Matrix {
        let mut m = Matrix::zeros(n, d);
        match *self {
            Family::Normal => fill_normal(&mut m, rng),
            Family::T(df) => {
                fill_normal(&mut m, rng);
                let chi = ChiSquared::new(df).expect("validated degrees of freedom");
                for i in 0..n {
                    let s = (df / chi.sample(rng)).sqrt();
                    m.row_mut(i).iter_mut().for_each(|x| *x *= s);
                }
            }
            Family::Ase(theta) => {
                fill_normal(&mut m, rng);
                if theta < 2.0 {
                    for i in 0..n {
                        let s = positive_stable(theta / 2.0, rng).sqrt();
                        m.row_mut(i).iter_mut().for_each(|x| *x *= s);
                    }
                }
            }
            Family::Gn(theta) => {
                let g = Gamma::new(1.0 / theta, 1.0).expect("validated shape");
                for x in m.as_mut_slice() {
                    let mag = (theta * g.sample(rng)).powf(1.0 / theta);
                    *x = if rng.random::<bool>() { mag } else { -mag };
                }
            }
            Family::Aep(aep) => {
                for x in m.as_mut_slice() {
                    *x = aep.sample(rng);
                }
            }
        }
        m
    }

    /// Per-coordinate mean and standard deviation, when the variance is finite.
    pub fn marginal_moments(&self) -> Option<(f64, f64)> {
        match *self {
            Family::Normal => Some((0.0, 1.0)),
            Family::T(df) if df > 2.0 => Some((0.0, (df / (df - 2.0)).sqrt())),
            Family::Ase(theta) if theta == 2.0 => Some((0.0, 1.0)),
            Family::Gn(theta) => Some((0.0, abs_moment(theta, 2.0).sqrt())),
            Family::Aep(aep) => Some((aep.mean(), aep.variance().sqrt())),
            _ => None,
        }
    }

    /// Draws standardized to zero mean and identity covariance.
    ///
    /// Every family here has uncorrelated coordinates, so per-coordinate
    /// standardization is enough.
    pub fn sample_innovations(&self, n: usize, d: usize, rng: &mut Stream) -> Result<Matrix> {
        let (mean, sd) = self.marginal_moments().ok_or_else(|| {
            Error::InvalidSpec(format!("{self} has infinite variance; cannot standardize"))
        })?;
        let mut m = self.sample_matrix(n, d, rng);
        m.as_mut_slice().iter_mut().for_each(|x| *x = (*x - mean) / sd);
        Ok(m)
    }
}

fn fill_normal(m: &mut Matrix, rng: &mut Stream) {
    for x in m.as_mut_slice() {
        *x = StandardNormal.sample(rng);
    }
}

/// Positive `a`-stable variable, `0 < a < 1`, with `E e^{-sS} = e^{-s^a}`.
fn positive_stable<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    // U ~ U(0, π) excluding endpoints, W ~ Exp(1)
    let u = loop {
        let u: f64 = rng.random::<f64>() * PI;
        if u > 0.0 {
            break u;
        }
    };
    let w: f64 = Exp1.sample(rng);
    let left = (a * u).sin() / u.sin().powf(1.0 / a);
    let right = (((1.0 - a) * u).sin() / w).powf((1.0 - a) / a);
    left * right
}

/// `E|X|^k` for the density `∝ exp(-|x|^p/p)`: `p^{k/p} Γ((1+k)/p) / Γ(1/p)`.
fn abs_moment(p: f64, k: f64) -> f64 {
    p.powf(k / p) * gamma((1.0 + k) / p) / gamma(1.0 / p)
}

/// Asymmetric exponential power distribution with location 0 and scale 1.
///
/// ```text
/// f(y) = (α/α*) K(p₁) exp(-|y/(2α*)|^{p₁}/p₁)            y ≤ 0
///        ((1-α)/(1-α*)) K(p₂) exp(-|y/(2(1-α*))|^{p₂}/p₂)  y > 0
/// K(p) = 1/(2 p^{1/p} Γ(1+1/p)),  α* = αK(p₁)/(αK(p₁) + (1-α)K(p₂))
/// ```
///
/// The left half has mass `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aep {
    pub alpha: f64,
    pub p1: f64,
    pub p2: f64,
    alpha_star: f64,
}

impl Aep {
    pub fn new(alpha: f64, p1: f64, p2: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0 && p1 > 0.0 && p2 > 0.0 && p1.is_finite() && p2.is_finite())
        {
            return Err(Error::InvalidSpec(format!(
                "AEP needs alpha in (0,1) and p1, p2 > 0, got ({alpha}, {p1}, {p2})"
            )));
        }
        let (k1, k2) = (aep_k(p1), aep_k(p2));
        let alpha_star = alpha * k1 / (alpha * k1 + (1.0 - alpha) * k2);
        Ok(Self {
            alpha,
            p1,
            p2,
            alpha_star,
        })
    }

    pub fn alpha_star(&self) -> f64 {
        self.alpha_star
    }

    fn left_scale(&self) -> f64 {
        2.0 * self.alpha_star
    }

    fn right_scale(&self) -> f64 {
        2.0 * (1.0 - self.alpha_star)
    }

    pub fn density(&self, y: f64) -> f64 {
        if y <= 0.0 {
            let z = -y / self.left_scale();
            self.alpha / self.alpha_star * aep_k(self.p1) * (-z.powf(self.p1) / self.p1).exp()
        } else {
            let z = y / self.right_scale();
            (1.0 - self.alpha) / (1.0 - self.alpha_star)
                * aep_k(self.p2)
                * (-z.powf(self.p2) / self.p2).exp()
        }
    }

    pub fn cdf(&self, y: f64) -> f64 {
        if y == 0.0 {
            self.alpha
        } else if y == f64::INFINITY {
            1.0
        } else if y == f64::NEG_INFINITY {
            0.0
        } else if y < 0.0 {
            let z = -y / self.left_scale();
            self.alpha * gamma_ur(1.0 / self.p1, z.powf(self.p1) / self.p1)
        } else {
            let z = y / self.right_scale();
            self.alpha + (1.0 - self.alpha) * gamma_lr(1.0 / self.p2, z.powf(self.p2) / self.p2)
        }
    }

    /// Inverse of [`Aep::cdf`] by bracketed bisection.
    pub fn quantile(&self, p: f64) -> f64 {
        assert!(p > 0.0 && p < 1.0, "probability must lie in (0,1)");
        let (mut lo, mut hi) = (-1.0, 1.0);
        while self.cdf(lo) > p {
            lo *= 2.0;
        }
        while self.cdf(hi) < p {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi.abs().max(lo.abs()).max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Each half is a scaled `(p·G)^{1/p}`, `G ~ Gamma(1/p)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if rng.random::<f64>() < self.alpha {
            let g: f64 = Gamma::new(1.0 / self.p1, 1.0).expect("validated").sample(rng);
            -self.left_scale() * (self.p1 * g).powf(1.0 / self.p1)
        } else {
            let g: f64 = Gamma::new(1.0 / self.p2, 1.0).expect("validated").sample(rng);
            self.right_scale() * (self.p2 * g).powf(1.0 / self.p2)
        }
    }

    pub fn mean(&self) -> f64 {
        self.raw_moment(1)
    }

    pub fn variance(&self) -> f64 {
        self.raw_moment(2) - self.mean().powi(2)
    }

    fn raw_moment(&self, k: i32) -> f64 {
        let kf = k as f64;
        let left = self.alpha * (-self.left_scale()).powi(k) * abs_moment(self.p1, kf);
        let right = (1.0 - self.alpha) * self.right_scale().powi(k) * abs_moment(self.p2, kf);
        left + right
    }
}

fn aep_k(p: f64) -> f64 {
    1.0 / (2.0 * p.powf(1.0 / p) * gamma(1.0 + 1.0 / p))
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Normal => write!(f, "normal"),
            Family::T(v) => write!(f, "t:{v}"),
            Family::Ase(v) => write!(f, "ase:{v}"),
            Family::Gn(v) => write!(f, "gn:{v}"),
            Family::Aep(a) => write!(f, "aep:{},{},{}", a.alpha, a.p1, a.p2),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Parses `normal`, `t:5`, `ase:1.75`, `gn:1.65`, `aep:0.4,1.182,1.820`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n.trim().to_ascii_lowercase(), Some(a)),
            None => (s.to_ascii_lowercase(), None),
        };
        let nums = |a: Option<&str>, count: usize| -> Result<Vec<f64>> {
            let a = a.ok_or_else(|| Error::InvalidSpec(format!("`{s}` needs parameters")))?;
            let v = a
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::InvalidSpec(format!("`{s}`: {e}")))?;
            if v.len() != count {
                return Err(Error::InvalidSpec(format!(
                    "`{s}` expects {count} parameter(s), got {}",
                    v.len()
                )));
            }
            Ok(v)
        };
        let family = match name.as_str() {
            "normal" | "n" => {
                if args.is_some() {
                    return Err(Error::InvalidSpec("`normal` takes no parameters".into()));
                }
                Family::Normal
            }
            "t" => Family::T(nums(args, 1)?[0]),
            "ase" => Family::Ase(nums(args, 1)?[0]),
            "gn" => Family::Gn(nums(args, 1)?[0]),
            "aep" => {
                let v = nums(args, 3)?;
                Family::Aep(Aep::new(v[0], v[1], v[2])?)
            }
            other => return Err(Error::InvalidSpec(format!("unknown alternative `{other}`"))),
        };
        family.validate()?;
        Ok(family)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::scale_residuals;
    use crate::rng::SeedTree;
    use crate::statistic::mardia_skewness;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn stream(seed: u64) -> Stream {
        SeedTree::new(seed).stream(0)
    }

    fn kurtosis(v: &[f64]) -> f64 {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let m2 = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
        let m4 = v.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
        m4 / (m2 * m2)
    }

    fn ks_distance(mut v: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        v.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Column `j` of a matrix.
    fn column(m: &Matrix, j: usize) -> Vec<f64> {
        m.row_iter().map(|r| r[j]).collect()
    }

    #[test]
    fn parses_cli_strings() {
        assert_eq!("t:5".parse::<Family>().unwrap(), Family::T(5.0));
        assert_eq!("ase:1.75".parse::<Family>().unwrap(), Family::Ase(1.75));
        assert_eq!("gn:1.65".parse::<Family>().unwrap(), Family::Gn(1.65));
        assert_eq!("normal".parse::<Family>().unwrap(), Family::Normal);
        let aep: Family = "aep:0.4,1.182,1.820".parse().unwrap();
        assert_eq!(aep, Family::Aep(Aep::new(0.4, 1.182, 1.82).unwrap()));
        assert_eq!(aep.to_string().parse::<Family>().unwrap(), aep);
        for bad in ["t", "ase:2.5", "aep:0.4,1", "gn:-1", "cauchy:1", "normal:1"] {
            assert!(bad.parse::<Family>().is_err(), "{bad}");
        }
    }

    #[test]
    fn t_with_huge_df_is_nearly_normal() {
        let m = Family::T(1e6).sample_matrix(100_000, 2, &mut stream(1));
        assert!((kurtosis(&column(&m, 0)) - 3.0).abs() < 0.1);
    }

    #[test]
    fn ase_two_is_gaussian() {
        let m = Family::Ase(2.0).sample_matrix(100_000, 2, &mut stream(2));
        assert!((kurtosis(&column(&m, 1)) - 3.0).abs() < 0.1);
    }

    #[test]
    fn t_skewness_vanishes() {
        let s = AlternativeSpec::new(Family::T(10.0), 2).unwrap();
        let y = scale_residuals(&s.sample(10_000, &mut stream(3)).unwrap()).unwrap();
        assert!(mardia_skewness(&y) < 0.05);
    }

    #[test]
    fn ase_directions_are_uniform() {
        // Sample skewness has no limit for θ < 2 (infinite third moment), so
        // elliptical symmetry is checked on the directions X/‖X‖ instead.
        let n = 40_000;
        let m = Family::Ase(1.75).sample_matrix(n, 2, &mut stream(3));
        let (mut c, mut s, mut c2) = (0.0, 0.0, 0.0);
        for r in m.row_iter() {
            let phi = r[1].atan2(r[0]);
            c += phi.cos();
            s += phi.sin();
            c2 += (2.0 * phi).cos();
        }
        // each average has standard deviation 1/√(2n) under uniformity
        let bound = 4.0 / (2.0 * n as f64).sqrt();
        for v in [c, s, c2] {
            assert!((v / n as f64).abs() < bound);
        }
    }

    #[test]
    fn ase_tail_index() {
        // P(|X₁| > x) ~ c x^{-θ}: the log-log tail slope between two high
        // quantiles approximates -θ.
        let theta = 1.5;
        let m = Family::Ase(theta).sample_matrix(400_000, 1, &mut stream(4));
        let mut v: Vec<f64> = m.as_slice().iter().map(|x| x.abs()).collect();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| v[((v.len() as f64) * p) as usize];
        let slope = ((0.01f64).ln() - (0.001f64).ln()) / (q(0.99).ln() - q(0.999).ln());
        assert!((slope + theta).abs() < 0.15, "slope {slope}");
    }

    #[test]
    fn gn_two_matches_normal() {
        let m = Family::Gn(2.0).sample_matrix(20_000, 1, &mut stream(5));
        let phi = Normal::new(0.0, 1.0).unwrap();
        let ks = ks_distance(m.into_vec(), |x| phi.cdf(x));
        // 1% critical value of the one-sample KS statistic
        assert!(ks < 1.628 / (20_000f64).sqrt(), "ks {ks}");
    }

    fn integrate_density(aep: &Aep, upper: f64) -> f64 {
        // composite Simpson on (-L, upper], split at the kink at 0
        let simpson = |a: f64, b: f64, m: usize| {
            let h = (b - a) / m as f64;
            let mut s = aep.density(a) + aep.density(b);
            for i in 1..m {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * aep.density(a + i as f64 * h);
            }
            s * h / 3.0
        };
        let lower = -60.0;
        if upper <= 0.0 {
            simpson(lower, upper, 200_000)
        } else {
            simpson(lower, 0.0, 200_000) + simpson(0.0, upper, 200_000)
        }
    }

    #[test]
    fn aep_quantiles_match_integrated_density() {
        let aep = Aep::new(0.4, 1.182, 1.820).unwrap();
        for k in 1..=20 {
            let p = k as f64 / 21.0;
            let x = aep.quantile(p);
            let numeric = integrate_density(&aep, x);
            assert!((numeric - p).abs() < 1e-3, "p={p}: {numeric}");
        }
        assert!((aep.cdf(0.0) - 0.4).abs() < 1e-14);
    }

    #[test]
    fn aep_sampler_matches_cdf() {
        let aep = Aep::new(0.4, 1.182, 1.820).unwrap();
        let mut rng = stream(6);
        let v: Vec<f64> = (0..20_000).map(|_| aep.sample(&mut rng)).collect();
        let ks = ks_distance(v.clone(), |x| aep.cdf(x));
        assert!(ks < 1.628 / (20_000f64).sqrt(), "ks {ks}");
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        assert!((mean - aep.mean()).abs() < 4.0 * aep.variance().sqrt() / n.sqrt());
    }

    #[test]
    fn innovations_are_standardized() {
        let fams = [
            Family::Normal,
            Family::T(10.0),
            Family::Gn(1.65),
            "aep:0.4,1.182,1.820".parse().unwrap(),
        ];
        for fam in fams {
            let m = fam.sample_innovations(200_000, 2, &mut stream(7)).unwrap();
            for j in 0..2 {
                let c = column(&m, j);
                let n = c.len() as f64;
                let mean = c.iter().sum::<f64>() / n;
                let var = c.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
                assert!(mean.abs() < 0.02, "{fam} mean {mean}");
                assert!((var - 1.0).abs() < 0.03, "{fam} var {var}");
            }
        }
        assert!(Family::Ase(1.75).sample_innovations(10, 2, &mut stream(8)).is_err());
    }
}
