//! Seeded Monte Carlo under the null: standard-normal samples, critical-value
//! tables and empirical p-values.
//!
//! Replicate `i` always draws from `SeedTree::stream(i)` of the node it belongs
//! to, so every replicate can be recomputed in isolation and results do not
//! depend on how many worker threads ran them.

use std::io::Write;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{scale_residuals, Matrix, Sample, ScaledResiduals};
use crate::rng::{SeedTree, Stream};
use crate::statistic::{compute_tn_beta, hw_statistic, Beta, StatisticValue};

/// Redraw budget for a replicate whose covariance came out singular.
const MAX_REDRAWS: usize = 100;

/// Replication settings shared by all Monte Carlo routines.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub reps: usize,
    pub seed: u64,
    pub alpha_levels: Vec<f64>,
    /// Advisory worker count; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl McConfig {
    pub fn new(reps: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            reps,
            seed,
            alpha_levels: vec![0.05, 0.10],
            workers: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_alphas(mut self, alphas: Vec<f64>) -> Result<Self> {
        self.alpha_levels = alphas;
        self.validate()?;
        Ok(self)
    }

    pub fn with_workers(mut self, workers: Option<usize>) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 100 {
            return Err(Error::InvalidSpec(format!(
                "at least 100 replicates required, got {}",
                self.reps
            )));
        }
        if self.alpha_levels.is_empty() {
            return Err(Error::InvalidSpec("no significance levels given".into()));
        }
        for &a in &self.alpha_levels {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::InvalidSpec(format!("alpha must lie in (0,1), got {a}")));
            }
        }
        Ok(())
    }
}

/// Runs `f` inside a pool of the requested size, or directly when `None`.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(k) if k > 0 => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

/// An `n × d` matrix of i.i.d. `N(0,1)` draws.
pub fn standard_normal_matrix(n: usize, d: usize, rng: &mut Stream) -> Matrix {
    let data = (0..n * d).map(|_| StandardNormal.sample(rng)).collect();
    Matrix::from_vec(n, d, data)
}

/// `n` i.i.d. rows from `N_d(0, I_d)`.
pub fn sample_standard_normal(n: usize, d: usize, rng: &mut Stream) -> Result<Sample> {
    Sample::new(standard_normal_matrix(n, d, rng))
}

/// Which statistic a simulation evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestStatistic {
    /// `π^{-d/2} T_{n,β}`.
    Mgf(Beta),
    /// The BHEP comparator with its own smoothing parameter.
    Hw(f64),
}

impl TestStatistic {
    pub fn evaluate(&self, y: &ScaledResiduals) -> Result<f64> {
        match *self {
            TestStatistic::Mgf(beta) => Ok(compute_tn_beta(y, beta)?.t_scaled),
            TestStatistic::Hw(b) => hw_statistic(y, b),
        }
    }

    pub fn label(&self) -> String {
        match self {
            TestStatistic::Mgf(b) => format!("T(beta={})", b.value()),
            TestStatistic::Hw(b) => format!("HW(beta={b})"),
        }
    }
}

/// Draws a sample with `draw` and standardizes it, redrawing from the same
/// stream when the covariance is singular. Returns the statistic and the
/// number of redraws.
pub fn standardized_statistic(
    stat: TestStatistic,
    rng: &mut Stream,
    mut draw: impl FnMut(&mut Stream) -> Result<Sample>,
) -> Result<(f64, usize)> {
    let mut redraws = 0;
    loop {
        let sample = draw(rng)?;
        match scale_residuals(&sample) {
            Ok(y) => return Ok((stat.evaluate(&y)?, redraws)),
            Err(Error::SingularCovariance { .. }) if redraws < MAX_REDRAWS => redraws += 1,
            Err(e) => return Err(e),
        }
    }
}

/// Statistic values from `reps` null samples, in replicate order.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDraws {
    pub values: Vec<f64>,
    /// Replicates redrawn because of a singular sample covariance.
    pub redraws: usize,
}

impl NullDraws {
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Simulates the null distribution of `stat` at sample size `n`, dimension `d`.
pub fn null_statistics(
    stat: TestStatistic,
    d: usize,
    n: usize,
    reps: usize,
    node: SeedTree,
    workers: Option<usize>,
) -> Result<NullDraws> {
    if n < d + 1 {
        return Err(Error::InvalidSample(format!("need n >= d+1, got n={n}, d={d}")));
    }
    let results: Vec<Result<(f64, usize)>> = with_workers(workers, || {
        (0..reps as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = node.stream(i);
                standardized_statistic(stat, &mut rng, |r| sample_standard_normal(n, d, r))
            })
            .collect()
    });
    let mut values = Vec::with_capacity(reps);
    let mut redraws = 0;
    for r in results {
        let (v, k) = r?;
        values.push(v);
        redraws += k;
    }
    Ok(NullDraws { values, redraws })
}

/// Upper empirical `α` quantile: order statistic `⌈reps(1-α)⌉` of sorted draws.
pub fn upper_quantile(sorted: &[f64], alpha: f64) -> f64 {
    assert!(!sorted.is_empty(), "no draws");
    let k = ((sorted.len() as f64) * (1.0 - alpha)).ceil() as usize;
    sorted[k.clamp(1, sorted.len()) - 1]
}

/// Result of a single goodness-of-fit test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestOutcome {
    pub statistic: StatisticValue,
    /// On the `π^{-d/2}` scale, when one was estimated.
    pub critical_value: Option<f64>,
    pub p_value: Option<f64>,
    pub alpha: f64,
    pub reject: bool,
    /// Null or bootstrap replicates behind the p-value.
    pub replicates: usize,
    /// Bootstrap replicates that failed to fit.
    pub failures: usize,
}

/// `(1 + #{draws ≥ observed}) / (1 + #draws)`.
pub fn empirical_p_value(observed: f64, null_draws: &[f64]) -> f64 {
    assert!(!null_draws.is_empty(), "no null draws");
    let exceed = null_draws.iter().filter(|&&v| v >= observed).count();
    (1 + exceed) as f64 / (1 + null_draws.len()) as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalEntry {
    pub d: usize,
    pub n: usize,
    pub beta: f64,
    pub alpha: f64,
    /// On the `π^{-d/2}` scale.
    pub critical_value: f64,
}

/// Critical values keyed by `(d, n, β, α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalTable {
    pub entries: Vec<CriticalEntry>,
    pub reps: usize,
    pub seed: u64,
    pub redraws: usize,
}

impl CriticalTable {
    pub fn lookup(&self, d: usize, n: usize, beta: f64, alpha: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.d == d && e.n == n && e.beta == beta && e.alpha == alpha)
            .map(|e| e.critical_value)
    }

    pub fn extend(&mut self, other: CriticalTable) {
        self.entries.extend(other.entries);
        self.redraws += other.redraws;
    }

    /// Cells where a smaller α does not give a larger critical value.
    pub fn alpha_monotonicity_violations(&self) -> Vec<(CriticalEntry, CriticalEntry)> {
        let mut out = Vec::new();
        for a in &self.entries {
            for b in &self.entries {
                if a.d == b.d
                    && a.n == b.n
                    && a.beta == b.beta
                    && a.alpha < b.alpha
                    && a.critical_value < b.critical_value
                {
                    out.push((*a, *b));
                }
            }
        }
        out
    }

    /// Cells where a larger β gives a larger critical value. Warn-only.
    pub fn beta_monotonicity_violations(&self) -> Vec<(CriticalEntry, CriticalEntry)> {
        let mut out = Vec::new();
        for a in &self.entries {
            for b in &self.entries {
                if a.d == b.d
                    && a.n == b.n
                    && a.alpha == b.alpha
                    && a.beta < b.beta
                    && a.critical_value < b.critical_value
                {
                    out.push((*a, *b));
                }
            }
        }
        out
    }

    /// CSV with header `d,n,beta,alpha,critical_value,reps,seed`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(["d", "n", "beta", "alpha", "critical_value", "reps", "seed"])
            .map_err(csv_err)?;
        for e in &self.entries {
            w.write_record([
                e.d.to_string(),
                e.n.to_string(),
                e.beta.to_string(),
                e.alpha.to_string(),
                format!("{:.16e}", e.critical_value),
                self.reps.to_string(),
                self.seed.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

/// Seed-tree node for the null simulation at one `(d, n, β)` cell.
pub fn null_node(seed: u64, d: usize, n: usize, stat: TestStatistic) -> SeedTree {
    SeedTree::new(seed)
        .named("null")
        .named(&stat.label())
        .child(d as u64)
        .child(n as u64)
}

/// Upper-α critical values of `π^{-d/2} T_{n,β}` for every level in `cfg`.
pub fn estimate_critical_values(
    d: usize,
    n: usize,
    beta: Beta,
    cfg: &McConfig,
) -> Result<CriticalTable> {
    cfg.validate()?;
    let stat = TestStatistic::Mgf(beta);
    let draws = null_statistics(stat, d, n, cfg.reps, null_node(cfg.seed, d, n, stat), cfg.workers)?;
    let sorted = draws.sorted();
    let entries = cfg
        .alpha_levels
        .iter()
        .map(|&alpha| CriticalEntry {
            d,
            n,
            beta: beta.value(),
            alpha,
            critical_value: upper_quantile(&sorted, alpha),
        })
        .collect();
    Ok(CriticalTable {
        entries,
        reps: cfg.reps,
        seed: cfg.seed,
        redraws: draws.redraws,
    })
}
