//! Empirical power of the i.i.d. tests against a fixed alternative.

use rayon::prelude::*;

use crate::alternatives::Family;
use crate::error::{Error, Result};
use crate::null_sim::{null_node, null_statistics, standardized_statistic, upper_quantile, with_workers, TestStatistic};
use crate::rng::SeedTree;

/// Count of rejections out of a number of trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RejectionCount {
    pub rejections: usize,
    pub trials: usize,
    /// Samples redrawn because of a singular covariance.
    pub redraws: usize,
}

impl RejectionCount {
    pub fn rate(&self) -> f64 {
        self.rejections as f64 / self.trials as f64
    }

    pub fn percent(&self) -> f64 {
        100.0 * self.rate()
    }

    /// Binomial standard error of [`RejectionCount::rate`].
    pub fn std_error(&self) -> f64 {
        let p = self.rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Fraction of `trials` samples from `family` whose statistic exceeds `critical_value`.
#[allow(clippy::too_many_arguments)]
pub fn rejection_rate(
    family: Family,
    d: usize,
    n: usize,
    stat: TestStatistic,
    critical_value: f64,
    trials: usize,
    node: SeedTree,
    workers: Option<usize>,
) -> Result<RejectionCount> {
    family.validate()?;
    if trials == 0 {
        return Err(Error::InvalidSpec("trials must be positive".into()));
    }
    if n < d + 1 {
        return Err(Error::InvalidSample(format!("need n >= d+1, got n={n}, d={d}")));
    }
    let outcomes: Vec<Result<(f64, usize)>> = with_workers(workers, || {
        (0..trials as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = node.stream(i);
                standardized_statistic(stat, &mut rng, |r| {
                    crate::linalg::Sample::new(family.sample_matrix(n, d, r))
                })
            })
            .collect()
    });
    let mut count = RejectionCount {
        rejections: 0,
        trials,
        redraws: 0,
    };
    for o in outcomes {
        let (v, k) = o?;
        count.redraws += k;
        if v > critical_value {
            count.rejections += 1;
        }
    }
    Ok(count)
}

/// A complete power experiment: simulate the critical value, then the rejection rate.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerStudy {
    pub family: Family,
    pub d: usize,
    pub n: usize,
    pub stat: TestStatistic,
    pub alpha: f64,
    pub null_reps: usize,
    pub trials: usize,
    pub seed: u64,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerReport {
    pub critical_value: f64,
    pub count: RejectionCount,
}

impl PowerStudy {
    pub fn run(&self) -> Result<PowerReport> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidSpec(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        let node = null_node(self.seed, self.d, self.n, self.stat);
        let null = null_statistics(self.stat, self.d, self.n, self.null_reps, node, self.workers)?;
        let critical_value = upper_quantile(&null.sorted(), self.alpha);
        self.run_with_critical_value(critical_value)
    }

    /// Uses a known critical value instead of simulating one.
    pub fn run_with_critical_value(&self, critical_value: f64) -> Result<PowerReport> {
        let node = SeedTree::new(self.seed)
            .named("power")
            .named(&self.family.to_string())
            .named(&self.stat.label())
            .child(self.d as u64)
            .child(self.n as u64);
        let count = rejection_rate(
            self.family,
            self.d,
            self.n,
            self.stat,
            critical_value,
            self.trials,
            node,
            self.workers,
        )?;
        Ok(PowerReport {
            critical_value,
            count,
        })
    }
}
