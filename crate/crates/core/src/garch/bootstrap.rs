use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::alternatives::Family;
use crate::error::{Error, Result};
use crate::linalg::Sample;
use crate::null_sim::{empirical_p_value, standard_normal_matrix, upper_quantile, with_workers, TestOutcome, TestStatistic};
use crate::rng::{SeedTree, Stream};
use crate::statistic::{compute_tn_beta, Beta};

use super::fit::{decode, encode, qmle_fit_with, FitOptions, GarchFit};
use super::sim::{simulate_from_presample, simulate_with_burn_in};
use super::{GarchParams, GarchSpec};

/// Replicates allowed to fail before a bootstrap run is abandoned.
const MAX_FAILURE_RATE: f64 = 0.05;

/// Spread of the random restart around the failed start, in unconstrained units.
const RESTART_SCALE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapOptions {
    pub b_reps: usize,
    pub alpha: f64,
    pub fit: FitOptions,
    pub workers: Option<usize>,
}

impl BootstrapOptions {
    pub fn new(b_reps: usize, alpha: f64) -> Result<Self> {
        if b_reps < 99 {
            return Err(Error::InvalidSpec(format!(
                "at least 99 bootstrap replicates required, got {b_reps}"
            )));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidSpec(format!("alpha must lie in (0,1), got {alpha}")));
        }
        Ok(Self {
            b_reps,
            alpha,
            fit: FitOptions::default(),
            workers: None,
        })
    }
}

/// Fits `x` from `init`, retrying once from a random perturbation of it.
fn fit_with_retry(
    x: &Sample,
    spec: GarchSpec,
    init: Option<&GarchParams>,
    opts: &FitOptions,
    rng: &mut Stream,
) -> Result<GarchFit> {
    match qmle_fit_with(x, spec, init, opts) {
        Ok(f) => Ok(f),
        Err(first) => {
            let base = match init {
                Some(p) => p.clone(),
                None => super::default_start(x.data(), spec)?,
            };
            let mut phi = encode(&base, opts.structure)?;
            for v in &mut phi {
                let z: f64 = StandardNormal.sample(rng);
                *v += RESTART_SCALE * z;
            }
            let restart = decode(spec, opts.structure, &phi);
            qmle_fit_with(x, spec, Some(&restart), opts).map_err(|_| first)
        }
    }
}

/// One parametric-bootstrap draw: Gaussian innovations through the fitted
/// model with the fit's presample, then a refit started at `θ̂`.
fn bootstrap_replicate(
    fit: &GarchFit,
    n: usize,
    stats: &[TestStatistic],
    opts: &FitOptions,
    rng: &mut Stream,
) -> Result<Vec<f64>> {
    let spec = fit.params.spec();
    let eps = standard_normal_matrix(n, spec.d, rng);
    let path = simulate_from_presample(&fit.params, &eps, &fit.presample)?;
    let xs = Sample::new(path.x)?;
    let refit = fit_with_retry(&xs, spec, Some(&fit.params), opts, rng)?;
    stats.iter().map(|s| s.evaluate(&refit.residuals)).collect()
}

fn check_failures(failed: usize, total: usize) -> Result<()> {
    if failed as f64 > MAX_FAILURE_RATE * total as f64 {
        return Err(Error::TooManyBootstrapFailures { failed, total });
    }
    Ok(())
}

/// Parametric bootstrap test of Gaussian innovations in a CCC-GARCH model.
///
/// Fits `x`, computes `T^G_{n,β}` on the residuals, then for each replicate
/// simulates from the fitted model with `N(0, I)` innovations, refits and
/// recomputes. The p-value is [`empirical_p_value`] against the replicates.
pub fn bootstrap_test(
    x: &Sample,
    spec: GarchSpec,
    beta: Beta,
    opts: &BootstrapOptions,
    node: SeedTree,
) -> Result<TestOutcome> {
    let mut rng = node.named("fit").stream(0);
    let fit = fit_with_retry(x, spec, None, &opts.fit, &mut rng)?;
    let observed = compute_tn_beta(&fit.residuals, beta)?;
    let stat = [TestStatistic::Mgf(beta)];
    let n = x.n();
    let reps = node.named("replicates");
    let results: Vec<Result<Vec<f64>>> = with_workers(opts.workers, || {
        (0..opts.b_reps as u64)
            .into_par_iter()
            .map(|i| bootstrap_replicate(&fit, n, &stat, &opts.fit, &mut reps.stream(i)))
            .collect()
    });
    let mut draws = Vec::with_capacity(opts.b_reps);
    let mut failed = 0;
    for r in results {
        match r {
            Ok(v) => draws.push(v[0]),
            Err(_) => failed += 1,
        }
    }
    check_failures(failed, opts.b_reps)?;
    let p = empirical_p_value(observed.t_scaled, &draws);
    let mut sorted = draws.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(TestOutcome {
        statistic: observed,
        critical_value: Some(upper_quantile(&sorted, opts.alpha)),
        p_value: Some(p),
        alpha: opts.alpha,
        reject: p <= opts.alpha,
        replicates: draws.len(),
        failures: failed,
    })
}

/// A warp-speed Monte Carlo experiment on CCC-GARCH data.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpSpeedDesign {
    /// Data-generating parameters.
    pub params: GarchParams,
    pub innovations: Family,
    pub n: usize,
    /// Statistics evaluated on the same fits.
    pub stats: Vec<TestStatistic>,
    pub alpha: f64,
    pub mc_samples: usize,
    pub seed: u64,
    pub workers: Option<usize>,
    pub fit: FitOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatisticRejections {
    pub stat: TestStatistic,
    /// Upper-α quantile of the pooled bootstrap statistics.
    pub critical_value: f64,
    pub rejections: usize,
    pub completed: usize,
}

impl StatisticRejections {
    pub fn rate(&self) -> f64 {
        self.rejections as f64 / self.completed as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WarpSpeedReport {
    pub results: Vec<StatisticRejections>,
    pub completed: usize,
    pub failures: usize,
    /// `observed[s][i]`: statistic `s` on Monte Carlo sample `i`.
    pub observed: Vec<Vec<f64>>,
    /// `resampled[s][i]`: the single bootstrap value paired with sample `i`.
    pub resampled: Vec<Vec<f64>>,
}

impl WarpSpeedReport {
    /// Per-sample p-values of statistic `s` against the pooled bootstrap values.
    pub fn p_values(&self, s: usize) -> Vec<f64> {
        self.observed[s]
            .iter()
            .map(|&t| empirical_p_value(t, &self.resampled[s]))
            .collect()
    }
}

impl WarpSpeedDesign {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.innovations.validate()?;
        if self.mc_samples < 500 {
            return Err(Error::InvalidSpec(format!(
                "warp-speed needs at least 500 Monte Carlo samples, got {}",
                self.mc_samples
            )));
        }
        if self.stats.is_empty() {
            return Err(Error::InvalidSpec("no statistics requested".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidSpec(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        Ok(())
    }

    fn node(&self) -> SeedTree {
        SeedTree::new(self.seed)
            .named("warp-speed")
            .named(&self.innovations.to_string())
            .named(&format!("{:?}", self.params.to_flat()))
            .child(self.n as u64)
    }

    /// Observed and resampled statistics for Monte Carlo sample `i`.
    pub fn sample_pair(&self, i: u64) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut rng = self.node().stream(i);
        let spec = self.params.spec();
        let path = simulate_with_burn_in(&self.params, self.n, self.innovations, &mut rng)?;
        let x = Sample::new(path.x)?;
        let fit = fit_with_retry(&x, spec, None, &self.fit, &mut rng)?;
        let observed = self
            .stats
            .iter()
            .map(|s| s.evaluate(&fit.residuals))
            .collect::<Result<Vec<_>>>()?;
        let resampled = bootstrap_replicate(&fit, self.n, &self.stats, &self.fit, &mut rng)?;
        Ok((observed, resampled))
    }

    /// Runs samples `0..count` without the minimum-size check.
    pub(crate) fn run_samples(&self, count: usize) -> Result<WarpSpeedReport> {
        let pairs: Vec<Result<(Vec<f64>, Vec<f64>)>> = with_workers(self.workers, || {
            (0..count as u64).into_par_iter().map(|i| self.sample_pair(i)).collect()
        });
        let k = self.stats.len();
        let mut observed = vec![Vec::with_capacity(count); k];
        let mut resampled = vec![Vec::with_capacity(count); k];
        let mut failures = 0;
        for p in pairs {
            match p {
                Ok((o, r)) => {
                    for s in 0..k {
                        observed[s].push(o[s]);
                        resampled[s].push(r[s]);
                    }
                }
                Err(_) => failures += 1,
            }
        }
        check_failures(failures, count)?;
        let completed = count - failures;
        let results = self
            .stats
            .iter()
            .enumerate()
            .map(|(s, &stat)| {
                let mut pooled = resampled[s].clone();
                pooled.sort_by(f64::total_cmp);
                let critical_value = upper_quantile(&pooled, self.alpha);
                let rejections = observed[s].iter().filter(|&&t| t > critical_value).count();
                StatisticRejections {
                    stat,
                    critical_value,
                    rejections,
                    completed,
                }
            })
            .collect();
        Ok(WarpSpeedReport {
            results,
            completed,
            failures,
            observed,
            resampled,
        })
    }
}

/// Warp-speed study: one bootstrap resample per Monte Carlo sample, with the
/// pooled resampled statistics as the null reference.
pub fn warp_speed_study(design: &WarpSpeedDesign) -> Result<WarpSpeedReport> {
    design.validate()?;
    design.run_samples(design.mc_samples)
}
