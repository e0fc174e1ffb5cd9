use std::collections::HashMap;
use std::fs;

use mgf_normality::alternatives::Family;
use mgf_normality::garch::{warp_speed_study, FitOptions, GarchParams, WarpSpeedDesign};
use mgf_normality::null_sim::{null_node, null_statistics, upper_quantile, TestStatistic};
use mgf_normality::power::PowerStudy;
use mgf_normality::reference::{
    CRITICAL_BETAS, CRITICAL_VALUES, GARCH_BETAS, GARCH_GAMMA, GARCH_HW_BETAS, GARCH_N, GARCH_REJECTIONS,
    IID_POWER, IID_POWER_BETAS, IID_POWER_HW_BETAS, IID_POWER_N,
};
use mgf_normality::statistic::Beta;

use crate::commands::{check_workers, emit, parse_family};
use crate::config::ConfigLine;
use crate::error::{CliError, CliResult};
use crate::{Scale, TablesArgs, Which};

/// Replicates behind the reference critical values.
const REFERENCE_NULL_REPS: f64 = 100_000.0;
/// Trials behind the reference i.i.d. rejection rates.
const REFERENCE_IID_TRIALS: f64 = 10_000.0;
/// Samples behind the reference GARCH level and power.
const REFERENCE_GARCH_LEVEL_SAMPLES: f64 = 10_000.0;
const REFERENCE_GARCH_POWER_SAMPLES: f64 = 2_000.0;

/// Level used throughout the rejection tables.
const ALPHA: f64 = 0.05;

struct Report {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    z: Vec<f64>,
}

impl Report {
    fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
            z: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>, z: f64) {
        self.rows.push(row);
        self.z.push(z);
    }

    fn csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    fn aligned(&self) -> String {
        let mut width: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for r in &self.rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let line = |cells: Vec<&str>| {
            cells
                .iter()
                .zip(&width)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut s = line(self.header.clone());
        s.push('\n');
        for r in &self.rows {
            s.push_str(&line(r.iter().map(String::as_str).collect()));
            s.push('\n');
        }
        s
    }

    fn summary(&self) -> String {
        let finite: Vec<f64> = self.z.iter().copied().filter(|z| z.is_finite()).collect();
        let max = finite.iter().fold(0.0f64, |m, z| m.max(z.abs()));
        let over = finite.iter().filter(|z| z.abs() > 3.0).count();
        format!(
            "{} cells compared; max |z| = {max:.2}; {over} cells with |z| > 3",
            finite.len()
        )
    }
}

fn fmt_z(z: f64) -> String {
    if z.is_finite() {
        format!("{z:.2}")
    } else {
        "NA".into()
    }
}

fn keep<T: PartialEq>(filter: &[T], v: &T) -> bool {
    filter.is_empty() || filter.contains(v)
}

pub fn run(a: &TablesArgs) -> CliResult<()> {
    check_workers(a.workers)?;
    if a.emit_gnuplot.is_some() && a.out.is_none() {
        return Err(CliError::Usage("--emit-gnuplot needs --out for the data file".into()));
    }
    if a.reps.is_some_and(|r| r < 100) {
        return Err(CliError::Usage("--reps must be at least 100".into()));
    }
    if a.mc == Some(0) {
        return Err(CliError::Usage("--mc must be positive".into()));
    }
    let alts = a.alt.iter().map(|s| parse_family(s)).collect::<CliResult<Vec<_>>>()?;
    let which = match a.which {
        Which::Table1 => "table1",
        Which::Table2 => "table2",
        Which::Table3 => "table3",
    };
    let scale = match a.scale {
        Scale::Desk => "desk",
        Scale::Full => "full",
    };
    let alt_names: Vec<String> = alts.iter().map(ToString::to_string).collect();
    ConfigLine::new("tables")
        .positional(which)
        .flag("scale", scale)
        .opt("reps", a.reps)
        .opt("mc", a.mc)
        .list("d", &a.d)
        .list("n", &a.n)
        .opt("alt", (!alt_names.is_empty()).then(|| alt_names.join(";")))
        .flag("seed", a.seed)
        .path("out", a.out.as_deref())
        .path("emit-gnuplot", a.emit_gnuplot.as_deref())
        .emit();
    let report = match a.which {
        Which::Table1 => table1(a)?,
        Which::Table2 => table2(a, &alts)?,
        Which::Table3 => table3(a, &alts)?,
    };
    if report.rows.is_empty() {
        return Err(CliError::Usage("the filters select no reference cells".into()));
    }
    match &a.out {
        Some(path) => {
            fs::write(path, report.csv())?;
            print!("{}", report.aligned());
            println!("{}", report.summary());
        }
        None => {
            emit(None, &report.csv())?;
            eprintln!("{}", report.summary());
        }
    }
    if let (Some(script), Some(data)) = (&a.emit_gnuplot, &a.out) {
        fs::write(script, gnuplot(a.which, &data.display().to_string()))?;
    }
    Ok(())
}

/// Standard error of an upper quantile estimate from the sorted draws,
/// using a difference quotient of the empirical quantile function.
fn quantile_se(sorted: &[f64], alpha: f64, reps: f64) -> f64 {
    let h = 0.01f64.min(alpha / 2.0);
    let spread = upper_quantile(sorted, alpha - h) - upper_quantile(sorted, alpha + h);
    (alpha * (1.0 - alpha)).sqrt() * spread / (2.0 * h) * (1.0 / reps + 1.0 / REFERENCE_NULL_REPS).sqrt()
}

fn table1(a: &TablesArgs) -> CliResult<Report> {
    let reps = a.reps.unwrap_or(match a.scale {
        Scale::Desk => 10_000,
        Scale::Full => 100_000,
    });
    let mut report = Report::new(vec![
        "d", "n", "beta", "alpha", "critical_value", "reference", "rel_diff", "z", "reps", "seed",
    ]);
    let mut cells: Vec<(usize, usize)> = CRITICAL_VALUES.iter().map(|r| (r.0, r.1)).collect();
    cells.dedup();
    for (d, n) in cells {
        if !keep(&a.d, &d) || !keep(&a.n, &n) {
            continue;
        }
        for (j, &b) in CRITICAL_BETAS.iter().enumerate() {
            let stat = TestStatistic::Mgf(Beta::new(b)?);
            let sorted = null_statistics(stat, d, n, reps, null_node(a.seed, d, n, stat), a.workers)?.sorted();
            for &(_, _, alpha, values) in CRITICAL_VALUES.iter().filter(|r| r.0 == d && r.1 == n).rev() {
                let q = upper_quantile(&sorted, alpha);
                let reference = values[j];
                let z = (q - reference) / quantile_se(&sorted, alpha, reps as f64);
                report.push(
                    vec![
                        d.to_string(),
                        n.to_string(),
                        b.to_string(),
                        alpha.to_string(),
                        format!("{q:.6e}"),
                        format!("{reference:.4e}"),
                        format!("{:.4}", q / reference - 1.0),
                        fmt_z(z),
                        reps.to_string(),
                        a.seed.to_string(),
                    ],
                    z,
                );
            }
        }
    }
    Ok(report)
}

/// z-score of a rejection rate against a reference rate with its own Monte Carlo error.
fn rate_z(ours: f64, trials: f64, reference: f64, reference_trials: f64) -> f64 {
    let var = ours * (1.0 - ours) / trials + reference * (1.0 - reference) / reference_trials;
    if var > 0.0 {
        (ours - reference) / var.sqrt()
    } else {
        f64::NAN
    }
}

fn table2(a: &TablesArgs, alts: &[Family]) -> CliResult<Report> {
    let (null_reps, trials) = match a.scale {
        Scale::Desk => (10_000, 2_000),
        Scale::Full => (100_000, 10_000),
    };
    let null_reps = a.reps.unwrap_or(null_reps);
    let trials = a.mc.unwrap_or(trials);
    let n = IID_POWER_N;
    let mut report = Report::new(vec![
        "alternative", "d", "n", "statistic", "beta", "rejection_pct", "reference_pct", "diff", "z", "trials",
        "null_reps", "seed",
    ]);
    let mut critical: HashMap<(usize, String), f64> = HashMap::new();
    for &(alt, d, mgf_ref, hw_ref) in IID_POWER.iter() {
        let family = parse_family(alt)?;
        if !keep(&a.d, &d) || !keep(alts, &family) {
            continue;
        }
        let mut stats: Vec<(TestStatistic, f64, f64)> = Vec::new();
        for (&b, &r) in IID_POWER_BETAS.iter().zip(&mgf_ref) {
            stats.push((TestStatistic::Mgf(Beta::new(b)?), b, r));
        }
        for (&b, &r) in IID_POWER_HW_BETAS.iter().zip(&hw_ref) {
            stats.push((TestStatistic::Hw(b), b, r));
        }
        for (stat, b, reference) in stats {
            let key = (d, stat.label());
            let cv = match critical.get(&key) {
                Some(&cv) => cv,
                None => {
                    let draws = null_statistics(stat, d, n, null_reps, null_node(a.seed, d, n, stat), a.workers)?;
                    let cv = upper_quantile(&draws.sorted(), ALPHA);
                    critical.insert(key, cv);
                    cv
                }
            };
            let study = PowerStudy {
                family,
                d,
                n,
                stat,
                alpha: ALPHA,
                null_reps,
                trials,
                seed: a.seed,
                workers: a.workers,
            };
            let pct = study.run_with_critical_value(cv)?.count.percent();
            let z = rate_z(pct / 100.0, trials as f64, reference / 100.0, REFERENCE_IID_TRIALS);
            let name = match stat {
                TestStatistic::Mgf(_) => "T",
                TestStatistic::Hw(_) => "HW",
            };
            report.push(
                vec![
                    family.to_string(),
                    d.to_string(),
                    n.to_string(),
                    name.into(),
                    b.to_string(),
                    format!("{pct:.2}"),
                    format!("{reference:.2}"),
                    format!("{:.2}", pct - reference),
                    fmt_z(z),
                    trials.to_string(),
                    null_reps.to_string(),
                    a.seed.to_string(),
                ],
                z,
            );
        }
    }
    Ok(report)
}

fn table3(a: &TablesArgs, alts: &[Family]) -> CliResult<Report> {
    let mut report = Report::new(vec![
        "innovations", "d", "r", "statistic", "beta", "rejection_pct", "reference_pct", "diff", "z", "mc_samples",
        "seed",
    ]);
    for &(alt, d, r, mgf_ref, hw_ref) in GARCH_REJECTIONS.iter() {
        let family = parse_family(alt)?;
        if !keep(&a.d, &d) || !keep(alts, &family) {
            continue;
        }
        let level = matches!(family, Family::Normal);
        let reference_samples = if level {
            REFERENCE_GARCH_LEVEL_SAMPLES
        } else {
            REFERENCE_GARCH_POWER_SAMPLES
        };
        let mc = a.mc.unwrap_or(match a.scale {
            Scale::Desk => 500,
            Scale::Full => reference_samples as usize,
        });
        let mut stats = Vec::new();
        let mut refs = Vec::new();
        for (&b, &v) in GARCH_BETAS.iter().zip(&mgf_ref) {
            stats.push(TestStatistic::Mgf(Beta::new(b)?));
            refs.push((b, v));
        }
        for (&b, &v) in GARCH_HW_BETAS.iter().zip(&hw_ref) {
            stats.push(TestStatistic::Hw(b));
            refs.push((b, v));
        }
        let design = WarpSpeedDesign {
            params: GarchParams::design(d, GARCH_GAMMA, r)?,
            innovations: family,
            n: GARCH_N,
            stats,
            alpha: ALPHA,
            mc_samples: mc,
            seed: a.seed,
            workers: a.workers,
            fit: FitOptions::default(),
        };
        let out = warp_speed_study(&design)?;
        for (res, &(b, reference)) in out.results.iter().zip(&refs) {
            let pct = 100.0 * res.rate();
            let z = rate_z(pct / 100.0, res.completed as f64, reference / 100.0, reference_samples);
            let name = match res.stat {
                TestStatistic::Mgf(_) => "T",
                TestStatistic::Hw(_) => "HW",
            };
            report.push(
                vec![
                    family.to_string(),
                    d.to_string(),
                    r.to_string(),
                    name.into(),
                    b.to_string(),
                    format!("{pct:.2}"),
                    format!("{reference:.2}"),
                    format!("{:.2}", pct - reference),
                    fmt_z(z),
                    res.completed.to_string(),
                    a.seed.to_string(),
                ],
                z,
            );
        }
    }
    Ok(report)
}

/// Scatter of computed against reference values with the identity line.
fn gnuplot(which: Which, data: &str) -> String {
    let (x, y, log, label) = match which {
        Which::Table1 => (6, 5, "set logscale xy\n", "critical value"),
        Which::Table2 | Which::Table3 => (7, 6, "", "rejection rate (%)"),
    };
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         {log}set xlabel 'reference {label}'\n\
         set ylabel 'computed {label}'\n\
         set size square\n\
         plot '{data}' using {x}:{y} with points pt 7 title 'cells', x with lines title 'identity'\n"
    )
}
