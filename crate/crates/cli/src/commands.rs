use std::fs;
use std::io::Write;
use std::path::Path;

use mgf_normality::alternatives::Family;
use mgf_normality::garch::{
    bootstrap_test, qmle_fit_with, simulate_with_burn_in, warp_speed_study, BootstrapOptions, FitOptions,
    GarchFit, GarchParams, GarchSpec, GarchStructure, WarpSpeedDesign,
};
use mgf_normality::io::{column_names, read_matrix_path, read_sample_path, write_matrix};
use mgf_normality::linalg::{scale_residuals, Sample};
use mgf_normality::null_sim::{
    empirical_p_value, estimate_critical_values, null_node, null_statistics, upper_quantile, CriticalTable,
    McConfig, TestStatistic,
};
use mgf_normality::power::PowerStudy;
use mgf_normality::reference;
use mgf_normality::rng::SeedTree;
use mgf_normality::statistic::{compute_tn_beta, Beta};

use crate::config::{warn_small_beta, ConfigLine};
use crate::error::{CliError, CliResult};
use crate::{
    CritvalsArgs, GarchFitArgs, GarchPowerArgs, GarchSimArgs, GarchTestArgs, PowerArgs, Structure, TestArgs,
};

pub fn check_alpha(alpha: f64) -> CliResult<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--alpha must lie in (0,1), got {alpha}")))
    }
}

pub fn check_workers(workers: Option<usize>) -> CliResult<()> {
    match workers {
        Some(0) => Err(CliError::Usage("--workers must be positive".into())),
        _ => Ok(()),
    }
}

pub fn parse_family(s: &str) -> CliResult<Family> {
    let f: Family = s.parse().map_err(|e: mgf_normality::Error| CliError::Usage(e.to_string()))?;
    f.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(f)
}

fn mgf_beta(beta: f64) -> CliResult<Beta> {
    let b = Beta::new(beta).map_err(|e| CliError::Usage(e.to_string()))?;
    warn_small_beta(beta);
    Ok(b)
}

pub fn structure(s: Structure) -> GarchStructure {
    match s {
        Structure::Diagonal => GarchStructure::DiagonalGamma,
        Structure::Full => GarchStructure::Full,
    }
}

fn structure_name(s: Structure) -> &'static str {
    match s {
        Structure::Diagonal => "diagonal",
        Structure::Full => "full",
    }
}

/// Writes `text` to `path`, or to standard output when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn test(a: &TestArgs) -> CliResult<()> {
    check_alpha(a.alpha)?;
    check_workers(a.workers)?;
    let beta = mgf_beta(a.beta)?;
    McConfig::new(a.reps, a.seed)?;
    ConfigLine::new("test")
        .flag("input", a.input.display())
        .flag("beta", a.beta)
        .flag("reps", a.reps)
        .flag("seed", a.seed)
        .flag("alpha", a.alpha)
        .emit();
    let sample = read_sample_path(&a.input)?;
    let (n, d) = (sample.n(), sample.d());
    let value = compute_tn_beta(&scale_residuals(&sample)?, beta)?;
    let stat = TestStatistic::Mgf(beta);
    let null = null_statistics(stat, d, n, a.reps, null_node(a.seed, d, n, stat), a.workers)?;
    let p = empirical_p_value(value.t_scaled, &null.values);
    let cv = upper_quantile(&null.sorted(), a.alpha);
    println!("n = {n}");
    println!("d = {d}");
    println!("beta = {}", a.beta);
    println!("T = {:.10e}", value.t_raw);
    println!("T / pi^(d/2) = {:.10e}", value.t_scaled);
    println!("critical value ({}) = {cv:.10e}", a.alpha);
    println!("p-value = {p:.6}  ({} null replicates)", a.reps);
    let verdict = if p <= a.alpha { "reject normality" } else { "do not reject normality" };
    println!("decision at alpha = {}: {verdict}", a.alpha);
    Ok(())
}

pub fn critvals(a: &CritvalsArgs) -> CliResult<()> {
    check_workers(a.workers)?;
    for &alpha in &a.alpha {
        check_alpha(alpha)?;
    }
    let betas = a.beta.iter().map(|&b| mgf_beta(b)).collect::<CliResult<Vec<_>>>()?;
    let cfg = McConfig::new(a.reps, a.seed)?
        .with_alphas(a.alpha.clone())?
        .with_workers(a.workers);
    ConfigLine::new("critvals")
        .list("d", &a.d)
        .list("n", &a.n)
        .list("beta", &a.beta)
        .list("alpha", &a.alpha)
        .flag("reps", a.reps)
        .flag("seed", a.seed)
        .path("out", a.out.as_deref())
        .emit();
    let mut table: Option<CriticalTable> = None;
    for &d in &a.d {
        for &n in &a.n {
            for &beta in &betas {
                let t = estimate_critical_values(d, n, beta, &cfg)?;
                match table.as_mut() {
                    Some(all) => all.extend(t),
                    None => table = Some(t),
                }
            }
        }
    }
    let table = table.ok_or_else(|| CliError::Usage("empty grid".into()))?;
    for (lo, hi) in table.alpha_monotonicity_violations() {
        eprintln!(
            "warning: critical value not monotone in alpha at d={} n={} beta={}: {} vs {}",
            lo.d, lo.n, lo.beta, lo.critical_value, hi.critical_value
        );
    }
    emit(a.out.as_deref(), &table.to_csv_string())
}

pub fn power(a: &PowerArgs) -> CliResult<()> {
    check_alpha(a.alpha)?;
    check_workers(a.workers)?;
    let family = parse_family(&a.alt)?;
    let stat = if a.hw {
        if !(a.beta > 0.0) {
            return Err(CliError::Usage("BHEP smoothing parameter must be positive".into()));
        }
        TestStatistic::Hw(a.beta)
    } else {
        TestStatistic::Mgf(mgf_beta(a.beta)?)
    };
    McConfig::new(a.reps, a.seed)?;
    if a.mc == 0 {
        return Err(CliError::Usage("--mc must be positive".into()));
    }
    ConfigLine::new("power")
        .flag("alt", family)
        .flag("d", a.d)
        .flag("n", a.n)
        .flag("beta", a.beta)
        .switch("hw", a.hw)
        .flag("reps", a.reps)
        .flag("mc", a.mc)
        .flag("alpha", a.alpha)
        .flag("seed", a.seed)
        .emit();
    let study = PowerStudy {
        family,
        d: a.d,
        n: a.n,
        stat,
        alpha: a.alpha,
        null_reps: a.reps,
        trials: a.mc,
        seed: a.seed,
        workers: a.workers,
    };
    let report = study.run()?;
    println!("statistic = {}", stat.label());
    println!("alternative = {family}");
    println!("critical value = {:.10e}", report.critical_value);
    println!(
        "rejections = {} / {} = {:.2}% (standard error {:.2})",
        report.count.rejections,
        report.count.trials,
        report.count.percent(),
        100.0 * report.count.std_error()
    );
    Ok(())
}

fn load_params(path: &Path) -> CliResult<GarchParams> {
    let text = fs::read_to_string(path)?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        GarchParams::from_json(&text)
    } else {
        GarchParams::from_csv(&text)
    };
    Ok(parsed?)
}

pub fn garch_sim(a: &GarchSimArgs) -> CliResult<()> {
    let family = parse_family(&a.alt)?;
    let params = match &a.params {
        Some(p) => load_params(p)?,
        None => GarchParams::design(a.d, a.gamma, a.r)?,
    };
    if a.n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let mut line = ConfigLine::new("garch-sim");
    line = match &a.params {
        Some(p) => line.flag("params", p.display()),
        None => line.flag("d", a.d).flag("gamma", a.gamma).flag("r", a.r),
    };
    line.flag("n", a.n)
        .flag("alt", family)
        .flag("seed", a.seed)
        .path("out", a.out.as_deref())
        .emit();
    if let Some(w) = params.stationarity_warning() {
        eprintln!("warning: {w}");
    }
    let mut rng = SeedTree::new(a.seed).named("garch-sim").stream(0);
    let path = simulate_with_burn_in(&params, a.n, family, &mut rng)?;
    let mut buf = Vec::new();
    write_matrix(&mut buf, &path.x, Some(&column_names(params.d())))?;
    emit(a.out.as_deref(), &String::from_utf8_lossy(&buf))
}

fn spec_of(d: usize, p: usize, q: usize) -> CliResult<GarchSpec> {
    GarchSpec::new(d, p, q).map_err(|e| CliError::Usage(e.to_string()))
}

fn print_fit(fit: &GarchFit) {
    let spec = fit.params.spec();
    for (name, value) in GarchParams::flat_header(spec).iter().zip(fit.params.to_flat()).skip(3) {
        println!("{name} = {value:.6}");
    }
    println!("loglik = {:.6}", fit.loglik);
    println!("iterations = {}", fit.iterations);
    println!("converged = {}", fit.converged);
    println!("persistence radius = {:.6}", fit.params.persistence_radius());
}

pub fn garch_fit(a: &GarchFitArgs) -> CliResult<()> {
    ConfigLine::new("garch-fit")
        .flag("input", a.input.display())
        .flag("p", a.p)
        .flag("q", a.q)
        .flag("structure", structure_name(a.structure))
        .path("out", a.out.as_deref())
        .path("residuals", a.residuals.as_deref())
        .emit();
    let x = Sample::new(read_matrix_path(&a.input)?)?;
    let spec = spec_of(x.d(), a.p, a.q)?;
    if let Some(w) = GarchFit::small_sample_warning(x.n(), spec) {
        eprintln!("warning: {w}");
    }
    let opts = FitOptions {
        structure: structure(a.structure),
        ..FitOptions::default()
    };
    let fit = qmle_fit_with(&x, spec, None, &opts)?;
    if !fit.converged {
        eprintln!("warning: optimizer stopped before meeting the gradient tolerance");
    }
    if let Some(w) = fit.params.stationarity_warning() {
        eprintln!("warning: {w}");
    }
    print_fit(&fit);
    if let Some(out) = &a.out {
        let text = if out.extension().is_some_and(|e| e == "json") {
            fit.params.to_json()
        } else {
            fit.params.to_csv()
        };
        fs::write(out, text)?;
    }
    if let Some(out) = &a.residuals {
        let mut buf = Vec::new();
        write_matrix(&mut buf, fit.residuals.matrix(), Some(&column_names(spec.d)))?;
        fs::write(out, buf)?;
    }
    Ok(())
}

pub fn garch_test(a: &GarchTestArgs) -> CliResult<()> {
    check_alpha(a.alpha)?;
    check_workers(a.workers)?;
    let beta = mgf_beta(a.beta)?;
    let mut opts = BootstrapOptions::new(a.bootstrap, a.alpha)?;
    opts.fit.structure = structure(a.structure);
    opts.workers = a.workers;
    ConfigLine::new("garch-test")
        .flag("input", a.input.display())
        .flag("beta", a.beta)
        .flag("p", a.p)
        .flag("q", a.q)
        .flag("structure", structure_name(a.structure))
        .flag("bootstrap", a.bootstrap)
        .flag("alpha", a.alpha)
        .flag("seed", a.seed)
        .emit();
    let x = Sample::new(read_matrix_path(&a.input)?)?;
    let spec = spec_of(x.d(), a.p, a.q)?;
    if let Some(w) = GarchFit::small_sample_warning(x.n(), spec) {
        eprintln!("warning: {w}");
    }
    let out = bootstrap_test(&x, spec, beta, &opts, SeedTree::new(a.seed).named("garch-test"))?;
    println!("n = {}", x.n());
    println!("d = {}", x.d());
    println!("beta = {}", a.beta);
    println!("T^G = {:.10e}", out.statistic.t_raw);
    println!("T^G / pi^(d/2) = {:.10e}", out.statistic.t_scaled);
    if let Some(cv) = out.critical_value {
        println!("bootstrap critical value ({}) = {cv:.10e}", a.alpha);
    }
    if let Some(p) = out.p_value {
        println!("p-value = {p:.6}  ({} bootstrap replicates, {} failed fits)", out.replicates, out.failures);
    }
    let verdict = if out.reject { "reject normal innovations" } else { "do not reject normal innovations" };
    println!("decision at alpha = {}: {verdict}", a.alpha);
    Ok(())
}

pub fn garch_power(a: &GarchPowerArgs) -> CliResult<()> {
    check_alpha(a.alpha)?;
    check_workers(a.workers)?;
    let family = parse_family(&a.alt)?;
    let mut stats = a
        .beta
        .iter()
        .map(|&b| mgf_beta(b).map(TestStatistic::Mgf))
        .collect::<CliResult<Vec<_>>>()?;
    for &h in &a.hw_beta {
        if !(h > 0.0) {
            return Err(CliError::Usage("BHEP smoothing parameters must be positive".into()));
        }
        stats.push(TestStatistic::Hw(h));
    }
    let design = WarpSpeedDesign {
        params: GarchParams::design(a.d, a.gamma, a.r)?,
        innovations: family,
        n: a.n,
        stats,
        alpha: a.alpha,
        mc_samples: a.mc,
        seed: a.seed,
        workers: a.workers,
        fit: FitOptions {
            structure: structure(a.structure),
            ..FitOptions::default()
        },
    };
    design.validate()?;
    ConfigLine::new("garch-power")
        .flag("alt", family)
        .flag("d", a.d)
        .flag("gamma", a.gamma)
        .flag("r", a.r)
        .flag("n", a.n)
        .list("beta", &a.beta)
        .list("hw-beta", &a.hw_beta)
        .flag("structure", structure_name(a.structure))
        .flag("mc", a.mc)
        .flag("alpha", a.alpha)
        .flag("seed", a.seed)
        .emit();
    let report = warp_speed_study(&design)?;
    println!("innovations = {family}");
    println!("samples = {} completed, {} failed", report.completed, report.failures);
    let comparable = a.gamma == 0.4 && a.n == 300 && a.alpha == 0.05;
    for r in &report.results {
        let reference = match r.stat {
            TestStatistic::Mgf(b) if comparable => {
                reference::garch_rejection(&family.to_string(), a.d, a.r, b.value())
            }
            _ => None,
        };
        let tail = reference.map(|v| format!("  (reference {v:.2}%)")).unwrap_or_default();
        println!(
            "{}: rejections {:.2}%  critical value {:.6e}{tail}",
            r.stat.label(),
            100.0 * r.rate(),
            r.critical_value
        );
    }
    Ok(())
}
