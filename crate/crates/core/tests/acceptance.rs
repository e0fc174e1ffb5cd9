//! Acceptance checks. Each test prints one `criterion N [PASS|FAIL]` line and
//! fails when its tolerance is not met.

use std::io::Write;

use mgf_normality::alternatives::Family;
use mgf_normality::garch::{
    qmle_fit, qmle_fit_with, simulate_with_burn_in, warp_speed_study, FitOptions, GarchParams, GarchStructure,
    WarpSpeedDesign,
};
use mgf_normality::linalg::{scale_residuals, symmetric_eigen, Matrix, Sample};
use mgf_normality::null_sim::{null_node, null_statistics, sample_standard_normal, upper_quantile, TestStatistic};
use mgf_normality::power::PowerStudy;
use mgf_normality::quadrature::radial_rule;
use mgf_normality::reference;
use mgf_normality::rng::SeedTree;
use mgf_normality::statistic::{
    asymptotic_mean, asymptotic_variance, compute_tn_beta, kernel_c, skewness_limit_statistic, tn_beta_quadrature,
    Beta,
};
use rand::Rng;
use rand_distr::StandardNormal;

const SEED: u64 = 2024;

/// Writes the verdict line past the test harness's output capture.
fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {id} [{verdict}] {name}: {detail}\n");
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {id} failed: {detail}");
}

fn beta(v: f64) -> Beta {
    Beta::new(v).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Skewed, heavy-ish sample `z + 0.3 z²` per coordinate.
fn skewed_sample(rng: &mut impl Rng, n: usize, d: usize) -> Sample {
    let data = (0..n * d)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            z + 0.3 * z * z
        })
        .collect();
    Sample::new(Matrix::from_vec(n, d, data)).unwrap()
}

#[test]
fn criterion_01_oracle_equivalence() {
    let mut rng = SeedTree::new(SEED).named("oracle").stream(0);
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let d = 1 + k % 2;
        let n = rng.random_range(5..=20);
        let b = [2.5, 3.0, 5.0][k % 3];
        let y = scale_residuals(&skewed_sample(&mut rng, n, d)).unwrap();
        let closed = compute_tn_beta(&y, beta(b)).unwrap().t_raw;
        let quad = tn_beta_quadrature(&y, beta(b), 96).unwrap();
        worst = worst.max(((closed - quad) / quad).abs());
    }
    report(
        1,
        "closed form equals quadrature of the weighted integral",
        worst < 1e-6,
        &format!("50 samples, max relative difference {worst:.2e} (tolerance 1e-6)"),
    );
}

#[test]
fn criterion_02_affine_invariance() {
    let mut rng = SeedTree::new(SEED).named("affine").stream(0);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < 100 {
        let d = [1, 2, 3, 5][count % 4];
        let n = rng.random_range(d + 10..60);
        let a = Matrix::from_vec(d, d, (0..d * d).map(|_| rng.sample(StandardNormal)).collect());
        let eig = symmetric_eigen(&a.transpose().matmul(&a)).values;
        let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        if !(lo > 0.0) || (hi / lo).sqrt() > 1e3 {
            continue;
        }
        let shift: Vec<f64> = (0..d).map(|_| 10.0 * rng.sample::<f64, _>(StandardNormal)).collect();
        let b = [2.5, 3.0, 5.0, 10.0][rng.random_range(0..4)];
        let x = skewed_sample(&mut rng, n, d);
        let y = x.affine_map(&a, &shift).unwrap();
        let tx = compute_tn_beta(&scale_residuals(&x).unwrap(), beta(b)).unwrap().t_raw;
        let ty = compute_tn_beta(&scale_residuals(&y).unwrap(), beta(b)).unwrap().t_raw;
        worst = worst.max(((tx - ty) / tx).abs());
        count += 1;
    }
    report(
        2,
        "affine invariance",
        worst < 1e-8,
        &format!("100 transformations, max relative change {worst:.2e} (tolerance 1e-8)"),
    );
}

/// `e^x - 1 - x - x²/2` without cancellation near zero.
fn exp_remainder3(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let (mut term, mut sum, mut k) = (x * x * x / 6.0, 0.0f64, 3.0);
        while term.abs() > 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            sum += term;
            k += 1.0;
            term *= x / k;
        }
        sum
    } else {
        x.exp_m1() - x - 0.5 * x * x
    }
}

/// `∫ C(t,t) e^{-β‖t‖²} dt` through the kernel, as a radial integral against
/// `e^{-(β-2)‖t‖²}`.
fn mean_oracle(d: usize, b: f64) -> f64 {
    radial_rule(d, b - 2.0, 80)
        .iter()
        .map(|&(r, w)| {
            let mut t = vec![0.0; d];
            t[0] = r.sqrt();
            w * kernel_c(&t, &t) * (-2.0 * r).exp()
        })
        .sum()
}

/// `2 ∬ C(s,t)² e^{-β(‖s‖²+‖t‖²)} ds dt` in coordinates `p = (s+t)/√2`,
/// `q = (s-t)/√2`, where the integrand depends on `‖p‖²`, `‖q‖²` only.
fn variance_oracle(d: usize, b: f64) -> f64 {
    let rp = radial_rule(d, b - 2.0, 80);
    let rq = radial_rule(d, b - 1.0, 80);
    let mut total = 0.0;
    for &(p2, wp) in &rp {
        for &(q2, wq) in &rq {
            total += wp * wq * (-p2).exp() * exp_remainder3(0.5 * (p2 - q2)).powi(2);
        }
    }
    2.0 * total
}

#[test]
fn criterion_03_asymptotic_moments() {
    // the reduced variance integrand agrees with the kernel where both are representable
    let (p2, q2, b): (f64, f64, f64) = (0.8, 0.3, 3.0);
    // p = (√p2, 0), q = (0, √q2)
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = [h * p2.sqrt(), h * q2.sqrt()];
    let t = [h * p2.sqrt(), -h * q2.sqrt()];
    let direct = kernel_c(&s, &t).powi(2) * (-b * (p2 + q2)).exp();
    let reduced = (-(b - 2.0) * p2 - (b - 1.0) * q2 - p2).exp() * exp_remainder3(0.5 * (p2 - q2)).powi(2);
    assert!(((direct - reduced) / direct).abs() < 1e-12);

    let (mut worst_mean, mut worst_var): (f64, f64) = (0.0, 0.0);
    for d in 1..=3 {
        for b in [2.5, 3.0, 4.0, 6.0] {
            let m = asymptotic_mean(d, beta(b)).unwrap();
            let v = asymptotic_variance(d, beta(b)).unwrap();
            worst_mean = worst_mean.max(((m - mean_oracle(d, b)) / m).abs());
            worst_var = worst_var.max(((v - variance_oracle(d, b)) / v).abs());
        }
    }
    report(
        3,
        "limiting mean and variance match kernel integrals",
        worst_mean < 1e-8 && worst_var < 1e-6,
        &format!("max relative error mean {worst_mean:.2e} (1e-8), variance {worst_var:.2e} (1e-6)"),
    );
}

/// Richardson extrapolation in `h = 1/β` over the ladder `β_0 2^k`.
fn extrapolate(values: &[f64]) -> f64 {
    let mut table = values.to_vec();
    for j in 1..values.len() {
        let f = 2f64.powi(j as i32);
        for k in (j..values.len()).rev() {
            table[k] = (f * table[k] - table[k - 1]) / (f - 1.0);
        }
    }
    *table.last().unwrap()
}

#[test]
fn criterion_04_skewness_limit() {
    let mut rng = SeedTree::new(SEED).named("ladder").stream(0);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let d = 1 + k % 3;
        let n = rng.random_range(10..=50);
        let y = scale_residuals(&skewed_sample(&mut rng, n, d)).unwrap();
        let ladder: Vec<f64> = (0..5)
            .map(|j| {
                let b = 10.0 * 2f64.powi(j);
                let t = compute_tn_beta(&y, beta(b)).unwrap();
                b.powf(3.0 + d as f64 / 2.0) * 96.0 * t.t_scaled / n as f64
            })
            .collect();
        let limit = skewness_limit_statistic(&y);
        worst = worst.max(((extrapolate(&ladder) - limit) / limit).abs());
    }
    report(
        4,
        "large-beta limit is the skewness combination",
        worst < 1e-3,
        &format!("20 samples, beta ladder 10..160, max relative error {worst:.2e} (tolerance 1e-3)"),
    );
}

#[test]
fn criterion_05_critical_values() {
    let reps = 10_000;
    // (d, n, β, upper-tail level)
    let cells: [(usize, usize, f64, f64); 10] = [
        (2, 50, 3.0, 0.10),
        (5, 100, 5.0, 0.05),
        (2, 20, 3.0, 0.05),
        (2, 100, 4.0, 0.10),
        (2, 400, 3.5, 0.05),
        (3, 50, 3.0, 0.10),
        (3, 200, 5.0, 0.05),
        (5, 20, 4.0, 0.10),
        (5, 50, 6.0, 0.05),
        (5, 400, 3.0, 0.10),
    ];
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    for &(d, n, b, alpha) in &cells {
        let stat = TestStatistic::Mgf(beta(b));
        let draws = null_statistics(stat, d, n, reps, null_node(SEED, d, n, stat), None).unwrap();
        let q = upper_quantile(&draws.sorted(), alpha);
        let r = reference::critical_value(d, n, b, alpha).unwrap();
        let rel = (q / r - 1.0).abs();
        worst = worst.max(rel);
        details.push(format!("({d},{n},{b},{alpha}) {q:.4e} vs {r:.4e}"));
    }
    report(
        5,
        "critical values at 1e4 replicates",
        worst < 0.05,
        &format!("{} entries, max relative deviation {:.2}% (tolerance 5%); {}", cells.len(), 100.0 * worst, details.join("; ")),
    );
}

#[test]
fn criterion_06_iid_power() {
    // (alternative, d, β)
    let cells = [
        ("ase:1.75", 2, 3.0),
        ("t:10", 5, 10.0),
        ("t:5", 2, 3.0),
        ("ase:1.85", 3, 5.0),
        ("t:7", 5, 6.0),
        ("ase:1.75", 5, 6.0),
    ];
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    for &(alt, d, b) in &cells {
        let family: Family = alt.parse().unwrap();
        let study = PowerStudy {
            family,
            d,
            n: reference::IID_POWER_N,
            stat: TestStatistic::Mgf(beta(b)),
            alpha: 0.05,
            null_reps: 20_000,
            trials: 10_000,
            seed: SEED,
            workers: None,
        };
        let pct = study.run().unwrap().count.percent();
        let r = reference::iid_power(alt, d, b).unwrap();
        worst = worst.max((pct - r).abs());
        details.push(format!("{alt} d={d} beta={b} {pct:.2} vs {r:.2}"));
    }
    report(
        6,
        "i.i.d. power at 1e4 trials",
        worst <= 3.0,
        &format!("max deviation {worst:.2} points (tolerance 3); {}", details.join("; ")),
    );
}

#[test]
fn criterion_07_qmle_recovery() {
    let truth = GarchParams::design(2, 0.4, 0.3).unwrap();
    let spec = truth.spec();
    let node = SeedTree::new(SEED).named("qmle");
    let full = FitOptions {
        structure: GarchStructure::Full,
        ..FitOptions::default()
    };
    let (mut g, mut r, mut g_full) = (Vec::new(), Vec::new(), Vec::new());
    for s in 0..100 {
        let path = simulate_with_burn_in(&truth, 2000, Family::Normal, &mut node.stream(s)).unwrap();
        let x = Sample::new(path.x).unwrap();
        let fit = qmle_fit(&x, spec, None).unwrap();
        for i in 0..2 {
            g.push((fit.params.garch[0][(i, i)] - 0.4).abs());
        }
        r.push((fit.params.r[(0, 1)] - 0.3).abs());
        let unrestricted = qmle_fit_with(&x, spec, None, &full).unwrap();
        for i in 0..2 {
            g_full.push((unrestricted.params.garch[0][(i, i)] - 0.4).abs());
        }
    }
    let (mg, mr, mf) = (median(g), median(r), median(g_full));
    report(
        7,
        "QMLE recovers the bivariate design",
        mg < 0.1 && mr < 0.05,
        &format!(
            "100 seeds, n=2000, diagonal GARCH matrix: median |gamma-0.4| {mg:.3} (0.1), median |r-0.3| {mr:.3} (0.05); \
             unrestricted GARCH matrix for comparison: median |gamma-0.4| {mf:.3}"
        ),
    );
}

fn warp_speed(family: Family) -> f64 {
    let design = WarpSpeedDesign {
        params: GarchParams::design(2, reference::GARCH_GAMMA, 0.0).unwrap(),
        innovations: family,
        n: reference::GARCH_N,
        stats: vec![TestStatistic::Mgf(beta(2.1))],
        alpha: 0.05,
        mc_samples: 2000,
        seed: SEED,
        workers: None,
        fit: FitOptions::default(),
    };
    100.0 * warp_speed_study(&design).unwrap().results[0].rate()
}

#[test]
fn criterion_08_garch_level() {
    let level = warp_speed(Family::Normal);
    report(
        8,
        "warp-speed bootstrap level",
        (3.5..=6.5).contains(&level),
        &format!("2000 samples, level {level:.2}% (interval [3.5, 6.5], reference 4.96)"),
    );
}

#[test]
fn criterion_09_garch_power() {
    let mut pass = true;
    let mut details = Vec::new();
    for alt in ["t:10", "aep:0.4,1.182,1.820"] {
        let pct = warp_speed(alt.parse().unwrap());
        let r = reference::garch_rejection(alt, 2, 0.0, 2.1).unwrap();
        pass &= (pct - r).abs() <= 4.0;
        details.push(format!("{alt} {pct:.2} vs {r:.2} (diff {:+.2})", pct - r));
    }
    report(
        9,
        "warp-speed power spot checks",
        pass,
        &format!("2000 samples, tolerance 4 points; {}", details.join("; ")),
    );
}

#[test]
fn criterion_10_consistency() {
    let mut rates = Vec::new();
    for n in [50, 100, 200, 400] {
        let study = PowerStudy {
            family: Family::T(5.0),
            d: 2,
            n,
            stat: TestStatistic::Mgf(beta(3.0)),
            alpha: 0.05,
            null_reps: 10_000,
            trials: 2_000,
            seed: SEED,
            workers: None,
        };
        rates.push(study.run().unwrap().count.percent());
    }
    let monotone = rates.windows(2).all(|w| w[1] > w[0]);
    let last = *rates.last().unwrap();
    report(
        10,
        "power against t5 grows with n",
        monotone && last > 99.0,
        &format!("rates over n = 50,100,200,400: {rates:.2?}; monotone {monotone}, n=400 above 99%: {}", last > 99.0),
    );
}

#[test]
fn null_sampler_is_standard_normal() {
    // sanity check for the generator the null distribution rests on
    let s = sample_standard_normal(20_000, 2, &mut SeedTree::new(SEED).stream(0)).unwrap();
    let m = s.data();
    for j in 0..2 {
        let mean = m.row_iter().map(|r| r[j]).sum::<f64>() / 20_000.0;
        let var = m.row_iter().map(|r| r[j] * r[j]).sum::<f64>() / 20_000.0;
        assert!(mean.abs() < 0.03 && (var - 1.0).abs() < 0.05);
    }
}
