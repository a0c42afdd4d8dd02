//! One test per acceptance criterion. Every test writes a `criterion N:
//! PASS|FAIL` line with its measured statistics straight to stderr so the
//! line shows up even when the harness captures output.

use std::io::Write;
use std::time::{Duration, Instant};

use imbalance_evt::datagen::{
    gaussian_schedule_residual, generate, wce_analytic, wce_empirical, Dataset, GenRecipe,
};
use imbalance_evt::distributions::{evt_constants, ConstantSet, DistributionSpec, LimitLaw};
use imbalance_evt::evt_limits::{
    bounds_frechet, expx_sandwich, gaussian_tail_bounds, validate_theorem, TheoremBudget,
    ValidationReport, ValidationSettings,
};
use imbalance_evt::experiments::{
    run_cosine_study, run_fig1_sweep, run_fig3_grid, ExperimentConfig, ResultRow,
};
use imbalance_evt::special::normal_sf;
use imbalance_evt::stats::{ks_distance, spearman};
use imbalance_evt::svm::{solve_svm_1d, train_hard_svm, LinearModel};
use imbalance_evt::{Family, SeedTree};
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

/// Seed shared by every Monte Carlo criterion.
const SEED: u64 = 7;

fn verdict(id: u32, name: &str, pass: bool, detail: &str, elapsed: Duration) -> bool {
    let status = if pass { "PASS" } else { "FAIL" };
    let line = format!(
        "criterion {id:>2} [{name}]: {status} ({detail}; {:.1}s)\n",
        elapsed.as_secs_f64()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    pass
}

fn theorem_report(family: Family, eps: f64, delta: f64, gamma: f64, beta: Ratio<u64>, n: u64, alpha: f64) -> ValidationReport {
    let budget = TheoremBudget::new(eps, delta, gamma, beta, n, alpha).unwrap();
    validate_theorem(family, &budget, &ValidationSettings::new(2000, SEED)).unwrap()
}

fn event_detail(r: &ValidationReport) -> String {
    format!(
        "event freq {:.4}, floor {:.3}, Wilson slack {:.4}, non-separable {}",
        r.empirical_freq, r.prob_floor, r.wilson_slack, r.non_separable_count
    )
}

fn stat_rows<'a>(rows: &'a [ResultRow], stat: &str) -> Vec<&'a ResultRow> {
    rows.iter().filter(|r| r.stat == stat).collect()
}

#[test]
fn criterion_01_dual_solver_matches_closed_form() {
    let start = Instant::now();
    let mut rng = SeedTree::new(SEED).stream(1);
    let (mut checked, mut worst_theta, mut worst_w) = (0, 0.0f64, 0.0f64);
    while checked < 1000 {
        let family = Family::ALL[rng.gen_range(0..4)];
        let n_neg = rng.gen_range(1..100);
        let n_pos = rng.gen_range(1..300);
        let mu = rng.gen_range(0.5..6.0);
        let noise = GenRecipe::fixed(family, mu, 1, 2.0).unwrap().noise();
        let neg: Vec<f64> = (0..n_neg).map(|_| -mu - noise.draw(&mut rng)).collect();
        let pos: Vec<f64> = (0..n_pos).map(|_| mu + noise.draw(&mut rng)).collect();
        let neg_max = neg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pos_min = pos.iter().copied().fold(f64::INFINITY, f64::min);
        let Ok(oracle) = solve_svm_1d(neg_max, pos_min) else { continue };
        let model = train_hard_svm(&Dataset::from_1d(&neg, &pos).unwrap(), 1e-10).unwrap();
        let w_star = 2.0 / (pos_min - neg_max);
        worst_theta = worst_theta.max((model.theta - oracle.theta).abs());
        worst_w = worst_w.max((model.w[0] - w_star).abs() / w_star);
        checked += 1;
    }
    let elapsed = start.elapsed();
    let pass = worst_theta <= 1e-6 && worst_w <= 1e-6 && elapsed < Duration::from_secs(60);
    let detail = format!("1000 datasets, max |theta - theta*| {worst_theta:.2e}, max rel w error {worst_w:.2e}");
    assert!(verdict(1, "oracle equivalence", pass, &detail, elapsed), "{detail}");
}

#[test]
fn criterion_02_subsample_sweep() {
    let start = Instant::now();
    let config = ExperimentConfig { seed: SEED, ..ExperimentConfig::fig1_preset() };
    assert_eq!((config.n, config.beta, config.trials, config.grid_points), (1000, Ratio::new(1, 20), 500, 12));
    let rows = run_fig1_sweep(&config).unwrap();
    let wce = stat_rows(&rows, "wce");
    let avg = stat_rows(&rows, "avg_err");
    let argmin = (0..wce.len()).min_by(|&a, &b| wce[a].mean.total_cmp(&wce[b].mean)).unwrap();
    let balanced = wce.iter().position(|r| r.n == 50).unwrap();
    let sizes: Vec<f64> = avg.iter().map(|r| r.n as f64).collect();
    let means: Vec<f64> = avg.iter().map(|r| r.mean).collect();
    let rho = spearman(&sizes, &means);
    let elapsed = start.elapsed();
    let pass = argmin.abs_diff(balanced) <= 1 && rho <= -0.8 && elapsed < Duration::from_secs(300);
    let detail = format!(
        "argmin s = {} (grid step {}), Spearman(s, avg err) = {rho:.3}",
        wce[argmin].n,
        argmin.abs_diff(balanced)
    );
    assert!(verdict(2, "subsample sweep", pass, &detail, elapsed), "{detail}");
}

#[test]
fn criterion_03_uniform_distributional_equivalence() {
    let start = Instant::now();
    let r = theorem_report(Family::Uniform, 0.1, 0.1, 0.1, Ratio::new(1, 10), 100_000, 1.0);
    let ks = r.ks_statistic.unwrap();
    let elapsed = start.elapsed();
    let pass = ks <= 0.05 && elapsed < Duration::from_secs(300);
    let detail = format!(
        "KS(theta_erm, theta_sub) = {ks:.4} vs 0.05, mean theta erm/sub = {:.2e}/{:.2e}",
        r.mean_theta_erm, r.mean_theta_sub
    );
    assert!(verdict(3, "uniform KS", pass, &detail, elapsed), "{detail}");
}

#[test]
fn criterion_04_laplace_event() {
    let start = Instant::now();
    let r = theorem_report(Family::Laplace, 0.1, 0.1, 0.1, Ratio::new(1, 100), 1_000_000, 1.0);
    let ratio = r.mean_wce_erm / r.mean_wce_sub;
    let elapsed = start.elapsed();
    let floor_ok = (r.prob_floor - 0.3).abs() < 1e-12;
    let pass = floor_ok && r.passed && ratio >= 3.0 && elapsed < Duration::from_secs(600);
    let detail = format!("{}, wce ratio erm/sub {ratio:.2}", event_detail(&r));
    assert!(verdict(4, "laplace event", pass, &detail, elapsed), "{detail}");
}

#[test]
fn criterion_05_gaussian_event() {
    let start = Instant::now();
    let (n, beta, eps) = (1_000_000u64, 0.05, 0.1);
    assert!(beta >= (n as f64).powf(-0.75) && n as f64 * beta * beta >= eps);
    let r = theorem_report(Family::Gaussian, eps, 0.1, 0.1, Ratio::new(1, 20), n, 1.0);
    let residual = gaussian_schedule_residual(r.mu_n, eps / n as f64).abs();
    let elapsed = start.elapsed();
    let pass = r.passed && residual <= 1e-12 && elapsed < Duration::from_secs(600);
    let detail = format!("{}, mu_n {:.6} residual {residual:.1e}", event_detail(&r), r.mu_n);
    assert!(verdict(5, "gaussian event", pass, &detail, elapsed), "{detail}");
}

#[test]
fn criterion_06_frechet_event() {
    let start = Instant::now();
    let at_half = bounds_frechet(&TheoremBudget::new(0.1, 0.1, 0.5, Ratio::new(1, 100), 1_000_000, 2.0).unwrap());
    let vacuous_at_half = at_half.map(|b| b.vacuous).unwrap_or(true);
    let r = theorem_report(Family::TwoSidedFrechet, 0.1, 0.1, 0.1, Ratio::new(1, 100), 1_000_000, 2.0);
    let elapsed = start.elapsed();
    let floor_ok = (r.prob_floor - 0.1).abs() < 1e-12;
    let pass = vacuous_at_half && floor_ok && r.passed && r.wce_passed && elapsed < Duration::from_secs(600);
    let detail = format!(
        "gamma 0.5 vacuous: {vacuous_at_half}; gamma 0.1: {}, wce brackets on {} of {} event trials",
        event_detail(&r),
        r.wce_bracket_hits,
        r.event_hits
    );
    assert!(verdict(6, "frechet event", pass, &detail, elapsed), "{detail}");
}

#[test]
fn criterion_07_tail_identities() {
    let start = Instant::now();
    let g = LimitLaw::gumbel();
    let mut rng = SeedTree::new(SEED).stream(7);
    let diffs: Vec<f64> = (0..100_000).map(|_| g.sample(&mut rng) - g.sample(&mut rng)).collect();
    let ks = ks_distance(&diffs, |x| 1.0 / (1.0 + (-x).exp()));

    let mut feller_ok = true;
    for k in 0..=990 {
        let t = 0.1 + 0.01 * k as f64;
        let (lo, hi) = gaussian_tail_bounds(t).unwrap();
        let tail = normal_sf(t);
        feller_ok &= lo <= tail && tail <= hi;
    }
    let mut sandwich_ok = true;
    for k in 0..1000 {
        let x = k as f64 / 999.0;
        let (lo, hi) = expx_sandwich(x).unwrap();
        let v = 1.0 - (-x).exp();
        sandwich_ok &= lo <= v && v <= hi;
    }
    let elapsed = start.elapsed();
    let pass = ks <= 0.01 && feller_ok && sandwich_ok;
    let detail = format!("Gumbel difference KS {ks:.4}, Feller bracket {feller_ok}, sandwich {sandwich_ok}");
    assert!(verdict(7, "tail identities", pass, &detail, elapsed), "{detail}");
}

#[test]
fn criterion_08_extreme_value_convergence() {
    let start = Instant::now();
    let n = 100_000usize;
    let specs = [
        DistributionSpec::uniform(0.0, 0.5),
        DistributionSpec::gaussian(0.0, 1.0),
        DistributionSpec::laplace(0.0, 1.0),
        DistributionSpec::frechet(0.0, 2.0),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for (k, spec) in specs.iter().enumerate() {
        let norm = evt_constants(spec, n as u64).unwrap();
        let tree = SeedTree::new(SEED).child(800 + k as u64);
        let z: Vec<f64> = (0..10_000u64)
            .into_par_iter()
            .map(|r| norm.normalize(spec.sample_max(&mut tree.stream(r), n).unwrap(), ConstantSet::Exact))
            .collect();
        let ks = ks_distance(&z, |x| norm.limit_cdf(x));
        pass &= ks <= 0.05;
        parts.push(format!("{} {ks:.4}", spec.family));
    }
    let elapsed = start.elapsed();
    let detail = format!("KS to limit law: {}", parts.join(", "));
    assert!(verdict(8, "FTG convergence", pass, &detail, elapsed), "{detail}");
}

#[test]
fn criterion_09_classifier_grid() {
    let start = Instant::now();
    let config = ExperimentConfig { seed: SEED, ..ExperimentConfig::fig3_preset() };
    assert_eq!((config.trials, config.test_points), (100, 100_000));
    let rows = run_fig3_grid(&config).unwrap();
    let deltas = stat_rows(&rows, "delta");
    assert_eq!(deltas.len(), 3 * 4 * 2 * 2);
    let mut violations = Vec::new();
    let mut not_applicable = Vec::new();
    for r in &deltas {
        let cell = format!("{}/{}/d={}/mu={}", r.classifier, r.family, r.dim, r.mu);
        if r.trials < 2 {
            not_applicable.push(format!("{cell} ({} ok)", r.trials));
        } else if r.mean < -2.0 * r.stderr() {
            violations.push(format!("{cell}: {:.4} < -2*{:.4}", r.mean, r.stderr()));
        }
    }
    let key = deltas
        .iter()
        .find(|r| r.classifier == "soft-svm" && r.family == "gaussian" && r.dim == 1 && r.mu == 1.0)
        .unwrap();
    let key_ok = key.trials >= 2 && key.mean > 3.0 * key.stderr();
    let elapsed = start.elapsed();
    let pass = violations.is_empty() && key_ok && elapsed < Duration::from_secs(1800);
    let detail = format!(
        "{} cells checked, violations [{}], N/A (fewer than 2 successful trials) [{}], soft/gaussian/d=1/mu=1 delta {:.4} = {:.1} stderr",
        deltas.len() - not_applicable.len(),
        violations.join("; "),
        not_applicable.join("; "),
        key.mean,
        key.mean / key.stderr()
    );
    assert!(verdict(9, "classifier grid", pass, &detail, elapsed), "{detail}");
}

#[test]
fn criterion_10_cosine_study() {
    let start = Instant::now();
    let config = ExperimentConfig { seed: SEED, ..ExperimentConfig::fig4_preset() };
    let rows = run_cosine_study(&config).unwrap();
    let cos = stat_rows(&rows, "cos_phi");
    let ns: Vec<f64> = cos.iter().map(|r| r.n as f64).collect();
    let means: Vec<f64> = cos.iter().map(|r| r.mean).collect();
    let rho = spearman(&ns, &means);
    let last = cos.last().unwrap();
    let elapsed = start.elapsed();
    let pass = last.n == 10_000 && last.mean >= 0.97 && rho >= 0.8;
    let curve: Vec<String> = cos.iter().map(|r| format!("{}:{:.4}", r.n, r.mean)).collect();
    let detail = format!("mean cos phi by n [{}], Spearman {rho:.3}", curve.join(" "));
    assert!(verdict(10, "cosine study", pass, &detail, elapsed), "{detail}");
}

fn duplication_drift(dim: usize, seed: u64) -> Option<f64> {
    let recipe = GenRecipe::fixed(Family::Gaussian, 4.0, dim, 1.0).unwrap();
    let mut rng = SeedTree::new(seed).stream(0);
    let data = generate(&recipe, 80, Ratio::new(1, 4), &mut rng).unwrap();
    let base = train_hard_svm(&data, 1e-10).ok()?;
    let mut rows: Vec<Vec<f64>> = data.rows().map(|(x, _)| x.to_vec()).collect();
    let mut ys = data.labels().to_vec();
    for _ in 0..10 {
        let k = rng.gen_range(0..data.len());
        for _ in 0..rng.gen_range(1..5) {
            rows.push(rows[k].clone());
            ys.push(ys[k]);
        }
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.shuffle(&mut rng);
    let rows: Vec<Vec<f64>> = order.iter().map(|&i| rows[i].clone()).collect();
    let ys: Vec<i8> = order.iter().map(|&i| ys[i]).collect();
    let m = train_hard_svm(&Dataset::from_rows(&rows, ys).unwrap(), 1e-10).unwrap();
    Some(m.w.iter().zip(&base.w).map(|(a, b)| (a - b).abs()).fold((m.b - base.b).abs(), f64::max))
}

#[test]
fn criterion_11_invariance_suite() {
    let start = Instant::now();
    let mut drift = 0.0f64;
    let mut fits = 0;
    for dim in [1, 2, 5, 10] {
        for seed in 0..25 {
            if let Some(d) = duplication_drift(dim, 1100 + seed) {
                drift = drift.max(d);
                fits += 1;
            }
        }
    }

    let (mut sym, mut mono_ok) = (0.0f64, true);
    for family in Family::ALL {
        let r = GenRecipe::fixed(family, 1.5, 1, 2.0).unwrap();
        let wce = |t: f64| wce_analytic(&r, &LinearModel::threshold(t)).unwrap();
        for i in 0..100 {
            let near = -3.0 + 0.06 * i as f64;
            let far = near.signum() * (near.abs() + 0.05 + 0.02 * (i % 7) as f64);
            sym = sym.max((wce(near) - wce(-near)).abs());
            mono_ok &= wce(far) >= wce(near);
        }
    }

    let m = 1_000_000;
    let tree = SeedTree::new(SEED).child(11);
    let mut rng = tree.stream(0);
    let mut worst_z = 0.0f64;
    for i in 0..20u64 {
        let family = Family::ALL[(i % 4) as usize];
        let r = GenRecipe::fixed(family, rng.gen_range(0.5..2.0), 1, 2.0).unwrap();
        let model = LinearModel::threshold(rng.gen_range(-1.0..1.0));
        let p = wce_analytic(&r, &model).unwrap();
        let e = wce_empirical(&r, &model, m, &mut tree.stream(1 + i)).unwrap();
        worst_z = worst_z.max((p - e).abs() / (p * (1.0 - p) / m as f64).sqrt());
    }

    let elapsed = start.elapsed();
    let pass = fits >= 90 && drift <= 1e-9 && sym <= 1e-12 && mono_ok && worst_z <= 3.0;
    let detail = format!(
        "duplication drift {drift:.1e} over {fits} fits, wce symmetry {sym:.1e}, monotone {mono_ok}, analytic-empirical max |z| {worst_z:.2}"
    );
    assert!(verdict(11, "invariance suite", pass, &detail, elapsed), "{detail}");
}
