//! Experiment campaigns: the subsample-size sweep, the classifier × family ×
//! dimension × center grid, the cosine study and theorem-validation sweeps.
//!
//! Every trial owns a stream keyed by its cell and trial index, results are
//! collected in trial order and reduced sequentially, so output does not
//! depend on the number of worker threads.

use std::io::Write;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{
    average_error_analytic, class_errors_empirical, csv_err, generate, minority_count, parse_beta,
    subsample_majority, subsample_majority_to, wce_analytic, Dataset, GenRecipe,
};
use crate::distributions::Family;
use crate::error::{invalid, Error, Result};
use crate::evt_limits::{validate_theorem, TheoremBudget, ValidationReport, ValidationSettings};
use crate::rng::SeedTree;
use crate::stats::{mean, std_dev};
use crate::svm::{
    default_logistic_step, offset_for_direction, solve_svm_1d, train_hard_svm_with,
    train_logistic, train_soft_svm_with, LinearModel, SolverOptions, HARD_MARGIN_C,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Fig1Sweep,
    Fig3Grid,
    CosineStudy,
    TheoremCampaign,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Fig1Sweep => "fig1-sweep",
            ExperimentKind::Fig3Grid => "fig3-grid",
            ExperimentKind::CosineStudy => "cosine-study",
            ExperimentKind::TheoremCampaign => "theorem-campaign",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classifier {
    HardSvm,
    SoftSvm,
    Logistic,
}

impl Classifier {
    pub fn name(&self) -> &'static str {
        match self {
            Classifier::HardSvm => "hard-svm",
            Classifier::SoftSvm => "soft-svm",
            Classifier::Logistic => "logistic",
        }
    }
}

mod beta_string {
    use num_rational::Ratio;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&b.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let s = String::deserialize(d)?;
        crate::datagen::parse_beta(&s).map_err(serde::de::Error::custom)
    }
}

/// One theorem instance in a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetEntry {
    pub family: Family,
    pub epsilon: f64,
    pub delta: f64,
    pub gamma: f64,
    #[serde(with = "beta_string")]
    pub beta: Ratio<u64>,
    pub n: u64,
    #[serde(default = "one")]
    pub alpha: f64,
}

fn one() -> f64 {
    1.0
}

/// Full description of a campaign; every field has a default so partial JSON
/// files are accepted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub families: Vec<Family>,
    pub classifiers: Vec<Classifier>,
    pub dims: Vec<usize>,
    /// Fixed class centers (grid experiments).
    pub mus: Vec<f64>,
    /// Majority size; in the cosine study the largest point of `n_grid`.
    pub n: usize,
    #[serde(with = "beta_string")]
    pub beta: Ratio<u64>,
    pub trials: u64,
    /// Fresh test points per class for empirical errors.
    pub test_points: usize,
    pub seed: u64,
    /// Separability budget for scheduled centers.
    pub epsilon: f64,
    /// Fréchet tail index.
    pub alpha: f64,
    /// Number of subsample sizes in the sweep.
    pub grid_points: usize,
    /// Majority sizes for the cosine study.
    pub n_grid: Vec<usize>,
    pub soft_c: f64,
    pub logistic_steps: u64,
    /// Defaults to `4 / mean |(x, 1)|^2` per training set.
    pub logistic_step: Option<f64>,
    /// Retry non-separable hard-margin cells with a `c = 1e8` soft margin.
    pub hard_fallback_soft: bool,
    pub solver: SolverOptions,
    pub budgets: Vec<BudgetEntry>,
    pub ks_threshold: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::Fig1Sweep,
            families: vec![Family::Gaussian],
            classifiers: vec![Classifier::HardSvm],
            dims: vec![1],
            mus: vec![1.0, 3.0],
            n: 1000,
            beta: Ratio::new(1, 20),
            trials: 500,
            test_points: 1_000_000,
            seed: 0,
            epsilon: 0.1,
            alpha: 2.0,
            grid_points: 12,
            n_grid: vec![100, 320, 1000, 3160, 10_000],
            soft_c: 1.0,
            logistic_steps: 2000,
            logistic_step: None,
            hard_fallback_soft: false,
            solver: SolverOptions::default(),
            budgets: Vec::new(),
            ks_threshold: 0.05,
        }
    }
}

impl ExperimentConfig {
    /// Subsample sweep: Gaussian, n = 1000, beta = 0.05, 500 trials, 12 sizes.
    pub fn fig1_preset() -> Self {
        Self { kind: ExperimentKind::Fig1Sweep, ..Self::default() }
    }

    /// Classifier grid with 100 trials per cell and 1e5 test points per class.
    pub fn fig3_preset() -> Self {
        Self {
            kind: ExperimentKind::Fig3Grid,
            families: Family::ALL.to_vec(),
            classifiers: vec![Classifier::HardSvm, Classifier::SoftSvm, Classifier::Logistic],
            dims: vec![1, 10],
            mus: vec![1.0, 3.0],
            trials: 100,
            test_points: 100_000,
            ..Self::default()
        }
    }

    /// Cosine study: d = 10 Gaussian, beta = 0.1, 100 trials, n up to 1e4.
    pub fn fig4_preset() -> Self {
        Self {
            kind: ExperimentKind::CosineStudy,
            dims: vec![10],
            beta: Ratio::new(1, 10),
            trials: 100,
            n: 10_000,
            ..Self::default()
        }
    }

    /// The three scheduled-center theorems at their acceptance settings.
    pub fn theorem_preset() -> Self {
        let entry = |family, beta: (u64, u64), gamma| BudgetEntry {
            family,
            epsilon: 0.1,
            delta: 0.1,
            gamma,
            beta: Ratio::new(beta.0, beta.1),
            n: 1_000_000,
            alpha: 2.0,
        };
        Self {
            kind: ExperimentKind::TheoremCampaign,
            trials: 2000,
            budgets: vec![
                entry(Family::Laplace, (1, 100), 0.1),
                entry(Family::Gaussian, (1, 20), 0.1),
                entry(Family::TwoSidedFrechet, (1, 100), 0.1),
            ],
            ..Self::default()
        }
    }

    pub fn beta_f64(&self) -> f64 {
        *self.beta.numer() as f64 / *self.beta.denom() as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        let nonempty = |ok: bool, what: &str| if ok { Ok(()) } else { Err(invalid(format!("{what} must not be empty"))) };
        match self.kind {
            ExperimentKind::Fig1Sweep => {
                nonempty(!self.families.is_empty(), "families")?;
                minority_count(self.n, self.beta)?;
                if self.grid_points < 2 {
                    return Err(invalid("the sweep needs at least two grid points"));
                }
            }
            ExperimentKind::Fig3Grid => {
                nonempty(!self.families.is_empty(), "families")?;
                nonempty(!self.classifiers.is_empty(), "classifiers")?;
                nonempty(!self.dims.is_empty(), "dims")?;
                nonempty(!self.mus.is_empty(), "mus")?;
                minority_count(self.n, self.beta)?;
                if self.dims.contains(&0) {
                    return Err(invalid("dimensions must be positive"));
                }
                if self.test_points == 0 {
                    return Err(invalid("test_points must be positive"));
                }
            }
            ExperimentKind::CosineStudy => {
                nonempty(!self.n_grid.is_empty(), "n_grid")?;
                if self.dims.first().copied().unwrap_or(0) < 2 {
                    return Err(invalid("the cosine study needs d > 1"));
                }
                for &n in &self.n_grid {
                    minority_count(n, self.beta)?;
                }
            }
            ExperimentKind::TheoremCampaign => nonempty(!self.budgets.is_empty(), "budgets")?,
        }
        Ok(())
    }
}

/// One line of a results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub kind: String,
    pub family: String,
    pub classifier: String,
    pub dim: usize,
    pub mu: f64,
    pub n: usize,
    pub beta: f64,
    pub stat: String,
    pub mean: f64,
    pub std: f64,
    /// Successful trials the statistics are computed over.
    pub trials: u64,
    pub failures: u64,
}

pub const RESULT_HEADER: [&str; 12] = [
    "kind", "family", "classifier", "dim", "mu", "n", "beta", "stat", "mean", "std", "trials", "failures",
];

impl ResultRow {
    /// Standard error of `mean`.
    pub fn stderr(&self) -> f64 {
        self.std / (self.trials as f64).sqrt()
    }
}

/// Coordinates shared by the rows of one cell.
#[derive(Clone)]
struct Cell {
    kind: ExperimentKind,
    family: Family,
    classifier: &'static str,
    dim: usize,
    mu: f64,
    n: usize,
    beta: f64,
}

impl Cell {
    fn row(&self, stat: &str, values: &[f64], failures: u64) -> ResultRow {
        ResultRow {
            kind: self.kind.name().into(),
            family: self.family.name().into(),
            classifier: self.classifier.into(),
            dim: self.dim,
            mu: self.mu,
            n: self.n,
            beta: self.beta,
            stat: stat.into(),
            mean: mean(values),
            std: std_dev(values),
            trials: values.len() as u64,
            failures,
        }
    }
}

pub fn write_rows_csv<W: Write>(rows: &[ResultRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RESULT_HEADER).map_err(csv_err)?;
    for r in rows {
        out.write_record([
            r.kind.clone(),
            r.family.clone(),
            r.classifier.clone(),
            r.dim.to_string(),
            r.mu.to_string(),
            r.n.to_string(),
            r.beta.to_string(),
            r.stat.clone(),
            r.mean.to_string(),
            r.std.to_string(),
            r.trials.to_string(),
            r.failures.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_rows_csv<R: std::io::Read>(r: R) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(RESULT_HEADER.iter().copied()) {
        return Err(Error::Parse(format!(
            "expected header {}",
            RESULT_HEADER.join(",")
        )));
    }
    rdr.deserialize().map(|r| r.map_err(csv_err)).collect()
}

/// Log-spaced integers from `lo` to `hi` inclusive, deduplicated.
pub fn log_grid(lo: usize, hi: usize, points: usize) -> Vec<usize> {
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut g: Vec<usize> = (0..points)
        .map(|k| {
            let t = k as f64 / (points - 1) as f64;
            ((a + t * (b - a)).exp().round() as usize).clamp(lo, hi)
        })
        .collect();
    g.dedup();
    g
}

/// Subsample-size sweep.
///
/// Each trial draws one dataset with the scheduled center for `n`; for every
/// retained majority size `s` on the grid an independent subsample is fitted
/// with the closed-form 1-D SVM. Rows carry `s` in the `n` column and report
/// the analytic worst-class error (`wce`) and the prior-weighted average
/// error (`avg_err`).
pub fn run_fig1_sweep(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let family = config.families[0];
    let recipe = GenRecipe::scheduled(family, config.n as u64, config.epsilon, 1, config.alpha)?;
    let m = minority_count(config.n, config.beta)?;
    let grid = log_grid(m.max(1), config.n, config.grid_points);
    let beta = config.beta_f64();
    let tree = SeedTree::new(config.seed);

    let per_trial: Vec<Vec<Option<(f64, f64)>>> = (0..config.trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<Option<(f64, f64)>>> {
            let mut rng = tree.stream(t);
            let data = generate(&recipe, config.n, config.beta, &mut rng)?;
            grid.iter()
                .map(|&s| {
                    let sub = subsample_majority_to(&data, s, &mut rng)?;
                    let (neg, pos) = sub.split_1d();
                    let neg_max = neg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let pos_min = pos.iter().copied().fold(f64::INFINITY, f64::min);
                    match solve_svm_1d(neg_max, pos_min) {
                        Ok(model) => Ok(Some((
                            wce_analytic(&recipe, &model)?,
                            average_error_analytic(&recipe, &model, beta)?,
                        ))),
                        Err(Error::NotSeparable) => Ok(None),
                        Err(e) => Err(e),
                    }
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (k, &s) in grid.iter().enumerate() {
        let ok: Vec<(f64, f64)> = per_trial.iter().filter_map(|t| t[k]).collect();
        let failures = config.trials - ok.len() as u64;
        let cell = Cell {
            kind: config.kind,
            family,
            classifier: Classifier::HardSvm.name(),
            dim: 1,
            mu: recipe.mu_n,
            n: s,
            beta,
        };
        let wce: Vec<f64> = ok.iter().map(|p| p.0).collect();
        let avg: Vec<f64> = ok.iter().map(|p| p.1).collect();
        rows.push(cell.row("wce", &wce, failures));
        rows.push(cell.row("avg_err", &avg, failures));
    }
    Ok(rows)
}

fn fit(config: &ExperimentConfig, classifier: Classifier, data: &Dataset) -> Result<LinearModel> {
    match classifier {
        Classifier::HardSvm => match train_hard_svm_with(data, &config.solver) {
            Err(Error::NotSeparable) if config.hard_fallback_soft => {
                train_soft_svm_with(data, HARD_MARGIN_C, &config.solver)
            }
            other => other,
        },
        Classifier::SoftSvm => train_soft_svm_with(data, config.soft_c, &config.solver),
        Classifier::Logistic => {
            let step = config.logistic_step.unwrap_or_else(|| default_logistic_step(data));
            train_logistic(data, config.logistic_steps, step)
        }
    }
}

/// Whether a per-trial fitting error is recorded as a failure rather than
/// aborting the campaign.
fn is_trial_failure(e: &Error) -> bool {
    matches!(e, Error::NotSeparable | Error::IterationLimit { .. } | Error::NonFinite(_))
}

/// Classifier × family × dimension × center grid of
/// `delta = wce(erm) - wce(sub)`.
///
/// ERM and SUB are fitted on the same dataset (SUB on its majority
/// subsample) and scored on one shared test set of `test_points` per class.
/// Rows come in config order: classifier, family, dimension, center.
pub fn run_fig3_grid(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let root = SeedTree::new(config.seed);
    let beta = config.beta_f64();
    let mut rows = Vec::new();
    let mut cell_index = 0u64;
    for &classifier in &config.classifiers {
        for &family in &config.families {
            for &dim in &config.dims {
                for &mu in &config.mus {
                    let recipe = GenRecipe::fixed(family, mu, dim, config.alpha)?;
                    let tree = root.child(cell_index);
                    cell_index += 1;
                    let results: Vec<Option<(f64, f64)>> = (0..config.trials)
                        .into_par_iter()
                        .map(|t| -> Result<Option<(f64, f64)>> {
                            let mut rng = tree.stream(t);
                            let data = generate(&recipe, config.n, config.beta, &mut rng)?;
                            let sub = subsample_majority(&data, &mut rng)?;
                            let models = match fit(config, classifier, &data)
                                .and_then(|erm| Ok((erm, fit(config, classifier, &sub)?)))
                            {
                                Ok(pair) => pair,
                                Err(e) if is_trial_failure(&e) => return Ok(None),
                                Err(e) => return Err(e),
                            };
                            let errs = class_errors_empirical(
                                &recipe,
                                &[&models.0, &models.1],
                                config.test_points,
                                &mut rng,
                            )?;
                            Ok(Some((errs[0].0.max(errs[0].1), errs[1].0.max(errs[1].1))))
                        })
                        .collect::<Result<_>>()?;
                    let ok: Vec<(f64, f64)> = results.into_iter().flatten().collect();
                    let failures = config.trials - ok.len() as u64;
                    let cell = Cell {
                        kind: config.kind,
                        family,
                        classifier: classifier.name(),
                        dim,
                        mu,
                        n: config.n,
                        beta,
                    };
                    let erm: Vec<f64> = ok.iter().map(|p| p.0).collect();
                    let sub: Vec<f64> = ok.iter().map(|p| p.1).collect();
                    let delta: Vec<f64> = ok.iter().map(|p| p.0 - p.1).collect();
                    rows.push(cell.row("wce_erm", &erm, failures));
                    rows.push(cell.row("wce_sub", &sub, failures));
                    rows.push(cell.row("delta", &delta, failures));
                }
            }
        }
    }
    Ok(rows)
}

/// `cos` of the angle between `w` and the first basis vector.
pub fn cos_to_first_axis(w: &[f64]) -> f64 {
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    w[0] / norm
}

/// Cosine study for the multivariate reduction.
///
/// For each `n` on the grid (center from the Gaussian schedule), fits the
/// hard-margin SVM on the full data and records `cos_phi` between the learned
/// direction and the true mean direction, and `r_b = |b(w_hat) - b(mu_hat)|`
/// with both offsets from [`offset_for_direction`]. `r_b` skips trials whose
/// data are not separable along `mu_hat`.
pub fn run_cosine_study(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let dim = config.dims[0];
    let family = Family::Gaussian;
    let root = SeedTree::new(config.seed);
    let beta = config.beta_f64();
    let mut rows = Vec::new();
    for (k, &n) in config.n_grid.iter().enumerate() {
        let recipe = GenRecipe::scheduled(family, n as u64, config.epsilon, dim, config.alpha)?;
        let tree = root.child(k as u64);
        let results: Vec<Option<(f64, Option<f64>)>> = (0..config.trials)
            .into_par_iter()
            .map(|t| -> Result<Option<(f64, Option<f64>)>> {
                let mut rng = tree.stream(t);
                let data = generate(&recipe, n, config.beta, &mut rng)?;
                let model = match train_hard_svm_with(&data, &config.solver) {
                    Ok(m) => m,
                    Err(e) if is_trial_failure(&e) => return Ok(None),
                    Err(e) => return Err(e),
                };
                let norm = model.norm();
                let w_hat: Vec<f64> = model.w.iter().map(|v| v / norm).collect();
                let mut e1 = vec![0.0; dim];
                e1[0] = 1.0;
                let b_w = offset_for_direction(&data, &w_hat)?;
                let r_b = offset_for_direction(&data, &e1).ok().map(|b_mu| (b_w - b_mu).abs());
                Ok(Some((cos_to_first_axis(&model.w), r_b)))
            })
            .collect::<Result<_>>()?;
        let ok: Vec<(f64, Option<f64>)> = results.into_iter().flatten().collect();
        let failures = config.trials - ok.len() as u64;
        let cell = Cell {
            kind: config.kind,
            family,
            classifier: Classifier::HardSvm.name(),
            dim,
            mu: recipe.mu_n,
            n,
            beta,
        };
        let cos: Vec<f64> = ok.iter().map(|p| p.0).collect();
        let rb: Vec<f64> = ok.iter().filter_map(|p| p.1).collect();
        rows.push(cell.row("cos_phi", &cos, failures));
        rows.push(cell.row("r_b", &rb, config.trials - rb.len() as u64));
    }
    Ok(rows)
}

/// One campaign entry: a report, or the error that rejected the budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignEntry {
    pub budget: BudgetEntry,
    pub report: Option<ValidationReport>,
    pub error: Option<String>,
}

impl CampaignEntry {
    pub fn passed(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.passed)
    }
}

/// Validate every budget; a rejected budget becomes an error entry and the
/// campaign continues. Entry `k` uses the seed subtree `k`.
pub fn run_theorem_campaign(config: &ExperimentConfig) -> Result<Vec<CampaignEntry>> {
    config.validate()?;
    let root = SeedTree::new(config.seed);
    Ok(config
        .budgets
        .iter()
        .enumerate()
        .map(|(k, entry)| {
            let result = TheoremBudget::new(
                entry.epsilon,
                entry.delta,
                entry.gamma,
                entry.beta,
                entry.n,
                entry.alpha,
            )
            .and_then(|budget| {
                let settings = ValidationSettings {
                    trials: config.trials,
                    seed: root.child(k as u64).seed(),
                    confidence: 0.99,
                    ks_threshold: config.ks_threshold,
                };
                validate_theorem(entry.family, &budget, &settings)
            });
            match result {
                Ok(report) => CampaignEntry { budget: entry.clone(), report: Some(report), error: None },
                Err(e) => CampaignEntry { budget: entry.clone(), report: None, error: Some(e.to_string()) },
            }
        })
        .collect())
}

/// Campaign results as result rows (`event_freq`, `wce_erm`, `wce_sub`).
pub fn campaign_rows(entries: &[CampaignEntry]) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for e in entries {
        let base = ResultRow {
            kind: ExperimentKind::TheoremCampaign.name().into(),
            family: e.budget.family.name().into(),
            classifier: Classifier::HardSvm.name().into(),
            dim: 1,
            mu: f64::NAN,
            n: e.budget.n as usize,
            beta: *e.budget.beta.numer() as f64 / *e.budget.beta.denom() as f64,
            stat: String::new(),
            mean: f64::NAN,
            std: f64::NAN,
            trials: 0,
            failures: 0,
        };
        match &e.report {
            None => rows.push(ResultRow { stat: "error".into(), ..base }),
            Some(r) => {
                let ok = r.trials - r.non_separable_count;
                let with = |stat: &str, m: f64| ResultRow {
                    stat: stat.into(),
                    mean: m,
                    mu: r.mu_n,
                    trials: ok,
                    failures: r.non_separable_count,
                    ..base.clone()
                };
                rows.push(with("event_freq", r.empirical_freq));
                rows.push(with("wce_erm", r.mean_wce_erm));
                rows.push(with("wce_sub", r.mean_wce_sub));
            }
        }
    }
    rows
}

/// Output of [`run`].
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Rows(Vec<ResultRow>),
    Campaign(Vec<CampaignEntry>),
}

impl Outcome {
    pub fn rows(&self) -> Vec<ResultRow> {
        match self {
            Outcome::Rows(r) => r.clone(),
            Outcome::Campaign(c) => campaign_rows(c),
        }
    }

    /// False only for a campaign with a failed or rejected entry.
    pub fn passed(&self) -> bool {
        match self {
            Outcome::Rows(_) => true,
            Outcome::Campaign(c) => c.iter().all(CampaignEntry::passed),
        }
    }
}

pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    Ok(match config.kind {
        ExperimentKind::Fig1Sweep => Outcome::Rows(run_fig1_sweep(config)?),
        ExperimentKind::Fig3Grid => Outcome::Rows(run_fig3_grid(config)?),
        ExperimentKind::CosineStudy => Outcome::Rows(run_cosine_study(config)?),
        ExperimentKind::TheoremCampaign => Outcome::Campaign(run_theorem_campaign(config)?),
    })
}

/// `parse_beta` re-exported for config front ends.
pub fn beta_from_str(s: &str) -> Result<Ratio<u64>> {
    parse_beta(s)
}
