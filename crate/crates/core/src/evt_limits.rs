//! Large-`n` behaviour of the two 1-D max-margin thresholds
//!
//! ```text
//! theta_erm = (max negatives + min positives) / 2        on all data
//! theta_sub = same, after dropping positives to the minority size
//! ```
//!
//! their limit laws, the finite-`n` bound calculators for the Laplace,
//! Gaussian and Fréchet families, and Monte Carlo validators for the
//! high-probability events those bounds describe.
//!
//! With `M_k ~ b_k + a_k Z` for the maximum of `k` centered draws, the limits
//! are `theta_sub -> a_{bn} (Z_1 - Z_2) / 2` and
//! `theta_erm -> (b_{bn} - b_n + a_{bn} Z_3 - a_n Z_4) / 2`, with independent
//! `Z_i` from the limit law.

use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{draw_extremes_1d, minority_count, GenRecipe};
use crate::distributions::{ConstantSet, EvtNormalization, Family};
use crate::error::{invalid, Error, Result};
use crate::rng::SeedTree;
use crate::special::normal_pdf;
use crate::stats::{ks_two_sample, mean, wilson_interval};

/// One draw of the limit of `theta_sub`; `norm_bn` are the constants at the
/// minority size.
pub fn limit_theta_sub<R: Rng + ?Sized>(
    norm_bn: &EvtNormalization,
    set: ConstantSet,
    rng: &mut R,
) -> f64 {
    let (a, _) = norm_bn.constants(set);
    let law = norm_bn.limit_law();
    0.5 * a * (law.sample(rng) - law.sample(rng))
}

/// One draw of the limit of `theta_erm`.
pub fn limit_theta_erm<R: Rng + ?Sized>(
    norm_n: &EvtNormalization,
    norm_bn: &EvtNormalization,
    set: ConstantSet,
    rng: &mut R,
) -> f64 {
    let (a_n, b_n) = norm_n.constants(set);
    let (a_bn, b_bn) = norm_bn.constants(set);
    let z3 = norm_bn.limit_law().sample(rng);
    let z4 = norm_n.limit_law().sample(rng);
    0.5 * (b_bn - b_n + a_bn * z3 - a_n * z4)
}

/// Constants parametrizing one theorem instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremBudget {
    pub epsilon: f64,
    pub delta: f64,
    pub gamma: f64,
    pub beta: Ratio<u64>,
    pub n: u64,
    pub alpha: f64,
}

impl TheoremBudget {
    /// Range and integrality checks only; whether the probability floor is
    /// positive is a property of the family (see [`prob_floor`]).
    pub fn new(epsilon: f64, delta: f64, gamma: f64, beta: Ratio<u64>, n: u64, alpha: f64) -> Result<Self> {
        for (name, v) in [("epsilon", epsilon), ("delta", delta), ("gamma", gamma)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Budget(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if *beta.numer() == 0 || beta >= Ratio::from_integer(1) {
            return Err(Error::Budget(format!("beta must lie in (0, 1), got {beta}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Budget(format!("alpha must be positive, got {alpha}")));
        }
        let m = minority_count(n as usize, beta).map_err(|e| Error::Budget(e.to_string()))?;
        if m < 2 {
            return Err(Error::Budget(format!("minority count beta * n = {m} must be at least 2")));
        }
        Ok(Self { epsilon, delta, gamma, beta, n, alpha })
    }

    pub fn beta_f64(&self) -> f64 {
        *self.beta.numer() as f64 / *self.beta.denom() as f64
    }

    pub fn minority(&self) -> u64 {
        (self.beta * Ratio::from_integer(self.n)).to_integer()
    }
}

/// Guaranteed event probability: `1 - 2e - 2d - 3g`, or `1 - 2(e + d) - 5g`
/// for the Fréchet family.
pub fn prob_floor(family: Family, budget: &TheoremBudget) -> f64 {
    let TheoremBudget { epsilon: e, delta: d, gamma: g, .. } = *budget;
    match family {
        Family::TwoSidedFrechet => 1.0 - 2.0 * (e + d) - 5.0 * g,
        _ => 1.0 - 2.0 * e - 2.0 * d - 3.0 * g,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    pub erm_theta_lower: f64,
    pub sub_theta_upper: f64,
    pub erm_wce_lower: f64,
    pub sub_wce_upper: f64,
    pub prob_floor: f64,
    /// The printed lower bound on `|theta_erm|` was negative and is clamped to 0.
    pub erm_degenerate: bool,
    /// `prob_floor <= 0`: the statement carries no information.
    pub vacuous: bool,
}

impl BoundSet {
    fn new(family: Family, budget: &TheoremBudget, erm: f64, sub: f64, erm_wce: f64, sub_wce: f64) -> Self {
        let floor = prob_floor(family, budget);
        Self {
            erm_theta_lower: erm.max(0.0),
            sub_theta_upper: sub,
            erm_wce_lower: erm_wce,
            sub_wce_upper: sub_wce,
            prob_floor: floor,
            erm_degenerate: erm < 0.0,
            vacuous: floor <= 0.0,
        }
    }
}

/// Laplace bounds:
/// `|theta_erm| >= (log 1/b - log 1/g) / 2`, `|theta_sub| <= log(1/g) / 2`,
/// `wce_erm >= e sqrt(g) / (2 n sqrt(b))`, `wce_sub <= e / (n sqrt(g))`.
pub fn bounds_laplace(budget: &TheoremBudget) -> Result<BoundSet> {
    let TheoremBudget { epsilon: e, gamma: g, n, .. } = *budget;
    let (b, n) = (budget.beta_f64(), n as f64);
    Ok(BoundSet::new(
        Family::Laplace,
        budget,
        0.5 * ((1.0 / b).ln() - (1.0 / g).ln()),
        0.5 * (1.0 / g).ln(),
        e * g.sqrt() / (2.0 * n * b.sqrt()),
        e / (n * g.sqrt()),
    ))
}

/// Gaussian bounds, valid for `b >= n^(-3/4)` and `n b^2 >= e`:
/// `|theta_erm| >= (2/3 log 1/b - 2 log 1/g) / (2 sqrt(2 log bn))`,
/// `|theta_sub| <= log(1/g) / (2 sqrt(2 log bn))`,
/// `wce_sub <= 2e / (g n)`, `wce_erm >= e g^(1/4) / (2 n b^(1/12))`.
pub fn bounds_gaussian(budget: &TheoremBudget) -> Result<BoundSet> {
    let TheoremBudget { epsilon: e, gamma: g, n, .. } = *budget;
    let (b, n) = (budget.beta_f64(), n as f64);
    if b < n.powf(-0.75) {
        return Err(Error::Budget(format!("beta = {b} is below n^(-3/4) = {}", n.powf(-0.75))));
    }
    if n * b * b < e {
        return Err(Error::Budget(format!("n beta^2 = {} is below epsilon = {e}", n * b * b)));
    }
    let r = 2.0 * (2.0 * (b * n).ln()).sqrt();
    Ok(BoundSet::new(
        Family::Gaussian,
        budget,
        (2.0 / 3.0 * (1.0 / b).ln() - 2.0 * (1.0 / g).ln()) / r,
        (1.0 / g).ln() / r,
        e * g.powf(0.25) / (2.0 * n * b.powf(1.0 / 12.0)),
        2.0 * e / (g * n),
    ))
}

/// Fréchet bounds (tail index `alpha`):
/// `|theta_erm| >= ((n / log 1/g)^(1/a) - (n b / g)^(1/a)) / 2`,
/// `|theta_sub| <= (n b / g)^(1/a) / 2`, and
///
/// ```text
/// wce_sub <= (e/n) / (1 - (2 e b / g)^(1/a) / 2)^a
/// wce_erm >= (e/n) (1 - 1/e) / (1 - (2e / log 1/g)^(1/a) / 2 + (2 e b / g)^(1/a) / 2)^a
/// ```
///
/// Powers are taken in log space so small `alpha` does not overflow early.
pub fn bounds_frechet(budget: &TheoremBudget) -> Result<BoundSet> {
    let TheoremBudget { epsilon: e, gamma: g, n, alpha: a, .. } = *budget;
    let (b, n) = (budget.beta_f64(), n as f64);
    let root = |x: f64| (x.ln() / a).exp();
    let log_far = (n / (1.0 / g).ln()).ln() / a;
    let log_near = (n * b / g).ln() / a;
    // (e^A - e^B) / 2 = e^A (1 - e^(B - A)) / 2
    let erm = if log_far > log_near {
        0.5 * (log_far + (-(log_near - log_far).exp_m1()).ln()).exp()
    } else {
        -0.5 * (log_near + (-(log_far - log_near).exp_m1()).ln()).exp()
    };
    let sub = 0.5 * log_near.exp();
    let sub_base = 1.0 - 0.5 * root(2.0 * e * b / g);
    let erm_base = 1.0 - 0.5 * root(2.0 * e / (1.0 / g).ln()) + 0.5 * root(2.0 * e * b / g);
    if !(sub_base > 0.0 && erm_base > 0.0) {
        return Err(Error::Budget(format!(
            "wce bound denominators are not positive ({sub_base}, {erm_base})"
        )));
    }
    let sub_wce = (e / n) * (-a * sub_base.ln()).exp();
    let erm_wce = (e / n) * (1.0 - (-1.0f64).exp()) * (-a * erm_base.ln()).exp();
    Ok(BoundSet::new(Family::TwoSidedFrechet, budget, erm, sub, erm_wce, sub_wce))
}

pub fn bounds_for(family: Family, budget: &TheoremBudget) -> Result<BoundSet> {
    match family {
        Family::Laplace => bounds_laplace(budget),
        Family::Gaussian => bounds_gaussian(budget),
        Family::TwoSidedFrechet => bounds_frechet(budget),
        Family::Uniform => Err(Error::Unsupported(
            "the uniform statement is distributional; use the KS mode".into(),
        )),
    }
}

/// `P(|Z_3 - Z_4| <= tau)` for independent standard Gumbels: `1 - 2/(1 + e^tau)`.
pub fn logistic_diff_cdf(tau: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(invalid(format!("tau must be nonnegative, got {tau}")));
    }
    Ok(1.0 - 2.0 / (1.0 + tau.exp()))
}

/// Feller bounds on the standard normal tail:
/// `phi(t) (1/t - 1/t^3) <= P(X >= t) <= phi(t) / t`.
pub fn gaussian_tail_bounds(t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(invalid(format!("t must be positive, got {t}")));
    }
    let p = normal_pdf(t);
    Ok((p * (1.0 / t - 1.0 / (t * t * t)), p / t))
}

/// `x (1 - 1/e) <= 1 - e^(-x) <= x` on `[0, 1]`.
pub fn expx_sandwich(x: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&x) {
        return Err(invalid(format!("x must lie in [0, 1], got {x}")));
    }
    Ok((x * (1.0 - (-1.0f64).exp()), x))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkCheck {
    /// Empirical `P(lambda_k |B| >= eps)` for each `lambda_k`.
    pub exceedance: Vec<f64>,
    /// Strictly decreasing while positive; once 0 it must stay 0.
    pub decreasing: bool,
    pub final_value: f64,
    pub passed: bool,
}

/// Monte Carlo check that `lambda_k B` shrinks to 0 in probability: the
/// exceedance sequence must decrease and end at most `final_tol`.
pub fn shrink_to_zero_check<R, F>(
    mut sample_b: F,
    lambdas: &[f64],
    eps: f64,
    draws: usize,
    final_tol: f64,
    rng: &mut R,
) -> Result<ShrinkCheck>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> f64,
{
    if lambdas.is_empty() || draws == 0 {
        return Err(invalid("need at least one lambda and one draw"));
    }
    if lambdas.iter().any(|&l| !(l >= 0.0)) || !(eps > 0.0) {
        return Err(invalid("lambdas must be nonnegative and eps positive"));
    }
    let exceedance: Vec<f64> = lambdas
        .iter()
        .map(|&l| {
            let hits = (0..draws).filter(|_| l * sample_b(rng).abs() >= eps).count();
            hits as f64 / draws as f64
        })
        .collect();
    let decreasing = exceedance
        .windows(2)
        .all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
    let final_value = *exceedance.last().expect("nonempty");
    Ok(ShrinkCheck { passed: decreasing && final_value <= final_tol, exceedance, decreasing, final_value })
}

/// Monte Carlo settings for [`validate_theorem`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationSettings {
    pub trials: u64,
    pub seed: u64,
    pub confidence: f64,
    /// Uniform family only: pass threshold on the two-sample KS distance.
    pub ks_threshold: f64,
}

impl ValidationSettings {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self { trials, seed, confidence: 0.99, ks_threshold: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub family: Family,
    pub budget: TheoremBudget,
    pub mu_n: f64,
    pub seed: u64,
    pub trials: u64,
    /// `None` in KS mode.
    pub bounds: Option<BoundSet>,
    pub event_hits: u64,
    pub empirical_freq: f64,
    pub prob_floor: f64,
    pub wilson_lower: f64,
    pub wilson_slack: f64,
    pub passed: bool,
    /// The Wilson slack alone exceeds `1 - prob_floor`.
    pub insufficient_trials: bool,
    pub non_separable_count: u64,
    pub mean_theta_erm: f64,
    pub mean_theta_sub: f64,
    pub mean_abs_theta_erm: f64,
    pub mean_abs_theta_sub: f64,
    pub mean_wce_erm: f64,
    pub mean_wce_sub: f64,
    /// Event trials whose analytic wce also satisfies both wce bounds.
    pub wce_bracket_hits: u64,
    pub wce_passed: bool,
    pub ks_statistic: Option<f64>,
    pub ks_threshold: Option<f64>,
}

struct Trial {
    erm: Option<f64>,
    sub: Option<f64>,
}

fn run_trials(recipe: &GenRecipe, budget: &TheoremBudget, settings: &ValidationSettings) -> Result<Vec<Trial>> {
    let tree = SeedTree::new(settings.seed);
    (0..settings.trials)
        .into_par_iter()
        .map(|t| {
            let ex = draw_extremes_1d(recipe, budget.n as usize, budget.beta, &mut tree.stream(t))?;
            let (erm, sub) = ex.thresholds();
            Ok(Trial { erm, sub })
        })
        .collect()
}

/// Worst-class error of the 1-D threshold `theta`: `F_0(|theta| - mu)`.
fn wce_1d(recipe: &GenRecipe, theta: f64) -> f64 {
    recipe.noise().cdf(theta.abs() - recipe.mu_n)
}

/// Empirical check of one theorem's high-probability event.
///
/// Each trial draws data with the scheduled `mu_n`, fits both thresholds in
/// closed form and scores the event
/// `separable && |theta_erm| >= lower && |theta_sub| <= upper`. Non-separable
/// draws count as failures. The run passes when the event frequency reaches
/// `prob_floor` minus the Wilson slack (`p_hat - wilson_lower`).
///
/// The uniform family has no event; it passes when the two-sample KS
/// distance between the `theta_erm` and `theta_sub` samples is at most
/// `ks_threshold`.
pub fn validate_theorem(
    family: Family,
    budget: &TheoremBudget,
    settings: &ValidationSettings,
) -> Result<ValidationReport> {
    if settings.trials < 100 {
        return Err(invalid(format!("need at least 100 trials, got {}", settings.trials)));
    }
    let bounds = match family {
        Family::Uniform => None,
        _ => {
            let b = bounds_for(family, budget)?;
            if b.vacuous {
                return Err(Error::Budget(format!(
                    "probability floor {} is not positive",
                    b.prob_floor
                )));
            }
            Some(b)
        }
    };
    let recipe = GenRecipe::scheduled(family, budget.n, budget.epsilon, 1, budget.alpha)?;
    let trials = run_trials(&recipe, budget, settings)?;

    let mut erm_all = Vec::new();
    let mut sub_all = Vec::new();
    let mut wce_erm = Vec::new();
    let mut wce_sub = Vec::new();
    let (mut hits, mut bracket_hits, mut non_sep) = (0u64, 0u64, 0u64);
    for t in &trials {
        let (Some(erm), Some(sub)) = (t.erm, t.sub) else {
            non_sep += 1;
            continue;
        };
        erm_all.push(erm);
        sub_all.push(sub);
        let (we, ws) = (wce_1d(&recipe, erm), wce_1d(&recipe, sub));
        wce_erm.push(we);
        wce_sub.push(ws);
        match &bounds {
            Some(b) => {
                if erm.abs() >= b.erm_theta_lower && sub.abs() <= b.sub_theta_upper {
                    hits += 1;
                    if we >= b.erm_wce_lower && ws <= b.sub_wce_upper {
                        bracket_hits += 1;
                    }
                }
            }
            None => hits += 1,
        }
    }
    let n = settings.trials;
    let freq = hits as f64 / n as f64;
    let (lo, _) = wilson_interval(hits, n, settings.confidence);
    let slack = freq - lo;
    let abs_mean = |xs: &[f64]| mean(&xs.iter().map(|v| v.abs()).collect::<Vec<_>>());

    let (floor, passed, wce_passed, ks, ks_thr) = match &bounds {
        Some(b) => {
            let bfreq = bracket_hits as f64 / n as f64;
            let (blo, _) = wilson_interval(bracket_hits, n, settings.confidence);
            (
                b.prob_floor,
                freq >= b.prob_floor - slack,
                bfreq >= b.prob_floor - (bfreq - blo),
                None,
                None,
            )
        }
        None => {
            let ks = ks_two_sample(&erm_all, &sub_all);
            let ok = ks <= settings.ks_threshold && !erm_all.is_empty();
            (0.0, ok, true, Some(ks), Some(settings.ks_threshold))
        }
    };
    Ok(ValidationReport {
        family,
        budget: *budget,
        mu_n: recipe.mu_n,
        seed: settings.seed,
        trials: n,
        bounds,
        event_hits: hits,
        empirical_freq: freq,
        prob_floor: floor,
        wilson_lower: lo,
        wilson_slack: slack,
        passed,
        insufficient_trials: slack > 1.0 - floor,
        non_separable_count: non_sep,
        mean_theta_erm: mean(&erm_all),
        mean_theta_sub: mean(&sub_all),
        mean_abs_theta_erm: abs_mean(&erm_all),
        mean_abs_theta_sub: abs_mean(&sub_all),
        mean_wce_erm: mean(&wce_erm),
        mean_wce_sub: mean(&wce_sub),
        wce_bracket_hits: bracket_hits,
        wce_passed,
        ks_statistic: ks,
        ks_threshold: ks_thr,
    })
}
