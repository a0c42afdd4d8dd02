//! Imbalanced two-class data with `X = Y (mu + xi)`, majority subsampling and
//! worst-class error.
//!
//! The positive class is the majority with `n` points; the negative class has
//! `beta * n` points. In one dimension the noise `xi` is the family itself; for
//! `d > 1` the center is `mu_n e_1` and the noise coordinates are i.i.d. draws
//! of the one-dimensional family. That is spherical only for the Gaussian, so
//! closed-form errors in `d > 1` are restricted to it.

use std::io::{Read, Write};
use std::str::FromStr;

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, Family};
use crate::error::{invalid, Error, Result};
use crate::rng::open01;
use crate::special::{normal_cdf, normal_pdf};
use crate::svm::LinearModel;

/// Labeled samples stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    x: Vec<f64>,
    y: Vec<i8>,
    n_major: usize,
    n_minor: usize,
}

impl Dataset {
    /// Build from a flat row-major matrix and `±1` labels.
    pub fn new(dim: usize, x: Vec<f64>, y: Vec<i8>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if x.len() != dim * y.len() {
            return Err(Error::DimensionMismatch { expected: dim * y.len(), found: x.len() });
        }
        if let Some(bad) = y.iter().find(|&&v| v != 1 && v != -1) {
            return Err(invalid(format!("labels must be +1 or -1, got {bad}")));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dataset contains a non-finite feature".into()));
        }
        let n_major = y.iter().filter(|&&v| v == 1).count();
        let n_minor = y.len() - n_major;
        Ok(Self { dim, x, y, n_major, n_minor })
    }

    pub fn from_rows(rows: &[Vec<f64>], y: Vec<i8>) -> Result<Self> {
        let dim = rows.first().map_or(1, |r| r.len());
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: r.len() });
        }
        Self::new(dim, rows.concat(), y)
    }

    /// One-dimensional data from the two classes' values.
    pub fn from_1d(negatives: &[f64], positives: &[f64]) -> Result<Self> {
        let x: Vec<f64> = positives.iter().chain(negatives).copied().collect();
        let y = std::iter::repeat(1)
            .take(positives.len())
            .chain(std::iter::repeat(-1).take(negatives.len()))
            .collect();
        Self::new(1, x, y)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn x(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }

    pub fn y(&self, i: usize) -> i8 {
        self.y[i]
    }

    pub fn labels(&self) -> &[i8] {
        &self.y
    }

    pub fn features(&self) -> &[f64] {
        &self.x
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f64], i8)> + '_ {
        self.x.chunks_exact(self.dim).zip(self.y.iter().copied())
    }

    /// Number of positive (majority) samples, the `n` of the model.
    pub fn n_major(&self) -> usize {
        self.n_major
    }

    pub fn n_minor(&self) -> usize {
        self.n_minor
    }

    /// Imbalance ratio `n_minor / n_major` as an exact fraction.
    pub fn beta(&self) -> Option<Ratio<u64>> {
        (self.n_major > 0).then(|| Ratio::new(self.n_minor as u64, self.n_major as u64))
    }

    /// Values of a one-dimensional dataset split by class: `(negatives, positives)`.
    pub fn split_1d(&self) -> (Vec<f64>, Vec<f64>) {
        let mut neg = Vec::with_capacity(self.n_minor);
        let mut pos = Vec::with_capacity(self.n_major);
        for (x, y) in self.rows() {
            if y > 0 {
                pos.push(x[0]);
            } else {
                neg.push(x[0]);
            }
        }
        (neg, pos)
    }

    /// Keep the rows selected by `keep`, preserving order.
    pub fn select(&self, keep: impl Fn(usize) -> bool) -> Dataset {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..self.len() {
            if keep(i) {
                x.extend_from_slice(self.x(i));
                y.push(self.y[i]);
            }
        }
        Dataset::new(self.dim, x, y).expect("subset of a valid dataset")
    }

    /// CSV with header `x0,...,x{d-1},y`; values carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (0..self.dim).map(|j| format!("x{j}")).collect();
        header.push("y".into());
        out.write_record(&header).map_err(csv_err)?;
        for (x, y) in self.rows() {
            let mut rec: Vec<String> = x.iter().map(|v| format!("{v:.16e}")).collect();
            rec.push(y.to_string());
            out.write_record(&rec).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers().map_err(csv_err)?.clone();
        let dim = header.len().checked_sub(1).filter(|&d| d > 0).ok_or_else(|| {
            Error::Parse("dataset header needs at least one feature and a label".into())
        })?;
        for (j, name) in header.iter().take(dim).enumerate() {
            if name != format!("x{j}") {
                return Err(Error::Parse(format!("unexpected column '{name}'")));
            }
        }
        if &header[dim] != "y" {
            return Err(Error::Parse("last column must be 'y'".into()));
        }
        let mut x = Vec::new();
        let mut y = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(csv_err)?;
            for v in rec.iter().take(dim) {
                x.push(parse_f64(v)?);
            }
            let label: i8 = rec[dim]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad label '{}'", &rec[dim])))?;
            y.push(label);
        }
        Dataset::new(dim, x, y)
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad number '{s}'")))
}

/// Parse an imbalance ratio given as a decimal (`0.05`) or a fraction (`1/20`).
pub fn parse_beta(s: &str) -> Result<Ratio<u64>> {
    let s = s.trim();
    let r = if s.contains('/') {
        Ratio::<u64>::from_str(s).map_err(|_| Error::Parse(format!("bad ratio '{s}'")))?
    } else {
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty()
            || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
            || frac.len() > 18
        {
            return Err(Error::Parse(format!("bad decimal '{s}'")));
        }
        let den = 10u64.pow(frac.len() as u32);
        let digits = format!("{int}{frac}");
        let num: u64 = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal '{s}'")))?;
        Ratio::new(num, den)
    };
    if *r.numer() == 0 || r > Ratio::from_integer(1) {
        return Err(invalid(format!("beta must lie in (0, 1], got {s}")));
    }
    Ok(r)
}

/// Minority count `beta * n`, required to be an integer.
pub fn minority_count(n: usize, beta: Ratio<u64>) -> Result<usize> {
    let m = beta * Ratio::from_integer(n as u64);
    if !m.is_integer() {
        return Err(invalid(format!("beta * n = {m} is not an integer (n = {n})")));
    }
    Ok(m.to_integer() as usize)
}

/// How a dataset is generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenRecipe {
    pub family: Family,
    pub mu_n: f64,
    pub dim: usize,
    /// Separability budget that produced `mu_n`, if scheduled.
    pub epsilon: Option<f64>,
    pub alpha: f64,
}

impl GenRecipe {
    /// A recipe with a fixed class-center magnitude.
    pub fn fixed(family: Family, mu: f64, dim: usize, alpha: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid(format!("mu must be positive, got {mu}")));
        }
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self { family, mu_n: mu, dim, epsilon: None, alpha })
    }

    /// A recipe whose center follows [`mu_schedule`].
    pub fn scheduled(family: Family, n: u64, epsilon: f64, dim: usize, alpha: f64) -> Result<Self> {
        let mu = mu_schedule(family, n, epsilon, alpha)?;
        let mut r = Self::fixed(family, mu, dim, alpha)?;
        r.epsilon = Some(epsilon);
        Ok(r)
    }

    /// Centered one-dimensional noise law. The uniform family lives on
    /// `[-1/2, 1/2]`; every other family has unit scale.
    pub fn noise(&self) -> DistributionSpec {
        let scale = if self.family == Family::Uniform { 0.5 } else { 1.0 };
        DistributionSpec::new(self.family, 0.0, scale, self.alpha).expect("validated recipe")
    }

    /// Class-conditional law of the first coordinate for label `y`.
    pub fn class_marginal(&self, y: i8) -> DistributionSpec {
        self.noise().with_mu(y as f64 * self.mu_n)
    }
}

/// Class-center magnitude that makes `n`-sample data separable with
/// probability about `1 - 2 epsilon`.
///
/// Uniform: `1/2`; Laplace: `log(n/epsilon)`; Fréchet: `(n / 2 epsilon)^(1/alpha)`;
/// Gaussian: root `mu > 1` of `phi(mu) / mu = epsilon / n`.
pub fn mu_schedule(family: Family, n: u64, epsilon: f64, alpha: f64) -> Result<f64> {
    if n < 2 {
        return Err(invalid(format!("mu schedule needs n >= 2, got {n}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let nf = n as f64;
    Ok(match family {
        Family::Uniform => 0.5,
        Family::Laplace => (nf / epsilon).ln(),
        Family::TwoSidedFrechet => {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(invalid(format!("alpha must be positive, got {alpha}")));
            }
            (nf / (2.0 * epsilon)).powf(1.0 / alpha)
        }
        Family::Gaussian => gaussian_mu(epsilon / nf, (2.0 * (nf / epsilon).ln()).sqrt() + 2.0)?,
    })
}

/// `phi(mu)/mu - target`, decreasing in `mu > 0`.
pub fn gaussian_schedule_residual(mu: f64, target: f64) -> f64 {
    normal_pdf(mu) / mu - target
}

fn gaussian_mu(target: f64, upper: f64) -> Result<f64> {
    let (mut lo, mut hi) = (1.0f64, upper);
    let (flo, fhi) = (gaussian_schedule_residual(lo, target), gaussian_schedule_residual(hi, target));
    if !(flo > 0.0 && fhi < 0.0) {
        return Err(Error::RootBracket(format!(
            "no sign change on [{lo}, {hi}] for target {target:e}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gaussian_schedule_residual(mid, target) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = if gaussian_schedule_residual(lo, target).abs() <= gaussian_schedule_residual(hi, target).abs() {
        lo
    } else {
        hi
    };
    let r = gaussian_schedule_residual(mu, target);
    if r.abs() > 1e-12 {
        return Err(Error::RootBracket(format!("residual {r:e} above 1e-12")));
    }
    Ok(mu)
}

fn push_point<R: Rng + ?Sized>(
    recipe: &GenRecipe,
    noise: &DistributionSpec,
    y: i8,
    rng: &mut R,
    x: &mut Vec<f64>,
) {
    let s = y as f64;
    x.push(s * (recipe.mu_n + noise.draw(rng)));
    for _ in 1..recipe.dim {
        x.push(s * noise.draw(rng));
    }
}

/// Draw `n` positives followed by `beta * n` negatives.
pub fn generate<R: Rng + ?Sized>(
    recipe: &GenRecipe,
    n: usize,
    beta: Ratio<u64>,
    rng: &mut R,
) -> Result<Dataset> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let m = minority_count(n, beta)?;
    let noise = recipe.noise();
    let mut x = Vec::with_capacity((n + m) * recipe.dim);
    for _ in 0..n {
        push_point(recipe, &noise, 1, rng, &mut x);
    }
    for _ in 0..m {
        push_point(recipe, &noise, -1, rng, &mut x);
    }
    let y = std::iter::repeat(1).take(n).chain(std::iter::repeat(-1).take(m)).collect();
    Dataset::new(recipe.dim, x, y)
}

/// Sorted positions (among the positives) kept by majority subsampling.
pub fn subsample_indices<R: Rng + ?Sized>(n_major: usize, keep: usize, rng: &mut R) -> Vec<usize> {
    let mut idx = rand::seq::index::sample(rng, n_major, keep).into_vec();
    idx.sort_unstable();
    idx
}

/// Uniformly drop positives, without replacement, until both classes have
/// the minority size. Negatives and relative order are untouched.
pub fn subsample_majority<R: Rng + ?Sized>(data: &Dataset, rng: &mut R) -> Result<Dataset> {
    subsample_majority_to(data, data.n_minor(), rng)
}

/// Like [`subsample_majority`] but keeping `keep` positives.
pub fn subsample_majority_to<R: Rng + ?Sized>(
    data: &Dataset,
    keep: usize,
    rng: &mut R,
) -> Result<Dataset> {
    if keep > data.n_major() {
        return Err(invalid(format!(
            "cannot keep {keep} of {} majority samples",
            data.n_major()
        )));
    }
    let chosen = subsample_indices(data.n_major(), keep, rng);
    let mut mask = vec![false; data.len()];
    let mut ordinal = 0usize;
    let mut next = chosen.iter().peekable();
    for (i, &y) in data.labels().iter().enumerate() {
        if y < 0 {
            mask[i] = true;
        } else {
            if next.peek() == Some(&&ordinal) {
                mask[i] = true;
                next.next();
            }
            ordinal += 1;
        }
    }
    Ok(data.select(|i| mask[i]))
}

fn check_dim(recipe: &GenRecipe, model: &LinearModel) -> Result<()> {
    if model.w.len() != recipe.dim {
        return Err(Error::DimensionMismatch { expected: recipe.dim, found: model.w.len() });
    }
    Ok(())
}

/// Per-class error probabilities `(positive, negative)` in closed form.
pub fn class_errors_analytic(recipe: &GenRecipe, model: &LinearModel) -> Result<(f64, f64)> {
    check_dim(recipe, model)?;
    if recipe.dim > 1 && recipe.family != Family::Gaussian {
        return Err(Error::Unsupported(format!(
            "closed-form error for {} noise needs d = 1",
            recipe.family
        )));
    }
    let norm = model.w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(invalid("model direction is zero"));
    }
    let proj = recipe.mu_n * model.w[0];
    let marginal = |t: f64| match recipe.family {
        Family::Gaussian => normal_cdf(t),
        _ => recipe.noise().cdf(t),
    };
    // class y errs when y (w.x + b) < 0, with w.x = y (mu w_0 + w.xi)
    let pos = marginal(-(model.b + proj) / norm);
    let neg = marginal((model.b - proj) / norm);
    Ok((pos, neg))
}

/// Worst-class error `max(P(err | +), P(err | -))` in closed form.
pub fn wce_analytic(recipe: &GenRecipe, model: &LinearModel) -> Result<f64> {
    let (p, n) = class_errors_analytic(recipe, model)?;
    Ok(p.max(n))
}

/// Prior-weighted error `(P(err | +) + beta P(err | -)) / (1 + beta)`.
pub fn average_error_analytic(recipe: &GenRecipe, model: &LinearModel, beta: f64) -> Result<f64> {
    let (p, n) = class_errors_analytic(recipe, model)?;
    Ok((p + beta * n) / (1.0 + beta))
}

/// Misclassification frequencies `(positive, negative)` of each model on one
/// shared test set of `m` fresh points per class.
pub fn class_errors_empirical<R: Rng + ?Sized>(
    recipe: &GenRecipe,
    models: &[&LinearModel],
    m: usize,
    rng: &mut R,
) -> Result<Vec<(f64, f64)>> {
    for model in models {
        check_dim(recipe, model)?;
    }
    if m == 0 {
        return Err(invalid("need at least one test point per class"));
    }
    let noise = recipe.noise();
    let mut wrong = vec![(0u64, 0u64); models.len()];
    let mut x = Vec::with_capacity(recipe.dim);
    for y in [1i8, -1] {
        for _ in 0..m {
            x.clear();
            push_point(recipe, &noise, y, rng, &mut x);
            for (k, model) in models.iter().enumerate() {
                let score: f64 = model.w.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() + model.b;
                let errs = if y > 0 { score < 0.0 } else { score > 0.0 };
                if errs {
                    if y > 0 {
                        wrong[k].0 += 1;
                    } else {
                        wrong[k].1 += 1;
                    }
                }
            }
        }
    }
    let mf = m as f64;
    Ok(wrong.into_iter().map(|(p, n)| (p as f64 / mf, n as f64 / mf)).collect())
}

/// Monte Carlo worst-class error over `m` test points per class.
pub fn wce_empirical<R: Rng + ?Sized>(
    recipe: &GenRecipe,
    model: &LinearModel,
    m: usize,
    rng: &mut R,
) -> Result<f64> {
    let e = class_errors_empirical(recipe, &[model], m, rng)?;
    Ok(e[0].0.max(e[0].1))
}

/// Class extremes of one one-dimensional draw and of its majority subsample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes1d {
    /// Largest negative on the full data.
    pub neg_max: f64,
    /// Smallest positive on the full data.
    pub pos_min: f64,
    /// Smallest positive kept by the subsample.
    pub sub_pos_min: f64,
}

impl Extremes1d {
    /// Hard-margin thresholds `(theta_erm, theta_sub)`; `None` where the
    /// classes overlap.
    pub fn thresholds(&self) -> (Option<f64>, Option<f64>) {
        let fit = |lo: f64, hi: f64| (lo < hi).then(|| 0.5 * (lo + hi));
        (fit(self.neg_max, self.pos_min), fit(self.neg_max, self.sub_pos_min))
    }
}

/// Same stream use and same extremes as `generate` followed by
/// `subsample_majority`, without materializing the features.
///
/// The quantile transform is monotone, so only the extreme uniforms are
/// mapped to feature values.
pub fn draw_extremes_1d<R: Rng + ?Sized>(
    recipe: &GenRecipe,
    n: usize,
    beta: Ratio<u64>,
    rng: &mut R,
) -> Result<Extremes1d> {
    if recipe.dim != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: recipe.dim });
    }
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let m = minority_count(n, beta)?;
    if m == 0 {
        return Err(invalid("minority class is empty"));
    }
    let noise = recipe.noise();
    let u: Vec<f64> = (0..n).map(|_| open01(rng)).collect();
    let neg_u = (0..m).map(|_| open01(rng)).fold(1.0f64, f64::min);
    let pos_u = u.iter().copied().fold(1.0f64, f64::min);
    let sub_u = subsample_indices(n, m, rng)
        .into_iter()
        .map(|i| u[i])
        .fold(1.0f64, f64::min);
    let q = |v: f64| noise.quantile(v).expect("open interval");
    Ok(Extremes1d {
        neg_max: -(recipe.mu_n + q(neg_u)),
        pos_min: recipe.mu_n + q(pos_u),
        sub_pos_min: recipe.mu_n + q(sub_u),
    })
}
