//! Linear classifiers `sign(w.x + b)`.
//!
//! The max-margin solvers work on the dual
//!
//! ```text
//! min_a  1/2 |sum_i a_i y_i x_i|^2 - sum_i a_i
//! s.t.   sum_i a_i y_i = 0,  0 <= a_i <= c
//! ```
//!
//! by two-multiplier updates on the most violating pair, keeping
//! `w = sum_i a_i y_i x_i` explicitly (linear kernel, so each update costs one
//! pass over the data). The hard margin is the box `c = 1e8` plus a check that
//! the result has no slack.

use serde::{Deserialize, Serialize};

use crate::datagen::Dataset;
use crate::error::{invalid, Error, Result};

/// Box bound used for the hard-margin program.
pub const HARD_MARGIN_C: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub w: Vec<f64>,
    pub b: f64,
    /// Signed offset of the hyperplane along `w / |w|`; the threshold in 1-D.
    pub theta: f64,
    /// Smallest geometric margin over the training data (0 if some point is
    /// misclassified).
    pub margin: f64,
    pub kkt_violation: f64,
}

impl LinearModel {
    pub fn from_parts(w: Vec<f64>, b: f64) -> Self {
        let norm = dot(&w, &w).sqrt();
        Self { theta: -b / norm, w, b, margin: 0.0, kkt_violation: 0.0 }
    }

    /// The 1-D classifier `sign(x - theta)`.
    pub fn threshold(theta: f64) -> Self {
        Self { w: vec![1.0], b: -theta, theta, margin: 0.0, kkt_violation: 0.0 }
    }

    pub fn norm(&self) -> f64 {
        dot(&self.w, &self.w).sqrt()
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) + self.b
    }

    pub fn predict(&self, x: &[f64]) -> i8 {
        if self.score(x) >= 0.0 {
            1
        } else {
            -1
        }
    }

    fn with_margin(mut self, data: &Dataset) -> Self {
        let norm = self.norm();
        let m = data
            .rows()
            .map(|(x, y)| y as f64 * self.score(x))
            .fold(f64::INFINITY, f64::min);
        self.margin = (m / norm).max(0.0);
        self
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Closed-form 1-D hard-margin SVM: the midpoint of the gap.
pub fn solve_svm_1d(neg_max: f64, pos_min: f64) -> Result<LinearModel> {
    if !(neg_max < pos_min) {
        return Err(Error::NotSeparable);
    }
    let theta = 0.5 * (neg_max + pos_min);
    Ok(LinearModel {
        w: vec![1.0],
        b: -theta,
        theta,
        margin: 0.5 * (pos_min - neg_max),
        kkt_violation: 0.0,
    })
}

/// Dual solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Stop when the maximal KKT violation `m(a) - M(a)` is below this.
    pub tol: f64,
    pub max_updates: u64,
    /// Declare non-separable once `sum a` exceeds this (hard margin only).
    pub alpha_cap: f64,
    /// Declare non-separable if no zero-error iterate was seen after this
    /// many updates (hard margin only, `d > 1`).
    pub witness_budget: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_updates: 10_000_000, alpha_cap: 1e12, witness_budget: 100_000 }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

fn class_extremes(data: &Dataset, w: &[f64]) -> (f64, f64) {
    let mut neg_max = f64::NEG_INFINITY;
    let mut pos_min = f64::INFINITY;
    for (x, y) in data.rows() {
        let s = dot(w, x);
        if y > 0 {
            pos_min = pos_min.min(s);
        } else {
            neg_max = neg_max.max(s);
        }
    }
    (neg_max, pos_min)
}

fn require_both_classes(data: &Dataset) -> Result<()> {
    if data.n_major() == 0 || data.n_minor() == 0 {
        return Err(invalid("training data needs both classes"));
    }
    Ok(())
}

/// Offset equalizing the two classes' smallest margins along `w`:
/// `b = -(max_neg w.x + min_pos w.x) / 2`.
pub fn offset_for_direction(data: &Dataset, w: &[f64]) -> Result<f64> {
    if w.len() != data.dim() {
        return Err(Error::DimensionMismatch { expected: data.dim(), found: w.len() });
    }
    if w.iter().all(|&v| v == 0.0) {
        return Err(invalid("direction must be nonzero"));
    }
    require_both_classes(data)?;
    let (neg_max, pos_min) = class_extremes(data, w);
    if !(neg_max < pos_min) {
        return Err(Error::NotSeparable);
    }
    Ok(-0.5 * (neg_max + pos_min))
}

/// Whether some hyperplane has zero training error with strict separation.
///
/// Exact in one dimension. For `d > 1` this searches for a zero-error iterate
/// of the `c = 1e8` dual within the default witness budget, so a `false` means
/// none was found.
pub fn is_separable(data: &Dataset) -> bool {
    if data.n_major() == 0 || data.n_minor() == 0 {
        return !data.is_empty();
    }
    if data.dim() == 1 {
        let (neg_max, pos_min) = class_extremes(data, &[1.0]);
        return neg_max < pos_min;
    }
    smo(data, HARD_MARGIN_C, &SolverOptions::default(), Mode::Witness).is_ok_and(|o| o.witnessed)
}

struct SmoOutcome {
    w: Vec<f64>,
    alpha: Vec<f64>,
    violation: f64,
    /// Some iterate separated the training data with zero error.
    witnessed: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Soft,
    Hard,
    /// Stop at the first zero-error iterate.
    Witness,
}

fn smo(data: &Dataset, c: f64, opts: &SolverOptions, mode: Mode) -> Result<SmoOutcome> {
    require_both_classes(data)?;
    let n = data.len();
    let d = data.dim();
    let ys: Vec<f64> = data.labels().iter().map(|&y| y as f64).collect();
    let mut alpha = vec![0.0f64; n];
    let mut w = vec![0.0f64; d];
    // scores s_k = w.x_k; gradient of the dual objective is y_k s_k - 1
    let mut s = vec![0.0f64; n];
    let mut alpha_sum = 0.0f64;
    let mut witnessed = false;
    let mut diff = vec![0.0f64; d];
    let mut updates = 0u64;
    let gram = gram_matrix(data);

    loop {
        // most violating pair, first index on ties
        let (mut i, mut m_up) = (usize::MAX, f64::NEG_INFINITY);
        let (mut j, mut m_low) = (usize::MAX, f64::INFINITY);
        let mut pos_min = f64::INFINITY;
        let mut neg_max = f64::NEG_INFINITY;
        for k in 0..n {
            let y = ys[k];
            let v = -y * (y * s[k] - 1.0);
            let a = alpha[k];
            let up = if y > 0.0 { a < c } else { a > 0.0 };
            let low = if y > 0.0 { a > 0.0 } else { a < c };
            if up && v > m_up {
                m_up = v;
                i = k;
            }
            if low && v < m_low {
                m_low = v;
                j = k;
            }
            if y > 0.0 {
                pos_min = pos_min.min(s[k]);
            } else {
                neg_max = neg_max.max(s[k]);
            }
        }
        if pos_min > neg_max {
            witnessed = true;
        }
        let violation = m_up - m_low;
        if (witnessed && mode == Mode::Witness)
            || i == usize::MAX
            || j == usize::MAX
            || violation <= opts.tol
        {
            return Ok(SmoOutcome { w, alpha, violation: violation.max(0.0), witnessed });
        }
        if updates >= opts.max_updates {
            return Err(Error::IterationLimit { updates, violation });
        }
        if mode != Mode::Soft {
            if alpha_sum > opts.alpha_cap {
                return Err(Error::NotSeparable);
            }
            if d > 1 && !witnessed && updates >= opts.witness_budget {
                return Err(Error::NotSeparable);
            }
        }

        let (xi, xj) = (data.x(i), data.x(j));
        let mut curv = 0.0;
        for t in 0..d {
            diff[t] = xi[t] - xj[t];
            curv += diff[t] * diff[t];
        }
        let mut step = if curv > 0.0 { violation / curv } else { f64::INFINITY };
        step = step.min(if ys[i] > 0.0 { c - alpha[i] } else { alpha[i] });
        step = step.min(if ys[j] > 0.0 { alpha[j] } else { c - alpha[j] });
        if !step.is_finite() {
            // identical points with opposite labels and an unbounded box
            return Err(Error::NotSeparable);
        }
        alpha[i] = (alpha[i] + ys[i] * step).clamp(0.0, c);
        alpha[j] = (alpha[j] - ys[j] * step).clamp(0.0, c);
        alpha_sum += (ys[i] - ys[j]) * step;
        for t in 0..d {
            w[t] += step * diff[t];
        }
        match &gram {
            Some(g) => {
                let (gi, gj) = (&g[i * n..(i + 1) * n], &g[j * n..(j + 1) * n]);
                for k in 0..n {
                    s[k] += step * (gi[k] - gj[k]);
                }
            }
            None => {
                for k in 0..n {
                    s[k] += step * dot(&diff, data.x(k));
                }
            }
        }
        updates += 1;
        if !alpha_sum.is_finite() {
            return Err(Error::NonFinite("dual multipliers diverged".into()));
        }
    }
}

const GRAM_MAX_POINTS: usize = 2048;

/// Row-major `x_i . x_k` when it is small enough to keep and cheaper than
/// recomputing dot products in every update.
fn gram_matrix(data: &Dataset) -> Option<Vec<f64>> {
    let (n, d) = (data.len(), data.dim());
    if d < 3 || n > GRAM_MAX_POINTS {
        return None;
    }
    let mut g = vec![0.0f64; n * n];
    for i in 0..n {
        for k in i..n {
            let v = dot(data.x(i), data.x(k));
            g[i * n + k] = v;
            g[k * n + i] = v;
        }
    }
    Some(g)
}

/// Hard-margin SVM with the given KKT tolerance and default budgets.
pub fn train_hard_svm(data: &Dataset, tol: f64) -> Result<LinearModel> {
    train_hard_svm_with(data, &SolverOptions::with_tol(tol))
}

pub fn train_hard_svm_with(data: &Dataset, opts: &SolverOptions) -> Result<LinearModel> {
    if !(opts.tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    require_both_classes(data)?;
    if data.dim() == 1 {
        let (neg_max, pos_min) = class_extremes(data, &[1.0]);
        if !(neg_max < pos_min) {
            return Err(Error::NotSeparable);
        }
    }
    let mut out = smo(data, HARD_MARGIN_C, opts, Mode::Hard)?;
    if out.alpha.iter().any(|&a| a >= HARD_MARGIN_C) {
        // A multiplier at the box means slack, unless the data are known to
        // be separable and the margin is just tiny (sum a = |w|^2 = 4 / gap^2
        // in 1-D). Then the box is dropped.
        if !(data.dim() == 1 || out.witnessed) {
            return Err(Error::NotSeparable);
        }
        let unboxed = SolverOptions { alpha_cap: f64::INFINITY, ..*opts };
        out = smo(data, f64::INFINITY, &unboxed, Mode::Hard)?;
    }
    let b = offset_for_direction(data, &out.w)?;
    let mut model = LinearModel::from_parts(out.w, b);
    model.kkt_violation = out.violation;
    Ok(model.with_margin(data))
}

/// Soft-margin SVM with slack penalty `c`.
pub fn train_soft_svm(data: &Dataset, c: f64, tol: f64) -> Result<LinearModel> {
    train_soft_svm_with(data, c, &SolverOptions::with_tol(tol))
}

pub fn train_soft_svm_with(data: &Dataset, c: f64, opts: &SolverOptions) -> Result<LinearModel> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid(format!("c must be positive, got {c}")));
    }
    if !(opts.tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let out = smo(data, c, opts, Mode::Soft)?;
    // offset: average over free multipliers, else the middle of the feasible range
    let (mut sum, mut count) = (0.0, 0usize);
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (k, (x, y)) in data.rows().enumerate() {
        let y = y as f64;
        let r = y - dot(&out.w, x);
        let a = out.alpha[k];
        if a > 0.0 && a < c {
            sum += r;
            count += 1;
        } else {
            // y (s + b) >= 1 when a = 0, <= 1 when a = c
            let at_lower = a <= 0.0;
            if (y > 0.0) == at_lower {
                lo = lo.max(r);
            } else {
                hi = hi.min(r);
            }
        }
    }
    let b = if count > 0 {
        sum / count as f64
    } else if lo.is_finite() && hi.is_finite() {
        0.5 * (lo + hi)
    } else if lo.is_finite() {
        lo
    } else {
        hi
    };
    let mut model = LinearModel::from_parts(out.w, b);
    model.kkt_violation = out.violation;
    Ok(model.with_margin(data))
}

#[inline]
fn softplus(z: f64) -> f64 {
    // log(1 + e^z) without overflow
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean logistic loss `1/N sum log(1 + exp(-y (w.x + b)))` and its gradient
/// in `(w, b)`.
pub fn logistic_loss_and_grad(data: &Dataset, w: &[f64], b: f64) -> (f64, Vec<f64>, f64) {
    let n = data.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (x, y) in data.rows() {
        let y = y as f64;
        let z = y * (dot(w, x) + b);
        loss += softplus(-z);
        let g = -y * sigmoid(-z);
        for (gt, xt) in gw.iter_mut().zip(x) {
            *gt += g * xt;
        }
        gb += g;
    }
    gw.iter_mut().for_each(|g| *g /= n);
    (loss / n, gw, gb / n)
}

/// Step size `4 / mean |(x, 1)|^2`, the inverse of the loss's smoothness bound.
pub fn default_logistic_step(data: &Dataset) -> f64 {
    let m = data.rows().map(|(x, _)| dot(x, x) + 1.0).sum::<f64>() / data.len() as f64;
    4.0 / m
}

/// Unregularized logistic regression by full-batch gradient descent from 0.
pub fn train_logistic(data: &Dataset, steps: u64, step_size: f64) -> Result<LinearModel> {
    if steps == 0 {
        return Err(invalid("need at least one step"));
    }
    if !(step_size > 0.0 && step_size.is_finite()) {
        return Err(invalid(format!("step size must be positive, got {step_size}")));
    }
    require_both_classes(data)?;
    let mut w = vec![0.0; data.dim()];
    let mut b = 0.0;
    for _ in 0..steps {
        let (loss, gw, gb) = logistic_loss_and_grad(data, &w, b);
        if !loss.is_finite() {
            return Err(Error::NonFinite(format!("logistic loss {loss} (step size too large?)")));
        }
        for (wt, g) in w.iter_mut().zip(&gw) {
            *wt -= step_size * g;
        }
        b -= step_size * gb;
    }
    if !(b.is_finite() && w.iter().all(|v| v.is_finite())) {
        return Err(Error::NonFinite("logistic parameters overflowed".into()));
    }
    if w.iter().all(|&v| v == 0.0) {
        return Err(Error::NonFinite("logistic direction stayed at zero".into()));
    }
    Ok(LinearModel::from_parts(w, b).with_margin(data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d1(neg: &[f64], pos: &[f64]) -> Dataset {
        Dataset::from_1d(neg, pos).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        assert_abs_diff_eq!(solve_svm_1d(-0.4, 0.6).unwrap().theta, 0.1, epsilon = 1e-15);
        assert_eq!(solve_svm_1d(-1.0, 1.0).unwrap().theta, 0.0);
        let m = solve_svm_1d(0.2, 0.8).unwrap();
        assert_eq!((m.theta, m.b, m.w.clone()), (0.5, -0.5, vec![1.0]));
        assert_abs_diff_eq!(m.margin, 0.3, epsilon = 1e-15);
        assert!(matches!(solve_svm_1d(0.5, 0.5), Err(Error::NotSeparable)));
        assert!(matches!(solve_svm_1d(0.6, 0.5), Err(Error::NotSeparable)));
    }

    #[test]
    fn symmetric_pair() {
        let m = train_hard_svm(&d1(&[-1.0], &[1.0]), 1e-10).unwrap();
        assert_abs_diff_eq!(m.w[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.b, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.margin, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn two_support_vectors_in_the_plane() {
        let rows = vec![
            vec![-1.0, 0.0],
            vec![1.0, 0.0],
            vec![-5.0, 3.0],
            vec![4.0, -7.0],
            vec![6.0, 2.0],
            vec![-3.0, -9.0],
        ];
        let data = Dataset::from_rows(&rows, vec![-1, 1, -1, 1, 1, -1]).unwrap();
        let m = train_hard_svm(&data, 1e-10).unwrap();
        assert_abs_diff_eq!(m.w[0], 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(m.w[1], 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(m.b, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn hard_rejects_overlap() {
        assert!(matches!(
            train_hard_svm(&d1(&[-1.0, 0.3], &[0.1, 2.0]), 1e-10),
            Err(Error::NotSeparable)
        ));
        let rows = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let xor = Dataset::from_rows(&rows, vec![1, 1, -1, -1]).unwrap();
        assert!(matches!(train_hard_svm(&xor, 1e-10), Err(Error::NotSeparable)));
        assert!(!is_separable(&xor));
    }

    #[test]
    fn tiny_margins_are_not_mistaken_for_overlap() {
        // needs sum a = 4 / gap^2 = 1.6e11, past the 1e8 box
        let data = d1(&[-1.0, -0.3], &[-0.3 + 5e-6, 2.0]);
        let m = train_hard_svm(&data, 1e-10).unwrap();
        assert!((m.theta - (-0.3 + 2.5e-6)).abs() < 1e-12);
        assert!((m.w[0] * 5e-6 - 2.0).abs() < 1e-6);

        let rows = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1e-5, 0.0], vec![1e-5, 1.0]];
        let data = Dataset::from_rows(&rows, vec![-1, -1, 1, 1]).unwrap();
        let m = train_hard_svm(&data, 1e-10).unwrap();
        assert!(m.w[1].abs() < 1e-6 * m.w[0]);
    }

    #[test]
    fn separability_examples() {
        assert!(is_separable(&d1(&[-1.0, -0.2], &[0.1, 2.0])));
        assert!(!is_separable(&d1(&[-1.0, 0.3], &[0.1, 2.0])));
        assert!(!is_separable(&d1(&[-1.0, 0.1], &[0.1, 2.0])));
        let rows = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![3.0, 0.0]];
        assert!(is_separable(&Dataset::from_rows(&rows, vec![-1, -1, 1]).unwrap()));
    }

    #[test]
    fn soft_margin_cases() {
        let m = train_soft_svm(&d1(&[-1.0], &[1.0]), 1.0, 1e-10).unwrap();
        assert_abs_diff_eq!(m.w[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.b, 0.0, epsilon = 1e-12);
        let m = train_soft_svm(&d1(&[-1.0], &[1.0]), 50.0, 1e-10).unwrap();
        assert_abs_diff_eq!(m.w[0], 1.0, epsilon = 1e-12);

        let mixed = d1(&[-2.0, 0.5, -0.7], &[1.0, -0.3, 2.2]);
        let m = train_soft_svm(&mixed, 1.0, 1e-10).unwrap();
        assert!(m.w[0].is_finite() && m.b.is_finite());

        let sep = d1(&[-2.0, -0.4, -1.3], &[0.6, 1.9, 0.8]);
        let h = train_hard_svm(&sep, 1e-10).unwrap();
        let s = train_soft_svm(&sep, 1e6, 1e-10).unwrap();
        assert_abs_diff_eq!(h.w[0], s.w[0], epsilon = 1e-4);
        assert_abs_diff_eq!(h.b, s.b, epsilon = 1e-4);
    }

    #[test]
    fn offsets() {
        let data = d1(&[-1.0, -0.4], &[0.6, 3.0]);
        assert_abs_diff_eq!(offset_for_direction(&data, &[1.0]).unwrap(), -0.1, epsilon = 1e-15);
        let b1 = offset_for_direction(&data, &[1.0]).unwrap();
        let b2 = offset_for_direction(&data, &[2.0]).unwrap();
        assert_eq!(b2, 2.0 * b1);
        assert!(matches!(offset_for_direction(&data, &[-1.0]), Err(Error::NotSeparable)));
        assert!(offset_for_direction(&data, &[0.0]).is_err());
    }

    #[test]
    fn logistic_symmetric_pair() {
        let m = train_logistic(&d1(&[-1.0], &[1.0]), 2000, 1.0).unwrap();
        assert!(m.b.abs() < 1e-12);
        assert!(m.w[0] > 1.0);
        assert!(matches!(
            train_logistic(&d1(&[1e200, -3e200], &[1e200, -1e200]), 5, 1.0),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn softplus_is_stable() {
        assert_eq!(softplus(-1000.0), 0.0);
        assert_eq!(softplus(1000.0), 1000.0);
        assert_abs_diff_eq!(softplus(0.0), 2f64.ln(), epsilon = 1e-16);
    }
}
