//! Class-conditional noise families and their extreme-value behaviour.
//!
//! Four symmetric families are supported: uniform, Gaussian, Laplace and the
//! two-sided Fréchet law
//!
//! ```text
//! F(x) = 1/2 + 1/2 exp(-((x - mu)/s)^-alpha)   x >= mu
//!      = 1/2 - 1/2 exp(-((mu - x)/s)^-alpha)   x <  mu
//! ```
//!
//! Sampling is by inverse transform only, so `sample` and `cdf` agree by
//! construction and a stream state fully determines the draws.
//!
//! # Normalizing constants
//!
//! [`evt_constants`] computes `(a_n, b_n)` from the tail function
//! `U(t) = F^-1(1 - 1/t)` with the Fisher–Tippett–Gnedenko rules
//! (Fréchet: `a_n = U(n), b_n = 0`; reverse Weibull: `a_n = x_F - U(n),
//! b_n = x_F`; Gumbel: `a_n = g(U(n)), b_n = U(n)`), and normalizes maxima as
//! `(M_n - b_n) / a_n`. The textbook asymptotic sequences are reported next to
//! the exact ones in [`AsymptoticConstants`] and are never substituted for
//! them. Two of the commonly quoted asymptotic pairs disagree with the exact
//! rule and are kept verbatim for comparison:
//!
//! * uniform on `[-1/2, 1/2]`: the quoted pair `a_n = 1/2 - 1/n, b_n = 1/2`
//!   uses `U(n)` as the scale. The exact scale is `x_F - U(n) = 1/n`; only the
//!   latter makes the normalized maxima converge (see the FTG tests).
//! * two-sided Fréchet: the quoted scale `n^(1/alpha)` is `2^(1/alpha)` times
//!   the exact `U(n) ~ (n/2)^(1/alpha)`, because only half of the mass lies in
//!   the upper tail.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quad;
use crate::rng::open01;
use crate::special::{normal_cdf, normal_quantile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Uniform,
    Gaussian,
    Laplace,
    #[serde(rename = "frechet")]
    TwoSidedFrechet,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Uniform,
        Family::Gaussian,
        Family::Laplace,
        Family::TwoSidedFrechet,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::Gaussian => "gaussian",
            Family::Laplace => "laplace",
            Family::TwoSidedFrechet => "frechet",
        }
    }

    pub fn tail_type(&self) -> TailType {
        match self {
            Family::Uniform => TailType::Weibull,
            Family::Gaussian | Family::Laplace => TailType::Gumbel,
            Family::TwoSidedFrechet => TailType::Frechet,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Family::Uniform),
            "gaussian" | "normal" => Ok(Family::Gaussian),
            "laplace" => Ok(Family::Laplace),
            "frechet" | "two-sided-frechet" => Ok(Family::TwoSidedFrechet),
            other => Err(Error::Parse(format!("unknown family '{other}'"))),
        }
    }
}

/// One symmetric class-conditional law.
///
/// `scale` is the half-width for the uniform family, the standard deviation
/// for the Gaussian and the scale parameter otherwise. `alpha` is only read by
/// the Fréchet family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub family: Family,
    pub mu: f64,
    pub scale: f64,
    pub alpha: f64,
}

impl DistributionSpec {
    pub fn new(family: Family, mu: f64, scale: f64, alpha: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(invalid(format!("mu must be finite, got {mu}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid(format!("scale must be positive, got {scale}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self { family, mu, scale, alpha })
    }

    pub fn uniform(mu: f64, half_width: f64) -> Self {
        Self::new(Family::Uniform, mu, half_width, 1.0).expect("valid uniform")
    }

    pub fn gaussian(mu: f64, sd: f64) -> Self {
        Self::new(Family::Gaussian, mu, sd, 1.0).expect("valid gaussian")
    }

    pub fn laplace(mu: f64, scale: f64) -> Self {
        Self::new(Family::Laplace, mu, scale, 1.0).expect("valid laplace")
    }

    pub fn frechet(mu: f64, alpha: f64) -> Self {
        Self::new(Family::TwoSidedFrechet, mu, 1.0, alpha).expect("valid frechet")
    }

    /// The same law shifted to be centered at zero.
    pub fn centered(&self) -> Self {
        Self { mu: 0.0, ..*self }
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        Self { mu, ..*self }
    }

    /// CDF of the standardized law `(X - mu) / scale`.
    fn std_cdf(&self, z: f64) -> f64 {
        match self.family {
            Family::Uniform => (0.5 * (z + 1.0)).clamp(0.0, 1.0),
            Family::Gaussian => normal_cdf(z),
            Family::Laplace => {
                if z < 0.0 {
                    0.5 * z.exp()
                } else {
                    1.0 - 0.5 * (-z).exp()
                }
            }
            Family::TwoSidedFrechet => {
                if z >= 0.0 {
                    0.5 + 0.5 * (-z.powf(-self.alpha)).exp()
                } else {
                    // 1/2 - 1/2 e^{-s} without cancellation
                    -0.5 * (-(-z).powf(-self.alpha)).exp_m1()
                }
            }
        }
    }

    /// Lower-half standardized quantile, `p` in (0, 1/2].
    fn std_lower_quantile(&self, p: f64) -> f64 {
        match self.family {
            Family::Uniform => 2.0 * p - 1.0,
            Family::Gaussian => normal_quantile(p),
            Family::Laplace => (2.0 * p).ln(),
            Family::TwoSidedFrechet => -(-(-2.0 * p).ln_1p()).powf(-1.0 / self.alpha),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.std_cdf((x - self.mu) / self.scale)
    }

    /// Survival function `1 - F(x)`, computed from the mirrored lower tail.
    pub fn sf(&self, x: f64) -> f64 {
        self.std_cdf((self.mu - x) / self.scale)
    }

    /// Generalized inverse of the CDF for `p` in (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!("quantile level must lie in (0, 1), got {p}")));
        }
        Ok(self.quantile_unchecked(p))
    }

    #[inline]
    fn quantile_unchecked(&self, p: f64) -> f64 {
        if p <= 0.5 {
            self.mu + self.scale * self.std_lower_quantile(p)
        } else {
            self.mu - self.scale * self.std_lower_quantile(1.0 - p)
        }
    }

    /// Upper quantile `F^-1(1 - q)` for `q` in (0, 1), accurate for tiny `q`.
    pub fn upper_quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid(format!("tail probability must lie in (0, 1), got {q}")));
        }
        Ok(if q <= 0.5 {
            self.mu - self.scale * self.std_lower_quantile(q)
        } else {
            self.quantile_unchecked(1.0 - q)
        })
    }

    /// Right endpoint `x_F = sup{x : F(x) < 1}`.
    pub fn right_endpoint(&self) -> Endpoint {
        match self.family {
            Family::Uniform => Endpoint::Finite(self.mu + self.scale),
            _ => Endpoint::Infinite,
        }
    }

    /// One draw by inverse transform.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile_unchecked(open01(rng))
    }

    /// `count` i.i.d. draws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.draw(rng)).collect()
    }

    /// Maximum of `count` draws, consuming the stream exactly as
    /// [`sample`](Self::sample) would. The quantile map is monotone, so only
    /// the largest uniform needs transforming.
    pub fn sample_max<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Option<f64> {
        let mut best: Option<f64> = None;
        for _ in 0..count {
            let u = open01(rng);
            best = Some(best.map_or(u, |b: f64| b.max(u)));
        }
        best.map(|u| self.quantile_unchecked(u))
    }
}

/// Evaluate `F` at `x`.
pub fn cdf(spec: &DistributionSpec, x: f64) -> f64 {
    spec.cdf(x)
}

/// Evaluate `F^-1` at `p`.
pub fn quantile(spec: &DistributionSpec, p: f64) -> Result<f64> {
    spec.quantile(p)
}

/// `count` i.i.d. draws from `spec`.
pub fn sample<R: Rng + ?Sized>(spec: &DistributionSpec, rng: &mut R, count: usize) -> Vec<f64> {
    spec.sample(rng, count)
}

/// Tail function `U(t) = F^-1(1 - 1/t)` for `t > 1`.
pub fn tail_function(spec: &DistributionSpec, t: f64) -> Result<f64> {
    if !(t > 1.0) {
        return Err(invalid(format!("tail function needs t > 1, got {t}")));
    }
    spec.upper_quantile(1.0 / t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TailType {
    Frechet,
    Weibull,
    Gumbel,
}

/// Right endpoint of a support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Finite(f64),
    Infinite,
}

impl Endpoint {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Endpoint::Finite(v) => Some(*v),
            Endpoint::Infinite => None,
        }
    }
}

/// One of the three extreme-value limit laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitLaw {
    pub tail_type: TailType,
    pub alpha: f64,
}

impl LimitLaw {
    pub fn gumbel() -> Self {
        Self { tail_type: TailType::Gumbel, alpha: 1.0 }
    }

    pub fn frechet(alpha: f64) -> Self {
        Self { tail_type: TailType::Frechet, alpha }
    }

    pub fn reverse_weibull(alpha: f64) -> Self {
        Self { tail_type: TailType::Weibull, alpha }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.tail_type {
            TailType::Gumbel => (-(-x).exp()).exp(),
            TailType::Frechet => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-x.powf(-self.alpha)).exp()
                }
            }
            TailType::Weibull => {
                if x >= 0.0 {
                    1.0
                } else {
                    (-(-x).powf(self.alpha)).exp()
                }
            }
        }
    }

    /// Inverse CDF for `u` in (0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        let e = -u.ln();
        match self.tail_type {
            TailType::Gumbel => -e.ln(),
            TailType::Frechet => e.powf(-1.0 / self.alpha),
            TailType::Weibull => -e.powf(1.0 / self.alpha),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(open01(rng))
    }
}

/// Closed-form large-`n` sequences as commonly quoted for each family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    pub a_n: f64,
    pub b_n: f64,
}

/// Normalizing constants for the maximum of `n` centered draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvtNormalization {
    pub n: u64,
    pub tail_type: TailType,
    pub alpha: f64,
    pub a_n: f64,
    pub b_n: f64,
    pub x_f: Endpoint,
    pub asymptotic: AsymptoticConstants,
}

/// Which constant pair to use when a caller needs `(a_n, b_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantSet {
    Exact,
    Asymptotic,
}

impl EvtNormalization {
    pub fn limit_law(&self) -> LimitLaw {
        LimitLaw { tail_type: self.tail_type, alpha: self.alpha }
    }

    pub fn limit_cdf(&self, x: f64) -> f64 {
        self.limit_law().cdf(x)
    }

    pub fn sample_limit<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.limit_law().sample(rng)
    }

    pub fn constants(&self, set: ConstantSet) -> (f64, f64) {
        match set {
            ConstantSet::Exact => (self.a_n, self.b_n),
            ConstantSet::Asymptotic => (self.asymptotic.a_n, self.asymptotic.b_n),
        }
    }

    /// `(M_n - b_n) / a_n`.
    pub fn normalize(&self, maximum: f64, set: ConstantSet) -> f64 {
        let (a, b) = self.constants(set);
        (maximum - b) / a
    }
}

/// Gumbel auxiliary `g(t) = ∫_t^{x_F} (1 - F(u)) du / (1 - F(t))`.
///
/// Laplace tails are exponential beyond the center, where `g` is exactly the
/// scale; everything else goes through adaptive quadrature.
pub fn gumbel_auxiliary(spec: &DistributionSpec, t: f64) -> Result<f64> {
    if spec.family == Family::Laplace && t >= spec.mu {
        return Ok(spec.scale);
    }
    gumbel_auxiliary_by_quadrature(spec, t)
}

/// [`gumbel_auxiliary`] evaluated purely by quadrature (absolute error ≤ 1e-10).
pub fn gumbel_auxiliary_by_quadrature(spec: &DistributionSpec, t: f64) -> Result<f64> {
    let tail = spec.sf(t);
    if !(tail > 0.0) {
        return Err(invalid(format!("t = {t} is at or beyond the right endpoint")));
    }
    if spec.family == Family::TwoSidedFrechet && spec.alpha <= 1.0 {
        return Err(Error::Unsupported(
            "mean excess is infinite for alpha <= 1".to_string(),
        ));
    }
    let ratio = |u: f64| spec.sf(u) / tail;
    let (value, _err) = match spec.right_endpoint() {
        Endpoint::Finite(xf) => quad::integrate(ratio, t, xf, 1e-12),
        Endpoint::Infinite => quad::integrate_to_infinity(ratio, t, 1e-12),
    };
    Ok(value)
}

fn asymptotic_constants(spec: &DistributionSpec, n: f64, u_n: f64) -> AsymptoticConstants {
    let s = spec.scale;
    match spec.family {
        // printed uniform pair, kept verbatim; see module docs
        Family::Uniform => AsymptoticConstants { a_n: u_n, b_n: s },
        Family::Laplace => AsymptoticConstants { a_n: s, b_n: s * n.ln() },
        Family::Gaussian => {
            let r = (2.0 * n.ln()).sqrt();
            let b = r - (n.ln().ln() + (4.0 * std::f64::consts::PI).ln()) / (2.0 * r);
            AsymptoticConstants { a_n: s / r, b_n: s * b }
        }
        Family::TwoSidedFrechet => AsymptoticConstants {
            a_n: s * n.powf(1.0 / spec.alpha),
            b_n: 0.0,
        },
    }
}

/// Normalizing constants for maxima of `n` draws from the centered version of
/// `spec`.
pub fn evt_constants(spec: &DistributionSpec, n: u64) -> Result<EvtNormalization> {
    if n < 2 {
        return Err(invalid(format!("evt constants need n >= 2, got {n}")));
    }
    let c = spec.centered();
    let nf = n as f64;
    let u_n = tail_function(&c, nf)?;
    let x_f = c.right_endpoint();
    let (tail_type, alpha, a_n, b_n) = match c.family {
        Family::Uniform => {
            let xf = x_f.finite().expect("uniform support is bounded");
            (TailType::Weibull, 1.0, xf - u_n, xf)
        }
        Family::Gaussian | Family::Laplace => {
            (TailType::Gumbel, 1.0, gumbel_auxiliary(&c, u_n)?, u_n)
        }
        Family::TwoSidedFrechet => (TailType::Frechet, c.alpha, u_n, 0.0),
    };
    Ok(EvtNormalization {
        n,
        tail_type,
        alpha,
        a_n,
        b_n,
        x_f,
        asymptotic: asymptotic_constants(&c, nf, u_n),
    })
}
