//! Continuous laws and the density-quantile function.
//!
//! Every law exposes two quantile-side primitives: [`ContinuousLaw::dqf`]
//! evaluates `f(F^-1(u))` accurately for small `u`, and
//! [`ContinuousLaw::upper_dqf`] evaluates `f(F^-1(1 - v))` accurately for
//! small `v`. Integrands on `(0, 1)` pick whichever side keeps full precision
//! near the endpoint they approach.
//!
//! Descriptor grammar accepted by [`Distribution::from_str`]:
//!
//! ```text
//! descriptor := name | name ":" assignment ("," assignment)*
//! assignment := key "=" decimal
//! ```
//!
//! Keys are case-sensitive, every key may appear at most once, omitted keys
//! take their default. Decimals use Rust float syntax, so `2`, `0.5`, `-1e-3`
//! are all accepted.
//!
//! | name          | keys (defaults)        | support        |
//! |---------------|------------------------|----------------|
//! | `uniform`     | `a=0`, `b=1`           | `(a, b)`       |
//! | `exponential` | `rate=1`               | `(0, inf)`     |
//! | `power`       | `theta=1`              | `(0, 1)`       |
//! | `pareto`      | `theta=1`              | `(1, inf)`     |
//! | `normal`      | `mu=0`, `sigma=1`      | `(-inf, inf)`  |
//! | `laplace`     | `mu=0`, `b=1`          | `(-inf, inf)`  |
//! | `logistic`    | `mu=0`, `s=1`          | `(-inf, inf)`  |

use std::f64::consts::{LN_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::quad::UnitPoint;
use crate::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Open or closed interval; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lower: f64,
    pub upper: f64,
}

impl Support {
    pub const fn new(lower: f64, upper: f64) -> Self {
        Support { lower, upper }
    }

    pub const fn real_line() -> Self {
        Support::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }

    pub fn is_finite(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }
}

/// A continuous law on the real line.
///
/// Only `support`, `pdf` and `cdf` are required. Everything else has a
/// generic fallback: quantiles are found by bracketed Newton-bisection on the
/// cdf (or on the survival function for the upper quantile), and the
/// density-quantile functions compose `pdf` with the matching quantile.
pub trait ContinuousLaw: Send + Sync {
    fn support(&self) -> Support;

    fn pdf(&self, x: f64) -> f64;

    fn cdf(&self, x: f64) -> f64;

    /// Survival function `1 - F(x)`.
    fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// `F^-1(u)` for `u` in `(0, 1)`.
    fn quantile(&self, u: f64) -> f64 {
        invert_monotone(self, u, Tail::Lower)
    }

    /// `F^-1(1 - v)`, accurate when `v` is small.
    fn upper_quantile(&self, v: f64) -> f64 {
        invert_monotone(self, v, Tail::Upper)
    }

    /// Density-quantile function `f(F^-1(u))`.
    fn dqf(&self, u: f64) -> f64 {
        self.pdf(self.quantile(u))
    }

    /// `f(F^-1(1 - v))`, accurate when `v` is small.
    fn upper_dqf(&self, v: f64) -> f64 {
        self.pdf(self.upper_quantile(v))
    }
}

impl<L: ContinuousLaw + ?Sized> ContinuousLaw for &L {
    fn support(&self) -> Support {
        (**self).support()
    }
    fn pdf(&self, x: f64) -> f64 {
        (**self).pdf(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        (**self).cdf(x)
    }
    fn sf(&self, x: f64) -> f64 {
        (**self).sf(x)
    }
    fn quantile(&self, u: f64) -> f64 {
        (**self).quantile(u)
    }
    fn upper_quantile(&self, v: f64) -> f64 {
        (**self).upper_quantile(v)
    }
    fn dqf(&self, u: f64) -> f64 {
        (**self).dqf(u)
    }
    fn upper_dqf(&self, v: f64) -> f64 {
        (**self).upper_dqf(v)
    }
}

/// Checked density-quantile function.
pub fn dqf<L: ContinuousLaw + ?Sized>(law: &L, u: f64) -> Result<f64> {
    Error::check_unit("u", u)?;
    Ok(law.dqf(u))
}

/// `f(F^-1(u))` at a unit point, taking the accurate side of the pair.
pub fn dqf_at<L: ContinuousLaw + ?Sized>(law: &L, p: UnitPoint) -> f64 {
    if p.u <= 0.5 {
        law.dqf(p.u)
    } else {
        law.upper_dqf(p.comp)
    }
}

/// `f(F^-1(1 - u))` at a unit point.
pub fn dqf_mirror<L: ContinuousLaw + ?Sized>(law: &L, p: UnitPoint) -> f64 {
    dqf_at(law, p.reflect())
}

/// Draws `count` iid values by inverse transform from a seeded ChaCha8 stream.
pub fn sample<L: ContinuousLaw + ?Sized>(law: &L, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| law.quantile(rng.sample::<f64, _>(Open01)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tail {
    Lower,
    Upper,
}

const INVERT_TOL: f64 = 1e-12;
const INVERT_MAX_ITER: usize = 200;

/// Solves `cdf(x) = p` (lower tail) or `sf(x) = p` (upper tail) by
/// bracketed Newton iteration with bisection fallback.
fn invert_monotone<L: ContinuousLaw + ?Sized>(law: &L, p: f64, tail: Tail) -> f64 {
    if !(p > 0.0 && p < 1.0) {
        return f64::NAN;
    }
    // g is increasing in x for both tails after the sign flip.
    let g = |x: f64| match tail {
        Tail::Lower => law.cdf(x) - p,
        Tail::Upper => p - law.sf(x),
    };
    let support = law.support();
    let (mut lo, mut hi) = bracket(&g, support);
    let mut x = if lo.is_finite() && hi.is_finite() {
        0.5 * (lo + hi)
    } else {
        return f64::NAN;
    };
    for _ in 0..INVERT_MAX_ITER {
        let gx = g(x);
        if gx == 0.0 {
            return x;
        }
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = law.pdf(x);
        let newton = x - gx / slope;
        let next = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= INVERT_TOL * (1.0 + x.abs()) || hi - lo <= INVERT_TOL * (1.0 + x.abs()) {
            return next;
        }
        x = next;
    }
    x
}

fn bracket(g: &impl Fn(f64) -> f64, support: Support) -> (f64, f64) {
    let anchor = match (support.lower.is_finite(), support.upper.is_finite()) {
        (true, true) => return (support.lower, support.upper),
        (true, false) => support.lower,
        (false, true) => support.upper,
        (false, false) => 0.0,
    };
    let mut lo = if support.lower.is_finite() { support.lower } else { anchor - 1.0 };
    let mut hi = if support.upper.is_finite() { support.upper } else { anchor + 1.0 };
    let mut width = 1.0;
    while !support.lower.is_finite() && g(lo) > 0.0 && width < 1e300 {
        width *= 2.0;
        lo = anchor - width;
    }
    width = 1.0;
    while !support.upper.is_finite() && g(hi) < 0.0 && width < 1e300 {
        width *= 2.0;
        hi = anchor + width;
    }
    (lo, hi)
}

/// Standard normal quantile: Acklam's rational approximation refined by one
/// Halley step against `erfc`.
#[allow(clippy::excessive_precision)]
pub fn std_normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_690e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    if p > 0.5 {
        return -std_normal_quantile_lower(1.0 - p);
    }
    return std_normal_quantile_lower(p);

    fn tail(p: f64) -> f64 {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }

    // p in (0, 0.5]
    fn std_normal_quantile_lower(p: f64) -> f64 {
        let x = if p < P_LOW {
            tail(p)
        } else {
            let q = p - 0.5;
            let r = q * q;
            (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
                / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
        };
        if x < -37.0 {
            return x;
        }
        let e = std_normal_cdf(x) - p;
        let u = e * SQRT_2PI * (0.5 * x * x).exp();
        x - u / (1.0 + 0.5 * x * u)
    }
}

pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

pub fn std_normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// The analytic catalog.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
    Power { theta: f64 },
    Pareto { theta: f64 },
    Normal { mu: f64, sigma: f64 },
    Laplace { mu: f64, b: f64 },
    Logistic { mu: f64, s: f64 },
}

impl Distribution {
    pub const NAMES: [&'static str; 7] = [
        "uniform",
        "exponential",
        "power",
        "pareto",
        "normal",
        "laplace",
        "logistic",
    ];

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        finite("a", a)?;
        finite("b", b)?;
        if a >= b {
            return Err(Error::Parameter {
                name: "b".into(),
                value: b,
                reason: "must exceed a",
            });
        }
        Ok(Distribution::Uniform { a, b })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        positive("rate", rate)?;
        Ok(Distribution::Exponential { rate })
    }

    pub fn power(theta: f64) -> Result<Self> {
        positive("theta", theta)?;
        Ok(Distribution::Power { theta })
    }

    pub fn pareto(theta: f64) -> Result<Self> {
        positive("theta", theta)?;
        Ok(Distribution::Pareto { theta })
    }

    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        finite("mu", mu)?;
        positive("sigma", sigma)?;
        Ok(Distribution::Normal { mu, sigma })
    }

    pub fn laplace(mu: f64, b: f64) -> Result<Self> {
        finite("mu", mu)?;
        positive("b", b)?;
        Ok(Distribution::Laplace { mu, b })
    }

    pub fn logistic(mu: f64, s: f64) -> Result<Self> {
        finite("mu", mu)?;
        positive("s", s)?;
        Ok(Distribution::Logistic { mu, s })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Distribution::Uniform { .. } => "uniform",
            Distribution::Exponential { .. } => "exponential",
            Distribution::Power { .. } => "power",
            Distribution::Pareto { .. } => "pareto",
            Distribution::Normal { .. } => "normal",
            Distribution::Laplace { .. } => "laplace",
            Distribution::Logistic { .. } => "logistic",
        }
    }

    /// Named parameters in canonical order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Distribution::Uniform { a, b } => vec![("a", a), ("b", b)],
            Distribution::Exponential { rate } => vec![("rate", rate)],
            Distribution::Power { theta } | Distribution::Pareto { theta } => vec![("theta", theta)],
            Distribution::Normal { mu, sigma } => vec![("mu", mu), ("sigma", sigma)],
            Distribution::Laplace { mu, b } => vec![("mu", mu), ("b", b)],
            Distribution::Logistic { mu, s } => vec![("mu", mu), ("s", s)],
        }
    }

    /// The law of `factor * X`.
    pub fn scaled(self, factor: f64) -> Result<Scaled<Self>> {
        Scaled::new(self, factor)
    }
}

fn finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter {
            name: name.into(),
            value,
            reason: "must be finite",
        })
    }
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter {
            name: name.into(),
            value,
            reason: "must be positive and finite",
        })
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        for (i, (key, value)) in self.params().into_iter().enumerate() {
            let sep = if i == 0 { ':' } else { ',' };
            write!(f, "{sep}{key}={value}")?;
        }
        Ok(())
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(descriptor: &str) -> Result<Self> {
        let malformed = |reason: String| Error::Descriptor {
            descriptor: descriptor.to_string(),
            reason,
        };
        let (name, rest) = match descriptor.split_once(':') {
            Some((name, rest)) => (name, Some(rest)),
            None => (descriptor, None),
        };
        let keys: &[(&str, f64)] = match name {
            "uniform" => &[("a", 0.0), ("b", 1.0)],
            "exponential" => &[("rate", 1.0)],
            "power" | "pareto" => &[("theta", 1.0)],
            "normal" => &[("mu", 0.0), ("sigma", 1.0)],
            "laplace" => &[("mu", 0.0), ("b", 1.0)],
            "logistic" => &[("mu", 0.0), ("s", 1.0)],
            _ => return Err(Error::UnknownDistribution(name.to_string())),
        };
        let mut values: Vec<f64> = keys.iter().map(|(_, v)| *v).collect();
        let mut seen = vec![false; keys.len()];
        if let Some(rest) = rest {
            if rest.is_empty() {
                return Err(malformed("empty parameter list after `:`".into()));
            }
            for assignment in rest.split(',') {
                let (key, raw) = assignment
                    .split_once('=')
                    .ok_or_else(|| malformed(format!("`{assignment}` is not of the form key=value")))?;
                let slot = keys
                    .iter()
                    .position(|(k, _)| *k == key)
                    .ok_or_else(|| malformed(format!("unknown parameter `{key}` for {name}")))?;
                if std::mem::replace(&mut seen[slot], true) {
                    return Err(malformed(format!("parameter `{key}` given twice")));
                }
                values[slot] = raw
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| malformed(format!("`{raw}` is not a decimal number")))?;
            }
        }
        match name {
            "uniform" => Distribution::uniform(values[0], values[1]),
            "exponential" => Distribution::exponential(values[0]),
            "power" => Distribution::power(values[0]),
            "pareto" => Distribution::pareto(values[0]),
            "normal" => Distribution::normal(values[0], values[1]),
            "laplace" => Distribution::laplace(values[0], values[1]),
            _ => Distribution::logistic(values[0], values[1]),
        }
    }
}

impl ContinuousLaw for Distribution {
    fn support(&self) -> Support {
        match *self {
            Distribution::Uniform { a, b } => Support::new(a, b),
            Distribution::Exponential { .. } => Support::new(0.0, f64::INFINITY),
            Distribution::Power { .. } => Support::new(0.0, 1.0),
            Distribution::Pareto { .. } => Support::new(1.0, f64::INFINITY),
            Distribution::Normal { .. } | Distribution::Laplace { .. } | Distribution::Logistic { .. } => {
                Support::real_line()
            }
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        if !self.support().contains(x) {
            return 0.0;
        }
        match *self {
            Distribution::Uniform { a, b } => 1.0 / (b - a),
            Distribution::Exponential { rate } => rate * (-rate * x).exp(),
            Distribution::Power { theta } => theta * x.powf(theta - 1.0),
            Distribution::Pareto { theta } => theta * x.powf(-theta - 1.0),
            Distribution::Normal { mu, sigma } => std_normal_pdf((x - mu) / sigma) / sigma,
            Distribution::Laplace { mu, b } => 0.5 * (-(x - mu).abs() / b).exp() / b,
            Distribution::Logistic { mu, s } => {
                let e = (-((x - mu) / s).abs()).exp();
                e / (s * (1.0 + e) * (1.0 + e))
            }
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        let Support { lower, upper } = self.support();
        if x <= lower {
            return 0.0;
        }
        if x >= upper {
            return 1.0;
        }
        match *self {
            Distribution::Uniform { a, b } => (x - a) / (b - a),
            Distribution::Exponential { rate } => -(-rate * x).exp_m1(),
            Distribution::Power { theta } => x.powf(theta),
            Distribution::Pareto { theta } => -(-theta * x.ln()).exp_m1(),
            Distribution::Normal { mu, sigma } => std_normal_cdf((x - mu) / sigma),
            Distribution::Laplace { mu, b } => {
                let z = (x - mu) / b;
                if z < 0.0 {
                    0.5 * z.exp()
                } else {
                    1.0 - 0.5 * (-z).exp()
                }
            }
            Distribution::Logistic { mu, s } => 1.0 / (1.0 + (-(x - mu) / s).exp()),
        }
    }

    fn sf(&self, x: f64) -> f64 {
        let Support { lower, upper } = self.support();
        if x <= lower {
            return 1.0;
        }
        if x >= upper {
            return 0.0;
        }
        match *self {
            Distribution::Uniform { a, b } => (b - x) / (b - a),
            Distribution::Exponential { rate } => (-rate * x).exp(),
            Distribution::Power { theta } => -(theta * x.ln()).exp_m1(),
            Distribution::Pareto { theta } => x.powf(-theta),
            Distribution::Normal { mu, sigma } => std_normal_cdf(-(x - mu) / sigma),
            Distribution::Laplace { mu, b } => {
                let z = (x - mu) / b;
                if z > 0.0 {
                    0.5 * (-z).exp()
                } else {
                    1.0 - 0.5 * z.exp()
                }
            }
            Distribution::Logistic { mu, s } => 1.0 / (1.0 + ((x - mu) / s).exp()),
        }
    }

    fn quantile(&self, u: f64) -> f64 {
        match *self {
            Distribution::Uniform { a, b } => a + u * (b - a),
            Distribution::Exponential { rate } => -(-u).ln_1p() / rate,
            Distribution::Power { theta } => u.powf(1.0 / theta),
            Distribution::Pareto { theta } => (-(-u).ln_1p() / theta).exp(),
            Distribution::Normal { mu, sigma } => mu + sigma * std_normal_quantile(u),
            Distribution::Laplace { mu, b } => laplace_quantile(mu, b, u),
            Distribution::Logistic { mu, s } => mu + s * (u.ln() - (-u).ln_1p()),
        }
    }

    fn upper_quantile(&self, v: f64) -> f64 {
        match *self {
            Distribution::Uniform { a, b } => b - v * (b - a),
            Distribution::Exponential { rate } => -v.ln() / rate,
            Distribution::Power { theta } => ((-v).ln_1p() / theta).exp(),
            Distribution::Pareto { theta } => v.powf(-1.0 / theta),
            Distribution::Normal { mu, sigma } => mu - sigma * std_normal_quantile(v),
            Distribution::Laplace { mu, b } => 2.0 * mu - laplace_quantile(mu, b, v),
            Distribution::Logistic { mu, s } => mu + s * ((-v).ln_1p() - v.ln()),
        }
    }

    fn dqf(&self, u: f64) -> f64 {
        match *self {
            Distribution::Uniform { a, b } => 1.0 / (b - a),
            Distribution::Exponential { rate } => rate * (1.0 - u),
            Distribution::Power { theta } => theta * u.powf((theta - 1.0) / theta),
            Distribution::Pareto { theta } => theta * ((theta + 1.0) / theta * (-u).ln_1p()).exp(),
            Distribution::Normal { sigma, .. } => std_normal_pdf(std_normal_quantile(u)) / sigma,
            Distribution::Laplace { b, .. } => u.min(1.0 - u) / b,
            Distribution::Logistic { s, .. } => u * (1.0 - u) / s,
        }
    }

    fn upper_dqf(&self, v: f64) -> f64 {
        match *self {
            Distribution::Uniform { a, b } => 1.0 / (b - a),
            Distribution::Exponential { rate } => rate * v,
            Distribution::Power { theta } => theta * ((theta - 1.0) / theta * (-v).ln_1p()).exp(),
            Distribution::Pareto { theta } => theta * v.powf((theta + 1.0) / theta),
            // Normal, Laplace and logistic quantiles are odd about the centre.
            Distribution::Normal { .. } | Distribution::Laplace { .. } | Distribution::Logistic { .. } => {
                self.dqf(v)
            }
        }
    }
}

fn laplace_quantile(mu: f64, b: f64, u: f64) -> f64 {
    if u <= 0.5 {
        mu + b * (u.ln() + LN_2)
    } else {
        mu - b * ((-u).ln_1p() + LN_2)
    }
}

/// The law of `factor * X` for `factor > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled<L> {
    inner: L,
    factor: f64,
}

impl<L: ContinuousLaw> Scaled<L> {
    pub fn new(inner: L, factor: f64) -> Result<Self> {
        positive("factor", factor)?;
        Ok(Scaled { inner, factor })
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn inner(&self) -> &L {
        &self.inner
    }
}

impl<L: ContinuousLaw> ContinuousLaw for Scaled<L> {
    fn support(&self) -> Support {
        let s = self.inner.support();
        Support::new(s.lower * self.factor, s.upper * self.factor)
    }
    fn pdf(&self, x: f64) -> f64 {
        self.inner.pdf(x / self.factor) / self.factor
    }
    fn cdf(&self, x: f64) -> f64 {
        self.inner.cdf(x / self.factor)
    }
    fn sf(&self, x: f64) -> f64 {
        self.inner.sf(x / self.factor)
    }
    fn quantile(&self, u: f64) -> f64 {
        self.factor * self.inner.quantile(u)
    }
    fn upper_quantile(&self, v: f64) -> f64 {
        self.factor * self.inner.upper_quantile(v)
    }
    fn dqf(&self, u: f64) -> f64 {
        self.inner.dqf(u) / self.factor
    }
    fn upper_dqf(&self, v: f64) -> f64 {
        self.inner.upper_dqf(v) / self.factor
    }
}
