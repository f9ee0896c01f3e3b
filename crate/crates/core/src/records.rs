//! Laws of the n-th upper and lower k-record values.
//!
//! With `F` the base cdf and `F̄ = 1 - F`, the n-th upper k-record `U(n,k)`
//! has survival function `phi_n(F̄(x))` and the n-th lower k-record `L(n,k)`
//! has cdf `phi_n(F(x))`, where
//!
//! ```text
//! phi_n(u) = u^k * sum_{i<n} (-k ln u)^i / i!  =  P(Poisson(-k ln u) <= n - 1).
//! ```
//!
//! The kernel is evaluated as a Poisson lower tail in log space, so neither
//! `u^k` underflow nor `(-k ln u)^i` overflow can occur.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dist::{ContinuousLaw, Support};
use crate::quad::UnitPoint;
use crate::{Error, Result};

/// Arguments below this evaluate `phi_n` to 0.
pub const PHI_UNDERFLOW: f64 = 1e-300;

/// Per-realization stream length guard of [`simulate_records`].
pub const DEFAULT_MAX_DRAWS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Upper,
    Lower,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Upper => "upper",
            Side::Lower => "lower",
        })
    }
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" => Ok(Side::Upper),
            "lower" => Ok(Side::Lower),
            _ => Err(Error::InvalidArgument(format!("side must be `upper` or `lower`, got `{s}`"))),
        }
    }
}

/// `ln(m!)`; exact products up to 20, `lgamma` beyond.
pub(crate) fn ln_factorial(m: u32) -> f64 {
    if m <= 20 {
        ((2..=m as u64).product::<u64>() as f64).ln()
    } else {
        libm::lgamma(m as f64 + 1.0)
    }
}

/// `P(N <= last)` for `N ~ Poisson(lambda)`, summed in ascending order.
pub fn poisson_lower_tail(last: u32, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 1.0;
    }
    if lambda.is_infinite() {
        return 0.0;
    }
    let ln_lambda = lambda.ln();
    let mut ln_fact = 0.0;
    let mut sum = 0.0;
    for i in 0..=last {
        if i > 0 {
            ln_fact += (i as f64).ln();
        }
        sum += (-lambda + i as f64 * ln_lambda - ln_fact).exp();
    }
    sum.min(1.0)
}

/// `P(N >= first)` for `N ~ Poisson(lambda)`.
pub fn poisson_upper_tail(first: u32, lambda: f64) -> f64 {
    if first == 0 {
        return 1.0;
    }
    if lambda == 0.0 {
        return 0.0;
    }
    if lambda >= first as f64 {
        return 1.0 - poisson_lower_tail(first - 1, lambda);
    }
    // Terms decrease from i = first on since lambda < i.
    let ln_lambda = lambda.ln();
    let mut i = first;
    let mut sum = 0.0;
    loop {
        let term = (-lambda + i as f64 * ln_lambda - ln_factorial(i)).exp();
        sum += term;
        if term <= 1e-17 * sum || i > first + 10_000 {
            return sum.min(1.0);
        }
        i += 1;
    }
}

/// The kernel `phi_n(u) = u^k sum_{i<n} (-k ln u)^i / i!`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhiKernel {
    n: u32,
    k: u32,
}

impl PhiKernel {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidArgument(format!("record index n and order k must be >= 1 (got n={n}, k={k})")));
        }
        Ok(PhiKernel { n, k })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn phi(&self, u: f64) -> Result<f64> {
        Error::check_unit("u", u)?;
        Ok(self.at(UnitPoint::new(u)))
    }

    fn lambda(&self, p: UnitPoint) -> f64 {
        -(self.k as f64) * p.ln_u()
    }

    /// `phi_n(u)` at a unit point.
    pub fn at(&self, p: UnitPoint) -> f64 {
        if p.u < PHI_UNDERFLOW {
            return 0.0;
        }
        if self.n == 1 {
            return p.u.powi(self.k as i32);
        }
        let lambda = self.lambda(p);
        if lambda < self.n as f64 {
            1.0 - poisson_upper_tail(self.n, lambda)
        } else {
            poisson_lower_tail(self.n - 1, lambda)
        }
    }

    /// `1 - phi_n(u)`, without cancellation near `u = 1`.
    pub fn complement_at(&self, p: UnitPoint) -> f64 {
        if p.u < PHI_UNDERFLOW {
            return 1.0;
        }
        poisson_upper_tail(self.n, self.lambda(p))
    }

    /// `d phi_n / du = k^n (-ln u)^(n-1) u^(k-1) / (n-1)!`, the record density
    /// in the probability scale.
    pub fn density_at(&self, p: UnitPoint) -> f64 {
        let (n, k) = (self.n as f64, self.k as f64);
        let ln_u = p.ln_u();
        if p.u == 0.0 {
            return if self.k == 1 && self.n == 1 { 1.0 } else { 0.0 };
        }
        let mut ln_density = n * k.ln() + (k - 1.0) * ln_u - ln_factorial(self.n - 1);
        if self.n > 1 {
            if ln_u == 0.0 {
                return 0.0;
            }
            ln_density += (n - 1.0) * (-ln_u).ln();
        }
        ln_density.exp()
    }
}

/// Law of the n-th upper or lower k-record of an iid sequence from `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordLaw<L> {
    base: L,
    kernel: PhiKernel,
    side: Side,
}

impl<L: ContinuousLaw> RecordLaw<L> {
    pub fn new(base: L, n: u32, k: u32, side: Side) -> Result<Self> {
        Ok(RecordLaw {
            base,
            kernel: PhiKernel::new(n, k)?,
            side,
        })
    }

    pub fn base(&self) -> &L {
        &self.base
    }

    pub fn kernel(&self) -> PhiKernel {
        self.kernel
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// The probability point the kernel is applied to: `F̄(x)` for upper
    /// records, `F(x)` for lower ones.
    fn point(&self, x: f64) -> UnitPoint {
        let (cdf, sf) = (self.base.cdf(x), self.base.sf(x));
        match self.side {
            Side::Upper => UnitPoint { u: sf, comp: cdf },
            Side::Lower => UnitPoint { u: cdf, comp: sf },
        }
    }
}

impl<L: ContinuousLaw> ContinuousLaw for RecordLaw<L> {
    fn support(&self) -> Support {
        self.base.support()
    }

    fn pdf(&self, x: f64) -> f64 {
        if !self.base.support().contains(x) {
            return 0.0;
        }
        let f = self.base.pdf(x);
        if f == 0.0 {
            return 0.0;
        }
        self.kernel.density_at(self.point(x)) * f
    }

    fn cdf(&self, x: f64) -> f64 {
        let p = self.point(x);
        match self.side {
            Side::Upper => self.kernel.complement_at(p),
            Side::Lower => self.kernel.at(p),
        }
    }

    fn sf(&self, x: f64) -> f64 {
        let p = self.point(x);
        match self.side {
            Side::Upper => self.kernel.at(p),
            Side::Lower => self.kernel.complement_at(p),
        }
    }
}

/// Simulated record values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordSample {
    pub values: Vec<f64>,
    /// Realizations abandoned because the stream exceeded the draw limit.
    pub aborted: usize,
}

/// Simulates `count` independent n-th (upper or lower) k-record values by
/// scanning iid streams from `base`.
///
/// Realization `i` draws from ChaCha8 stream `i` of `seed`, so the output
/// does not depend on how realizations are scheduled across threads.
pub fn simulate_records<L: ContinuousLaw + ?Sized>(
    base: &L,
    n: u32,
    k: u32,
    side: Side,
    count: usize,
    seed: u64,
    max_draws: u64,
) -> Result<RecordSample> {
    PhiKernel::new(n, k)?;
    if count == 0 {
        return Err(Error::InvalidArgument("record count must be at least 1".into()));
    }
    if max_draws < k as u64 {
        return Err(Error::InvalidArgument(format!("max_draws must be at least k = {k}")));
    }
    let outcomes: Vec<Option<f64>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut draw = || base.quantile(rng.sample::<f64, _>(Open01));
            // Lower k-records of X are the negated upper k-records of -X.
            match side {
                Side::Upper => scan_upper(&mut draw, n, k, max_draws),
                Side::Lower => scan_upper(&mut || -draw(), n, k, max_draws).map(|x| -x),
            }
        })
        .collect();
    let aborted = outcomes.iter().filter(|o| o.is_none()).count();
    Ok(RecordSample {
        values: outcomes.into_iter().flatten().collect(),
        aborted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Ordered(f64);

impl Eq for Ordered {}

impl PartialOrd for Ordered {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Keeps the k largest values seen; each time the k-th largest changes it
/// is the next upper k-record value.
fn scan_upper(draw: &mut impl FnMut() -> f64, n: u32, k: u32, max_draws: u64) -> Option<f64> {
    let mut top: BinaryHeap<Reverse<Ordered>> = (0..k).map(|_| Reverse(Ordered(draw()))).collect();
    let mut draws = k as u64;
    let mut records = 1;
    while records < n {
        if draws >= max_draws {
            return None;
        }
        let x = draw();
        draws += 1;
        let Reverse(Ordered(kth)) = *top.peek().expect("k >= 1");
        if x > kth {
            top.pop();
            top.push(Reverse(Ordered(x)));
            records += 1;
        }
    }
    top.peek().map(|Reverse(Ordered(v))| *v)
}

/// Kolmogorov-Smirnov distance between a sample and a continuous cdf.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (((i + 1) as f64 / n) - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use crate::quad::{integrate_support, QuadConfig};
    use std::f64::consts::E;

    fn law(s: &str) -> Distribution {
        s.parse().unwrap()
    }

    #[test]
    fn phi_reference_values() {
        assert_eq!(PhiKernel::new(1, 1).unwrap().phi(0.5).unwrap(), 0.5);
        let v = PhiKernel::new(2, 1).unwrap().phi(1.0 / E).unwrap();
        assert!((v - 2.0 / E).abs() < 1e-15);
        assert!((v - 0.735_758_9).abs() < 1e-7);
        let (p2, p3) = (PhiKernel::new(2, 2).unwrap(), PhiKernel::new(3, 2).unwrap());
        let x = p3.phi(0.9).unwrap();
        assert!(x >= p2.phi(0.9).unwrap() && x <= 1.0);
    }

    #[test]
    fn phi_domain_and_arguments() {
        assert!(PhiKernel::new(0, 1).is_err());
        assert!(PhiKernel::new(1, 0).is_err());
        let k = PhiKernel::new(2, 2).unwrap();
        assert!(k.phi(0.0).is_err());
        assert!(k.phi(1.0).is_err());
        assert!(k.phi(f64::NAN).is_err());
        assert_eq!(k.at(UnitPoint::new(1e-301)), 0.0);
    }

    #[test]
    fn phi_matches_direct_sum() {
        for n in 1..=6u32 {
            for k in 1..=6u32 {
                let kernel = PhiKernel::new(n, k).unwrap();
                for u in [0.01, 0.2, 0.5, 0.77, 0.999] {
                    let l: f64 = -(k as f64) * f64::ln(u);
                    let mut term = 1.0;
                    let mut sum = 0.0;
                    for i in 0..n {
                        if i > 0 {
                            term *= l / i as f64;
                        }
                        sum += term;
                    }
                    let direct = u.powi(k as i32) * sum;
                    assert!((kernel.phi(u).unwrap() - direct).abs() < 1e-13);
                    let comp = kernel.complement_at(UnitPoint::new(u));
                    assert!((comp - (1.0 - direct)).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn complement_keeps_relative_precision_near_one() {
        // 1 - phi_1(u) = 1 - u^k ~ k t for u = 1 - t.
        let kernel = PhiKernel::new(1, 3).unwrap();
        let c = kernel.complement_at(UnitPoint::from_comp(1e-12));
        assert!((c / 3e-12 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn phi_is_monotone_and_bounded() {
        for n in 1..=6u32 {
            for k in 1..=6u32 {
                let kernel = PhiKernel::new(n, k).unwrap();
                let mut prev = 0.0;
                for i in 1..=1024 {
                    let v = kernel.phi(i as f64 / 1025.0).unwrap();
                    assert!((0.0..=1.0).contains(&v));
                    assert!(v >= prev, "n={n} k={k} i={i}");
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn density_is_derivative_of_phi() {
        let kernel = PhiKernel::new(3, 2).unwrap();
        for u in [0.1, 0.4, 0.8] {
            let h = 1e-6;
            let numeric = (kernel.phi(u + h).unwrap() - kernel.phi(u - h).unwrap()) / (2.0 * h);
            assert!((numeric - kernel.density_at(UnitPoint::new(u))).abs() < 1e-7);
        }
    }

    #[test]
    fn large_n_uses_log_factorial() {
        assert!((ln_factorial(25) - 58.003_605_222_980_52).abs() < 1e-9);
        assert_eq!(ln_factorial(0), 0.0);
        let kernel = PhiKernel::new(40, 1).unwrap();
        let v = kernel.phi(1e-20).unwrap();
        assert!(v.is_finite() && v > 0.0 && v < 1.0);
    }

    #[test]
    fn record_pdf_and_cdf_reference_values() {
        let expo = law("exponential");
        let u21 = RecordLaw::new(expo, 2, 1, Side::Upper).unwrap();
        assert!((u21.pdf(1.0) - 1.0 / E).abs() < 1e-15);
        assert!((u21.cdf(1.0) - (1.0 - 2.0 / E)).abs() < 1e-15);
        assert_eq!(u21.pdf(-1.0), 0.0);
        assert_eq!(u21.cdf(f64::INFINITY), 1.0);
        assert!((u21.cdf(1e3) - 1.0).abs() < 1e-15);

        let normal = law("normal");
        let first = RecordLaw::new(normal, 1, 1, Side::Upper).unwrap();
        for x in [-2.0, 0.3, 1.7] {
            assert!((first.pdf(x) - normal.pdf(x)).abs() < 1e-15);
            assert!((first.cdf(x) - normal.cdf(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn record_pdf_integrates_to_one() {
        let cfg = QuadConfig::default();
        for base in ["exponential", "uniform", "normal", "pareto:theta=2", "power:theta=0.5"] {
            let d = law(base);
            for (n, k) in [(1, 1), (2, 1), (3, 2), (4, 3)] {
                for side in [Side::Upper, Side::Lower] {
                    let r = RecordLaw::new(d, n, k, side).unwrap();
                    let total = integrate_support(|x| r.pdf(x), d.support().into(), &cfg);
                    assert!((total.value - 1.0).abs() < 1e-7, "{base} n={n} k={k} {side}: {total:?}");
                }
            }
        }
    }

    #[test]
    fn record_cdf_derivative_matches_pdf() {
        for base in ["exponential", "normal", "uniform"] {
            let d = law(base);
            for side in [Side::Upper, Side::Lower] {
                let r = RecordLaw::new(d, 3, 2, side).unwrap();
                for u in [0.1, 0.3, 0.5, 0.7, 0.9] {
                    let x = d.quantile(u);
                    let h = 1e-5 * (1.0 + x.abs());
                    let numeric = (r.cdf(x + h) - r.cdf(x - h)) / (2.0 * h);
                    let pdf = r.pdf(x);
                    assert!((numeric - pdf).abs() <= 1e-5 * pdf.max(1e-3), "{base} {side} x={x}");
                }
            }
        }
    }

    #[test]
    fn upper_lower_duality_for_symmetric_bases() {
        for (base, c) in [("uniform", 0.5), ("normal", 0.0), ("normal:mu=2,sigma=3", 2.0)] {
            let d = law(base);
            for n in 1..=4 {
                for k in 1..=3 {
                    let up = RecordLaw::new(d, n, k, Side::Upper).unwrap();
                    let lo = RecordLaw::new(d, n, k, Side::Lower).unwrap();
                    for t in [0.0, 0.05, 0.2, 0.45] {
                        let t = if base == "uniform" { t } else { 10.0 * t };
                        let s = up.cdf(c + t) + lo.cdf(c - t);
                        assert!((s - 1.0).abs() < 1e-9, "{base} n={n} k={k} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn simulation_is_deterministic_and_validated() {
        let d = law("exponential");
        let a = simulate_records(&d, 2, 2, Side::Upper, 500, 11, DEFAULT_MAX_DRAWS).unwrap();
        let b = simulate_records(&d, 2, 2, Side::Upper, 500, 11, DEFAULT_MAX_DRAWS).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.aborted, 0);
        assert!(simulate_records(&d, 0, 1, Side::Upper, 5, 1, DEFAULT_MAX_DRAWS).is_err());
        assert!(simulate_records(&d, 1, 1, Side::Upper, 0, 1, DEFAULT_MAX_DRAWS).is_err());
    }

    #[test]
    fn first_record_is_a_single_draw() {
        let d = law("uniform");
        let sample = simulate_records(&d, 1, 1, Side::Upper, 10_000, 3, DEFAULT_MAX_DRAWS).unwrap();
        let ks = ks_distance(&sample.values, |x| d.cdf(x));
        assert!(ks < 1.63 / 100.0, "ks = {ks}");
    }

    #[test]
    fn upper_records_of_exponential_are_gamma() {
        let d = law("exponential");
        let sample = simulate_records(&d, 3, 1, Side::Upper, 10_000, 5, DEFAULT_MAX_DRAWS).unwrap();
        let mean = sample.values.iter().sum::<f64>() / sample.values.len() as f64;
        assert!((mean - 3.0).abs() < 3.0 * (3.0f64 / 1e4).sqrt(), "mean = {mean}");
    }

    #[test]
    fn draw_limit_aborts_realizations() {
        let d = law("exponential");
        let sample = simulate_records(&d, 30, 1, Side::Upper, 20, 1, 50).unwrap();
        assert!(sample.aborted > 0);
        assert_eq!(sample.values.len() + sample.aborted, 20);
    }

    #[test]
    fn ks_distance_of_perfect_grid() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((ks_distance(&xs, |x| x) - 0.005).abs() < 1e-12);
    }
}
