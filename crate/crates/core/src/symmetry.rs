//! Symmetry characterizations and an empirical symmetry test.
//!
//! Every comparison between an "upper" functional and its "lower" mirror
//! (crj against cpj, record crj of upper records against record cpj of lower
//! records, and so on) can be folded onto `(0, 1/2)` as
//!
//! ```text
//! delta = c ∫_0^{1/2} w(u) eta(u) du,    eta(u) = 1/f(F^-1(1-u)) - 1/f(F^-1(u)),
//! ```
//!
//! with a weight `w` that depends on the family. `eta` vanishes identically
//! exactly for laws symmetric about some point, so every delta does too.
//! The folded integral often converges where the two functionals diverge
//! individually.
//!
//! | family                  | delta                                  | `c`    | `w(u)`                         |
//! |-------------------------|----------------------------------------|--------|--------------------------------|
//! | `crj_vs_cpj`            | crj - cpj                              | `-1/2` | `2u - 1`                       |
//! | `record_crj_vs_cpj`     | record crj (upper) - record cpj (lower)| `-1/2` | `phi_n(u)^2 - phi_n(1-u)^2`    |
//! | `gcrj_vs_gcpj`          | gcpj - gcrj                            | `+1/2` | `u^m - (1-u)^m`                |
//! | `record_gcrj_vs_gcpj`   | record gcrj (upper) - record gcpj (lower) | `-1/2` | `phi_n(u)^m - phi_n(1-u)^m` |
//! | `crij_vs_cpij`          | crij (upper) - cpij (lower)            | `-1/2` | `u phi_n(u) - (1-u) phi_n(1-u)`|
//!
//! The kij family is the plain difference of the two inaccuracy values.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::dist::{dqf_at, dqf_mirror, ContinuousLaw};
use crate::measures::{serialize_value, MeasureId, MeasureParams, MeasureValue, Measures};
use crate::quad::{integrate_lower_half, QuadConfig, QuadStatus, UnitPoint, DEFAULT_TOL};
use crate::records::{PhiKernel, Side};
use crate::{Error, Result};

/// Default equality tolerance for residuals.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-6;

/// Sign threshold of the class-C check.
pub const CLASS_C_THRESHOLD: f64 = 1e-10;

const CLASS_C_MARGIN: f64 = 1e-4;

/// `eta(u) = 1/dqf(1-u) - 1/dqf(u)`.
pub fn eta<L: ContinuousLaw + ?Sized>(law: &L, u: f64) -> Result<f64> {
    Error::check_unit("u", u)?;
    Ok(eta_at(law, UnitPoint::new(u)))
}

pub fn eta_at<L: ContinuousLaw + ?Sized>(law: &L, p: UnitPoint) -> f64 {
    1.0 / dqf_mirror(law, p) - 1.0 / dqf_at(law, p)
}

/// `eta` sampled on a uniform grid of `(0, 1/2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtaProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// `eta` on `grid_size` equally spaced points of `[delta, 1/2 - delta]`.
pub fn eta_profile<L: ContinuousLaw + ?Sized>(law: &L, grid_size: usize, delta: f64) -> EtaProfile {
    let span = 0.5 - 2.0 * delta;
    let last = grid_size.saturating_sub(1).max(1) as f64;
    let grid: Vec<f64> = (0..grid_size).map(|i| delta + span * i as f64 / last).collect();
    let values = grid.iter().map(|&u| eta_at(law, UnitPoint::new(u))).collect();
    EtaProfile { grid, values }
}

/// Membership in the class of laws whose density-quantile comparison
/// `f(F^-1(1-u))` against `f(F^-1(u))` keeps one direction on `(0, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassC {
    /// `f(F^-1(1-u)) <= f(F^-1(u))`, i.e. `eta >= 0`.
    MemberLeq,
    /// `f(F^-1(1-u)) >= f(F^-1(u))`, i.e. `eta <= 0`.
    MemberGeq,
    /// `eta == 0` on the grid.
    MemberEqual,
    NotMember,
}

impl ClassC {
    pub fn is_member(self) -> bool {
        self != ClassC::NotMember
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassC::MemberLeq => "member_leq",
            ClassC::MemberGeq => "member_geq",
            ClassC::MemberEqual => "member_equal",
            ClassC::NotMember => "not_member",
        }
    }
}

impl fmt::Display for ClassC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Classifies the sign of `eta` on `grid_size >= 64` points of
/// `(1e-4, 1/2 - 1e-4)`.
pub fn class_c_check<L: ContinuousLaw + ?Sized>(law: &L, grid_size: usize) -> Result<ClassC> {
    if grid_size < 64 {
        return Err(Error::InvalidArgument(format!("grid size must be at least 64, got {grid_size}")));
    }
    let profile = eta_profile(law, grid_size, CLASS_C_MARGIN);
    Ok(classify(&profile.values))
}

fn classify(values: &[f64]) -> ClassC {
    let t = CLASS_C_THRESHOLD;
    if values.iter().all(|v| v.abs() <= t) {
        ClassC::MemberEqual
    } else if values.iter().all(|&v| v >= -t) {
        ClassC::MemberLeq
    } else if values.iter().all(|&v| v <= t) {
        ClassC::MemberGeq
    } else {
        ClassC::NotMember
    }
}

/// Characterization families compared by [`verify_characterizations`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    CrjVsCpj,
    RecordCrjVsCpj,
    GcrjVsGcpj,
    RecordGcrjVsGcpj,
    KijUpperVsLower,
    CrijVsCpij,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::CrjVsCpj => "crj_vs_cpj",
            Family::RecordCrjVsCpj => "record_crj_vs_cpj",
            Family::GcrjVsGcpj => "gcrj_vs_gcpj",
            Family::RecordGcrjVsGcpj => "record_gcrj_vs_gcpj",
            Family::KijUpperVsLower => "kij_upper_vs_lower",
            Family::CrijVsCpij => "crij_vs_cpij",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The discrepancies between upper and lower functionals of one law.
#[derive(Debug, Clone, Copy)]
pub struct Characterization<'a, L: ?Sized> {
    law: &'a L,
    cfg: QuadConfig,
}

impl<'a, L: ContinuousLaw + ?Sized> Characterization<'a, L> {
    pub fn new(law: &'a L) -> Self {
        Characterization {
            law,
            cfg: QuadConfig::default(),
        }
    }

    pub fn with_config(law: &'a L, cfg: QuadConfig) -> Self {
        Characterization { law, cfg }
    }

    fn folded(&self, id: MeasureId, params: MeasureParams, scale: f64, weight: impl Fn(UnitPoint) -> f64) -> MeasureValue {
        let law = self.law;
        let q = integrate_lower_half(
            |p| {
                let w = weight(p);
                if w == 0.0 {
                    return 0.0;
                }
                let e = eta_at(law, p);
                if e == 0.0 {
                    0.0
                } else {
                    w * e
                }
            },
            &self.cfg,
        );
        MeasureValue::from_quad(id, params, scale, q)
    }

    /// crj - cpj.
    pub fn delta1(&self) -> MeasureValue {
        self.folded(MeasureId::Delta1, MeasureParams::default(), -0.5, |p| -(p.comp - p.u))
    }

    /// Record crj of the n-th upper k-record minus record cpj of the n-th
    /// lower k-record.
    pub fn delta2(&self, n: u32, k: u32) -> Result<MeasureValue> {
        let kernel = PhiKernel::new(n, k)?;
        Ok(self.folded(MeasureId::Delta2, MeasureParams::record(n, k), -0.5, |p| {
            kernel.at(p).powi(2) - kernel.at(p.reflect()).powi(2)
        }))
    }

    /// gcpj(m) - gcrj(m).
    pub fn delta3(&self, m: u32) -> Result<MeasureValue> {
        check_m(m)?;
        let e = m as i32;
        Ok(self.folded(MeasureId::Delta3, MeasureParams::m(m), 0.5, |p| p.u.powi(e) - p.comp.powi(e)))
    }

    /// Record gcrj(m) of the n-th upper k-record minus record gcpj(m) of the
    /// n-th lower k-record.
    pub fn delta_generalized(&self, n: u32, k: u32, m: u32) -> Result<MeasureValue> {
        check_m(m)?;
        let kernel = PhiKernel::new(n, k)?;
        let e = m as i32;
        Ok(self.folded(MeasureId::DeltaGeneralized, MeasureParams::record(n, k).with_m(m), -0.5, |p| {
            kernel.at(p).powi(e) - kernel.at(p.reflect()).powi(e)
        }))
    }

    /// crij of the n-th upper k-record minus cpij of the n-th lower k-record.
    pub fn delta_crij(&self, n: u32, k: u32) -> Result<MeasureValue> {
        let kernel = PhiKernel::new(n, k)?;
        Ok(self.folded(MeasureId::DeltaCrij, MeasureParams::record(n, k), -0.5, |p| {
            p.u * kernel.at(p) - p.comp * kernel.at(p.reflect())
        }))
    }

    /// kij of the n-th upper record minus kij of the n-th lower record.
    pub fn delta_kij(&self, n: u32) -> Result<MeasureValue> {
        self.delta_kij_order(n, 1)
    }

    /// As [`delta_kij`](Self::delta_kij) for k-records of any order.
    pub fn delta_kij_order(&self, n: u32, k: u32) -> Result<MeasureValue> {
        let m = Measures::with_config(self.law, self.cfg);
        let upper = m.kij_record(n, k, Side::Upper)?;
        let lower = m.kij_record(n, k, Side::Lower)?;
        Ok(difference(MeasureId::DeltaKij, MeasureParams::record(n, k), &upper, &lower))
    }

    /// Evaluates every family over the `(n, k, m)` grid and draws a verdict
    /// at residual tolerance `tol`.
    pub fn verify(&self, max_n: u32, max_k: u32, max_m: u32, tol: f64) -> Result<SymmetryReport>
    where
        L: Sync,
    {
        if max_n == 0 || max_k == 0 || max_m == 0 {
            return Err(Error::InvalidArgument("grid bounds max_n, max_k and max_m must be >= 1".into()));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        let class_c = class_c_check(self.law, 1024)?;

        let mut jobs = vec![Job::Delta1];
        for n in 1..=max_n {
            for k in 1..=max_k {
                jobs.push(Job::Delta2(n, k));
            }
        }
        jobs.extend((1..=max_m).map(Job::Delta3));
        for n in 1..=max_n {
            for k in 1..=max_k {
                for m in 1..=max_m {
                    jobs.push(Job::Generalized(n, k, m));
                }
            }
        }
        for n in 1..=max_n {
            for k in 1..=max_k {
                jobs.push(Job::Kij(n, k));
            }
        }
        for n in 1..=max_n {
            for k in 1..=max_k {
                jobs.push(Job::Crij(n, k));
            }
        }

        let residuals = jobs
            .par_iter()
            .map(|job| self.run(*job))
            .collect::<Result<Vec<_>>>()?;
        let verdict = verdict(&residuals, class_c, tol);
        Ok(SymmetryReport {
            class_c,
            tolerance: tol,
            quad_tol: self.cfg.tol,
            max_n,
            max_k,
            max_m,
            residuals,
            verdict,
        })
    }

    fn run(&self, job: Job) -> Result<Residual> {
        let (family, value) = match job {
            Job::Delta1 => (Family::CrjVsCpj, self.delta1()),
            Job::Delta2(n, k) => (Family::RecordCrjVsCpj, self.delta2(n, k)?),
            Job::Delta3(m) => (Family::GcrjVsGcpj, self.delta3(m)?),
            Job::Generalized(n, k, m) => (Family::RecordGcrjVsGcpj, self.delta_generalized(n, k, m)?),
            Job::Kij(n, k) => (Family::KijUpperVsLower, self.delta_kij_order(n, k)?),
            Job::Crij(n, k) => (Family::CrijVsCpij, self.delta_crij(n, k)?),
        };
        // KIJ equality is only characterizing for ordinary (k = 1) records.
        let in_verdict = !matches!(job, Job::Kij(_, k) if k > 1);
        Ok(Residual {
            family,
            value,
            in_verdict,
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Job {
    Delta1,
    Delta2(u32, u32),
    Delta3(u32),
    Generalized(u32, u32, u32),
    Kij(u32, u32),
    Crij(u32, u32),
}

fn check_m(m: u32) -> Result<()> {
    if m == 0 {
        Err(Error::InvalidArgument("exponent m must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// `a - b` of two functionals, keeping divergence signs.
fn difference(id: MeasureId, params: MeasureParams, a: &MeasureValue, b: &MeasureValue) -> MeasureValue {
    use QuadStatus::*;
    let flip = |s: QuadStatus| match s {
        DivergedPositive => DivergedNegative,
        DivergedNegative => DivergedPositive,
        s => s,
    };
    let (status, diagnostic) = match (a.status, b.status) {
        (NoConvergence, _) => (NoConvergence, a.diagnostic.clone()),
        (_, NoConvergence) => (NoConvergence, b.diagnostic.clone()),
        (Converged, Converged) => (Converged, None),
        (s, Converged) => (s, None),
        (Converged, s) => (flip(s), None),
        (s, t) if s == flip(t) => (s, None),
        _ => (NoConvergence, Some("both functionals diverge with the same sign".into())),
    };
    MeasureValue {
        measure: id,
        params,
        value: a.value - b.value,
        abs_error: a.abs_error + b.abs_error,
        status,
        diagnostic,
    }
}

/// One residual of a characterization family.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub family: Family,
    pub value: MeasureValue,
    /// Whether the residual takes part in the verdict.
    pub in_verdict: bool,
}

impl Residual {
    pub fn params(&self) -> MeasureParams {
        self.value.params
    }
}

impl Serialize for Residual {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Value<'a>(&'a MeasureValue);
        impl Serialize for Value<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                serialize_value(self.0, s)
            }
        }
        let p = self.value.params;
        let mut st = s.serialize_struct("Residual", 8)?;
        st.serialize_field("family", &self.family)?;
        st.serialize_field("n", &p.n)?;
        st.serialize_field("k", &p.k)?;
        st.serialize_field("m", &p.m)?;
        st.serialize_field("residual", &Value(&self.value))?;
        st.serialize_field("status", &self.value.status)?;
        st.serialize_field("in_verdict", &self.in_verdict)?;
        st.serialize_field("diagnostic", &self.value.diagnostic)?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Symmetric,
    Asymmetric,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Symmetric => "symmetric",
            Verdict::Asymmetric => "asymmetric",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Residuals of every characterization family and the resulting verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub class_c: ClassC,
    /// Residual equality tolerance.
    pub tolerance: f64,
    /// Absolute tolerance of each integration.
    pub quad_tol: f64,
    pub max_n: u32,
    pub max_k: u32,
    pub max_m: u32,
    pub residuals: Vec<Residual>,
    pub verdict: Verdict,
}

impl SymmetryReport {
    /// Largest finite residual magnitude taking part in the verdict.
    pub fn max_finite_residual(&self) -> Option<f64> {
        self.residuals
            .iter()
            .filter(|r| r.in_verdict)
            .filter_map(|r| r.value.finite())
            .map(f64::abs)
            .reduce(f64::max)
    }

    pub fn family(&self, family: Family) -> impl Iterator<Item = &Residual> {
        self.residuals.iter().filter(move |r| r.family == family)
    }
}

fn verdict(residuals: &[Residual], class_c: ClassC, tol: f64) -> Verdict {
    let counted: Vec<&Residual> = residuals.iter().filter(|r| r.in_verdict).collect();
    let finite: Vec<f64> = counted.iter().filter_map(|r| r.value.finite()).collect();
    if finite.iter().any(|v| v.abs() >= tol) {
        return Verdict::Asymmetric;
    }
    if finite.is_empty() {
        return Verdict::Inconclusive;
    }
    if counted.iter().any(|r| r.value.divergence().is_some()) {
        return Verdict::Asymmetric;
    }
    if !class_c.is_member() || counted.iter().any(|r| r.value.status == QuadStatus::NoConvergence) {
        return Verdict::Inconclusive;
    }
    Verdict::Symmetric
}

/// Runs [`Characterization::verify`] with integrations at
/// `min(1e-8, tol / 100)`.
pub fn verify_characterizations<L: ContinuousLaw + Sync + ?Sized>(
    law: &L,
    max_n: u32,
    max_k: u32,
    max_m: u32,
    tol: f64,
) -> Result<SymmetryReport> {
    let cfg = QuadConfig::with_tol((tol / 100.0).min(DEFAULT_TOL));
    Characterization::with_config(law, cfg).verify(max_n, max_k, max_m, tol)
}

fn checked_sorted(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.len() < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 observations, got {}", sample.len())));
    }
    if let Some(i) = sample.iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("observation {} is not finite", i + 1)));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    Ok(xs)
}

/// Plug-in cumulative residual extropy `-1/2 Σ (1 - i/n)^2 (x(i+1) - x(i))`.
pub fn empirical_crj(sample: &[f64]) -> Result<f64> {
    let xs = checked_sorted(sample)?;
    Ok(sorted_crj(&xs))
}

/// Plug-in cumulative past extropy `-1/2 Σ (i/n)^2 (x(i+1) - x(i))`.
pub fn empirical_cpj(sample: &[f64]) -> Result<f64> {
    let xs = checked_sorted(sample)?;
    Ok(sorted_cpj(&xs))
}

// The two sums run in mirrored order so that reflecting the sample maps one
// onto the other operation by operation.
fn sorted_crj(xs: &[f64]) -> f64 {
    let n = xs.len();
    let nf = n as f64;
    let mut sum = 0.0;
    for i in (1..n).rev() {
        let w = (n - i) as f64 / nf;
        sum += w * w * (xs[i] - xs[i - 1]);
    }
    -0.5 * sum
}

fn sorted_cpj(xs: &[f64]) -> f64 {
    let n = xs.len();
    let nf = n as f64;
    let mut sum = 0.0;
    for i in 1..n {
        let w = i as f64 / nf;
        sum += w * w * (xs[i] - xs[i - 1]);
    }
    -0.5 * sum
}

/// `cpj - crj` of a sorted sample.
fn statistic(xs: &[f64]) -> f64 {
    sorted_cpj(xs) - sorted_crj(xs)
}

fn median(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

pub const MIN_TEST_SAMPLE: usize = 20;
pub const MIN_REPLICATES: usize = 199;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Reject,
    FailToReject,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Reject => "reject",
            Decision::FailToReject => "fail_to_reject",
        })
    }
}

/// Outcome of [`symmetry_test`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    /// `cpj - crj` of the median-centered sample.
    pub statistic: f64,
    pub center: f64,
    pub sample_size: usize,
    pub bootstrap_replicates: usize,
    /// Replicates with `|T*| >= |T|`.
    pub exceedances: usize,
    pub p_value: f64,
    pub alpha: f64,
    pub decision: Decision,
    pub seed: u64,
}

/// Bootstrap test of symmetry about an unknown center.
///
/// The null distribution of `T = cpj - crj` is approximated by resampling
/// with replacement from the sample reflected about its median,
/// `{x - med} ∪ {med - x}`. Replicate `r` uses ChaCha8 stream `r` of `seed`,
/// and the p-value `(1 + #{|T*| >= |T|}) / (R + 1)` is built from an integer
/// count, so the result does not depend on thread scheduling.
pub fn symmetry_test(sample: &[f64], replicates: usize, alpha: f64, seed: u64) -> Result<TestResult> {
    if sample.len() < MIN_TEST_SAMPLE {
        return Err(Error::InsufficientData(format!(
            "symmetry test needs at least {MIN_TEST_SAMPLE} observations, got {}",
            sample.len()
        )));
    }
    if replicates < MIN_REPLICATES {
        return Err(Error::InvalidArgument(format!(
            "replicates must be at least {MIN_REPLICATES}, got {replicates}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutsideUnitInterval { what: "alpha", value: alpha });
    }
    let sorted = checked_sorted(sample)?;
    if sorted[0] == sorted[sorted.len() - 1] {
        return Err(Error::InvalidArgument("degenerate sample: all observations are equal".into()));
    }
    let center = median(&sorted);
    let centered: Vec<f64> = sorted.iter().map(|x| x - center).collect();
    let t = statistic(&centered);

    let pool: Vec<f64> = centered.iter().flat_map(|&x| [x, -x]).collect();
    let n = sorted.len();
    let exceedances = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let mut resample: Vec<f64> = (0..n).map(|_| pool[rng.random_range(0..pool.len())]).collect();
            resample.sort_by(f64::total_cmp);
            statistic(&resample).abs() >= t.abs()
        })
        .filter(|&hit| hit)
        .count();
    let p_value = (1 + exceedances) as f64 / (replicates + 1) as f64;
    Ok(TestResult {
        statistic: t,
        center,
        sample_size: n,
        bootstrap_replicates: replicates,
        exceedances,
        p_value,
        alpha,
        decision: if p_value < alpha { Decision::Reject } else { Decision::FailToReject },
        seed,
    })
}
