//! Extropy-type functionals.
//!
//! Each functional is evaluated in its quantile form, an integral over
//! `(0, 1)` whose integrand is built from the density-quantile function.
//! The `*_support` variants integrate the defining expression over the
//! support instead and serve as an independent cross-check.
//!
//! | measure         | quantile form                                   |
//! |-----------------|-------------------------------------------------|
//! | extropy         | `-1/2 ∫ f(F^-1(u)) du`                          |
//! | gcrj(m)         | `-1/2 ∫ u^m / f(F^-1(1-u)) du`                  |
//! | gcpj(m)         | `-1/2 ∫ u^m / f(F^-1(u)) du`                    |
//! | record gcrj     | `-1/2 ∫ phi_n(u)^m / f(F^-1(1-u)) du`           |
//! | record gcpj     | `-1/2 ∫ phi_n(u)^m / f(F^-1(u)) du`             |
//! | kij (upper)     | `-1/2 ∫ phi_n'(u) f(F^-1(1-u)) du`              |
//! | crij / cpij     | `-1/2 ∫ u phi_n(u) / f(F^-1(1-u or u)) du`      |
//!
//! crj and cpj are the `m = 2` cases. A divergent integral is returned as a
//! signed divergence marker, never as a large finite number.

use std::fmt;
use std::str::FromStr;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::dist::{dqf_at, dqf_mirror, ContinuousLaw};
use crate::quad::{integrate_support, integrate_unit, QuadConfig, QuadResult, QuadStatus, UnitPoint};
use crate::records::{PhiKernel, RecordLaw, Side};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureId {
    Extropy,
    Crj,
    Cpj,
    Gcrj,
    Gcpj,
    RecordCrj,
    RecordCpj,
    RecordGcrj,
    RecordGcpj,
    Kij,
    Crij,
    Cpij,
    /// crj - cpj.
    Delta1,
    /// Record crj of upper minus record cpj of lower records.
    Delta2,
    /// gcpj - gcrj.
    Delta3,
    /// Record gcrj of upper minus record gcpj of lower records.
    DeltaGeneralized,
    /// kij of upper minus kij of lower records.
    DeltaKij,
    /// crij of upper minus cpij of lower records.
    DeltaCrij,
}

impl MeasureId {
    pub const ALL: [MeasureId; 18] = [
        MeasureId::Extropy,
        MeasureId::Crj,
        MeasureId::Cpj,
        MeasureId::Gcrj,
        MeasureId::Gcpj,
        MeasureId::RecordCrj,
        MeasureId::RecordCpj,
        MeasureId::RecordGcrj,
        MeasureId::RecordGcpj,
        MeasureId::Kij,
        MeasureId::Crij,
        MeasureId::Cpij,
        MeasureId::Delta1,
        MeasureId::Delta2,
        MeasureId::Delta3,
        MeasureId::DeltaGeneralized,
        MeasureId::DeltaKij,
        MeasureId::DeltaCrij,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureId::Extropy => "extropy",
            MeasureId::Crj => "crj",
            MeasureId::Cpj => "cpj",
            MeasureId::Gcrj => "gcrj",
            MeasureId::Gcpj => "gcpj",
            MeasureId::RecordCrj => "record_crj",
            MeasureId::RecordCpj => "record_cpj",
            MeasureId::RecordGcrj => "record_gcrj",
            MeasureId::RecordGcpj => "record_gcpj",
            MeasureId::Kij => "kij",
            MeasureId::Crij => "crij",
            MeasureId::Cpij => "cpij",
            MeasureId::Delta1 => "delta1",
            MeasureId::Delta2 => "delta2",
            MeasureId::Delta3 => "delta3",
            MeasureId::DeltaGeneralized => "delta_generalized",
            MeasureId::DeltaKij => "delta_kij",
            MeasureId::DeltaCrij => "delta_crij",
        }
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MeasureId::ALL.into_iter().find(|id| id.name() == s).ok_or_else(|| {
            let names: Vec<&str> = MeasureId::ALL.iter().map(|id| id.name()).collect();
            Error::InvalidArgument(format!("unknown measure `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

/// Record index `n`, record order `k`, exponent `m` and record side, where
/// the functional uses them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct MeasureParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
}

impl MeasureParams {
    pub fn m(m: u32) -> Self {
        MeasureParams {
            m: Some(m),
            ..Default::default()
        }
    }

    pub fn record(n: u32, k: u32) -> Self {
        MeasureParams {
            n: Some(n),
            k: Some(k),
            ..Default::default()
        }
    }

    pub fn with_m(mut self, m: u32) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = Some(side);
        self
    }
}

/// Sign of a divergent functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Divergence {
    Positive,
    Negative,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Divergence::Positive => "divergent(+)",
            Divergence::Negative => "divergent(-)",
        })
    }
}

/// Value of a functional together with the quadrature outcome behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureValue {
    pub measure: MeasureId,
    pub params: MeasureParams,
    /// Finite value, `±inf` when divergent, or the last estimate when the
    /// integration did not converge.
    pub value: f64,
    pub abs_error: f64,
    pub status: QuadStatus,
    pub diagnostic: Option<String>,
}

impl MeasureValue {
    /// `scale * ∫`, flipping the divergence sign for negative scales.
    pub(crate) fn from_quad(measure: MeasureId, params: MeasureParams, scale: f64, q: QuadResult) -> Self {
        let status = match q.status {
            QuadStatus::DivergedPositive if scale < 0.0 => QuadStatus::DivergedNegative,
            QuadStatus::DivergedNegative if scale < 0.0 => QuadStatus::DivergedPositive,
            s => s,
        };
        MeasureValue {
            measure,
            params,
            value: scale * q.value,
            abs_error: scale.abs() * q.abs_error_estimate,
            status,
            diagnostic: q.diagnostic,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// The value when the integral converged.
    pub fn finite(&self) -> Option<f64> {
        (self.status == QuadStatus::Converged).then_some(self.value)
    }

    pub fn divergence(&self) -> Option<Divergence> {
        match self.status {
            QuadStatus::DivergedPositive => Some(Divergence::Positive),
            QuadStatus::DivergedNegative => Some(Divergence::Negative),
            _ => None,
        }
    }

    pub fn is_converged(&self) -> bool {
        self.status == QuadStatus::Converged
    }

    /// `value` rendered for reports: the number, `divergent(±)` or `failed`.
    pub fn display_value(&self) -> String {
        match (self.status, self.divergence()) {
            (_, Some(d)) => d.to_string(),
            (QuadStatus::Converged, _) => format!("{}", self.value),
            _ => "failed".to_string(),
        }
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} [{}]", self.measure, self.display_value(), self.status)
    }
}

/// Serializes `value` as a JSON number, the string `divergent(+)` /
/// `divergent(-)`, or `null` when the integration failed.
pub(crate) fn serialize_value<S: Serializer>(v: &MeasureValue, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.divergence() {
        Some(d) => s.serialize_str(&d.to_string()),
        None if v.is_converged() => s.serialize_f64(v.value),
        None => s.serialize_none(),
    }
}

impl Serialize for MeasureValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Value<'a>(&'a MeasureValue);
        impl Serialize for Value<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                serialize_value(self.0, s)
            }
        }
        let mut st = s.serialize_struct("MeasureValue", 6)?;
        st.serialize_field("measure", &self.measure)?;
        st.serialize_field("params", &self.params)?;
        st.serialize_field("value", &Value(self))?;
        st.serialize_field("abs_error", &(self.abs_error.is_finite().then_some(self.abs_error)))?;
        st.serialize_field("status", &self.status)?;
        st.serialize_field("diagnostic", &self.diagnostic)?;
        st.end()
    }
}

/// `num / den`, with a zero numerator winning over a vanishing denominator.
#[inline]
pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Evaluator of the extropy-type functionals of one law.
#[derive(Debug, Clone, Copy)]
pub struct Measures<'a, L: ?Sized> {
    law: &'a L,
    cfg: QuadConfig,
}

fn check_m(m: u32) -> Result<()> {
    if m == 0 {
        Err(Error::InvalidArgument("exponent m must be >= 1".into()))
    } else {
        Ok(())
    }
}

impl<'a, L: ContinuousLaw + ?Sized> Measures<'a, L> {
    pub fn new(law: &'a L) -> Self {
        Measures {
            law,
            cfg: QuadConfig::default(),
        }
    }

    pub fn with_config(law: &'a L, cfg: QuadConfig) -> Self {
        Measures { law, cfg }
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.cfg.tol = tol;
        self
    }

    pub fn config(&self) -> &QuadConfig {
        &self.cfg
    }

    fn unit(&self, id: MeasureId, params: MeasureParams, f: impl Fn(UnitPoint) -> f64) -> MeasureValue {
        MeasureValue::from_quad(id, params, -0.5, integrate_unit(f, &self.cfg))
    }

    fn over_support(&self, id: MeasureId, params: MeasureParams, f: impl Fn(f64) -> f64) -> MeasureValue {
        let q = integrate_support(f, self.law.support().into(), &self.cfg);
        MeasureValue::from_quad(id, params, -0.5, q)
    }

    /// `J(X) = -1/2 ∫ f^2` over the support.
    pub fn extropy(&self) -> MeasureValue {
        let law = self.law;
        self.over_support(MeasureId::Extropy, MeasureParams::default(), |x| {
            let f = law.pdf(x);
            f * f
        })
    }

    /// `J(X) = -1/2 ∫_0^1 f(F^-1(u)) du`.
    pub fn extropy_quantile(&self) -> MeasureValue {
        let law = self.law;
        self.unit(MeasureId::Extropy, MeasureParams::default(), |p| dqf_at(law, p))
    }

    pub fn crj(&self) -> MeasureValue {
        self.generalized(MeasureId::Crj, MeasureParams::default(), 2, Side::Upper)
    }

    pub fn cpj(&self) -> MeasureValue {
        self.generalized(MeasureId::Cpj, MeasureParams::default(), 2, Side::Lower)
    }

    pub fn gcrj(&self, m: u32) -> Result<MeasureValue> {
        check_m(m)?;
        Ok(self.generalized(MeasureId::Gcrj, MeasureParams::m(m), m, Side::Upper))
    }

    pub fn gcpj(&self, m: u32) -> Result<MeasureValue> {
        check_m(m)?;
        Ok(self.generalized(MeasureId::Gcpj, MeasureParams::m(m), m, Side::Lower))
    }

    fn generalized(&self, id: MeasureId, params: MeasureParams, m: u32, side: Side) -> MeasureValue {
        let law = self.law;
        let m = m as i32;
        match side {
            Side::Upper => self.unit(id, params, |p| ratio(p.u.powi(m), dqf_mirror(law, p))),
            Side::Lower => self.unit(id, params, |p| ratio(p.u.powi(m), dqf_at(law, p))),
        }
    }

    pub fn crj_support(&self) -> MeasureValue {
        self.gcrj_support(2).expect("m = 2")
    }

    pub fn cpj_support(&self) -> MeasureValue {
        self.gcpj_support(2).expect("m = 2")
    }

    /// `-1/2 ∫ F̄^m` over the support.
    pub fn gcrj_support(&self, m: u32) -> Result<MeasureValue> {
        check_m(m)?;
        let law = self.law;
        let id = if m == 2 { MeasureId::Crj } else { MeasureId::Gcrj };
        let params = if m == 2 { MeasureParams::default() } else { MeasureParams::m(m) };
        Ok(self.over_support(id, params, |x| law.sf(x).powi(m as i32)))
    }

    /// `-1/2 ∫ F^m` over the support.
    pub fn gcpj_support(&self, m: u32) -> Result<MeasureValue> {
        check_m(m)?;
        let law = self.law;
        let id = if m == 2 { MeasureId::Cpj } else { MeasureId::Gcpj };
        let params = if m == 2 { MeasureParams::default() } else { MeasureParams::m(m) };
        Ok(self.over_support(id, params, |x| law.cdf(x).powi(m as i32)))
    }

    /// Cumulative residual extropy of the n-th upper k-record.
    pub fn record_crj_upper(&self, n: u32, k: u32) -> Result<MeasureValue> {
        self.record_generalized(MeasureId::RecordCrj, MeasureParams::record(n, k).with_side(Side::Upper), 2)
    }

    /// Cumulative past extropy of the n-th lower k-record.
    pub fn record_cpj_lower(&self, n: u32, k: u32) -> Result<MeasureValue> {
        self.record_generalized(MeasureId::RecordCpj, MeasureParams::record(n, k).with_side(Side::Lower), 2)
    }

    pub fn record_gcrj_upper(&self, n: u32, k: u32, m: u32) -> Result<MeasureValue> {
        check_m(m)?;
        let params = MeasureParams::record(n, k).with_m(m).with_side(Side::Upper);
        self.record_generalized(MeasureId::RecordGcrj, params, m)
    }

    pub fn record_gcpj_lower(&self, n: u32, k: u32, m: u32) -> Result<MeasureValue> {
        check_m(m)?;
        let params = MeasureParams::record(n, k).with_m(m).with_side(Side::Lower);
        self.record_generalized(MeasureId::RecordGcpj, params, m)
    }

    fn record_generalized(&self, id: MeasureId, params: MeasureParams, m: u32) -> Result<MeasureValue> {
        let kernel = PhiKernel::new(params.n.unwrap_or(1), params.k.unwrap_or(1))?;
        let law = self.law;
        let m = m as i32;
        Ok(match params.side {
            Some(Side::Lower) => self.unit(id, params, |p| ratio(kernel.at(p).powi(m), dqf_at(law, p))),
            _ => self.unit(id, params, |p| ratio(kernel.at(p).powi(m), dqf_mirror(law, p))),
        })
    }

    /// Support form: `-1/2 ∫ F̄_U^m` (upper) or `-1/2 ∫ F_L^m` (lower).
    pub fn record_generalized_support(&self, n: u32, k: u32, m: u32, side: Side) -> Result<MeasureValue> {
        check_m(m)?;
        let record = RecordLaw::new(self.law, n, k, side)?;
        let m_exp = m as i32;
        let (id, params) = match (side, m) {
            (Side::Upper, 2) => (MeasureId::RecordCrj, MeasureParams::record(n, k).with_side(side)),
            (Side::Lower, 2) => (MeasureId::RecordCpj, MeasureParams::record(n, k).with_side(side)),
            (Side::Upper, _) => (MeasureId::RecordGcrj, MeasureParams::record(n, k).with_m(m).with_side(side)),
            (Side::Lower, _) => (MeasureId::RecordGcpj, MeasureParams::record(n, k).with_m(m).with_side(side)),
        };
        Ok(match side {
            Side::Upper => self.over_support(id, params, |x| record.sf(x).powi(m_exp)),
            Side::Lower => self.over_support(id, params, |x| record.cdf(x).powi(m_exp)),
        })
    }

    /// Inaccuracy extropy `KIJ(R, X) = -1/2 ∫ f_R f` between the n-th
    /// k-record `R` on `side` and the base law.
    pub fn kij_record(&self, n: u32, k: u32, side: Side) -> Result<MeasureValue> {
        let kernel = PhiKernel::new(n, k)?;
        let law = self.law;
        let params = MeasureParams::record(n, k).with_side(side);
        Ok(match side {
            Side::Upper => self.unit(MeasureId::Kij, params, |p| kernel.density_at(p) * dqf_mirror(law, p)),
            Side::Lower => self.unit(MeasureId::Kij, params, |p| kernel.density_at(p) * dqf_at(law, p)),
        })
    }

    pub fn kij_record_support(&self, n: u32, k: u32, side: Side) -> Result<MeasureValue> {
        let record = RecordLaw::new(self.law, n, k, side)?;
        let law = self.law;
        let params = MeasureParams::record(n, k).with_side(side);
        Ok(self.over_support(MeasureId::Kij, params, |x| {
            let f = law.pdf(x);
            if f == 0.0 {
                0.0
            } else {
                record.pdf(x) * f
            }
        }))
    }

    /// `CRIJ(U, X) = -1/2 ∫ F̄_U F̄` for the n-th upper k-record `U`.
    pub fn crij_upper(&self, n: u32, k: u32) -> Result<MeasureValue> {
        let kernel = PhiKernel::new(n, k)?;
        let law = self.law;
        let params = MeasureParams::record(n, k).with_side(Side::Upper);
        Ok(self.unit(MeasureId::Crij, params, |p| ratio(p.u * kernel.at(p), dqf_mirror(law, p))))
    }

    /// `CPIJ(L, X) = -1/2 ∫ F_L F` for the n-th lower k-record `L`.
    pub fn cpij_lower(&self, n: u32, k: u32) -> Result<MeasureValue> {
        let kernel = PhiKernel::new(n, k)?;
        let law = self.law;
        let params = MeasureParams::record(n, k).with_side(Side::Lower);
        Ok(self.unit(MeasureId::Cpij, params, |p| ratio(p.u * kernel.at(p), dqf_at(law, p))))
    }

    pub fn crij_upper_support(&self, n: u32, k: u32) -> Result<MeasureValue> {
        let record = RecordLaw::new(self.law, n, k, Side::Upper)?;
        let law = self.law;
        let params = MeasureParams::record(n, k).with_side(Side::Upper);
        Ok(self.over_support(MeasureId::Crij, params, |x| record.sf(x) * law.sf(x)))
    }

    pub fn cpij_lower_support(&self, n: u32, k: u32) -> Result<MeasureValue> {
        let record = RecordLaw::new(self.law, n, k, Side::Lower)?;
        let law = self.law;
        let params = MeasureParams::record(n, k).with_side(Side::Lower);
        Ok(self.over_support(MeasureId::Cpij, params, |x| record.cdf(x) * law.cdf(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use std::f64::consts::PI;

    fn law(s: &str) -> &'static Distribution {
        Box::leak(Box::new(s.parse().unwrap()))
    }

    fn close(v: &MeasureValue, expected: f64, tol: f64) {
        assert!(v.is_converged(), "{v:?}");
        assert!((v.value - expected).abs() < tol, "{v:?} expected {expected}");
    }

    #[test]
    fn extropy_reference_values() {
        close(&Measures::new(law("uniform")).extropy(), -0.5, 1e-10);
        close(&Measures::new(law("exponential")).extropy(), -0.25, 1e-9);
        close(&Measures::new(law("normal")).extropy(), -1.0 / (4.0 * PI.sqrt()), 1e-9);
        close(&Measures::new(law("normal")).extropy_quantile(), -1.0 / (4.0 * PI.sqrt()), 1e-8);
    }

    #[test]
    fn unbounded_density_extropy_diverges() {
        // f = x^{-1/2}/2 on (0, 1): ∫ f^2 diverges logarithmically.
        let v = Measures::new(law("power:theta=0.5")).extropy();
        assert_eq!(v.divergence(), Some(Divergence::Negative));
    }

    #[test]
    fn crj_cpj_reference_values() {
        let u = law("uniform");
        close(&Measures::new(&u).crj(), -1.0 / 6.0, 1e-10);
        close(&Measures::new(&u).cpj(), -1.0 / 6.0, 1e-10);
        let e = law("exponential");
        close(&Measures::new(&e).crj(), -0.25, 1e-9);
        assert_eq!(Measures::new(&e).cpj().divergence(), Some(Divergence::Negative));
        let p = law("power:theta=2");
        close(&Measures::new(&p).crj(), -4.0 / 15.0, 1e-9);
        close(&Measures::new(&p).cpj(), -0.1, 1e-9);
    }

    #[test]
    fn generalized_reference_values() {
        let e = Measures::new(law("exponential")).gcrj(3).unwrap();
        close(&e, -1.0 / 6.0, 1e-9);
        let u = law("uniform");
        for m in 1..=6 {
            let expected = -1.0 / (2.0 * (m as f64 + 1.0));
            close(&Measures::new(&u).gcrj(m).unwrap(), expected, 1e-10);
            close(&Measures::new(&u).gcpj(m).unwrap(), expected, 1e-10);
        }
        assert!(Measures::new(&u).gcrj(0).is_err());
    }

    #[test]
    fn record_measures_reference_values() {
        let u = Measures::new(law("uniform"));
        close(&u.record_crj_upper(2, 1).unwrap(), -17.0 / 54.0, 1e-9);
        close(&u.record_cpj_lower(2, 1).unwrap(), -17.0 / 54.0, 1e-9);
        assert!(u.record_crj_upper(0, 1).is_err());
        assert!(u.record_gcrj_upper(1, 1, 0).is_err());
    }

    #[test]
    fn normal_record_measures_diverge_on_both_sides() {
        let n = Measures::new(law("normal"));
        let up = n.record_crj_upper(2, 2).unwrap();
        let lo = n.record_cpj_lower(2, 2).unwrap();
        assert_eq!(up.divergence(), Some(Divergence::Negative));
        assert_eq!(lo.divergence(), Some(Divergence::Negative));
    }

    #[test]
    fn kij_reference_values() {
        let u = Measures::new(law("uniform"));
        for (n, k) in [(1, 1), (2, 1), (3, 2), (5, 4)] {
            for side in [Side::Upper, Side::Lower] {
                close(&u.kij_record(n, k, side).unwrap(), -0.5, 1e-9);
            }
        }
        let e = Measures::new(law("exponential"));
        close(&e.kij_record(1, 1, Side::Upper).unwrap(), -0.25, 1e-9);
        close(&e.kij_record(1, 1, Side::Lower).unwrap(), -0.25, 1e-9);
        // -1/2 ∫ (-ln u) u du and -1/2 ∫ (-ln u)(1 - u) du.
        close(&e.kij_record(2, 1, Side::Upper).unwrap(), -0.125, 1e-9);
        close(&e.kij_record(2, 1, Side::Lower).unwrap(), -0.375, 1e-9);
    }

    #[test]
    fn crij_reference_values() {
        let u = Measures::new(law("uniform"));
        close(&u.crij_upper(1, 2).unwrap(), -0.125, 1e-10);
        close(&u.cpij_lower(1, 2).unwrap(), -0.125, 1e-10);
    }

    #[test]
    fn serializes_divergence_marker() {
        let v = Measures::new(law("exponential")).cpj();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["value"], "divergent(-)");
        assert_eq!(json["status"], "diverged_negative");
        let v = Measures::new(law("exponential")).crj();
        let json = serde_json::to_value(&v).unwrap();
        assert!((json["value"].as_f64().unwrap() + 0.25).abs() < 1e-9);
    }
}
