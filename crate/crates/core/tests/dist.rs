use extropy::dist::{dqf, sample, ContinuousLaw, Distribution};
use extropy::quad::{integrate_support, QuadConfig};
use proptest::prelude::*;

fn catalog() -> Vec<Distribution> {
    [
        "uniform",
        "uniform:a=-2,b=3",
        "exponential:rate=2.5",
        "power:theta=0.5",
        "power:theta=3",
        "pareto:theta=1.5",
        "normal:mu=1,sigma=2",
        "laplace:mu=-1,b=0.5",
        "logistic:mu=0,s=3",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect()
}

#[test]
fn pdf_integrates_to_one() {
    for d in catalog() {
        let q = integrate_support(|x| d.pdf(x), d.support().into(), &QuadConfig::default());
        assert!(q.is_converged(), "{d}: {q:?}");
        assert!((q.value - 1.0).abs() < 1e-7, "{d}: {}", q.value);
    }
}

#[test]
fn cdf_limits_and_monotonicity() {
    for d in catalog() {
        let s = d.support();
        let lo = if s.lower.is_finite() { s.lower } else { -1e12 };
        let hi = if s.upper.is_finite() { s.upper } else { 1e12 };
        assert!(d.cdf(lo) < 1e-9, "{d}");
        assert!(d.cdf(hi) > 1.0 - 1e-9, "{d}");
        let mut prev = 0.0;
        for i in 0..=1000 {
            let x = d.quantile(0.0005 + 0.999 * i as f64 / 1000.0);
            let f = d.cdf(x);
            assert!(f >= prev, "{d} at {x}");
            prev = f;
        }
    }
}

#[test]
fn spec_descriptor_examples() {
    let u: Distribution = "uniform".parse().unwrap();
    assert_eq!(u.pdf(0.3), 1.0);
    let p: Distribution = "power:theta=2".parse().unwrap();
    assert!((p.pdf(0.4) - 0.8).abs() < 1e-15);
    assert!("power:theta=-1".parse::<Distribution>().is_err());
    assert!((dqf(&p, 0.25).unwrap() - 1.0).abs() < 1e-12);
    assert!(dqf(&p, 0.0).is_err());
}

#[test]
fn sampler_means() {
    let u: Distribution = "uniform".parse().unwrap();
    let xs = sample(&u, 10_000, 99).unwrap();
    assert!((xs.iter().sum::<f64>() / 1e4 - 0.5).abs() < 0.02);
    let e: Distribution = "exponential".parse().unwrap();
    let xs = sample(&e, 10_000, 99).unwrap();
    assert!((xs.iter().sum::<f64>() / 1e4 - 1.0).abs() < 0.04);
    assert_eq!(sample(&e, 64, 5).unwrap(), sample(&e, 64, 5).unwrap());
}

proptest! {
    #[test]
    fn quantile_round_trip(index in 0usize..9, u in 1e-6f64..(1.0 - 1e-6)) {
        let d = &catalog()[index];
        prop_assert!((d.cdf(d.quantile(u)) - u).abs() < 1e-9);
        let x = d.quantile(u);
        let back = d.quantile(d.cdf(x));
        prop_assert!((back - x).abs() <= 1e-9 * x.abs().max(1.0), "{} {} {}", d, x, back);
    }

    #[test]
    fn dqf_is_positive_and_consistent(index in 0usize..9, u in 1e-6f64..(1.0 - 1e-6)) {
        let d = &catalog()[index];
        let v = dqf(d, u).unwrap();
        prop_assert!(v > 0.0);
        let direct = d.pdf(d.quantile(u));
        prop_assert!((v - direct).abs() <= 1e-9 * direct.max(1.0));
        prop_assert!((d.upper_dqf(1.0 - u) - v).abs() <= 1e-8 * v.max(1.0));
    }

    #[test]
    fn power_parameters_round_trip(theta in 0.01f64..100.0) {
        let d = Distribution::power(theta).unwrap();
        let parsed: Distribution = d.to_string().parse().unwrap();
        prop_assert_eq!(parsed, d);
    }
}
