use extropy::dist::{ContinuousLaw, Distribution};
use extropy::records::{ks_distance, simulate_records, PhiKernel, RecordLaw, Side, DEFAULT_MAX_DRAWS};
use proptest::prelude::*;

fn law(s: &str) -> Distribution {
    s.parse().unwrap()
}

#[test]
fn phi_examples() {
    assert_eq!(PhiKernel::new(1, 1).unwrap().phi(0.5).unwrap(), 0.5);
    let v = PhiKernel::new(2, 1).unwrap().phi((-1.0f64).exp()).unwrap();
    assert!((v - 2.0 * (-1.0f64).exp()).abs() < 1e-12);
    let lo = PhiKernel::new(2, 2).unwrap().phi(0.9).unwrap();
    let hi = PhiKernel::new(3, 2).unwrap().phi(0.9).unwrap();
    assert!(lo <= hi && hi <= 1.0);
}

#[test]
fn exponential_second_record() {
    let r = RecordLaw::new(law("exponential"), 2, 1, Side::Upper).unwrap();
    assert!((r.pdf(1.0) - (-1.0f64).exp()).abs() < 1e-12);
    assert!((r.cdf(1.0) - (1.0 - 2.0 * (-1.0f64).exp())).abs() < 1e-12);
    assert_eq!(r.cdf(f64::INFINITY), 1.0);
    assert_eq!(r.pdf(-1.0), 0.0);
}

#[test]
fn first_record_is_the_base_law() {
    for name in ["uniform", "exponential", "normal", "pareto:theta=2"] {
        let d = law(name);
        for side in [Side::Upper, Side::Lower] {
            let r = RecordLaw::new(&d, 1, 1, side).unwrap();
            for u in [0.01, 0.3, 0.5, 0.9] {
                let x = d.quantile(u);
                assert!((r.cdf(x) - d.cdf(x)).abs() < 1e-12, "{name} {side}");
                assert!((r.pdf(x) - d.pdf(x)).abs() < 1e-12 * d.pdf(x).max(1.0), "{name} {side}");
            }
        }
    }
}

#[test]
fn cdf_derivative_matches_pdf() {
    for name in ["exponential", "normal", "uniform", "logistic"] {
        let d = law(name);
        for (n, k) in [(1, 2), (2, 1), (3, 3), (4, 2)] {
            for side in [Side::Upper, Side::Lower] {
                let r = RecordLaw::new(&d, n, k, side).unwrap();
                for i in 1..20 {
                    let x = d.quantile(i as f64 / 20.0);
                    let h = 1e-5 * x.abs().max(1.0);
                    let numeric = (r.cdf(x + h) - r.cdf(x - h)) / (2.0 * h);
                    let exact = r.pdf(x);
                    if exact > 1e-6 {
                        assert!((numeric / exact - 1.0).abs() < 1e-5, "{name} n={n} k={k} {side} x={x}");
                    }
                }
            }
        }
    }
}

#[test]
fn upper_lower_duality_for_symmetric_bases() {
    for (name, c) in [("uniform", 0.5), ("normal", 0.0), ("normal:mu=2,sigma=3", 2.0)] {
        let d = law(name);
        for n in 1..=4 {
            for k in 1..=3 {
                let up = RecordLaw::new(&d, n, k, Side::Upper).unwrap();
                let lo = RecordLaw::new(&d, n, k, Side::Lower).unwrap();
                for t in [0.0, 0.1, 0.3, 0.45, 1.5] {
                    assert!((up.cdf(c + t) + lo.cdf(c - t) - 1.0).abs() < 1e-9, "{name} n={n} k={k} t={t}");
                }
            }
        }
    }
}

#[test]
fn record_pdf_normalizes() {
    use extropy::quad::{integrate_support, QuadConfig};
    for name in ["exponential", "normal", "pareto:theta=3"] {
        let d = law(name);
        for side in [Side::Upper, Side::Lower] {
            let r = RecordLaw::new(&d, 3, 2, side).unwrap();
            let q = integrate_support(|x| r.pdf(x), d.support().into(), &QuadConfig::default());
            assert!((q.value - 1.0).abs() < 1e-7, "{name} {side}: {q:?}");
        }
    }
}

#[test]
fn simulated_lower_records_match_the_law() {
    let critical = 1.63 / 100.0;
    for name in ["exponential", "uniform"] {
        let d = law(name);
        for (n, k) in [(2, 2), (3, 1)] {
            let sim = simulate_records(&d, n, k, Side::Lower, 10_000, 41 + n as u64, DEFAULT_MAX_DRAWS).unwrap();
            let r = RecordLaw::new(&d, n, k, Side::Lower).unwrap();
            let ks = ks_distance(&sim.values, |x| r.cdf(x));
            assert!(ks < critical, "{name} n={n} k={k}: {ks}");
        }
    }
}

#[test]
fn gamma_mean_of_third_exponential_record() {
    let sim = simulate_records(&law("exponential"), 3, 1, Side::Upper, 10_000, 8, DEFAULT_MAX_DRAWS).unwrap();
    let mean = sim.values.iter().sum::<f64>() / 1e4;
    assert!((mean - 3.0).abs() < 3.0 * (3.0f64 / 1e4).sqrt());
}

proptest! {
    #[test]
    fn phi_is_a_monotone_probability(n in 1u32..=6, k in 1u32..=6, a in 1e-6f64..1.0, b in 1e-6f64..1.0) {
        prop_assume!(a < 1.0 && b < 1.0);
        let (u, v) = if a <= b { (a, b) } else { (b, a) };
        let kernel = PhiKernel::new(n, k).unwrap();
        let (pu, pv) = (kernel.phi(u).unwrap(), kernel.phi(v).unwrap());
        prop_assert!((0.0..=1.0).contains(&pu) && (0.0..=1.0).contains(&pv));
        prop_assert!(pu <= pv);
    }

    #[test]
    fn phi_is_nondecreasing_in_n(n in 1u32..=10, k in 1u32..=6, u in 1e-6f64..0.999_999) {
        let a = PhiKernel::new(n, k).unwrap().phi(u).unwrap();
        let b = PhiKernel::new(n + 1, k).unwrap().phi(u).unwrap();
        prop_assert!(a <= b + 1e-15);
    }

    #[test]
    fn simulation_is_deterministic(seed in any::<u64>(), n in 1u32..=3, k in 1u32..=3) {
        let d = law("normal");
        let a = simulate_records(&d, n, k, Side::Upper, 32, seed, DEFAULT_MAX_DRAWS).unwrap();
        let b = simulate_records(&d, n, k, Side::Upper, 32, seed, DEFAULT_MAX_DRAWS).unwrap();
        prop_assert_eq!(a, b);
    }
}
