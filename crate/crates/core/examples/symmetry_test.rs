//! Bootstrap symmetry test on simulated data, with a small size/power study.
//!
//! ```bash
//! cargo run --release --example symmetry_test
//! ```

use extropy::dist::{sample, Distribution};
use extropy::symmetry::{empirical_cpj, empirical_crj, symmetry_test, Decision};

fn main() -> extropy::Result<()> {
    let normal: Distribution = "normal".parse()?;
    let exponential: Distribution = "exponential".parse()?;

    for (name, law) in [("normal", &normal), ("exponential", &exponential)] {
        let xs = sample(law, 200, 7)?;
        let r = symmetry_test(&xs, 999, 0.05, 7)?;
        println!(
            "{name:<12} crj {:.4}  cpj {:.4}  T {:+.4}  p {:.3}  {}",
            empirical_crj(&xs)?,
            empirical_cpj(&xs)?,
            r.statistic,
            r.p_value,
            r.decision
        );
    }

    let runs = 100;
    for (name, law) in [("normal", &normal), ("exponential", &exponential)] {
        let mut rejected = 0;
        for r in 0..runs {
            let xs = sample(law, 200, 10_000 + r)?;
            if symmetry_test(&xs, 499, 0.05, r)?.decision == Decision::Reject {
                rejected += 1;
            }
        }
        println!("{name:<12} rejection rate over {runs} runs: {:.2}", rejected as f64 / runs as f64);
    }
    Ok(())
}
