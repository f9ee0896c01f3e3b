//! Simulated k-records against their analytic law.
//!
//! ```bash
//! cargo run --release --example record_simulation
//! ```

use extropy::dist::{ContinuousLaw, Distribution};
use extropy::records::{ks_distance, simulate_records, RecordLaw, Side, DEFAULT_MAX_DRAWS};

fn main() -> extropy::Result<()> {
    let count = 10_000;
    let critical = 1.63 / (count as f64).sqrt();
    println!("99% KS critical value {critical:.4}");
    for descriptor in ["exponential", "uniform", "normal"] {
        let base: Distribution = descriptor.parse()?;
        for side in [Side::Upper, Side::Lower] {
            for (n, k) in [(1, 1), (2, 2), (3, 1), (3, 3)] {
                let sim = simulate_records(&base, n, k, side, count, 2024, DEFAULT_MAX_DRAWS)?;
                let law = RecordLaw::new(&base, n, k, side)?;
                let ks = ks_distance(&sim.values, |x| law.cdf(x));
                let mean = sim.values.iter().sum::<f64>() / sim.values.len() as f64;
                println!("{base:<14} {side:<5} n={n} k={k}  mean {mean:>8.4}  KS {ks:.4}");
            }
        }
    }
    Ok(())
}
