//! Measures of a law outside the catalog.
//!
//! Only `support`, `pdf` and `cdf` are needed; quantiles and the
//! density-quantile function fall back to numerical inversion.
//!
//! ```bash
//! cargo run --example custom_law
//! ```

use extropy::dist::{ContinuousLaw, Support};
use extropy::measures::Measures;
use extropy::symmetry::{class_c_check, verify_characterizations};

/// Triangular law on `(0, 1)` with mode `c`.
struct Triangular {
    c: f64,
}

impl ContinuousLaw for Triangular {
    fn support(&self) -> Support {
        Support::new(0.0, 1.0)
    }

    fn pdf(&self, x: f64) -> f64 {
        match x {
            x if !(0.0..=1.0).contains(&x) => 0.0,
            x if x < self.c => 2.0 * x / self.c,
            x => 2.0 * (1.0 - x) / (1.0 - self.c),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match x {
            x if x <= 0.0 => 0.0,
            x if x >= 1.0 => 1.0,
            x if x < self.c => x * x / self.c,
            x => 1.0 - (1.0 - x).powi(2) / (1.0 - self.c),
        }
    }
}

fn main() -> extropy::Result<()> {
    for c in [0.5, 0.2] {
        let law = Triangular { c };
        let m = Measures::new(&law);
        let report = verify_characterizations(&law, 2, 2, 2, 1e-6)?;
        println!(
            "triangular(c={c})  extropy {}  crj {}  cpj {}  class {}  verdict {}",
            m.extropy().display_value(),
            m.crj().display_value(),
            m.cpj().display_value(),
            class_c_check(&law, 256)?,
            report.verdict
        );
    }
    Ok(())
}
