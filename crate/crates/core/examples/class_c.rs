//! The eta profile and class-C membership.
//!
//! ```bash
//! cargo run --example class_c
//! ```

use extropy::dist::Distribution;
use extropy::symmetry::{class_c_check, eta_profile};

fn main() -> extropy::Result<()> {
    for descriptor in ["uniform", "normal", "exponential", "power:theta=2", "power:theta=0.5", "pareto:theta=2"] {
        let law: Distribution = descriptor.parse()?;
        let class = class_c_check(&law, 1024)?;
        let profile = eta_profile(&law, 5, 0.05);
        let shown: Vec<String> = profile.values.iter().map(|v| format!("{v:+.3}")).collect();
        println!("{law:<18} {class:<13} eta at {:?}: {}", profile.grid, shown.join(" "));
    }
    Ok(())
}
