//! Characterization residuals for symmetric and skewed laws.
//!
//! ```bash
//! cargo run --example verify_symmetry
//! cargo run --example verify_symmetry -- "logistic:mu=1,s=2"
//! ```

use extropy::dist::Distribution;
use extropy::symmetry::verify_characterizations;

fn main() -> extropy::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let descriptors = if args.is_empty() {
        vec!["normal".to_string(), "laplace".into(), "power:theta=2".into(), "pareto:theta=2".into()]
    } else {
        args
    };
    for descriptor in descriptors {
        let law: Distribution = descriptor.parse()?;
        let report = verify_characterizations(&law, 4, 4, 4, 1e-6)?;
        let divergent = report.residuals.iter().filter(|r| r.value.divergence().is_some()).count();
        println!(
            "{law:<28} class {:<13} verdict {:<12} max finite |residual| {:.2e}, {divergent} of {} divergent",
            report.class_c.to_string(),
            report.verdict.to_string(),
            report.max_finite_residual().unwrap_or(f64::NAN),
            report.residuals.len(),
        );
    }
    Ok(())
}
