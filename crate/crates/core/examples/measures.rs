//! Extropy-type measures of a few catalog laws.
//!
//! ```bash
//! cargo run --example measures
//! ```

use extropy::dist::Distribution;
use extropy::measures::Measures;
use extropy::records::Side;

fn main() -> extropy::Result<()> {
    for descriptor in ["uniform", "exponential:rate=1", "power:theta=2", "pareto:theta=2", "normal"] {
        let law: Distribution = descriptor.parse()?;
        let m = Measures::new(&law);
        println!("{law}");
        println!("  extropy            {}", m.extropy().display_value());
        println!("  crj / cpj          {} / {}", m.crj().display_value(), m.cpj().display_value());
        println!("  gcrj(3) / gcpj(3)  {} / {}", m.gcrj(3)?.display_value(), m.gcpj(3)?.display_value());
        println!(
            "  record crj U(2,1) / cpj L(2,1)  {} / {}",
            m.record_crj_upper(2, 1)?.display_value(),
            m.record_cpj_lower(2, 1)?.display_value()
        );
        println!(
            "  kij U(2,1) / L(2,1)  {} / {}",
            m.kij_record(2, 1, Side::Upper)?.display_value(),
            m.kij_record(2, 1, Side::Lower)?.display_value()
        );
        println!("  crij U(1,2)        {}", m.crij_upper(1, 2)?.display_value());
    }
    Ok(())
}
