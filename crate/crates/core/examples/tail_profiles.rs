//! Tail-norm profiles of the registered functionals, compared against the
//! distance to the initial span at each cut.

use bq_core::bases::BasisSection;
use bq_core::quantities::{sh_profile, witness};
use bq_core::spaces::SpaceDescriptor;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    const N: usize = 8;
    for info in witness::registry().iter().filter(|w| w.quantity == "sh") {
        let section = BasisSection::new(SpaceDescriptor::new(info.kind, N)?);
        let f = info.functional(N)?;
        let p = sh_profile(&section, &f)?;
        println!(
            "{} on {}: summary {}",
            info.name,
            section.space(),
            p.summary
        );
        for (n, tail) in p.profile.values.iter().enumerate() {
            let dist = section.dist_to_initial_span(&f, n)?;
            println!(
                "  n={n}  tail {:.9}  distance {:.9}",
                tail.mid(),
                dist.value.mid()
            );
        }
    }
    Ok(())
}
