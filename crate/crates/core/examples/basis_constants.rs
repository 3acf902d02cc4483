//! Basis and unconditional constants of growing sections.

use bq_core::bases::BasisSection;
use bq_core::spaces::{SpaceDescriptor, SpaceKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for kind in SpaceKind::ALL {
        print!("{:<14}", kind.name());
        for n in [2, 4, 6, 8] {
            let section = BasisSection::new(SpaceDescriptor::new(kind, n)?);
            let k = section.basis_constant()?;
            let ku = section.unconditional_constant()?;
            print!(
                "  N={n}: K {:.3} Ku {:.3} ({})",
                k.value, ku.value, ku.direction
            );
        }
        println!();
    }
    Ok(())
}
