//! Dual norms on every kernel. Polyhedral kernels are exact; James kernels
//! return a certified enclosure.

use bq_core::spaces::{SpaceDescriptor, SpaceKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = [1.0, -0.5, 0.25, 0.0, 1.0];
    for kind in SpaceKind::ALL {
        let space = SpaceDescriptor::new(kind, f.len())?;
        let e = space.dual_norm(&f)?;
        println!(
            "{space:<16} [{:.9}, {:.9}]  width {:.1e}",
            e.lower,
            e.upper,
            e.width()
        );
    }
    Ok(())
}
