//! James norms of a few vectors, with the pattern that attains each one.

use bq_core::spaces::james::{max_variation_dp, max_variation_exhaustive};
use bq_core::spaces::{SpaceDescriptor, SpaceKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vectors: [&[f64]; 4] = [
        &[1.0, 1.0, 1.0, 1.0],
        &[1.0, -1.0],
        &[1.0, 0.0, 1.0],
        &[0.5, -0.25, 2.0, 0.0, -1.0, 0.75],
    ];
    for x in vectors {
        let space = SpaceDescriptor::new(SpaceKind::James, x.len())?;
        let (variation, pattern) = max_variation_dp(x);
        let by_enumeration = max_variation_exhaustive(x)?;
        let one_based: Vec<usize> = pattern.iter().map(|p| p + 1).collect();
        println!(
            "{x:?}: norm {:.6}, attained on {one_based:?}, dp {variation} vs enumeration {by_enumeration}",
            space.norm(x)?
        );
    }
    Ok(())
}
