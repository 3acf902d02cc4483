//! Certified l1 and c0 copies spanned by block sequences.

use bq_core::embeddings::{
    alpha_lower_bound, build_c0_embedding, build_l1_embedding, BlockSequence,
};
use bq_core::spaces::{Functional, SpaceDescriptor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let summing: SpaceDescriptor = "summing:6".parse()?;
    let pairs =
        BlockSequence::from_cuts(summing, &[1.0, -1.0, 1.0, -1.0, 1.0, -1.0], &[0, 2, 4, 6])?;
    let separating = Functional::new(summing, vec![0.0, -0.2, 0.0, -0.2, 0.0, -0.2])?;
    let cert = build_l1_embedding(&pairs, &separating)?;
    println!("l1 in {summing}: upper {}", cert.upper);
    println!(
        "  lower {}  closed form {}",
        cert.lower, cert.analytic_lower
    );
    println!("  alpha {}", alpha_lower_bound(&cert)?);

    let c0: SpaceDescriptor = "c0:8".parse()?;
    let blocks = BlockSequence::from_cuts(c0, &[1.0; 8], &[0, 3, 5, 8])?;
    let cert = build_c0_embedding(&blocks)?;
    let t = [0.5, -1.0, 0.25];
    let (lo, hi) = cert.analytic_range(&t);
    let image = cert.scale * c0.norm(&blocks.combination(&t))?;
    println!("c0 in {c0}: upper {}  lower {}", cert.upper, cert.lower);
    println!("  t = {t:?}: {lo} <= {image} <= {hi}");
    Ok(())
}
