//! Gap profiles of bounded partial sums, the bc1 lower bounds they give, and
//! a randomized search for sequences that beat a proposed upper bound.

use bq_core::quantities::{bc1_certificate, bc1_upper_check, gap_profile, witness};
use bq_core::spaces::SpaceDescriptor;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for info in witness::registry().iter().filter(|w| w.quantity == "bc1") {
        let w = info.sequence(10)?;
        let gaps = gap_profile(w.space, &w.partial_sums())?;
        let cert = bc1_certificate(&w)?;
        println!("{:<20} gaps {:?}", info.name, gaps);
        println!("{:<20} bc1 {cert}", "");
    }
    for (space, bound) in [("summing:6", 1.0), ("c:6", 1.5)] {
        let check = bc1_upper_check(space.parse::<SpaceDescriptor>()?, bound, 40, 0)?;
        println!(
            "bc1 <= {bound} on {space}: {:?} ({})",
            check.status, check.note
        );
    }
    Ok(())
}
