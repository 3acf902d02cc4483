//! Finite-section computations for Schauder bases of classical sequence
//! spaces, with direction-tagged results and a rule harness.
//!
//! ```
//! use bq_core::bases::BasisSection;
//! use bq_core::spaces::SpaceDescriptor;
//!
//! let space: SpaceDescriptor = "summing:6".parse().unwrap();
//! let section = BasisSection::new(space);
//! assert_eq!(section.basis_constant().unwrap().value, 2.0);
//! assert_eq!(section.unconditional_constant().unwrap().value, 11.0);
//! ```

pub mod bases;
pub mod budget;
pub mod cli;
pub mod embeddings;
pub mod error;
pub mod estimate;
pub mod harness;
pub mod quantities;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};
pub use estimate::{Direction, Enclosure, Estimate};
pub use spaces::{Functional, SpaceDescriptor, SpaceKind};
