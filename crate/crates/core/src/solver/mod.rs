//! Numerical back ends: a dense simplex, the James support solver and a
//! derivative-free ascent used for one-sided operator norm bounds.

pub mod conic;
pub mod lp;
pub mod search;
