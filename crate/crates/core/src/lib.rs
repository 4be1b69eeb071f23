//! Desk-scale computational coarse geometry.
//!
//! The library makes the large-scale structure of infinite graphs and
//! collar spaces computable at finite scale: truncations and hyperbolicity
//! kernels, end-equivalence relations decided as tri-state scale verdicts,
//! cover/controlled-set calculus, slowly oscillating function profiles,
//! boundary extensions of coarse maps, and the band construction bounding
//! cover multiplicity on collars.
//!
//! Everything is deterministic: types are immutable after construction,
//! operations are pure, and any output order is canonical.

pub mod asdim;
pub mod carrier;
pub mod collar;
pub mod error;
pub mod space;

pub mod ends;
pub mod coarsemaps;
pub mod largescale;
pub mod sampling;
pub mod higson;

pub use carrier::Carrier;
pub use collar::CollarSpace;
pub use error::{Error, Result};
