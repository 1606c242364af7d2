//! Partition-net integrals for non-additive set functions.
//!
//! The crate works on two kinds of ground sets: a finite set `{0, .., n-1}`
//! and the naturals `ℕ`, where every set that can be described is ultimately
//! periodic. On top of that it provides
//!
//! * [`setalg`]: ultimately periodic sets, partitions, refinement and
//!   partition enumeration;
//! * [`measures`]: non-negative set functions, their property lattice,
//!   variation and atoms;
//! * [`integrals`]: tagged sums and the Riemann–Lebesgue, Birkhoff simple and
//!   Gould engines;
//! * [`verify`]: a seeded, replayable theorem suite;
//! * [`literal`]: the textual and JSON forms used by scenario files.

pub mod error;
pub mod exact;
pub mod integrals;
pub mod literal;
pub mod measures;
pub mod seq;
pub mod setalg;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{ExtValue, Real, Q};
pub use integrals::{Budget, FuncSpec, IntegralVerdict};
pub use measures::MeasureSpec;
pub use setalg::{GroundModel, Partition, TaggedPartition, UPSet};
