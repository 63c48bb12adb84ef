//! Zero-error adaptive group testing for populations whose members are
//! defective independently but with non-identical probabilities.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs and an explicit seed; IO, configuration files and
//! the Monte Carlo sweep live in the `gtlab` crate.
//!
//! The moving parts:
//!
//! - [`population`]: prior vectors, prior generators and ground-truth sampling.
//! - [`oracle`]: the only component that sees the ground truth; counts tests.
//! - [`saturation`]: max-to-min greedy saturation over the unclassified items.
//! - [`split`]: Shannon-length code trees and the maximum-entropy prefix cut.
//! - [`algorithms`]: the two refined laminar algorithms and three baselines.
//! - [`bounds`]: closed-form bounds on the expected number of tests.
#![no_std]

extern crate alloc;

mod error;
pub use error::Error;

pub mod algorithms;
pub mod bounds;
pub mod oracle;
pub mod pool;
pub mod population;
pub mod saturation;
pub mod seed;
pub mod split;

pub use algorithms::{run, verify_zero_error, Algorithm, RunOptions, RunRecord};
pub use oracle::Oracle;
pub use pool::Pool;
pub use population::{InfectionVector, PriorKind, PriorSpec, PriorVector};

pub type Result<T> = core::result::Result<T, Error>;
