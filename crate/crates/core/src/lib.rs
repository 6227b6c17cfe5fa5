//! Numerical certification of the Laplace-transform duality between Brownian
//! excursion (and generalized Brownian meanders) and the positive self-similar
//! Markov process `X` with transition density
//!
//! ```text
//! p_t(x, y) = 2 t √y / (π [(y − x)² + 2 (x + y) t² + t⁴])
//! ```
//!
//! Both sides of every identity are evaluated by nested adaptive quadrature
//! ([`quad`]) and by exact-sampling Monte Carlo ([`mc`]); [`harness`] compares
//! them.

// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Published constants are kept digit for digit.
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod harness;
pub mod kernels;
pub mod mc;
pub mod quad;
pub mod selftest;
pub mod special;
pub mod types;

pub use error::{Error, Result};
pub use types::{ArgGrid, Atom, Estimate, KernelStep, Method, MixingLaw, ProcessKind, TimeGrid};

/// Version of this crate, recorded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
