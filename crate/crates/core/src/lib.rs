//! Exact solver for the generalized Lebesgue–Ramanujan–Nagell equation
//!
//! ```text
//! x^2 + 17^k 41^l 59^m = 2^delta y^n,   x >= 1, y > 1, gcd(x, y) = 1, n >= 3.
//! ```
//!
//! The crate reduces the equation to families of cubic and quartic curves,
//! searches those curves for S-integral points within explicit bounds, maps the
//! points back to solutions, and cross-checks everything against an
//! independent brute-force enumeration.
//!
//! Modules, bottom-up:
//!
//! - [`ntcore`]: exact integer primitives (Jacobi symbol, exact roots,
//!   factorization over a prime basis, class numbers).
//! - [`lehmer`]: Lehmer sequences, primitive divisors and the exception table
//!   for prime indices.
//! - [`descent`]: curve families for each exponent case and back-substitution.
//! - [`points`]: bounded S-integral point search.
//! - [`oracle`]: brute-force solver used as ground truth.
//! - [`pipeline`]: case orchestration, reports and the canonical output formats.

pub mod descent;
pub mod error;
pub mod lehmer;
pub mod ntcore;
pub mod oracle;
pub mod par;
pub mod pipeline;
pub mod points;
pub mod solution;

pub use error::{Error, Result};
pub use ntcore::{Exponents, PrimeBasis};
pub use solution::SolutionRecord;
