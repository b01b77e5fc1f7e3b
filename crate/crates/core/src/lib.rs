//! Exact and numerical verification of the characterization of the
//! exponential distribution by equidistribution of consecutive maxima,
//!
//! ```text
//! max(X_1, ..., X_{n-1}) + X_n / n  =d  max(X_1, ..., X_n),
//! ```
//!
//! together with a seeded goodness-of-fit test for exponentiality built on it.
//!
//! * [`exact`]: big rationals, binomials, factorials.
//! * [`ruiz`]: the alternating sums `H_{n,i}(x)` and identities over them.
//! * [`series`]: exact truncated Maclaurin series and the series-level checks.
//! * [`density`], [`rng`]: parametric models and reproducible sampling.
//! * [`quadrature`], [`numeric`]: floating-point check of the identity.
//! * [`gof`]: the permutation-calibrated two-sample test and its simulator.
//! * [`cli`]: the `equimax` command.

pub mod cli;
pub mod density;
pub mod error;
pub mod exact;
pub mod fmt;
pub mod gof;
pub mod numeric;
pub mod quadrature;
pub mod rng;
pub mod ruiz;
pub mod series;

pub use density::DensityModel;
pub use error::{Error, Result};
pub use exact::{binomial, factorial, rat_pow, ExactRational};
pub use gof::{SampleBatch, TestReport};
pub use numeric::DiscrepancyCurve;
pub use ruiz::IdentityReport;
pub use series::PowerSeries;
