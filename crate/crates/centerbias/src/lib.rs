//! Prime-by-prime experiments on L-functions at the central point.
//!
//! The crate computes partial Euler products at s = 1/2, Chebyshev-bias and
//! second-moment prime sums with their log-log asymptotics, prime-counting
//! growth diagnostics, and truncated explicit-formula identities checked
//! against tables of nontrivial zeros. Everything is generic over the
//! working scalar through [`num::Real`]; the type aliases below fix f64 for
//! ordinary use and the command-line tool.

pub mod analysis;
pub mod cli;
pub mod coeffs;
pub mod config;
pub mod error;
pub mod lvalues;
pub mod num;
pub mod primes;
pub mod series;
pub mod zeros;

pub use error::{Error, Result};

/// f64 specializations of the core types, the default working precision.
pub type LFunctionSpec = coeffs::LFunctionSpec<f64>;
pub type DirichletCharacter = coeffs::dirichlet::DirichletCharacter<f64>;
pub type DeltaSource = coeffs::delta::DeltaSource<f64>;
pub type EllipticSource = coeffs::elliptic::EllipticSource<f64>;
pub type CustomSource = coeffs::CustomSource<f64>;
pub type KahanSum = num::KahanSum<f64>;
pub type SampledSeries = series::SampledSeries<f64>;
