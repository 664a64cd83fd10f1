//! Finite-field verification pipeline for the resolved Horrocks-Mumford
//! quintic threefold at `y = (2:-1:0:0:-1)`.
//!
//! The crate counts points of the resolution over `F_p`, forces its Betti
//! numbers from a single count, splits the Frobenius trace on `H^3`, and
//! certifies the match with the weight-4 level-55 newform by the 2-adic
//! elimination argument.

pub mod cohomology;
pub mod counting;
pub mod data;
pub mod error;
pub mod ff;
pub mod galois;
pub mod heisenberg;
pub mod hmq;
pub mod linalg;
mod small;
pub mod sweep;

pub use error::{Error, Result};
pub use ff::{Fp, IntPolynomial, PrimeModulus};
pub use heisenberg::{PairPoint, ProjectivePoint};
pub use linalg::{Field, Matrix};

/// Exact rationals for characteristic-zero cross-checks.
pub type Rational = num_rational::Ratio<i128>;
pub type FpMatrix = Matrix<Fp>;
pub type QMatrix = Matrix<Rational>;

/// Tag stored with cached counts and every report.
pub const VERSION: &str = concat!("hmquintic-", env!("CARGO_PKG_VERSION"));
