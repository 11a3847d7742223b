//! Discrete Euler top: the exact integrable map, its biquadratic
//! correspondences, and the varieties of periodic initial states.

pub mod axisym;
pub mod biquadratic;
pub mod error;
pub mod eulermap;
pub mod linalg;
pub mod perisearch;
pub mod polynomials;
pub mod scalars;
pub mod varieties;
pub mod verify;

pub use biquadratic::{ACoeffs, Axis, BiquadParams, Coef};
pub use error::{Error, Result};
pub use eulermap::{BodyState, InvariantPair, TopConfig};
pub use polynomials::SparsePoly;
pub use scalars::{approx_equal, BigScalar, ExactScalar, Field, MaybeExact, Precision, Ring, Tolerance};
