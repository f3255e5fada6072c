pub mod bits;
pub mod complexity;
pub mod error;
pub mod rotation;
pub mod scalar;
pub mod seqcore;
pub mod toeplitz;
pub mod witnesses;

pub use error::{Error, Result};

use num_bigint::BigInt;

/// Exact circle point with 128-bit rational coefficients.
pub type Angle = rotation::ExactAngle<i128>;
/// Exact circle point that never overflows.
pub type BigAngle = rotation::ExactAngle<BigInt>;
pub type Alpha = rotation::IrrationalAngle<i128>;
pub type BigAlpha = rotation::IrrationalAngle<BigInt>;
pub type RotationSpec = rotation::RotationCodingSpec<i128>;
pub type BigRotationSpec = rotation::RotationCodingSpec<BigInt>;
