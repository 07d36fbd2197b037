//! Numerical evaluation of the closed-form success probability under optimal mode selection.

pub mod density;
pub mod inverse;
pub mod laplace;
pub mod quad;
mod success;

pub use density::QrDistribution;
pub use inverse::InversionMethod;
pub use laplace::{laplace_joint, laplace_single, ShotNoiseTransform};
pub use quad::QuadratureSpec;
pub use success::{AnalyticModel, SuccessTerms};
