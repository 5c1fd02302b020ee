//! Oscillatory integrals `∫_b^∞ e^{iay²} f(y) dy` defined as limits of
//! Gaussian-regularized integrals, evaluated by an iterated
//! integration-by-parts representation and cross-checked against the
//! regularized limit, plus a Schrödinger solver built on top.

pub mod coefficients;
pub mod error;
pub mod free_particle;
pub mod jets;
pub mod oscillatory;
pub mod quadrature;
pub mod schrodinger;
pub mod spaces;

pub use error::{Error, Result};
pub use jets::{Jet, JetExpr, JetFunction};
pub use num_complex::Complex64;
