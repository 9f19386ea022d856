//! Numerical laboratory for `u'' + 2δA^σu' + c(t)Au = 0` with a degenerate,
//! nonnegative `c(t)` and a diagonal operator `A`.
//!
//! Each mode reduces to `u'' + 2δλ^{2σ}u' + λ²c(t)u = 0`. The crate integrates
//! these modes, evaluates the energy functionals that give decay above the
//! threshold `σ > 1/(2+k+α)`, and builds the explicit coefficient that makes
//! Gevrey data lose all regularity instantly below it.

pub mod coefficients;
pub mod counterexample;
pub mod energy;
pub mod error;
pub mod logspace;
pub mod modal;
pub mod phase;
pub mod quadrature;
pub mod spectral;
pub mod taylor;

pub use coefficients::{Coefficient, CoefficientSpec, Profile, Regularity};
pub use error::{Error, Result};
pub use logspace::SignedLog;
pub use modal::{integrate, integrate_with, IntegrationOptions, ModalProblem, ModalTrajectory, OutputGrid};
