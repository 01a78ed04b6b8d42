//! Numerical toolkit for conformal fractional Laplacians and the fractional
//! Yamabe problem.
//!
//! The crate realizes the operator `P_gamma` in three independent ways and
//! checks them against each other:
//!
//! * spectrally on the round sphere ([`sphere`]), where `P_gamma` is the Gamma
//!   ratio `Γ(B + γ + 1/2) / Γ(B − γ + 1/2)` acting on zonal harmonics;
//! * spectrally on flat space ([`extension`]), through the Fourier solution
//!   `Û(ξ, y) = ŵ(ξ) φ(|ξ| y)` of the weighted extension problem;
//! * as a Dirichlet-to-Neumann map of `div(y^a ∇U) = 0` discretized by finite
//!   differences on a periodic half-strip ([`halfspace`]).
//!
//! Closed-form constants (sharp Sobolev constants, extension constants, the
//! solvability coefficient) live in [`constants`]; the special functions they
//! need live in [`specfun`].

pub mod cli;
pub mod constants;
pub mod error;
pub mod extension;
pub mod halfspace;
pub mod parallel;
pub mod params;
pub mod quadrature;
pub mod specfun;
pub mod sphere;

pub use constants::ConstantsBundle;
pub use error::{Error, Result};
pub use params::FracParams;
