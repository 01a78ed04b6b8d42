use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The `(n, γ)` pair that fixes every operator in the toolkit.
///
/// `n` is the boundary dimension and `γ` the order parameter of `P_γ`.
/// Derived exponents: `a = 1 − 2γ` (extension weight `y^a`),
/// `s = n/2 + γ` and the critical exponent `2* = 2n / (n − 2γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracParams {
    n: u32,
    gamma: f64,
}

impl FracParams {
    /// Validated constructor for `γ ∈ (0, 1)`, `n ≥ 1`, `n > 2γ`.
    pub fn new(n: u32, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Parameter(format!(
                "gamma must lie in (0, 1), got {gamma}"
            )));
        }
        Self::checked(n, gamma)
    }

    /// Like [`FracParams::new`] but also admits the endpoint `γ = 1`
    /// (the classical conformal Laplacian), used for cross-checks only.
    pub fn with_endpoint(n: u32, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Parameter(format!(
                "gamma must lie in (0, 1], got {gamma}"
            )));
        }
        Self::checked(n, gamma)
    }

    fn checked(n: u32, gamma: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("dimension n must be at least 1".into()));
        }
        if f64::from(n) - 2.0 * gamma <= 0.0 {
            return Err(Error::Parameter(format!(
                "need n > 2*gamma (Gamma pole at n/2 - gamma), got n={n}, gamma={gamma}"
            )));
        }
        Ok(Self { n, gamma })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> f64 {
        f64::from(self.n)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Weight exponent `a = 1 − 2γ`.
    pub fn a(&self) -> f64 {
        1.0 - 2.0 * self.gamma
    }

    pub fn s(&self) -> f64 {
        self.dim() / 2.0 + self.gamma
    }

    /// Critical Sobolev exponent `2n / (n − 2γ)`.
    pub fn two_star(&self) -> f64 {
        2.0 * self.dim() / (self.dim() - 2.0 * self.gamma)
    }

    /// True when `γ` is the endpoint value 1.
    pub fn is_endpoint(&self) -> bool {
        self.gamma == 1.0
    }
}
