//! Special functions: Gamma on the real line, the modified Bessel function
//! `K_ν` of fractional order, the extension profile `φ(t) = c₁ t^γ K_γ(t)`,
//! and the radial Fourier kernel of `ℝⁿ`.

mod bessel_j;
mod bessel_k;
mod gamma;
mod profile;

pub use bessel_j::{bessel_j, radial_kernel, radial_kernel_deriv};
pub use bessel_k::{bessel_k, bessel_k_deriv};
pub use gamma::{beta_fn, gamma_fn, rgamma};
pub use profile::{phi_profile, PhiValue};

use std::f64::consts::PI;

/// Surface area of the unit sphere `Sⁿ ⊂ ℝⁿ⁺¹`: `2π^{(n+1)/2} / Γ((n+1)/2)`.
pub fn sphere_volume(n: u32) -> f64 {
    let h = (f64::from(n) + 1.0) / 2.0;
    2.0 * PI.powf(h) / gamma_fn(h).expect("half-integer argument is never a pole")
}
