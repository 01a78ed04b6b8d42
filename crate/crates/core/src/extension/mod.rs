//! Flat-space extension calculus: radial Fourier profiles, the Fourier
//! solution `Û(ξ, y) = ŵ(ξ) φ(|ξ| y)` of `div(y^a ∇U) = 0`, the energy
//! constants built from `φ`, bubbles and their Sobolev quotients.

mod energy;
mod grid;
mod hankel;

pub use energy::{
    dirichlet_energy_constant, dk_constants, ek_fk_constants, energy_a, extension_dirichlet_energy,
    neumann_trace_spectral, sobolev_quotient, QuotientEvaluator,
};
pub use grid::{PhysicalSampler, RadialSpectralProfile, SpectralGrid};
pub use hankel::{hankel_transform, wynn_epsilon};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::par_map;
use crate::params::FracParams;
use crate::specfun::{bessel_k, gamma_fn, phi_profile};

/// The bubble `w_μ(x) = (μ/(|x|²+μ²))^{(n−2γ)/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleSpec {
    pub mu: f64,
    pub params: FracParams,
}

impl BubbleSpec {
    pub fn new(mu: f64, params: FracParams) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Parameter(format!("bubble scale must be positive, got {mu}")));
        }
        Ok(Self { mu, params })
    }

    fn alpha(&self) -> f64 {
        (self.params.dim() - 2.0 * self.params.gamma()) / 2.0
    }
}

/// `w_μ(r)`.
pub fn bubble_eval(spec: &BubbleSpec, r: f64) -> f64 {
    let mu = spec.mu;
    (mu / (r * r + mu * mu)).powf(spec.alpha())
}

/// Radial Fourier transform of the bubble by Hankel quadrature at the grid
/// nodes.
pub fn bubble_fourier(spec: &BubbleSpec, grid: &SpectralGrid) -> Result<RadialSpectralProfile> {
    check_grid(spec, grid)?;
    let n = spec.params.n();
    let values: Vec<Result<f64>> = par_map(&grid.nodes, |&rho| {
        hankel_transform(|r| bubble_eval(spec, r), n, rho, spec.mu)
    });
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    RadialSpectralProfile::new(n, grid.radius, grid.nodes.clone(), grid.weights.clone(), values)
}

/// Closed form `ŵ_μ(ρ) = μ^{n−α} 2^{1−α}/Γ(α) (μρ)^{−γ} K_γ(μρ)`, `α = (n−2γ)/2`.
pub fn bubble_fourier_closed(spec: &BubbleSpec, rho: f64) -> Result<f64> {
    let g = spec.params.gamma();
    let alpha = spec.alpha();
    let t = spec.mu * rho;
    let pre = spec.mu.powf(spec.params.dim() - alpha) * 2f64.powf(1.0 - alpha) / gamma_fn(alpha)?;
    Ok(pre * t.powf(-g) * bessel_k(g, t)?)
}

fn check_grid(spec: &BubbleSpec, grid: &SpectralGrid) -> Result<()> {
    if grid.n != spec.params.n() {
        return Err(Error::Dimension(format!(
            "grid dimension {} differs from n = {}",
            grid.n,
            spec.params.n()
        )));
    }
    Ok(())
}

/// `Û(·, y) = ŵ φ(|ξ| y)`.
pub fn fourier_extension(
    w: &RadialSpectralProfile,
    params: &FracParams,
    y: f64,
) -> Result<RadialSpectralProfile> {
    if !(y >= 0.0) {
        return Err(Error::domain("fourier_extension", format!("need y >= 0, got {y}")));
    }
    let mut err = None;
    let out = w.map(|rho, v| match phi_profile(params, rho * y) {
        Ok(p) => v * p.phi,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Multiplier `|ξ|^{2γ}`.
pub fn frac_laplacian_flat(w: &RadialSpectralProfile, params: &FracParams) -> RadialSpectralProfile {
    let two_g = 2.0 * params.gamma();
    w.map(|rho, v| v * rho.powf(two_g))
}
