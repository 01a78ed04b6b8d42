use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::par_map;
use crate::quadrature::composite_rule;
use crate::specfun::{radial_kernel, sphere_volume};

const PANEL_POINTS: usize = 8;
const PHYS_POINTS: usize = 16;
const RADIUS_FACTOR: f64 = 40.0;

/// Radial frequency quadrature for `∫_{ℝⁿ} g(|ξ|) dξ`.
///
/// Geometric panels resolve the low-frequency end (profiles may blow up
/// like a power of `|ξ|`), uniform panels of width `π/R` cover the rest so
/// that the inverse transform stays exact out to physical radius `R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub n: u32,
    /// Length scale of the functions this grid is meant for.
    pub scale: f64,
    /// Physical radius up to which reconstructions are resolved.
    pub radius: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SpectralGrid {
    /// Grid for functions of width `scale` with exponentially decaying
    /// transforms: `|ξ| ∈ [1e-9, 24]/scale`, resolved to radius `40·scale`.
    pub fn for_scale(n: u32, scale: f64) -> Result<Self> {
        Self::build(n, scale, 24.0 / scale, RADIUS_FACTOR * scale)
    }

    /// Grid on `|ξ| ≤ band` for band-limited profiles.
    pub fn band_limited(n: u32, band: f64, scale: f64) -> Result<Self> {
        Self::build(n, scale, band, RADIUS_FACTOR * scale)
    }

    /// Explicit construction: frequencies up to `rho_max`, reconstructions
    /// resolved to `radius`.
    pub fn build(n: u32, scale: f64, rho_max: f64, radius: f64) -> Result<Self> {
        if n == 0 || !(scale > 0.0) || !(rho_max > 0.0) || !(radius > 0.0) {
            return Err(Error::Parameter(format!(
                "invalid spectral grid: n={n}, scale={scale}, rho_max={rho_max}, radius={radius}"
            )));
        }
        let width = PI / radius;
        let rho_min = 1e-9 / scale;
        let mut breaks = vec![0.0];
        let mut b = rho_min;
        while b < width.min(rho_max) {
            breaks.push(b);
            b *= 2.0;
        }
        let start = width.min(rho_max);
        let panels = ((rho_max - start) / width).ceil().max(0.0) as usize;
        breaks.push(start);
        for i in 1..=panels {
            breaks.push((start + i as f64 * width).min(rho_max));
        }
        breaks.dedup();
        let (nodes, w) = composite_rule(&breaks, PANEL_POINTS);
        let surface = sphere_volume(n - 1);
        let weights = nodes
            .iter()
            .zip(&w)
            .map(|(&r, &wt)| wt * surface * r.powi(n as i32 - 1))
            .collect();
        Ok(Self {
            n,
            scale,
            radius,
            nodes,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Profile with values `f(|ξ|)` at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> RadialSpectralProfile {
        RadialSpectralProfile {
            n: self.n,
            scale: self.scale,
            radius: self.radius,
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
            values: self.nodes.iter().map(|&r| f(r)).collect(),
        }
    }
}

/// Samples `ŵ(|ξ|)` of a radial function together with the quadrature that
/// integrates radial functions over `ℝⁿ` (weights carry `|S^{n−1}| ρ^{n−1}`).
///
/// The Fourier transform is unitary, `ŵ(ξ) = (2π)^{−n/2} ∫ w(x) e^{−ix·ξ} dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSpectralProfile {
    n: u32,
    scale: f64,
    radius: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
}

impl RadialSpectralProfile {
    /// Validating constructor. `radius` is the physical radius used when the
    /// profile is transformed back to `x`-space.
    pub fn new(
        n: u32,
        radius: f64,
        nodes: Vec<f64>,
        weights: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.len() != values.len() {
            return Err(Error::Dimension(format!(
                "nodes/weights/values lengths differ: {}/{}/{}",
                nodes.len(),
                weights.len(),
                values.len()
            )));
        }
        if n == 0 || !(radius > 0.0) {
            return Err(Error::Parameter(format!("invalid profile: n={n}, radius={radius}")));
        }
        if nodes.first().is_some_and(|&r| !(r > 0.0))
            || nodes.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(Error::Parameter(
                "profile nodes must be positive and strictly increasing".into(),
            ));
        }
        if weights.iter().any(|&w| !(w > 0.0)) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter(
                "profile weights must be positive and values finite".into(),
            ));
        }
        Ok(Self {
            n,
            scale: radius / RADIUS_FACTOR,
            radius,
            nodes,
            weights,
            values,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Same nodes, values replaced by `f(|ξ|, ŵ)`.
    pub fn map(&self, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let values = self
            .nodes
            .iter()
            .zip(&self.values)
            .map(|(&r, &v)| f(r, v))
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }

    /// `∫ |ŵ(ξ)|² |ξ|^{p} dξ`.
    pub fn moment(&self, p: f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((&r, &w), &v)| w * v * v * r.powf(p))
            .sum()
    }

    /// `∫ ŵ(ξ) dξ`-type linear functional `∫ ŵ(ξ) g(|ξ|) dξ`.
    pub fn integrate_with(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((&r, &w), &v)| w * v * g(r))
            .sum()
    }

    /// Inverse transform at radius `r`: `(2π)^{−n/2} ∫ ŵ(ξ) Ω_n(r|ξ|) dξ`.
    pub fn physical_value(&self, r: f64) -> f64 {
        let n = self.n;
        let norm = (2.0 * PI).powf(-f64::from(n) / 2.0);
        norm * self.integrate_with(|rho| radial_kernel(n, r * rho))
    }
}

/// Precomputed inverse transform onto a radial physical grid on `[0, R]`.
///
/// Reused across profiles that share a spectral grid, which makes repeated
/// `L^p` norms cheap.
#[derive(Debug, Clone)]
pub struct PhysicalSampler {
    n: u32,
    spectral_nodes: Vec<f64>,
    radii: Vec<f64>,
    /// Radial weights including `|S^{n−1}| r^{n−1}`.
    radial_weights: Vec<f64>,
    // row-major: one row per radius, already multiplied by spectral weights
    kernel: Vec<f64>,
}

impl PhysicalSampler {
    pub fn new(profile: &RadialSpectralProfile) -> Self {
        let n = profile.n;
        let radius = profile.radius;
        // uniform near the origin, then geometric out to R
        let scale = profile.scale;
        let mut breaks: Vec<f64> = (0..=8).map(|i| 0.5 * scale * i as f64).collect();
        let mut b = 4.0 * scale;
        while b < radius {
            b = (b * 1.2).min(radius);
            breaks.push(b);
        }
        let (radii, w) = composite_rule(&breaks, PHYS_POINTS);
        let surface = sphere_volume(n - 1);
        let radial_weights = radii
            .iter()
            .zip(&w)
            .map(|(&r, &wt)| wt * surface * r.powi(n as i32 - 1))
            .collect();
        let norm = (2.0 * PI).powf(-f64::from(n) / 2.0);
        let nodes = &profile.nodes;
        let weights = &profile.weights;
        let rows: Vec<Vec<f64>> = par_map(&radii, |&r| {
            nodes
                .iter()
                .zip(weights)
                .map(|(&rho, &w)| norm * w * radial_kernel(n, r * rho))
                .collect()
        });
        Self {
            n,
            spectral_nodes: nodes.clone(),
            radii,
            radial_weights,
            kernel: rows.concat(),
        }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    fn check(&self, profile: &RadialSpectralProfile) -> Result<()> {
        if profile.n != self.n || profile.nodes != self.spectral_nodes {
            return Err(Error::Dimension(
                "profile does not share the sampler's spectral grid".into(),
            ));
        }
        Ok(())
    }

    /// Physical values `w(r_j)` on the sampler's radii.
    pub fn values(&self, profile: &RadialSpectralProfile) -> Result<Vec<f64>> {
        self.check(profile)?;
        let m = self.spectral_nodes.len();
        Ok(self
            .kernel
            .chunks_exact(m)
            .map(|row| row.iter().zip(&profile.values).map(|(k, v)| k * v).sum())
            .collect())
    }

    /// `∫_{|x|<R} |w|^p dx`.
    pub fn lp_power(&self, profile: &RadialSpectralProfile, p: f64) -> Result<f64> {
        let vals = self.values(profile)?;
        Ok(vals
            .iter()
            .zip(&self.radial_weights)
            .map(|(v, w)| w * v.abs().powf(p))
            .sum())
    }
}
