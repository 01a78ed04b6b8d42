use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};

use crate::constants::c_ext;
use crate::error::{Error, Result};
use crate::params::FracParams;
use crate::quadrature::{integrate_half_line, QuadOptions, Tail};
use crate::specfun::phi_profile;

use super::grid::{PhysicalSampler, RadialSpectralProfile};

fn opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        max_subdivisions: 4000,
    }
}

type MomentKey = (u64, i32);

fn moment_cache() -> &'static Mutex<HashMap<MomentKey, (f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<MomentKey, (f64, f64)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `(∫ t^{a+k}(φ²+φ'²) dt, ∫ t^{a+k} φ² dt)`, memoized per `(γ, k)`.
fn weighted_moments(params: &FracParams, k: i32) -> Result<(f64, f64)> {
    let key = (params.gamma().to_bits(), k);
    if let Some(&v) = moment_cache().lock().expect("cache poisoned").get(&key) {
        return Ok(v);
    }
    let a = params.a();
    let kf = f64::from(k);
    let pow = a + kf;
    let phi2 = |t: f64| match phi_profile(params, t) {
        Ok(v) => (v.phi * v.phi, v.dphi * v.dphi),
        Err(_) => (f64::NAN, f64::NAN),
    };
    let e = integrate_half_line(
        |t| {
            let (p, d) = phi2(t);
            t.powf(pow) * (p + d)
        },
        kf - a.abs(),
        Tail::Exponential,
        opts(),
    )?;
    let f = integrate_half_line(
        |t| t.powf(pow) * phi2(t).0,
        pow,
        Tail::Exponential,
        opts(),
    )?;
    let v = (e.value, f.value);
    moment_cache().lock().expect("cache poisoned").insert(key, v);
    Ok(v)
}

/// `d₁ = ∫ t^{a+2}(φ²+φ'²)`, `d₂ = ∫ t^{a+2} φ²`, `d₃ = ∫ t^a φ²`.
pub fn dk_constants(params: &FracParams) -> Result<(f64, f64, f64)> {
    let (d1, d2) = weighted_moments(params, 2)?;
    let (_, d3) = weighted_moments(params, 0)?;
    Ok((d1, d2, d3))
}

/// `(𝓔_k, 𝓕_k) = (∫ t^{a+k}(φ²+φ'²), ∫ t^{a+k} φ²)` for `k ≥ 1`.
pub fn ek_fk_constants(params: &FracParams, k: u32) -> Result<(f64, f64)> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    let k = i32::try_from(k).map_err(|_| Error::Parameter(format!("k too large: {k}")))?;
    weighted_moments(params, k)
}

/// `∫₀^∞ t^a(φ²+φ'²) dt`, which equals `1/C_ext`.
pub fn dirichlet_energy_constant(params: &FracParams) -> Result<f64> {
    Ok(weighted_moments(params, 0)?.0)
}

/// `∫∫ y^a |∇U|² dx dy` for the Fourier extension of `w`, evaluated node by
/// node as `|ŵ|² |ξ|^{2γ} ∫ t^a(φ²+φ'²) dt`.
pub fn extension_dirichlet_energy(w: &RadialSpectralProfile, params: &FracParams) -> Result<f64> {
    check_dim(w, params)?;
    Ok(dirichlet_energy_constant(params)? * w.moment(2.0 * params.gamma()))
}

fn check_dim(w: &RadialSpectralProfile, params: &FracParams) -> Result<()> {
    if w.n() != params.n() {
        return Err(Error::Dimension(format!(
            "profile lives in dimension {}, parameters in {}",
            w.n(),
            params.n()
        )));
    }
    Ok(())
}

// Local power law of |ŵ|²ρ^{p+n} over the first three decades of nodes; a
// non-positive exponent means ∫|ŵ|²|ξ|^p dξ diverges at low frequency.
fn low_frequency_exponent(w: &RadialSpectralProfile, p: f64) -> Option<f64> {
    let nodes = w.nodes();
    let vals = w.values();
    let n = f64::from(w.n());
    let first = *nodes.first()?;
    let j = nodes.iter().position(|&r| r >= 1e3 * first)?;
    let c = |i: usize| vals[i] * vals[i] * nodes[i].powf(p + n);
    let (c0, c1) = (c(0), c(j));
    if c0 == 0.0 || c1 == 0.0 {
        return None;
    }
    Some((c1 / c0).ln() / (nodes[j] / first).ln())
}

/// `𝒜_i = d_i ∫ |ŵ|² |ξ|^{2(γ−1)} dξ` for `i ∈ {1, 2, 3}`.
pub fn energy_a(i: u8, w: &RadialSpectralProfile, params: &FracParams) -> Result<f64> {
    check_dim(w, params)?;
    let (d1, d2, d3) = dk_constants(params)?;
    let d = match i {
        1 => d1,
        2 => d2,
        3 => d3,
        _ => return Err(Error::Parameter(format!("energy index must be 1, 2 or 3, got {i}"))),
    };
    let p = 2.0 * (params.gamma() - 1.0);
    if let Some(e) = low_frequency_exponent(w, p) {
        if e <= 0.05 {
            return Err(Error::Numeric {
                method: "energy_a",
                detail: format!(
                    "moment ∫|ŵ|²|ξ|^{p:.3} dξ diverges at low frequency (local exponent {e:.3})"
                ),
            });
        }
    }
    let m = w.moment(p);
    if !m.is_finite() {
        return Err(Error::Numeric {
            method: "energy_a",
            detail: format!("moment ∫|ŵ|²|ξ|^{p:.3} dξ is not finite"),
        });
    }
    Ok(d * m)
}

/// Extension energy over `‖w‖²_{L^{2*}}` with a reusable physical sampler.
#[derive(Debug, Clone)]
pub struct QuotientEvaluator {
    sampler: PhysicalSampler,
}

impl QuotientEvaluator {
    /// Prepares the inverse transform for profiles on `template`'s grid.
    pub fn new(template: &RadialSpectralProfile) -> Self {
        Self {
            sampler: PhysicalSampler::new(template),
        }
    }

    pub fn quotient(&self, w: &RadialSpectralProfile, params: &FracParams) -> Result<f64> {
        check_dim(w, params)?;
        let c = c_ext(params);
        if c == 0.0 {
            return Err(Error::Parameter("Sobolev quotient needs gamma < 1".into()));
        }
        let energy = w.moment(2.0 * params.gamma()) / c;
        let ts = params.two_star();
        let mass = self.sampler.lp_power(w, ts)?;
        if mass == 0.0 || !mass.is_finite() {
            return Err(Error::domain("sobolev_quotient", "profile is zero"));
        }
        Ok(energy / mass.powf(2.0 / ts))
    }
}

/// `∫∫ y^a|∇U|² / ‖w‖²_{L^{2*}} = ∫|ŵ|²|ξ|^{2γ} dξ / (C_ext ‖w‖²_{L^{2*}})`.
///
/// Bounded below by `1/S̄(n,γ)`, with equality for bubbles.
pub fn sobolev_quotient(w: &RadialSpectralProfile, params: &FracParams) -> Result<f64> {
    QuotientEvaluator::new(w).quotient(w, params)
}

const FIT_POINTS: usize = 8;

/// `−C_ext lim y^a ∂_y Û(ξ, y)` at each node, from a least-squares fit of
/// `y ↦ Û(ξ, y)` on small `y` to `c₀ + b y^{2γ} + c₁ y² + c₂ y^{2+2γ}`;
/// the limit is `2γ·b`.
pub fn neumann_trace_spectral(
    w: &RadialSpectralProfile,
    params: &FracParams,
) -> Result<RadialSpectralProfile> {
    check_dim(w, params)?;
    let g = params.gamma();
    let c = c_ext(params);
    // sample points in τ = ρy, so the fit is equally conditioned at every node
    let taus: Vec<f64> = (0..FIT_POINTS)
        .map(|j| 1e-3 * 20f64.powf(j as f64 / (FIT_POINTS - 1) as f64))
        .collect();
    let design = DMatrix::from_fn(FIT_POINTS, 4, |j, col| {
        let t = taus[j];
        match col {
            0 => 1.0,
            1 => t.powf(2.0 * g),
            2 => t * t,
            _ => t.powf(2.0 + 2.0 * g),
        }
    });
    let svd = design.svd(true, true);
    let mut out = Vec::with_capacity(w.nodes().len());
    for (&rho, &v) in w.nodes().iter().zip(w.values()) {
        let mut rhs = DVector::zeros(FIT_POINTS);
        for (j, &t) in taus.iter().enumerate() {
            rhs[j] = v * phi_profile(params, t)?.phi;
        }
        let coef = svd.solve(&rhs, 1e-14).map_err(|e| Error::Numeric {
            method: "neumann_trace_spectral",
            detail: e.to_string(),
        })?;
        // b in the τ variable; in y it picks up ρ^{2γ}
        let b = coef[1] * rho.powf(2.0 * g);
        out.push(-c * 2.0 * g * b);
    }
    let mut it = out.into_iter();
    Ok(w.map(|_, _| it.next().expect("one value per node")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_closed_forms() {
        let p = FracParams::new(3, 0.5).unwrap();
        let (d1, d2, d3) = dk_constants(&p).unwrap();
        assert!((d1 - 0.5).abs() < 1e-12 && (d2 - 0.25).abs() < 1e-12 && (d3 - 0.5).abs() < 1e-12);
        for k in 1..=4u32 {
            let (_, f) = ek_fk_constants(&p, k).unwrap();
            let (_, f1) = ek_fk_constants(&p, k + 1).unwrap();
            assert!((f1 / f - (f64::from(k) + 1.0) / 2.0).abs() < 1e-10);
        }
        assert!((ek_fk_constants(&p, 1).unwrap().1 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn frozen_reference_values() {
        // mpmath quad of the defining integrals
        let cases = [
            (0.2, [0.123_002_559_007_963_761, 0.049_201_023_603_185_504, 0.076_876_599_379_977_351]),
            (0.7, [0.733_572_612_580_510_559, 0.415_691_147_128_955_983, 1.222_621_020_967_517_598]),
        ];
        for (g, want) in cases {
            let (d1, d2, d3) = dk_constants(&FracParams::new(3, g).unwrap()).unwrap();
            for (got, w) in [d1, d2, d3].iter().zip(want) {
                assert!((got - w).abs() < 1e-11 * w, "g={g}: {got} vs {w}");
            }
        }
        let p = FracParams::new(3, 0.25).unwrap();
        let (e1, f1) = ek_fk_constants(&p, 1).unwrap();
        let (e2, f2) = ek_fk_constants(&p, 2).unwrap();
        assert!((e1 - 0.187_705_761_835_078_714).abs() < 1e-11);
        assert!((f1 - 0.070_389_660_688_154_518).abs() < 1e-11);
        assert!((e2 - 0.179_245_799_057_296_873).abs() < 1e-11);
        assert!((f2 - 0.074_685_749_607_207_031).abs() < 1e-11);
    }

    #[test]
    fn energy_constant_is_reciprocal_extension_constant() {
        for g in [0.1, 0.3, 0.5, 0.8, 0.95] {
            let p = FracParams::new(2, g).unwrap();
            let e0 = dirichlet_energy_constant(&p).unwrap();
            assert!((e0 * c_ext(&p) - 1.0).abs() < 1e-10, "g={g}");
        }
    }
}
