//! Closed-form scalars attached to `(n, γ)`.
//!
//! Sign convention: the scattering normalization `d*_γ = 2^{2γ−1}Γ(γ)/(γΓ(−γ))`
//! is negative on `(0, 1)`. Wherever a positive Dirichlet-to-Neumann constant
//! is required the toolkit uses `C_ext = 2^{2γ−1}Γ(γ)/Γ(1−γ) = |d*_γ|`; the
//! signed values are kept in [`ConstantsBundle`] for reference.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::FracParams;
use crate::quadrature::{integrate_half_line, QuadOptions, Tail};
use crate::specfun::{gamma_fn, rgamma, sphere_volume};

/// Every closed-form constant for one `(n, γ)`.
///
/// `c_bubble` and `theta_hat` are `None` at the endpoint `γ = 1`, where
/// `C_ext` vanishes and `a + 1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsBundle {
    pub n: u32,
    pub gamma: f64,
    /// `2^{2γ}Γ(γ)/Γ(−γ)`, signed.
    pub d_gamma: f64,
    /// `2^{2γ−1}Γ(γ)/(γΓ(−γ))`, signed (negative for `γ ∈ (0,1)`).
    pub dstar_paper: f64,
    /// Positive extension constant `2^{2γ−1}Γ(γ)/Γ(1−γ)`.
    pub c_ext: f64,
    /// Sharp Sobolev constant `S(n,γ)` of the sphere.
    pub s_sobolev: f64,
    /// Trace-inequality constant `C_ext · S(n,γ)`.
    pub s_bar: f64,
    /// `Λ_γ(Sⁿ) = 1/S(n,γ)`.
    pub lambda_sphere: f64,
    /// Prefactor `2^{1−γ}/Γ(γ)` of `φ(t) = c₁ t^γ K_γ(t)`.
    pub c1_bessel: f64,
    /// Unit-mass normalization of the Poisson kernel.
    pub c_poisson: f64,
    /// Neumann constant of the bubble equation.
    pub c_bubble: Option<f64>,
    /// Normalized solvability coefficient; negative means solvable.
    pub theta_hat: Option<f64>,
}

fn ext_constant(g: f64) -> f64 {
    2f64.powf(2.0 * g - 1.0) * gamma_fn(g).expect("g > 0") * rgamma(1.0 - g)
}

/// `C_ext = 2^{2γ−1}Γ(γ)/Γ(1−γ)`; zero at `γ = 1`.
pub fn c_ext(params: &FracParams) -> f64 {
    ext_constant(params.gamma())
}

/// Signed `d_γ = 2^{2γ}Γ(γ)/Γ(−γ)`.
pub fn d_gamma(params: &FracParams) -> f64 {
    let g = params.gamma();
    2f64.powf(2.0 * g) * gamma_fn(g).expect("g > 0") * rgamma(-g)
}

/// Signed `d*_γ = 2^{2γ−1}Γ(γ)/(γΓ(−γ))`.
pub fn dstar_paper(params: &FracParams) -> f64 {
    let g = params.gamma();
    2f64.powf(2.0 * g - 1.0) * gamma_fn(g).expect("g > 0") * rgamma(-g) / g
}

/// `S(n,γ) = Γ((n−2γ)/2)/Γ((n+2γ)/2) · vol(Sⁿ)^{−2γ/n}`.
pub fn sobolev_constant(params: &FracParams) -> Result<f64> {
    let (n, g) = (params.dim(), params.gamma());
    let ratio = gamma_fn((n - 2.0 * g) / 2.0)? * rgamma((n + 2.0 * g) / 2.0);
    Ok(ratio * sphere_volume(params.n()).powf(-2.0 * g / n))
}

/// `Q_γ` of the round sphere: `Γ(n/2+γ)/Γ(n/2−γ)`.
pub fn q_round(params: &FracParams) -> Result<f64> {
    let (n, g) = (params.dim(), params.gamma());
    Ok(gamma_fn(n / 2.0 + g)? / gamma_fn(n / 2.0 - g)?)
}

/// `θ̂_{n,γ} = C_ext(−1/2 + (3−a)/(2n)) + (n−1−a)/(4n(a+1))`.
///
/// Evaluated over the common denominator so the `γ = 1/2, n = 5` threshold
/// comes out as an exact zero.
pub fn theta_coefficient(params: &FracParams) -> Result<f64> {
    theta_with(params, c_ext(params))
}

/// The same expression with the signed `d*_γ` in place of `C_ext`.
pub fn theta_printed(params: &FracParams) -> Result<f64> {
    theta_with(params, dstar_paper(params))
}

fn theta_with(params: &FracParams, c: f64) -> Result<f64> {
    let (n, a) = (params.dim(), params.a());
    if params.n() < 2 {
        return Err(Error::Parameter("theta coefficient needs n >= 2".into()));
    }
    if params.is_endpoint() {
        return Err(Error::Parameter(
            "theta coefficient is undefined at gamma = 1 (a + 1 = 0)".into(),
        ));
    }
    let num = 2.0 * (a + 1.0) * c * (3.0 - a - n) + (n - 1.0 - a);
    Ok(num / (4.0 * n * (a + 1.0)))
}

/// True iff `θ̂_{n,γ} < 0` strictly.
pub fn is_solvable_nonumbilic(params: &FracParams) -> Result<bool> {
    Ok(theta_coefficient(params)? < 0.0)
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-13,
        max_subdivisions: 4000,
    }
}

/// `C_{n,γ}` making `K_γ(x,y) = C y^{2γ}/(|x|²+y²)^{(n+2γ)/2}` a unit-mass
/// kernel in `x` for every `y > 0`.
pub fn poisson_normalization(params: &FracParams) -> Result<f64> {
    poisson_normalization_for(params.n(), params.gamma())
}

/// [`poisson_normalization`] without the `n > 2γ` restriction of
/// [`FracParams`]; the kernel only needs `n ≥ 1` and `γ ∈ (0, 1]`.
pub fn poisson_normalization_for(n: u32, gamma: f64) -> Result<f64> {
    if n == 0 || !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Parameter(format!(
            "Poisson kernel needs n >= 1 and gamma in (0, 1], got n={n}, gamma={gamma}"
        )));
    }
    Ok(1.0 / poisson_mass_raw(n, gamma, 1.0, 1.0)?)
}

fn poisson_mass_raw(n: u32, g: f64, c: f64, y: f64) -> Result<f64> {
    let nf = f64::from(n);
    let e = -(nf + 2.0 * g) / 2.0;
    let r = integrate_half_line(
        |r| c * y.powf(2.0 * g) * r.powf(nf - 1.0) * (r * r + y * y).powf(e),
        nf - 1.0,
        Tail::Algebraic {
            decay: 1.0 + 2.0 * g,
        },
        quad_opts(),
    )?;
    Ok(sphere_volume(n - 1) * r.value)
}

/// Beta-integral closed form `Γ((n+2γ)/2)/(π^{n/2}Γ(γ))`.
pub fn poisson_normalization_closed(params: &FracParams) -> f64 {
    let (n, g) = (params.dim(), params.gamma());
    gamma_fn((n + 2.0 * g) / 2.0).expect("positive argument") * rgamma(g) / PI.powf(n / 2.0)
}

/// `∫_{ℝⁿ} K_γ(x, y) dx` with the given normalization.
pub fn poisson_kernel_mass(params: &FracParams, c: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::domain("poisson_kernel_mass", format!("need y > 0, got {y}")));
    }
    poisson_mass_raw(params.n(), params.gamma(), c, y)
}

/// `∫_{ℝⁿ} w_μ^{2*} dx` for the bubble `w_μ = (μ/(|x|²+μ²))^{(n−2γ)/2}`.
pub fn bubble_critical_mass(params: &FracParams, mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::domain("bubble_critical_mass", format!("need mu > 0, got {mu}")));
    }
    let n = params.dim();
    // w_μ^{2*} = (μ/(r²+μ²))^n
    let r = integrate_half_line(
        |r| r.powf(n - 1.0) * (mu / (r * r + mu * mu)).powf(n),
        n - 1.0,
        Tail::Algebraic { decay: n + 1.0 },
        quad_opts(),
    )?;
    Ok(sphere_volume(params.n() - 1) * r.value)
}

/// `c_{n,γ}` with `Λ_γ(Sⁿ) = c · C_ext · (∫w_μ^{2*})^{2γ/n}`, the bubble mass
/// taken at scale `μ`.
pub fn bubble_neumann_constant_at(params: &FracParams, mu: f64) -> Result<f64> {
    let c = c_ext(params);
    if c == 0.0 {
        return Err(Error::Parameter(
            "bubble Neumann constant is undefined at gamma = 1".into(),
        ));
    }
    let lambda = 1.0 / sobolev_constant(params)?;
    let mass = bubble_critical_mass(params, mu)?;
    Ok(lambda / (c * mass.powf(2.0 * params.gamma() / params.dim())))
}

/// [`bubble_neumann_constant_at`] for the unit bubble.
pub fn bubble_neumann_constant(params: &FracParams) -> Result<f64> {
    bubble_neumann_constant_at(params, 1.0)
}

/// Build the full bundle. Quadrature-based fields are evaluated once here.
pub fn make_constants(params: &FracParams) -> Result<ConstantsBundle> {
    let s = sobolev_constant(params)?;
    let c = c_ext(params);
    let g = params.gamma();
    let (c_bubble, theta_hat) = if params.is_endpoint() {
        (None, None)
    } else {
        let theta = if params.n() >= 2 {
            Some(theta_coefficient(params)?)
        } else {
            None
        };
        (Some(bubble_neumann_constant(params)?), theta)
    };
    Ok(ConstantsBundle {
        n: params.n(),
        gamma: g,
        d_gamma: d_gamma(params),
        dstar_paper: dstar_paper(params),
        c_ext: c,
        s_sobolev: s,
        s_bar: c * s,
        lambda_sphere: 1.0 / s,
        c1_bessel: 2f64.powf(1.0 - g) * rgamma(g),
        c_poisson: poisson_normalization(params)?,
        c_bubble,
        theta_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32, g: f64) -> FracParams {
        FracParams::new(n, g).unwrap()
    }

    #[test]
    fn half_is_unit_extension_constant() {
        assert_eq!(c_ext(&p(3, 0.5)), 1.0);
    }

    #[test]
    fn signed_constants() {
        for i in 1..10 {
            let q = p(3, i as f64 / 10.0);
            let c = c_ext(&q);
            assert!(c > 0.0);
            assert!((dstar_paper(&q) + c).abs() < 1e-13 * c);
            assert!(d_gamma(&q) < 0.0);
        }
    }

    #[test]
    fn endpoint_cross_check() {
        let q = FracParams::with_endpoint(3, 1.0).unwrap();
        let b = make_constants(&q).unwrap();
        // mpmath closed form
        assert!((b.s_sobolev - 0.182_551_571_487_181_005_6).abs() < 1e-14);
        assert!((b.lambda_sphere - 5.477_904_089_531_331_269).abs() < 1e-12);
        assert!((b.lambda_sphere - 0.75 * sphere_volume(3).powf(2.0 / 3.0)).abs() < 1e-12);
        assert_eq!(b.c_ext, 0.0);
        assert!(b.c_bubble.is_none() && b.theta_hat.is_none());
    }

    #[test]
    fn theta_collapses_at_half() {
        for n in 2..=12 {
            let t = theta_coefficient(&p(n, 0.5)).unwrap();
            let want = (5.0 - f64::from(n)) / (4.0 * f64::from(n));
            assert!((t - want).abs() < 1e-15, "n={n}");
            assert_eq!(is_solvable_nonumbilic(&p(n, 0.5)).unwrap(), n >= 6);
        }
        assert_eq!(theta_coefficient(&p(5, 0.5)).unwrap(), 0.0);
    }

    #[test]
    fn theta_high_precision_value() {
        // mpmath closed form
        let t = theta_coefficient(&p(4, 0.9)).unwrap();
        assert!((t - 1.182_610_660_820_117_064).abs() < 1e-12);
        assert!(!is_solvable_nonumbilic(&p(4, 0.9)).unwrap());
    }

    #[test]
    fn poisson_constant() {
        let c = poisson_normalization_for(1, 0.5).unwrap();
        assert!((c - 1.0 / PI).abs() < 1e-12);
        let q = p(2, 0.3);
        let c = poisson_normalization(&q).unwrap();
        assert!((c - 0.095_492_965_855_137_201_46).abs() < 1e-12);
        assert!((c - poisson_normalization_closed(&q)).abs() < 1e-12);
        for q in [p(1, 0.2), p(3, 0.7), p(4, 0.5)] {
            let c = poisson_normalization(&q).unwrap();
            let m1 = poisson_kernel_mass(&q, c, 0.5).unwrap();
            let m2 = poisson_kernel_mass(&q, c, 2.0).unwrap();
            assert!((m1 - 1.0).abs() < 1e-9 && (m2 - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn bubble_constant() {
        // mpmath: 2^{2γ}Γ((n+2γ)/2)/Γ((n−2γ)/2)/C_ext
        let cases = [
            (3, 0.5, 2.0),
            (4, 0.3, 1.114_285_714_285_714_285_7),
            (5, 0.7, 11.995_920_443_138_167_5),
        ];
        for (n, g, want) in cases {
            let q = p(n, g);
            for mu in [0.5, 1.0, 2.0] {
                let c = bubble_neumann_constant_at(&q, mu).unwrap();
                assert!((c - want).abs() < 1e-9 * want, "n={n} g={g} mu={mu}: {c}");
            }
        }
    }

    #[test]
    fn bubble_mass_closed_form() {
        for n in 1..=6 {
            let q = p(n, 0.4);
            let nf = f64::from(n);
            let want = PI.powf(nf / 2.0) * gamma_fn(nf / 2.0).unwrap() / gamma_fn(nf).unwrap();
            let got = bubble_critical_mass(&q, 1.0).unwrap();
            assert!((got - want).abs() < 1e-11 * want, "n={n}");
        }
    }

    #[test]
    fn sphere_constant_identity() {
        for n in 1..=6 {
            for g in [0.25, 0.5, 0.75] {
                if f64::from(n) <= 2.0 * g {
                    continue;
                }
                let q = p(n, g);
                let b = make_constants(&q).unwrap();
                let lam = q_round(&q).unwrap() * sphere_volume(n).powf(2.0 * g / f64::from(n));
                assert!((b.lambda_sphere - lam).abs() < 1e-12 * lam);
                assert!((b.lambda_sphere * b.s_sobolev - 1.0).abs() < 1e-15);
            }
        }
    }
}
