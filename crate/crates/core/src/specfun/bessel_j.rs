//! Bessel functions of the first kind for integer and half-integer order,
//! and the radial Fourier kernel of `ℝⁿ` built from them.
//!
//! Only the orders `ν = n/2 − 1` (and `n/2`) that appear in radial Fourier
//! transforms are supported: `2ν` must be an integer and `ν ≥ −1/2`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{gamma_fn, rgamma};

const SERIES_LIMIT: f64 = 2.0;
const KERNEL_SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 20.0;

fn power_series(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h.powf(nu) * rgamma(nu + 1.0);
    let mut sum = term;
    let q = -h * h;
    for k in 1..200 {
        let fk = k as f64;
        term *= q / (fk * (fk + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

// Hankel's expansion. Terminates (and is exact) for half-integer order.
fn hankel_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let chi = x - (0.5 * nu + 0.25) * PI;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        }
        if term == 0.0 {
            break;
        }
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

// J_m(x) = (1/2π) ∫₀^{2π} cos(mτ − x sin τ) dτ; the periodic trapezoid rule
// is exact up to aliasing by J_{N−m}(x), negligible once N > 1.5x + m + 40.
fn integer_order_trapezoid(m: u32, x: f64) -> f64 {
    let n = ((1.5 * x).ceil() as usize) + m as usize + 40;
    let step = 2.0 * PI / n as f64;
    let fm = f64::from(m);
    let mut sum = 0.0;
    for j in 0..n {
        let tau = step * j as f64;
        sum += (fm * tau - x * tau.sin()).cos();
    }
    sum / n as f64
}

fn check_order(nu: f64) -> Result<()> {
    let twice = 2.0 * nu;
    if twice != twice.round() || nu < -0.5 {
        return Err(Error::domain(
            "bessel_j",
            format!("order must be an integer or half-integer >= -1/2, got {nu}"),
        ));
    }
    Ok(())
}

/// `J_ν(x)` for `ν ∈ {−1/2, 0, 1/2, 1, …}` and `x ≥ 0` (`x > 0` if `ν < 0`).
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    check_order(nu)?;
    if !(x >= 0.0) || !x.is_finite() || (nu < 0.0 && x == 0.0) {
        return Err(Error::domain("bessel_j", format!("invalid argument x = {x}")));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    let half_integer = nu.fract() != 0.0;
    if x <= SERIES_LIMIT.max(nu) {
        return Ok(power_series(nu, x));
    }
    if half_integer || x >= ASYMPTOTIC_LIMIT.max(nu * nu) {
        return Ok(hankel_asymptotic(nu, x));
    }
    Ok(integer_order_trapezoid(nu as u32, x))
}

/// Angular average of `e^{i x·ξ}` over `S^{n−1}` at `s = |x||ξ|`:
/// `Ω_n(s) = Γ(n/2) (2/s)^{n/2−1} J_{n/2−1}(s)`, with `Ω_n(0) = 1`.
///
/// `Ω_1 = cos s` and `Ω_3 = sin s / s`.
pub fn radial_kernel(n: u32, s: f64) -> f64 {
    let half = f64::from(n) / 2.0;
    let s = s.abs();
    if s <= KERNEL_SERIES_LIMIT {
        let q = -0.25 * s * s;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            let fk = k as f64;
            term *= q / (fk * (fk - 1.0 + half));
            sum += term;
            if term.abs() < 1e-17 {
                break;
            }
        }
        return sum;
    }
    let nu = half - 1.0;
    let g = gamma_fn(half).expect("n/2 is never a pole");
    let j = bessel_j(nu, s).expect("order validated by construction");
    g * (2.0 / s).powf(nu) * j
}

/// `dΩ_n/ds = −(s/n) Ω_{n+2}(s)`.
pub fn radial_kernel_deriv(n: u32, s: f64) -> f64 {
    -s / f64::from(n) * radial_kernel(n + 2, s)
}
