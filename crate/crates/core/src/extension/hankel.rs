use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, integrate, QuadOptions};
use crate::specfun::{radial_kernel, sphere_volume};

const TAIL_POINTS: usize = 20;
const MAX_TAIL_INTERVALS: usize = 400;

/// Wynn's epsilon extrapolation of a sequence of partial sums.
///
/// Returns the best estimate and the difference to the previous estimate.
pub fn wynn_epsilon(sums: &[f64]) -> (f64, f64) {
    let m = sums.len();
    if m < 3 {
        let last = *sums.last().unwrap_or(&0.0);
        let prev = if m >= 2 { sums[m - 2] } else { 0.0 };
        return (last, (last - prev).abs());
    }
    // eps[k] holds column k of the epsilon table along the last diagonal
    let mut prev_col: Vec<f64> = vec![0.0; m + 1];
    let mut col: Vec<f64> = sums.to_vec();
    let mut best = col[m - 1];
    let mut best_prev = col[m - 2];
    let mut k = 0;
    while col.len() > 1 {
        let mut next = Vec::with_capacity(col.len() - 1);
        for j in 0..col.len() - 1 {
            let d = col[j + 1] - col[j];
            let base = if k == 0 { 0.0 } else { prev_col[j + 1] };
            if d == 0.0 {
                // converged exactly along this path
                return (col[j + 1], 0.0);
            }
            next.push(base + 1.0 / d);
        }
        prev_col = col;
        col = next;
        k += 1;
        if k % 2 == 0 && col.len() >= 2 {
            best = col[col.len() - 1];
            best_prev = col[col.len() - 2];
        }
    }
    (best, (best - best_prev).abs())
}

/// `(2π)^{−n/2} |S^{n−1}| ∫₀^∞ f(r) Ω_n(ρ r) r^{n−1} dr`, the unitary radial
/// Fourier transform of `f(|x|)` on `ℝⁿ` at frequency `ρ > 0`.
///
/// With `s = ρr` the integral is split into an adaptive head and a tail over
/// consecutive asymptotic zeros of `Ω_n`, whose partial sums are accelerated
/// by the epsilon algorithm. `length` is the scale on which `f` varies.
pub fn hankel_transform<F: Fn(f64) -> f64>(f: F, n: u32, rho: f64, length: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::domain("hankel_transform", format!("need rho > 0, got {rho}")));
    }
    let nf = f64::from(n);
    let inv = 1.0 / rho;
    let g = |s: f64| {
        if s == 0.0 {
            return if n == 1 { f(0.0) } else { 0.0 };
        }
        f(s * inv) * radial_kernel(n, s) * s.powi(n as i32 - 1)
    };
    let first_zero = (nf + 1.0) * PI / 4.0;
    let feature = rho * length;
    let want = (20.0 * PI).max(8.0 * feature);
    let k0 = ((want - first_zero) / PI).ceil().max(0.0);
    let head_end = first_zero + k0 * PI;

    let mut scale: f64 = 0.0;
    for i in 1..=64 {
        scale = scale.max(g(head_end * i as f64 / 64.0).abs());
    }
    for t in [0.5, 1.0, 2.0] {
        if t * feature < head_end {
            scale = scale.max(g(t * feature).abs());
        }
    }
    let opts = QuadOptions {
        abs_tol: 1e-13 * scale.max(f64::MIN_POSITIVE),
        rel_tol: 1e-13,
        max_subdivisions: 20_000,
    };
    let mut breaks = vec![0.0];
    for t in [1.0, 10.0] {
        let b = t * feature;
        if b > *breaks.last().unwrap() && b < head_end {
            breaks.push(b);
        }
    }
    breaks.push(head_end);
    let mut head = 0.0;
    for w in breaks.windows(2) {
        head += integrate(&g, w[0], w[1], opts)?.value;
    }

    let (gx, gw) = gauss_legendre(TAIL_POINTS);
    let mut sums = Vec::new();
    let mut acc = 0.0;
    let mut last_est = f64::NAN;
    let mut stable = 0;
    let mut a = head_end;
    for _ in 0..MAX_TAIL_INTERVALS {
        let b = a + PI;
        let c = 0.5 * (a + b);
        let h = 0.5 * PI;
        let piece: f64 = gx.iter().zip(&gw).map(|(&x, &w)| w * g(c + h * x)).sum::<f64>() * h;
        acc += piece;
        sums.push(acc);
        a = b;
        if sums.len() < 8 {
            continue;
        }
        // the table only needs the most recent terms
        let window = &sums[sums.len().saturating_sub(24)..];
        let (est, _) = wynn_epsilon(window);
        let tol = 1e-13 * (head + est).abs().max(1e-13 * scale * PI);
        if (est - last_est).abs() <= tol {
            stable += 1;
            if stable >= 2 {
                let norm = (2.0 * PI).powf(-nf / 2.0) * sphere_volume(n - 1);
                return Ok(norm * (head + est) * inv.powi(n as i32));
            }
        } else {
            stable = 0;
        }
        last_est = est;
    }
    Err(Error::NonConvergence {
        method: "hankel_transform tail extrapolation",
        achieved: f64::NAN,
        requested: 1e-13,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 − 1/2 + 1/3 − …
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=20)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        let (est, _) = wynn_epsilon(&sums);
        assert!((est - 2f64.ln()).abs() < 1e-12, "{est}");
    }

    #[test]
    fn gaussian_is_self_dual() {
        for n in [1, 2, 3, 4, 5] {
            for rho in [0.1, 1.0, 3.0] {
                let got = hankel_transform(|r| (-0.5 * r * r).exp(), n, rho, 1.0).unwrap();
                let want = (-0.5 * rho * rho).exp();
                assert!((got - want).abs() < 1e-11, "n={n} rho={rho}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn slowly_decaying_oscillatory_case() {
        // n = 3: (1+r²)^{-1} ↦ √(π/2) e^{−ρ}/ρ
        for rho in [0.01, 0.5, 2.0, 10.0] {
            let got = hankel_transform(|r| 1.0 / (1.0 + r * r), 3, rho, 1.0).unwrap();
            let want = (PI / 2.0).sqrt() * (-rho).exp() / rho;
            assert!((got - want).abs() < 1e-10 * want.max(1e-3), "rho={rho}: {got} vs {want}");
        }
    }
}
