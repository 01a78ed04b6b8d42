//! Modified Bessel function of the second kind for real order `|ν| < 2`.
//!
//! Temme's series for `x < 2` and Steed's continued fraction (CF2) for
//! `x ≥ 2`, both on the reduced order `μ ∈ [−1/2, 1/2]`, followed by upward
//! recurrence `K_{μ+k+1} = K_{μ+k−1} + (2(μ+k)/x) K_{μ+k}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;
const CROSSOVER: f64 = 2.0;

// Taylor coefficients of 1/Γ(z) about 0: 1/Γ(z) = Σ_{k≥1} A[k-1] z^k.
const RGAMMA_TAYLOR: [f64; 28] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
    1.412_380_655_318_031_781_6e-18,
];

/// Temme's auxiliary functions for |μ| ≤ 1/2:
/// Γ₁ = (1/Γ(1−μ) − 1/Γ(1+μ)) / (2μ), Γ₂ = (1/Γ(1−μ) + 1/Γ(1+μ)) / 2,
/// plus 1/Γ(1+μ) and 1/Γ(1−μ).
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    // 1/Γ(1+μ) = Σ A_k μ^{k-1}; split into even/odd powers of μ.
    let mut g1 = 0.0;
    let mut g2 = 0.0;
    for (i, &c) in RGAMMA_TAYLOR.iter().enumerate().rev() {
        // coefficient of μ^i in 1/Γ(1+μ)
        if i % 2 == 0 {
            g2 = g2 * mu * mu + c;
        } else {
            g1 = g1 * mu * mu + c;
        }
    }
    // 1/Γ(1+μ) = g2(μ²) + μ·g1(μ²);  1/Γ(1−μ) = g2 − μ·g1
    let gam1 = -g1;
    let gam2 = g2;
    let gampl = g2 + mu * g1;
    let gammi = g2 - mu * g1;
    (gam1, gam2, gampl, gammi)
}

/// Returns `(K_μ(x), K_{μ+1}(x))` for `|μ| ≤ 1/2`, `x > 0`.
pub(crate) fn k_reduced_pair(mu: f64, x: f64) -> Result<(f64, f64)> {
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let mu2 = mu * mu;
    if x < CROSSOVER {
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..=MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                return Ok((sum, sum1 * xi2));
            }
        }
        Err(Error::NonConvergence {
            method: "bessel_k Temme series",
            achieved: f64::NAN,
            requested: EPS,
        })
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..=MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                let h = a1 * h;
                let kmu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
                let k1 = kmu * (mu + x + 0.5 - h) * xi;
                return Ok((kmu, k1));
            }
        }
        Err(Error::NonConvergence {
            method: "bessel_k continued fraction",
            achieved: f64::NAN,
            requested: EPS,
        })
    }
}

/// Returns `(K_ν(x), K_{ν+1}(x))` for `ν ≥ 0`, by recurrence from the
/// reduced order.
pub(crate) fn k_pair(nu: f64, x: f64) -> Result<(f64, f64)> {
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let (mut k0, mut k1) = k_reduced_pair(mu, x)?;
    let xi2 = 2.0 / x;
    for i in 1..=(nl as usize) {
        let next = (mu + i as f64) * xi2 * k1 + k0;
        k0 = k1;
        k1 = next;
    }
    Ok((k0, k1))
}

fn check_args(func: &'static str, nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(func, format!("need x > 0, got {x}")));
    }
    let nu = nu.abs();
    if !(nu < 2.0) {
        return Err(Error::domain(func, format!("order |nu| must be < 2, got {nu}")));
    }
    Ok(nu)
}

/// `K_ν(x)` for real order `|ν| < 2` and `x > 0` (`K_{−ν} = K_ν`).
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    let nu = check_args("bessel_k", nu, x)?;
    Ok(k_pair(nu, x)?.0)
}

/// `K'_ν(x) = (ν/x) K_ν(x) − K_{ν+1}(x)`.
pub fn bessel_k_deriv(nu: f64, x: f64) -> Result<f64> {
    let nu = check_args("bessel_k_deriv", nu, x)?;
    let (k, k1) = k_pair(nu, x)?;
    Ok(nu / x * k - k1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma_fn;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn half_integer_closed_form() {
        let want = (PI / 2.0).sqrt() * (-1.0_f64).exp();
        assert!(rel(bessel_k(0.5, 1.0).unwrap(), want) < 1e-13);
        for x in [1e-4, 0.3, 1.9, 2.0, 2.1, 7.0, 40.0] {
            let want = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!(rel(bessel_k(0.5, x).unwrap(), want) < 1e-12, "x={x}");
        }
    }

    #[test]
    fn order_one_and_a_half_by_recurrence() {
        // K_{3/2} = K_{-1/2} + (2·½/x) K_{1/2}
        let k_half = bessel_k(0.5, 2.0).unwrap();
        let via_rec = k_half + 0.5 * k_half;
        assert!(rel(bessel_k(1.5, 2.0).unwrap(), via_rec) < 1e-13);
        assert!(rel(via_rec, 0.179_906_657_952_092_17) < 1e-12);
    }

    #[test]
    fn symmetric_in_order() {
        assert_eq!(bessel_k(0.3, 2.0).unwrap(), bessel_k(-0.3, 2.0).unwrap());
        assert!(rel(bessel_k(0.3, 2.0).unwrap(), 0.116_036_974_348_119_26) < 1e-12);
    }

    #[test]
    fn frozen_reference_values() {
        // mpmath besselk, 30 digits
        let cases = [
            (0.1, 1e-6, 19.043_892_581_433_071_644),
            (0.3, 0.01, 6.890_102_638_292_769_543_2),
            (0.7, 0.5, 1.238_457_927_072_980_685_8),
            (0.25, 1.9, 0.130_600_563_447_080_034_56),
            (0.5, 2.1, 0.105_908_758_996_953_578_38),
            (0.9, 5.0, 0.003_975_058_220_110_540_783_3),
            (1.2, 0.3, 4.214_038_494_266_177_741_2),
            (1.7, 10.0, 0.000_020_404_704_827_133_553_87),
            (0.45, 50.0, 3.417_012_549_613_609_002_9e-23),
            (1.99, 3.0, 0.061_167_311_650_013_743_543),
        ];
        for (nu, x, want) in cases {
            let got = bessel_k(nu, x).unwrap();
            assert!(rel(got, want) < 1e-10, "K({nu},{x}) = {got}, want {want}");
        }
    }

    #[test]
    fn three_term_recurrence() {
        // K_{ν+1} − K_{ν−1} − (2ν/x) K_ν = 0
        for &nu in &[0.15, 0.4, 0.5, 0.8, 0.95] {
            for &x in &[1e-3, 0.2, 1.0, 1.99, 2.01, 4.0, 20.0] {
                let kp = bessel_k(nu + 1.0, x).unwrap();
                let km = bessel_k(nu - 1.0, x).unwrap();
                let k = bessel_k(nu, x).unwrap();
                let resid = kp - km - 2.0 * nu / x * k;
                assert!(resid.abs() <= 1e-9 * kp.abs(), "nu={nu} x={x}: {resid}");
            }
        }
    }

    #[test]
    fn asymptotics() {
        let g: f64 = 0.3;
        let y: f64 = 1e-6;
        let small = gamma_fn(g).unwrap() / 2.0 * (2.0 / y).powf(g);
        assert!(rel(bessel_k(g, y).unwrap(), small) < 1e-3);
        let y = 45.0;
        let large = (PI / (2.0 * y)).sqrt() * (-y).exp();
        assert!(rel(bessel_k(g, y).unwrap(), large) < 1e-2);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for &(nu, x) in &[(0.3, 0.7), (0.75, 2.5), (1.4, 1.2)] {
            let h = 1e-5;
            let fd = (bessel_k(nu, x + h).unwrap() - bessel_k(nu, x - h).unwrap()) / (2.0 * h);
            assert!(rel(bessel_k_deriv(nu, x).unwrap(), fd) < 1e-8);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(bessel_k(0.3, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(bessel_k(0.3, -1.0), Err(Error::Domain { .. })));
        assert!(matches!(bessel_k(2.5, 1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn underflow_is_zero_not_nan() {
        assert_eq!(bessel_k(0.4, 1000.0).unwrap(), 0.0);
    }
}
