use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos approximation, g = 607/128, 15 terms (Godfrey).
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

fn lanczos_right(x: f64) -> f64 {
    // Γ(x) for x >= 0.5
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // split the power to delay overflow for large x
    let half = t.powf((z + 0.5) / 2.0);
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * acc
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// The Gamma function on the real line.
///
/// Uses the reflection formula `Γ(x)Γ(1−x) = π / sin(πx)` for `x < 1/2`.
/// Non-positive integers are poles and return a domain error.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("gamma_fn", format!("non-finite argument {x}")));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::domain("gamma_fn", format!("pole at x = {x}")));
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        Ok(PI / (s * lanczos_right(1.0 - x)))
    } else {
        Ok(lanczos_right(x))
    }
}

/// Reciprocal Gamma `1/Γ(x)`; entire, so it vanishes at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x < 0.5 {
        (PI * x).sin() * lanczos_right(1.0 - x) / PI
    } else {
        1.0 / lanczos_right(x)
    }
}

/// Euler Beta function `B(p, q) = Γ(p)Γ(q)/Γ(p+q)` for positive arguments.
pub fn beta_fn(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && q > 0.0) {
        return Err(Error::domain("beta_fn", format!("need p, q > 0, got ({p}, {q})")));
    }
    Ok(gamma_fn(p)? * gamma_fn(q)? * rgamma(p + q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn closed_forms() {
        assert!(rel(gamma_fn(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(gamma_fn(5.0).unwrap(), 24.0) < 1e-14);
        assert!(rel(gamma_fn(-0.5).unwrap(), -2.0 * PI.sqrt()) < 1e-14);
        assert!(rel(gamma_fn(1.0).unwrap(), 1.0) < 1e-15);
    }

    #[test]
    fn factorials_up_to_thirty() {
        let mut fact = 1.0_f64;
        for k in 1..30 {
            // Γ(k+1) = k!
            fact *= k as f64;
            assert!(rel(gamma_fn(k as f64 + 1.0).unwrap(), fact) < 1e-13, "k={k}");
        }
    }

    #[test]
    fn frozen_reference_values() {
        // mpmath, 30 digits
        let cases = [
            (0.1, 9.513_507_698_668_731_836_3),
            (2.5, 1.329_340_388_179_137_020_5),
            (-1.3, 3.328_347_006_788_609_706_9),
            (29.5, 1.634_812_519_827_426_644_4e30),
            (-29.5, 6.514_182_203_267_232_407_7e-32),
            (0.001, 999.423_772_484_595_466_11),
        ];
        for (x, want) in cases {
            let got = gamma_fn(x).unwrap();
            assert!(rel(got, want) < 1e-12, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn poles_are_domain_errors() {
        for x in [0.0, -1.0, -7.0] {
            match gamma_fn(x) {
                Err(Error::Domain { detail, .. }) => assert!(detail.contains("pole")),
                other => panic!("expected pole error, got {other:?}"),
            }
        }
        assert_eq!(rgamma(-3.0), 0.0);
    }

    #[test]
    fn recursion_and_log_convexity() {
        let mut x = 0.1;
        while x <= 20.0 {
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!(rel(lhs, rhs) < 1e-12, "x={x}");
            x += 0.173;
        }
        let xs = [0.2, 0.7, 1.5, 3.3, 8.1, 12.0];
        for &x in &xs {
            for &y in &xs {
                let m = gamma_fn((x + y) / 2.0).unwrap();
                assert!(gamma_fn(x).unwrap() * gamma_fn(y).unwrap() >= m * m * (1.0 - 1e-14));
            }
        }
    }

    #[test]
    fn beta_matches_integral_identity() {
        // B(1/2, 1/2) = π, B(1, q) = 1/q
        assert!(rel(beta_fn(0.5, 0.5).unwrap(), PI) < 1e-14);
        assert!(rel(beta_fn(1.0, 0.3).unwrap(), 1.0 / 0.3) < 1e-14);
    }
}
