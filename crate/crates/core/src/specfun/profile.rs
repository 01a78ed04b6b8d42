use crate::error::Result;
use crate::params::FracParams;
use crate::specfun::bessel_k::k_reduced_pair;
use crate::specfun::gamma_fn;

/// Value and derivative of the extension profile `φ` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiValue {
    pub phi: f64,
    /// `φ'(t)`. At `t = 0` this is the one-sided limit: `0` for `γ > 1/2`,
    /// `−1` for `γ = 1/2` and `−∞` for `γ < 1/2`; callers that need a finite
    /// quantity use the weighted product `t^a φ'(t)`.
    pub dphi: f64,
}

/// The decaying solution of `−φ + (a/t) φ' + φ'' = 0` with `φ(0) = 1`:
/// `φ(t) = c₁ t^γ K_γ(t)`, `c₁ = 2^{1−γ}/Γ(γ)`.
///
/// The derivative is analytic, `φ'(t) = −c₁ t^γ K_{1−γ}(t)`.
pub fn phi_profile(params: &FracParams, t: f64) -> Result<PhiValue> {
    let g = params.gamma();
    if t < 0.0 || !t.is_finite() {
        return Err(crate::error::Error::domain(
            "phi_profile",
            format!("need finite t >= 0, got {t}"),
        ));
    }
    if t == 0.0 {
        let dphi = if g > 0.5 {
            0.0
        } else if g == 0.5 {
            -1.0
        } else {
            f64::NEG_INFINITY
        };
        return Ok(PhiValue { phi: 1.0, dphi });
    }
    let c1 = 2.0_f64.powf(1.0 - g) / gamma_fn(g)?;
    // One reduced-order evaluation yields both K_γ and K_{1−γ}.
    let (k_gamma, k_comp) = if g <= 0.5 {
        let (k_minus, k_next) = k_pair_signed(-g, t)?;
        (k_minus, k_next)
    } else {
        let (k_prev, k_next) = k_pair_signed(g - 1.0, t)?;
        (k_next, k_prev)
    };
    let tg = t.powf(g);
    Ok(PhiValue {
        phi: c1 * tg * k_gamma,
        dphi: -c1 * tg * k_comp,
    })
}

// (K_μ, K_{μ+1}) for μ ∈ [−1/2, 0], straight from the reduced-order routine.
fn k_pair_signed(mu: f64, x: f64) -> Result<(f64, f64)> {
    debug_assert!((-0.5..=0.5).contains(&mu));
    k_reduced_pair(mu, x)
}
