use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::FracParams;
use crate::specfun::{gamma_fn, rgamma, sphere_volume};

use super::basis::ZonalBasis;
use super::field::ZonalField;

/// `Γ(k + n/2 + γ)/Γ(k + n/2 − γ)` for `k = 0..=K`: the eigenvalues of
/// `P_γ` on degree-`k` harmonics of the round `Sⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereOperatorSpec {
    pub params: FracParams,
    pub multipliers: Vec<f64>,
}

/// Multipliers `k = 0..=kmax`, by the ratio recurrence once the arguments
/// are past the possible pole at `n/2 − γ = 0` (only `n = 2, γ = 1`).
pub fn multipliers(params: &FracParams, kmax: usize) -> Vec<f64> {
    let h = params.dim() / 2.0;
    let g = params.gamma();
    let mut out = Vec::with_capacity(kmax + 1);
    let mut prev: Option<f64> = None;
    for k in 0..=kmax {
        let kf = k as f64;
        let m = match prev {
            Some(p) if p != 0.0 => p * (kf - 1.0 + h + g) / (kf - 1.0 + h - g),
            _ => gamma_fn(kf + h + g).expect("positive argument") * rgamma(kf + h - g),
        };
        out.push(m);
        prev = Some(m);
    }
    out
}

impl SphereOperatorSpec {
    pub fn new(params: FracParams, band_limit: usize) -> Self {
        Self {
            multipliers: multipliers(&params, band_limit),
            params,
        }
    }

    pub fn band_limit(&self) -> usize {
        self.multipliers.len() - 1
    }

    fn extended(&self, k: usize) -> Self {
        if k <= self.band_limit() {
            return Self {
                params: self.params,
                multipliers: self.multipliers[..=k].to_vec(),
            };
        }
        Self::new(self.params, k)
    }
}

fn check(field: &ZonalField, spec: &SphereOperatorSpec) -> Result<()> {
    if field.n() != spec.params.n() || field.band_limit() != spec.band_limit() {
        return Err(Error::Dimension(format!(
            "operator (n={}, K={}) applied to field (n={}, K={})",
            spec.params.n(),
            spec.band_limit(),
            field.n(),
            field.band_limit()
        )));
    }
    Ok(())
}

/// `P_γ` on the round sphere: coefficientwise multiplication.
pub fn pgamma_apply(field: &ZonalField, spec: &SphereOperatorSpec) -> Result<ZonalField> {
    check(field, spec)?;
    let coeffs = field
        .coeffs()
        .iter()
        .zip(&spec.multipliers)
        .map(|(c, m)| c * m)
        .collect();
    ZonalField::new(field.n(), coeffs)
}

/// `Q_γ = P_γ(1) = Γ(n/2+γ)/Γ(n/2−γ)` of the round metric.
pub fn qgamma_round(params: &FracParams) -> Result<f64> {
    let h = params.dim() / 2.0;
    let g = params.gamma();
    if h - g <= 0.0 {
        return Err(Error::Parameter(format!(
            "Q_gamma has a pole at n/2 - gamma = {}",
            h - g
        )));
    }
    Ok(gamma_fn(h + g)? / gamma_fn(h - g)?)
}

/// Exponent `(n+2γ)/(n−2γ)` of the conformal covariance law.
pub(crate) fn covariance_exponent(params: &FracParams) -> f64 {
    (params.dim() + 2.0 * params.gamma()) / (params.dim() - 2.0 * params.gamma())
}

/// `P_γ` of the metric `w^{4/(n−2γ)} ĥ` applied to `φ`:
/// `w^{−(n+2γ)/(n−2γ)} P_γ(w φ)`.
///
/// Both inputs have band limit `K`. The product `wφ` is formed exactly at
/// `2K+1` nodes and the result is returned with band limit `2K`.
pub fn conformal_pgamma(
    wfactor: &ZonalField,
    phi: &ZonalField,
    spec: &SphereOperatorSpec,
) -> Result<ZonalField> {
    check(wfactor, spec)?;
    check(phi, spec)?;
    let k = spec.band_limit();
    let kp = 2 * k;
    let basis = ZonalBasis::cached(wfactor.n(), kp + 1, kp);
    let w = wfactor.values_on(&basis)?;
    if let Some((j, &v)) = w.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        return Err(Error::domain(
            "conformal_pgamma",
            format!("conformal factor must be positive, got {v} at node {j}"),
        ));
    }
    let f = phi.values_on(&basis)?;
    let prod: Vec<f64> = w.iter().zip(&f).map(|(a, b)| a * b).collect();
    let big = spec.extended(kp);
    let pw = pgamma_apply(&ZonalField::from_values_on(&basis, &prod, kp)?, &big)?;
    let p = covariance_exponent(&spec.params);
    let vals: Vec<f64> = pw
        .values_on(&basis)?
        .iter()
        .zip(&w)
        .map(|(v, w)| v * w.powf(-p))
        .collect();
    ZonalField::from_values_on(&basis, &vals, kp)
}

fn quotient_nodes(k: usize) -> usize {
    (2 * k + 1).max(16)
}

/// `I_γ[w] = ∫ w P_γ w dv / (∫ |w|^{2*} dv)^{2/2*}` on the round sphere.
pub fn yamabe_functional(w: &ZonalField, params: &FracParams) -> Result<f64> {
    if w.n() != params.n() {
        return Err(Error::Dimension("field and parameters disagree on n".into()));
    }
    let k = w.band_limit();
    let spec = SphereOperatorSpec::new(*params, k);
    let num = w.inner(&pgamma_apply(w, &spec)?);
    let basis = ZonalBasis::cached(w.n(), quotient_nodes(k), k);
    let ts = params.two_star();
    let vals = w.values_on(&basis)?;
    let den = basis.integrate(&vals.iter().map(|v| v.abs().powf(ts)).collect::<Vec<_>>());
    if den == 0.0 {
        return Err(Error::domain("yamabe_functional", "input field is zero"));
    }
    Ok(num / den.powf(2.0 / ts))
}

/// `I_γ[w]` in the metric `v^{4/(n−2γ)} ĥ`: numerator through
/// [`conformal_pgamma`], volume element `v^{2*} dv`.
pub fn yamabe_functional_conformal(
    w: &ZonalField,
    v: &ZonalField,
    params: &FracParams,
) -> Result<f64> {
    let k = w.band_limit();
    let spec = SphereOperatorSpec::new(*params, k);
    let pw = conformal_pgamma(v, w, &spec)?;
    let kp = pw.band_limit();
    let basis = ZonalBasis::cached(w.n(), 2 * kp + 1, kp);
    let wv = w.values_on(&basis)?;
    let vv = v.values_on(&basis)?;
    let pv = pw.values_on(&basis)?;
    let ts = params.two_star();
    let num: Vec<f64> = (0..basis.len())
        .map(|j| wv[j] * pv[j] * vv[j].powf(ts))
        .collect();
    let den: Vec<f64> = (0..basis.len())
        .map(|j| wv[j].abs().powf(ts) * vv[j].powf(ts))
        .collect();
    let den = basis.integrate(&den);
    if den == 0.0 {
        return Err(Error::domain("yamabe_functional_conformal", "input field is zero"));
    }
    Ok(basis.integrate(&num) / den.powf(2.0 / ts))
}

/// `Λ_γ(Sⁿ) = Q_γ · vol(Sⁿ)^{2γ/n}`.
pub fn sphere_yamabe_constant(params: &FracParams) -> Result<f64> {
    Ok(qgamma_round(params)? * sphere_volume(params.n()).powf(2.0 * params.gamma() / params.dim()))
}
