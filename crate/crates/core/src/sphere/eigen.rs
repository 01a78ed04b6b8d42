use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::FracParams;

use super::basis::ZonalBasis;
use super::field::ZonalField;
use super::operator::{covariance_exponent, SphereOperatorSpec};

/// Smallest eigenpair of the conformal operator of `w^{4/(n−2γ)} ĥ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstEigenpair {
    pub lambda1: f64,
    /// Eigenfunction, normalized to be positive on average.
    pub eigfield: ZonalField,
    /// Minimum of the eigenfunction over the quadrature nodes.
    pub min_value: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trichotomy {
    Positive,
    Zero,
    Negative,
}

const MAX_ITER: usize = 20_000;

/// Inverse power iteration for `w^{−(n+2γ)/(n−2γ)} P_γ(w φ) = λ φ`.
///
/// With `ψ = wφ` this is the symmetric pencil `P_γ ψ = λ V ψ`,
/// `V = w^{4γ/(n−2γ)}`, discretized by Galerkin projection on degrees
/// `≤ K` with `2K+1` nodes.
pub fn first_eigenvalue(wfactor: &ZonalField, params: &FracParams, tol: f64) -> Result<FirstEigenpair> {
    if wfactor.n() != params.n() {
        return Err(Error::Dimension("conformal factor and parameters disagree on n".into()));
    }
    let k = wfactor.band_limit();
    let basis = ZonalBasis::cached(params.n(), 2 * k + 1, k);
    let spec = SphereOperatorSpec::new(*params, k);
    let w = wfactor.values_on(&basis)?;
    if let Some(&v) = w.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::domain(
            "first_eigenvalue",
            format!("conformal factor must be positive, got {v}"),
        ));
    }
    let q = covariance_exponent(params) - 1.0;
    let v: Vec<f64> = w.iter().map(|x| x.powf(q)).collect();
    let mass = |c: &[f64]| -> Vec<f64> {
        let vals = basis.synthesize(c);
        let prod: Vec<f64> = vals.iter().zip(&v).map(|(a, b)| a * b).collect();
        basis.analyze(&prod, k)
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let apply = |c: &[f64]| -> Vec<f64> {
        c.iter().zip(&spec.multipliers).map(|(c, m)| c * m).collect()
    };

    let mut psi = wfactor.coeffs().to_vec();
    let mut history = Vec::new();
    let mut lambda = f64::NAN;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < MAX_ITER {
        let mpsi = mass(&psi);
        let norm = dot(&psi, &mpsi).sqrt();
        psi.iter_mut().for_each(|x| *x /= norm);
        let mpsi: Vec<f64> = mpsi.iter().map(|x| x / norm).collect();
        let ppsi = apply(&psi);
        lambda = dot(&psi, &ppsi);
        let r: f64 = ppsi
            .iter()
            .zip(&mpsi)
            .map(|(p, m)| (p - lambda * m).powi(2))
            .sum::<f64>()
            .sqrt();
        residual = r / (lambda.abs() * dot(&mpsi, &mpsi).sqrt()).max(f64::MIN_POSITIVE);
        history.push(residual);
        if residual <= tol {
            break;
        }
        iterations += 1;
        psi = mpsi
            .iter()
            .zip(&spec.multipliers)
            .map(|(m, p)| m / p)
            .collect();
    }
    if residual > tol {
        let tail: Vec<String> = history.iter().rev().take(5).map(|r| format!("{r:.3e}")).collect();
        return Err(Error::Numeric {
            method: "first_eigenvalue",
            detail: format!(
                "inverse iteration stagnated after {iterations} steps; last residuals {}",
                tail.join(", ")
            ),
        });
    }
    let psi_vals = basis.synthesize(&psi);
    let mut phi: Vec<f64> = psi_vals.iter().zip(&w).map(|(p, w)| p / w).collect();
    if phi.iter().sum::<f64>() < 0.0 {
        phi.iter_mut().for_each(|x| *x = -*x);
    }
    let min_value = phi.iter().cloned().fold(f64::INFINITY, f64::min);
    let eigfield = ZonalField::from_values_on(&basis, &phi, k)?;
    Ok(FirstEigenpair {
        lambda1: lambda,
        eigfield,
        min_value,
        iterations,
        residual,
    })
}

/// Sign of the first eigenvalue, with `|λ₁| ≤ 1e-9·‖operator‖` read as zero.
pub fn trichotomy_classify(wfactor: &ZonalField, params: &FracParams) -> Result<Trichotomy> {
    let pair = first_eigenvalue(wfactor, params, 1e-10)?;
    let k = wfactor.band_limit();
    let spec = SphereOperatorSpec::new(*params, k);
    let basis = ZonalBasis::cached(params.n(), 2 * k + 1, k);
    let q = covariance_exponent(params) - 1.0;
    let vmin = wfactor
        .values_on(&basis)?
        .iter()
        .map(|x| x.powf(q))
        .fold(f64::INFINITY, f64::min);
    let op_norm = spec.multipliers.last().copied().unwrap_or(1.0).abs() / vmin;
    Ok(if pair.lambda1.abs() <= 1e-9 * op_norm {
        Trichotomy::Zero
    } else if pair.lambda1 > 0.0 {
        Trichotomy::Positive
    } else {
        Trichotomy::Negative
    })
}
