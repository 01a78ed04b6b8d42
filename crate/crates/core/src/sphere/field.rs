use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::basis::{orthonormal_polys, ZonalBasis};
use crate::specfun::sphere_volume;

/// Zonal function on `Sⁿ` as coefficients in the orthonormal zonal
/// harmonics `Y_0, …, Y_K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonalField {
    n: u32,
    coeffs: Vec<f64>,
}

impl ZonalField {
    pub fn new(n: u32, coeffs: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("dimension n must be at least 1".into()));
        }
        if coeffs.is_empty() {
            return Err(Error::Dimension("a zonal field needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parameter("zonal coefficients must be finite".into()));
        }
        Ok(Self { n, coeffs })
    }

    /// The constant function `c`, band limit `k`.
    pub fn constant(n: u32, k: usize, c: f64) -> Result<Self> {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[0] = c * sphere_volume(n).sqrt();
        Self::new(n, coeffs)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Band limit `K`.
    pub fn band_limit(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Zero-padded (or truncated) copy with band limit `k`.
    pub fn with_band_limit(&self, k: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(k + 1, 0.0);
        Self { n: self.n, coeffs }
    }

    /// Value at `x = cos θ`.
    pub fn eval(&self, x: f64) -> f64 {
        let norm = 1.0 / sphere_volume(self.n - 1).sqrt();
        orthonormal_polys(self.n, self.band_limit(), x)
            .iter()
            .zip(&self.coeffs)
            .map(|(p, c)| p * c)
            .sum::<f64>()
            * norm
    }

    /// Values at the nodes of `basis`.
    pub fn values_on(&self, basis: &ZonalBasis) -> Result<Vec<f64>> {
        if basis.n != self.n || basis.max_degree < self.band_limit() {
            return Err(Error::Dimension(format!(
                "basis (n={}, K={}) cannot represent field (n={}, K={})",
                basis.n,
                basis.max_degree,
                self.n,
                self.band_limit()
            )));
        }
        Ok(basis.synthesize(&self.coeffs))
    }

    /// Projection of node values onto degrees `≤ k`.
    pub fn from_values_on(basis: &ZonalBasis, values: &[f64], k: usize) -> Result<Self> {
        if values.len() != basis.len() {
            return Err(Error::Dimension(format!(
                "{} values for {} nodes",
                values.len(),
                basis.len()
            )));
        }
        if k > basis.max_degree {
            return Err(Error::Dimension(format!(
                "basis tabulates degrees up to {}, requested {k}",
                basis.max_degree
            )));
        }
        Self::new(basis.n, basis.analyze(values, k))
    }

    /// `∫_{Sⁿ} f g dv` (exact: Parseval in the orthonormal basis).
    pub fn inner(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }
}

/// Coefficients of band limit `k` from values at the `m ≥ k+1` Gauss nodes
/// of `Sⁿ` (as returned by [`zonal_inverse_on`]).
pub fn zonal_transform(values: &[f64], n: u32, k: usize) -> Result<ZonalField> {
    let m = values.len();
    if m < k + 1 {
        return Err(Error::Dimension(format!(
            "{m} nodes cannot resolve band limit {k} (need at least {})",
            k + 1
        )));
    }
    let basis = ZonalBasis::cached(n, m, k);
    ZonalField::from_values_on(&basis, values, k)
}

/// Values at the `K+1` Gauss nodes.
pub fn zonal_inverse(field: &ZonalField) -> Vec<f64> {
    zonal_inverse_on(field, field.band_limit() + 1).expect("K+1 nodes always suffice")
}

/// Values at `m ≥ K+1` Gauss nodes.
pub fn zonal_inverse_on(field: &ZonalField, m: usize) -> Result<Vec<f64>> {
    if m < field.band_limit() + 1 {
        return Err(Error::Dimension(format!(
            "{m} nodes cannot carry band limit {}",
            field.band_limit()
        )));
    }
    let basis = ZonalBasis::cached(field.n, m, field.band_limit());
    field.values_on(&basis)
}

/// Gauss nodes `x_j = cos θ_j` and sphere weights for `m` points.
pub fn gauss_nodes(n: u32, m: usize) -> (Vec<f64>, Vec<f64>) {
    let b = ZonalBasis::cached(n, m, 0);
    (b.nodes.clone(), b.weights.clone())
}
