use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::specfun::{gamma_fn, sphere_volume};

/// Gauss quadrature in `x = cos θ` for zonal functions on `Sⁿ`, together
/// with the orthonormal zonal harmonics `Y_k` tabulated at the nodes.
///
/// `∫_{Sⁿ} f dv = |S^{n−1}| ∫_{−1}^{1} f(x) (1−x²)^{(n−2)/2} dx`, and
/// `Y_k = p_k / √|S^{n−1}|` with `p_k` orthonormal for the Jacobi weight
/// `(1−x²)^α`, `α = (n−2)/2` (Gegenbauer polynomials of index `(n−1)/2`).
#[derive(Debug)]
pub struct ZonalBasis {
    pub n: u32,
    pub nodes: Vec<f64>,
    /// Sphere weights: `Σ_j weights[j] f(x_j) = ∫_{Sⁿ} f dv` for polynomials
    /// of degree `< 2m`.
    pub weights: Vec<f64>,
    pub max_degree: usize,
    // y[k * m + j] = Y_k(x_j)
    y: Vec<f64>,
}

fn alpha(n: u32) -> f64 {
    (f64::from(n) - 2.0) / 2.0
}

// Off-diagonal of the Jacobi matrix: x p_k = b_{k+1} p_{k+1} + b_k p_{k−1}.
fn recurrence_b(k: usize, a: f64) -> f64 {
    let kf = k as f64;
    if k == 1 {
        return (1.0 / (3.0 + 2.0 * a)).sqrt();
    }
    (kf * (kf + 2.0 * a) / ((2.0 * kf + 2.0 * a + 1.0) * (2.0 * kf + 2.0 * a - 1.0))).sqrt()
}

fn weight_mass(a: f64) -> f64 {
    PI.sqrt() * gamma_fn(a + 1.0).expect("a > -1") / gamma_fn(a + 1.5).expect("a > -1")
}

/// Orthonormal `p_0..=p_kmax` at `x`, by the three-term recurrence.
pub(crate) fn orthonormal_polys(n: u32, kmax: usize, x: f64) -> Vec<f64> {
    let a = alpha(n);
    let mut p = Vec::with_capacity(kmax + 1);
    p.push(1.0 / weight_mass(a).sqrt());
    if kmax >= 1 {
        p.push(x * p[0] / recurrence_b(1, a));
    }
    for k in 1..kmax {
        let next = (x * p[k] - recurrence_b(k, a) * p[k - 1]) / recurrence_b(k + 1, a);
        p.push(next);
    }
    p
}

impl ZonalBasis {
    /// `m`-point Gauss rule (Golub–Welsch) and `Y_0..=Y_kmax` at its nodes.
    pub fn new(n: u32, m: usize, kmax: usize) -> Self {
        assert!(n >= 1 && m >= 1, "need n >= 1 and at least one node");
        let a = alpha(n);
        let jac = DMatrix::from_fn(m, m, |i, j| {
            if i + 1 == j {
                recurrence_b(j, a)
            } else if j + 1 == i {
                recurrence_b(i, a)
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(jac);
        let mass = weight_mass(a);
        let surface = sphere_volume(n - 1);
        let mut pairs: Vec<(f64, f64)> = (0..m)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mass * v0 * v0 * surface)
            })
            .collect();
        pairs.sort_by(|l, r| l.0.total_cmp(&r.0));
        // symmetrize: the rule is exactly symmetric about 0
        for i in 0..m / 2 {
            let j = m - 1 - i;
            let x = 0.5 * (pairs[j].0 - pairs[i].0);
            let w = 0.5 * (pairs[j].1 + pairs[i].1);
            pairs[i] = (-x, w);
            pairs[j] = (x, w);
        }
        if m % 2 == 1 {
            pairs[m / 2].0 = 0.0;
        }
        let nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let norm = 1.0 / surface.sqrt();
        let mut y = vec![0.0; (kmax + 1) * m];
        for (j, &x) in nodes.iter().enumerate() {
            for (k, pk) in orthonormal_polys(n, kmax, x).into_iter().enumerate() {
                y[k * m + j] = pk * norm;
            }
        }
        Self {
            n,
            nodes,
            weights,
            max_degree: kmax,
            y,
        }
    }

    /// Shared instance for `(n, m, kmax)`.
    pub fn cached(n: u32, m: usize, kmax: usize) -> Arc<Self> {
        type Key = (u32, usize, usize);
        static CACHE: OnceLock<Mutex<HashMap<Key, Arc<ZonalBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("basis cache poisoned");
        guard
            .entry((n, m, kmax))
            .or_insert_with(|| Arc::new(Self::new(n, m, kmax)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Y_k` at all nodes.
    pub fn harmonic(&self, k: usize) -> &[f64] {
        let m = self.len();
        &self.y[k * m..(k + 1) * m]
    }

    /// Node values of `Σ_k c_k Y_k`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        assert!(coeffs.len() <= self.max_degree + 1, "too many coefficients");
        let mut out = vec![0.0; self.len()];
        for (k, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (o, &y) in out.iter_mut().zip(self.harmonic(k)) {
                *o += c * y;
            }
        }
        out
    }

    /// Coefficients `c_k = ∫ f Y_k dv` for `k ≤ kmax`.
    pub fn analyze(&self, values: &[f64], kmax: usize) -> Vec<f64> {
        assert!(kmax <= self.max_degree && values.len() == self.len());
        (0..=kmax)
            .map(|k| {
                self.harmonic(k)
                    .iter()
                    .zip(values)
                    .zip(&self.weights)
                    .map(|((y, v), w)| y * v * w)
                    .sum()
            })
            .collect()
    }

    /// `∫_{Sⁿ} f dv` from node values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}
