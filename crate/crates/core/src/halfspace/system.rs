use std::sync::Arc;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::strip::{GridField, HalfStrip};

/// Five-point finite-volume discretization of `−div(y^a ∇U) + E U = 0`.
///
/// The vertical flux between rows `j` and `j+1` uses the exact conductance
/// `g = (1/∫ y^{−a} dy)` over the interval, so `y^{1−a}` is reproduced
/// exactly; the horizontal flux uses the weight mass `m_j = ∫ y^a dy` of the
/// dual cell of row `j`. Equations are scaled by the cell width `hx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    /// `g_{j+1/2}` for `j = 0..=ny`.
    pub conductance: Vec<f64>,
    /// `m_j` for all `ny + 2` rows.
    pub mass: Vec<f64>,
    /// Unweighted dual-cell lengths for all rows.
    pub cell: Vec<f64>,
    /// Potential `E` on the interior nodes (`nx · ny`, row-major), if any.
    pub potential: Option<Vec<f64>>,
}

/// Coefficients of one interior equation; neighbors carry their sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub center: f64,
    pub west: f64,
    pub east: f64,
    pub south: f64,
    pub north: f64,
}

fn power_integral(p: f64, lo: f64, hi: f64) -> f64 {
    // ∫_lo^hi y^p dy for p > −1
    (hi.powf(p + 1.0) - lo.powf(p + 1.0)) / (p + 1.0)
}

/// The system for the model problem, `E ≡ 0`.
pub fn assemble(strip: &HalfStrip) -> LinearSystem {
    let y = strip.y_nodes();
    let a = strip.a();
    let rows = strip.rows();
    let conductance = y
        .windows(2)
        .map(|w| 1.0 / power_integral(-a, w[0], w[1]))
        .collect();
    let edge = |j: usize| -> (f64, f64) {
        let lo = if j == 0 { 0.0 } else { 0.5 * (y[j - 1] + y[j]) };
        let hi = if j + 1 == rows { y[j] } else { 0.5 * (y[j] + y[j + 1]) };
        (lo, hi)
    };
    let mass = (0..rows)
        .map(|j| {
            let (lo, hi) = edge(j);
            power_integral(a, lo, hi)
        })
        .collect();
    let cell = (0..rows)
        .map(|j| {
            let (lo, hi) = edge(j);
            hi - lo
        })
        .collect();
    LinearSystem {
        nx: strip.nx(),
        ny: strip.ny(),
        hx: strip.hx(),
        conductance,
        mass,
        cell,
        potential: None,
    }
}

/// [`assemble`] plus a nonnegative potential term `∫_{cell} E U`, one value
/// per interior node. No curvature is computed; the values are taken as given.
pub fn assemble_with_potential(strip: &HalfStrip, potential: Vec<f64>) -> Result<LinearSystem> {
    let want = strip.nx() * strip.ny();
    if potential.len() != want {
        return Err(Error::Dimension(format!(
            "potential has {} values, interior has {want}",
            potential.len()
        )));
    }
    if potential.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(Error::Parameter("potential must be finite and nonnegative".into()));
    }
    let mut sys = assemble(strip);
    sys.potential = Some(potential);
    Ok(sys)
}

impl LinearSystem {
    /// Number of unknowns, `nx · ny`.
    pub fn size(&self) -> usize {
        self.nx * self.ny
    }

    /// Equation at column `i`, full-grid row `j ∈ 1..=ny`.
    pub fn stencil(&self, i: usize, j: usize) -> Stencil {
        assert!((1..=self.ny).contains(&j) && i < self.nx);
        let south = -self.hx * self.conductance[j - 1];
        let north = -self.hx * self.conductance[j];
        let side = -self.mass[j] / self.hx;
        let e = self
            .potential
            .as_ref()
            .map_or(0.0, |p| p[(j - 1) * self.nx + i] * self.hx * self.cell[j]);
        Stencil {
            center: -(south + north + 2.0 * side) + e,
            west: side,
            east: side,
            south,
            north,
        }
    }

    /// `A u` on the interior unknowns with homogeneous boundary rows.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let mut out = vec![0.0; nx * ny];
        for jj in 0..ny {
            let j = jj + 1;
            let gs = self.hx * self.conductance[j - 1];
            let gn = self.hx * self.conductance[j];
            let side = self.mass[j] / self.hx;
            let diag_e = self.hx * self.cell[j];
            for i in 0..nx {
                let c = u[jj * nx + i];
                let w = u[jj * nx + (i + nx - 1) % nx];
                let e = u[jj * nx + (i + 1) % nx];
                let s = if jj > 0 { u[(jj - 1) * nx + i] } else { 0.0 };
                let n = if jj + 1 < ny { u[(jj + 1) * nx + i] } else { 0.0 };
                let mut v = gs * (c - s) + gn * (c - n) + side * (2.0 * c - w - e);
                if let Some(p) = &self.potential {
                    v += p[jj * nx + i] * diag_e * c;
                }
                out[jj * nx + i] = v;
            }
        }
        out
    }

    /// Right-hand side produced by the trace and cap rows.
    pub fn boundary_rhs(&self, trace: &[f64], cap: &[f64]) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let mut b = vec![0.0; nx * ny];
        let gs = self.hx * self.conductance[0];
        let gn = self.hx * self.conductance[ny];
        for i in 0..nx {
            b[i] += gs * trace[i];
            b[(ny - 1) * nx + i] += gn * cap[i];
        }
        b
    }

    /// Dense matrix of the interior system; for small grids only.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for col in 0..n {
            e[col] = 1.0;
            let c = self.apply(&e);
            e[col] = 0.0;
            for (row, v) in c.into_iter().enumerate() {
                m[(row, col)] = v;
            }
        }
        m
    }

    /// Discrete weighted Dirichlet energy `Σ y^a |∇U|²` of a full-grid field.
    pub fn energy(&self, u: &GridField) -> f64 {
        let nx = self.nx;
        let mut vertical = 0.0;
        for (j, g) in self.conductance.iter().enumerate() {
            let lo = u.row(j);
            let hi = u.row(j + 1);
            vertical += g * lo.iter().zip(hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>();
        }
        let mut horizontal = 0.0;
        for (j, m) in self.mass.iter().enumerate() {
            let r = u.row(j);
            let s: f64 = (0..nx).map(|i| (r[(i + 1) % nx] - r[i]).powi(2)).sum();
            horizontal += m * s;
        }
        self.hx * vertical + horizontal / self.hx
    }
}

/// Exact inverse of the `E ≡ 0` operator (with the column-averaged potential
/// folded in): FFT along `x`, then one tridiagonal solve in `y` per mode.
struct Preconditioner {
    nx: usize,
    ny: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    // Thomas factors per mode k: modified super-diagonal and pivots, [k*ny + jj]
    upper: Vec<f64>,
    pivot: Vec<f64>,
    lower: Vec<f64>,
}

impl Preconditioner {
    fn new(sys: &LinearSystem) -> Self {
        let (nx, ny) = (sys.nx, sys.ny);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(nx);
        let inverse = planner.plan_fft_inverse(nx);
        let mean_e: Vec<f64> = (0..ny)
            .map(|jj| {
                sys.potential.as_ref().map_or(0.0, |p| {
                    p[jj * nx..(jj + 1) * nx].iter().sum::<f64>() / nx as f64 * sys.hx * sys.cell[jj + 1]
                })
            })
            .collect();
        let mut upper = vec![0.0; nx * ny];
        let mut pivot = vec![0.0; nx * ny];
        let mut lower = vec![0.0; nx * ny];
        for k in 0..nx {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / nx as f64;
            let lam = 2.0 * (1.0 - theta.cos()) / sys.hx;
            let mut prev_upper = 0.0;
            for jj in 0..ny {
                let j = jj + 1;
                let s = -sys.hx * sys.conductance[j - 1];
                let n = -sys.hx * sys.conductance[j];
                let d = -(s + n) + lam * sys.mass[j] + mean_e[jj];
                let sub = if jj > 0 { s } else { 0.0 };
                let p = d - sub * prev_upper;
                let u = if jj + 1 < ny { n / p } else { 0.0 };
                pivot[k * ny + jj] = p;
                upper[k * ny + jj] = u;
                lower[k * ny + jj] = sub;
                prev_upper = u;
            }
        }
        Self {
            nx,
            ny,
            forward,
            inverse,
            upper,
            pivot,
            lower,
        }
    }

    fn apply(&self, r: &[f64]) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let mut spec: Vec<Complex<f64>> = r.iter().map(|&v| Complex::new(v, 0.0)).collect();
        for row in spec.chunks_exact_mut(nx) {
            self.forward.process(row);
        }
        let mut col = vec![Complex::new(0.0, 0.0); ny];
        for k in 0..nx {
            let base = k * ny;
            let mut prev = Complex::new(0.0, 0.0);
            for jj in 0..ny {
                let v = (spec[jj * nx + k] - prev * self.lower[base + jj]) / self.pivot[base + jj];
                col[jj] = v;
                prev = v;
            }
            for jj in (0..ny.saturating_sub(1)).rev() {
                col[jj] = col[jj] - col[jj + 1] * self.upper[base + jj];
            }
            for jj in 0..ny {
                spec[jj * nx + k] = col[jj];
            }
        }
        let scale = 1.0 / nx as f64;
        for row in spec.chunks_exact_mut(nx) {
            self.inverse.process(row);
        }
        spec.iter().map(|c| c.re * scale).collect()
    }
}

/// Convergence data of one Dirichlet solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub iterations: usize,
    /// `‖b − A u‖₂ / ‖b‖₂` at exit (zero for homogeneous data).
    pub relative_residual: f64,
}

pub const MAX_PCG_ITER: usize = 500;

/// Reusable factorization for repeated solves on one strip.
pub struct DirichletSolver {
    strip: HalfStrip,
    system: LinearSystem,
    precond: Preconditioner,
}

impl DirichletSolver {
    pub fn new(strip: &HalfStrip) -> Self {
        Self::from_system(strip, assemble(strip))
    }

    pub fn with_potential(strip: &HalfStrip, potential: Vec<f64>) -> Result<Self> {
        Ok(Self::from_system(strip, assemble_with_potential(strip, potential)?))
    }

    fn from_system(strip: &HalfStrip, system: LinearSystem) -> Self {
        let precond = Preconditioner::new(&system);
        Self {
            strip: strip.clone(),
            system,
            precond,
        }
    }

    pub fn system(&self) -> &LinearSystem {
        &self.system
    }

    /// Preconditioned conjugate gradients to relative residual `tol`.
    pub fn solve(&self, trace: &[f64], cap: &[f64], tol: f64) -> Result<(GridField, SolveStats)> {
        let nx = self.strip.nx();
        if trace.len() != nx || cap.len() != nx {
            return Err(Error::Dimension(format!(
                "boundary rows need {nx} values, got {} and {}",
                trace.len(),
                cap.len()
            )));
        }
        if trace.iter().chain(cap).any(|v| !v.is_finite()) {
            return Err(Error::Parameter("boundary data must be finite".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
        }
        let b = self.system.boundary_rhs(trace, cap);
        let bnorm = norm(&b);
        let mut u = vec![0.0; b.len()];
        let mut stats = SolveStats {
            iterations: 0,
            relative_residual: 0.0,
        };
        if bnorm > 0.0 {
            let mut r = b.clone();
            let mut z = self.precond.apply(&r);
            let mut p = z.clone();
            let mut rz = dot(&r, &z);
            while stats.iterations < MAX_PCG_ITER {
                stats.iterations += 1;
                let ap = self.system.apply(&p);
                let alpha = rz / dot(&p, &ap);
                axpy(&mut u, alpha, &p);
                axpy(&mut r, -alpha, &ap);
                if norm(&r) / bnorm <= tol {
                    break;
                }
                z = self.precond.apply(&r);
                let rz_next = dot(&r, &z);
                let beta = rz_next / rz;
                rz = rz_next;
                for (pi, zi) in p.iter_mut().zip(&z) {
                    *pi = zi + beta * *pi;
                }
            }
            // the recursive residual drifts; report the true one
            let au = self.system.apply(&u);
            let true_rel = norm(&b.iter().zip(&au).map(|(x, y)| x - y).collect::<Vec<_>>()) / bnorm;
            stats.relative_residual = true_rel;
            if !(stats.relative_residual <= tol) {
                return Err(Error::NonConvergence {
                    method: "solve_dirichlet",
                    achieved: stats.relative_residual,
                    requested: tol,
                });
            }
        }
        let mut values = Vec::with_capacity(nx * self.strip.rows());
        values.extend_from_slice(trace);
        values.extend_from_slice(&u);
        values.extend_from_slice(cap);
        Ok((GridField::new(self.strip.clone(), values)?, stats))
    }
}

/// Solve `div(y^a ∇U) = 0` with `U = trace` at `y = 0` and `U = cap` at `y = Y`.
pub fn solve_dirichlet(strip: &HalfStrip, trace: &[f64], cap: &[f64], tol: f64) -> Result<GridField> {
    Ok(DirichletSolver::new(strip).solve(trace, cap, tol)?.0)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
