use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::c_ext;
use crate::error::{Error, Result};
use crate::params::FracParams;
use crate::specfun::phi_profile;

use super::strip::{GridField, HalfStrip};
use super::system::DirichletSolver;

/// Rows used by the trace fit, the bottom row included.
pub const FIT_ROWS: usize = 4;

fn check_gamma(strip: &HalfStrip, params: &FracParams) -> Result<()> {
    if (strip.a() - params.a()).abs() > 1e-14 {
        return Err(Error::Parameter(format!(
            "strip weight a={} does not match 1-2*gamma={}",
            strip.a(),
            params.a()
        )));
    }
    Ok(())
}

/// Per-column slope `b` of the least-squares fit `U ≈ w + b y^{2γ}` on the
/// first `m` rows.
pub fn fit_fractional_slope(u: &GridField, gamma: f64, m: usize) -> Result<Vec<f64>> {
    let strip = u.strip();
    if m < 3 || m > strip.rows() {
        return Err(Error::Parameter(format!(
            "fit needs 3 <= m <= {} rows, got {m}",
            strip.rows()
        )));
    }
    let t: Vec<f64> = strip.y_nodes()[..m].iter().map(|y| y.powf(2.0 * gamma)).collect();
    let tbar = t.iter().sum::<f64>() / m as f64;
    let stt: f64 = t.iter().map(|v| (v - tbar).powi(2)).sum();
    let scale = t.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if !(stt > 1e-24 * scale * scale * m as f64) {
        return Err(Error::Numeric {
            method: "neumann_trace",
            detail: format!("fit rows are nearly degenerate (spread {stt:e})"),
        });
    }
    Ok((0..strip.nx())
        .map(|i| {
            let ubar = (0..m).map(|j| u.get(i, j)).sum::<f64>() / m as f64;
            (0..m).map(|j| (t[j] - tbar) * (u.get(i, j) - ubar)).sum::<f64>() / stt
        })
        .collect())
}

/// `(−Δ)^γ` of the trace row, recovered as `−C_ext lim y^a ∂_y U`.
///
/// The limit is `2γ b` for the fit `U ≈ w + b y^{2γ}` on the first
/// [`FIT_ROWS`] rows, so the output is `−C_ext · 2γ · b`. The dimension in
/// `params` plays no role.
pub fn neumann_trace(u: &GridField, params: &FracParams) -> Result<Vec<f64>> {
    neumann_trace_with(u, params, FIT_ROWS)
}

pub fn neumann_trace_with(u: &GridField, params: &FracParams, m: usize) -> Result<Vec<f64>> {
    check_gamma(u.strip(), params)?;
    let g = params.gamma();
    let c = c_ext(params);
    Ok(fit_fractional_slope(u, g, m)?
        .into_iter()
        .map(|b| -c * 2.0 * g * b)
        .collect())
}

/// True iff the interior extremes do not exceed the extremes of the trace and
/// cap rows, up to a slack of `1e-12 · max(1, max|U|)`.
pub fn verify_max_principle(u: &GridField) -> bool {
    let rows = u.strip().rows();
    let bounds = |rs: &mut dyn Iterator<Item = usize>| {
        rs.flat_map(|j| u.row(j).iter().copied())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (blo, bhi) = bounds(&mut [0, rows - 1].into_iter());
    let (ilo, ihi) = bounds(&mut (1..rows - 1));
    let big = u.values().iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let slack = 1e-12 * big;
    ilo >= blo - slack && ihi <= bhi + slack
}

/// Outcome of [`hopf_positivity_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfReport {
    /// Estimate of `lim y^a ∂_y U` at the zero of the trace.
    pub value: f64,
    pub zero_index: usize,
    pub zero_x: f64,
    pub solver_residual: f64,
    /// Smallest interior value of the solution.
    pub min_interior: f64,
    pub max_principle: bool,
    /// `value > tol`.
    pub passed: bool,
}

/// Solve with zero cap and return the weighted normal derivative at the
/// zero of a nonnegative trace.
pub fn hopf_positivity_check(
    strip: &HalfStrip,
    params: &FracParams,
    trace: &[f64],
    tol: f64,
) -> Result<HopfReport> {
    check_gamma(strip, params)?;
    if trace.len() != strip.nx() {
        return Err(Error::Dimension(format!(
            "trace has {} values, strip has {} columns",
            trace.len(),
            strip.nx()
        )));
    }
    if let Some(v) = trace.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::domain("hopf_positivity_check", format!("trace must be nonnegative, found {v}")));
    }
    let (zero_index, &zero) = trace
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nx >= 4");
    if zero != 0.0 {
        return Err(Error::domain(
            "hopf_positivity_check",
            format!("trace must vanish somewhere, minimum is {zero}"),
        ));
    }
    let cap = vec![0.0; strip.nx()];
    let solve_tol = 1e-12;
    let (u, stats) = DirichletSolver::new(strip).solve(trace, &cap, solve_tol)?;
    let b = fit_fractional_slope(&u, params.gamma(), FIT_ROWS)?[zero_index];
    let value = 2.0 * params.gamma() * b;
    let rows = strip.rows();
    let min_interior = (1..rows - 1)
        .flat_map(|j| u.row(j).iter().copied())
        .fold(f64::INFINITY, f64::min);
    Ok(HopfReport {
        value,
        zero_index,
        zero_x: strip.x(zero_index),
        solver_residual: stats.relative_residual,
        min_interior,
        max_principle: verify_max_principle(&u),
        passed: value > tol,
    })
}

/// `cos(2π k x/L) φ(2π k y/L)`: the exact extension of a single cosine mode.
pub fn cosine_mode(strip: &HalfStrip, params: &FracParams, mode: u32) -> Result<GridField> {
    check_gamma(strip, params)?;
    let k = 2.0 * PI * f64::from(mode) / strip.period();
    let mut profile = Vec::with_capacity(strip.rows());
    for &y in strip.y_nodes() {
        profile.push(phi_profile(params, k * y)?.phi);
    }
    let mut row = 0usize;
    let mut col = 0usize;
    let nx = strip.nx();
    GridField::from_fn(strip.clone(), |x, _| {
        let v = (k * x).cos() * profile[row];
        col += 1;
        if col == nx {
            col = 0;
            row += 1;
        }
        v
    })
}
