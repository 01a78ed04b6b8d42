use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::FracParams;
use crate::specfun::sphere_volume;

use super::basis::ZonalBasis;
use super::field::ZonalField;
use super::operator::{qgamma_round, SphereOperatorSpec};

/// Outcome of [`subcritical_solve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub iterations: usize,
    /// Sup norm over the nodes of the Galerkin residual `P w − c_β Π_K(w^{β−1})`.
    pub final_residual: f64,
    pub c_beta: f64,
    pub min_value: f64,
    /// True iff the solution is strictly positive at every node.
    pub positivity_flag: bool,
    pub converged_flag: bool,
    /// False if the residual increased at some step after the damping was
    /// first reduced.
    pub monotone_after_damping: bool,
    pub final_damping: f64,
    pub residual_history: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Initial damping `ϑ` in `w ← (1−ϑ) w + ϑ T(w)`.
    pub damping: f64,
    /// Work in the round metric rescaled to unit volume.
    pub normalize_volume: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 5000,
            damping: 0.5,
            normalize_volume: true,
        }
    }
}

const MIN_DAMPING: f64 = 1.0 / 1024.0;

// The metric λ²·round with λ^n = 1/vol when normalizing: volume element
// scales by λ^n, the operator by λ^{−2γ}.
struct Metric {
    vol_factor: f64,
    op_factor: f64,
}

impl Metric {
    fn new(params: &FracParams, normalize: bool) -> Self {
        if !normalize {
            return Self {
                vol_factor: 1.0,
                op_factor: 1.0,
            };
        }
        let vol = sphere_volume(params.n());
        Self {
            vol_factor: 1.0 / vol,
            op_factor: vol.powf(2.0 * params.gamma() / params.dim()),
        }
    }
}

/// `c_β` of the constant solution normalized by `∫ w^β = 1`:
/// `Q_γ · vol^{(β−2)/β}`, both taken in the metric the solver works in.
pub fn constant_solution_c_beta(params: &FracParams, beta: f64, normalize_volume: bool) -> Result<f64> {
    let vol = sphere_volume(params.n());
    let q = qgamma_round(params)?;
    if normalize_volume {
        // vol = 1 and Q_γ = λ^{−2γ} Q_γ(round)
        Ok(q * vol.powf(2.0 * params.gamma() / params.dim()))
    } else {
        Ok(q * vol.powf((beta - 2.0) / beta))
    }
}

struct State<'a> {
    basis: &'a ZonalBasis,
    spec: &'a SphereOperatorSpec,
    metric: Metric,
    beta: f64,
    k: usize,
}

impl State<'_> {
    fn apply(&self, c: &[f64]) -> Vec<f64> {
        c.iter()
            .zip(&self.spec.multipliers)
            .map(|(c, m)| c * m * self.metric.op_factor)
            .collect()
    }

    fn solve(&self, c: &[f64]) -> Vec<f64> {
        c.iter()
            .zip(&self.spec.multipliers)
            .map(|(c, m)| c / (m * self.metric.op_factor))
            .collect()
    }

    // ∫ |w|^β dv in the working metric
    fn beta_mass(&self, vals: &[f64]) -> f64 {
        let p: Vec<f64> = vals.iter().map(|v| v.abs().powf(self.beta)).collect();
        self.basis.integrate(&p) * self.metric.vol_factor
    }

    fn normalize(&self, c: &mut [f64]) -> Result<()> {
        let vals = self.basis.synthesize(c);
        let m = self.beta_mass(&vals);
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::Numeric {
                method: "subcritical_solve",
                detail: "iterate collapsed to zero".into(),
            });
        }
        let s = m.powf(-1.0 / self.beta);
        c.iter_mut().for_each(|x| *x *= s);
        Ok(())
    }

    // Π_K(w_+^{β−1}) expressed in the working metric's orthonormal frame
    fn nonlinearity(&self, vals: &[f64]) -> Vec<f64> {
        let f: Vec<f64> = vals.iter().map(|v| v.max(0.0).powf(self.beta - 1.0)).collect();
        self.basis.analyze(&f, self.k)
    }

    fn c_beta(&self, c: &[f64], vals: &[f64]) -> f64 {
        let pw = self.apply(c);
        let num: f64 = c.iter().zip(&pw).map(|(a, b)| a * b).sum::<f64>() * self.metric.vol_factor;
        num / self.beta_mass(vals)
    }

    fn residual(&self, c: &[f64], vals: &[f64], cb: f64) -> f64 {
        let pw = self.apply(c);
        let nl = self.nonlinearity(vals);
        let r: Vec<f64> = pw.iter().zip(&nl).map(|(p, q)| p - cb * q).collect();
        self.basis
            .synthesize(&r)
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Damped fixed-point iteration `w ← normalize(P_γ^{−1}(w_+^{β−1}))` for
/// `P_γ w = c_β w^{β−1}` on `Sⁿ`, normalized by `∫ w^β = 1`.
pub fn subcritical_solve(
    beta: f64,
    init: &ZonalField,
    params: &FracParams,
    opts: SolverOptions,
) -> Result<(ZonalField, SolverReport)> {
    let ts = params.two_star();
    if !(beta >= 2.0 && beta < ts) {
        return Err(Error::Parameter(format!(
            "beta must lie in [2, 2*) = [2, {ts}), got {beta}"
        )));
    }
    if init.n() != params.n() {
        return Err(Error::Dimension("initial field and parameters disagree on n".into()));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) || !(opts.tol > 0.0) {
        return Err(Error::Parameter("damping must lie in (0, 1] and tol be positive".into()));
    }
    let k = init.band_limit();
    let basis = ZonalBasis::cached(params.n(), 2 * k + 1, k);
    let spec = SphereOperatorSpec::new(*params, k);
    let st = State {
        basis: &basis,
        spec: &spec,
        metric: Metric::new(params, opts.normalize_volume),
        beta,
        k,
    };
    let init_vals = basis.synthesize(init.coeffs());
    if init_vals.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::domain(
            "subcritical_solve",
            "initial field must be positive at every node",
        ));
    }

    let mut c = init.coeffs().to_vec();
    st.normalize(&mut c)?;
    let mut vals = basis.synthesize(&c);
    let mut cb = st.c_beta(&c, &vals);
    let mut res = st.residual(&c, &vals, cb);
    let mut history = vec![res];
    let mut theta = opts.damping;
    let mut damped = false;
    let mut monotone = true;
    let mut iterations = 0;
    while res > opts.tol && iterations < opts.max_iter {
        iterations += 1;
        let mut step = st.solve(&st.nonlinearity(&vals));
        st.normalize(&mut step)?;
        let mut next: Vec<f64> = c
            .iter()
            .zip(&step)
            .map(|(a, b)| (1.0 - theta) * a + theta * b)
            .collect();
        st.normalize(&mut next)?;
        let next_vals = basis.synthesize(&next);
        let next_cb = st.c_beta(&next, &next_vals);
        let next_res = st.residual(&next, &next_vals, next_cb);
        if next_res > res {
            if damped {
                monotone = false;
            }
            if theta > MIN_DAMPING {
                theta *= 0.5;
                damped = true;
            }
        } else {
            // transient sup-norm bumps must not stall the iteration for good
            theta = (2.0 * theta).min(opts.damping);
        }
        c = next;
        vals = next_vals;
        cb = next_cb;
        res = next_res;
        history.push(res);
    }
    let min_value = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let report = SolverReport {
        iterations,
        final_residual: res,
        c_beta: cb,
        min_value,
        positivity_flag: min_value > 0.0,
        converged_flag: res <= opts.tol,
        monotone_after_damping: monotone,
        final_damping: theta,
        residual_history: history,
    };
    Ok((ZonalField::new(params.n(), c)?, report))
}
