use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::constants::{c_ext, is_solvable_nonumbilic, make_constants, theta_coefficient};
use crate::error::{Error, Result};
use crate::extension::{bubble_fourier, bubble_fourier_closed, sobolev_quotient, BubbleSpec, SpectralGrid};
use crate::halfspace::{
    cosine_mode, hopf_positivity_check, neumann_trace, verify_max_principle, DirichletSolver, HalfStrip,
};
use crate::params::FracParams;
use crate::sphere::{constant_solution_c_beta, subcritical_solve, SolverOptions, ZonalField};

use super::report::{build_id, num, Report, Row};
use super::{CommandKind, ExperimentConfig};

const STRIP_PERIOD: f64 = 2.0 * PI;
const STRIP_HEIGHT: f64 = 8.0;

fn base_row(cfg: &ExperimentConfig, n: u32, gamma: f64) -> Row {
    let mut r = Row::new();
    r.insert("n".into(), n.into());
    r.insert("gamma".into(), num(gamma));
    r.insert("tol".into(), num(cfg.tol));
    r.insert("build_id".into(), build_id().into());
    r
}

// Round every float in a serialized structure.
fn rounded(v: Value) -> Value {
    match v {
        Value::Number(x) if x.is_f64() => num(x.as_f64().expect("f64")),
        Value::Array(xs) => Value::Array(xs.into_iter().map(rounded).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

/// Run the validated experiment.
pub fn execute(cfg: &ExperimentConfig) -> Result<Report> {
    match cfg.command {
        CommandKind::Constants => constants(cfg),
        CommandKind::SolvabilityScan => solvability_scan(cfg),
        CommandKind::SphereYamabe => sphere_yamabe(cfg),
        CommandKind::BubbleCheck => bubble_check(cfg),
        CommandKind::ExtensionDemo => extension_demo(cfg),
        CommandKind::HalfspaceSolve => halfspace_solve(cfg),
        CommandKind::HopfCheck => hopf_check(cfg),
    }
}

fn constants(cfg: &ExperimentConfig) -> Result<Report> {
    let mut rep = Report::new("constants", cfg.seed);
    for &n in &cfg.n {
        for &g in &cfg.gamma {
            let p = FracParams::with_endpoint(n, g)?;
            let bundle = serde_json::to_value(make_constants(&p)?).expect("bundle serializes");
            let mut row = base_row(cfg, n, g);
            if let Value::Object(m) = rounded(bundle) {
                for (k, v) in m {
                    row.entry(k).or_insert(v);
                }
            }
            rep.rows.push(row);
        }
    }
    Ok(rep)
}

fn solvability_scan(cfg: &ExperimentConfig) -> Result<Report> {
    let mut rep = Report::new("solvability-scan", cfg.seed);
    let mut sign_changes = Row::new();
    for &g in &cfg.gamma {
        let mut prev: Option<bool> = None;
        let mut changes = 0u32;
        for &n in &cfg.n {
            let Ok(p) = FracParams::new(n, g) else { continue };
            let theta = theta_coefficient(&p)?;
            let solvable = is_solvable_nonumbilic(&p)?;
            if prev.is_some_and(|s| s != solvable) {
                changes += 1;
            }
            prev = Some(solvable);
            let mut row = base_row(cfg, n, g);
            row.insert("theta_hat".into(), num(theta));
            row.insert("solvable".into(), solvable.into());
            rep.rows.push(row);
        }
        sign_changes.insert(format!("{}", super::sig12(g)), changes.into());
    }
    rep.summary.insert("sign_changes_by_gamma".into(), Value::Object(sign_changes));
    Ok(rep)
}

fn sphere_yamabe(cfg: &ExperimentConfig) -> Result<Report> {
    let p = cfg.params()?;
    let k = cfg.band_limit;
    let mut rep = Report::new("sphere-yamabe", cfg.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut init = ZonalField::constant(p.n(), k, 1.0)?.into_coeffs();
    let c0 = init[0];
    for (j, c) in init.iter_mut().enumerate().skip(1).take(3) {
        *c = cfg.perturb * c0 * rng.gen_range(-1.0..1.0) / (3 * j) as f64;
    }
    let init = ZonalField::new(p.n(), init)?;
    let opts = SolverOptions {
        tol: cfg.tol,
        ..SolverOptions::default()
    };
    let mut betas = cfg.beta.clone();
    betas.sort_by(f64::total_cmp);
    let mut fields = Vec::new();
    let mut prev_c: Option<f64> = None;
    let mut monotone = true;
    let mut all_converged = true;
    for &beta in &betas {
        let (w, report) = subcritical_solve(beta, &init, &p, opts)?;
        let expected = constant_solution_c_beta(&p, beta, opts.normalize_volume)?;
        if let Some(c) = prev_c {
            monotone &= report.c_beta.abs() <= c.abs() + 1e-6;
        }
        prev_c = Some(report.c_beta);
        all_converged &= report.converged_flag;
        let mut row = base_row(cfg, p.n(), p.gamma());
        row.insert("band_limit".into(), k.into());
        row.insert("beta".into(), num(beta));
        row.insert("seed".into(), cfg.seed.into());
        row.insert("perturb".into(), num(cfg.perturb));
        row.insert("c_beta_constant".into(), num(expected));
        let history = report.residual_history.clone();
        if let Value::Object(m) = rounded(serde_json::to_value(&report).expect("report serializes")) {
            for (key, v) in m {
                if key != "residual_history" {
                    row.insert(key, v);
                }
            }
        }
        rep.rows.push(row);
        let mut f = Row::new();
        f.insert("beta".into(), num(beta));
        f.insert("coeffs".into(), w.coeffs().iter().map(|&c| num(c)).collect());
        f.insert("residual_history".into(), history.iter().map(|&c| num(c)).collect());
        fields.push(Value::Object(f));
    }
    rep.summary.insert("c_beta_nonincreasing".into(), monotone.into());
    rep.summary.insert("all_converged".into(), all_converged.into());
    rep.extras.insert("fields".into(), Value::Array(fields));
    if !all_converged {
        // the report is still useful; surface the failure through the exit code
        rep.emit(cfg.format, cfg.out.as_deref())?;
        return Err(Error::NonConvergence {
            method: "subcritical_solve",
            achieved: rep
                .rows
                .iter()
                .filter_map(|r| r.get("final_residual").and_then(Value::as_f64))
                .fold(0.0, f64::max),
            requested: cfg.tol,
        });
    }
    Ok(rep)
}

fn bubble_check(cfg: &ExperimentConfig) -> Result<Report> {
    let p = cfg.params()?;
    let spec = BubbleSpec::new(cfg.mu, p)?;
    let grid = SpectralGrid::for_scale(p.n(), cfg.mu)?;
    let w = bubble_fourier(&spec, &grid)?;
    let q = sobolev_quotient(&w, &p)?;
    let target = 1.0 / make_constants(&p)?.s_bar;
    let mut fourier_err = 0.0_f64;
    for (&rho, &v) in w.nodes().iter().zip(w.values()) {
        if rho * cfg.mu < 15.0 {
            let c = bubble_fourier_closed(&spec, rho)?;
            fourier_err = fourier_err.max(((v - c) / c).abs());
        }
    }
    let mut rep = Report::new("bubble-check", cfg.seed);
    let mut row = base_row(cfg, p.n(), p.gamma());
    row.insert("mu".into(), num(cfg.mu));
    row.insert("quotient".into(), num(q));
    row.insert("inverse_s_bar".into(), num(target));
    row.insert("relative_error".into(), num((q - target).abs() / target));
    row.insert("fourier_max_relative_error".into(), num(fourier_err));
    row.insert("spectral_nodes".into(), w.nodes().len().into());
    rep.rows.push(row);
    Ok(rep)
}

struct ModeSolve {
    max_error: f64,
    dtn_error: f64,
    energy_error: f64,
    iterations: usize,
    residual: f64,
    max_principle: bool,
    field: crate::halfspace::GridField,
}

fn solve_mode(p: &FracParams, nx: usize, ny: usize, mode: u32, tol: f64) -> Result<ModeSolve> {
    let strip = HalfStrip::for_params(p, STRIP_PERIOD, STRIP_HEIGHT, nx, ny)?;
    let exact = cosine_mode(&strip, p, mode)?;
    let solver = DirichletSolver::new(&strip);
    let (u, stats) = solver.solve(exact.trace(), exact.cap(), tol)?;
    let max_error = u
        .values()
        .iter()
        .zip(exact.values())
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    let k = 2.0 * PI * f64::from(mode) / STRIP_PERIOD;
    let mult = k.powf(2.0 * p.gamma());
    let dtn = neumann_trace(&u, p)?;
    let dtn_error = dtn
        .iter()
        .zip(exact.trace())
        .fold(0.0_f64, |m, (d, w)| m.max((d - mult * w).abs()))
        / mult;
    let energy = c_ext(p) * solver.system().energy(&u);
    let want = STRIP_PERIOD / 2.0 * mult;
    Ok(ModeSolve {
        max_error,
        dtn_error,
        energy_error: (energy - want).abs() / want,
        iterations: stats.iterations,
        residual: stats.relative_residual,
        max_principle: verify_max_principle(&u),
        field: u,
    })
}

fn extension_demo(cfg: &ExperimentConfig) -> Result<Report> {
    let p = cfg.params()?;
    let (nx, ny) = cfg.grid;
    let mut levels = vec![(nx, ny)];
    while levels.last().is_some_and(|&(a, b)| a >= 32 && b >= 32 && levels.len() < 5) {
        let (a, b) = *levels.last().expect("nonempty");
        levels.push((a / 2, b / 2));
    }
    levels.reverse();
    let mut rep = Report::new("extension-demo", cfg.seed);
    let mut prev: Option<(f64, f64)> = None;
    let (mut mono_u, mut mono_t) = (true, true);
    for (a, b) in levels {
        let s = solve_mode(&p, a, b, cfg.mode, cfg.tol)?;
        let mut row = base_row(cfg, p.n(), p.gamma());
        row.insert("mode".into(), cfg.mode.into());
        row.insert("nx".into(), a.into());
        row.insert("ny".into(), b.into());
        row.insert("max_error".into(), num(s.max_error));
        row.insert("dtn_relative_error".into(), num(s.dtn_error));
        let order = prev.map_or(Value::Null, |(e, _)| num((e / s.max_error).log2()));
        row.insert("observed_order".into(), order);
        if let Some((e, t)) = prev {
            mono_u &= s.max_error < e;
            mono_t &= s.dtn_error < t;
        }
        prev = Some((s.max_error, s.dtn_error));
        rep.rows.push(row);
    }
    rep.summary.insert("monotone_error".into(), mono_u.into());
    rep.summary.insert("monotone_dtn_error".into(), mono_t.into());
    Ok(rep)
}

fn halfspace_solve(cfg: &ExperimentConfig) -> Result<Report> {
    let p = cfg.params()?;
    let (nx, ny) = cfg.grid;
    let s = solve_mode(&p, nx, ny, cfg.mode, cfg.tol)?;
    if let Some(path) = &cfg.field_out {
        s.field.save(path)?;
    }
    let mut rep = Report::new("halfspace-solve", cfg.seed);
    let mut row = base_row(cfg, p.n(), p.gamma());
    row.insert("mode".into(), cfg.mode.into());
    row.insert("nx".into(), nx.into());
    row.insert("ny".into(), ny.into());
    row.insert("iterations".into(), s.iterations.into());
    row.insert("relative_residual".into(), num(s.residual));
    row.insert("max_error".into(), num(s.max_error));
    row.insert("dtn_relative_error".into(), num(s.dtn_error));
    row.insert("energy_relative_error".into(), num(s.energy_error));
    row.insert("max_principle".into(), s.max_principle.into());
    rep.rows.push(row);
    Ok(rep)
}

fn hopf_check(cfg: &ExperimentConfig) -> Result<Report> {
    let p = cfg.params()?;
    let (nx, ny) = cfg.grid;
    let strip = HalfStrip::for_params(&p, STRIP_PERIOD, STRIP_PERIOD, nx, ny)?;
    let bump: Vec<f64> = (0..nx).map(|i| 1.0 - (2.0 * PI * strip.x(i) / STRIP_PERIOD).cos()).collect();
    let mut rep = Report::new("hopf-check", cfg.seed);
    for (case, trace) in [("one-minus-cos", bump), ("zero", vec![0.0; nx])] {
        let r = hopf_positivity_check(&strip, &p, &trace, cfg.tol)?;
        let mut row = base_row(cfg, p.n(), p.gamma());
        row.insert("case".into(), case.into());
        row.insert("nx".into(), nx.into());
        row.insert("ny".into(), ny.into());
        if let Value::Object(m) = rounded(serde_json::to_value(r).expect("report serializes")) {
            row.extend(m);
        }
        row.insert(
            "above_solver_noise".into(),
            (r.value > 10.0 * r.solver_residual).into(),
        );
        rep.rows.push(row);
    }
    Ok(rep)
}
