use frac_yamabe::constants::make_constants;
use frac_yamabe::specfun::sphere_volume;
use frac_yamabe::sphere::*;
use frac_yamabe::FracParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(n: u32, g: f64) -> FracParams {
    FracParams::new(n, g).unwrap()
}

/// Positive band-limited field `exp(Σ a_k Y_k)` projected to degree `k`.
fn random_positive(n: u32, k: usize, rng: &mut ChaCha8Rng, amp: f64) -> ZonalField {
    let basis = ZonalBasis::cached(n, 2 * k + 1, k);
    let mut coeffs = vec![0.0; k + 1];
    for c in coeffs.iter_mut().take(4).skip(1) {
        *c = rng.gen_range(-amp..amp);
    }
    let g = ZonalField::new(n, coeffs).unwrap().values_on(&basis).unwrap();
    let vals: Vec<f64> = g.iter().map(|x| x.exp()).collect();
    ZonalField::from_values_on(&basis, &vals, k).unwrap()
}

#[test]
fn endpoint_multipliers_match_conformal_laplacian() {
    for n in [3u32, 4, 5] {
        let q = FracParams::with_endpoint(n, 1.0).unwrap();
        let m = multipliers(&q, 64);
        for (k, &mk) in m.iter().enumerate() {
            let kf = k as f64;
            let nf = f64::from(n);
            let want = kf * (kf + nf - 1.0) + nf * (nf - 2.0) / 4.0;
            assert!((mk - want).abs() <= 1e-10 * want, "n={n} k={k}: {mk} vs {want}");
        }
    }
    let q = FracParams::with_endpoint(3, 1.0).unwrap();
    let m = multipliers(&q, 1);
    assert!((m[0] - 0.75).abs() < 1e-14 && (m[1] - 3.75).abs() < 1e-14);
    assert!((multipliers(&p(4, 0.5), 0)[0] - 1.5).abs() < 1e-14);
    assert!((qgamma_round(&q).unwrap() - 0.75).abs() < 1e-14);
}

#[test]
fn multipliers_positive_increasing() {
    for n in 1..=6 {
        for g in [0.1, 0.3, 0.49, 0.7, 0.95] {
            if f64::from(n) <= 2.0 * g {
                continue;
            }
            let m = multipliers(&p(n, g), 40);
            assert!(m[0] > 0.0);
            assert!(m.windows(2).all(|w| w[1] > w[0]), "n={n} g={g}");
        }
    }
}

#[test]
fn sphere_constant_identity() {
    for n in [3u32, 4, 5] {
        for g in [0.25, 0.5, 0.75] {
            let q = p(n, g);
            let lam = qgamma_round(&q).unwrap() * sphere_volume(n).powf(2.0 * g / f64::from(n));
            let b = make_constants(&q).unwrap();
            assert!((lam - b.lambda_sphere).abs() <= 1e-10 * lam);
            assert!((sphere_yamabe_constant(&q).unwrap() - 1.0 / b.s_sobolev).abs() <= 1e-10 * lam);
        }
    }
}

#[test]
fn transform_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [1u32, 2, 3, 6] {
        let k = 24;
        let coeffs: Vec<f64> = (0..=k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = ZonalField::new(n, coeffs).unwrap();
        let vals = zonal_inverse(&f);
        let back = zonal_transform(&vals, n, k).unwrap();
        let err = back
            .coeffs()
            .iter()
            .zip(f.coeffs())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12, "n={n}: {err}");
        let vals2 = zonal_inverse(&back);
        let err = vals.iter().zip(&vals2).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12);
    }
    assert!(zonal_transform(&[1.0; 4], 3, 4).is_err());
}

#[test]
fn simple_fields_have_single_coefficients() {
    let c = ZonalField::constant(3, 6, 2.5).unwrap();
    let back = zonal_transform(&zonal_inverse_on(&c, 9).unwrap(), 3, 6).unwrap();
    assert!((back.coeffs()[0] - 2.5 * sphere_volume(3).sqrt()).abs() < 1e-12);
    assert!(back.coeffs()[1..].iter().all(|c| c.abs() < 1e-13));
    // degree-1 zonal harmonic is proportional to x
    let (x, _) = gauss_nodes(4, 10);
    let f = zonal_transform(&x, 4, 5).unwrap();
    assert!(f.coeffs()[1].abs() > 0.1);
    for (k, c) in f.coeffs().iter().enumerate() {
        if k != 1 {
            assert!(c.abs() < 1e-13, "k={k}: {c}");
        }
    }
}

#[test]
fn operator_shape_checks() {
    let spec = SphereOperatorSpec::new(p(3, 0.5), 8);
    let f = ZonalField::constant(3, 6, 1.0).unwrap();
    assert!(pgamma_apply(&f, &spec).is_err());
    let f = ZonalField::constant(3, 8, 1.0).unwrap();
    let pf = pgamma_apply(&f, &spec).unwrap();
    assert!((pf.coeffs()[0] - f.coeffs()[0]).abs() < 1e-14); // Q = Γ(2)/Γ(1)
}

#[test]
fn conformal_operator_reductions() {
    let q = p(3, 0.4);
    let k = 12;
    let spec = SphereOperatorSpec::new(q, k);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let phi = random_positive(3, k, &mut rng, 0.3);
    let one = ZonalField::constant(3, k, 1.0).unwrap();
    let a = conformal_pgamma(&one, &phi, &spec).unwrap();
    let b = pgamma_apply(&phi, &spec).unwrap().with_band_limit(2 * k);
    for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
        assert!((x - y).abs() < 1e-12);
    }
    let neg = ZonalField::constant(3, k, -1.0).unwrap();
    assert!(conformal_pgamma(&neg, &phi, &spec).is_err());
}

#[test]
fn yamabe_functional_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (n, g) in [(3u32, 0.5), (4, 0.3), (5, 0.8)] {
        let q = p(n, g);
        let lam = sphere_yamabe_constant(&q).unwrap();
        let c = ZonalField::constant(n, 10, 1.7).unwrap();
        assert!((yamabe_functional(&c, &q).unwrap() - lam).abs() < 1e-12 * lam);
        for _ in 0..20 {
            let w = random_positive(n, 10, &mut rng, 0.5);
            let i1 = yamabe_functional(&w, &q).unwrap();
            assert!(i1 >= lam - 1e-9, "I = {i1} < {lam}");
            let scaled = ZonalField::new(n, w.coeffs().iter().map(|x| 3.0 * x).collect()).unwrap();
            let i2 = yamabe_functional(&scaled, &q).unwrap();
            assert!((i1 - i2).abs() < 1e-12 * i1);
        }
    }
    let zero = ZonalField::new(3, vec![0.0; 4]).unwrap();
    assert!(yamabe_functional(&zero, &p(3, 0.5)).is_err());
}

#[test]
fn yamabe_functional_conformal_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let q = p(3, 0.35);
    let k = 16;
    for _ in 0..5 {
        let w = random_positive(3, k, &mut rng, 0.4);
        let v = random_positive(3, k, &mut rng, 0.2);
        // w·v exactly, at band limit 2K
        let basis = ZonalBasis::cached(3, 4 * k + 1, 2 * k);
        let wv: Vec<f64> = w
            .values_on(&basis)
            .unwrap()
            .iter()
            .zip(v.values_on(&basis).unwrap())
            .map(|(a, b)| a * b)
            .collect();
        let prod = ZonalField::from_values_on(&basis, &wv, 2 * k).unwrap();
        let lhs = yamabe_functional(&prod, &q).unwrap();
        let rhs = yamabe_functional_conformal(&w, &v, &q).unwrap();
        assert!((lhs - rhs).abs() < 1e-8 * lhs, "{lhs} vs {rhs}");
    }
}

#[test]
fn solver_constant_initialization_is_a_fixed_point() {
    let q = p(3, 0.5);
    for normalize in [true, false] {
        for beta in [2.0, 2.4, 2.8] {
            let init = ZonalField::constant(3, 8, 1.0).unwrap();
            let opts = SolverOptions {
                normalize_volume: normalize,
                ..SolverOptions::default()
            };
            let (_, rep) = subcritical_solve(beta, &init, &q, opts).unwrap();
            let want = constant_solution_c_beta(&q, beta, normalize).unwrap();
            assert_eq!(rep.iterations, 0);
            assert!(rep.converged_flag && rep.positivity_flag);
            assert!((rep.c_beta - want).abs() < 1e-12 * want, "beta={beta}");
        }
    }
}

#[test]
fn solver_beta_two_finds_first_eigenpair() {
    let q = p(4, 0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let init = random_positive(4, 10, &mut rng, 0.5);
    let opts = SolverOptions {
        normalize_volume: false,
        ..SolverOptions::default()
    };
    let (_, rep) = subcritical_solve(2.0, &init, &q, opts).unwrap();
    assert!(rep.converged_flag);
    assert!((rep.c_beta - qgamma_round(&q).unwrap()).abs() < 1e-9);
}

#[test]
fn solver_rejects_bad_input() {
    let q = p(3, 0.5);
    let init = ZonalField::constant(3, 4, 1.0).unwrap();
    assert!(subcritical_solve(3.0, &init, &q, SolverOptions::default()).is_err());
    assert!(subcritical_solve(1.5, &init, &q, SolverOptions::default()).is_err());
    let neg = ZonalField::constant(3, 4, -1.0).unwrap();
    assert!(subcritical_solve(2.5, &neg, &q, SolverOptions::default()).is_err());
}

#[test]
fn perturbed_initialization_recovers_the_constant() {
    let q = p(3, 0.5);
    let k = 32;
    let beta = q.two_star() - 0.2;
    let mut c = ZonalField::constant(3, k, 1.0).unwrap().into_coeffs();
    c[1] = 0.3 * c[0];
    let init = ZonalField::new(3, c).unwrap();
    let opts = SolverOptions {
        tol: 1e-9,
        max_iter: 10_000,
        ..SolverOptions::default()
    };
    let (w, rep) = subcritical_solve(beta, &init, &q, opts).unwrap();
    assert!(rep.converged_flag, "{rep:?}");
    assert!(rep.positivity_flag);
    let want = constant_solution_c_beta(&q, beta, true).unwrap();
    assert!((rep.c_beta - want).abs() < 1e-3 * want);
    assert!(w.coeffs()[1..].iter().all(|c| c.abs() < 1e-6));
}

#[test]
fn damping_recovers_after_transient_increase() {
    let q = p(3, 0.5);
    let beta = q.two_star() - 0.2;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut c = ZonalField::constant(3, 32, 1.0).unwrap().into_coeffs();
    let c0 = c[0];
    c[1] = 0.1 * c0;
    for cj in c.iter_mut().take(5).skip(2) {
        *cj = 0.1 * c0 * rng.gen_range(-1.0..1.0) / 3.0;
    }
    let opts = SolverOptions {
        tol: 1e-9,
        max_iter: 5000,
        ..SolverOptions::default()
    };
    let (_, rep) = subcritical_solve(beta, &ZonalField::new(3, c).unwrap(), &q, opts).unwrap();
    let h = &rep.residual_history;
    assert!(h.windows(2).any(|w| w[1] > w[0]), "no increase exercised");
    assert!(rep.converged_flag, "{:e}", rep.final_residual);
    assert_eq!(rep.final_damping, 0.5);
}

#[test]
fn eigenvalue_of_round_sphere() {
    let q = p(3, 0.6);
    let one = ZonalField::constant(3, 12, 1.0).unwrap();
    let e = first_eigenvalue(&one, &q, 1e-12).unwrap();
    assert!((e.lambda1 - qgamma_round(&q).unwrap()).abs() < 1e-12);
    assert!(e.min_value > 0.0);
    assert_eq!(trichotomy_classify(&one, &q).unwrap(), Trichotomy::Positive);
}

#[test]
fn eigenvalue_sign_and_positivity_under_conformal_change() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let q = p(3, 0.5);
    let k = 12;
    for _ in 0..10 {
        let w = random_positive(3, k, &mut rng, 0.6);
        let e = first_eigenvalue(&w, &q, 1e-10).unwrap();
        assert!(e.min_value > 0.0);
        assert!(e.lambda1 > 0.0);
        let v = random_positive(3, k, &mut rng, 0.4);
        let basis = ZonalBasis::cached(3, 2 * k + 1, k);
        let wv: Vec<f64> = w
            .values_on(&basis)
            .unwrap()
            .iter()
            .zip(v.values_on(&basis).unwrap())
            .map(|(a, b)| a * b)
            .collect();
        let w2 = ZonalField::from_values_on(&basis, &wv, k).unwrap();
        let e2 = first_eigenvalue(&w2, &q, 1e-10).unwrap();
        assert_eq!(e.lambda1.signum(), e2.lambda1.signum());
        assert!(e2.min_value > 0.0);
        let scaled = ZonalField::new(3, w.coeffs().iter().map(|c| 2.0 * c).collect()).unwrap();
        assert_eq!(
            trichotomy_classify(&w, &q).unwrap(),
            trichotomy_classify(&scaled, &q).unwrap()
        );
    }
}
