use fracns_core::forces::{make_annulus_force, ForceSpec};
use fracns_core::norms::{lebesgue_norm, lorentz_quasinorm, LorentzParams};
use fracns_core::solver::{
    lift_force, momentum_budget, residual, scaling_check, scaling_check_with, solve_steady,
};
use fracns_core::spectral::{advection_term, dealias, fractional_power, leray_project};
use fracns_core::{Error, FracParams, Grid, SolverConfig, SpectralVectorField};

fn grid() -> Grid {
    Grid::new(32, 8.0).unwrap()
}

fn force(alpha: f64, amplitude: f64) -> SpectralVectorField {
    let g = grid();
    let mut spec = ForceSpec::annulus_ring(amplitude, 5);
    spec.annulus = Some((0.8, 7.5));
    spec.width = Some(0.8);
    spec.anisotropy = [2.0, 1.0, 1.0];
    make_annulus_force(&spec, &g, &FracParams::new(alpha, true)).unwrap()
}

fn config(alpha: f64) -> SolverConfig {
    SolverConfig::new(FracParams::new(alpha, true))
}

#[test]
fn zero_force_is_a_fixed_point() {
    let g = grid();
    let sol = solve_steady(&SpectralVectorField::zeros(g), &config(1.5)).unwrap();
    assert!(sol.diagnostics.iterations <= 1);
    assert_eq!(sol.velocity.max_coefficient(), 0.0);
    assert_eq!(sol.pressure.max_coefficient(), 0.0);
}

#[test]
fn lift_of_a_plane_wave_pair_scales_by_the_symbol() {
    let g = grid();
    let k0 = 3.0 * 2.0 * std::f64::consts::PI / 8.0;
    let mut f = SpectralVectorField::zeros(g);
    let plus = g.index(3, 0, 0);
    let minus = g.negated(plus);
    f.components[1][plus].re = 0.5;
    f.components[1][minus].re = 0.5;
    for alpha in [1.2, 2.0, 2.4] {
        let u = lift_force(&f, &FracParams::new(alpha, true)).unwrap();
        assert!((u.components[1][plus].re - 0.5 * k0.powf(-alpha)).abs() < 1e-15);
        assert!(u.max_divergence() < 1e-15);
    }
    assert_eq!(
        lift_force(&SpectralVectorField::zeros(g), &FracParams::new(1.5, true))
            .unwrap()
            .max_coefficient(),
        0.0
    );
}

#[test]
fn nonzero_mean_force_is_rejected() {
    let g = grid();
    let mut f = SpectralVectorField::zeros(g);
    f.components[0][0].re = 1.0;
    assert_eq!(lift_force(&f, &FracParams::new(1.5, true)), Err(Error::ZeroModeUndefined));
}

#[test]
fn small_force_converges_with_consistent_diagnostics() {
    let alpha = 1.5;
    let params = FracParams::new(alpha, true);
    let f = force(alpha, 0.1);
    let sol = solve_steady(&f, &config(alpha)).unwrap();
    let d = &sol.diagnostics;
    assert!(d.contraction_product < 1.0, "product {}", d.contraction_product);
    assert!(d.within_two_ball);

    let u0 = lift_force(&f, &params).unwrap();
    let weak = LorentzParams::weak(params.critical_exponent()).unwrap();
    let delta = lorentz_quasinorm(&u0.to_physical(), &weak);
    assert!((delta - d.lifted_force_lorentz_norm).abs() < 1e-14 * delta);
    assert!((delta - 0.1).abs() < 1e-12);

    let u = &sol.velocity;
    let scale = fractional_power(u, alpha).unwrap().l2_norm() + leray_project(&f).l2_norm();
    let r = residual(u, &f, &params).unwrap();
    assert!(r < 1e-8 * scale, "residual {r} scale {scale}");
    assert!(r < 1e-8 * u0.l2_norm());
    assert!(u.max_divergence() < 1e-12 * u.max_coefficient());
    assert_eq!(u.zero_mode()[0].norm(), 0.0);
    assert_eq!(sol.pressure.coeffs[0].norm(), 0.0);

    // strictly decreasing, at a rate controlled by the contraction product
    let h = &d.residual_history;
    assert!(h.windows(2).all(|w| w[1] < w[0]), "{h:?}");
    for w in h.windows(2) {
        if w[0] > 1e-10 {
            assert!(w[1] / w[0] <= d.contraction_product + 0.1, "{h:?}");
        }
    }
}

#[test]
fn large_force_is_rejected() {
    let alpha = 1.5;
    let f = force(alpha, 0.1).scaled(1e4);
    match solve_steady(&f, &config(alpha)) {
        Err(Error::Diverged { .. }) | Err(Error::NotConverged { .. }) => {}
        other => panic!("expected failure, got {:?}", other.map(|s| s.diagnostics)),
    }
}

#[test]
fn residual_of_the_lift_is_the_advection_term() {
    let alpha = 1.8;
    let params = FracParams::new(alpha, true);
    let f = force(alpha, 0.3);
    let u0 = lift_force(&f, &params).unwrap();
    let adv = advection_term(&dealias(&u0).to_physical(), true).l2_norm();
    let r = residual(&u0, &f, &params).unwrap();
    assert!((r - adv).abs() < 1e-12 * adv);
    let z = SpectralVectorField::zeros(grid());
    assert_eq!(residual(&z, &z, &params).unwrap(), 0.0);
}

#[test]
fn momentum_budget_closes_on_converged_solutions() {
    for alpha in [1.3, 2.0] {
        let params = FracParams::new(alpha, true);
        let f = force(alpha, 0.1);
        let sol = solve_steady(&f, &config(alpha)).unwrap();
        let r = residual(&sol.velocity, &f, &params).unwrap();
        let b = momentum_budget(&sol.velocity, &f, &sol.pressure, &params).unwrap();
        assert!((r - b).abs() < 1e-10, "alpha {alpha}: {r} vs {b}");
    }
}

#[test]
fn rescaled_solutions_solve_the_rescaled_problem() {
    let alpha = 1.7;
    let params = FracParams::new(alpha, true);
    let f = force(alpha, 0.1);
    let sol = solve_steady(&f, &config(alpha)).unwrap();
    for lambda in [2, 4] {
        let d = scaling_check(&sol.velocity, &f, &params, lambda).unwrap();
        assert!(d < 1e-9, "lambda {lambda}: {d}");
        let u0 = lift_force(&f, &params).unwrap();
        let lin = scaling_check_with(&u0, &f, &params, lambda, false).unwrap();
        assert!(lin < 1e-12, "lambda {lambda}: {lin}");
    }
    let z = SpectralVectorField::zeros(grid());
    assert_eq!(scaling_check(&z, &z, &params, 2).unwrap(), 0.0);
    assert!(matches!(scaling_check(&z, &z, &params, 3), Err(Error::InvalidGrid(_))));
}

#[test]
fn lebesgue_norms_persist() {
    let alpha = 2.0;
    let params = FracParams::new(alpha, true);
    let f = force(alpha, 0.1);
    let sol = solve_steady(&f, &config(alpha)).unwrap();
    let u = sol.velocity.to_physical();
    let u0 = lift_force(&f, &params).unwrap().to_physical();
    for p in [2.0, 3.0, 6.0] {
        let a = lebesgue_norm(&u, p);
        let b = lebesgue_norm(&u0, p);
        assert!(a.is_finite() && a <= 2.0 * b, "p {p}: {a} vs {b}");
    }
}

#[test]
fn config_validation() {
    let mut c = config(1.5);
    c.tol_rel = 1.0;
    assert!(matches!(c.validate(), Err(Error::InvalidParameter(_))));
    let c = config(2.6);
    assert!(matches!(c.validate(), Err(Error::InvalidAlpha { .. })));
    let parsed: SolverConfig = serde_json::from_str(r#"{"params":{"alpha":1.5}}"#).unwrap();
    assert_eq!(parsed, config(1.5));
}
