use pseudorel::error::GroundStateError;
use pseudorel::groundstate::{
    closed_form_1d, ground_state, limit_residual, petviashvili, Method, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use pseudorel::operators::apply_p_inf;
use pseudorel::radial::{norms, RadialGrid};

#[test]
fn closed_form_peaks() {
    let grid = RadialGrid::new(1, 1024, 40.0).unwrap();
    let cubic = closed_form_1d(3.0, &grid).unwrap();
    assert!((cubic.field.values()[0] - 2f64.sqrt()).abs() < 1e-15);
    let quadratic = closed_form_1d(2.0, &grid).unwrap();
    assert!((quadratic.field.values()[0] - 1.5).abs() < 1e-15);
    assert_eq!(cubic.method, Method::ClosedForm);
}

#[test]
fn closed_form_residual_at_acceptance_grid() {
    let grid = RadialGrid::new(1, 4096, 40.0).unwrap();
    let u = closed_form_1d(3.0, &grid).unwrap();
    assert!(u.residual <= 1e-10, "{}", u.residual);
    let defect = apply_p_inf(&u.field).sub(&u.field.map(|v| v * v * v)).unwrap().l2();
    assert!(defect <= 1e-10, "{defect}");
}

#[test]
fn closed_form_needs_one_dimension() {
    let grid = RadialGrid::new(3, 256, 20.0).unwrap();
    assert!(matches!(closed_form_1d(3.0, &grid), Err(GroundStateError::DimMismatch(3))));
}

#[test]
fn petviashvili_rejects_supercritical_exponent() {
    let grid = RadialGrid::new(3, 256, 20.0).unwrap();
    assert!(matches!(
        petviashvili(5.0, &grid, DEFAULT_TOL, DEFAULT_MAX_ITER),
        Err(GroundStateError::ExponentOutOfRange { .. })
    ));
}

#[test]
fn ground_states_are_positive_and_decreasing() {
    for (dim, p) in [(1, 2.0), (1, 3.0), (3, 2.0), (3, 3.0), (3, 4.0)] {
        let grid = RadialGrid::new(dim, 1024, 40.0).unwrap();
        let u = ground_state(p, &grid, DEFAULT_TOL).unwrap();
        assert!(u.is_positive_decreasing(), "N={dim} p={p}");
        assert!(u.residual <= 1e-8, "N={dim} p={p}: {}", u.residual);
        assert!((limit_residual(&u.field, p) - u.residual).abs() <= 1e-15);
    }
}

/// While the grid under-resolves the soliton; at R = 40 the residual already sits at the
/// round-off floor, which grows like K².
#[test]
fn residual_decreases_under_refinement() {
    for p in [2.0, 3.0] {
        let mut last = f64::INFINITY;
        for points in [256, 512, 1024] {
            let grid = RadialGrid::new(1, points, 160.0).unwrap();
            let u = closed_form_1d(p, &grid).unwrap();
            assert!(u.residual < last, "p={p} K={points}: {} vs {last}", u.residual);
            last = u.residual;
        }
    }
}

#[test]
fn soliton_norm_is_grid_converged() {
    let coarse = RadialGrid::new(1, 4096, 40.0).unwrap();
    let fine = RadialGrid::new(1, 8192, 80.0).unwrap();
    let a = norms(&closed_form_1d(3.0, &coarse).unwrap().field, 4.0).unwrap().h1;
    let b = norms(&closed_form_1d(3.0, &fine).unwrap().field, 4.0).unwrap().h1;
    assert!((a - b).abs() <= 1e-8 * b, "{a} vs {b}");
}
