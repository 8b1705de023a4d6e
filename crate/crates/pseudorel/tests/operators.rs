use std::sync::Arc;

use proptest::prelude::*;
use pseudorel::core::SymbolParams;
use pseudorel::groundstate::closed_form_1d;
use pseudorel::operators::{
    apply_diff, apply_p_c, apply_p_inf, gap_contract_ratios, norm_equivalence_probe,
    norm_equivalence_ratios, AOperator, GapContractConstants, LOperator, LinearOperator,
};
use pseudorel::radial::{band_limited, forward, norms, RadialField, RadialGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn soliton(points: usize) -> RadialField {
    closed_form_1d(3.0, &RadialGrid::new(1, points, 40.0).unwrap()).unwrap().field
}

fn cubic_a(points: usize) -> Arc<AOperator> {
    let grid = RadialGrid::new(1, points, 40.0).unwrap();
    Arc::new(AOperator::build(&closed_form_1d(3.0, &grid).unwrap()).unwrap())
}

fn gaussian(grid: &RadialGrid) -> RadialField {
    RadialField::from_fn(grid, |r| (-r * r / 2.0).exp()).unwrap()
}

#[test]
fn soliton_solves_limit_equation() {
    let u = soliton(4096);
    let defect = apply_p_inf(&u).sub(&u.map(|v| v * v * v)).unwrap().l2();
    assert!(defect <= 1e-10, "{defect}");
}

#[test]
fn huge_light_speed_recovers_limit_operator() {
    let grid = RadialGrid::new(3, 1024, 30.0).unwrap();
    let f = band_limited(&grid, &mut ChaCha8Rng::seed_from_u64(2));
    let params = SymbolParams::normalized(0.75, 1e6).unwrap();
    let a = apply_p_c(&f, &params).unwrap();
    let b = apply_p_inf(&f);
    assert!(a.sub(&b).unwrap().l2() <= 1e-6 * b.l2());
}

#[test]
fn zero_maps_to_zero() {
    let grid = RadialGrid::new(1, 256, 20.0).unwrap();
    let zero = RadialField::zeros(&grid);
    let params = SymbolParams::normalized(0.6, 3.0).unwrap();
    assert_eq!(apply_p_c(&zero, &params).unwrap(), zero);
    assert_eq!(apply_diff(&zero, &params).unwrap(), zero);
    assert_eq!(apply_p_inf(&zero), zero);
}

#[test]
fn forcing_obeys_quartic_bound() {
    let u = soliton(4096);
    let quartic = forward(&u).quadratic_form(|r| r.powi(8)).sqrt();
    for c in [2.0f64, 4.0, 8.0] {
        let f = apply_diff(&u, &SymbolParams::normalized(0.75, c).unwrap()).unwrap().l2();
        let bound = 0.395063 / c.powi(6) * quartic;
        assert!(f <= bound, "c={c}: {f:e} > {bound:e}");
    }
}

#[test]
fn forcing_shrinks_by_two_to_the_sixth() {
    let u = soliton(4096);
    let size = |c: f64| apply_diff(&u, &SymbolParams::normalized(0.75, c).unwrap()).unwrap().l2();
    for c in [2.0, 4.0, 8.0] {
        let ratio = size(c) / size(2.0 * c);
        assert!((ratio / 64.0 - 1.0).abs() <= 0.2, "c={c}: ratio {ratio}");
    }
}

#[test]
fn a_is_nonsingular_on_radial_grid() {
    let a = cubic_a(1024);
    let (lo, hi) = a.singular_value_bounds(60, 4).unwrap();
    assert!(lo > 1e-3 && hi.is_finite(), "{lo} {hi}");
    assert!(a.pivot_ratio() > 0.0);
}

#[test]
fn a_inverse_is_consistent_under_refinement() {
    let f = |r: f64| (-r * r / 4.0).exp() * (1.0 + 0.5 * r.cos());
    let (coarse, fine) = (cubic_a(1024), cubic_a(2048));
    let x = coarse.solve(&RadialField::from_fn(coarse.grid(), f).unwrap()).unwrap();
    let y = fine.solve(&RadialField::from_fn(fine.grid(), f).unwrap()).unwrap();
    let worst = x
        .values()
        .iter()
        .enumerate()
        .fold(0.0f64, |m, (i, v)| m.max((v - y.values()[2 * i]).abs()));
    assert!(worst <= 1e-6 * x.max_abs(), "{worst:e}");
}

#[test]
fn l_inverse_round_trip_across_speeds() {
    let a = cubic_a(1024);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for c in [3.0, 5.0, 8.0, 20.0] {
        let l = LOperator::new(Arc::clone(&a), &SymbolParams::normalized(0.75, c).unwrap()).unwrap();
        let f = band_limited(a.grid(), &mut rng);
        let back = l.apply(&l.solve(&f).unwrap()).unwrap();
        assert!(back.sub(&f).unwrap().l2() <= 1e-9 * f.l2(), "c={c}");
        let zero = RadialField::zeros(a.grid());
        assert_eq!(l.solve(&zero).unwrap(), zero);
    }
}

#[test]
fn b_norm_decreases_with_speed() {
    let a = cubic_a(1024);
    let mut last = f64::INFINITY;
    for c in [1.5, 2.0, 3.0, 4.5, 6.0] {
        let l = LOperator::new(Arc::clone(&a), &SymbolParams::normalized(0.75, c).unwrap()).unwrap();
        let b = l.b_norm(30, 0).unwrap();
        assert!(b <= 0.5 && b < last, "c={c}: {b} after {last}");
        last = b;
    }
}

#[test]
fn neumann_truncation_bound_holds() {
    let a = cubic_a(1024);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for c in [1.5, 2.0, 3.0] {
        let l = LOperator::new(Arc::clone(&a), &SymbolParams::normalized(0.75, c).unwrap()).unwrap();
        let beta = l.b_norm(40, 1).unwrap();
        assert!(beta < 1.0);
        let f = band_limited(a.grid(), &mut rng);
        let (y, trace) = l.neumann(&f, 1e-6, 50).unwrap();
        let residual = y.add(&l.apply_b(&y).unwrap()).unwrap().sub(&f).unwrap().l2();
        // The power-iteration estimate of ‖B‖ is a lower bound; allow 10% for it.
        let bound = 1.1 * trace.last_term * beta / (1.0 - beta);
        assert!(residual <= bound, "c={c}: {residual:e} > {bound:e}");
    }
}

#[test]
fn norm_equivalence_is_uniform_in_speed() {
    let grid = RadialGrid::new(3, 1024, 30.0).unwrap();
    let g = gaussian(&grid);
    let q = 4.0;
    let ratios: Vec<(f64, f64)> = [4.0, 16.0, 64.0]
        .iter()
        .map(|&c| norm_equivalence_ratios(&g, &SymbolParams::normalized(0.75, c).unwrap(), q).unwrap())
        .collect();
    for pick in [|r: &(f64, f64)| r.0, |r: &(f64, f64)| r.1] {
        let v: Vec<f64> = ratios.iter().map(pick).collect();
        let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(*x), b.max(*x)));
        assert!(hi / lo <= 3.0, "{v:?}");
    }
    let limit = norms::lq(&apply_p_inf(&g), q).unwrap() / norms::w2q(&g, q).unwrap();
    assert!((ratios[2].1 / limit - 1.0).abs() <= 1e-6, "{} vs {limit}", ratios[2].1);

    let probes: Vec<_> = [4.0, 16.0, 64.0]
        .iter()
        .map(|&c| norm_equivalence_probe(&grid, &SymbolParams::normalized(0.75, c).unwrap(), q, 6, 3).unwrap())
        .collect();
    let lower_hi = probes.iter().map(|p| p.lower_max).fold(0.0, f64::max);
    let lower_lo = probes.iter().map(|p| p.lower_min).fold(f64::INFINITY, f64::min);
    assert!(lower_lo > 0.0 && lower_hi.is_finite());
}

#[test]
fn gap_contracts_hold_with_frozen_constants() {
    let grid = RadialGrid::new(1, 1024, 40.0).unwrap();
    let q = 4.0;
    let frozen = GapContractConstants::calibrate(&grid, 0.75, q, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..6 {
        let f = band_limited(&grid, &mut rng);
        for c in [6.0, 8.0, 32.0] {
            let (a, b) = gap_contract_ratios(&f, &SymbolParams::normalized(0.75, c).unwrap(), q).unwrap();
            assert!(a <= frozen.lebesgue, "c={c}: {a} > {}", frozen.lebesgue);
            assert!(b <= frozen.smoothing, "c={c}: {b} > {}", frozen.smoothing);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn multiplier_operators_are_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, c in 2.0f64..50.0, seed in any::<u64>()) {
        let grid = RadialGrid::new(1, 256, 20.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (u, v) = (band_limited(&grid, &mut rng), band_limited(&grid, &mut rng));
        let params = SymbolParams::normalized(0.75, c).unwrap();
        let mut combo = u.scaled(a);
        combo.axpy(b, &v).unwrap();
        let lhs = apply_diff(&combo, &params).unwrap();
        let mut rhs = apply_diff(&u, &params).unwrap().scaled(a);
        rhs.axpy(b, &apply_diff(&v, &params).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().l2() <= 1e-12 * (u.l2() + v.l2()) * (a.abs() + b.abs() + 1.0));
    }
}
