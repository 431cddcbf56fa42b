use eplab::linprop::*;
use eplab::spectral::{Grid3, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;

fn min_image_radius(grid: &Grid3, flat: usize) -> f64 {
    let l = grid.box_length();
    grid.position(flat)
        .iter()
        .map(|&x| {
            let d = if x > 0.5 * l { x - l } else { x };
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Largest deviation between the radial quadrature and the grid propagator,
/// relative to the peak of the initial data.
fn grid_mismatch(prof: &RadialProfile, grid: Grid3, t: f64, r_cap: f64) -> f64 {
    let phys = prof.to_grid_field(grid, t).to_physical();
    let peak = kg_propagate_radial(prof, 0.0, 0.0).unwrap().norm();
    let mut worst = 0.0f64;
    for (flat, v) in phys.data().iter().enumerate() {
        let r = min_image_radius(&grid, flat);
        if r > r_cap {
            continue;
        }
        let u = kg_propagate_radial(prof, t, r).unwrap();
        worst = worst.max((u - v).norm() / peak);
    }
    worst
}

#[test]
fn time_zero_matches_grid_inverse_transform() {
    // e^{-(k_nyq w)²/2} ≈ 1e-15, so the Gaussian is band-limited at working precision
    let grid = Grid3::new(64, 48.0).unwrap();
    let prof = RadialProfile::gaussian(1.0, 2.0).unwrap();
    let d = grid_mismatch(&prof, grid, 0.0, 8.0);
    assert!(d < 1e-8, "{d}");
}

#[test]
fn radial_and_grid_propagators_agree_inside_horizon() {
    // e^{-(k_nyq w)²/2} ≈ 1e-15, so the Gaussian is band-limited at working precision
    let grid = Grid3::new(64, 48.0).unwrap();
    let prof = RadialProfile::gaussian(1.0, 2.0).unwrap();
    for t in [2.0, 6.0] {
        let d = grid_mismatch(&prof, grid, t, 10.0);
        assert!(d < 1e-6, "t={t}: {d}");
    }
}

#[test]
fn propagation_is_linear() {
    let a = RadialProfile::gaussian(1.0, 1.0).unwrap();
    let b = RadialProfile::gaussian(-0.4, 0.6).unwrap();
    let (fa, fb) = (a.clone(), b.clone());
    let k_max = a.k_max().max(b.k_max());
    let sum = RadialProfile::new("a+b", k_max, 10.0, move |k| fa.eval(k) + fb.eval(k)).unwrap();
    for (t, r) in [(0.0, 0.5), (7.0, 3.0), (40.0, 35.0)] {
        let lhs = kg_propagate_radial(&sum, t, r).unwrap();
        let rhs = kg_propagate_radial(&a, t, r).unwrap() + kg_propagate_radial(&b, t, r).unwrap();
        assert!((lhs - rhs).norm() < 1e-12, "t={t} r={r}");
    }
}

#[test]
fn l2_norm_is_conserved() {
    let prof = RadialProfile::gaussian(1.0, 1.0).unwrap();
    let want = radial_l2_plancherel(&prof);
    for t in [0.0, 10.0, 75.0, 200.0] {
        let got = radial_lp_norm(&prof, t, 2.0, RadialQuantity::Value).unwrap();
        assert!((got / want - 1.0).abs() < 1e-8, "t={t}");
    }
}

#[test]
fn center_value_decays_like_three_halves() {
    let prof = RadialProfile::gaussian(1.0, 1.0).unwrap();
    let pts: Vec<(f64, f64)> = log_spaced_times(100.0, 2000.0, 12)
        .into_iter()
        .map(|t| (t, kg_propagate_radial(&prof, t, 0.0).unwrap().norm()))
        .collect();
    let fit = fit_power_law(&pts, (100.0, 2000.0)).unwrap();
    assert!((fit.slope + 1.5).abs() < 0.05, "{fit:?}");
}

#[test]
fn fit_reads_from_series() {
    let mut s = eplab::epsolver::DecaySeries::default();
    for t in log_spaced_times(1.0, 50.0, 10) {
        s.push(t, "x", (1.0 + t).powf(-0.3)).unwrap();
        s.push(t, "y", 1.0).unwrap();
    }
    let f = fit_decay_exponent(&s, "x", (1.0, 50.0)).unwrap();
    assert!((f.slope + 0.3).abs() < 1e-12);
    assert!(fit_decay_exponent(&s, "missing", (1.0, 50.0)).is_err());
    assert!(fit_decay_exponent(&s, "x", (20.0, 50.0)).is_err());
}

#[test]
fn grid_field_of_profile_is_hermitian_at_time_zero() {
    let grid = Grid3::new(16, 20.0).unwrap();
    let f: SpectralField = RadialProfile::gaussian(1.0, 2.0).unwrap().to_grid_field(grid, 0.0);
    assert!(f.hermitian_defect() < 1e-15);
    assert!(f.to_physical().max_imag() < 1e-15);
    let _ = Complex64::new(0.0, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slope_ignores_constant_rescaling(
        slope in -2.0f64..0.5,
        c in 1e-6f64..1e6,
        noise in prop::collection::vec(-0.1f64..0.1, 10),
    ) {
        let times = log_spaced_times(2.0, 300.0, 10);
        let base: Vec<(f64, f64)> = times
            .iter()
            .zip(&noise)
            .map(|(&t, e)| (t, (1.0 + t).powf(slope) * (1.0 + e)))
            .collect();
        let scaled: Vec<(f64, f64)> = base.iter().map(|&(t, v)| (t, c * v)).collect();
        let a = fit_power_law(&base, (2.0, 300.0)).unwrap();
        let b = fit_power_law(&scaled, (2.0, 300.0)).unwrap();
        prop_assert!((a.slope - b.slope).abs() < 1e-9);
        prop_assert!((b.intercept - a.intercept - c.ln()).abs() < 1e-9);
    }
}
