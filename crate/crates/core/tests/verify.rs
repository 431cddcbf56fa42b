use eplab::epsolver::{run_experiment, DataSpec, RunSpec};
use eplab::spectral::norms::{h_norm, y_norm};
use eplab::spectral::{apply_multiplier, norm, Grid3, Multiplier, NormSpec, SpectralField};
use eplab::symbols::{BilinearSymbolSpec, ConjPair, SymbolKind};
use eplab::verify::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

fn holder_setup(trials: usize) -> TrialSetup {
    TrialSetup { grid: Grid3::new(16, std::f64::consts::PI).unwrap(), trials, seed: 5 }
}

fn lh_case() -> LhSpec {
    LhSpec { m: 4.0, sigma: 2.0, theta: 0.0, p: 10.0, q: 2.5, r: 2.0 }
}

#[test]
fn phase_scan_extrema_reproduce() {
    for eps in ConjPair::ALL {
        let r = scan_phase_lower_bound(eps, &ScanLattice::default(), 0.05).unwrap();
        assert!(r.min > 0.0, "{eps}: {}", r.min);
        for (p, v) in [(&r.argmin, r.min), (&r.argmax, r.max)] {
            let c = &p.as_ref().unwrap().coords;
            let again = phase_bound_ratio(eps, [c[0], c[1], c[2]], [c[3], c[4], c[5]]);
            assert!(close(again, v, 1e-10), "{eps}: {again} vs {v}");
        }
    }
}

#[test]
fn symbol_scan_extrema_reproduce() {
    let lattice = DerivativeLattice { min_exp: -1, max_exp: 3, angles: 3, margin: 1e-2 };
    for kind in [SymbolKind::Mp, SymbolKind::Mt] {
        let r = scan_symbol_derivative_bounds(&kind, ConjPair::PM, 2, &lattice, 100.0).unwrap();
        assert_eq!(r.non_finite, 0);
        for (p, v) in [(&r.argmin, r.min), (&r.argmax, r.max)] {
            let c = &p.as_ref().unwrap().coords;
            let k = |i: usize| c[i] as u32;
            let again = symbol_derivative_ratio(
                &kind,
                ConjPair::PM,
                [c[0], c[1], c[2]],
                [c[3], c[4], c[5]],
                [k(6), k(7), k(8)],
                [k(9), k(10), k(11)],
            )
            .unwrap();
            assert!(close(again, v, 1e-10), "{kind:?}: {again} vs {v}");
        }
    }
}

#[test]
fn first_derivative_scales_like_inverse_frequency() {
    // m/φ_{(-,-)} is homogeneous of degree zero at high frequency
    let (xi, eta) = ([200.0, 30.0, 0.0], [-40.0, 90.0, 10.0]);
    let d = |s: f64| {
        symbol_derivative(
            &SymbolKind::Mp,
            ConjPair::MM,
            xi.map(|v| s * v),
            eta.map(|v| s * v),
            [1, 0, 0],
            [0, 0, 0],
            0.0,
        )
        .unwrap()
    };
    let q = d(2.0) / d(1.0);
    assert!((q - 0.5).abs() <= 0.1, "{q}");
}

#[test]
fn holder_scan_extrema_reproduce() {
    let setup = holder_setup(2);
    let triads = triad_matrix(&[2.0, 4.0], &DEFAULT_EXPONENTS).unwrap();
    let spec = BilinearSymbolSpec::normal_form(SymbolKind::Mt, ConjPair::PP);
    let r = check_holder_pseudo_product(&spec, ConjPair::PP, &triads, &setup, 100.0).unwrap();
    for (p, v) in [(&r.argmin, r.min), (&r.argmax, r.max)] {
        let c = &p.as_ref().unwrap().coords;
        let triad = TriadSpec::new(c[0], c[1], c[2], c[3], c[4], c[5]).unwrap();
        let again = holder_trial_ratio(&spec, ConjPair::PP, &triad, &setup, c[6] as usize).unwrap();
        assert!(close(again, v, 1e-10), "{again} vs {v}");
    }
}

#[test]
fn lh_scan_extrema_reproduce() {
    let setup = holder_setup(3);
    let cases = [lh_case(), LhSpec { theta: 5.0, ..lh_case() }, LhSpec { m: 0.5, ..lh_case() }];
    let spec = BilinearSymbolSpec::normal_form(SymbolKind::Mp, ConjPair::MP);
    let r = check_lh_bound(&spec, ConjPair::MP, &cases, &setup, 100.0).unwrap();
    for (p, v) in [(&r.argmin, r.min), (&r.argmax, r.max)] {
        let c = &p.as_ref().unwrap().coords;
        let lh = LhSpec { m: c[0], sigma: c[1], theta: c[2], p: c[3], q: c[4], r: c[5] };
        let again = lh_trial_ratio(&spec, ConjPair::MP, &lh, &setup, c[6] as usize).unwrap();
        assert!(close(again, v, 1e-10), "{again} vs {v}");
    }
}

#[test]
fn prodform_scan_extrema_reproduce() {
    let setup = TrialSetup { grid: Grid3::new(16, 2.0 * std::f64::consts::PI).unwrap(), trials: 4, seed: 9 };
    let r = check_prodform(&[0.0, 1.0, 3.0], &setup, 10.0).unwrap();
    for (p, v) in [(&r.argmin, r.min), (&r.argmax, r.max)] {
        let c = &p.as_ref().unwrap().coords;
        if c[1] < 0.0 {
            continue;
        }
        let again = prodform_trial_ratio(c[0], &setup, c[1] as usize).unwrap();
        assert!(close(again, v, 1e-10), "{again} vs {v}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn holder_ratio_is_scale_invariant(seed in any::<u64>(), la in -6.0f64..6.0, lb in -6.0f64..6.0) {
        let g = Grid3::new(16, std::f64::consts::PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = SpectralField::random_real(g, 7, &mut rng);
        let b = SpectralField::random_real(g, 7, &mut rng);
        let (sa, sb) = (Complex64::new(10f64.powf(la), 0.0), Complex64::new(10f64.powf(lb), 0.0));
        let triad = TriadSpec::new(4.0, 4.0, 2.0, 10.0, 2.5, 2.0).unwrap();
        for kind in [SymbolKind::Mp, SymbolKind::Mt] {
            let spec = BilinearSymbolSpec::normal_form(kind, ConjPair::PP);
            let base = holder_ratio(&spec, ConjPair::PP, &triad, &a, &b).unwrap();
            let scaled = holder_ratio(&spec, ConjPair::PP, &triad, &a.scale(sa), &b.scale(sb)).unwrap();
            prop_assert!(base > 0.0);
            prop_assert!(close(scaled, base, 1e-12), "{scaled} vs {base}");
        }
        let spec = BilinearSymbolSpec::normal_form(SymbolKind::Mt, ConjPair::PM);
        let base = lh_ratio(&spec, ConjPair::PM, &lh_case(), &a, &b).unwrap();
        let scaled = lh_ratio(&spec, ConjPair::PM, &lh_case(), &a.scale(sa), &b.scale(sb)).unwrap();
        prop_assert!(close(scaled, base, 1e-12), "{scaled} vs {base}");
    }
}

#[test]
fn synthetic_profile_reproduces_the_scattering_rate() {
    // b(t) = F·∫₀ᵗ (1+s)^{-19/14} ds, so b(2t) - b(t) decays like t^{-5/14}
    let g = Grid3::new(8, 10.0).unwrap();
    let f = SpectralField::random_complex(g, 3, &mut ChaCha8Rng::seed_from_u64(1));
    let b = |t: f64| f.scale(Complex64::new(14.0 / 5.0 * (1.0 - (1.0 + t).powf(-5.0 / 14.0)), 0.0));
    let pairs: Vec<(f64, f64)> = (0..=40)
        .map(|j| {
            let t = 10.0 * 2f64.powf(j as f64 / 6.0);
            (t, profile_difference(&b(t), &b(2.0 * t), 2.0))
        })
        .collect();
    let r = check_scattering(&pairs, (10.0, 1000.0)).unwrap();
    assert!((r.fit.slope + 5.0 / 14.0).abs() <= 0.02, "{}", r.fit.slope);
}

fn linear_run() -> RunSpec {
    let mut run = RunSpec::new(Grid3::new(16, 32.0).unwrap(), DataSpec::gaussian(1e-2, 1.5), 0.05, 4.0);
    run.nonlinear = false;
    run.norms.clear();
    run
}

#[test]
fn linear_bootstrap_follows_the_free_flow() {
    let run = linear_run();
    let mut obs = BootstrapObserver::new(&run, 0.5, 50.0).unwrap();
    let out = run_experiment(&run, &mut [&mut obs]).unwrap();
    let r = obs.finish().unwrap();
    assert_eq!(r.rows.len(), 9);

    let mut chi = out.split.chi_q.to_frequency();
    chi.set_real(false);
    let beta0 = out.initial.alpha.to_frequency().sub(&chi);
    let y0 = y_norm(&beta0, run.sigma, run.n_deriv as f64).unwrap();
    assert!(close(r.y0, y0, 1e-12));
    let q = out.split.q;
    let mut x = 0.0f64;
    for row in &r.rows {
        let free = apply_multiplier(&beta0, &Multiplier::kg_propagator(row.t)).unwrap();
        let besov = (1.0 + row.t).powf(1.2) * norm(&free, NormSpec::Besov { sigma: 2.0, p: 10.0, q: 2.0 }).unwrap();
        let hn = h_norm(&free, 9.0);
        x = x.max(besov + hn);
        assert!(close(row.besov_weighted, besov, 1e-10), "t={}", row.t);
        assert!(close(row.hn, hn, 1e-10), "t={}", row.t);
        assert!(close(row.x, x, 1e-10), "t={}", row.t);
        assert!(close(row.ratio, x / (y0 + (q + x).powi(2)), 1e-10));
    }
}

#[test]
fn linear_run_has_static_profile() {
    let run = linear_run();
    let mut ds = ControlDsObserver::new(&run, 0.5, 0.005).unwrap();
    let mut sc = ScatterObserver::new(&run, 0.25, 2).unwrap();
    let out = run_experiment(&run, &mut [&mut ds, &mut sc]).unwrap();
    let ds = ds.finish();
    assert!(ds.rows.iter().all(|r| r.high == 0.0 && r.low == 0.0));
    let scale = h_norm(&out.initial.alpha, 2.0);
    assert!(sc.points().iter().all(|&(_, d)| d <= 1e-12 * scale), "{:?}", sc.points());
}
