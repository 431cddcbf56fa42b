use eplab::epsolver::*;
use eplab::linprop::least_squares;
use eplab::spectral::{apply_multiplier, Grid3, Multiplier, SpectralField};
use eplab::Result;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Band-limited irrotational state with `‖ρ-1‖_∞` and `‖u‖_∞` of size `amp`.
fn random_state(grid: Grid3, seed: u64, amp: f64, max_mode: i64) -> FluidState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normalize = |f: SpectralField| {
        let m = f.to_physical().max_abs();
        f.scale(Complex64::new(amp / m, 0.0))
    };
    let rho = normalize(SpectralField::random_real(grid, max_mode, &mut rng));
    let psi = SpectralField::random_real(grid, max_mode, &mut rng);
    let u: [SpectralField; 3] = std::array::from_fn(|j| apply_multiplier(&psi, &Multiplier::partial(j)).unwrap());
    let m = u.iter().map(|f| f.to_physical().max_abs()).fold(0.0, f64::max);
    let u = u.map(|f| f.scale(Complex64::new(amp / m, 0.0)));
    FluidState { grid, rho_minus_1: rho, u, time: 0.0 }
}

fn tendency_state(s: &FluidState, k: &FluidTendency) -> FluidState {
    FluidState { grid: s.grid, rho_minus_1: k.rho.clone(), u: k.u.clone(), time: s.time }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn alpha_round_trip(seed in any::<u64>(), amp in 1e-6f64..1e-2) {
        let g = Grid3::new(16, 20.0).unwrap();
        let s = random_state(g, seed, amp, 7);
        let back = from_alpha(&to_alpha(&s).unwrap()).unwrap();
        prop_assert!(back.rho_minus_1.relative_distance(&s.rho_minus_1) <= 1e-10);
        for j in 0..3 {
            prop_assert!(back.u[j].relative_distance(&s.u[j]) <= 1e-10);
        }
    }

    #[test]
    fn tendencies_agree_between_formulations(seed in any::<u64>(), amp in 1e-5f64..1e-2) {
        // modes |m| <= 2 keep every quadratic product inside the 2/3 band
        let g = Grid3::new(16, 24.0).unwrap();
        let s = random_state(g, seed, amp, 2);
        let via_fluid = to_alpha(&tendency_state(&s, &rhs_fluid(&s, true).unwrap())).unwrap().alpha;
        let via_alpha = rhs_alpha(&to_alpha(&s).unwrap(), true).unwrap();
        prop_assert!(via_alpha.relative_distance(&via_fluid) <= 1e-8);
    }

    #[test]
    fn tendency_of_curl_vanishes(seed in any::<u64>()) {
        let g = Grid3::new(16, 16.0).unwrap();
        let s = random_state(g, seed, 1e-2, 7);
        let k = rhs_fluid(&s, true).unwrap();
        let t = tendency_state(&s, &k);
        let (curl, h1) = t.curl_and_h1().unwrap();
        prop_assert!(curl <= 1e-10 * h1, "{curl} vs {h1}");
    }
}

#[test]
fn fluid_runs_conserve_mass_and_stay_irrotational() {
    let g = Grid3::new(16, 24.0).unwrap();
    let mut s = init_perturbation(g, &DataSpec::gaussian(1e-2, 1.5)).unwrap();
    let q0 = s.total_charge();
    assert!(q0 > 0.0);
    for _ in 0..40 {
        s = step_fluid(&s, 0.05, true).unwrap();
        assert!((s.total_charge() - q0).abs() <= 1e-10 * q0);
        let (curl, h1) = s.curl_and_h1().unwrap();
        assert!(curl <= 1e-9 * h1, "t={}: {curl} vs {h1}", s.time);
    }
}

struct ChargeProbe {
    worst: f64,
    samples: usize,
}

impl RunObserver for ChargeProbe {
    fn observe(&mut self, sample: &RunSample<'_>) -> Result<()> {
        let fluid = sample.fluid()?;
        let g = fluid.grid;
        let quadrature: f64 = fluid.rho_minus_1.to_physical().data().iter().map(|v| v.re).sum::<f64>() * g.cell_volume();
        let amplitude = fluid.rho_minus_1.to_frequency().data()[0].re * g.volume();
        let q_tilde = sample.split.q_tilde;
        self.worst = self.worst.max((amplitude - q_tilde).abs() / q_tilde).max((quadrature - q_tilde).abs() / q_tilde);
        self.samples += 1;
        Ok(())
    }
}

#[test]
fn charge_is_the_zero_mode_times_volume() {
    let g = Grid3::new(16, 32.0).unwrap();
    let mut run = RunSpec::new(g, DataSpec::gaussian(1e-2, 1.5), 0.05, 2.0);
    run.norms.clear();
    let mut probe = ChargeProbe { worst: 0.0, samples: 0 };
    let out = run_experiment(&run, &mut [&mut probe]).unwrap();
    assert_eq!(probe.samples, 41);
    assert!(probe.worst <= 1e-12, "{}", probe.worst);
    let (_, q_tilde) = compute_charge(&out.initial_fluid);
    assert!((q_tilde - out.split.q_tilde).abs() <= 1e-15 * q_tilde);
}

#[test]
fn twin_formulations_agree_over_a_run() {
    let g = Grid3::new(16, 32.0).unwrap();
    let s0 = init_perturbation(g, &DataSpec::gaussian(1e-3, 1.5)).unwrap();
    let dt = 0.01;
    let stepper = AlphaStepper::new(g, dt, Scheme::Exponential, true).unwrap();
    let mut fluid = s0.clone();
    let mut alpha = to_alpha(&s0).unwrap();
    for _ in 0..100 {
        fluid = step_fluid(&fluid, dt, true).unwrap();
        alpha = stepper.step(&alpha).unwrap();
    }
    let d = to_alpha(&fluid).unwrap().alpha.relative_distance(&alpha.alpha);
    assert!(d <= 1e-6, "{d}");
}

fn final_alpha(g: Grid3, s0: &AlphaState, dt: f64, scheme: Scheme, t_end: f64) -> SpectralField {
    let stepper = AlphaStepper::new(g, dt, scheme, true).unwrap();
    let mut a = s0.clone();
    for _ in 0..(t_end / dt).round() as usize {
        a = stepper.step(&a).unwrap();
    }
    a.alpha
}

/// Slope of log error against log dt, each coarse run measured against its
/// half-step refinement.
fn self_convergence(scheme: Scheme, delta: f64) -> f64 {
    let g = Grid3::new(16, 16.0).unwrap();
    let s0 = to_alpha(&init_perturbation(g, &DataSpec::gaussian(delta, 1.5)).unwrap()).unwrap();
    let dts = [0.2, 0.1, 0.05];
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            let coarse = final_alpha(g, &s0, dt, scheme, 1.0);
            let fine = final_alpha(g, &s0, 0.5 * dt, scheme, 1.0);
            coarse.relative_distance(&fine)
        })
        .collect();
    let x: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let y: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    least_squares(&x, &y).unwrap().0
}

#[test]
fn schemes_converge_at_fourth_order() {
    let rk4 = self_convergence(Scheme::Rk4, 1e-2);
    assert!((rk4 - 4.0).abs() <= 0.3, "rk4 {rk4}");
    let exp = self_convergence(Scheme::Exponential, 5e-2);
    assert!((exp - 4.0).abs() <= 0.3, "exponential {exp}");
}
