use super::state::{AlphaState, FluidState};
use crate::error::Result;
use crate::spectral::field::SpectralField;
use crate::spectral::littlewood_paley::{lp_project, Band};
use crate::spectral::multiplier::{apply_multiplier, Multiplier};
use crate::spectral::norms::lebesgue;

/// `(Q, Q̃)` with `Q = ‖P_{≤1}(ρ₀-1)‖_{L¹}` and `Q̃ = ∫(ρ₀-1)`.
pub fn compute_charge(s0: &FluidState) -> (f64, f64) {
    let low = lp_project(&s0.rho_minus_1, Band::UpToN(1.0));
    (lebesgue(&low, 1.0), s0.total_charge())
}

/// Charged low-frequency part `χ^Q = P_{≤1}Re α(0)` and the charges.
#[derive(Debug, Clone)]
pub struct BetaSplit {
    pub chi_q: SpectralField,
    pub q: f64,
    pub q_tilde: f64,
}

impl BetaSplit {
    pub fn new(alpha0: &AlphaState, s0: &FluidState) -> Self {
        let mut chi_q = lp_project(&alpha0.alpha.real_part(), Band::UpToN(1.0));
        chi_q.set_real(true);
        let (q, q_tilde) = compute_charge(s0);
        BetaSplit { chi_q, q, q_tilde }
    }

    /// `e^{it⟨∇⟩}χ^Q`
    pub fn free_charge(&self, t: f64) -> Result<SpectralField> {
        apply_multiplier(&self.chi_q, &Multiplier::kg_propagator(t))
    }
}

/// `β(t) = α(t) - e^{it⟨∇⟩}χ^Q`
pub fn beta_of(a: &AlphaState, split: &BetaSplit) -> Result<SpectralField> {
    a.grid.check_same(&split.chi_q.grid())?;
    let mut b = a.alpha.to_frequency().sub(&split.free_charge(a.time)?);
    b.set_real(false);
    Ok(b)
}

/// Profile `b(t) = e^{-it⟨∇⟩}β(t)`.
pub fn profile_of(a: &AlphaState, split: &BetaSplit) -> Result<SpectralField> {
    let beta = beta_of(a, split)?;
    apply_multiplier(&beta, &Multiplier::kg_propagator(-a.time))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epsolver::state::{init_perturbation, to_alpha, DataSpec};
    use crate::spectral::grid::Grid3;
    use crate::spectral::norms::h_norm;

    #[test]
    fn zero_data_has_zero_charge() {
        let g = Grid3::new(16, 40.0).unwrap();
        let s = init_perturbation(g, &DataSpec::gaussian(0.0, 3.0)).unwrap();
        assert_eq!(compute_charge(&s), (0.0, 0.0));
    }

    #[test]
    fn positive_bump_charge() {
        let g = Grid3::new(32, 40.0).unwrap();
        let s = init_perturbation(g, &DataSpec::gaussian(1e-2, 3.0)).unwrap();
        let (q, qt) = compute_charge(&s);
        let exact = 1e-2 * (2.0 * std::f64::consts::PI).powf(1.5) * 27.0;
        assert!((qt - exact).abs() < 1e-6 * exact);
        assert!(q >= qt * (1.0 - 1e-3));
    }

    #[test]
    fn odd_perturbation_has_zero_signed_charge() {
        let g = Grid3::new(16, 40.0).unwrap();
        let mut s = FluidState::equilibrium(g);
        s.rho_minus_1 = SpectralField::from_real_fn(g, |x| {
            let d = x[0] - 20.0;
            1e-2 * d * (-(d * d + (x[1] - 20.0).powi(2) + (x[2] - 20.0).powi(2)) / 8.0).exp()
        });
        let (q, qt) = compute_charge(&s);
        assert!(qt.abs() < 1e-12);
        assert!(q > 0.0);
    }

    #[test]
    fn low_frequency_real_data_leaves_imaginary_beta() {
        let g = Grid3::new(16, 40.0).unwrap();
        let mut spec = DataSpec::gaussian(1e-2, 3.0);
        spec.velocity_amplitude = Some(1e-2);
        let s = init_perturbation(g, &spec).unwrap();
        let mut a = to_alpha(&s).unwrap();
        // keep only the part of Re α that P_{≤1} reproduces exactly
        let re = lp_project(&a.alpha.real_part(), Band::UpToN(0.5));
        a.alpha = re.add(&a.alpha.imag_part().scale(num_complex::Complex64::new(0.0, 1.0)));
        let split = BetaSplit::new(&a, &s);
        let beta = beta_of(&a, &split).unwrap();
        assert!(h_norm(&beta.real_part(), 0.0) < 1e-14 * h_norm(&beta, 0.0));
    }
}
