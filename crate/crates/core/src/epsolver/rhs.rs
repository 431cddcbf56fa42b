//! Right-hand sides in fluid and `α` variables.
//!
//! Both formulations dealias every quadratic product by the 2/3 rule, so
//! they agree to rounding on irrotational states. The constant mean of
//! `ρ - 1` does not enter the flux or the electric field.

use num_complex::Complex64;

use super::state::{AlphaState, FluidState};
use crate::error::{EpError, Result};
use crate::spectral::field::SpectralField;
use crate::spectral::multiplier::{apply_multiplier, Multiplier};
use crate::symbols::separable::{pseudo_product_separable, Expansion, SeparableTerm};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub struct FluidTendency {
    pub rho: SpectralField,
    pub u: [SpectralField; 3],
}

fn mean_free(f: &SpectralField) -> SpectralField {
    let mut out = f.to_frequency();
    out.data_mut()[0] = Complex64::new(0.0, 0.0);
    out
}

fn check_positive(min_density: f64, time: f64) -> Result<()> {
    if min_density.is_nan() || min_density <= 0.0 {
        return Err(EpError::BlowUp { time, min_density });
    }
    Ok(())
}

/// `∂_t(ρ-1) = -∇·u - ∇·(ñu)`, `∂_t u = -u·∇u - ∇ñ + ∇Φ` with `ΔΦ = ñ`,
/// where `ñ` is the mean-free part of `ρ - 1`.
pub fn rhs_fluid(s: &FluidState, nonlinear: bool) -> Result<FluidTendency> {
    check_positive(s.min_density(), s.time)?;
    let nt = mean_free(&s.rho_minus_1);
    let minus = Complex64::new(-1.0, 0.0);

    let mut drho = SpectralField::zeros(s.grid, crate::spectral::Representation::Frequency);
    for j in 0..3 {
        drho.axpy(minus, &apply_multiplier(&s.u[j], &Multiplier::partial(j))?);
    }
    // -∇ñ + ∇Φ = ∇(Δ⁻¹ - 1)ñ
    let field_part = apply_multiplier(&nt, &Multiplier::identity().scaled(minus))?
        .add(&apply_multiplier(&nt, &Multiplier::inv_laplacian())?);
    let mut du = Vec::with_capacity(3);
    for j in 0..3 {
        du.push(apply_multiplier(&field_part, &Multiplier::partial(j))?);
    }
    let mut du: [SpectralField; 3] = du.try_into().expect("three components");

    if nonlinear {
        let nd = nt.dealias().into_physical();
        let ud: Vec<SpectralField> = s.u.iter().map(|f| f.dealias()).collect();
        let ud_phys: Vec<SpectralField> = ud.iter().map(|f| f.to_physical()).collect();
        for j in 0..3 {
            let flux = nd.pointwise_mul(&ud_phys[j])?.dealias();
            drho.axpy(minus, &apply_multiplier(&flux, &Multiplier::partial(j))?);
        }
        for j in 0..3 {
            let mut adv = SpectralField::zeros(s.grid, crate::spectral::Representation::Physical);
            for k in 0..3 {
                let grad = apply_multiplier(&ud[j], &Multiplier::partial(k))?.into_physical();
                adv.axpy(ONE, &ud_phys[k].pointwise_mul(&grad)?);
            }
            du[j].axpy(minus, &adv.dealias());
        }
    }
    drho.set_real(true);
    for d in &mut du {
        d.set_real(true);
    }
    Ok(FluidTendency { rho: drho, u: du })
}

/// Quadratic part of the `α` equation:
/// `-(i/4)Σ_j R_j⟨∇⟩[(|∇|/⟨∇⟩)(α+ᾱ)·R_j(α-ᾱ)] - (i/8)Σ_j |∇|[R_j(α-ᾱ)·R_j(α-ᾱ)]`.
#[derive(Debug, Clone)]
pub struct AlphaNonlinearity {
    convective: Expansion,
    pressure: Expansion,
}

impl Default for AlphaNonlinearity {
    fn default() -> Self {
        Self::new()
    }
}

impl AlphaNonlinearity {
    pub fn new() -> Self {
        // the m_p expansion carries coefficient -1 on Σ R_j⟨∇⟩[...]
        let convective = Expansion::mp().scaled(I * 0.25);
        let outer = Multiplier::abs_grad();
        let pressure = Expansion {
            name: "pressure".into(),
            terms: (0..3)
                .map(|j| {
                    let r = Multiplier::riesz(j);
                    SeparableTerm {
                        coeff: -I * 0.125,
                        outer: outer.clone(),
                        left: r.clone(),
                        right: r,
                    }
                })
                .collect(),
        };
        AlphaNonlinearity { convective, pressure }
    }

    pub fn eval(&self, alpha: &SpectralField) -> Result<SpectralField> {
        let a = alpha.to_frequency();
        let c = a.conj();
        let plus = a.add(&c);
        let minus = a.sub(&c);
        let mut out = pseudo_product_separable(&self.convective, &plus, &minus)?;
        out.axpy(ONE, &pseudo_product_separable(&self.pressure, &minus, &minus)?);
        out.set_real(false);
        Ok(out)
    }
}

/// Smallest value of `ρ = 1 + mean + |∇|⟨∇⟩⁻¹Re α` on the grid.
pub fn min_density_alpha(a: &AlphaState) -> Result<f64> {
    let n = apply_multiplier(&a.alpha.real_part(), &Multiplier::abs_over_bracket())?;
    Ok(n.into_physical()
        .data()
        .iter()
        .map(|v| 1.0 + a.mean_density + v.re)
        .fold(f64::INFINITY, f64::min))
}

pub(crate) fn check_alpha_density(a: &AlphaState) -> Result<()> {
    check_positive(min_density_alpha(a)?, a.time)
}

/// `i⟨∇⟩α + N(α)`, with `N` dropped when `nonlinear` is false.
pub fn rhs_alpha(a: &AlphaState, nonlinear: bool) -> Result<SpectralField> {
    check_alpha_density(a)?;
    let mut out = apply_multiplier(&a.alpha, &Multiplier::bracket().scaled(I))?;
    if nonlinear {
        out.axpy(ONE, &AlphaNonlinearity::new().eval(&a.alpha)?);
    }
    out.set_real(false);
    Ok(out)
}
