use num_complex::Complex64;

use super::state::{AlphaState, FluidState};
use crate::error::Result;
use crate::spectral::field::{Representation, SpectralField};
use crate::spectral::grid::{dot3, Grid3};
use crate::spectral::littlewood_paley::{lp_project, Band, ShellLadder};
use crate::spectral::norms::lebesgue;

/// `S_N(ξ) = Σ_{|γ|≤N} ξ^{2γ}` over multi-indices `γ ∈ ℕ³`.
pub fn multi_index_weight(xi: [f64; 3], n: usize) -> f64 {
    // complete homogeneous polynomials h_k(x₁,x₂,x₃) in x_a = ξ_a², built
    // one variable at a time
    let mut h = vec![0.0; n + 1];
    h[0] = 1.0;
    for x in xi.map(|v| v * v) {
        for k in 1..=n {
            h[k] += x * h[k - 1];
        }
    }
    h.iter().sum()
}

/// All multi-indices with `|γ| <= n`.
pub fn multi_indices(n: usize) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in 0..=n as u32 {
        for b in 0..=(n as u32 - a) {
            for c in 0..=(n as u32 - a - b) {
                out.push([a, b, c]);
            }
        }
    }
    out
}

fn derivative_symbol(xi: [f64; 3], g: [u32; 3]) -> Complex64 {
    let mut s = Complex64::new(1.0, 0.0);
    for a in 0..3 {
        s *= Complex64::new(0.0, xi[a]).powu(g[a]);
    }
    s
}

/// `E_N = Σ_{|γ|≤N} ∫ |∂^γ(ρ-1)|² + ρ|∂^γ u|² + ||∇|⁻¹∂^γ(ρ-1)|² dx`.
///
/// The quadratic part is summed on the frequency side; the cubic part
/// `∫(ρ-1)Σ|∂^γ u|²` by quadrature, two real derivatives per transform.
pub fn energy_en(s: &FluidState, n: usize) -> Result<f64> {
    let grid = s.grid;
    let rho = s.rho_minus_1.to_frequency();
    let u: Vec<SpectralField> = s.u.iter().map(|f| f.to_frequency()).collect();
    let mut quad = 0.0;
    for f in 0..grid.len() {
        let xi = grid.wavevector(f);
        let k2 = dot3(xi, xi);
        let w = multi_index_weight(xi, n);
        let inv = if k2 == 0.0 { 0.0 } else { 1.0 / k2 };
        let uu: f64 = u.iter().map(|c| c.data()[f].norm_sqr()).sum();
        quad += w * (rho.data()[f].norm_sqr() * (1.0 + inv) + uu);
    }
    quad *= grid.volume();
    Ok(quad + cubic_part(&grid, &rho, &u, n)?)
}

fn cubic_part(grid: &Grid3, rho: &SpectralField, u: &[SpectralField], n: usize) -> Result<f64> {
    let weight = rho.to_physical();
    if weight.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let wv = grid.wavevectors();
    let mut jobs: Vec<(usize, [u32; 3])> = Vec::new();
    for g in multi_indices(n) {
        for j in 0..u.len() {
            jobs.push((j, g));
        }
    }
    let mut density = vec![0.0f64; grid.len()];
    for pair in jobs.chunks(2) {
        // ∂^γ u_j is real, so two of them share one complex inverse transform
        let mut data = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (slot, &(j, g)) in pair.iter().enumerate() {
            let c = if slot == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) };
            let src = u[j].data();
            for f in 0..grid.len() {
                if !grid.is_nyquist(f) {
                    data[f] += c * derivative_symbol(wv[f], g) * src[f];
                }
            }
        }
        let phys = SpectralField::from_data(*grid, data, Representation::Frequency, false)?
            .into_physical();
        for (d, v) in density.iter_mut().zip(phys.data()) {
            *d += v.re * v.re + v.im * v.im;
        }
    }
    let sum: f64 = density.iter().zip(weight.data()).map(|(d, w)| d * w.re).sum();
    Ok(sum * grid.cell_volume())
}

/// `sup_M (M^{3/4} + M^{4/3}) ‖P_M α‖_{L^∞}` over the grid's dyadic shells.
pub fn zprime_bound(a: &AlphaState) -> f64 {
    let ladder = ShellLadder::for_grid(&a.grid);
    let fr = a.alpha.to_frequency();
    ladder
        .shells
        .iter()
        .map(|&m| {
            let w = m.powf(0.75) + m.powf(4.0 / 3.0);
            w * lebesgue(&lp_project(&fr, Band::AtN(m)), f64::INFINITY)
        })
        .fold(0.0, f64::max)
}
