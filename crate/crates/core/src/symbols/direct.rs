//! Mode-by-mode pseudo-products, `O(|supp f|·|supp g|)`.
//!
//! Pairs whose sum `ξ₁+ξ₂` leaves the lattice box (any axis with `|m| >= n/2`)
//! are discarded rather than wrapped, so every retained triple satisfies
//! `ξ = ξ₁ + ξ₂` exactly and carries the exact phase `φ_ε(ξ₁,ξ₂)`.

use num_complex::Complex64;

use super::kinds::{eval_symbol, BilinearSymbolSpec};
use super::phase::{ConjPair, Sign};
use crate::error::{EpError, Result};
use crate::spectral::field::{Representation, SpectralField};
use crate::spectral::grid::Grid3;

/// Largest grid (in total modes) accepted by the direct engine.
pub const DIRECT_MODE_LIMIT: usize = 32 * 32 * 32;

fn guard(grid: &Grid3) -> Result<()> {
    if grid.len() > DIRECT_MODE_LIMIT {
        return Err(EpError::GridTooLarge { modes: grid.len(), limit: DIRECT_MODE_LIMIT });
    }
    Ok(())
}

/// Frequency data of `C^ε f`.
pub fn conjugated_spectrum(field: &SpectralField, sign: Sign) -> SpectralField {
    match sign {
        Sign::Plus => field.to_frequency(),
        Sign::Minus => field.conj().into_frequency(),
    }
}

/// Flat indices of nonzero amplitudes.
pub fn support(spectrum: &SpectralField) -> Vec<usize> {
    debug_assert_eq!(spectrum.representation(), Representation::Frequency);
    spectrum
        .data()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm_sqr() > 0.0)
        .map(|(f, _)| f)
        .collect()
}

#[inline]
fn sum_index(grid: &Grid3, modes: &[[i64; 3]], a: usize, b: usize) -> Option<usize> {
    let (ma, mb) = (modes[a], modes[b]);
    grid.flat_of_modes([ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]])
        .filter(|&f| !grid.is_nyquist(f))
}

fn all_modes(grid: &Grid3) -> Vec<[i64; 3]> {
    (0..grid.len()).map(|f| grid.modes(f)).collect()
}

/// `F[T_m[C^{ε₁}f, C^{ε₂}g]](ξ) = Σ_{ξ₁+ξ₂=ξ} m(ξ₁,ξ₂) F[C^{ε₁}f](ξ₁) F[C^{ε₂}g](ξ₂)`
pub fn pseudo_product_direct(
    spec: &BilinearSymbolSpec,
    eps: ConjPair,
    f: &SpectralField,
    g: &SpectralField,
) -> Result<SpectralField> {
    let grid = f.grid();
    grid.check_same(&g.grid())?;
    guard(&grid)?;
    let fh = conjugated_spectrum(f, eps.0);
    let gh = conjugated_spectrum(g, eps.1);
    let (sf, sg) = (support(&fh), support(&gh));
    let modes = all_modes(&grid);
    let xis = grid.wavevectors();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for &a in &sf {
        let fa = fh.data()[a];
        for &b in &sg {
            if let Some(o) = sum_index(&grid, &modes, a, b) {
                let m = eval_symbol(spec, xis[a], xis[b])?;
                out[o] += m * fa * gh.data()[b];
            }
        }
    }
    SpectralField::from_data(grid, out, Representation::Frequency, false)
}

/// Precomputed pair list for repeated direct products with fixed supports.
#[derive(Debug, Clone)]
pub struct PairKernel {
    grid: Grid3,
    out: Vec<u32>,
    left: Vec<u32>,
    right: Vec<u32>,
    weight: Vec<f64>,
}

impl PairKernel {
    /// Kernel over all pairs from the given supports with nonzero weight.
    pub fn build(
        spec: &BilinearSymbolSpec,
        grid: Grid3,
        left_support: &[usize],
        right_support: &[usize],
    ) -> Result<Self> {
        guard(&grid)?;
        let modes = all_modes(&grid);
        let xis = grid.wavevectors();
        let mut k = PairKernel {
            grid,
            out: Vec::new(),
            left: Vec::new(),
            right: Vec::new(),
            weight: Vec::new(),
        };
        for &a in left_support {
            for &b in right_support {
                if let Some(o) = sum_index(&grid, &modes, a, b) {
                    let w = eval_symbol(spec, xis[a], xis[b])?;
                    if w != 0.0 {
                        k.out.push(o as u32);
                        k.left.push(a as u32);
                        k.right.push(b as u32);
                        k.weight.push(w);
                    }
                }
            }
        }
        Ok(k)
    }

    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight.is_empty()
    }

    /// Apply to spectra that are already conjugated as required.
    pub fn apply(&self, left: &SpectralField, right: &SpectralField) -> Result<SpectralField> {
        self.grid.check_same(&left.grid())?;
        self.grid.check_same(&right.grid())?;
        let (l, r) = (left.to_frequency(), right.to_frequency());
        let (ld, rd) = (l.data(), r.data());
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for i in 0..self.weight.len() {
            out[self.out[i] as usize] +=
                self.weight[i] * ld[self.left[i] as usize] * rd[self.right[i] as usize];
        }
        SpectralField::from_data(self.grid, out, Representation::Frequency, false)
    }
}
