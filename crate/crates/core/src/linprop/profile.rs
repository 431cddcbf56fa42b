use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{EpError, Result};
use crate::spectral::grid::{bracket_scalar, norm3, Grid3};
use crate::spectral::littlewood_paley::cutoff_chi;
use crate::spectral::SpectralField;

type ProfileFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Radial frequency profile `f̂(|ξ|)` of a function on ℝ³, with
/// `f̂(ξ) = ∫ f(x) e^{-ix·ξ} dx`.
///
/// The profile is kept in closed form and sampled on demand; `k_max` bounds
/// its support up to a tail below `1e-10` of the total mass `∫|f̂|k²dk`.
#[derive(Clone)]
pub struct RadialProfile {
    name: String,
    f: Arc<ProfileFn>,
    k_max: f64,
    /// Spatial radius holding the bulk of `f`.
    extent: f64,
    sample_count: usize,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("name", &self.name)
            .field("k_max", &self.k_max)
            .field("extent", &self.extent)
            .finish()
    }
}

/// `k` beyond which `∫_k^∞ e^{-s²w²/2} s² ds` drops below `rel` of the full integral.
fn gaussian_cutoff(width: f64, rel: f64) -> f64 {
    // tail ≈ (k/w²) e^{-k²w²/2}, full = √(π/2)/w³; substitute s = kw
    let full = (std::f64::consts::PI / 2.0).sqrt();
    let mut s: f64 = 1.0;
    while s * (-0.5 * s * s).exp() > rel * full {
        s += 0.05;
    }
    s / width
}

impl RadialProfile {
    pub fn new(
        name: impl Into<String>,
        k_max: f64,
        extent: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(k_max.is_finite() && k_max > 0.0) {
            return Err(EpError::Precondition(format!("k_max = {k_max} must be positive")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(EpError::Precondition(format!("extent = {extent} must be positive")));
        }
        Ok(Self { name: name.into(), f: Arc::new(f), k_max, extent, sample_count: 512 })
    }

    /// `f̂(k) = a e^{-k²w²/2}`, the transform of `a (2π)^{-3/2} w^{-3} e^{-|x|²/2w²}`.
    pub fn gaussian(amplitude: f64, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(EpError::Precondition(format!("width = {width} must be positive")));
        }
        let k_max = gaussian_cutoff(width, 1e-12);
        Self::new(format!("gaussian(w={width})"), k_max, 10.0 * width, move |k| {
            amplitude * (-0.5 * (k * width).powi(2)).exp()
        })
    }

    /// Transform of the density bump `δ e^{-|x|²/2w²}`.
    pub fn gaussian_density(delta: f64, width: f64) -> Result<Self> {
        let mass = delta * (2.0 * std::f64::consts::PI).powf(1.5) * width.powi(3);
        let mut p = Self::gaussian(mass, width)?;
        p.name = format!("density(delta={delta},w={width})");
        Ok(p)
    }

    /// `P_{≤1}` of the density bump.
    pub fn low_density(delta: f64, width: f64) -> Result<Self> {
        let base = Self::gaussian_density(delta, width)?;
        let mut p = base.with_factor("P<=1", cutoff_chi)?;
        p.k_max = p.k_max.min(2.0);
        p.extent = base.extent + 40.0;
        Ok(p)
    }

    /// Charged part `χ^Q = P_{≤1}⟨∇⟩|∇|⁻¹(ρ₀-1)` of the density bump.
    pub fn chi_q(delta: f64, width: f64) -> Result<Self> {
        let mut p = Self::low_density(delta, width)?.with_factor("<D>/|D|", |k| {
            if k > 0.0 {
                bracket_scalar(k) / k
            } else {
                0.0
            }
        })?;
        p.name = format!("chiQ(delta={delta},w={width})");
        Ok(p)
    }

    /// Multiply by a radial symbol.
    pub fn with_factor(
        &self,
        label: &str,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let f = self.f.clone();
        let mut p = Self::new(format!("{label}*{}", self.name), self.k_max, self.extent, move |k| {
            g(k) * f(k)
        })?;
        p.sample_count = self.sample_count;
        Ok(p)
    }

    /// Band-limit to `|ξ| ≤ 2K` with the smooth cutoff `χ(ξ/K)`.
    pub fn band_limited(&self, k: f64) -> Result<Self> {
        let mut p = self.with_factor(&format!("chi(k/{k})"), move |s| cutoff_chi(s / k))?;
        p.k_max = p.k_max.min(2.0 * k);
        Ok(p)
    }

    pub fn with_sample_count(mut self, count: usize) -> Self {
        self.sample_count = count.max(2);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    #[inline]
    pub fn eval(&self, k: f64) -> f64 {
        if k > self.k_max {
            0.0
        } else {
            (self.f)(k)
        }
    }

    /// `(k, f̂(k))` on a uniform grid of `sample_count` points over `[0, k_max]`.
    pub fn samples(&self) -> Vec<(f64, f64)> {
        let n = self.sample_count;
        (0..n)
            .map(|i| {
                let k = self.k_max * i as f64 / (n - 1) as f64;
                (k, self.eval(k))
            })
            .collect()
    }

    /// Sample `e^{it⟨ξ⟩} f̂(|ξ|)` on a periodic grid, centred at the origin.
    ///
    /// Fourier coefficients of the periodization are `f̂(ξ)/L³`; modes beyond
    /// `k_max` and Nyquist modes are left at zero.
    pub fn to_grid_field(&self, grid: Grid3, t: f64) -> SpectralField {
        let inv_vol = 1.0 / grid.volume();
        SpectralField::from_spectrum(grid, t == 0.0, |xi| {
            let k = norm3(xi);
            Complex64::from_polar(self.eval(k) * inv_vol, t * bracket_scalar(k))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_cutoff_leaves_small_tail() {
        for w in [0.5, 1.0, 3.0] {
            let p = RadialProfile::gaussian(1.0, w).unwrap();
            let k = p.k_max() * w;
            let full = (std::f64::consts::PI / 2.0).sqrt();
            // crude bound on the tail of s² e^{-s²/2}
            let tail = (k + 1.0 / k) * (-0.5 * k * k).exp();
            assert!(tail < 1e-10 * full, "w={w} tail={tail}");
        }
    }

    #[test]
    fn chi_q_is_supported_below_two() {
        let p = RadialProfile::chi_q(1e-2, 1.0).unwrap();
        assert_eq!(p.eval(2.5), 0.0);
        assert_eq!(p.eval(0.0), 0.0);
        let k = 0.5;
        let expect = 1e-2 * (2.0 * std::f64::consts::PI).powf(1.5) * (-0.125f64).exp()
            * bracket_scalar(k)
            / k;
        assert!((p.eval(k) - expect).abs() < 1e-14 * expect);
    }

    #[test]
    fn samples_span_the_support() {
        let p = RadialProfile::gaussian(2.0, 1.0).unwrap().with_sample_count(11);
        let s = p.samples();
        assert_eq!(s.len(), 11);
        assert_eq!(s[0], (0.0, 2.0));
        assert!((s[10].0 - p.k_max()).abs() < 1e-12);
    }
}
