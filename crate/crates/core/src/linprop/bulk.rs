//! Whole-space norms of radially propagated data.
//!
//! For radial `u`, `r·u(r) = (2π²)⁻¹ ∫₀^∞ g(k) k sin(kr) dk` with
//! `g = e^{it⟨k⟩} f̂`, which is one half-line Fourier integral of the odd
//! extension of `k g(k)`. A single FFT therefore returns `u` on a whole radial
//! grid; this is the route used for `L^p` and Besov norms, while
//! [`super::kg_propagate_radial`] serves pointwise values.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::profile::RadialProfile;
use super::quadrature::RADIAL_CONSTANT;
use crate::error::{EpError, Result};
use crate::spectral::grid::bracket_scalar;
use crate::spectral::littlewood_paley::Band;

/// Smallest dyadic shell kept in whole-space Besov sums.
pub const MIN_SHELL: f64 = 1.0 / 16384.0;

/// Radial samples `u(r_m)` on `r_m = m·dr`, `0 ≤ r_m < R`.
#[derive(Debug, Clone)]
pub struct RadialSamples {
    pub dr: f64,
    pub values: Vec<Complex64>,
}

/// Which function of the propagated profile to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialQuantity {
    Value,
    /// `∂_r u`, whose modulus is `|∇u|`.
    RadialDerivative,
}

/// Sample `Q e^{it⟨∇⟩} P f` on a radial grid reaching past `t + extent`.
///
/// `band` restricts the profile (shell or low block), `oversample` sets how far
/// the frequency grid is padded past the band edge, so that `|u|^p` is still
/// resolved by the radial grid.
pub fn radial_samples(
    prof: &RadialProfile,
    t: f64,
    band: Option<Band>,
    quantity: RadialQuantity,
    oversample: f64,
) -> Result<RadialSamples> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(EpError::Precondition(format!("time {t} must be finite and ≥ 0")));
    }
    let (top, spread) = match band {
        Some(Band::AtN(n)) => (4.0 * n, 40.0 / n),
        Some(Band::UpToN(n)) => (2.0 * n, 40.0 / n),
        Some(Band::FromN(_)) | None => (prof.k_max(), 0.0),
    };
    let top = top.min(prof.k_max());
    // e^{it⟨k⟩} is analytic only in |Im k| < 1, so u carries an e^{-r} tail
    // past the light cone; 36 e-foldings keep the periodic images below 1e-15
    let reach = t + prof.extent() + spread + 36.0;
    let period = 2.0 * reach;
    let dk = 2.0 * PI / period;
    let k_pad = top * oversample.max(2.0);
    let m = ((2.0 * k_pad / dk).ceil() as usize).next_power_of_two().max(64);
    let half = m / 2;

    let weight = |k: f64| band.map_or(1.0, |b| b.symbol(k));
    let g = |k: f64| {
        let amp = prof.eval(k) * weight(k);
        Complex64::from_polar(amp, t * bracket_scalar(k))
    };
    let mut odd = vec![Complex64::new(0.0, 0.0); m];
    let mut even = vec![Complex64::new(0.0, 0.0); m];
    let mut origin = Complex64::new(0.0, 0.0);
    for j in 1..half {
        let k = j as f64 * dk;
        if k > top {
            break;
        }
        let gk = g(k);
        odd[j] = gk * k;
        odd[m - j] = -gk * k;
        origin += gk * (k * k);
        if quantity == RadialQuantity::RadialDerivative {
            even[j] = gk * (k * k);
            even[m - j] = gk * (k * k);
        }
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(m);
    fft.process(&mut odd);
    if quantity == RadialQuantity::RadialDerivative {
        fft.process(&mut even);
    }

    let dr = period / m as f64;
    let i2 = Complex64::new(0.0, 2.0);
    let values = (0..half)
        .map(|idx| {
            if idx == 0 {
                return match quantity {
                    RadialQuantity::Value => origin * (dk * RADIAL_CONSTANT),
                    RadialQuantity::RadialDerivative => Complex64::new(0.0, 0.0),
                };
            }
            let r = idx as f64 * dr;
            let u = odd[idx] * dk / (i2 * r) * RADIAL_CONSTANT;
            match quantity {
                RadialQuantity::Value => u,
                RadialQuantity::RadialDerivative => {
                    even[idx] * dk * RADIAL_CONSTANT / (2.0 * r) - u / r
                }
            }
        })
        .collect();
    Ok(RadialSamples { dr, values })
}

impl RadialSamples {
    pub fn radius(&self, idx: usize) -> f64 {
        idx as f64 * self.dr
    }

    /// `‖u‖_{L^p(ℝ³)} = (4π ∫ |u|^p r² dr)^{1/p}`; `p = ∞` gives the maximum.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        let sum: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let r = self.radius(i);
                let a = if p == 2.0 { v.norm_sqr() } else { v.norm().powf(p) };
                a * r * r
            })
            .sum();
        (4.0 * PI * sum * self.dr).powf(1.0 / p)
    }
}

fn oversample_for(p: f64) -> f64 {
    if p.is_infinite() {
        4.0
    } else {
        1.25 * p.max(2.0)
    }
}

/// `‖Q e^{it⟨∇⟩} f‖_{L^p(ℝ³)}`.
pub fn radial_lp_norm(prof: &RadialProfile, t: f64, p: f64, quantity: RadialQuantity) -> Result<f64> {
    Ok(radial_samples(prof, t, None, quantity, oversample_for(p))?.lp_norm(p))
}

/// Plancherel side: `‖f‖²_{L²} = (2π²)⁻¹ ∫ |f̂|² k² dk`.
pub fn radial_l2_plancherel(prof: &RadialProfile) -> f64 {
    let n = 20_000;
    let h = prof.k_max() / n as f64;
    // composite Simpson; the integrand vanishes at k = 0
    let mut acc = 0.0;
    for i in 0..=n {
        let k = i as f64 * h;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * prof.eval(k).powi(2) * k * k;
    }
    (acc * h / 3.0 * RADIAL_CONSTANT).sqrt()
}

/// Dyadic shells `N = 2^j ≥ MIN_SHELL` whose band meets `[0, k_max]`.
pub fn radial_shells(prof: &RadialProfile) -> Vec<f64> {
    let mut out = Vec::new();
    let mut n = MIN_SHELL;
    while n < prof.k_max() {
        out.push(n);
        n *= 2.0;
    }
    out
}

/// `‖Q e^{it⟨∇⟩} f‖_{B⁰_{p,2}(ℝ³)} = (Σ_N ‖Q P_N e^{it⟨∇⟩} f‖²_{L^p})^{1/2}`,
/// with shells below [`MIN_SHELL`] dropped.
pub fn radial_besov_norm(
    prof: &RadialProfile,
    t: f64,
    p: f64,
    quantity: RadialQuantity,
) -> Result<f64> {
    let mut acc = 0.0;
    for n in radial_shells(prof) {
        let s = radial_samples(prof, t, Some(Band::AtN(n)), quantity, oversample_for(p))?;
        acc += s.lp_norm(p).powi(2);
    }
    Ok(acc.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linprop::kg_propagate_radial;

    #[test]
    fn fft_route_matches_panel_quadrature() {
        let p = RadialProfile::gaussian(1.0, 1.0).unwrap();
        for t in [0.0, 3.0, 20.0] {
            let s = radial_samples(&p, t, None, RadialQuantity::Value, 2.0).unwrap();
            for r_want in [0.0, 0.4, 2.0, 9.0, t + 3.0] {
                let idx = (r_want / s.dr).round() as usize;
                let r = s.radius(idx);
                let a = kg_propagate_radial(&p, t, r).unwrap();
                assert!((a - s.values[idx]).norm() < 1e-11, "t={t} r={r} {a} {}", s.values[idx]);
            }
        }
    }

    #[test]
    fn radial_derivative_of_gaussian() {
        // u = c e^{-r²/2} at t = 0, so ∂_r u = -r u
        let p = RadialProfile::gaussian(1.0, 1.0).unwrap();
        let s = radial_samples(&p, 0.0, None, RadialQuantity::RadialDerivative, 2.0).unwrap();
        let c = (2.0 * PI).powf(-1.5);
        for r_want in [0.1, 0.5, 1.7, 4.0] {
            let idx = (r_want / s.dr).round() as usize;
            let r = s.radius(idx);
            let expect = -r * c * (-0.5 * r * r).exp();
            assert!((s.values[idx].re - expect).abs() < 1e-11, "r={r}");
        }
    }

    #[test]
    fn l2_matches_plancherel() {
        let p = RadialProfile::gaussian(1.0, 0.7).unwrap();
        let want = radial_l2_plancherel(&p);
        // f = (2π)^{-3/2} w^{-3} e^{-r²/2w²}, so ‖f‖²_{L²} = 1/(8 π^{3/2} w³)
        let exact = (8.0 * PI.powf(1.5) * 0.7f64.powi(3)).powf(-0.5);
        assert!((want - exact).abs() < 1e-12 * exact);
        for t in [0.0, 50.0] {
            let got = radial_lp_norm(&p, t, 2.0, RadialQuantity::Value).unwrap();
            assert!((got - want).abs() < 1e-10 * want, "t={t}");
        }
    }

    #[test]
    fn shells_partition_the_profile() {
        // Σ_N P_N = 1 on k ≥ 2·MIN_SHELL, so shellwise L² norms add up
        let p = RadialProfile::gaussian(1.0, 1.0).unwrap();
        let b = radial_besov_norm(&p, 0.0, 2.0, RadialQuantity::Value).unwrap();
        let l2 = radial_l2_plancherel(&p);
        assert!(b > 0.5 * l2 && b < 1.5 * l2);
    }
}
