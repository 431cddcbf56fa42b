//! Pointwise whole-space propagation by oscillation-resolving panel quadrature.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use super::profile::RadialProfile;
use crate::error::{EpError, Result};
use crate::spectral::grid::bracket_scalar;

/// `1/(2π²)`: angular part of `(2π)^{-3} ∫ e^{ix·ξ} dξ` for radial data.
pub const RADIAL_CONSTANT: f64 = 1.0 / (2.0 * PI * PI);

const ORDER: usize = 16;
const TOLERANCE: f64 = 1e-10;
const MAX_REFINEMENTS: usize = 10;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let gl = GaussLegendre::new(NonZeroUsize::new(ORDER).expect("nonzero order"));
        gl.iter().map(|&(x, w)| (x, w)).collect()
    })
}

#[inline]
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

fn panel_sum(prof: &RadialProfile, t: f64, r: f64, panels: usize) -> Complex64 {
    let k_max = prof.k_max();
    let h = k_max / panels as f64;
    let nodes = rule();
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        let mut part = Complex64::new(0.0, 0.0);
        for &(x, w) in nodes {
            let k = mid + 0.5 * h * x;
            let amp = prof.eval(k) * sinc(k * r) * k * k * w;
            part += Complex64::from_polar(amp, t * bracket_scalar(k));
        }
        acc += part * (0.5 * h);
    }
    acc
}

/// Mass `∫|f̂| k² dk`, the natural scale of `u(t, r)`.
fn profile_mass(prof: &RadialProfile) -> f64 {
    let panels = 64;
    let h = prof.k_max() / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for &(x, w) in rule() {
            let k = mid + 0.5 * h * x;
            acc += prof.eval(k).abs() * k * k * w * 0.5 * h;
        }
    }
    acc
}

/// `u(t, r) = (2π²)⁻¹ ∫₀^{k_max} e^{it⟨k⟩} f̂(k) sinc(kr) k² dk`.
///
/// Gauss–Legendre panels start no longer than `π/(2(t+r+1))` and are halved
/// until two successive sums agree to `1e-10` of the profile mass.
pub fn kg_propagate_radial(prof: &RadialProfile, t: f64, r: f64) -> Result<Complex64> {
    if !(t >= 0.0 && t.is_finite() && r >= 0.0 && r.is_finite()) {
        return Err(EpError::Precondition(format!("need finite t, r ≥ 0, got t={t}, r={r}")));
    }
    let max_len = PI / (2.0 * (t + r + 1.0));
    let mut panels = ((prof.k_max() / max_len).ceil() as usize).max(1);
    let scale = profile_mass(prof).max(f64::MIN_POSITIVE);
    let mut prev = panel_sum(prof, t, r, panels);
    for _ in 0..MAX_REFINEMENTS {
        panels *= 2;
        let next = panel_sum(prof, t, r, panels);
        if (next - prev).norm() < TOLERANCE * scale {
            return Ok(next * RADIAL_CONSTANT);
        }
        prev = next;
    }
    Err(EpError::Quadrature(format!(
        "panel refinement exceeded at t={t}, r={r} for {}",
        prof.name()
    )))
}
