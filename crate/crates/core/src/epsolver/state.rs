use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{EpError, Result};
use crate::spectral::field::{Representation, SpectralField};
use crate::spectral::grid::Grid3;
use crate::spectral::multiplier::{apply_multiplier, Multiplier};
use crate::spectral::norms::h_norm;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Density perturbation `n = ρ - 1` and irrotational velocity `u`.
#[derive(Debug, Clone)]
pub struct FluidState {
    pub grid: Grid3,
    pub rho_minus_1: SpectralField,
    pub u: [SpectralField; 3],
    pub time: f64,
}

/// Complex unknown `α = ⟨∇⟩|∇|⁻¹(ρ-1) + i|∇|⁻¹div u`.
///
/// `α` cannot represent the spatial mean of `ρ - 1`; that constant is carried
/// alongside in `mean_density` and is invariant in time.
#[derive(Debug, Clone)]
pub struct AlphaState {
    pub grid: Grid3,
    pub alpha: SpectralField,
    pub mean_density: f64,
    pub time: f64,
}

impl FluidState {
    pub fn equilibrium(grid: Grid3) -> Self {
        let z = SpectralField::zeros(grid, Representation::Frequency);
        FluidState {
            grid,
            rho_minus_1: z.clone(),
            u: [z.clone(), z.clone(), z],
            time: 0.0,
        }
    }

    pub fn mean_density(&self) -> f64 {
        self.rho_minus_1.mean().re
    }

    /// `∫(ρ - 1) dx`
    pub fn total_charge(&self) -> f64 {
        self.mean_density() * self.grid.volume()
    }

    /// The three components of `curl u`.
    pub fn curl(&self) -> Result<[SpectralField; 3]> {
        let d = |comp: usize, axis: usize| apply_multiplier(&self.u[comp], &Multiplier::partial(axis));
        Ok([
            d(2, 1)?.sub(&d(1, 2)?),
            d(0, 2)?.sub(&d(2, 0)?),
            d(1, 0)?.sub(&d(0, 1)?),
        ])
    }

    /// `‖curl u‖_{L²}` and `‖u‖_{H¹}`.
    pub fn curl_and_h1(&self) -> Result<(f64, f64)> {
        let c = self.curl()?;
        let curl = c.iter().map(|f| h_norm(f, 0.0).powi(2)).sum::<f64>().sqrt();
        let h1 = self.u.iter().map(|f| h_norm(f, 1.0).powi(2)).sum::<f64>().sqrt();
        Ok((curl, h1))
    }

    /// Smallest value of `ρ` on the grid.
    pub fn min_density(&self) -> f64 {
        self.rho_minus_1
            .to_physical()
            .data()
            .iter()
            .map(|v| 1.0 + v.re)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn to_alpha(s: &FluidState) -> Result<AlphaState> {
    let grid = s.grid;
    let mut alpha = apply_multiplier(&s.rho_minus_1, &Multiplier::bracket_over_abs())?;
    for j in 0..3 {
        let r = apply_multiplier(&s.u[j], &Multiplier::riesz(j))?;
        alpha.axpy(I, &r);
    }
    alpha.set_real(false);
    Ok(AlphaState { grid, alpha, mean_density: s.mean_density(), time: s.time })
}

pub fn from_alpha(a: &AlphaState) -> Result<FluidState> {
    let re = a.alpha.real_part();
    let im = a.alpha.imag_part();
    let mut n = apply_multiplier(&re, &Multiplier::abs_over_bracket())?;
    n.data_mut()[0] = Complex64::new(a.mean_density, 0.0);
    let u = [0, 1, 2].map(|j| {
        apply_multiplier(&im, &Multiplier::riesz(j).scaled(Complex64::new(-1.0, 0.0)))
    });
    let [u0, u1, u2] = u;
    Ok(FluidState { grid: a.grid, rho_minus_1: n, u: [u0?, u1?, u2?], time: a.time })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFamily {
    /// `exp(-r²/(2w²))`
    Gaussian,
    /// `exp(1 - 1/(1 - (r/R)²))` for `r < R = 4w`, zero outside.
    CompactBump,
}

impl FromStr for DataFamily {
    type Err = EpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gaussian" => Ok(DataFamily::Gaussian),
            "compact" | "bump" | "compact_bump" => Ok(DataFamily::CompactBump),
            other => Err(EpError::Config(format!("unknown data family `{other}`"))),
        }
    }
}

impl DataFamily {
    pub fn profile(self, r: f64, width: f64) -> f64 {
        match self {
            DataFamily::Gaussian => (-0.5 * (r / width).powi(2)).exp(),
            DataFamily::CompactBump => {
                let s = r / (4.0 * width);
                if s >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
        }
    }

    /// Diameter of the effective support.
    pub fn diameter(self, width: f64) -> f64 {
        8.0 * width
    }
}

/// Largest admissible perturbation amplitude.
pub const MAX_AMPLITUDE: f64 = 0.05;

/// Initial data: `ρ₀ - 1 = δ·G_w(x - c)` and `u₀ = a·∇G_{w_u}(x - c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSpec {
    pub family: DataFamily,
    pub delta: f64,
    pub width: f64,
    /// Defaults to the box center.
    pub center: Option<[f64; 3]>,
    /// Subtract the mean of `ρ₀ - 1`.
    pub neutral: bool,
    /// Width of the velocity potential; defaults to `width`.
    pub velocity_width: Option<f64>,
    /// Velocity amplitude `a`; defaults to `delta`.
    pub velocity_amplitude: Option<f64>,
}

impl DataSpec {
    pub fn gaussian(delta: f64, width: f64) -> Self {
        DataSpec {
            family: DataFamily::Gaussian,
            delta,
            width,
            center: None,
            neutral: false,
            velocity_width: None,
            velocity_amplitude: None,
        }
    }

    pub fn velocity_width(&self) -> f64 {
        self.velocity_width.unwrap_or(self.width)
    }

    pub fn velocity_amplitude(&self) -> f64 {
        self.velocity_amplitude.unwrap_or(self.delta)
    }

    pub fn diameter(&self) -> f64 {
        self.family.diameter(self.width.max(self.velocity_width()))
    }

    pub fn validate(&self, grid: &Grid3) -> Result<()> {
        for (name, v) in [("data.delta", self.delta), ("data.velocity_amplitude", self.velocity_amplitude())] {
            if !v.is_finite() || v.abs() > MAX_AMPLITUDE {
                return Err(EpError::Precondition(format!(
                    "{name} = {v} exceeds the small-data limit {MAX_AMPLITUDE}"
                )));
            }
        }
        for (name, w) in [("data.width", self.width), ("data.velocity_width", self.velocity_width())] {
            if !(w.is_finite() && w > 0.0) {
                return Err(EpError::Precondition(format!("{name} must be positive, got {w}")));
            }
        }
        if self.diameter() >= grid.box_length() {
            return Err(EpError::Precondition(format!(
                "data diameter {} does not fit in box of length {}",
                self.diameter(),
                grid.box_length()
            )));
        }
        Ok(())
    }
}

/// Minimum-image distance from `c` on the periodic box.
fn periodic_radius(x: [f64; 3], c: [f64; 3], l: f64) -> f64 {
    let mut s = 0.0;
    for a in 0..3 {
        let mut d = (x[a] - c[a]).rem_euclid(l);
        if d > 0.5 * l {
            d -= l;
        }
        s += d * d;
    }
    s.sqrt()
}

pub fn init_perturbation(grid: Grid3, spec: &DataSpec) -> Result<FluidState> {
    spec.validate(&grid)?;
    let l = grid.box_length();
    let c = spec.center.unwrap_or([0.5 * l; 3]);
    let fam = spec.family;
    let mut n = SpectralField::from_real_fn(grid, |x| {
        spec.delta * fam.profile(periodic_radius(x, c, l), spec.width)
    });
    if spec.neutral {
        let m = n.mean();
        for v in n.data_mut() {
            *v -= m;
        }
    }
    let wu = spec.velocity_width();
    let psi = SpectralField::from_real_fn(grid, |x| fam.profile(periodic_radius(x, c, l), wu));
    let amp = Complex64::new(spec.velocity_amplitude(), 0.0);
    let grad = |j| apply_multiplier(&psi, &Multiplier::partial(j).scaled(amp));
    let mut rho = n.into_frequency();
    // unpaired Nyquist modes carry no information on the symmetric lattice
    for f in 0..grid.len() {
        if grid.is_nyquist(f) {
            rho.data_mut()[f] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(FluidState { grid, rho_minus_1: rho, u: [grad(0)?, grad(1)?, grad(2)?], time: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::norms::lebesgue;

    #[test]
    fn zero_amplitude_is_equilibrium() {
        let g = Grid3::new(16, 32.0).unwrap();
        let s = init_perturbation(g, &DataSpec::gaussian(0.0, 2.0)).unwrap();
        assert_eq!(s.rho_minus_1.max_abs(), 0.0);
        assert!(s.u.iter().all(|f| f.max_abs() == 0.0));
        let a = to_alpha(&s).unwrap();
        assert_eq!(a.alpha.max_abs(), 0.0);
    }

    #[test]
    fn velocity_is_curl_free() {
        let g = Grid3::new(16, 32.0).unwrap();
        let s = init_perturbation(g, &DataSpec::gaussian(1e-2, 2.0)).unwrap();
        let (curl, h1) = s.curl_and_h1().unwrap();
        assert!(h1 > 0.0);
        assert!(curl <= 1e-12 * h1, "{curl} {h1}");
    }

    #[test]
    fn single_mode_density() {
        let g = Grid3::new(16, 2.0 * std::f64::consts::PI).unwrap();
        let mut s = FluidState::equilibrium(g);
        s.rho_minus_1 = SpectralField::from_real_fn(g, |x| (2.0 * x[0]).cos()).into_frequency();
        let a = to_alpha(&s).unwrap();
        let expect = SpectralField::from_real_fn(g, |x| 5f64.sqrt() / 2.0 * (2.0 * x[0]).cos());
        assert!(a.alpha.relative_distance(&expect) < 1e-13);
    }

    #[test]
    fn round_trip_and_mean() {
        let g = Grid3::new(16, 24.0).unwrap();
        let mut spec = DataSpec::gaussian(1e-2, 2.0);
        spec.velocity_width = Some(1.5);
        let s = init_perturbation(g, &spec).unwrap();
        assert!(s.mean_density() > 0.0);
        let back = from_alpha(&to_alpha(&s).unwrap()).unwrap();
        assert!(back.rho_minus_1.relative_distance(&s.rho_minus_1) < 1e-12);
        for j in 0..3 {
            assert!(back.u[j].relative_distance(&s.u[j]) < 1e-12);
        }
    }

    #[test]
    fn neutral_flag_removes_mean() {
        let g = Grid3::new(16, 24.0).unwrap();
        let mut spec = DataSpec::gaussian(1e-2, 2.0);
        spec.neutral = true;
        let s = init_perturbation(g, &spec).unwrap();
        assert!(s.total_charge().abs() < 1e-14);
        assert!(lebesgue(&s.rho_minus_1, 1.0) > 0.0);
    }

    #[test]
    fn rejects_large_or_wide_data() {
        let g = Grid3::new(16, 24.0).unwrap();
        assert!(init_perturbation(g, &DataSpec::gaussian(0.1, 2.0)).is_err());
        assert!(init_perturbation(g, &DataSpec::gaussian(0.01, 4.0)).is_err());
    }
}
