use std::str::FromStr;

use num_complex::Complex64;

use super::rhs::{check_alpha_density, rhs_fluid, AlphaNonlinearity, FluidTendency};
use super::state::{AlphaState, FluidState};
use crate::error::{EpError, Result};
use crate::spectral::field::{Representation, SpectralField};
use crate::spectral::grid::{bracket, Grid3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Exact `e^{ih⟨∇⟩}` linear flow with RK4 on the nonlinearity in the
    /// interaction picture.
    Exponential,
    /// Classical RK4 on the full right-hand side.
    Rk4,
}

impl FromStr for Scheme {
    type Err = EpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exponential" | "exp" | "lawson" => Ok(Scheme::Exponential),
            "rk4" => Ok(Scheme::Rk4),
            other => Err(EpError::Config(format!("unknown scheme `{other}`"))),
        }
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn phase_table(grid: &Grid3, t: f64) -> Vec<Complex64> {
    (0..grid.len())
        .map(|f| {
            if grid.is_nyquist(f) {
                ZERO
            } else {
                Complex64::from_polar(1.0, t * bracket(grid.wavevector(f)))
            }
        })
        .collect()
}

fn mul(table: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    table.iter().zip(x).map(|(a, b)| a * b).collect()
}

fn field(grid: Grid3, data: Vec<Complex64>) -> SpectralField {
    SpectralField::from_data(grid, data, Representation::Frequency, false)
        .expect("buffer sized from grid")
}

/// Reusable single-step integrator for the `α` equation.
#[derive(Debug, Clone)]
pub struct AlphaStepper {
    grid: Grid3,
    dt: f64,
    scheme: Scheme,
    nonlinear: bool,
    nl: AlphaNonlinearity,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    generator: Vec<Complex64>,
}

impl AlphaStepper {
    pub fn new(grid: Grid3, dt: f64, scheme: Scheme, nonlinear: bool) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(EpError::Precondition(format!("time step must be positive, got {dt}")));
        }
        if scheme == Scheme::Rk4 {
            // RK4 is stable on the imaginary axis up to 2√2
            let limit = 2.0 * 2f64.sqrt() / bracket([grid.nyquist(); 3]);
            if dt > limit {
                return Err(EpError::Precondition(format!(
                    "dt = {dt} exceeds the RK4 stability limit {limit:.4}"
                )));
            }
        }
        let generator = (0..grid.len())
            .map(|f| {
                if grid.is_nyquist(f) {
                    ZERO
                } else {
                    Complex64::new(0.0, bracket(grid.wavevector(f)))
                }
            })
            .collect();
        Ok(AlphaStepper {
            grid,
            dt,
            scheme,
            nonlinear,
            nl: AlphaNonlinearity::new(),
            half: phase_table(&grid, 0.5 * dt),
            full: phase_table(&grid, dt),
            generator,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> Grid3 {
        self.grid
    }

    pub fn is_nonlinear(&self) -> bool {
        self.nonlinear
    }

    /// `N(α)`, identically zero for a linear stepper.
    pub fn nonlinear_term(&self, alpha: &SpectralField) -> Result<SpectralField> {
        if self.nonlinear {
            self.nl.eval(alpha)
        } else {
            let mut z = SpectralField::zeros(self.grid, Representation::Frequency);
            z.set_real(false);
            Ok(z)
        }
    }

    fn n_data(&self, a: Vec<Complex64>) -> Result<Vec<Complex64>> {
        if !self.nonlinear {
            return Ok(vec![ZERO; a.len()]);
        }
        Ok(self.nl.eval(&field(self.grid, a))?.into_data())
    }

    pub fn step(&self, s: &AlphaState) -> Result<AlphaState> {
        self.grid.check_same(&s.grid)?;
        check_alpha_density(s)?;
        let h = self.dt;
        let x = s.alpha.to_frequency().into_data();
        let next = match self.scheme {
            Scheme::Exponential => self.lawson(&x, h)?,
            Scheme::Rk4 => self.rk4(&x, h)?,
        };
        Ok(AlphaState {
            grid: self.grid,
            alpha: field(self.grid, next),
            mean_density: s.mean_density,
            time: s.time + h,
        })
    }

    fn lawson(&self, x: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
        let ex_half = mul(&self.half, x);
        let ex_full = mul(&self.full, x);
        let a = self.n_data(x.to_vec())?;
        let sa: Vec<Complex64> = x.iter().zip(&a).map(|(x, a)| x + 0.5 * h * a).collect();
        let b = self.n_data(mul(&self.half, &sa))?;
        let sb: Vec<Complex64> = ex_half.iter().zip(&b).map(|(e, b)| e + 0.5 * h * b).collect();
        let c = self.n_data(sb)?;
        let ec = mul(&self.half, &c);
        let sc: Vec<Complex64> = ex_full.iter().zip(&ec).map(|(e, c)| e + h * c).collect();
        let d = self.n_data(sc)?;
        let ea = mul(&self.full, &a);
        let bc: Vec<Complex64> = b.iter().zip(&c).map(|(b, c)| b + c).collect();
        let ebc = mul(&self.half, &bc);
        Ok((0..x.len())
            .map(|i| ex_full[i] + h / 6.0 * (ea[i] + 2.0 * ebc[i] + d[i]))
            .collect())
    }

    fn full_rhs(&self, x: Vec<Complex64>) -> Result<Vec<Complex64>> {
        let lin = mul(&self.generator, &x);
        let n = self.n_data(x)?;
        Ok(lin.iter().zip(&n).map(|(l, n)| l + n).collect())
    }

    fn rk4(&self, x: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
        let shift = |k: &[Complex64], s: f64| -> Vec<Complex64> {
            x.iter().zip(k).map(|(x, k)| x + s * k).collect()
        };
        let k1 = self.full_rhs(x.to_vec())?;
        let k2 = self.full_rhs(shift(&k1, 0.5 * h))?;
        let k3 = self.full_rhs(shift(&k2, 0.5 * h))?;
        let k4 = self.full_rhs(shift(&k3, h))?;
        Ok((0..x.len())
            .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    }
}

/// One step of the `α` equation with the full nonlinearity.
pub fn step(state: &AlphaState, dt: f64, scheme: Scheme) -> Result<AlphaState> {
    AlphaStepper::new(state.grid, dt, scheme, true)?.step(state)
}

fn fluid_shift(s: &FluidState, k: &FluidTendency, h: f64) -> FluidState {
    let c = Complex64::new(h, 0.0);
    let mut out = s.clone();
    out.rho_minus_1.axpy(c, &k.rho);
    for j in 0..3 {
        out.u[j].axpy(c, &k.u[j]);
    }
    out.time += h;
    out
}

/// Classical RK4 step of the fluid formulation.
pub fn step_fluid(s: &FluidState, dt: f64, nonlinear: bool) -> Result<FluidState> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(EpError::Precondition(format!("time step must be positive, got {dt}")));
    }
    let s = FluidState {
        grid: s.grid,
        rho_minus_1: s.rho_minus_1.to_frequency(),
        u: [s.u[0].to_frequency(), s.u[1].to_frequency(), s.u[2].to_frequency()],
        time: s.time,
    };
    let k1 = rhs_fluid(&s, nonlinear)?;
    let k2 = rhs_fluid(&fluid_shift(&s, &k1, 0.5 * dt), nonlinear)?;
    let k3 = rhs_fluid(&fluid_shift(&s, &k2, 0.5 * dt), nonlinear)?;
    let k4 = rhs_fluid(&fluid_shift(&s, &k3, dt), nonlinear)?;
    let w = |a: &SpectralField, b: &SpectralField, c: &SpectralField, d: &SpectralField| {
        let mut out = a.clone();
        out.axpy(Complex64::new(2.0, 0.0), b);
        out.axpy(Complex64::new(2.0, 0.0), c);
        out.axpy(Complex64::new(1.0, 0.0), d);
        out
    };
    let total = FluidTendency {
        rho: w(&k1.rho, &k2.rho, &k3.rho, &k4.rho),
        u: std::array::from_fn(|j| w(&k1.u[j], &k2.u[j], &k3.u[j], &k4.u[j])),
    };
    let mut out = fluid_shift(&s, &total, dt / 6.0);
    out.time = s.time + dt;
    out.rho_minus_1.set_real(true);
    for f in &mut out.u {
        f.set_real(true);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epsolver::state::{init_perturbation, to_alpha, DataSpec};
    use crate::spectral::multiplier::{apply_multiplier, Multiplier};

    #[test]
    fn linear_exponential_step_is_exact() {
        let g = Grid3::new(16, 20.0).unwrap();
        let s = init_perturbation(g, &DataSpec::gaussian(1e-2, 2.0)).unwrap();
        let mut a = to_alpha(&s).unwrap();
        let a0 = a.alpha.clone();
        let st = AlphaStepper::new(g, 0.3, Scheme::Exponential, false).unwrap();
        for _ in 0..10 {
            a = st.step(&a).unwrap();
        }
        let exact = apply_multiplier(&a0, &Multiplier::kg_propagator(3.0)).unwrap();
        assert!(a.alpha.relative_distance(&exact) < 1e-13);
        assert!((a.time - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rk4_rejects_unstable_step() {
        let g = Grid3::new(16, 2.0).unwrap();
        assert!(AlphaStepper::new(g, 1.0, Scheme::Rk4, true).is_err());
    }

    #[test]
    fn scheme_names() {
        assert_eq!("rk4".parse::<Scheme>().unwrap(), Scheme::Rk4);
        assert_eq!("exponential".parse::<Scheme>().unwrap(), Scheme::Exponential);
        assert!("euler".parse::<Scheme>().is_err());
    }
}
