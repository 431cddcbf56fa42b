use num_complex::Complex64;
use rand::Rng;

use super::fft;
use super::grid::Grid3;
use crate::error::{EpError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Frequency,
}

/// Complex scalar field on a periodic grid, held either as point values or as
/// Fourier amplitudes. The `real` flag records that the physical values are
/// real (equivalently, the amplitudes are Hermitian symmetric).
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid3,
    data: Vec<Complex64>,
    repr: Representation,
    real: bool,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl SpectralField {
    pub fn zeros(grid: Grid3, repr: Representation) -> Self {
        Self { grid, data: vec![ZERO; grid.len()], repr, real: true }
    }

    pub fn from_data(
        grid: Grid3,
        data: Vec<Complex64>,
        repr: Representation,
        real: bool,
    ) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(EpError::GridMismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                data.len()
            )));
        }
        Ok(Self { grid, data, repr, real })
    }

    pub fn from_real_fn(grid: Grid3, f: impl Fn([f64; 3]) -> f64) -> Self {
        let data = (0..grid.len()).map(|i| Complex64::new(f(grid.position(i)), 0.0)).collect();
        Self { grid, data, repr: Representation::Physical, real: true }
    }

    pub fn from_complex_fn(grid: Grid3, f: impl Fn([f64; 3]) -> Complex64) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self { grid, data, repr: Representation::Physical, real: false }
    }

    /// Field defined by its Fourier amplitudes as a function of the wavevector.
    pub fn from_spectrum(grid: Grid3, real: bool, f: impl Fn([f64; 3]) -> Complex64) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.wavevector(i))).collect();
        Self { grid, data, repr: Representation::Frequency, real }
    }

    /// Random real field with Gaussian amplitudes, Hermitian symmetric, with
    /// zero Nyquist content and amplitudes restricted to `|m_a| <= max_mode`.
    pub fn random_real<R: Rng>(grid: Grid3, max_mode: i64, rng: &mut R) -> Self {
        let mut data = vec![ZERO; grid.len()];
        for f in 0..grid.len() {
            if grid.is_nyquist(f) || grid.modes(f).iter().any(|m| m.abs() > max_mode) {
                continue;
            }
            let nf = grid.negated(f);
            if nf < f {
                continue;
            }
            let re: f64 = standard_normal(rng);
            let im: f64 = standard_normal(rng);
            if nf == f {
                data[f] = Complex64::new(re, 0.0);
            } else {
                data[f] = Complex64::new(re, im);
                data[nf] = Complex64::new(re, -im);
            }
        }
        Self { grid, data, repr: Representation::Frequency, real: true }
    }

    /// Random complex field (no symmetry), zero Nyquist, band `|m_a| <= max_mode`.
    pub fn random_complex<R: Rng>(grid: Grid3, max_mode: i64, rng: &mut R) -> Self {
        let data = (0..grid.len())
            .map(|f| {
                if grid.is_nyquist(f) || grid.modes(f).iter().any(|m| m.abs() > max_mode) {
                    ZERO
                } else {
                    Complex64::new(standard_normal(rng), standard_normal(rng))
                }
            })
            .collect();
        Self { grid, data, repr: Representation::Frequency, real: false }
    }

    #[inline]
    pub fn grid(&self) -> Grid3 {
        self.grid
    }

    #[inline]
    pub fn representation(&self) -> Representation {
        self.repr
    }

    #[inline]
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn set_real(&mut self, real: bool) {
        self.real = real;
    }

    #[inline]
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn change_representation(&self, target: Representation) -> SpectralField {
        self.clone().into_representation(target)
    }

    pub fn into_representation(mut self, target: Representation) -> SpectralField {
        if self.repr == target {
            return self;
        }
        let plan = fft::plan(self.grid.n());
        match target {
            Representation::Frequency => plan.forward(&mut self.data),
            Representation::Physical => {
                plan.inverse(&mut self.data);
                if self.real {
                    for v in self.data.iter_mut() {
                        v.im = 0.0;
                    }
                }
            }
        }
        self.repr = target;
        self
    }

    pub fn to_frequency(&self) -> SpectralField {
        self.change_representation(Representation::Frequency)
    }

    pub fn to_physical(&self) -> SpectralField {
        self.change_representation(Representation::Physical)
    }

    pub fn into_frequency(self) -> SpectralField {
        self.into_representation(Representation::Frequency)
    }

    pub fn into_physical(self) -> SpectralField {
        self.into_representation(Representation::Physical)
    }

    /// Amplitude at `ξ = 0`, i.e. the spatial mean.
    pub fn mean(&self) -> Complex64 {
        match self.repr {
            Representation::Frequency => self.data[0],
            Representation::Physical => {
                self.data.iter().sum::<Complex64>() / self.data.len() as f64
            }
        }
    }

    /// Pointwise complex conjugate `f̄`.
    pub fn conj(&self) -> SpectralField {
        let grid = self.grid;
        let data = match self.repr {
            Representation::Physical => self.data.iter().map(|v| v.conj()).collect(),
            Representation::Frequency => {
                (0..grid.len()).map(|f| self.data[grid.negated(f)].conj()).collect()
            }
        };
        SpectralField { grid, data, repr: self.repr, real: self.real }
    }

    /// Real part `(f + f̄)/2` as a real field.
    pub fn real_part(&self) -> SpectralField {
        let c = self.conj();
        let mut out = self.lin_comb(Complex64::new(0.5, 0.0), &c, Complex64::new(0.5, 0.0));
        out.real = true;
        out
    }

    /// Imaginary part `(f - f̄)/(2i)` as a real field.
    pub fn imag_part(&self) -> SpectralField {
        let c = self.conj();
        let mut out = self.lin_comb(Complex64::new(0.0, -0.5), &c, Complex64::new(0.0, 0.5));
        out.real = true;
        out
    }

    /// `a·self + b·other`, evaluated in `self`'s representation.
    pub fn lin_comb(&self, a: Complex64, other: &SpectralField, b: Complex64) -> SpectralField {
        let other = other.change_representation(self.repr);
        let data = self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect();
        let real = self.real && other.real && a.im == 0.0 && b.im == 0.0;
        SpectralField { grid: self.grid, data, repr: self.repr, real }
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        self.lin_comb(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        self.lin_comb(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, s: Complex64) -> SpectralField {
        let data = self.data.iter().map(|v| s * v).collect();
        SpectralField { grid: self.grid, data, repr: self.repr, real: self.real && s.im == 0.0 }
    }

    pub fn axpy(&mut self, a: Complex64, x: &SpectralField) {
        let x = x.change_representation(self.repr);
        for (y, xv) in self.data.iter_mut().zip(&x.data) {
            *y += a * xv;
        }
        self.real = self.real && x.real && a.im == 0.0;
    }

    /// Pointwise product computed in physical space (no dealiasing).
    pub fn pointwise_mul(&self, other: &SpectralField) -> Result<SpectralField> {
        self.grid.check_same(&other.grid)?;
        let a = self.to_physical();
        let b = other.to_physical();
        let data = a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect();
        Ok(SpectralField {
            grid: self.grid,
            data,
            repr: Representation::Physical,
            real: self.real && other.real,
        })
    }

    /// Zero every mode outside the 2/3-rule band.
    pub fn dealias(&self) -> SpectralField {
        let mut out = self.to_frequency();
        let grid = self.grid;
        for (f, v) in out.data.iter_mut().enumerate() {
            if !grid.in_dealias_band(f) {
                *v = ZERO;
            }
        }
        out
    }

    /// Largest deviation from Hermitian symmetry of the amplitudes.
    pub fn hermitian_defect(&self) -> f64 {
        let fr = self.to_frequency();
        let grid = self.grid;
        (0..grid.len())
            .filter(|&f| !grid.is_nyquist(f))
            .map(|f| (fr.data[f] - fr.data[grid.negated(f)].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Largest imaginary part of the physical values.
    pub fn max_imag(&self) -> f64 {
        self.to_physical().data.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Relative ℓ² distance between two fields compared in frequency space.
    pub fn relative_distance(&self, other: &SpectralField) -> f64 {
        let a = self.to_frequency();
        let b = other.to_frequency();
        let diff: f64 = a.data.iter().zip(&b.data).map(|(x, y)| (x - y).norm_sqr()).sum();
        let base: f64 = b.data.iter().map(|y| y.norm_sqr()).sum();
        if base == 0.0 {
            diff.sqrt()
        } else {
            (diff / base).sqrt()
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box–Muller
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
