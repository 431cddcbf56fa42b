use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use super::field::{Representation, SpectralField};
use super::grid::{bracket, dot3, norm3, Grid3};
use crate::error::{EpError, Result};

type SymbolFn = dyn Fn([f64; 3]) -> Complex64 + Send + Sync;
type TableCache = Mutex<Option<(Grid3, Arc<Vec<Complex64>>)>>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Scalar Fourier multiplier `m(i∇)f = F⁻¹[m F f]`.
///
/// Symbols singular at the origin (`|∇|⁻¹`, `R_j`, `⟨∇⟩|∇|⁻¹`, `Δ⁻¹`) evaluate to
/// zero at `ξ = 0`. Every application also zeroes the unpaired Nyquist modes.
#[derive(Clone)]
pub struct Multiplier {
    name: String,
    symbol: Arc<SymbolFn>,
    /// True when the symbol maps real fields to real fields (`m(-ξ) = conj(m(ξ))`).
    real_operator: bool,
    /// Symbol sampled on the most recently used grid.
    table: Arc<TableCache>,
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multiplier").field("name", &self.name).finish()
    }
}

fn is_origin(xi: [f64; 3]) -> bool {
    xi == [0.0, 0.0, 0.0]
}

impl Multiplier {
    pub fn new(
        name: impl Into<String>,
        real_operator: bool,
        symbol: impl Fn([f64; 3]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self::from_parts(name.into(), Arc::new(symbol), real_operator)
    }

    fn from_parts(name: String, symbol: Arc<SymbolFn>, real_operator: bool) -> Self {
        Self { name, symbol, real_operator, table: Arc::new(Mutex::new(None)) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_real_operator(&self) -> bool {
        self.real_operator
    }

    /// True when both handles share one symbol closure (clones of each other).
    pub fn same_as(&self, other: &Multiplier) -> bool {
        Arc::ptr_eq(&self.symbol, &other.symbol)
    }

    #[inline]
    pub fn eval(&self, xi: [f64; 3]) -> Complex64 {
        (self.symbol)(xi)
    }

    pub fn identity() -> Self {
        Self::new("id", true, |_| Complex64::new(1.0, 0.0))
    }

    /// `|∇|`
    pub fn abs_grad() -> Self {
        Self::new("|D|", true, |xi| Complex64::new(norm3(xi), 0.0))
    }

    /// `|∇|⁻¹`, zero at the origin.
    pub fn inv_abs_grad() -> Self {
        Self::new("|D|^-1", true, |xi| {
            if is_origin(xi) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0 / norm3(xi), 0.0)
            }
        })
    }

    /// `⟨∇⟩`
    pub fn bracket() -> Self {
        Self::new("<D>", true, |xi| Complex64::new(bracket(xi), 0.0))
    }

    /// `⟨∇⟩⁻¹`
    pub fn inv_bracket() -> Self {
        Self::new("<D>^-1", true, |xi| Complex64::new(1.0 / bracket(xi), 0.0))
    }

    /// `⟨∇⟩^s`
    pub fn bracket_pow(s: f64) -> Self {
        Self::new(format!("<D>^{s}"), true, move |xi| {
            Complex64::new((1.0 + dot3(xi, xi)).powf(0.5 * s), 0.0)
        })
    }

    /// `∂_j`, symbol `iξ_j`.
    pub fn partial(j: usize) -> Self {
        assert!(j < 3);
        Self::new(format!("d{j}"), true, move |xi| I * xi[j])
    }

    /// Riesz transform `R_j = |∇|⁻¹∂_j`, symbol `iξ_j/|ξ|`, zero at the origin.
    pub fn riesz(j: usize) -> Self {
        assert!(j < 3);
        Self::new(format!("R{j}"), true, move |xi| {
            if is_origin(xi) {
                Complex64::new(0.0, 0.0)
            } else {
                I * (xi[j] / norm3(xi))
            }
        })
    }

    /// `|∇|/⟨∇⟩`
    pub fn abs_over_bracket() -> Self {
        Self::new("|D|/<D>", true, |xi| Complex64::new(norm3(xi) / bracket(xi), 0.0))
    }

    /// `⟨∇⟩|∇|⁻¹`, zero at the origin.
    pub fn bracket_over_abs() -> Self {
        Self::new("<D>/|D|", true, |xi| {
            if is_origin(xi) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(bracket(xi) / norm3(xi), 0.0)
            }
        })
    }

    /// `Δ⁻¹`, symbol `-1/|ξ|²`, zero at the origin.
    pub fn inv_laplacian() -> Self {
        Self::new("Lap^-1", true, |xi| {
            if is_origin(xi) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(-1.0 / dot3(xi, xi), 0.0)
            }
        })
    }

    /// Klein–Gordon group `e^{it⟨∇⟩}`.
    pub fn kg_propagator(t: f64) -> Self {
        Self::new(format!("exp(i{t}<D>)"), false, move |xi| {
            Complex64::from_polar(1.0, t * bracket(xi))
        })
    }

    /// Pointwise symbol product (operator composition).
    pub fn then(&self, other: &Multiplier) -> Multiplier {
        let a = self.symbol.clone();
        let b = other.symbol.clone();
        Multiplier::from_parts(
            format!("{}*{}", other.name, self.name),
            Arc::new(move |xi| a(xi) * b(xi)),
            self.real_operator && other.real_operator,
        )
    }

    pub fn scaled(&self, c: Complex64) -> Multiplier {
        let a = self.symbol.clone();
        Multiplier::from_parts(
            format!("{c}*{}", self.name),
            Arc::new(move |xi| c * a(xi)),
            self.real_operator && c.im == 0.0,
        )
    }

    /// Symbol values on every mode of `grid`, zero on Nyquist modes and on a
    /// non-finite value at `ξ = 0`.
    pub fn table(&self, grid: &Grid3) -> Result<Arc<Vec<Complex64>>> {
        let mut guard = self.table.lock().expect("multiplier table poisoned");
        if let Some((g, t)) = guard.as_ref() {
            if g == grid {
                return Ok(t.clone());
            }
        }
        let n = grid.n();
        let k: Vec<f64> = (0..n).map(|i| grid.signed_mode(i) as f64 * grid.dk()).collect();
        let half = n / 2;
        let mut out = Vec::with_capacity(grid.len());
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    if i == half || j == half || l == half {
                        out.push(Complex64::new(0.0, 0.0));
                        continue;
                    }
                    let xi = [k[i], k[j], k[l]];
                    let s = self.eval(xi);
                    if s.re.is_finite() && s.im.is_finite() {
                        out.push(s);
                    } else if i == 0 && j == 0 && l == 0 {
                        out.push(Complex64::new(0.0, 0.0));
                    } else {
                        return Err(EpError::NonFiniteSymbol { name: self.name.clone(), xi });
                    }
                }
            }
        }
        let t = Arc::new(out);
        *guard = Some((*grid, t.clone()));
        Ok(t)
    }
}

/// Apply a multiplier; the result is returned in frequency representation.
pub fn apply_multiplier(field: &SpectralField, m: &Multiplier) -> Result<SpectralField> {
    let mut out = field.to_frequency();
    apply_in_place(&mut out, m)?;
    Ok(out)
}

pub(crate) fn apply_in_place(out: &mut SpectralField, m: &Multiplier) -> Result<()> {
    debug_assert_eq!(out.representation(), Representation::Frequency);
    let grid = out.grid();
    let real = out.is_real() && m.real_operator;
    let table = m.table(&grid)?;
    for (v, s) in out.data_mut().iter_mut().zip(table.iter()) {
        *v *= s;
    }
    out.set_real(real);
    Ok(())
}
