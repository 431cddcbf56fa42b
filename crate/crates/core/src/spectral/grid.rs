use std::f64::consts::PI;

use crate::error::{EpError, Result};

/// Cubic periodic grid with `n` points per axis on a box of side `box_length`.
///
/// Storage is row-major with the last axis fastest: `flat = (i * n + j) * n + k`.
/// Frequency index `i` maps to the signed mode `i` for `i < n/2` and `i - n`
/// otherwise, so the lattice is `(2π/L)·{-n/2, …, n/2-1}³`. The unpaired
/// Nyquist index `-n/2` has no partner under `ξ → -ξ`; multipliers zero it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid3 {
    n: usize,
    box_length: f64,
}

impl Grid3 {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(EpError::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {n}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(EpError::InvalidGrid(format!(
                "box length must be positive and finite, got {box_length}"
            )));
        }
        Ok(Self { n, box_length })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    #[inline]
    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    /// Lattice spacing in frequency, `2π/L`.
    #[inline]
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Largest per-axis frequency magnitude, `π n / L`.
    pub fn nyquist(&self) -> f64 {
        self.dk() * (self.n / 2) as f64
    }

    /// Largest `|ξ|` present on the lattice (corner of the cube).
    pub fn max_wavenumber(&self) -> f64 {
        3f64.sqrt() * self.nyquist()
    }

    #[inline]
    pub fn flat(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn unflat(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        [flat / (n * n), (flat / n) % n, flat % n]
    }

    #[inline]
    pub fn signed_mode(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    #[inline]
    pub fn modes(&self, flat: usize) -> [i64; 3] {
        let [i, j, k] = self.unflat(flat);
        [self.signed_mode(i), self.signed_mode(j), self.signed_mode(k)]
    }

    /// Flat index of a signed mode triple, or `None` when any component lies
    /// outside `[-n/2, n/2)`.
    pub fn flat_of_modes(&self, m: [i64; 3]) -> Option<usize> {
        let half = (self.n / 2) as i64;
        let n = self.n as i64;
        let mut idx = [0usize; 3];
        for a in 0..3 {
            if m[a] < -half || m[a] >= half {
                return None;
            }
            idx[a] = m[a].rem_euclid(n) as usize;
        }
        Some(self.flat(idx[0], idx[1], idx[2]))
    }

    #[inline]
    pub fn wavevector(&self, flat: usize) -> [f64; 3] {
        let m = self.modes(flat);
        let dk = self.dk();
        [m[0] as f64 * dk, m[1] as f64 * dk, m[2] as f64 * dk]
    }

    /// Physical coordinate of a grid point, in `[0, L)³`.
    #[inline]
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let [i, j, k] = self.unflat(flat);
        let h = self.spacing();
        [i as f64 * h, j as f64 * h, k as f64 * h]
    }

    /// Flat index of `-ξ` for the mode at `flat` (Nyquist components map to themselves).
    #[inline]
    pub fn negated(&self, flat: usize) -> usize {
        let n = self.n;
        let [i, j, k] = self.unflat(flat);
        self.flat((n - i) % n, (n - j) % n, (n - k) % n)
    }

    #[inline]
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let h = self.n / 2;
        let [i, j, k] = self.unflat(flat);
        i == h || j == h || k == h
    }

    /// Largest mode magnitude kept by the 2/3 rule: `|m_a| <= (n-1)/3` on every axis.
    pub fn dealias_cutoff(&self) -> i64 {
        ((self.n - 1) / 3) as i64
    }

    #[inline]
    pub fn in_dealias_band(&self, flat: usize) -> bool {
        let c = self.dealias_cutoff();
        self.modes(flat).iter().all(|m| m.abs() <= c)
    }

    pub fn wavevectors(&self) -> Vec<[f64; 3]> {
        (0..self.len()).map(|f| self.wavevector(f)).collect()
    }

    pub fn check_same(&self, other: &Grid3) -> Result<()> {
        if self != other {
            return Err(EpError::GridMismatch(format!(
                "{}^3/L={} vs {}^3/L={}",
                self.n, self.box_length, other.n, other.box_length
            )));
        }
        Ok(())
    }
}

#[inline]
pub fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[inline]
pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale3(s: f64, a: [f64; 3]) -> [f64; 3] {
    [s * a[0], s * a[1], s * a[2]]
}

/// Japanese bracket `⟨x⟩ = sqrt(1 + |x|²)`.
#[inline]
pub fn bracket(v: [f64; 3]) -> f64 {
    (1.0 + dot3(v, v)).sqrt()
}

#[inline]
pub fn bracket_scalar(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dims() {
        assert!(Grid3::new(4, 1.0).is_err());
        assert!(Grid3::new(12, 1.0).is_err());
        assert!(Grid3::new(16, 0.0).is_err());
        assert!(Grid3::new(16, 2.0).is_ok());
    }

    #[test]
    fn negation_is_involution_and_flips_modes() {
        let g = Grid3::new(8, 3.0).unwrap();
        for f in 0..g.len() {
            let nf = g.negated(f);
            assert_eq!(g.negated(nf), f);
            if !g.is_nyquist(f) {
                let m = g.modes(f);
                assert_eq!(g.modes(nf), [-m[0], -m[1], -m[2]]);
            }
        }
    }

    #[test]
    fn flat_of_modes_roundtrip() {
        let g = Grid3::new(16, 1.0).unwrap();
        for f in 0..g.len() {
            assert_eq!(g.flat_of_modes(g.modes(f)), Some(f));
        }
        assert_eq!(g.flat_of_modes([8, 0, 0]), None);
    }

    #[test]
    fn dealias_cutoffs() {
        assert_eq!(Grid3::new(16, 1.0).unwrap().dealias_cutoff(), 5);
        assert_eq!(Grid3::new(32, 1.0).unwrap().dealias_cutoff(), 10);
        assert_eq!(Grid3::new(64, 1.0).unwrap().dealias_cutoff(), 21);
    }
}
