//! Smooth dyadic frequency localization.

use super::field::SpectralField;
use super::grid::{norm3, Grid3};

fn g(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Radial bump with `χ = 1` on `|x| <= 1`, `χ = 0` on `|x| >= 2`.
pub fn cutoff_chi(r: f64) -> f64 {
    let r = r.abs();
    if r <= 1.0 {
        return 1.0;
    }
    if r >= 2.0 {
        return 0.0;
    }
    let a = g(2.0 - r);
    let b = g(r - 1.0);
    a / (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Band {
    /// `P_N`, symbol `χ(ξ/2N) - χ(ξ/N)`, supported in `N <= |ξ| <= 4N`.
    AtN(f64),
    /// `P_{<=N}`, symbol `χ(ξ/N)`.
    UpToN(f64),
    /// `P_{>=N/2}`, symbol `1 - χ(ξ/N)`.
    FromN(f64),
}

impl Band {
    pub fn symbol(&self, k: f64) -> f64 {
        match *self {
            Band::AtN(n) => cutoff_chi(k / (2.0 * n)) - cutoff_chi(k / n),
            Band::UpToN(n) => cutoff_chi(k / n),
            Band::FromN(n) => 1.0 - cutoff_chi(k / n),
        }
    }
}

pub fn lp_project(field: &SpectralField, band: Band) -> SpectralField {
    let mut out = field.to_frequency();
    let grid = out.grid();
    for (f, v) in out.data_mut().iter_mut().enumerate() {
        *v *= band.symbol(norm3(grid.wavevector(f)));
    }
    out
}

/// Dyadic decomposition of a finite grid.
///
/// `low` is the largest dyadic number with `2·low` below the first nonzero
/// lattice frequency, so `P_{<=low}` keeps only `ξ = 0`. Shells run from `low`
/// up to the smallest dyadic `N` with `2N` above the corner of the lattice,
/// which makes `P_{<=low} + Σ P_N` the identity on every grid field.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellLadder {
    pub low: f64,
    pub shells: Vec<f64>,
}

impl ShellLadder {
    pub fn for_grid(grid: &Grid3) -> Self {
        let mut low = 1.0f64;
        while 2.0 * low >= grid.dk() {
            low *= 0.5;
        }
        while 4.0 * low < grid.dk() {
            low *= 2.0;
        }
        let top = grid.max_wavenumber();
        let mut shells = vec![low];
        let mut n = low;
        while 2.0 * n < top {
            n *= 2.0;
            shells.push(n);
        }
        Self { low, shells }
    }

    /// Bands of the full partition: the low block followed by every shell.
    pub fn bands(&self) -> Vec<(f64, Band)> {
        let mut out = vec![(self.low, Band::UpToN(self.low))];
        out.extend(self.shells.iter().map(|&n| (n, Band::AtN(n))));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::Representation;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chi_profile() {
        assert_eq!(cutoff_chi(0.3), 1.0);
        assert_eq!(cutoff_chi(1.0), 1.0);
        assert_eq!(cutoff_chi(2.0), 0.0);
        assert_eq!(cutoff_chi(7.0), 0.0);
        assert!((cutoff_chi(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=1000 {
            let v = cutoff_chi(1.0 + i as f64 / 1000.0);
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn partition_of_unity_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &(n, l) in &[(16usize, 10.0f64), (32, 64.0), (16, 1.0)] {
            let grid = Grid3::new(n, l).unwrap();
            let f = SpectralField::random_real(grid, (n / 2 - 1) as i64, &mut rng);
            let ladder = ShellLadder::for_grid(&grid);
            let mut sum = SpectralField::zeros(grid, Representation::Frequency);
            for (_, band) in ladder.bands() {
                sum.axpy(Complex64::new(1.0, 0.0), &lp_project(&f, band));
            }
            assert!(sum.relative_distance(&f) < 1e-12);
        }
    }

    #[test]
    fn separated_shells_are_orthogonal() {
        // supports [N,4N] and [16N,64N] touch only at the boundary where both symbols vanish
        let grid = Grid3::new(32, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = SpectralField::random_real(grid, 15, &mut rng);
        let a = lp_project(&lp_project(&f, Band::AtN(1.0)), Band::AtN(16.0));
        assert!(a.max_abs() == 0.0);
    }

    #[test]
    fn mode_inside_flat_part_is_unchanged() {
        // 2N <= |k| <= 2N keeps χ(k/2N) = 1 and χ(k/N) = 0
        let grid = Grid3::new(16, std::f64::consts::TAU).unwrap();
        let f = SpectralField::from_real_fn(grid, |x| (4.0 * x[0]).cos());
        let p = lp_project(&f, Band::AtN(2.0));
        let d = p.relative_distance(&f.to_frequency());
        assert!(d < 1e-14, "{d}");
    }
}
