//! Lebesgue, Sobolev and Besov norms on the periodic grid.
//!
//! Lebesgue norms use the midpoint rule with cell weight `(L/n)³`. `H^s` norms
//! are evaluated on the frequency side, where Plancherel reads
//! `‖f‖²_{L²} = L³ Σ_ξ |f̂(ξ)|²` under the forward normalization of [`super::fft`].

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::{dot3, norm3};
use super::littlewood_paley::{lp_project, ShellLadder};
use super::multiplier::{apply_multiplier, Multiplier};
use crate::error::{EpError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSpec {
    Lebesgue { p: f64 },
    Sobolev { s: f64, p: f64 },
    Besov { sigma: f64, p: f64, q: f64 },
    H { s: f64 },
}

impl NormSpec {
    pub fn validate(&self) -> Result<()> {
        let check_exp = |name: &str, v: f64| {
            if v.is_nan() || v < 1.0 {
                Err(EpError::InvalidNorm(format!("{name} = {v} outside [1, ∞]")))
            } else {
                Ok(())
            }
        };
        let check_finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(EpError::InvalidNorm(format!("{name} must be finite")))
            }
        };
        match *self {
            NormSpec::Lebesgue { p } => check_exp("p", p),
            NormSpec::Sobolev { s, p } => {
                check_exp("p", p)?;
                check_finite("s", s)
            }
            NormSpec::Besov { sigma, p, q } => {
                check_exp("p", p)?;
                check_exp("q", q)?;
                check_finite("sigma", sigma)
            }
            NormSpec::H { s } => check_finite("s", s),
        }
    }
}

pub fn norm(field: &SpectralField, spec: NormSpec) -> Result<f64> {
    spec.validate()?;
    match spec {
        NormSpec::Lebesgue { p } => Ok(lebesgue(field, p)),
        NormSpec::Sobolev { s, p } => sobolev(field, s, p),
        NormSpec::H { s } => Ok(h_norm(field, s)),
        NormSpec::Besov { sigma, p, q } => {
            let ladder = ShellLadder::for_grid(&field.grid());
            besov_with_ladder(field, sigma, p, q, &ladder.bands())
        }
    }
}

/// Midpoint-rule `L^p` norm; `p = ∞` gives the maximum modulus.
pub fn lebesgue(field: &SpectralField, p: f64) -> f64 {
    let phys = field.to_physical();
    lebesgue_of_values(phys.data(), field.grid().cell_volume(), p)
}

pub(crate) fn lebesgue_of_values(values: &[Complex64], cell: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }
    let sum: f64 = if p == 2.0 {
        values.iter().map(|v| v.norm_sqr()).sum()
    } else {
        values.iter().map(|v| v.norm().powf(p)).sum()
    };
    (sum * cell).powf(1.0 / p)
}

/// `L^p` norm of the Euclidean length of a vector field.
pub fn lebesgue_vector(components: &[SpectralField], p: f64) -> Result<f64> {
    let first = components
        .first()
        .ok_or_else(|| EpError::InvalidNorm("empty vector field".into()))?;
    let grid = first.grid();
    let phys: Vec<SpectralField> = components.iter().map(|c| c.to_physical()).collect();
    for c in &phys {
        grid.check_same(&c.grid())?;
    }
    let mags: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let s: f64 = phys.iter().map(|c| c.data()[i].norm_sqr()).sum();
            Complex64::new(s.sqrt(), 0.0)
        })
        .collect();
    Ok(lebesgue_of_values(&mags, grid.cell_volume(), p))
}

/// `W^{s,p}` as `‖⟨∇⟩^s f‖_{L^p}`.
pub fn sobolev(field: &SpectralField, s: f64, p: f64) -> Result<f64> {
    if p == 2.0 {
        return Ok(h_norm(field, s));
    }
    let lifted = apply_multiplier(field, &Multiplier::bracket_pow(s))?;
    Ok(lebesgue(&lifted, p))
}

/// `H^s` norm by Plancherel.
pub fn h_norm(field: &SpectralField, s: f64) -> f64 {
    let fr = field.to_frequency();
    let grid = fr.grid();
    let sum: f64 = fr
        .data()
        .iter()
        .enumerate()
        .map(|(f, v)| {
            let xi = grid.wavevector(f);
            (1.0 + dot3(xi, xi)).powf(s) * v.norm_sqr()
        })
        .sum();
    (grid.volume() * sum).sqrt()
}

/// `L²` norm computed from the amplitudes (Plancherel side).
pub fn l2_frequency_side(field: &SpectralField) -> f64 {
    h_norm(field, 0.0)
}

/// Besov norm `(Σ ⟨N⟩^{qσ} ‖P_N f‖^q_{L^p})^{1/q}` over the given bands.
pub fn besov_with_ladder(
    field: &SpectralField,
    sigma: f64,
    p: f64,
    q: f64,
    bands: &[(f64, super::littlewood_paley::Band)],
) -> Result<f64> {
    if bands.is_empty() {
        return Err(EpError::InvalidNorm("Besov norm over an empty shell set".into()));
    }
    let fr = field.to_frequency();
    let mut acc = 0.0f64;
    for &(n, band) in bands {
        let piece = lebesgue(&lp_project(&fr, band), p);
        let weighted = (1.0 + n * n).powf(0.5 * sigma) * piece;
        if q.is_infinite() {
            acc = acc.max(weighted);
        } else {
            acc += weighted.powf(q);
        }
    }
    Ok(if q.is_infinite() { acc } else { acc.powf(1.0 / q) })
}

/// `‖f‖_Y = ‖f‖_{W^{σ+2,10/9}} + ‖f‖_{H^N}`.
pub fn y_norm(field: &SpectralField, sigma: f64, n_deriv: f64) -> Result<f64> {
    Ok(sobolev(field, sigma + 2.0, 10.0 / 9.0)? + h_norm(field, n_deriv))
}

/// One time slice of the `X_T` norm: `(1+t)^{6/5}‖β‖_{B^σ_{10,2}} + ‖β‖_{H^N}`,
/// returned as `(weighted Besov part, H^N part)`.
pub fn x_weight_components(
    field: &SpectralField,
    t: f64,
    sigma: f64,
    n_deriv: f64,
) -> Result<(f64, f64)> {
    let b = norm(field, NormSpec::Besov { sigma, p: 10.0, q: 2.0 })?;
    Ok(((1.0 + t).powf(1.2) * b, h_norm(field, n_deriv)))
}

/// Largest `|ξ|` carrying a nonzero amplitude.
pub fn spectral_radius(field: &SpectralField) -> f64 {
    let fr = field.to_frequency();
    let grid = fr.grid();
    fr.data()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|(f, _)| norm3(grid.wavevector(f)))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::Grid3;
    use crate::spectral::littlewood_paley::Band;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_field_lebesgue() {
        let g = Grid3::new(8, 3.0).unwrap();
        let one = SpectralField::from_real_fn(g, |_| 1.0);
        for p in [1.0, 2.0, 2.5, 10.0] {
            let expect = 3f64.powf(3.0 / p);
            assert!((lebesgue(&one, p) - expect).abs() < 1e-12 * expect);
        }
        assert_eq!(lebesgue(&one, f64::INFINITY), 1.0);
    }

    #[test]
    fn plancherel_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Grid3::new(16, 7.0).unwrap();
        for _ in 0..5 {
            let f = SpectralField::random_complex(g, 7, &mut rng);
            let a = lebesgue(&f, 2.0);
            let b = l2_frequency_side(&f);
            assert!((a - b).abs() < 1e-12 * b);
        }
    }

    #[test]
    fn single_shell_besov_is_one_term() {
        let g = Grid3::new(16, std::f64::consts::TAU).unwrap();
        let f = SpectralField::from_real_fn(g, |x| (4.0 * x[0]).cos());
        // |k| = 4 sits only in shell N = 2 (χ(4/4) - χ(4/2) = 1) and in N = 1
        // (χ(2) - χ(4) = 0), so exactly one term survives
        let sigma = 1.5;
        let b = norm(&f, NormSpec::Besov { sigma, p: 3.0, q: 2.0 }).unwrap();
        let expect = (1.0f64 + 4.0).powf(0.5 * sigma) * lebesgue(&lp_project(&f, Band::AtN(2.0)), 3.0);
        assert!((b - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn disjoint_shells_add_in_l2_sense() {
        let g = Grid3::new(32, std::f64::consts::TAU).unwrap();
        let a = SpectralField::from_real_fn(g, |x| (2.0 * x[0]).cos());
        let b = SpectralField::from_real_fn(g, |x| 0.3 * (8.0 * x[1]).sin());
        let sum = a.add(&b);
        let spec = NormSpec::Besov { sigma: 0.7, p: 4.0, q: 2.0 };
        let na = norm(&a, spec).unwrap();
        let nb = norm(&b, spec).unwrap();
        let ns = norm(&sum, spec).unwrap();
        assert!((ns - (na * na + nb * nb).sqrt()).abs() < 1e-12 * ns);
    }

    #[test]
    fn rejects_bad_specs() {
        let g = Grid3::new(8, 3.0).unwrap();
        let f = SpectralField::from_real_fn(g, |_| 1.0);
        assert!(norm(&f, NormSpec::Lebesgue { p: 0.5 }).is_err());
        assert!(norm(&f, NormSpec::H { s: f64::NAN }).is_err());
        assert!(besov_with_ladder(&f, 0.0, 2.0, f64::INFINITY, &[]).is_err());
    }
}
