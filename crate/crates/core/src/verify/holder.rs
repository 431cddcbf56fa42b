//! Randomized checks of the pseudo-product Hölder bounds and the product estimate.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::report::{ScanBuilder, ScanPoint, ScanReport, Threshold};
use crate::error::{EpError, Result};
use crate::spectral::field::SpectralField;
use crate::spectral::grid::{norm3, Grid3};
use crate::spectral::littlewood_paley::{lp_project, Band, ShellLadder};
use crate::spectral::multiplier::{apply_multiplier, Multiplier};
use crate::spectral::norms::{besov_with_ladder, h_norm, lebesgue, sobolev};
use crate::symbols::direct::conjugated_spectrum;
use crate::symbols::{BilinearSymbolSpec, ConjPair, PairKernel, SymbolKind};

/// Generator for trial `trial` of a check tagged `tag`; each trial depends only
/// on `(seed, tag, trial)`.
pub fn trial_rng(seed: u64, tag: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag.wrapping_mul(1 << 20).wrapping_add(trial as u64));
    rng
}

/// Output shell `M`, input shells `N`, `O` and Lebesgue exponents with `1/r = 1/p + 1/q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriadSpec {
    pub m: f64,
    pub n: f64,
    pub o: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

fn recip(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        1.0 / x
    }
}

impl TriadSpec {
    pub fn new(m: f64, n: f64, o: f64, p: f64, q: f64, r: f64) -> Result<Self> {
        for (name, v) in [("M", m), ("N", n), ("O", o)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(EpError::Precondition(format!("shell {name} = {v} must be positive")));
            }
        }
        for (name, v) in [("p", p), ("q", q), ("r", r)] {
            if !(v >= 1.0) {
                return Err(EpError::Precondition(format!("exponent {name} = {v} below 1")));
            }
        }
        if (recip(r) - recip(p) - recip(q)).abs() > 1e-12 {
            return Err(EpError::Precondition(format!("1/{r} ≠ 1/{p} + 1/{q}")));
        }
        Ok(TriadSpec { m, n, o, p, q, r })
    }

    pub fn h(&self) -> f64 {
        self.m.max(self.n).max(self.o)
    }

    pub fn l(&self) -> f64 {
        self.m.min(self.n).min(self.o)
    }

    /// `min(M,O)/2 ≤ N ≤ 2max(M,O)`.
    pub fn is_admissible(&self) -> bool {
        let (lo, hi) = (self.m.min(self.o), self.m.max(self.o));
        lo / 2.0 <= self.n && self.n <= 2.0 * hi
    }

    fn coords(&self, trial: usize) -> Vec<f64> {
        vec![self.m, self.n, self.o, self.p, self.q, self.r, trial as f64]
    }
}

/// Weight `H(1+L)⁵` for normal-form symbols, `H` for undivided symbols of
/// order one, `1` for `m ≡ 1`.
pub fn holder_weight(spec: &BilinearSymbolSpec, triad: &TriadSpec) -> f64 {
    match (spec.divisor, &spec.kind) {
        (Some(_), _) => triad.h() * (1.0 + triad.l()).powi(5),
        (None, SymbolKind::One) => 1.0,
        (None, _) => triad.h(),
    }
}

fn band_support(grid: &Grid3, band: Band) -> Vec<usize> {
    (0..grid.len())
        .filter(|&f| !grid.is_nyquist(f) && band.symbol(norm3(grid.wavevector(f))) != 0.0)
        .collect()
}

fn kernel_for<'c>(
    cache: &'c mut HashMap<(u64, u64), PairKernel>,
    spec: &BilinearSymbolSpec,
    grid: Grid3,
    left: Band,
    right: Band,
) -> Result<&'c PairKernel> {
    let key = |b: Band| match b {
        Band::AtN(n) => n.to_bits(),
        Band::UpToN(n) => n.to_bits() ^ 1,
        Band::FromN(n) => n.to_bits() ^ 2,
    };
    let k = (key(left), key(right));
    if !cache.contains_key(&k) {
        let kernel = PairKernel::build(spec, grid, &band_support(&grid, left), &band_support(&grid, right))?;
        cache.insert(k, kernel);
    }
    Ok(&cache[&k])
}

fn apply_conj(kernel: &PairKernel, eps: ConjPair, a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    kernel.apply(&conjugated_spectrum(a, eps.0), &conjugated_spectrum(b, eps.1))
}

/// Sides of the Hölder bound for one pair of localized inputs `a = P_N a`, `b = P_O b`.
fn holder_sides(
    kernel: &PairKernel,
    spec: &BilinearSymbolSpec,
    eps: ConjPair,
    triad: &TriadSpec,
    a: &SpectralField,
    b: &SpectralField,
) -> Result<(f64, f64)> {
    let t = apply_conj(kernel, eps, a, b)?;
    let lhs = lebesgue(&lp_project(&t, Band::AtN(triad.m)), triad.r);
    let rhs = holder_weight(spec, triad) * lebesgue(a, triad.p) * lebesgue(b, triad.q);
    Ok((lhs, rhs))
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 && rhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

/// Configuration shared by the randomized checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSetup {
    pub grid: Grid3,
    pub trials: usize,
    pub seed: u64,
}

impl TrialSetup {
    fn full_band_field(&self, tag: u64, trial: usize, which: u64) -> SpectralField {
        let mut rng = trial_rng(self.seed, tag * 2 + which, trial);
        let n = self.grid.n() as i64;
        SpectralField::random_real(self.grid, n / 2 - 1, &mut rng)
    }
}

const TAG_HOLDER: u64 = 1;
const TAG_REDUCTION: u64 = 2;
const TAG_LH: u64 = 3;
const TAG_PROD: u64 = 4;

fn localized_pair(setup: &TrialSetup, tag: u64, trial: usize, left: Band, right: Band) -> (SpectralField, SpectralField) {
    let a = lp_project(&setup.full_band_field(tag, trial, 0), left);
    let b = lp_project(&setup.full_band_field(tag, trial, 1), right);
    (a, b)
}

/// One trial of the Hölder bound; reproduces the corresponding scan sample.
pub fn holder_trial_ratio(
    spec: &BilinearSymbolSpec,
    eps: ConjPair,
    triad: &TriadSpec,
    setup: &TrialSetup,
    trial: usize,
) -> Result<f64> {
    let a = setup.full_band_field(TAG_HOLDER, trial, 0);
    let b = setup.full_band_field(TAG_HOLDER, trial, 1);
    holder_ratio(spec, eps, triad, &a, &b)
}

/// Hölder ratio for given inputs, after localizing them to `P_N a`, `P_O b`.
pub fn holder_ratio(
    spec: &BilinearSymbolSpec,
    eps: ConjPair,
    triad: &TriadSpec,
    a: &SpectralField,
    b: &SpectralField,
) -> Result<f64> {
    let grid = a.grid();
    grid.check_same(&b.grid())?;
    let mut cache = HashMap::new();
    let kernel = kernel_for(&mut cache, spec, grid, Band::AtN(triad.n), Band::AtN(triad.o))?;
    let (a, b) = (lp_project(a, Band::AtN(triad.n)), lp_project(b, Band::AtN(triad.o)));
    let (l, r) = holder_sides(kernel, spec, eps, triad, &a, &b)?;
    Ok(ratio(l, r))
}

/// `‖P_M T_{m(/φ_ε)}[P_N a, P_O b]‖_{L^r} / (weight·‖P_N a‖_{L^p}‖P_O b‖_{L^q})`
/// over random trials and the given triads.
pub fn check_holder_pseudo_product(
    spec: &BilinearSymbolSpec,
    eps: ConjPair,
    triads: &[TriadSpec],
    setup: &TrialSetup,
    threshold: f64,
) -> Result<ScanReport> {
    if setup.trials == 0 {
        return Err(EpError::Precondition("at least one trial is required".into()));
    }
    let label = format!("holder[{}]{eps}", spec.label());
    let mut b = ScanBuilder::new(label.clone());
    let mut cache = HashMap::new();
    for triad in triads {
        let kernel = kernel_for(&mut cache, spec, setup.grid, Band::AtN(triad.n), Band::AtN(triad.o))?;
        for trial in 0..setup.trials {
            let (x, y) = localized_pair(setup, TAG_HOLDER, trial, Band::AtN(triad.n), Band::AtN(triad.o));
            let (l, r) = holder_sides(kernel, spec, eps, triad, &x, &y)?;
            b.observe(ratio(l, r), || ScanPoint::new(label.clone(), triad.coords(trial)));
        }
    }
    Ok(b.finish(Threshold::AtMost(threshold)))
}

/// Admissible triads over `shells³` for each exponent triple.
pub fn triad_matrix(shells: &[f64], exponents: &[(f64, f64, f64)]) -> Result<Vec<TriadSpec>> {
    let mut out = Vec::new();
    for &m in shells {
        for &n in shells {
            for &o in shells {
                for &(p, q, r) in exponents {
                    let t = TriadSpec::new(m, n, o, p, q, r)?;
                    if t.is_admissible() {
                        out.push(t);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Default exponent triples for the Hölder matrix.
pub const DEFAULT_EXPONENTS: [(f64, f64, f64); 4] = [(2.0, 2.0, 1.0), (4.0, 4.0, 2.0), (10.0, 2.5, 2.0), (2.5, 10.0, 2.0)];

/// `‖ab‖_{L^r} / (‖a‖_{L^p}‖b‖_{L^q})` for band-limited fields whose product
/// is resolved exactly on the grid (`|m_a| < n/4`), computed through the
/// direct engine with `m ≡ 1`.
pub fn check_holder_reduction(
    exponents: &[(f64, f64, f64)],
    setup: &TrialSetup,
    threshold: f64,
) -> Result<ScanReport> {
    let grid = setup.grid;
    let spec = BilinearSymbolSpec::new(SymbolKind::One);
    let max_mode = grid.n() as i64 / 4 - 1;
    let mut b = ScanBuilder::new("holder_reduction[one]");
    for trial in 0..setup.trials {
        let mut rng = trial_rng(setup.seed, TAG_REDUCTION, trial);
        let x = SpectralField::random_real(grid, max_mode, &mut rng);
        let y = SpectralField::random_real(grid, max_mode, &mut rng);
        let t = crate::symbols::pseudo_product_direct(&spec, ConjPair::PP, &x, &y)?;
        for &(p, q, r) in exponents {
            TriadSpec::new(1.0, 1.0, 1.0, p, q, r)?;
            let v = ratio(lebesgue(&t, r), lebesgue(&x, p) * lebesgue(&y, q));
            b.observe(v, || ScanPoint::new("p,q,r,trial", vec![p, q, r, trial as f64]));
        }
    }
    Ok(b.finish(Threshold::AtMost(threshold)))
}

/// Parameters of the low-high bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LhSpec {
    pub m: f64,
    pub sigma: f64,
    /// Interpolation index `0 ≤ θ ≤ γ`.
    pub theta: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl LhSpec {
    /// `γ = 5` if `M ≥ 1`, else `0`.
    pub fn gamma(&self) -> f64 {
        if self.m >= 1.0 {
            5.0
        } else {
            0.0
        }
    }

    pub fn validate(&self) -> Result<()> {
        TriadSpec::new(self.m, self.m, self.m, self.p, self.q, self.r)?;
        if !(0.0..=self.gamma()).contains(&self.theta) {
            return Err(EpError::Precondition(format!(
                "θ = {} outside [0, γ = {}]",
                self.theta,
                self.gamma()
            )));
        }
        Ok(())
    }
}

fn lh_sides(
    kernel: &PairKernel,
    eps: ConjPair,
    lh: &LhSpec,
    grid: Grid3,
    a: &SpectralField,
    b: &SpectralField,
) -> Result<(f64, f64)> {
    let bands = ShellLadder::for_grid(&grid).bands();
    let t = apply_conj(kernel, eps, a, b)?;
    let lhs = besov_with_ladder(&lp_project(&t, Band::FromN(lh.m / 4.0)), lh.sigma, lh.r, 2.0, &bands)?;
    let grad_b = apply_multiplier(b, &Multiplier::abs_grad())?;
    let rhs = sobolev(a, lh.gamma() - lh.theta, lh.p)?
        * besov_with_ladder(&grad_b, lh.sigma + lh.theta, lh.q, 2.0, &bands)?;
    Ok((lhs, rhs))
}

fn lh_bands(lh: &LhSpec) -> (Band, Band) {
    // P_{≥M/8} is the band FromN(M/4)
    (Band::AtN(lh.m), Band::FromN(lh.m / 4.0))
}

/// One trial of the low-high bound.
pub fn lh_trial_ratio(
    spec: &BilinearSymbolSpec,
    eps: ConjPair,
    lh: &LhSpec,
    setup: &TrialSetup,
    trial: usize,
) -> Result<f64> {
    let a = setup.full_band_field(TAG_LH, trial, 0);
    let b = setup.full_band_field(TAG_LH, trial, 1);
    lh_ratio(spec, eps, lh, &a, &b)
}

/// Low-high ratio for given inputs, after localizing them to `P_M a`, `P_{≥M/8} b`.
pub fn lh_ratio(
    spec: &BilinearSymbolSpec,
    eps: ConjPair,
    lh: &LhSpec,
    a: &SpectralField,
    b: &SpectralField,
) -> Result<f64> {
    lh.validate()?;
    let grid = a.grid();
    grid.check_same(&b.grid())?;
    let (left, right) = lh_bands(lh);
    let mut cache = HashMap::new();
    let kernel = kernel_for(&mut cache, spec, grid, left, right)?;
    let (a, b) = (lp_project(a, left), lp_project(b, right));
    let (l, r) = lh_sides(kernel, eps, lh, grid, &a, &b)?;
    Ok(ratio(l, r))
}

/// `‖P_{≥M/8}T[P_M a, P_{≥M/8} b]‖_{B^σ_{r,2}} / (‖P_M a‖_{W^{γ-θ,p}}‖|∇|P_{≥M/8} b‖_{B^{σ+θ}_{q,2}})`.
pub fn check_lh_bound(
    spec: &BilinearSymbolSpec,
    eps: ConjPair,
    cases: &[LhSpec],
    setup: &TrialSetup,
    threshold: f64,
) -> Result<ScanReport> {
    let label = format!("lh[{}]{eps}", spec.label());
    let mut b = ScanBuilder::new(label.clone());
    let mut cache = HashMap::new();
    for lh in cases {
        lh.validate()?;
        let (left, right) = lh_bands(lh);
        let kernel = kernel_for(&mut cache, spec, setup.grid, left, right)?;
        for trial in 0..setup.trials {
            let (x, y) = localized_pair(setup, TAG_LH, trial, left, right);
            let (l, r) = lh_sides(kernel, eps, lh, setup.grid, &x, &y)?;
            b.observe(ratio(l, r), || {
                ScanPoint::new(label.clone(), vec![lh.m, lh.sigma, lh.theta, lh.p, lh.q, lh.r, trial as f64])
            });
        }
    }
    Ok(b.finish(Threshold::AtMost(threshold)))
}

/// `‖ab‖_{H^γ} / (‖a‖_{H^γ}‖b‖_{W^{1,10}} + ‖a‖_{W^{1,10}}‖b‖_{H^γ})`.
pub fn prodform_ratio(a: &SpectralField, b: &SpectralField, gamma: f64) -> Result<f64> {
    let ab = a.pointwise_mul(b)?;
    let lhs = h_norm(&ab, gamma);
    let rhs = h_norm(a, gamma) * sobolev(b, 1.0, 10.0)? + sobolev(a, 1.0, 10.0)? * h_norm(b, gamma);
    Ok(ratio(lhs, rhs))
}

/// Random fields with `|m_a| < n/4`, so products are resolved without aliasing.
pub fn prodform_trial_ratio(gamma: f64, setup: &TrialSetup, trial: usize) -> Result<f64> {
    let mut rng = trial_rng(setup.seed, TAG_PROD, trial);
    let max_mode = setup.grid.n() as i64 / 4 - 1;
    let a = SpectralField::random_real(setup.grid, max_mode, &mut rng);
    let b = SpectralField::random_real(setup.grid, max_mode, &mut rng);
    prodform_ratio(&a, &b, gamma)
}

/// Product estimate over random trials plus the Gaussian case `a = b`.
pub fn check_prodform(gammas: &[f64], setup: &TrialSetup, threshold: f64) -> Result<ScanReport> {
    let mut b = ScanBuilder::new("prodform");
    let grid = setup.grid;
    let l = grid.box_length();
    let w = l / 10.0;
    let bump = SpectralField::from_real_fn(grid, |x| {
        let r2: f64 = x.iter().map(|c| (c - 0.5 * l).powi(2)).sum();
        (-0.5 * r2 / (w * w)).exp()
    });
    for &gamma in gammas {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(EpError::Precondition(format!("γ = {gamma} must be nonnegative")));
        }
        for trial in 0..setup.trials {
            let v = prodform_trial_ratio(gamma, setup, trial)?;
            b.observe(v, || ScanPoint::new("gamma,trial", vec![gamma, trial as f64]));
        }
        let v = prodform_ratio(&bump, &bump, gamma)?;
        b.observe(v, || ScanPoint::new("gamma,gaussian", vec![gamma, -1.0]));
    }
    Ok(b.finish(Threshold::AtMost(threshold)))
}
