//! TOML experiment configuration. Every section has defaults; unknown keys
//! are rejected so typos surface as diagnostics.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::Deserialize;

use crate::epsolver::{DataFamily, DataSpec, RecordedNorm, RunSpec, Scheme};
use crate::error::{EpError, Result};
use crate::linprop::BdChiForm;
use crate::spectral::grid::Grid3;
use crate::symbols::{ConjPair, SymbolKind};
use crate::verify::{DerivativeLattice, LhSpec, NfInput, NfSpec, ScanLattice, TrialSetup, DEFAULT_EXPONENTS};

fn all_eps() -> Vec<String> {
    ConjPair::ALL.iter().map(|e| e.label()).collect()
}

fn default_kinds() -> Vec<String> {
    vec!["mp".into(), "mt".into()]
}

pub(crate) fn parse_all<T: std::str::FromStr<Err = EpError>>(items: &[String]) -> Result<Vec<T>> {
    items.iter().map(|s| s.parse()).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub grid: GridSection,
    pub data: DataSection,
    pub solver: SolverSection,
    pub record: RecordSection,
    pub output: OutputSection,
    pub lindecay: LindecaySection,
    pub bdchi: BdchiSection,
    pub phase: PhaseSection,
    pub symbol: SymbolSection,
    pub holder: HolderSection,
    pub lh: LhSection,
    pub prodform: ProdformSection,
    pub nf: NfSection,
    pub controlds: ControldsSection,
    pub scatter: ScatterSection,
    pub bootstrap: BootstrapSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 7,
            grid: Default::default(),
            data: Default::default(),
            solver: Default::default(),
            record: Default::default(),
            output: Default::default(),
            lindecay: Default::default(),
            bdchi: Default::default(),
            phase: Default::default(),
            symbol: Default::default(),
            holder: Default::default(),
            lh: Default::default(),
            prodform: Default::default(),
            nf: Default::default(),
            controlds: Default::default(),
            scatter: Default::default(),
            bootstrap: Default::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| EpError::Config(e.to_string()))
    }

    pub fn output_dir(&self) -> PathBuf {
        PathBuf::from(&self.output.dir)
    }

    /// Solver run described by `grid`, `data`, `solver` and `record`,
    /// checked against the solver's preconditions.
    pub fn run_spec(&self) -> Result<RunSpec> {
        let grid = Grid3::new(self.grid.dims, self.grid.box_length)?;
        let d = &self.data;
        let data = DataSpec {
            family: d.family.parse::<DataFamily>()?,
            delta: d.delta,
            width: d.width,
            center: d.center,
            neutral: d.neutral,
            velocity_width: d.velocity_width,
            velocity_amplitude: d.velocity_amplitude,
        };
        let s = &self.solver;
        let mut run = RunSpec::new(grid, data, s.dt, s.t_end);
        run.scheme = s.scheme.parse::<Scheme>()?;
        run.nonlinear = s.nonlinear;
        run.sigma = s.sigma;
        run.n_deriv = s.n_deriv;
        run.enforce_horizon = s.enforce_horizon;
        run.record_every = self.record.every.unwrap_or(s.t_end.max(s.dt));
        run.norms = parse_all::<RecordedNorm>(&self.record.norms)?;
        if s.sigma < 2.0 || (s.n_deriv as f64) < s.sigma + 7.0 {
            return Err(EpError::Precondition(format!(
                "solver.sigma = {} and solver.n_deriv = {} need σ ≥ 2 and N ≥ σ + 7",
                s.sigma, s.n_deriv
            )));
        }
        run.validate()?;
        Ok(run)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub dims: usize,
    pub box_length: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { dims: 32, box_length: 64.0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub family: String,
    pub delta: f64,
    pub width: f64,
    pub neutral: bool,
    pub center: Option<[f64; 3]>,
    pub velocity_width: Option<f64>,
    pub velocity_amplitude: Option<f64>,
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection {
            family: "gaussian".into(),
            delta: 1e-3,
            width: 1.5,
            neutral: false,
            center: None,
            velocity_width: None,
            velocity_amplitude: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub scheme: String,
    pub dt: f64,
    pub t_end: f64,
    pub nonlinear: bool,
    pub sigma: f64,
    pub n_deriv: usize,
    pub enforce_horizon: bool,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            scheme: "exponential".into(),
            dt: 0.05,
            t_end: 1.0,
            nonlinear: true,
            sigma: 2.0,
            n_deriv: 9,
            enforce_horizon: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecordSection {
    pub norms: Vec<String>,
    /// Defaults to `solver.t_end`.
    pub every: Option<f64>,
}

impl Default for RecordSection {
    fn default() -> Self {
        RecordSection { norms: RecordedNorm::ALL.iter().map(|n| n.name().to_string()).collect(), every: None }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    /// Write the final `α` of `simulate` as a snapshot.
    pub snapshots: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "out".into(), snapshots: false }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LindecaySection {
    pub amplitude: f64,
    pub width: f64,
    pub p: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    pub window: [f64; 2],
    /// Defaults to `3/p - 3/2`.
    pub expected: Option<f64>,
    pub tolerance: f64,
    pub l2_tolerance: f64,
}

impl Default for LindecaySection {
    fn default() -> Self {
        LindecaySection {
            amplitude: 1.0,
            width: 1.0,
            p: 10.0,
            t_min: 10.0,
            t_max: 200.0,
            samples: 16,
            window: [10.0, 200.0],
            expected: None,
            tolerance: 0.05,
            l2_tolerance: 1e-8,
        }
    }
}

impl LindecaySection {
    pub fn expected(&self) -> f64 {
        self.expected.unwrap_or(3.0 / self.p - 1.5)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.t_min && self.t_min < self.t_max) || self.samples < 2 {
            return Err(EpError::Precondition(format!(
                "lindecay needs 0 < t_min < t_max and at least two samples, got [{}, {}] × {}",
                self.t_min, self.t_max, self.samples
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BdchiSection {
    pub delta: f64,
    pub width: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    pub plain: Vec<f64>,
    pub gradient: Vec<f64>,
    pub n_deriv: f64,
    pub threshold: f64,
}

impl Default for BdchiSection {
    fn default() -> Self {
        BdchiSection {
            delta: 1.0,
            width: 1.0,
            t_min: 1.0,
            t_max: 200.0,
            samples: 24,
            plain: vec![2.5],
            gradient: vec![10.0],
            n_deriv: 9.0,
            threshold: 10.0,
        }
    }
}

impl BdchiSection {
    pub fn entries(&self) -> Vec<(f64, BdChiForm)> {
        let plain = self.plain.iter().map(|&p| (p, BdChiForm::Plain));
        plain.chain(self.gradient.iter().map(|&p| (p, BdChiForm::Gradient))).collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseSection {
    pub min_exp: i32,
    pub max_exp: i32,
    pub per_octave: usize,
    pub angles: usize,
    pub eps: Vec<String>,
    pub threshold: f64,
}

impl Default for PhaseSection {
    fn default() -> Self {
        let l = ScanLattice::default();
        PhaseSection {
            min_exp: l.min_exp,
            max_exp: l.max_exp,
            per_octave: l.per_octave,
            angles: l.angles,
            eps: all_eps(),
            threshold: 0.05,
        }
    }
}

impl PhaseSection {
    pub fn lattice(&self) -> ScanLattice {
        ScanLattice { min_exp: self.min_exp, max_exp: self.max_exp, per_octave: self.per_octave, angles: self.angles }
    }

    pub fn eps(&self) -> Result<Vec<ConjPair>> {
        parse_all(&self.eps)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolSection {
    pub kinds: Vec<String>,
    pub eps: Vec<String>,
    pub max_order: u32,
    pub min_exp: i32,
    pub max_exp: i32,
    pub angles: usize,
    pub margin: f64,
    pub threshold: f64,
}

impl Default for SymbolSection {
    fn default() -> Self {
        let l = DerivativeLattice::default();
        SymbolSection {
            kinds: default_kinds(),
            eps: all_eps(),
            max_order: 4,
            min_exp: l.min_exp,
            max_exp: l.max_exp,
            angles: l.angles,
            margin: l.margin,
            threshold: 100.0,
        }
    }
}

impl SymbolSection {
    pub fn lattice(&self) -> DerivativeLattice {
        DerivativeLattice { min_exp: self.min_exp, max_exp: self.max_exp, angles: self.angles, margin: self.margin }
    }

    pub fn kinds(&self) -> Result<Vec<SymbolKind>> {
        parse_all(&self.kinds)
    }

    pub fn eps(&self) -> Result<Vec<ConjPair>> {
        parse_all(&self.eps)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HolderSection {
    pub dims: usize,
    pub box_length: f64,
    pub trials: usize,
    pub shells: Vec<f64>,
    pub exponents: Vec<[f64; 3]>,
    pub kinds: Vec<String>,
    pub eps: Vec<String>,
    pub threshold: f64,
    pub reduction_trials: usize,
    pub reduction_threshold: f64,
}

impl Default for HolderSection {
    fn default() -> Self {
        HolderSection {
            dims: 16,
            box_length: PI,
            trials: 4,
            shells: vec![1.0, 2.0, 4.0, 8.0],
            exponents: DEFAULT_EXPONENTS.iter().map(|&(p, q, r)| [p, q, r]).collect(),
            kinds: default_kinds(),
            eps: all_eps(),
            threshold: 100.0,
            reduction_trials: 10,
            reduction_threshold: 1.05,
        }
    }
}

impl HolderSection {
    pub fn setup(&self, seed: u64, trials: usize) -> Result<TrialSetup> {
        if trials == 0 {
            return Err(EpError::Precondition("at least one trial is required".into()));
        }
        Ok(TrialSetup { grid: Grid3::new(self.dims, self.box_length)?, trials, seed })
    }

    pub fn exponents(&self) -> Vec<(f64, f64, f64)> {
        self.exponents.iter().map(|&[p, q, r]| (p, q, r)).collect()
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LhCase {
    pub m: f64,
    pub sigma: f64,
    pub theta: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LhSection {
    pub dims: usize,
    pub box_length: f64,
    pub trials: usize,
    pub kinds: Vec<String>,
    pub eps: Vec<String>,
    pub cases: Vec<LhCase>,
    pub threshold: f64,
}

impl Default for LhSection {
    fn default() -> Self {
        let mut cases = Vec::new();
        for (p, q, r) in [(10.0, 2.5, 2.0), (4.0, 4.0, 2.0)] {
            for (m, theta) in [(0.5, 0.0), (1.0, 0.0), (4.0, 5.0), (4.0, 2.0)] {
                cases.push(LhCase { m, sigma: 2.0, theta, p, q, r });
            }
        }
        LhSection {
            dims: 16,
            box_length: PI,
            trials: 4,
            kinds: default_kinds(),
            eps: all_eps(),
            cases,
            threshold: 100.0,
        }
    }
}

impl LhSection {
    pub fn cases(&self) -> Result<Vec<LhSpec>> {
        self.cases
            .iter()
            .map(|c| {
                let s = LhSpec { m: c.m, sigma: c.sigma, theta: c.theta, p: c.p, q: c.q, r: c.r };
                s.validate()?;
                Ok(s)
            })
            .collect()
    }

    pub fn setup(&self, seed: u64) -> Result<TrialSetup> {
        Ok(TrialSetup { grid: Grid3::new(self.dims, self.box_length)?, trials: self.trials.max(1), seed })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProdformSection {
    pub dims: usize,
    pub box_length: f64,
    pub trials: usize,
    pub gammas: Vec<f64>,
    pub threshold: f64,
}

impl Default for ProdformSection {
    fn default() -> Self {
        ProdformSection { dims: 32, box_length: 2.0 * PI, trials: 10, gammas: vec![0.0, 1.0, 3.0, 9.0], threshold: 10.0 }
    }
}

impl ProdformSection {
    pub fn setup(&self, seed: u64) -> Result<TrialSetup> {
        Ok(TrialSetup { grid: Grid3::new(self.dims, self.box_length)?, trials: self.trials.max(1), seed })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NfSection {
    pub kind: String,
    pub eps: String,
    pub inputs: [String; 2],
    pub quad_dts: Vec<f64>,
    pub order_dts: Vec<f64>,
    /// Step at which the residual is compared with `threshold`.
    pub check_dt: f64,
    pub threshold: f64,
    pub min_order: f64,
}

impl Default for NfSection {
    fn default() -> Self {
        NfSection {
            kind: "mp".into(),
            eps: "++".into(),
            inputs: ["b".into(), "chi_q".into()],
            quad_dts: vec![1e-3, 0.0125, 0.025, 0.05, 0.1],
            order_dts: vec![0.0125, 0.025, 0.05, 0.1],
            check_dt: 1e-3,
            threshold: 1e-6,
            min_order: 3.5,
        }
    }
}

impl NfSection {
    pub fn spec(&self) -> Result<NfSpec> {
        let inputs = (self.inputs[0].parse::<NfInput>()?, self.inputs[1].parse::<NfInput>()?);
        if !self.quad_dts.iter().any(|q| (q - self.check_dt).abs() <= 1e-12 * self.check_dt) {
            return Err(EpError::Precondition(format!(
                "nf.check_dt = {} is not among nf.quad_dts",
                self.check_dt
            )));
        }
        Ok(NfSpec {
            kind: self.kind.parse()?,
            eps: self.eps.parse()?,
            inputs,
            quad_dts: self.quad_dts.clone(),
            order_dts: self.order_dts.clone(),
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControldsSection {
    pub every: f64,
    pub eps: f64,
}

impl Default for ControldsSection {
    fn default() -> Self {
        ControldsSection { every: 1.0, eps: 0.005 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScatterSection {
    pub t_min: f64,
    pub per_octave: usize,
    /// Defaults to `[t_min, t_end/2]`.
    pub window: Option<[f64; 2]>,
    pub max_exponent: f64,
}

impl Default for ScatterSection {
    fn default() -> Self {
        ScatterSection { t_min: 1.0, per_octave: 4, window: None, max_exponent: -0.3 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapSection {
    pub every: f64,
    pub threshold: f64,
    /// Limit on `(1+t)^{6/5}‖β‖_{B^σ_{10,2}}` relative to its initial value.
    pub besov_growth: f64,
    /// Limit on `‖β‖_{H^N}` relative to its initial value.
    pub hn_growth: f64,
    /// Band for `E_N/‖α‖²_{H^N}`.
    pub energy_band: [f64; 2],
}

impl Default for BootstrapSection {
    fn default() -> Self {
        BootstrapSection { every: 1.0, threshold: 50.0, besov_growth: 10.0, hn_growth: 2.0, energy_band: [0.25, 4.0] }
    }
}
