use std::cell::OnceCell;
use std::str::FromStr;

use super::energy::{energy_en, zprime_bound};
use super::series::{DecaySeries, SeriesMeta};
use super::split::{beta_of, BetaSplit};
use super::state::{from_alpha, init_perturbation, to_alpha, AlphaState, DataFamily, DataSpec, FluidState};
use super::step::{AlphaStepper, Scheme};
use crate::error::{EpError, Result};
use crate::spectral::field::SpectralField;
use crate::spectral::grid::Grid3;
use crate::spectral::multiplier::{apply_multiplier, Multiplier};
use crate::spectral::norms::{h_norm, lebesgue, lebesgue_vector, norm, NormSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RecordedNorm {
    RhoLinf,
    ULinf,
    AlphaHn,
    BetaBesov,
    BetaXWeight,
    BetaHn,
    Energy,
    EnergyRatio,
    Zprime,
    Charge,
}

impl RecordedNorm {
    pub const ALL: [RecordedNorm; 10] = [
        RecordedNorm::RhoLinf,
        RecordedNorm::ULinf,
        RecordedNorm::AlphaHn,
        RecordedNorm::BetaBesov,
        RecordedNorm::BetaXWeight,
        RecordedNorm::BetaHn,
        RecordedNorm::Energy,
        RecordedNorm::EnergyRatio,
        RecordedNorm::Zprime,
        RecordedNorm::Charge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RecordedNorm::RhoLinf => "rho_linf",
            RecordedNorm::ULinf => "u_linf",
            RecordedNorm::AlphaHn => "alpha_hn",
            RecordedNorm::BetaBesov => "beta_besov",
            RecordedNorm::BetaXWeight => "beta_x_weight",
            RecordedNorm::BetaHn => "beta_hn",
            RecordedNorm::Energy => "energy",
            RecordedNorm::EnergyRatio => "energy_ratio",
            RecordedNorm::Zprime => "zprime",
            RecordedNorm::Charge => "charge",
        }
    }
}

impl FromStr for RecordedNorm {
    type Err = EpError;

    fn from_str(s: &str) -> Result<Self> {
        RecordedNorm::ALL
            .into_iter()
            .find(|n| n.name() == s.trim())
            .ok_or_else(|| EpError::Config(format!("unknown recorded norm `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub grid: Grid3,
    pub data: DataSpec,
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    pub nonlinear: bool,
    pub record_every: f64,
    pub norms: Vec<RecordedNorm>,
    /// Besov regularity `σ`.
    pub sigma: f64,
    /// Sobolev index `N` of the energy and `H^N` norms.
    pub n_deriv: usize,
    /// Reject end times past the wrap-around horizon.
    pub enforce_horizon: bool,
}

/// Latest time before periodic images of the data can interact with it:
/// `(L - diameter)/2`, since the group speed `|ξ|/⟨ξ⟩` is below one.
pub fn wraparound_horizon(grid: &Grid3, data: &DataSpec) -> f64 {
    0.5 * (grid.box_length() - data.diameter())
}

fn steps_for(span: f64, dt: f64, what: &str) -> Result<usize> {
    let k = (span / dt).round();
    if (k * dt - span).abs() > 1e-9 * span.max(dt) {
        return Err(EpError::Precondition(format!(
            "{what} = {span} is not a multiple of dt = {dt}"
        )));
    }
    Ok(k as usize)
}

impl RunSpec {
    pub fn new(grid: Grid3, data: DataSpec, dt: f64, t_end: f64) -> Self {
        RunSpec {
            grid,
            data,
            scheme: Scheme::Exponential,
            dt,
            t_end,
            nonlinear: true,
            record_every: t_end.max(dt),
            norms: RecordedNorm::ALL.to_vec(),
            sigma: 2.0,
            n_deriv: 9,
            enforce_horizon: true,
        }
    }

    /// Number of steps and the recording stride.
    pub fn validate(&self) -> Result<(usize, usize)> {
        self.data.validate(&self.grid)?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(EpError::Precondition(format!("solver.dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(EpError::Precondition(format!("solver.t_end must be >= 0, got {}", self.t_end)));
        }
        if self.enforce_horizon {
            let h = wraparound_horizon(&self.grid, &self.data);
            if self.t_end > h {
                return Err(EpError::Precondition(format!(
                    "solver.t_end = {} exceeds the wrap-around horizon {h}",
                    self.t_end
                )));
            }
        }
        let steps = steps_for(self.t_end, self.dt, "solver.t_end")?;
        let stride = steps_for(self.record_every, self.dt, "record.every")?;
        if stride == 0 {
            return Err(EpError::Precondition("record.every must be at least one step".into()));
        }
        Ok((steps, stride))
    }
}

/// State at one time level, with derived fields computed on first use.
pub struct RunSample<'a> {
    pub step: usize,
    pub state: &'a AlphaState,
    pub split: &'a BetaSplit,
    stepper: &'a AlphaStepper,
    beta: OnceCell<SpectralField>,
    profile: OnceCell<SpectralField>,
    nonlinearity: OnceCell<SpectralField>,
    forcing: OnceCell<SpectralField>,
    fluid: OnceCell<FluidState>,
}

fn cached<'c, T>(cell: &'c OnceCell<T>, f: impl FnOnce() -> Result<T>) -> Result<&'c T> {
    if cell.get().is_none() {
        let _ = cell.set(f()?);
    }
    Ok(cell.get().expect("just initialised"))
}

impl<'a> RunSample<'a> {
    pub fn new(step: usize, state: &'a AlphaState, split: &'a BetaSplit, stepper: &'a AlphaStepper) -> Self {
        RunSample {
            step,
            state,
            split,
            stepper,
            beta: OnceCell::new(),
            profile: OnceCell::new(),
            nonlinearity: OnceCell::new(),
            forcing: OnceCell::new(),
            fluid: OnceCell::new(),
        }
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    pub fn alpha(&self) -> &SpectralField {
        &self.state.alpha
    }

    /// `β(t)`
    pub fn beta(&self) -> Result<&SpectralField> {
        cached(&self.beta, || beta_of(self.state, self.split))
    }

    /// `b(t) = e^{-it⟨∇⟩}β(t)`
    pub fn profile(&self) -> Result<&SpectralField> {
        cached(&self.profile, || {
            apply_multiplier(self.beta()?, &Multiplier::kg_propagator(-self.time()))
        })
    }

    /// `N(α(t)) = I + II + III`
    pub fn nonlinearity(&self) -> Result<&SpectralField> {
        cached(&self.nonlinearity, || self.stepper.nonlinear_term(&self.state.alpha))
    }

    /// `∂_t b = e^{-it⟨∇⟩}N(α(t))`
    pub fn forcing(&self) -> Result<&SpectralField> {
        cached(&self.forcing, || {
            apply_multiplier(self.nonlinearity()?, &Multiplier::kg_propagator(-self.time()))
        })
    }

    pub fn fluid(&self) -> Result<&FluidState> {
        cached(&self.fluid, || from_alpha(self.state))
    }
}

pub trait RunObserver {
    /// Called at every time level, including the initial and final ones.
    fn observe(&mut self, sample: &RunSample<'_>) -> Result<()>;
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub series: DecaySeries,
    pub initial_fluid: FluidState,
    pub initial: AlphaState,
    pub final_state: AlphaState,
    pub split: BetaSplit,
    pub steps: usize,
}

fn record(
    series: &mut DecaySeries,
    sample: &RunSample<'_>,
    spec: &RunSpec,
) -> Result<()> {
    let t = sample.time();
    let n = spec.n_deriv as f64;
    let mut besov = None;
    let mut alpha_hn = None;
    for &which in &spec.norms {
        let v = match which {
            RecordedNorm::RhoLinf => lebesgue(&sample.fluid()?.rho_minus_1, f64::INFINITY),
            RecordedNorm::ULinf => lebesgue_vector(&sample.fluid()?.u, f64::INFINITY)?,
            RecordedNorm::AlphaHn => *alpha_hn.get_or_insert(h_norm(sample.alpha(), n)),
            RecordedNorm::BetaBesov | RecordedNorm::BetaXWeight => {
                let b = match besov {
                    Some(b) => b,
                    None => {
                        let spec_b = NormSpec::Besov { sigma: spec.sigma, p: 10.0, q: 2.0 };
                        let b = norm(sample.beta()?, spec_b)?;
                        besov = Some(b);
                        b
                    }
                };
                if which == RecordedNorm::BetaBesov {
                    b
                } else {
                    (1.0 + t).powf(1.2) * b
                }
            }
            RecordedNorm::BetaHn => h_norm(sample.beta()?, n),
            RecordedNorm::Energy => energy_en(sample.fluid()?, spec.n_deriv)?,
            RecordedNorm::EnergyRatio => {
                let e = energy_en(sample.fluid()?, spec.n_deriv)?;
                let a = *alpha_hn.get_or_insert(h_norm(sample.alpha(), n));
                if a == 0.0 {
                    0.0
                } else {
                    e / (a * a)
                }
            }
            RecordedNorm::Zprime => zprime_bound(sample.state),
            RecordedNorm::Charge => sample.fluid()?.total_charge(),
        };
        series.push(t, which.name(), v)?;
    }
    Ok(())
}

fn family_name(f: DataFamily) -> &'static str {
    match f {
        DataFamily::Gaussian => "gaussian",
        DataFamily::CompactBump => "compact",
    }
}

/// Evolve the `α` equation from the configured data, recording norms every
/// `record_every` and handing every time level to the observers.
pub fn run_experiment(spec: &RunSpec, observers: &mut [&mut dyn RunObserver]) -> Result<RunOutcome> {
    let (steps, stride) = spec.validate()?;
    let fluid0 = init_perturbation(spec.grid, &spec.data)?;
    let alpha0 = to_alpha(&fluid0)?;
    let split = BetaSplit::new(&alpha0, &fluid0);
    let stepper = AlphaStepper::new(spec.grid, spec.dt, spec.scheme, spec.nonlinear)?;
    let mut series = DecaySeries::new(SeriesMeta {
        dims: spec.grid.n(),
        box_length: spec.grid.box_length(),
        family: family_name(spec.data.family).into(),
        delta: spec.data.delta,
        q: split.q,
        q_tilde: split.q_tilde,
    });
    let mut state = alpha0.clone();
    for k in 0..=steps {
        // keep sample times exact multiples of dt
        state.time = k as f64 * spec.dt;
        {
            let sample = RunSample::new(k, &state, &split, &stepper);
            if k % stride == 0 || k == steps {
                record(&mut series, &sample, spec)?;
            }
            for obs in observers.iter_mut() {
                obs.observe(&sample)?;
            }
        }
        if k < steps {
            state = stepper.step(&state)?;
        }
    }
    Ok(RunOutcome {
        series,
        initial_fluid: fluid0,
        initial: alpha0,
        final_state: state,
        split,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_gives_zero_series() {
        let g = Grid3::new(16, 40.0).unwrap();
        let mut spec = RunSpec::new(g, DataSpec::gaussian(0.0, 2.0), 0.5, 2.0);
        spec.record_every = 1.0;
        let out = run_experiment(&spec, &mut []).unwrap();
        assert!(out.series.records().iter().all(|(_, _, v)| *v == 0.0));
        assert_eq!(out.series.values("alpha_hn").len(), 3);
    }

    #[test]
    fn linear_run_conserves_hn() {
        let g = Grid3::new(16, 40.0).unwrap();
        let mut spec = RunSpec::new(g, DataSpec::gaussian(1e-3, 2.0), 0.25, 3.0);
        spec.nonlinear = false;
        spec.record_every = 0.5;
        spec.norms = vec![RecordedNorm::AlphaHn];
        let out = run_experiment(&spec, &mut []).unwrap();
        let v = out.series.values("alpha_hn");
        for (_, x) in &v {
            assert!((x - v[0].1).abs() <= 1e-10 * v[0].1);
        }
    }

    #[test]
    fn horizon_is_enforced() {
        let g = Grid3::new(16, 40.0).unwrap();
        let spec = RunSpec::new(g, DataSpec::gaussian(1e-3, 2.0), 0.5, 20.0);
        assert!(matches!(spec.validate(), Err(EpError::Precondition(_))));
    }
}
