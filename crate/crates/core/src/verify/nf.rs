//! Normal-form identity along a stored run, with the time integrals taken by
//! composite Simpson rules at several steps in one pass.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::epsolver::{run_experiment, RunObserver, RunSample, RunSpec};
use crate::error::{EpError, Result};
use crate::linprop::least_squares;
use crate::spectral::field::{Representation, SpectralField};
use crate::spectral::grid::Grid3;
use crate::spectral::multiplier::{apply_multiplier, Multiplier};
use crate::spectral::norms::h_norm;
use crate::symbols::direct::{conjugated_spectrum, support};
use crate::symbols::{BilinearSymbolSpec, ConjPair, PairKernel, SymbolKind};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Input slot of the bilinear term: the profile `b(s)` or the fixed `χ^Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NfInput {
    Profile,
    Charge,
}

impl fmt::Display for NfInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NfInput::Profile => "profile",
            NfInput::Charge => "charge",
        })
    }
}

impl FromStr for NfInput {
    type Err = EpError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "profile" | "b" => Ok(NfInput::Profile),
            "charge" | "chi_q" | "chiq" => Ok(NfInput::Charge),
            other => Err(EpError::Config(format!("unknown normal-form input `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NfSpec {
    pub kind: SymbolKind,
    pub eps: ConjPair,
    pub inputs: (NfInput, NfInput),
    /// Simpson steps; each must be a multiple of the solver step.
    pub quad_dts: Vec<f64>,
    /// Steps entering the convergence-order fit.
    pub order_dts: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NfRow {
    pub quad_dt: f64,
    pub residual: f64,
    /// `‖∫₀ᵗ e^{-is⟨∇⟩}T_m[...] ds‖_{L²}`
    pub lhs_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NfReport {
    pub symbol: String,
    pub eps: String,
    pub inputs: (NfInput, NfInput),
    pub t: f64,
    pub rows: Vec<NfRow>,
    /// Slope of `log residual` against `log quad_dt` over `order_dts`.
    pub order: Option<f64>,
}

impl NfReport {
    pub fn residual_at(&self, quad_dt: f64) -> Option<f64> {
        self.rows.iter().find(|r| (r.quad_dt - quad_dt).abs() <= 1e-12 * quad_dt).map(|r| r.residual)
    }
}

struct Rule {
    quad_dt: f64,
    stride: usize,
    nodes: usize,
    lhs: Vec<Complex64>,
    rhs: Vec<Complex64>,
}

/// Streaming accumulator for one `(m, ε, c₁, c₂)`; attach to a run whose final
/// time is the identity's `t`.
pub struct NfObserver {
    spec: NfSpec,
    dt: f64,
    steps: usize,
    plain: Option<PairKernel>,
    divided: Option<PairKernel>,
    rules: Vec<Rule>,
    boundary0: Option<SpectralField>,
    boundary_t: Option<SpectralField>,
}

fn stride_for(quad_dt: f64, dt: f64) -> Result<usize> {
    let k = (quad_dt / dt).round();
    if !(k >= 1.0) || (k * dt - quad_dt).abs() > 1e-9 * quad_dt {
        return Err(EpError::Precondition(format!(
            "quad_dt = {quad_dt} is not a multiple of the solver step {dt}"
        )));
    }
    Ok(k as usize)
}

fn non_nyquist(grid: &Grid3) -> Vec<usize> {
    (0..grid.len()).filter(|&f| !grid.is_nyquist(f)).collect()
}

fn zero(grid: Grid3) -> SpectralField {
    SpectralField::zeros(grid, Representation::Frequency)
}

impl NfObserver {
    pub fn new(spec: NfSpec, run: &RunSpec) -> Result<Self> {
        if spec.quad_dts.is_empty() {
            return Err(EpError::Precondition("at least one quad_dt is required".into()));
        }
        let steps = stride_for(run.t_end, run.dt).or_else(|e| if run.t_end == 0.0 { Ok(0) } else { Err(e) })?;
        let mut rules = Vec::new();
        for &q in &spec.quad_dts {
            let stride = stride_for(q, run.dt)?;
            if steps % stride != 0 || (steps / stride) % 2 != 0 {
                return Err(EpError::Precondition(format!(
                    "t = {} is not an even number of Simpson steps of {q}",
                    run.t_end
                )));
            }
            let n = run.grid.len();
            rules.push(Rule {
                quad_dt: q,
                stride,
                nodes: steps / stride,
                lhs: vec![Complex64::new(0.0, 0.0); n],
                rhs: vec![Complex64::new(0.0, 0.0); n],
            });
        }
        for q in &spec.order_dts {
            if !spec.quad_dts.iter().any(|x| (x - q).abs() <= 1e-12 * q) {
                return Err(EpError::Precondition(format!("order step {q} is not among the quadrature steps")));
            }
        }
        Ok(NfObserver {
            spec,
            dt: run.dt,
            steps,
            plain: None,
            divided: None,
            rules,
            boundary0: None,
            boundary_t: None,
        })
    }

    fn kernels(&mut self, grid: Grid3, charge: &SpectralField) -> Result<()> {
        if self.plain.is_some() {
            return Ok(());
        }
        let slot = |input: NfInput, sign| match input {
            NfInput::Profile => non_nyquist(&grid),
            NfInput::Charge => support(&conjugated_spectrum(charge, sign)),
        };
        let left = slot(self.spec.inputs.0, self.spec.eps.0);
        let right = slot(self.spec.inputs.1, self.spec.eps.1);
        let kind = self.spec.kind.clone();
        self.plain = Some(PairKernel::build(&BilinearSymbolSpec::new(kind.clone()), grid, &left, &right)?);
        self.divided =
            Some(PairKernel::build(&BilinearSymbolSpec::normal_form(kind, self.spec.eps), grid, &left, &right)?);
        Ok(())
    }

    /// `e^{-is⟨∇⟩}T[C^{ε₁}x, C^{ε₂}y]`
    fn term(&self, divided: bool, s: f64, x: &SpectralField, y: &SpectralField) -> Result<SpectralField> {
        let k = if divided { self.divided.as_ref() } else { self.plain.as_ref() }.expect("kernels built");
        let t = k.apply(&conjugated_spectrum(x, self.spec.eps.0), &conjugated_spectrum(y, self.spec.eps.1))?;
        apply_multiplier(&t, &Multiplier::kg_propagator(-s))
    }

    pub fn finish(self) -> Result<NfReport> {
        let t = self.steps as f64 * self.dt;
        let (b0, bt) = match (self.boundary0, self.boundary_t) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(EpError::Precondition("run ended before the final time level".into())),
        };
        let grid = b0.grid();
        let mut rows = Vec::new();
        for rule in &self.rules {
            let lhs = SpectralField::from_data(grid, rule.lhs.clone(), Representation::Frequency, false)?;
            let integral = SpectralField::from_data(grid, rule.rhs.clone(), Representation::Frequency, false)?;
            let mut rhs = bt.scale(-I);
            rhs.axpy(I, &b0);
            rhs.axpy(I, &integral);
            let lhs_norm = h_norm(&lhs, 0.0);
            let diff = h_norm(&lhs.sub(&rhs), 0.0);
            let residual = if lhs_norm == 0.0 && diff == 0.0 { 0.0 } else { diff / lhs_norm };
            rows.push(NfRow { quad_dt: rule.quad_dt, residual, lhs_norm });
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for q in &self.spec.order_dts {
            if let Some(r) = rows.iter().find(|r| (r.quad_dt - q).abs() <= 1e-12 * q) {
                if r.residual > 0.0 {
                    xs.push(r.quad_dt.ln());
                    ys.push(r.residual.ln());
                }
            }
        }
        let order = if xs.len() >= 2 { Some(least_squares(&xs, &ys)?.0) } else { None };
        Ok(NfReport {
            symbol: self.spec.kind.name().to_string(),
            eps: self.spec.eps.label(),
            inputs: self.spec.inputs,
            t,
            rows,
            order,
        })
    }
}

impl RunObserver for NfObserver {
    fn observe(&mut self, sample: &RunSample<'_>) -> Result<()> {
        let k = sample.step;
        if k > self.steps {
            return Ok(());
        }
        let s = k as f64 * self.dt;
        let grid = sample.alpha().grid();
        let boundary = k == 0 || k == self.steps;
        let on_node: Vec<usize> = (0..self.rules.len()).filter(|&i| k % self.rules[i].stride == 0).collect();
        if on_node.is_empty() && !boundary {
            return Ok(());
        }
        let free = sample.split.free_charge(s)?;
        self.kernels(grid, &sample.split.chi_q)?;
        // value and s-derivative of e^{is⟨∇⟩}c for each slot
        let slot = |input: NfInput| -> Result<(SpectralField, Option<SpectralField>)> {
            Ok(match input {
                NfInput::Profile => (sample.beta()?.clone(), Some(sample.nonlinearity()?.clone())),
                NfInput::Charge => (free.clone(), None),
            })
        };
        let (x, dx) = slot(self.spec.inputs.0)?;
        let (y, dy) = slot(self.spec.inputs.1)?;
        if boundary {
            let b = self.term(true, s, &x, &y)?;
            if k == 0 {
                self.boundary0 = Some(b.clone());
            }
            if k == self.steps {
                self.boundary_t = Some(b);
            }
        }
        if on_node.is_empty() {
            return Ok(());
        }
        let plain = self.term(false, s, &x, &y)?;
        let mut derivative = zero(grid);
        if let Some(dx) = &dx {
            derivative = derivative.add(&self.term(true, s, dx, &y)?);
        }
        if let Some(dy) = &dy {
            derivative = derivative.add(&self.term(true, s, &x, dy)?);
        }
        let (pd, dd) = (plain.to_frequency(), derivative.to_frequency());
        for i in on_node {
            let rule = &mut self.rules[i];
            let j = k / rule.stride;
            let w = if rule.nodes == 0 {
                0.0
            } else if j == 0 || j == rule.nodes {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            } * rule.quad_dt
                / 3.0;
            for (acc, v) in rule.lhs.iter_mut().zip(pd.data()) {
                *acc += w * v;
            }
            for (acc, v) in rule.rhs.iter_mut().zip(dd.data()) {
                *acc += w * v;
            }
        }
        Ok(())
    }
}

/// Run the configured experiment and evaluate the identity at its final time.
/// The run is exempt from the wrap-around horizon: the identity is algebraic
/// and holds on the torus.
pub fn nf_residual(run: &RunSpec, spec: NfSpec) -> Result<NfReport> {
    let mut run = run.clone();
    run.enforce_horizon = false;
    run.norms.clear();
    let mut obs = NfObserver::new(spec, &run)?;
    run_experiment(&run, &mut [&mut obs])?;
    obs.finish()
}
