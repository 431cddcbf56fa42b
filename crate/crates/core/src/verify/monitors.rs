//! Streaming monitors attached to a run: decay of `∂_t b`, scattering of the
//! profile, and the bootstrap quantity of the `X_T` norm.

use serde::Serialize;

use super::report::{ScanBuilder, ScanPoint, ScanReport, Threshold};
use crate::epsolver::{RunObserver, RunSample, RunSpec};
use crate::error::{EpError, Result};
use crate::linprop::{fit_power_law, FitResult};
use crate::spectral::field::SpectralField;
use crate::spectral::norms::{h_norm, x_weight_components, y_norm};

fn stride_of(every: f64, run: &RunSpec) -> Result<(usize, usize)> {
    let steps = (run.t_end / run.dt).round() as usize;
    let stride = (every / run.dt).round();
    if !(stride >= 1.0) {
        return Err(EpError::Precondition(format!(
            "monitor interval {every} is shorter than the solver step {}",
            run.dt
        )));
    }
    Ok((stride as usize, steps))
}

fn sampled(k: usize, stride: usize, steps: usize) -> bool {
    k % stride == 0 || k == steps
}

/// Largest value over the later half of the samples divided by the largest
/// over the earlier half; 0/0 counts as 1.
fn growth(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 1.0;
    }
    let half = values.len() / 2;
    let early = values[..half].iter().copied().fold(0.0, f64::max);
    let late = values[half..].iter().copied().fold(0.0, f64::max);
    match (early == 0.0, late == 0.0) {
        (true, true) => 1.0,
        (true, false) => f64::INFINITY,
        _ => late / early,
    }
}

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if num == 0.0 && den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Running sup of `(1+t)^{6/5}‖β‖_{B^σ_{10,2}} + ‖β‖_{H^N}` over the samples.
#[derive(Debug, Clone, Copy)]
struct XTracker {
    sigma: f64,
    n_deriv: f64,
    sup: f64,
}

impl XTracker {
    fn update(&mut self, beta: &SpectralField, t: f64) -> Result<(f64, f64)> {
        let (b, h) = x_weight_components(beta, t, self.sigma, self.n_deriv)?;
        self.sup = self.sup.max(b + h);
        Ok((b, h))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ControlDsRow {
    pub t: f64,
    /// `(1+t)^{9/10+ε}‖N(α)‖_{H^{σ+3}} / (Q+X_t)²`
    pub high: f64,
    /// `(1+t)^{6/5}‖N(α)‖_{H^{σ-1}} / (Q+X_t)²`
    pub low: f64,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlDsReport {
    pub high: ScanReport,
    pub low: ScanReport,
    pub growth_high: f64,
    pub growth_low: f64,
    pub rows: Vec<ControlDsRow>,
}

impl ControlDsReport {
    /// Finite everywhere and not growing over the window.
    pub fn pass(&self) -> bool {
        self.high.pass && self.low.pass && self.growth_high <= 1.0 && self.growth_low <= 1.0
    }
}

/// Normalized `H^{σ+3}` and `H^{σ-1}` norms of `e^{it⟨∇⟩}∂_t b = N(α(t))`.
pub struct ControlDsObserver {
    eps: f64,
    stride: usize,
    steps: usize,
    x: XTracker,
    rows: Vec<ControlDsRow>,
}

impl ControlDsObserver {
    /// `eps` is the small loss in the high-norm rate, `0 < eps < 1/100`.
    pub fn new(run: &RunSpec, every: f64, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.01) {
            return Err(EpError::Precondition(format!("controlds eps must lie in (0, 0.01), got {eps}")));
        }
        let (stride, steps) = stride_of(every, run)?;
        Ok(ControlDsObserver {
            eps,
            stride,
            steps,
            x: XTracker { sigma: run.sigma, n_deriv: run.n_deriv as f64, sup: 0.0 },
            rows: Vec::new(),
        })
    }

    pub fn finish(self) -> ControlDsReport {
        let mut high = ScanBuilder::new("controlds_high");
        let mut low = ScanBuilder::new("controlds_low");
        for r in &self.rows {
            high.observe(r.high, || ScanPoint::new("t", vec![r.t]));
            low.observe(r.low, || ScanPoint::new("t", vec![r.t]));
        }
        let hs: Vec<f64> = self.rows.iter().map(|r| r.high).collect();
        let ls: Vec<f64> = self.rows.iter().map(|r| r.low).collect();
        ControlDsReport {
            high: high.finish(Threshold::Finite),
            low: low.finish(Threshold::Finite),
            growth_high: growth(&hs),
            growth_low: growth(&ls),
            rows: self.rows,
        }
    }
}

impl RunObserver for ControlDsObserver {
    fn observe(&mut self, sample: &RunSample<'_>) -> Result<()> {
        if !sampled(sample.step, self.stride, self.steps) {
            return Ok(());
        }
        let t = sample.time();
        self.x.update(sample.beta()?, t)?;
        let sigma = self.x.sigma;
        let n = sample.nonlinearity()?;
        let scale = (sample.split.q + self.x.sup).powi(2);
        self.rows.push(ControlDsRow {
            t,
            high: ratio_or_zero((1.0 + t).powf(0.9 + self.eps) * h_norm(n, sigma + 3.0), scale),
            low: ratio_or_zero((1.0 + t).powf(1.2) * h_norm(n, sigma - 1.0), scale),
            x: self.x.sup,
        });
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterReport {
    /// `(t, ‖b(2t) - b(t)‖_{H^σ})`
    pub points: Vec<(f64, f64)>,
    pub fit: FitResult,
}

/// Fit the decay of `‖b(2t) - b(t)‖_{H^σ}` against `1+t` over `window`.
pub fn check_scattering(pairs: &[(f64, f64)], window: (f64, f64)) -> Result<ScatterReport> {
    let fit = fit_power_law(pairs, window)?;
    Ok(ScatterReport { points: pairs.to_vec(), fit })
}

/// `‖b(2t) - b(t)‖_{H^σ}` from profiles sampled at `t` and `2t`.
pub fn profile_difference(early: &SpectralField, late: &SpectralField, sigma: f64) -> f64 {
    h_norm(&late.sub(early), sigma)
}

/// Collects `‖b(2t) - b(t)‖_{H^σ}` along a run for `t = t_min·2^{j/per_octave}`
/// with `2t ≤ t_end`, holding each early profile only until its partner.
pub struct ScatterObserver {
    sigma: f64,
    dt: f64,
    /// `(early step, late step)`, sorted by early step
    pairs: Vec<(usize, usize)>,
    held: Vec<(usize, SpectralField)>,
    points: Vec<(f64, f64)>,
}

impl ScatterObserver {
    pub fn new(run: &RunSpec, t_min: f64, per_octave: usize) -> Result<Self> {
        if !(t_min > 0.0) || per_octave == 0 {
            return Err(EpError::Precondition("scatter needs t_min > 0 and per_octave ≥ 1".into()));
        }
        let steps = (run.t_end / run.dt).round() as usize;
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for j in 0.. {
            let t = t_min * 2f64.powf(j as f64 / per_octave as f64);
            let k = (t / run.dt).round() as usize;
            if 2 * k > steps {
                break;
            }
            if k > 0 && pairs.last().is_none_or(|&(e, _)| e != k) {
                pairs.push((k, 2 * k));
            }
        }
        if pairs.len() < 2 {
            return Err(EpError::Precondition(format!(
                "t_end = {} leaves fewer than two (t, 2t) pairs from t_min = {t_min}",
                run.t_end
            )));
        }
        Ok(ScatterObserver { sigma: run.sigma, dt: run.dt, pairs, held: Vec::new(), points: Vec::new() })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn finish(self, window: (f64, f64)) -> Result<ScatterReport> {
        check_scattering(&self.points, window)
    }
}

impl RunObserver for ScatterObserver {
    fn observe(&mut self, sample: &RunSample<'_>) -> Result<()> {
        let k = sample.step;
        let early = self.pairs.iter().any(|&(e, _)| e == k);
        let late: Vec<usize> = self.pairs.iter().filter(|&&(_, l)| l == k).map(|&(e, _)| e).collect();
        if !early && late.is_empty() {
            return Ok(());
        }
        let b = sample.profile()?;
        for e in late {
            let pos = self.held.iter().position(|(s, _)| *s == e).expect("early profile held");
            let (_, first) = self.held.swap_remove(pos);
            self.points.push((e as f64 * self.dt, profile_difference(&first, b, self.sigma)));
        }
        if early {
            self.held.push((k, b.clone()));
        }
        self.points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapRow {
    pub t: f64,
    /// `(1+t)^{6/5}‖β‖_{B^σ_{10,2}}`
    pub besov_weighted: f64,
    /// `‖β‖_{H^N}`
    pub hn: f64,
    /// running `X_t`
    pub x: f64,
    /// `X_t / (‖β(0)‖_Y + (Q+X_t)²)`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapReport {
    pub ratio: ScanReport,
    pub growth: f64,
    pub y0: f64,
    pub q: f64,
    pub rows: Vec<BootstrapRow>,
}

impl BootstrapReport {
    /// Largest `(1+t)^{6/5}‖β‖_{B^σ_{10,2}}` and `‖β‖_{H^N}` relative to
    /// their initial values.
    pub fn relative_growth(&self) -> (f64, f64) {
        let Some(first) = self.rows.first() else {
            return (f64::NAN, f64::NAN);
        };
        let rel = |f: fn(&BootstrapRow) -> f64| {
            self.rows.iter().map(|r| ratio_or_zero(f(r), f(first))).fold(0.0, f64::max)
        };
        (rel(|r| r.besov_weighted), rel(|r| r.hn))
    }

    pub fn pass(&self) -> bool {
        self.ratio.pass && self.growth <= 1.0
    }
}

pub struct BootstrapObserver {
    stride: usize,
    steps: usize,
    threshold: f64,
    x: XTracker,
    y0: Option<f64>,
    q: f64,
    rows: Vec<BootstrapRow>,
}

impl BootstrapObserver {
    pub fn new(run: &RunSpec, every: f64, threshold: f64) -> Result<Self> {
        let (stride, steps) = stride_of(every, run)?;
        Ok(BootstrapObserver {
            stride,
            steps,
            threshold,
            x: XTracker { sigma: run.sigma, n_deriv: run.n_deriv as f64, sup: 0.0 },
            y0: None,
            q: 0.0,
            rows: Vec::new(),
        })
    }

    pub fn finish(self) -> Result<BootstrapReport> {
        let y0 = self.y0.ok_or_else(|| EpError::Precondition("bootstrap monitor saw no samples".into()))?;
        let mut b = ScanBuilder::new("bootstrap_ratio");
        for r in &self.rows {
            b.observe(r.ratio, || ScanPoint::new("t", vec![r.t]));
        }
        let ratios: Vec<f64> = self.rows.iter().map(|r| r.ratio).collect();
        Ok(BootstrapReport {
            ratio: b.finish(Threshold::AtMost(self.threshold)),
            growth: growth(&ratios),
            y0,
            q: self.q,
            rows: self.rows,
        })
    }
}

impl RunObserver for BootstrapObserver {
    fn observe(&mut self, sample: &RunSample<'_>) -> Result<()> {
        if !sampled(sample.step, self.stride, self.steps) {
            return Ok(());
        }
        let t = sample.time();
        let beta = sample.beta()?;
        let y0 = match self.y0 {
            Some(y) => y,
            None => {
                let y = y_norm(beta, self.x.sigma, self.x.n_deriv)?;
                self.y0 = Some(y);
                self.q = sample.split.q;
                y
            }
        };
        let (besov_weighted, hn) = self.x.update(beta, t)?;
        let x = self.x.sup;
        let ratio = ratio_or_zero(x, y0 + (self.q + x).powi(2));
        self.rows.push(BootstrapRow { t, besov_weighted, hn, x, ratio });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epsolver::{run_experiment, DataSpec};
    use crate::spectral::grid::Grid3;

    #[test]
    fn growth_compares_halves() {
        assert_eq!(growth(&[2.0, 1.0, 1.0, 0.5]), 0.5);
        assert_eq!(growth(&[0.0, 0.0]), 1.0);
        assert!(growth(&[0.0, 1.0]).is_infinite());
    }

    #[test]
    fn zero_data_gives_zero_ratios() {
        let g = Grid3::new(8, 16.0).unwrap();
        let mut run = RunSpec::new(g, DataSpec::gaussian(0.0, 1.5), 0.05, 1.0);
        run.norms.clear();
        let mut c = ControlDsObserver::new(&run, 0.25, 0.005).unwrap();
        let mut b = BootstrapObserver::new(&run, 0.25, 50.0).unwrap();
        run_experiment(&run, &mut [&mut c, &mut b]).unwrap();
        let (c, b) = (c.finish(), b.finish().unwrap());
        assert_eq!(c.rows.len(), 5);
        assert!(c.rows.iter().all(|r| r.high == 0.0 && r.low == 0.0));
        assert!(b.rows.iter().all(|r| r.x == 0.0 && r.ratio == 0.0));
        assert!(c.pass() && b.pass());
    }

    #[test]
    fn scatter_pairs_double() {
        let g = Grid3::new(8, 16.0).unwrap();
        let run = RunSpec::new(g, DataSpec::gaussian(1e-3, 1.5), 0.05, 2.0);
        let s = ScatterObserver::new(&run, 0.25, 2).unwrap();
        assert_eq!(s.pairs, vec![(5, 10), (7, 14), (10, 20), (14, 28), (20, 40)]);
        assert!(ScatterObserver::new(&run, 1.0, 1).is_err());
    }
}
