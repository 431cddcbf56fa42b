use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::bulk::{radial_besov_norm, radial_l2_plancherel, radial_lp_norm, RadialQuantity};
use super::fit::{fit_decay_exponent, FitResult};
use super::profile::RadialProfile;
use super::quadrature::{kg_propagate_radial, RADIAL_CONSTANT};
use crate::epsolver::{DecaySeries, SeriesMeta};
use crate::error::{EpError, Result};
use crate::spectral::grid::bracket_scalar;

/// Decay measurements for one radial profile.
#[derive(Debug, Clone)]
pub struct LinDecayReport {
    /// Records `besov` (`B⁰_{p,2}`), `l2` (spatial quadrature) and `center` (`|u(t,0)|`).
    pub series: DecaySeries,
    pub p: f64,
    pub besov_fit: FitResult,
    pub center_fit: FitResult,
    pub l2_plancherel: f64,
    /// `max_t |‖u(t)‖_{L²} / ‖f‖_{L²} - 1|`.
    pub l2_max_rel_dev: f64,
}

pub fn lindecay(prof: &RadialProfile, times: &[f64], p: f64, window: (f64, f64)) -> Result<LinDecayReport> {
    if !(p >= 2.0) {
        return Err(EpError::Precondition(format!("decay exponent needs p ≥ 2, got {p}")));
    }
    let mut series = DecaySeries::new(SeriesMeta { family: prof.name().to_string(), ..Default::default() });
    let l2_ref = radial_l2_plancherel(prof);
    let mut dev = 0.0f64;
    for &t in times {
        let b = radial_besov_norm(prof, t, p, RadialQuantity::Value)?;
        let l2 = radial_lp_norm(prof, t, 2.0, RadialQuantity::Value)?;
        let c = kg_propagate_radial(prof, t, 0.0)?.norm();
        dev = dev.max((l2 / l2_ref - 1.0).abs());
        series.push(t, "besov", b)?;
        series.push(t, "l2", l2)?;
        series.push(t, "center", c)?;
    }
    Ok(LinDecayReport {
        besov_fit: fit_decay_exponent(&series, "besov", window)?,
        center_fit: fit_decay_exponent(&series, "center", window)?,
        series,
        p,
        l2_plancherel: l2_ref,
        l2_max_rel_dev: dev,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BdChiForm {
    /// `‖e^{it⟨∇⟩}χ^Q‖_{B⁰_{p,2}}`, `2 ≤ p < 3`.
    Plain,
    /// `‖∇e^{it⟨∇⟩}χ^Q‖_{B⁰_{p,2}}`, `2 ≤ p < ∞`.
    Gradient,
}

impl fmt::Display for BdChiForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BdChiForm::Plain => "plain",
            BdChiForm::Gradient => "gradient",
        })
    }
}

impl FromStr for BdChiForm {
    type Err = EpError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(BdChiForm::Plain),
            "gradient" => Ok(BdChiForm::Gradient),
            _ => Err(EpError::Config(format!("unknown bound form `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BdChiRow {
    pub t: f64,
    pub p: f64,
    pub form: BdChiForm,
    pub norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BdChiSup {
    pub p: f64,
    pub form: BdChiForm,
    pub sup_ratio: f64,
    pub at_time: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BdChiReport {
    pub q: f64,
    pub rows: Vec<BdChiRow>,
    pub sups: Vec<BdChiSup>,
    pub n_deriv: f64,
    /// `‖χ^Q‖_{H^N}/Q`; the free flow preserves `H^N`, so one value covers all `t`.
    pub hn_ratio: f64,
}

fn hn_norm(prof: &RadialProfile, n_deriv: f64) -> f64 {
    let n = 20_000;
    let h = prof.k_max() / n as f64;
    let mut acc = 0.0;
    for i in 1..n {
        let k = i as f64 * h;
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * bracket_scalar(k).powf(2.0 * n_deriv) * prof.eval(k).powi(2) * k * k;
    }
    (acc * h / 3.0 * RADIAL_CONSTANT).sqrt()
}

/// `Q = ‖P_{≤1}(ρ₀-1)‖_{L¹(ℝ³)}` from the profile of `P_{≤1}(ρ₀-1)`.
pub fn charge_l1(low_density: &RadialProfile) -> Result<f64> {
    radial_lp_norm(low_density, 0.0, 1.0, RadialQuantity::Value)
}

/// Ratios `norm·(1+t)^{3/2(1-2/p)}/Q` for each `(p, form)` and time.
pub fn verify_bdchi(
    chi_q: &RadialProfile,
    q: f64,
    times: &[f64],
    entries: &[(f64, BdChiForm)],
    n_deriv: f64,
) -> Result<BdChiReport> {
    if chi_q.k_max() > 2.0 {
        return Err(EpError::Precondition(format!(
            "charged part must live in |ξ| ≤ 2, profile reaches {}",
            chi_q.k_max()
        )));
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(EpError::Precondition(format!("charge Q = {q} must be positive")));
    }
    for &(p, form) in entries {
        let ok = match form {
            BdChiForm::Plain => (2.0..3.0).contains(&p),
            BdChiForm::Gradient => p >= 2.0 && p.is_finite(),
        };
        if !ok {
            return Err(EpError::Precondition(format!("p = {p} outside the range of the {form} bound")));
        }
    }
    let mut rows = Vec::new();
    let mut sups = Vec::new();
    for &(p, form) in entries {
        let quantity = match form {
            BdChiForm::Plain => RadialQuantity::Value,
            BdChiForm::Gradient => RadialQuantity::RadialDerivative,
        };
        let exponent = 1.5 * (1.0 - 2.0 / p);
        let mut best = BdChiSup { p, form, sup_ratio: 0.0, at_time: f64::NAN };
        for &t in times {
            let norm = radial_besov_norm(chi_q, t, p, quantity)?;
            let ratio = norm * (1.0 + t).powf(exponent) / q;
            if ratio > best.sup_ratio || best.at_time.is_nan() {
                best.sup_ratio = ratio;
                best.at_time = t;
            }
            rows.push(BdChiRow { t, p, form, norm, ratio });
        }
        sups.push(best);
    }
    Ok(BdChiReport { q, rows, sups, n_deriv, hn_ratio: hn_norm(chi_q, n_deriv) / q })
}
