use serde::Serialize;

use crate::epsolver::DecaySeries;
use crate::error::{EpError, Result};

pub const MIN_FIT_SAMPLES: usize = 8;

/// Least-squares power law `value ≈ e^{intercept} (1+t)^{slope}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Fit `log v` against `log(1+t)` over the `(t, v)` pairs with `t` in `window`.
pub fn fit_power_law(points: &[(f64, f64)], window: (f64, f64)) -> Result<FitResult> {
    let (lo, hi) = window;
    if !(lo <= hi) {
        return Err(EpError::Fit(format!("empty window [{lo}, {hi}]")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(t, v) in points.iter().filter(|(t, _)| *t >= lo && *t <= hi) {
        if !(v > 0.0 && v.is_finite()) {
            return Err(EpError::Fit(format!("nonpositive value {v} at t = {t}")));
        }
        xs.push((1.0 + t).ln());
        ys.push(v.ln());
    }
    let n = xs.len();
    if n < MIN_FIT_SAMPLES {
        return Err(EpError::Fit(format!(
            "{n} samples in [{lo}, {hi}], need at least {MIN_FIT_SAMPLES}"
        )));
    }
    let (slope, intercept, stderr) = least_squares(&xs, &ys)?;
    Ok(FitResult { slope, intercept, stderr, window, samples: n })
}

/// Ordinary least squares `y ≈ intercept + slope·x`, returning
/// `(slope, intercept, stderr of slope)`; the error is NaN for two points.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return Err(EpError::Fit(format!("need at least two paired samples, got {n}")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(EpError::Fit("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = if n > 2 { (rss / (nf - 2.0) / sxx).sqrt() } else { f64::NAN };
    Ok((slope, intercept, stderr))
}

/// Fit the records stored under `name`.
pub fn fit_decay_exponent(series: &DecaySeries, name: &str, window: (f64, f64)) -> Result<FitResult> {
    let points = series.values(name);
    if points.is_empty() {
        return Err(EpError::Fit(format!("no records named `{name}`")));
    }
    fit_power_law(&points, window)
}

/// `count` times spaced evenly in `log(1+t)` over `[lo, hi]`.
pub fn log_spaced_times(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let a = (1.0 + lo).ln();
    let b = (1.0 + hi).ln();
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp() - 1.0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = log_spaced_times(10.0, 200.0, 12)
            .into_iter()
            .map(|t| (t, 3.0 * (1.0 + t).powf(-1.2)))
            .collect();
        let f = fit_power_law(&pts, (10.0, 200.0)).unwrap();
        assert!((f.slope + 1.2).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-11);
        assert!(f.stderr < 1e-12);
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let pts: Vec<_> = (0..10).map(|i| (i as f64, 2.5)).collect();
        let f = fit_power_law(&pts, (0.0, 9.0)).unwrap();
        assert!(f.slope.abs() < 1e-14);
    }

    #[test]
    fn rejects_short_or_nonpositive_series() {
        let pts: Vec<_> = (0..7).map(|i| (i as f64, 1.0)).collect();
        assert!(matches!(fit_power_law(&pts, (0.0, 10.0)), Err(EpError::Fit(_))));
        let mut pts: Vec<_> = (0..9).map(|i| (i as f64, 1.0)).collect();
        pts[3].1 = 0.0;
        assert!(fit_power_law(&pts, (0.0, 10.0)).is_err());
    }

    #[test]
    fn window_endpoints_are_exact() {
        let t = log_spaced_times(10.0, 200.0, 16);
        assert_eq!(t[0], 10.0);
        assert_eq!(t[15], 200.0);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
    }
}
