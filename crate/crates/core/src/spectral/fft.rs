//! Three-dimensional complex FFT assembled from one-dimensional `rustfft` passes.
//!
//! Forward transforms divide by the total number of modes, so a constant field
//! `1` maps to a unit amplitude at `ξ = 0`; the inverse is unnormalized.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();

/// Shared plan for an `n³` grid.
pub fn plan(n: usize) -> Arc<Fft3> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Fft3 {
                n,
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl Fft3 {
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &*self.forward);
        let scale = 1.0 / data.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &*self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "buffer does not match plan size");
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];

        // last axis: contiguous lines
        fft.process_with_scratch(data, &mut scratch);

        // middle axis: gather each (i, ·, k) line
        let mut line = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let plane = &mut data[i * n * n..(i + 1) * n * n];
            for k in 0..n {
                for j in 0..n {
                    line[k * n + j] = plane[j * n + k];
                }
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for k in 0..n {
                for j in 0..n {
                    plane[j * n + k] = line[k * n + j];
                }
            }
        }

        // first axis: gather (·, j, k) lines for one j at a time
        for j in 0..n {
            for k in 0..n {
                for i in 0..n {
                    line[k * n + i] = data[(i * n + j) * n + k];
                }
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for k in 0..n {
                for i in 0..n {
                    data[(i * n + j) * n + k] = line[k * n + i];
                }
            }
        }
    }
}
