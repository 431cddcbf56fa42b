use serde::Serialize;

/// A labelled sample location, enough to re-evaluate the monitored ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub label: String,
    pub coords: Vec<f64>,
}

impl ScanPoint {
    pub fn new(label: impl Into<String>, coords: Vec<f64>) -> Self {
        ScanPoint { label: label.into(), coords }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Threshold {
    /// Pass when the minimum is at least the value.
    AtLeast(f64),
    /// Pass when the maximum is at most the value.
    AtMost(f64),
    /// Pass when every sample is finite.
    Finite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub quantity: String,
    pub samples: usize,
    pub non_finite: usize,
    pub min: f64,
    pub argmin: Option<ScanPoint>,
    pub max: f64,
    pub argmax: Option<ScanPoint>,
    pub threshold: Threshold,
    pub pass: bool,
}

/// Running min/max over a scan.
#[derive(Debug, Clone)]
pub struct ScanBuilder {
    quantity: String,
    samples: usize,
    non_finite: usize,
    min: f64,
    argmin: Option<ScanPoint>,
    max: f64,
    argmax: Option<ScanPoint>,
}

impl ScanBuilder {
    pub fn new(quantity: impl Into<String>) -> Self {
        ScanBuilder {
            quantity: quantity.into(),
            samples: 0,
            non_finite: 0,
            min: f64::INFINITY,
            argmin: None,
            max: f64::NEG_INFINITY,
            argmax: None,
        }
    }

    /// Record one value; `point` is only built when it becomes an extremum.
    pub fn observe(&mut self, value: f64, point: impl FnOnce() -> ScanPoint) {
        self.samples += 1;
        if !value.is_finite() {
            self.non_finite += 1;
            return;
        }
        let new_min = value < self.min;
        let new_max = value > self.max;
        if new_min || new_max {
            let p = point();
            if new_min {
                self.min = value;
                self.argmin = Some(p.clone());
            }
            if new_max {
                self.max = value;
                self.argmax = Some(p);
            }
        }
    }

    pub fn merge(&mut self, other: ScanBuilder) {
        self.samples += other.samples;
        self.non_finite += other.non_finite;
        if other.min < self.min {
            self.min = other.min;
            self.argmin = other.argmin;
        }
        if other.max > self.max {
            self.max = other.max;
            self.argmax = other.argmax;
        }
    }

    pub fn finish(self, threshold: Threshold) -> ScanReport {
        let seen = self.samples > self.non_finite;
        let finite = self.non_finite == 0 && seen;
        let pass = finite
            && match threshold {
                Threshold::AtLeast(v) => self.min >= v,
                Threshold::AtMost(v) => self.max <= v,
                Threshold::Finite => true,
            };
        let (min, max) = if seen { (self.min, self.max) } else { (f64::NAN, f64::NAN) };
        ScanReport {
            quantity: self.quantity,
            samples: self.samples,
            non_finite: self.non_finite,
            min,
            argmin: self.argmin,
            max,
            argmax: self.argmax,
            threshold,
            pass,
        }
    }
}
