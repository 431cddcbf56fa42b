use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{EpError, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SeriesMeta {
    pub dims: usize,
    pub box_length: f64,
    pub family: String,
    pub delta: f64,
    pub q: f64,
    pub q_tilde: f64,
}

/// Time-stamped records `(time, name, value)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecaySeries {
    pub meta: SeriesMeta,
    records: Vec<(f64, String, f64)>,
    last: BTreeMap<String, f64>,
}

impl DecaySeries {
    pub fn new(meta: SeriesMeta) -> Self {
        DecaySeries { meta, records: Vec::new(), last: BTreeMap::new() }
    }

    /// Append a record; times must increase strictly for each name.
    pub fn push(&mut self, time: f64, name: &str, value: f64) -> Result<()> {
        if !time.is_finite() {
            return Err(EpError::Precondition(format!("non-finite time for `{name}`")));
        }
        if let Some(&prev) = self.last.get(name) {
            if time <= prev {
                return Err(EpError::Precondition(format!(
                    "series `{name}`: time {time} does not follow {prev}"
                )));
            }
        }
        self.last.insert(name.to_string(), time);
        self.records.push((time, name.to_string(), value));
        Ok(())
    }

    pub fn records(&self) -> &[(f64, String, f64)] {
        &self.records
    }

    pub fn names(&self) -> Vec<String> {
        self.last.keys().cloned().collect()
    }

    /// `(time, value)` pairs recorded under `name`.
    pub fn values(&self, name: &str) -> Vec<(f64, f64)> {
        self.records
            .iter()
            .filter(|(_, n, _)| n == name)
            .map(|&(t, _, v)| (t, v))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// CSV body with header `time,name,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,name,value\n");
        for (t, n, v) in &self.records {
            let _ = writeln!(out, "{t},{n},{v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_increasing_times() {
        let mut s = DecaySeries::default();
        s.push(0.0, "a", 1.0).unwrap();
        s.push(0.0, "b", 2.0).unwrap();
        assert!(s.push(0.0, "a", 1.0).is_err());
        s.push(0.5, "a", 3.0).unwrap();
        assert_eq!(s.values("a"), vec![(0.0, 1.0), (0.5, 3.0)]);
        assert_eq!(s.to_csv(), "time,name,value\n0,a,1\n0,b,2\n0.5,a,3\n");
    }
}
