//! Uniformly sampled signals.

use alloc::string::String;
use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};

/// A uniformly sampled time series. `samples[k]` is the value at `t = k*dt`.
///
/// Displacements are in meters, forces in newtons, voltages in volts; the
/// `label` is a semantic tag for exports ("top-mass displacement", ...).
#[derive(Debug, Clone, PartialEq)]
pub struct SignalTrace {
    pub dt: f64,
    pub samples: Vec<f64>,
    pub label: String,
}

impl SignalTrace {
    pub fn new(dt: f64, samples: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Domain("trace dt must be positive".into()));
        }
        if samples.is_empty() {
            return Err(Error::Domain("trace must contain samples".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("trace samples must be finite".into()));
        }
        Ok(SignalTrace {
            dt,
            samples,
            label: label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time of the last sample.
    pub fn span(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.dt
    }

    /// Linear interpolation inside the trace, clamped at the ends.
    pub fn value_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.samples[0];
        }
        let pos = t / self.dt;
        let idx = pos.floor() as usize;
        if idx + 1 >= self.samples.len() {
            return *self.samples.last().expect("non-empty");
        }
        let frac = pos - idx as f64;
        self.samples[idx] * (1.0 - frac) + self.samples[idx + 1] * frac
    }

    /// Indices of the samples falling in `[t_start, t_end]`.
    pub fn window_indices(&self, t_start: f64, t_end: f64) -> Result<(usize, usize)> {
        if !(t_start < t_end) {
            return Err(Error::Domain("window start must precede end".into()));
        }
        if t_start < -1e-12 || t_end > self.span() + self.dt * 1e-9 {
            return Err(Error::Domain("window outside trace span".into()));
        }
        let first = (t_start / self.dt).ceil() as usize;
        let last = ((t_end / self.dt).floor() as usize).min(self.samples.len() - 1);
        if last < first + 1 {
            return Err(Error::Domain("window contains fewer than 2 samples".into()));
        }
        Ok((first, last))
    }
}
