//! Dormand-Prince 5(4) adaptive integrator.
//!
//! 5th-order solution with embedded 4th-order error estimation, FSAL. The
//! integrator advances between caller-chosen breakpoints (sample boundaries,
//! damage events) so the right-hand side is smooth within every step; the
//! accepted step size is carried across calls.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};

/// Tolerances and limits for a time integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Maximum accepted+rejected steps per `advance` call.
    pub max_steps: usize,
    pub h_max: Option<f64>,
    pub h_init: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-8,
            atol: 1e-10,
            max_steps: 1_000_000,
            h_max: None,
            h_init: None,
        }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
// embedded error weights (5th order minus 4th order)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrator state that persists across segment boundaries.
pub struct Dopri5 {
    cfg: IntegratorConfig,
    /// Preferred step size carried from the last accepted step.
    h: f64,
    k: [Vec<f64>; 7],
    y_stage: Vec<f64>,
}

impl Dopri5 {
    pub fn new(cfg: IntegratorConfig, dim: usize) -> Self {
        Dopri5 {
            cfg,
            h: 0.0,
            k: core::array::from_fn(|_| vec![0.0; dim]),
            y_stage: vec![0.0; dim],
        }
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.cfg
    }

    /// Advance `y` from `t0` to `t1` (`t1 > t0`), adapting the step size.
    /// `f(t, y, dydt)` must be smooth on the interval.
    pub fn advance<F>(&mut self, mut f: F, t0: f64, t1: f64, y: &mut [f64]) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let dim = y.len();
        debug_assert_eq!(self.y_stage.len(), dim);
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok(());
        }
        let mut h = if self.h > 0.0 { self.h } else { span };
        if let Some(h_max) = self.cfg.h_max {
            h = h.min(h_max);
        }
        if let Some(h0) = self.cfg.h_init {
            if self.h == 0.0 {
                h = h0;
            }
        }
        h = h.min(span);

        let mut t = t0;
        let mut steps = 0usize;
        // FSAL seed for the interval
        f(t, y, &mut self.k[0]);

        while t < t1 {
            steps += 1;
            if steps > self.cfg.max_steps {
                return Err(Error::IntegrationFailure {
                    t,
                    detail: String::from("step budget exhausted"),
                });
            }
            let h_floor = 16.0 * f64::EPSILON * t.abs().max(1.0);
            if h < h_floor {
                return Err(Error::IntegrationFailure {
                    t,
                    detail: String::from("step size underflow"),
                });
            }
            let last = h >= t1 - t;
            let hs = if last { t1 - t } else { h };

            // stages 2..6
            for i in 0..dim {
                self.y_stage[i] = y[i] + hs * A21 * self.k[0][i];
            }
            f(t + C2 * hs, &self.y_stage, &mut self.k[1]);
            for i in 0..dim {
                self.y_stage[i] = y[i] + hs * (A31 * self.k[0][i] + A32 * self.k[1][i]);
            }
            f(t + C3 * hs, &self.y_stage, &mut self.k[2]);
            for i in 0..dim {
                self.y_stage[i] =
                    y[i] + hs * (A41 * self.k[0][i] + A42 * self.k[1][i] + A43 * self.k[2][i]);
            }
            f(t + C4 * hs, &self.y_stage, &mut self.k[3]);
            for i in 0..dim {
                self.y_stage[i] = y[i]
                    + hs * (A51 * self.k[0][i]
                        + A52 * self.k[1][i]
                        + A53 * self.k[2][i]
                        + A54 * self.k[3][i]);
            }
            f(t + C5 * hs, &self.y_stage, &mut self.k[4]);
            for i in 0..dim {
                self.y_stage[i] = y[i]
                    + hs * (A61 * self.k[0][i]
                        + A62 * self.k[1][i]
                        + A63 * self.k[2][i]
                        + A64 * self.k[3][i]
                        + A65 * self.k[4][i]);
            }
            f(t + hs, &self.y_stage, &mut self.k[5]);
            // 5th-order solution
            for i in 0..dim {
                self.y_stage[i] = y[i]
                    + hs * (B1 * self.k[0][i]
                        + B3 * self.k[2][i]
                        + B4 * self.k[3][i]
                        + B5 * self.k[4][i]
                        + B6 * self.k[5][i]);
            }
            f(t + hs, &self.y_stage, &mut self.k[6]);

            // error norm
            let mut err_sq = 0.0;
            for i in 0..dim {
                let err = hs
                    * (E1 * self.k[0][i]
                        + E3 * self.k[2][i]
                        + E4 * self.k[3][i]
                        + E5 * self.k[4][i]
                        + E6 * self.k[5][i]
                        + E7 * self.k[6][i]);
                let scale = self.cfg.atol + self.cfg.rtol * y[i].abs().max(self.y_stage[i].abs());
                err_sq += (err / scale) * (err / scale);
            }
            let err_norm = (err_sq / dim as f64).sqrt();

            if err_norm <= 1.0 {
                t += hs;
                y.copy_from_slice(&self.y_stage);
                self.k.swap(0, 6); // FSAL
                let factor = if err_norm == 0.0 {
                    5.0
                } else {
                    (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = hs * factor;
                if let Some(h_max) = self.cfg.h_max {
                    h = h.min(h_max);
                }
            } else {
                let factor = (0.9 * err_norm.powf(-0.2)).clamp(0.2, 1.0);
                h = hs * factor;
            }
        }
        self.h = h;
        Ok(())
    }
}
