//! Monitored-structure responses: closed-form multi-harmonic displacement
//! signals and time-integrated N-DOF shear-chain responses under sampled
//! force excitation with damage injection.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::sym_tridiag_eigenvalues;
use crate::ode::{Dopri5, IntegratorConfig};
use crate::rng::Rng;
use crate::trace::SignalTrace;

/// Superposition of up to five sine components. Amplitudes are in
/// millimeters (the human-entry unit); the synthesized trace is in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpec {
    /// `(amplitude_mm, frequency_hz)` pairs.
    pub components: Vec<(f64, f64)>,
    pub duration: f64,
    pub sample_rate: f64,
}

impl HarmonicSpec {
    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() || self.components.len() > 5 {
            return Err(Error::Domain(String::from(
                "harmonic spec takes 1 to 5 components",
            )));
        }
        let mut max_f = 0.0f64;
        for &(a, f) in &self.components {
            if a < 0.0 || !a.is_finite() {
                return Err(Error::Domain(String::from("amplitudes must be >= 0")));
            }
            if !(f > 0.0) {
                return Err(Error::Domain(String::from("frequencies must be positive")));
            }
            max_f = max_f.max(f);
        }
        if !(self.duration > 0.0) || !(self.sample_rate > 0.0) {
            return Err(Error::Domain(String::from(
                "duration and sample rate must be positive",
            )));
        }
        if self.sample_rate <= 2.0 * max_f {
            return Err(Error::Domain(format!(
                "sample rate {} Hz violates the Nyquist bound for {} Hz content",
                self.sample_rate, max_f
            )));
        }
        Ok(())
    }
}

/// `Disp(t) = sum_i A_i sin(2 pi f_i t)`, sampled at `sample_rate` over
/// `[0, duration]`. Deterministic; output in meters.
pub fn synthesize_harmonic(spec: &HarmonicSpec) -> Result<SignalTrace> {
    spec.validate()?;
    let dt = 1.0 / spec.sample_rate;
    let n = (spec.duration * spec.sample_rate).floor() as usize + 1;
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let t = k as f64 * dt;
        let mut v = 0.0;
        for &(a_mm, f) in &spec.components {
            v += a_mm * 1e-3 * (2.0 * PI * f * t).sin();
        }
        samples.push(v);
    }
    SignalTrace::new(dt, samples, "synthesized displacement")
}

/// One scheduled stiffness change: at `time`, spring `spring` switches to
/// `stiffness`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DamageEvent {
    pub time: f64,
    pub spring: usize,
    pub stiffness: f64,
}

/// Shear chain: spring and damper `i` connect mass `i` to mass `i-1`
/// (mass 0 to ground).
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralModel {
    pub masses: Vec<f64>,
    pub stiffnesses: Vec<f64>,
    pub dampers: Vec<f64>,
    pub damage_schedule: Vec<DamageEvent>,
}

impl StructuralModel {
    pub fn new(masses: Vec<f64>, stiffnesses: Vec<f64>, dampers: Vec<f64>) -> Result<Self> {
        let model = StructuralModel {
            masses,
            stiffnesses,
            dampers,
            damage_schedule: Vec::new(),
        };
        model.validate()?;
        Ok(model)
    }

    /// Uniform chain of `n` equal masses, springs and dampers.
    pub fn uniform(n: usize, mass: f64, stiffness: f64, damper: f64) -> Result<Self> {
        StructuralModel::new(vec![mass; n], vec![stiffness; n], vec![damper; n])
    }

    pub fn n_dof(&self) -> usize {
        self.masses.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.masses.len();
        if n == 0 {
            return Err(Error::Domain(String::from("model needs at least one mass")));
        }
        if self.stiffnesses.len() != n || self.dampers.len() != n {
            return Err(Error::Domain(String::from(
                "masses, stiffnesses and dampers must have equal length",
            )));
        }
        if self.masses.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::Domain(String::from("masses must be positive")));
        }
        if self.stiffnesses.iter().any(|&k| !(k > 0.0)) {
            return Err(Error::Domain(String::from("stiffnesses must be positive")));
        }
        if self.dampers.iter().any(|&c| c < 0.0 || !c.is_finite()) {
            return Err(Error::Domain(String::from("dampers must be >= 0")));
        }
        for w in self.damage_schedule.windows(2) {
            if w[1].time < w[0].time {
                return Err(Error::Domain(String::from(
                    "damage events must be time-sorted",
                )));
            }
        }
        for ev in &self.damage_schedule {
            if ev.spring >= n {
                return Err(Error::Domain(format!(
                    "damage event spring index {} out of range",
                    ev.spring
                )));
            }
            if !(ev.stiffness > 0.0) {
                return Err(Error::Domain(String::from(
                    "damage stiffness must be positive",
                )));
            }
        }
        Ok(())
    }

    /// Copy with every spring scaled by `1 - damage` (uniform global
    /// damage).
    pub fn with_uniform_damage(&self, damage: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&damage) {
            return Err(Error::Domain(String::from("damage fraction must be in [0, 1)")));
        }
        let mut m = self.clone();
        for k in &mut m.stiffnesses {
            *k *= 1.0 - damage;
        }
        m.validate()?;
        Ok(m)
    }
}

/// Undamped natural frequencies (Hz, ascending) of the shear chain,
/// from the symmetric generalized eigenproblem reduced to tridiagonal form
/// by mass scaling.
pub fn eigenfrequencies(model: &StructuralModel) -> Result<Vec<f64>> {
    model.validate()?;
    let n = model.n_dof();
    let k = &model.stiffnesses;
    let m = &model.masses;
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let kk = k[i] + if i + 1 < n { k[i + 1] } else { 0.0 };
        diag.push(kk / m[i]);
        if i + 1 < n {
            off.push(-k[i + 1] / (m[i] * m[i + 1]).sqrt());
        }
    }
    let lambda = sym_tridiag_eigenvalues(&diag, &off)?;
    if lambda.iter().any(|&l| l <= 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(lambda.iter().map(|&l| l.sqrt() / (2.0 * PI)).collect())
}

/// Gaussian white-noise force: i.i.d. N(0, std^2) samples at `rate`,
/// zero-order-hold semantics, fully determined by `seed`.
pub fn white_noise(std: f64, duration: f64, rate: f64, seed: u64) -> Result<SignalTrace> {
    if !(rate > 0.0) || !(duration > 0.0) {
        return Err(Error::Domain(String::from(
            "noise duration and rate must be positive",
        )));
    }
    if std < 0.0 || !std.is_finite() {
        return Err(Error::Domain(String::from("noise std must be >= 0")));
    }
    let n = (duration * rate).round() as usize;
    if n == 0 {
        return Err(Error::Domain(String::from("noise trace would be empty")));
    }
    let mut rng = Rng::new(seed);
    let samples = (0..n).map(|_| std * rng.standard_normal()).collect();
    SignalTrace::new(1.0 / rate, samples, "white-noise force")
}

fn shear_accel(
    masses: &[f64],
    springs: &[f64],
    dampers: &[f64],
    force_on_first: f64,
    x: &[f64],
    v: &[f64],
    out: &mut [f64],
) {
    let n = masses.len();
    for i in 0..n {
        // spring/damper to the mass below (ground for i = 0)
        let below_x = if i == 0 { 0.0 } else { x[i - 1] };
        let below_v = if i == 0 { 0.0 } else { v[i - 1] };
        let mut f = -springs[i] * (x[i] - below_x) - dampers[i] * (v[i] - below_v);
        // spring/damper to the mass above
        if i + 1 < n {
            f += springs[i + 1] * (x[i + 1] - x[i]) + dampers[i + 1] * (v[i + 1] - v[i]);
        }
        if i == 0 {
            f += force_on_first;
        }
        out[i] = f / masses[i];
    }
}

/// Integrate `M x'' + C x' + K x = F(t)` with zero initial conditions.
///
/// The excitation is a force on mass 0, zero-order-hold between its
/// samples. Damage events apply stiffness changes exactly at their event
/// time by restarting the step there. Returns one displacement trace per
/// DOF, sampled on the excitation grid.
pub fn simulate(
    model: &StructuralModel,
    excitation: &SignalTrace,
    cfg: &IntegratorConfig,
) -> Result<Vec<SignalTrace>> {
    model.validate()?;
    let n = model.n_dof();
    let dt = excitation.dt;
    let n_samples = excitation.len();
    let mut springs = model.stiffnesses.clone();
    let mut schedule = model.damage_schedule.clone();
    schedule.sort_by(|a, b| a.time.partial_cmp(&b.time).expect("finite event times"));
    let mut next_event = 0usize;

    let mut state = vec![0.0; 2 * n];
    let mut solver = Dopri5::new(*cfg, 2 * n);
    let mut outputs = vec![Vec::with_capacity(n_samples); n];

    for k in 0..n_samples {
        for (dof, out) in outputs.iter_mut().enumerate() {
            out.push(state[dof]);
        }
        if k + 1 == n_samples {
            break;
        }
        let t0 = k as f64 * dt;
        let t1 = (k + 1) as f64 * dt;
        let force = excitation.samples[k];
        // split the segment at damage events
        let mut t_cur = t0;
        loop {
            let t_stop = if next_event < schedule.len() && schedule[next_event].time < t1 {
                schedule[next_event].time.max(t_cur)
            } else {
                t1
            };
            if t_stop > t_cur {
                let masses = &model.masses;
                let dampers = &model.dampers;
                let springs_now = springs.clone();
                solver.advance(
                    |_t, y, dy| {
                        let (x, v) = y.split_at(n);
                        let (dx, dv) = dy.split_at_mut(n);
                        dx.copy_from_slice(v);
                        shear_accel(masses, &springs_now, dampers, force, x, v, dv);
                    },
                    t_cur,
                    t_stop,
                    &mut state,
                )?;
                t_cur = t_stop;
            }
            if next_event < schedule.len() && schedule[next_event].time <= t_cur + 1e-15 {
                let ev = schedule[next_event];
                springs[ev.spring] = ev.stiffness;
                next_event += 1;
                continue;
            }
            if t_cur >= t1 {
                break;
            }
        }
    }

    outputs
        .into_iter()
        .enumerate()
        .map(|(dof, samples)| SignalTrace::new(dt, samples, format!("mass {} displacement", dof + 1)))
        .collect()
}

/// Total mechanical energy of a state snapshot (for conservation checks).
pub fn mechanical_energy(model: &StructuralModel, x: &[f64], v: &[f64]) -> f64 {
    let n = model.n_dof();
    let mut e = 0.0;
    for i in 0..n {
        e += 0.5 * model.masses[i] * v[i] * v[i];
        let below = if i == 0 { 0.0 } else { x[i - 1] };
        let stretch = x[i] - below;
        e += 0.5 * model.stiffnesses[i] * stretch * stretch;
    }
    e
}

/// The three-case multi-harmonic reference excitations (healthy, damaged)
/// used throughout the examples and acceptance runs.
pub fn reference_case(case: usize, duration: f64, sample_rate: f64) -> Result<(HarmonicSpec, HarmonicSpec)> {
    let (amps, healthy, damaged): ([f64; 5], [f64; 5], [f64; 5]) = match case {
        1 => (
            [1.10, 0.13, 0.05, 0.02, 0.01],
            [23.71, 45.16, 68.97, 91.33, 115.16],
            [22.41, 44.82, 67.27, 89.69, 112.09],
        ),
        2 => (
            [1.16, 1.04, 0.29, 0.03, 0.02],
            [23.65, 25.34, 50.77, 91.69, 135.49],
            [22.46, 24.63, 49.28, 90.60, 133.11],
        ),
        3 => (
            [0.12, 0.26, 0.53, 1.03, 0.15],
            [23.74, 68.39, 82.50, 91.87, 154.61],
            [22.48, 67.99, 80.12, 90.33, 150.66],
        ),
        _ => return Err(Error::Domain(String::from("reference cases are 1, 2, 3"))),
    };
    let spec = |freqs: [f64; 5]| HarmonicSpec {
        components: amps.iter().copied().zip(freqs).collect(),
        duration,
        sample_rate,
    };
    Ok((spec(healthy), spec(damaged)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sine_quarter_period() {
        let spec = HarmonicSpec {
            components: vec![(1.0, 1.0)],
            duration: 1.0,
            sample_rate: 100.0,
        };
        let tr = synthesize_harmonic(&spec).unwrap();
        // t = 0.25 s -> sin(pi/2) = 1 mm
        assert!((tr.value_at(0.25) - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn nyquist_violation_rejected() {
        let spec = HarmonicSpec {
            components: vec![(1.0, 60.0)],
            duration: 1.0,
            sample_rate: 100.0,
        };
        assert!(matches!(synthesize_harmonic(&spec), Err(Error::Domain(_))));
    }

    #[test]
    fn damaged_case1_spectrum_peaks_at_shifted_fundamental() {
        let (_, damaged) = reference_case(1, 20.0, 1000.0).unwrap();
        let tr = synthesize_harmonic(&damaged).unwrap();
        // DFT-magnitude oracle over 20-25 Hz at 0.01 Hz steps
        let mut best = (0.0, 0.0);
        let n = tr.len() as f64;
        let mut f = 20.0;
        while f <= 25.0 {
            let (mut re, mut im) = (0.0, 0.0);
            for (k, &v) in tr.samples.iter().enumerate() {
                let arg = 2.0 * PI * f * k as f64 * tr.dt;
                re += v * arg.cos();
                im -= v * arg.sin();
            }
            let mag = (re * re + im * im).sqrt() / n;
            if mag > best.1 {
                best = (f, mag);
            }
            f += 0.01;
        }
        assert!((best.0 - 22.41).abs() < 0.05, "peak at {}", best.0);
    }

    #[test]
    fn six_dof_reference_eigenfrequencies() {
        let healthy = StructuralModel::uniform(6, 50.0, 1.89e7, 10.0).unwrap();
        let f = eigenfrequencies(&healthy).unwrap();
        assert!((f[0] - 23.6).abs() < 0.1, "f1 = {}", f[0]);
        let damaged = StructuralModel::uniform(6, 50.0, 1.70e7, 10.0).unwrap();
        let fd = eigenfrequencies(&damaged).unwrap();
        assert!((fd[0] - 22.4).abs() < 0.1, "f1 = {}", fd[0]);
        // closed form for the uniform fixed-free chain
        for (j, &fj) in f.iter().enumerate() {
            let expect = (1.89e7f64 / 50.0).sqrt() / PI
                * ((2 * (j + 1) - 1) as f64 * PI / 26.0).sin();
            assert!((fj - expect).abs() < 1e-9 * expect.max(1.0), "{fj} vs {expect}");
        }
    }

    #[test]
    fn single_dof_eigenfrequency() {
        let m = StructuralModel::uniform(1, 1.0, 4.0 * PI * PI, 0.0).unwrap();
        let f = eigenfrequencies(&m).unwrap();
        assert!((f[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn damage_lowers_first_frequency() {
        let base = StructuralModel::uniform(6, 50.0, 1.89e7, 10.0).unwrap();
        let f0 = eigenfrequencies(&base).unwrap()[0];
        for spring in 0..6 {
            let mut m = base.clone();
            m.stiffnesses[spring] *= 0.9;
            let f1 = eigenfrequencies(&m).unwrap()[0];
            assert!(f1 < f0, "spring {spring}: {f1} !< {f0}");
        }
    }

    #[test]
    fn zero_excitation_stays_at_rest() {
        let model = StructuralModel::uniform(3, 1.0, 100.0, 0.5).unwrap();
        let exc = SignalTrace::new(1e-3, vec![0.0; 1001], "f").unwrap();
        let out = simulate(&model, &exc, &IntegratorConfig::default()).unwrap();
        for tr in out {
            assert!(tr.samples.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn unit_step_long_time_mean_is_static_deflection() {
        // 1-DOF, m = 1, k = (2pi)^2, c = 0, F = 1 N step: x oscillates
        // around 1/k; the mean over whole periods equals 1/k.
        let k = 4.0 * PI * PI;
        let model = StructuralModel::uniform(1, 1.0, k, 0.0).unwrap();
        let exc = SignalTrace::new(1e-3, vec![1.0; 10_001], "f").unwrap(); // 10 s = 10 periods
        let out = simulate(&model, &exc, &IntegratorConfig::default()).unwrap();
        let mean: f64 =
            out[0].samples.iter().take(10_000).sum::<f64>() / 10_000.0; // integer periods
        assert!(
            (mean - 1.0 / k).abs() < 2e-5 / k,
            "mean {mean} vs {}",
            1.0 / k
        );
    }

    #[test]
    fn white_noise_contract() {
        let zero = white_noise(0.0, 1.0, 100.0, 9).unwrap();
        assert!(zero.samples.iter().all(|&v| v == 0.0));
        let a = white_noise(1000.0, 1.0, 1000.0, 1234).unwrap();
        let b = white_noise(1000.0, 1.0, 1000.0, 1234).unwrap();
        assert_eq!(a, b);
        let big = white_noise(1000.0, 1000.0, 1000.0, 5).unwrap();
        let n = big.len() as f64;
        let mean = big.samples.iter().sum::<f64>() / n;
        let std = (big.samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
        assert!((std - 1000.0).abs() < 5.0, "std {std}");
    }

    #[test]
    fn linearity_of_response() {
        let model = StructuralModel::uniform(3, 2.0, 5000.0, 1.0).unwrap();
        let exc = white_noise(100.0, 1.0, 500.0, 77).unwrap();
        let mut doubled = exc.clone();
        for v in &mut doubled.samples {
            *v *= 2.0;
        }
        let tight = IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-16,
            ..Default::default()
        };
        let a = simulate(&model, &exc, &tight).unwrap();
        let b = simulate(&model, &doubled, &tight).unwrap();
        for (ta, tb) in a.iter().zip(&b) {
            for (&va, &vb) in ta.samples.iter().zip(&tb.samples) {
                if va.abs() > 1e-12 {
                    assert!((vb - 2.0 * va).abs() <= 1e-9 * vb.abs().max(1e-9));
                }
            }
        }
    }

    #[test]
    fn energy_conserved_after_forcing_stops() {
        // force pulse for 1 s, then free undamped vibration for 10 s
        let model = StructuralModel::uniform(3, 1.0, 2500.0, 0.0).unwrap();
        let mut samples = vec![5.0; 1000];
        samples.extend(vec![0.0; 10_000]);
        let exc = SignalTrace::new(1e-3, samples, "pulse").unwrap();
        let tight = IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-14,
            ..Default::default()
        };
        let out = simulate(&model, &exc, &tight).unwrap();
        // reconstruct velocities by central differences for the energy check
        let energy_at = |k: usize| {
            let x: Vec<f64> = out.iter().map(|tr| tr.samples[k]).collect();
            let v: Vec<f64> = out
                .iter()
                .map(|tr| (tr.samples[k + 1] - tr.samples[k - 1]) / (2.0 * exc.dt))
                .collect();
            mechanical_energy(&model, &x, &v)
        };
        let e1 = energy_at(2000);
        let e2 = energy_at(10_500);
        // central differencing limits the comparison, not the integrator;
        // with 1 kHz sampling of ~8-25 Hz modes the velocity error is ~1e-3
        assert!(
            ((e2 - e1) / e1).abs() < 5e-3,
            "energy drift {} -> {}",
            e1,
            e2
        );
    }

    #[test]
    fn damage_event_applies_at_event_time() {
        let mut model = StructuralModel::uniform(1, 1.0, 4.0 * PI * PI, 0.1).unwrap();
        model.damage_schedule.push(DamageEvent {
            time: 0.5,
            spring: 0,
            stiffness: PI * PI, // half the natural frequency
        });
        let exc = SignalTrace::new(1e-3, vec![1.0; 2001], "step").unwrap();
        let out = simulate(&model, &exc, &IntegratorConfig::default()).unwrap();
        // static deflection quadruples after the event; mean of the tail
        // oscillates around 1/k_new
        let tail_mean: f64 = out[0].samples[1500..].iter().sum::<f64>() / 501.0;
        assert!(
            (tail_mean - 1.0 / (PI * PI)).abs() < 0.3 / (PI * PI),
            "tail mean {tail_mean}"
        );
    }
}
