//! Steady-state transmittance of the finite chain and its band segmentation.
//!
//! The finite chain is driven by prescribed harmonic base motion through the
//! first inter-cell spring (support excitation): the base coordinate is
//! eliminated into an equivalent force `(k_p + i w c_p) W0` on the first
//! plate mass. The same mass/damping/stiffness assembly is reused by the
//! time-domain sensor runtime so both routes describe one structure.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lattice::LumpedChain;
use crate::linalg::solve_complex;

/// Which chain coordinate a response is read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    /// The prescribed base itself (identically 0 dB; a semantic reference).
    Base,
    /// Plate mass `i` (0-based from the driven end).
    Plate(usize),
    /// Resonator mass `i` (0-based from the driven end).
    Resonator(usize),
}

impl Probe {
    /// Default probe: the last resonator mass (the sensor's probe point at
    /// the top of the far cylinder).
    pub fn last_resonator(chain: &LumpedChain) -> Probe {
        Probe::Resonator(chain.n_cells - 1)
    }

    /// Coordinate index in the assembled system, if the probe is a solved
    /// coordinate.
    pub fn coordinate(&self, n_cells: usize) -> Result<Option<usize>> {
        match *self {
            Probe::Base => Ok(None),
            Probe::Plate(i) => {
                if i >= n_cells {
                    return Err(Error::Domain(String::from("probe plate index out of range")));
                }
                Ok(Some(i))
            }
            Probe::Resonator(i) => {
                if i >= n_cells {
                    return Err(Error::Domain(String::from(
                        "probe resonator index out of range",
                    )));
                }
                Ok(Some(n_cells + i))
            }
        }
    }
}

/// Assembled finite chain: diagonal mass, dense stiffness and damping over
/// the `2 n` coordinates `[u_0 .. u_{n-1}, v_0 .. v_{n-1}]` (plates, then
/// resonators).
#[derive(Debug, Clone)]
pub struct FiniteChain {
    pub n_cells: usize,
    pub mass: Vec<f64>,
    pub stiffness: Vec<f64>,
    pub damping: Vec<f64>,
    /// Stiffness-proportional damping coefficient `C = beta K`, anchored so
    /// the damping ratio equals the chain's `damping_ratio` at the local
    /// resonance frequency.
    pub beta: f64,
    /// Base-to-first-plate spring (equals the inter-cell stiffness).
    pub base_stiffness: f64,
}

impl FiniteChain {
    pub fn assemble(chain: &LumpedChain) -> FiniteChain {
        let n = chain.n_cells;
        let dim = 2 * n;
        let kp = chain.inter_cell_stiffness;
        let kr = chain.resonator_stiffness;
        let mut k = vec![0.0; dim * dim];
        let mut m = vec![0.0; dim];
        for i in 0..n {
            m[i] = chain.plate_mass;
            m[n + i] = chain.resonator_mass;
            // resonator attachment
            k[i * dim + i] += kr;
            k[i * dim + (n + i)] -= kr;
            k[(n + i) * dim + i] -= kr;
            k[(n + i) * dim + (n + i)] += kr;
        }
        // base spring on the driven plate
        k[0] += kp;
        // inter-cell springs
        for i in 0..n - 1 {
            k[i * dim + i] += kp;
            k[(i + 1) * dim + (i + 1)] += kp;
            k[i * dim + (i + 1)] -= kp;
            k[(i + 1) * dim + i] -= kp;
        }
        let omega_r = (chain.resonator_stiffness / chain.resonator_mass).sqrt();
        let beta = 2.0 * chain.damping_ratio / omega_r;
        let damping = k.iter().map(|v| beta * v).collect();
        FiniteChain {
            n_cells: n,
            mass: m,
            stiffness: k,
            damping,
            beta,
            base_stiffness: kp,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.n_cells
    }

    /// Solve `(K + i w C - w^2 M) X = F`.
    pub fn harmonic_response(&self, omega: f64, force: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = self.dim();
        debug_assert_eq!(force.len(), dim);
        let mut a = vec![Complex64::new(0.0, 0.0); dim * dim];
        for idx in 0..dim * dim {
            a[idx] = Complex64::new(self.stiffness[idx], omega * self.damping[idx]);
        }
        for i in 0..dim {
            a[i * dim + i] -= Complex64::new(omega * omega * self.mass[i], 0.0);
        }
        let mut x = force.to_vec();
        solve_complex(&mut a, &mut x, dim).map_err(|e| match e {
            Error::SingularSystem { .. } => Error::SingularSystem {
                freq_hz: omega / (2.0 * PI),
            },
            other => other,
        })?;
        Ok(x)
    }

    /// Equivalent force of prescribed base motion `W0 e^{iwt}` applied
    /// through the base spring and its damper.
    pub fn base_drive_force(&self, omega: f64, base_amplitude: f64) -> Vec<Complex64> {
        let mut f = vec![Complex64::new(0.0, 0.0); self.dim()];
        f[0] = Complex64::new(
            self.base_stiffness * base_amplitude,
            omega * self.beta * self.base_stiffness * base_amplitude,
        );
        f
    }
}

/// Transmittance curve `tau(f) = 20 log10(|X_probe| / W0)`, dB.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmittanceCurve {
    pub freq_hz: Vec<f64>,
    pub tau_db: Vec<f64>,
    /// Assembled coordinate index of the probe (`usize::MAX` for the base).
    pub probe_index: usize,
}

/// Default grid: 0.05 Hz spacing over [1, 200] Hz; resolves a ~1 Hz
/// transition zone with >20 points.
pub fn default_grid() -> Vec<f64> {
    grid(1.0, 200.0, 0.05)
}

/// Uniform grid from `start` to `stop` (inclusive within half a step).
pub fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 0.5).floor() as usize + 1;
    (0..n).map(|i| start + i as f64 * step).collect()
}

/// Complex transmission ratio `X_probe / W0` at a single frequency.
pub fn transmission_ratio(model: &FiniteChain, probe: Probe, freq_hz: f64) -> Result<Complex64> {
    let coord = probe.coordinate(model.n_cells)?;
    let omega = 2.0 * PI * freq_hz;
    match coord {
        None => Ok(Complex64::new(1.0, 0.0)),
        Some(c) => {
            let f = model.base_drive_force(omega, 1.0);
            let x = model.harmonic_response(omega, &f)?;
            Ok(x[c])
        }
    }
}

/// Transmittance at one frequency, dB.
pub fn frequency_response_at(chain: &LumpedChain, freq_hz: f64) -> Result<f64> {
    let model = FiniteChain::assemble(chain);
    let ratio = transmission_ratio(&model, Probe::last_resonator(chain), freq_hz)?;
    Ok(20.0 * ratio.norm().log10())
}

/// Sweep the transmittance over `freq_grid` with the default probe (last
/// resonator). `base_amplitude` scales the drive; the returned ratio is
/// amplitude-independent for this linear model.
pub fn frequency_response(
    chain: &LumpedChain,
    freq_grid: &[f64],
    base_amplitude: f64,
) -> Result<TransmittanceCurve> {
    frequency_response_probed(chain, freq_grid, base_amplitude, Probe::last_resonator(chain))
}

pub fn frequency_response_probed(
    chain: &LumpedChain,
    freq_grid: &[f64],
    base_amplitude: f64,
    probe: Probe,
) -> Result<TransmittanceCurve> {
    if freq_grid.len() < 2 {
        return Err(Error::Domain(String::from(
            "frequency grid needs at least 2 points",
        )));
    }
    if freq_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(String::from(
            "frequency grid must be strictly increasing",
        )));
    }
    if freq_grid[0] <= 0.0 {
        return Err(Error::Domain(String::from(
            "frequency grid must be positive",
        )));
    }
    if !(base_amplitude > 0.0) {
        return Err(Error::Domain(String::from(
            "base amplitude must be positive",
        )));
    }
    let model = FiniteChain::assemble(chain);
    let coord = probe.coordinate(chain.n_cells)?;
    let mut tau_db = Vec::with_capacity(freq_grid.len());
    for &f in freq_grid {
        let omega = 2.0 * PI * f;
        let value = match coord {
            None => 0.0,
            Some(c) => {
                let force = model.base_drive_force(omega, base_amplitude);
                let x = model.harmonic_response(omega, &force)?;
                20.0 * (x[c].norm() / base_amplitude).log10()
            }
        };
        if !value.is_finite() {
            return Err(Error::SingularSystem { freq_hz: f });
        }
        tau_db.push(value);
    }
    Ok(TransmittanceCurve {
        freq_hz: freq_grid.to_vec(),
        tau_db,
        probe_index: coord.unwrap_or(usize::MAX),
    })
}

/// Pass band / transition zone / attenuation band split of a transmittance
/// curve, Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSegmentation {
    /// Start of the contiguous `tau >= 0` region containing the pass-band
    /// maximum.
    pub f1: f64,
    /// End of the pass band: last grid point (at or after the maximum,
    /// before the zero crossing) where `tau >= peak - 3 dB`.
    pub f_d: f64,
    /// Start of the attenuation band: first grid point after the crossing
    /// with `tau <= -10 dB`.
    pub f_h: f64,
    /// End of the analysed band (grid end).
    pub f2: f64,
    /// Binary decision point: first downward zero crossing of `tau` after
    /// the pass-band maximum, linearly interpolated.
    pub bdp: f64,
}

/// Segment a transmittance curve around its binary decision point.
pub fn extract_bdp(curve: &TransmittanceCurve) -> Result<BandSegmentation> {
    let f = &curve.freq_hz;
    let tau = &curve.tau_db;
    if f.len() < 2 {
        return Err(Error::Domain(String::from("curve too short")));
    }
    // global pass-band maximum
    let mut i_peak = 0;
    for i in 1..tau.len() {
        if tau[i] > tau[i_peak] {
            i_peak = i;
        }
    }
    if tau[i_peak] <= 0.0 {
        return Err(Error::NoBdp(String::from(
            "curve never rises above 0 dB; no pass band",
        )));
    }
    // first downward zero crossing after the peak
    let mut crossing = None;
    for i in i_peak + 1..tau.len() {
        if tau[i - 1] >= 0.0 && tau[i] < 0.0 {
            crossing = Some(i);
            break;
        }
    }
    let i_cross = crossing.ok_or_else(|| {
        Error::NoBdp(String::from(
            "no downward zero crossing after the pass-band maximum",
        ))
    })?;
    let bdp = f[i_cross - 1]
        + (f[i_cross] - f[i_cross - 1]) * tau[i_cross - 1] / (tau[i_cross - 1] - tau[i_cross]);

    // pass band: contiguous tau >= 0 region around the peak
    let mut i1 = i_peak;
    while i1 > 0 && tau[i1 - 1] >= 0.0 {
        i1 -= 1;
    }
    // f_d: last point in [peak, crossing) still within 3 dB of the peak
    let threshold = tau[i_peak] - 3.0;
    let mut i_d = i_peak;
    for i in i_peak..i_cross {
        if tau[i] >= threshold {
            i_d = i;
        }
    }
    // f_h: first point at or after the crossing with tau <= -10 dB
    let mut i_h = None;
    for i in i_cross..tau.len() {
        if tau[i] <= -10.0 {
            i_h = Some(i);
            break;
        }
    }
    let i_h = i_h.ok_or_else(|| {
        Error::NoBdp(String::from(
            "attenuation never reaches -10 dB after the crossing",
        ))
    })?;
    Ok(BandSegmentation {
        f1: f[i1],
        f_d: f[i_d],
        f_h: f[i_h],
        f2: *f.last().expect("non-empty"),
        bdp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{dispersion, LumpedChain};

    #[test]
    fn base_probe_is_unity() {
        let chain = LumpedChain::reference(5);
        let g = grid(5.0, 50.0, 1.0);
        let curve = frequency_response_probed(&chain, &g, 1e-3, Probe::Base).unwrap();
        assert!(curve.tau_db.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn single_cell_static_transmission_is_unity() {
        let chain = LumpedChain::new(1, 0.01, 0.02, 500.0, 300.0, 0.01).unwrap();
        let tau = frequency_response_at(&chain, 1e-3).unwrap();
        assert!(tau.abs() < 1e-6, "tau(0+) = {tau}");
    }

    #[test]
    fn reference_chain_attenuates_inside_gap() {
        let chain = LumpedChain::reference(5);
        let gap = dispersion(&chain, 64).unwrap().bandgaps[0];
        let g = default_grid();
        let curve = frequency_response(&chain, &g, 1e-3).unwrap();
        let mut checked = 0;
        for (f, t) in curve.freq_hz.iter().zip(&curve.tau_db) {
            if *f > gap.f_low_hz && *f < gap.f_high_hz {
                assert!(*t < 0.0, "tau({f}) = {t} inside gap {gap:?}");
                checked += 1;
            }
        }
        assert!(checked > 100);
        // and a 10x denser grid around the gap agrees qualitatively
        let dense = grid(gap.f_low_hz + 0.005, gap.f_high_hz - 0.005, 0.005);
        let fine = frequency_response(&chain, &dense, 1e-3).unwrap();
        assert!(fine.tau_db.iter().all(|&t| t < 0.0));
        // at least one pass-band peak above 0 dB
        assert!(curve.tau_db.iter().cloned().fold(f64::MIN, f64::max) > 0.0);
    }

    #[test]
    fn bdp_of_synthetic_linear_curve() {
        let f = grid(0.0, 20.0, 1.0);
        let tau: alloc::vec::Vec<f64> = f.iter().map(|x| 10.0 - x).collect();
        let curve = TransmittanceCurve {
            freq_hz: f.clone(),
            tau_db: tau,
            probe_index: 0,
        };
        let seg = extract_bdp(&curve).unwrap();
        assert!((seg.bdp - 10.0).abs() < 1e-12);
        // shifting the curve +5 dB moves the crossing to 15 Hz
        let shifted = TransmittanceCurve {
            freq_hz: f.clone(),
            tau_db: f.iter().map(|x| 15.0 - x).collect(),
            probe_index: 0,
        };
        let seg = extract_bdp(&shifted).unwrap();
        assert!((seg.bdp - 15.0).abs() < 1e-12);
    }

    #[test]
    fn reference_bdp_stable_under_grid_refinement() {
        let chain = LumpedChain::reference(5);
        let coarse = frequency_response(&chain, &grid(1.0, 120.0, 0.05), 1e-3).unwrap();
        let seg_c = extract_bdp(&coarse).unwrap();
        let fine = frequency_response(&chain, &grid(1.0, 120.0, 0.005), 1e-3).unwrap();
        let seg_f = extract_bdp(&fine).unwrap();
        assert!(
            (seg_c.bdp - seg_f.bdp).abs() < 0.05,
            "{} vs {}",
            seg_c.bdp,
            seg_f.bdp
        );
        // band ordering invariant
        for seg in [seg_c, seg_f] {
            assert!(seg.f1 < seg.f_d, "{seg:?}");
            assert!(seg.f_d <= seg.bdp, "{seg:?}");
            assert!(seg.bdp <= seg.f_h, "{seg:?}");
            assert!(seg.f_h < seg.f2, "{seg:?}");
        }
        // the crossing sits just below the infinite-chain gap edge
        let gap = dispersion(&chain, 64).unwrap().bandgaps[0];
        assert!((seg_f.bdp - gap.f_low_hz).abs() < 0.5);
    }

    #[test]
    fn no_bdp_for_all_negative_curve() {
        let f = grid(1.0, 10.0, 1.0);
        let curve = TransmittanceCurve {
            freq_hz: f.clone(),
            tau_db: f.iter().map(|_| -5.0).collect(),
            probe_index: 0,
        };
        assert!(matches!(extract_bdp(&curve), Err(Error::NoBdp(_))));
    }

    #[test]
    fn force_reciprocity_between_chain_ends() {
        // force at plate 0 / probe plate n-1 vs force at plate n-1 / probe
        // plate 0: transfer must match (symmetric M, C, K).
        let chain = LumpedChain::reference(5);
        let model = FiniteChain::assemble(&chain);
        let dim = model.dim();
        for f_hz in [5.0, 12.0, 22.0, 30.0, 80.0] {
            let omega = 2.0 * PI * f_hz;
            let mut fa = vec![Complex64::new(0.0, 0.0); dim];
            fa[0] = Complex64::new(1.0, 0.0);
            let xa = model.harmonic_response(omega, &fa).unwrap();
            let mut fb = vec![Complex64::new(0.0, 0.0); dim];
            fb[4] = Complex64::new(1.0, 0.0);
            let xb = model.harmonic_response(omega, &fb).unwrap();
            let ta = 20.0 * xa[4].norm().log10();
            let tb = 20.0 * xb[0].norm().log10();
            assert!((ta - tb).abs() < 1e-9, "f={f_hz}: {ta} vs {tb}");
        }
    }

    #[test]
    fn damping_lowers_the_pass_band_peak() {
        let base = LumpedChain::reference(5);
        let more = LumpedChain { damping_ratio: 0.02, ..base };
        let g = grid(5.0, 45.0, 0.02);
        let peak = |c: &LumpedChain| {
            frequency_response(c, &g, 1e-3)
                .unwrap()
                .tau_db
                .into_iter()
                .fold(f64::MIN, f64::max)
        };
        assert!(peak(&more) < peak(&base));
    }
}
