//! Physics core for a lumped locally-resonant metamaterial vibration sensor.
//!
//! The crate models the sensor as a 1-D mass-in-mass chain: outer (plate)
//! masses coupled by springs, each carrying an internal spring-mass
//! resonator. On top of that it provides the machinery to use the chain as a
//! binary structural-health classifier and to program its bandgap:
//!
//! * [`lattice`] — unit-cell geometry to equivalent chain reduction, Bloch
//!   dispersion of the infinite chain and bandgap edges.
//! * [`transmittance`] — steady-state transmittance of the finite chain,
//!   band segmentation and the binary decision point (BDP).
//! * [`structure`] — monitored-structure response synthesis: multi-harmonic
//!   signals and time-integrated N-DOF shear models under noise with damage.
//! * [`sensor`] — coupling structural responses into the chain, RMSD-style
//!   classification metrics and the piezoelectric voltage proxy.
//! * [`surrogate`] — Latin hypercube sampling, dataset generation, a small
//!   feed-forward regression network with in-repo backprop/Adam, and
//!   gradient-based inverse design of the geometry.
//!
//! All quantities are SI (meters, kilograms, newtons, hertz) unless a field
//! name says otherwise; the `_mm` suffix marks the few interfaces that are
//! millimeter-denominated for human entry.
//!
//! The crate is `no_std` (with `alloc`); float math goes through `libm`, so
//! results are bit-identical across platforms. Everything is deterministic:
//! randomness enters only through explicit seeds.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod lattice;
pub mod linalg;
pub mod ode;
pub mod rng;
pub mod sensor;
pub mod structure;
pub mod surrogate;
pub mod trace;
pub mod transmittance;

pub use error::{Error, Result};
pub use lattice::{
    dispersion, local_resonance_frequency, reduce_geometry, Bandgap, DispersionResult,
    LumpedChain, MaterialProperties, UnitCellGeometry,
};
pub use sensor::{
    classify, piezo_voltage, rmsd, sensitivity_curve, sensor_response, sensor_response_all,
    steady_amplitude, short_time_rmsd, ChainResponse, ClassificationResult, CoupledRunConfig,
    Measure, PiezoConfig, PiezoOutput,
};
pub use structure::{
    eigenfrequencies, simulate, synthesize_harmonic, white_noise, DamageEvent, HarmonicSpec,
    IntegratorConfig, StructuralModel,
};
pub use trace::SignalTrace;
pub use transmittance::{
    extract_bdp, frequency_response, frequency_response_at, BandSegmentation, FiniteChain, Probe,
    TransmittanceCurve,
};
