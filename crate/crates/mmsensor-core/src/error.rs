use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input violated a documented bound; the message names the bound.
    Domain(String),
    /// The harmonic system matrix is singular (undamped chain driven at a
    /// natural frequency).
    SingularSystem { freq_hz: f64 },
    /// The transmittance curve has no downward zero crossing after its
    /// pass-band maximum: the design is outside the operating regime.
    NoBdp(String),
    /// Adaptive step size fell below the representable limit.
    IntegrationFailure { t: f64, detail: String },
    /// Both classification measures are zero; the metric is undefined.
    DegenerateClassification,
    /// The training loss became non-finite.
    TrainingDiverged { epoch: usize },
    /// Every inverse-design trial finished above the loss threshold. The
    /// best attempt is carried for inspection.
    InverseNotConverged {
        best_loss: f64,
        best_geometry_mm: [f64; 4],
    },
    /// Stiffness matrix is not positive definite.
    NotPositiveDefinite,
    /// Eigenvalue iteration failed to converge.
    EigenFailure,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::SingularSystem { freq_hz } => {
                write!(f, "singular system at {freq_hz} Hz (undamped resonance)")
            }
            Error::NoBdp(msg) => write!(f, "no binary decision point: {msg}"),
            Error::IntegrationFailure { t, detail } => {
                write!(f, "integration failure at t = {t} s: {detail}")
            }
            Error::DegenerateClassification => {
                write!(f, "degenerate classification: both measures are zero")
            }
            Error::TrainingDiverged { epoch } => {
                write!(f, "training diverged at epoch {epoch}")
            }
            Error::InverseNotConverged { best_loss, .. } => {
                write!(f, "inverse design did not converge (best loss {best_loss})")
            }
            Error::NotPositiveDefinite => write!(f, "stiffness matrix not positive definite"),
            Error::EigenFailure => write!(f, "eigenvalue iteration did not converge"),
        }
    }
}

impl core::error::Error for Error {}
