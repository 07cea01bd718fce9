use std::fmt;

use thiserror::Error;

/// A single violated invariant of a [`ChainSpec`](crate::spec::ChainSpec).
#[derive(Debug, Clone, PartialEq)]
pub enum SpecViolation {
    NonPositiveGap {
        site: usize,
        value: f64,
    },
    NegativeTemperature {
        bath: usize,
        value: f64,
    },
    NonPositiveGamma {
        bath: usize,
        value: f64,
    },
    BadBathAttachment {
        bath: usize,
        site: usize,
    },
    LengthMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    NonFinite {
        field: &'static str,
    },
    NTooLarge {
        n_qubits: usize,
        max: usize,
    },
    NoQubits,
}

impl fmt::Display for SpecViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveGap { site, value } => {
                write!(f, "NonPositiveGap: epsilon[{site}] = {value} must be > 0")
            }
            Self::NegativeTemperature { bath, value } => {
                write!(
                    f,
                    "NegativeTemperature: T{} = {value} must be >= 0",
                    bath + 1
                )
            }
            Self::NonPositiveGamma { bath, value } => {
                write!(
                    f,
                    "NonPositiveGamma: gamma{} = {value} must be > 0",
                    bath + 1
                )
            }
            Self::BadBathAttachment { bath, site } => {
                write!(
                    f,
                    "BadBathAttachment: bath {} attached to site {site}",
                    bath + 1
                )
            }
            Self::LengthMismatch {
                field,
                expected,
                found,
            } => {
                write!(
                    f,
                    "LengthMismatch: {field} has {found} entries, expected {expected}"
                )
            }
            Self::NonFinite { field } => write!(f, "NonFinite: {field} contains NaN or Inf"),
            Self::NTooLarge { n_qubits, max } => {
                write!(
                    f,
                    "NTooLarge: n_qubits = {n_qubits} exceeds the dense limit {max}"
                )
            }
            Self::NoQubits => write!(f, "LengthMismatch: n_qubits must be >= 1"),
        }
    }
}

fn join_violations(v: &[SpecViolation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chain spec: {}", join_violations(.0))]
    InvalidSpec(Vec<SpecViolation>),

    #[error("site index {site} out of range for {n_qubits} qubits")]
    IndexOutOfRange { site: usize, n_qubits: usize },

    #[error("n_qubits = {0} exceeds the dense limit of {max}", max = crate::spec::MAX_QUBITS)]
    NTooLarge(usize),

    #[error("operator is not Hermitian (max |A - A^H| = {0:e})")]
    NotHermitian(f64),

    #[error("not a density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("eigensolver failed to converge")]
    ConvergenceFailure,

    #[error("degenerate denominator in the dimer amplitudes (K = 0)")]
    DegenerateDenominator,

    #[error("Bohr frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),

    #[error("transition frequency {0:e} is below the minimum resolvable Bohr frequency")]
    DegenerateTransition(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("steady state is not unique (pivot ratio {0:e})")]
    DegenerateKernel(f64),

    #[error("steady-state solve did not reach the residual target (residual {0:e})")]
    NoConvergence(f64),

    #[error("time step {dt} exceeds the stability bound {max}")]
    StepTooLarge { dt: f64, max: f64 },

    #[error("time evolution produced a non-finite state at t = {0}")]
    NonFiniteState(f64),

    #[error("trace drift {rate:e} per unit time exceeds the tolerance")]
    TraceDrift { rate: f64 },

    #[error("{0}")]
    Config(#[from] crate::config::ConfigError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
