//! Physical problem description: a chain of qubits with two thermal baths
//! attached at its ends.
//!
//! Units: `hbar = k_B = 1`, so temperatures and energies share one unit.
//! Temperatures are stored as `T`, never as `beta`, so `T = 0` is exact.

use crate::error::{Error, Result, SpecViolation};

/// Largest chain handled by the dense solver (`d = 32`, superoperator 1024x1024).
pub const MAX_QUBITS: usize = 5;

/// Default spontaneous emission rate of each bath.
pub const DEFAULT_GAMMA: f64 = 1.0;

/// Sign and unit conventions, echoed into CSV metadata and hashed there.
pub const CONVENTIONS: &str = "hbar=1; k_B=1; \
drho/dt = -i[H,rho] + sum_j D_j(rho), D_j completely positive; \
Q_j = Tr{H D_j(rho_ss)} > 0 for energy flowing from bath j into the system; \
vec = column stacking; site 0 = leftmost tensor factor; qubit basis (|1>,|0>), sigma_z = diag(+1,-1)";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    /// Bath temperature, `>= 0`.
    pub temperature: f64,
    /// Spontaneous emission rate, `> 0`.
    pub gamma: f64,
    /// Chain site the bath couples to (first or last).
    pub attached_site: usize,
}

impl BathSpec {
    pub fn new(temperature: f64, attached_site: usize) -> Self {
        Self {
            temperature,
            gamma: DEFAULT_GAMMA,
            attached_site,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }
}

/// Qubit gaps, nearest-neighbour XX couplings and the two bath attachments.
///
/// Bath 0 sits on site 0, bath 1 on site `n_qubits - 1`; for a single qubit
/// both baths act on site 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub n_qubits: usize,
    pub epsilons: Vec<f64>,
    pub couplings: Vec<f64>,
    pub baths: [BathSpec; 2],
}

impl ChainSpec {
    /// A chain with the standard end attachments and `gamma = 1` on both baths.
    pub fn new(epsilons: Vec<f64>, couplings: Vec<f64>, t1: f64, t2: f64) -> Self {
        let n = epsilons.len();
        let last = n.saturating_sub(1);
        Self {
            n_qubits: n,
            epsilons,
            couplings,
            baths: [BathSpec::new(t1, 0), BathSpec::new(t2, last)],
        }
    }

    pub fn monomer(epsilon: f64, t1: f64, t2: f64) -> Self {
        Self::new(vec![epsilon], vec![], t1, t2)
    }

    pub fn dimer(eps1: f64, eps2: f64, coupling: f64, t1: f64, t2: f64) -> Self {
        Self::new(vec![eps1, eps2], vec![coupling], t1, t2)
    }

    /// Homogeneous chain: every gap `epsilon`, every coupling `coupling`.
    pub fn uniform(n_qubits: usize, epsilon: f64, coupling: f64, t1: f64, t2: f64) -> Self {
        Self::new(
            vec![epsilon; n_qubits],
            vec![coupling; n_qubits.saturating_sub(1)],
            t1,
            t2,
        )
    }

    pub fn with_gammas(mut self, gamma1: f64, gamma2: f64) -> Self {
        self.baths[0].gamma = gamma1;
        self.baths[1].gamma = gamma2;
        self
    }

    pub fn with_temperatures(mut self, t1: f64, t2: f64) -> Self {
        self.baths[0].temperature = t1;
        self.baths[1].temperature = t2;
        self
    }

    /// Hilbert-space dimension `2^N`.
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Checks every invariant and returns the normalized spec, or all
    /// violations at once.
    pub fn validate(&self) -> Result<ChainSpec> {
        validate_spec(self)
    }
}

/// Validates a raw spec. Every violated invariant is collected into a single
/// [`Error::InvalidSpec`].
pub fn validate_spec(raw: &ChainSpec) -> Result<ChainSpec> {
    let mut bad = Vec::new();
    let n = raw.n_qubits;

    if n == 0 {
        bad.push(SpecViolation::NoQubits);
    }
    if n > MAX_QUBITS {
        bad.push(SpecViolation::NTooLarge {
            n_qubits: n,
            max: MAX_QUBITS,
        });
    }
    if raw.epsilons.len() != n {
        bad.push(SpecViolation::LengthMismatch {
            field: "epsilons",
            expected: n,
            found: raw.epsilons.len(),
        });
    }
    let expected_couplings = n.saturating_sub(1);
    if raw.couplings.len() != expected_couplings {
        bad.push(SpecViolation::LengthMismatch {
            field: "couplings",
            expected: expected_couplings,
            found: raw.couplings.len(),
        });
    }

    for (site, &eps) in raw.epsilons.iter().enumerate() {
        if !eps.is_finite() {
            bad.push(SpecViolation::NonFinite { field: "epsilons" });
        } else if eps <= 0.0 {
            bad.push(SpecViolation::NonPositiveGap { site, value: eps });
        }
    }
    if raw.couplings.iter().any(|k| !k.is_finite()) {
        bad.push(SpecViolation::NonFinite { field: "couplings" });
    }

    let last = n.saturating_sub(1);
    for (j, bath) in raw.baths.iter().enumerate() {
        if !bath.temperature.is_finite() {
            bad.push(SpecViolation::NonFinite {
                field: "temperature",
            });
        } else if bath.temperature < 0.0 {
            bad.push(SpecViolation::NegativeTemperature {
                bath: j,
                value: bath.temperature,
            });
        }
        if !bath.gamma.is_finite() {
            bad.push(SpecViolation::NonFinite { field: "gamma" });
        } else if bath.gamma <= 0.0 {
            bad.push(SpecViolation::NonPositiveGamma {
                bath: j,
                value: bath.gamma,
            });
        }
        let expected_site = if j == 0 { 0 } else { last };
        if bath.attached_site != expected_site {
            bad.push(SpecViolation::BadBathAttachment {
                bath: j,
                site: bath.attached_site,
            });
        }
    }

    if bad.is_empty() {
        let mut spec = raw.clone();
        // -0.0 and 0.0 compare equal; store the canonical zero
        for bath in &mut spec.baths {
            if bath.temperature == 0.0 {
                bath.temperature = 0.0;
            }
        }
        Ok(spec)
    } else {
        Err(Error::InvalidSpec(bad))
    }
}
