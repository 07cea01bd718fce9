//! Populations and heat fluxes, numerical and closed-form.
//!
//! The closed forms are written in occupation variables: every `exp(beta w)`
//! is replaced through `J exp(beta w) = gamma (N + 1)`, so they stay exact at
//! `T = 0` and finite at large `beta`. Where two algebraic forms of the same
//! result exist, both are evaluated and must agree.

use crate::dissipators::{bose_occupation, Superoperator, OMEGA_MIN};
use crate::error::{Error, Result};
use crate::model::Approach;
use crate::operators::{number_operator, HermitianOperator};
use crate::steady::DensityMatrix;

/// Heat flux through one secular channel of one bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelFlux {
    pub reservoir: usize,
    pub omega: f64,
    pub flux: f64,
}

/// Everything the numerical pipeline reports for one steady state.
#[derive(Debug, Clone)]
pub struct SteadyReport {
    pub approach: Approach,
    /// `<sigma_+ sigma_->` per site.
    pub populations: Vec<f64>,
    /// `Q_j`, positive for energy entering the system from bath `j`.
    pub fluxes: [f64; 2],
    pub channel_fluxes: Vec<ChannelFlux>,
    pub residual: f64,
    pub asymmetry: f64,
    pub rho: DensityMatrix,
}

impl SteadyReport {
    pub fn populations(&self) -> PopulationReport {
        PopulationReport {
            approach: self.approach,
            populations: self.populations.clone(),
        }
    }

    pub fn heat_flux(&self) -> HeatFluxReport {
        HeatFluxReport {
            approach: self.approach,
            fluxes: self.fluxes,
            channels: match self.approach {
                Approach::Global => Some(self.channel_fluxes.clone()),
                Approach::Local => None,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationReport {
    pub approach: Approach,
    pub populations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatFluxReport {
    pub approach: Approach,
    pub fluxes: [f64; 2],
    /// Per-frequency contributions, global approach only.
    pub channels: Option<Vec<ChannelFlux>>,
}

impl HeatFluxReport {
    /// `Q_1 + Q_2`; zero at steady state for the global approach.
    pub fn imbalance(&self) -> f64 {
        self.fluxes[0] + self.fluxes[1]
    }
}

/// `Tr(sigma_+ sigma_- rho)` on `site`.
pub fn qubit_population(rho: &DensityMatrix, site: usize) -> Result<f64> {
    let n_qubits = rho.dim().trailing_zeros() as usize;
    if site >= n_qubits {
        return Err(Error::IndexOutOfRange { site, n_qubits });
    }
    Ok(rho.expectation(&number_operator(n_qubits, site)?).re)
}

/// `Tr(H devec(D_j vec(rho)))`.
pub fn heat_flux(
    h: &HermitianOperator,
    dissipator: &Superoperator,
    rho: &DensityMatrix,
) -> Result<f64> {
    if h.dim() != dissipator.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: dissipator.dim(),
        });
    }
    let drho = dissipator.apply(rho.matrix())?;
    Ok((h.matrix() * drho).trace().re)
}

fn occupations(omega: f64, t1: f64, t2: f64) -> Result<(f64, f64)> {
    Ok((bose_occupation(omega, t1)?, bose_occupation(omega, t2)?))
}

/// `e(w) = (N1 + N2) / (1 + N1 + N2)`, in `[0, 1)`.
pub fn universal_e(omega: f64, t1: f64, t2: f64) -> Result<f64> {
    let (n1, n2) = occupations(omega, t1, t2)?;
    Ok((n1 + n2) / (1.0 + n1 + n2))
}

/// Excited-state population of a single qubit, `e(eps) / 2`.
pub fn monomer_population_analytic(eps: f64, t1: f64, t2: f64) -> Result<f64> {
    Ok(universal_e(eps, t1, t2)? / 2.0)
}

/// Rational form of the single-channel flux from bath 1,
/// `w J1 J2 (e^{b2 w} - e^{b1 w}) / (J1 (1 + e^{b1 w}) + J2 (1 + e^{b2 w}))`,
/// which in occupation variables reads
/// `w g1 g2 (N1 - N2) / (g1 (2 N1 + 1) + g2 (2 N2 + 1))`.
pub fn channel_flux_rational(
    omega: f64,
    t1: f64,
    t2: f64,
    gamma1: f64,
    gamma2: f64,
) -> Result<f64> {
    let (n1, n2) = occupations(omega, t1, t2)?;
    Ok(omega * gamma1 * gamma2 * (n1 - n2)
        / (gamma1 * (2.0 * n1 + 1.0) + gamma2 * (2.0 * n2 + 1.0)))
}

/// Product form `w/2 (1 - e(w)) (N1 - N2)`, valid for unit rates.
pub fn channel_flux_product(omega: f64, t1: f64, t2: f64) -> Result<f64> {
    let (n1, n2) = occupations(omega, t1, t2)?;
    // 1 - e evaluated without cancellation
    let one_minus_e = 1.0 / (1.0 + n1 + n2);
    Ok(omega / 2.0 * one_minus_e * (n1 - n2))
}

fn assert_forms_agree(a: f64, b: f64, what: &str) {
    let scale = a.abs().max(b.abs()).max(1e-300);
    assert!(
        (a - b).abs() <= 1e-12 * scale.max(1.0),
        "{what}: algebraic forms disagree ({a} vs {b})"
    );
}

/// Heat flux from bath 1 into a single qubit.
///
/// Uses the rational form; for unit rates the product form is evaluated too
/// and the two must agree.
pub fn monomer_heat_flux_analytic(
    eps: f64,
    t1: f64,
    t2: f64,
    gamma1: f64,
    gamma2: f64,
) -> Result<f64> {
    let q = channel_flux_rational(eps, t1, t2, gamma1, gamma2)?;
    if gamma1 == 1.0 && gamma2 == 1.0 {
        assert_forms_agree(q, channel_flux_product(eps, t1, t2)?, "monomer flux");
    }
    Ok(q)
}

/// Closed-form global steady state of the symmetric dimer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerGlobalPopulations {
    /// `e(|eps - K|)`.
    pub e1: f64,
    /// `e(eps + K)`.
    pub e2: f64,
    /// `<s_p|rho|s_p>` for `s1 = |00>, s2 = |11>, s3, s4`.
    pub rho_diagonal: [f64; 4],
    /// `e1 e2 / 2`, the `rho_22` entry as printed; does not normalize.
    pub rho22_printed: f64,
    pub n1: f64,
    pub n2: f64,
}

/// Symmetric dimer, global approach: eigenbasis populations and the qubit
/// populations `n1 = n2`, which equal `(e1 + e2) / 4` when `eps > K`.
///
/// The chain behaves as two independent modes at `w1 = |eps - K|` and
/// `w2 = eps + K`, each excited with probability `e_i / 2`. For `eps > K`
/// the states are `s1 = (0,0)`, `s4 = (1,0)`, `s3 = (0,1)`, `s2 = (1,1)` in
/// mode occupations; for `eps < K`, `s4` and `s1` swap roles, as do `s3` and
/// `s2`.
pub fn dimer_global_populations_analytic(
    eps: f64,
    coupling: f64,
    t1: f64,
    t2: f64,
) -> Result<DimerGlobalPopulations> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveFrequency(eps));
    }
    let w1 = (eps - coupling).abs();
    let w2 = eps + coupling;
    if w1 <= OMEGA_MIN {
        return Err(Error::DegenerateTransition(w1));
    }
    let e1 = universal_e(w1, t1, t2)?;
    let e2 = universal_e(w2, t1, t2)?;

    let none = (1.0 - e1 / 2.0) * (1.0 - e2 / 2.0);
    let only1 = e1 / 2.0 * (1.0 - e2 / 2.0);
    let only2 = (1.0 - e1 / 2.0) * e2 / 2.0;
    let both = e1 * e2 / 4.0;
    let rho_diagonal = if eps > coupling {
        [none, both, only2, only1]
    } else {
        [only1, only2, both, none]
    };

    // qubit populations through the eigenbasis, with rho_34 = 0; for
    // eps > K this is (e1 + e2) / 4
    let n = rho_diagonal[1] + 0.5 * (rho_diagonal[2] + rho_diagonal[3]);
    if eps > coupling {
        assert_forms_agree(n, (e1 + e2) / 4.0, "dimer global populations");
    }
    Ok(DimerGlobalPopulations {
        e1,
        e2,
        rho_diagonal,
        rho22_printed: e1 * e2 / 2.0,
        n1: n,
        n2: n,
    })
}

/// Symmetric dimer, local approach:
/// `n1 = (2K^2 e + (1 + 2N2) N1) / (4K^2 + (1 + 2N1)(1 + 2N2))` and the
/// mirror expression for `n2`, all occupations at `eps`.
pub fn dimer_local_populations_analytic(
    eps: f64,
    coupling: f64,
    t1: f64,
    t2: f64,
) -> Result<(f64, f64)> {
    let (n1, n2) = occupations(eps, t1, t2)?;
    let e = (n1 + n2) / (1.0 + n1 + n2);
    let k2 = coupling * coupling;
    let den = 4.0 * k2 + (1.0 + 2.0 * n1) * (1.0 + 2.0 * n2);
    Ok((
        (2.0 * k2 * e + (1.0 + 2.0 * n2) * n1) / den,
        (2.0 * k2 * e + (1.0 + 2.0 * n1) * n2) / den,
    ))
}

/// Global dimer flux from bath 1 with its per-channel split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerGlobalFlux {
    pub total: f64,
    /// `(omega_i, contribution)` for `omega_1 = |eps - K|`, `omega_2 = eps + K`.
    pub channels: [(f64, f64); 2],
}

/// Sum over the two channels of the single-channel flux, as printed:
/// `sum_i w_i J1 J2 (e^{b2 w} - e^{b1 w}) / (...)`, equal to
/// `sum_i w_i/2 (1 - e_i)(N1(w_i) - N2(w_i))` for unit rates.
pub fn dimer_global_heat_flux_analytic(
    eps: f64,
    coupling: f64,
    t1: f64,
    t2: f64,
    gamma1: f64,
    gamma2: f64,
) -> Result<DimerGlobalFlux> {
    let w1 = (eps - coupling).abs();
    let w2 = eps + coupling;
    if w1 <= OMEGA_MIN {
        return Err(Error::DegenerateTransition(w1));
    }
    let mut channels = [(w1, 0.0), (w2, 0.0)];
    for ch in &mut channels {
        ch.1 = channel_flux_rational(ch.0, t1, t2, gamma1, gamma2)?;
        if gamma1 == 1.0 && gamma2 == 1.0 {
            assert_forms_agree(
                ch.1,
                channel_flux_product(ch.0, t1, t2)?,
                "dimer global flux",
            );
        }
    }
    Ok(DimerGlobalFlux {
        total: channels[0].1 + channels[1].1,
        channels,
    })
}

/// Local dimer flux: the monomer flux at `eps` weighted by
/// `4K^2 / (4K^2 + J1 J2 (1 + e^{b1 eps})(1 + e^{b2 eps}))`, where
/// `J1 J2 (1 + e^{b1 eps})(1 + e^{b2 eps}) = g1 g2 (2N1 + 1)(2N2 + 1)`.
pub fn dimer_local_heat_flux_analytic(
    eps: f64,
    coupling: f64,
    t1: f64,
    t2: f64,
    gamma1: f64,
    gamma2: f64,
) -> Result<f64> {
    let (n1, n2) = occupations(eps, t1, t2)?;
    let k2 = coupling * coupling;
    let weight = 4.0 * k2 / (4.0 * k2 + gamma1 * gamma2 * (2.0 * n1 + 1.0) * (2.0 * n2 + 1.0));
    let q = channel_flux_rational(eps, t1, t2, gamma1, gamma2)? * weight;
    if gamma1 == 1.0 && gamma2 == 1.0 {
        assert_forms_agree(
            q,
            channel_flux_product(eps, t1, t2)? * weight,
            "dimer local flux",
        );
    }
    Ok(q)
}
