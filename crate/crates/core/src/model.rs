//! Assembly of the full master equation for either approach.

use std::fmt;
use std::str::FromStr;

use crate::dissipators::{
    build_liouvillian, global_channels, global_jump_operators, local_channel, site_coupling,
    sum_channels, Channel, Superoperator, SECULAR_TOL,
};
use crate::error::{Error, Result};
use crate::observables::{heat_flux, qubit_population, ChannelFlux, SteadyReport};
use crate::operators::{build_chain_hamiltonian, diagonalize, EigenSystem, HermitianOperator};
use crate::spec::ChainSpec;
use crate::steady::solve_steady_state;

/// How the bath jump operators are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Approach {
    /// Eigenbasis of the full chain Hamiltonian, full secular approximation.
    Global,
    /// Bare site operators of the attached qubits.
    Local,
}

impl Approach {
    pub const ALL: [Approach; 2] = [Approach::Global, Approach::Local];

    pub fn as_str(self) -> &'static str {
        match self {
            Approach::Global => "global",
            Approach::Local => "local",
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "global" => Ok(Approach::Global),
            "local" => Ok(Approach::Local),
            other => Err(format!(
                "unknown approach `{other}` (expected global or local)"
            )),
        }
    }
}

/// Hamiltonian, per-bath channels and dissipators, and the Liouvillian of one
/// chain under one approach.
#[derive(Debug, Clone)]
pub struct OpenChain {
    pub spec: ChainSpec,
    pub approach: Approach,
    pub hamiltonian: HermitianOperator,
    /// Present for the global approach.
    pub eigensystem: Option<EigenSystem>,
    pub channels: [Vec<Channel>; 2],
    pub dissipators: [Superoperator; 2],
    pub liouvillian: Superoperator,
}

impl OpenChain {
    pub fn build(spec: &ChainSpec, approach: Approach) -> Result<Self> {
        let spec = spec.validate()?;
        let hamiltonian = build_chain_hamiltonian(&spec)?;
        let d = spec.dim();

        let (eigensystem, channels) = match approach {
            Approach::Global => {
                let es = diagonalize(&hamiltonian)?;
                let mut per_bath = Vec::with_capacity(2);
                for (j, bath) in spec.baths.iter().enumerate() {
                    let x = site_coupling(spec.n_qubits, bath.attached_site)?;
                    let jumps = global_jump_operators(&es, &x, j, SECULAR_TOL)?;
                    per_bath.push(global_channels(&jumps, bath)?);
                }
                (Some(es), per_bath)
            }
            Approach::Local => {
                let per_bath = spec
                    .baths
                    .iter()
                    .enumerate()
                    .map(|(j, bath)| local_channel(&spec, bath, j).map(|c| vec![c]))
                    .collect::<Result<Vec<_>>>()?;
                (None, per_bath)
            }
        };
        let channels: [Vec<Channel>; 2] =
            channels.try_into().map_err(|_| Error::DimensionMismatch {
                expected: 2,
                found: 0,
            })?;
        let dissipators = [sum_channels(&channels[0], d), sum_channels(&channels[1], d)];
        let liouvillian = build_liouvillian(hamiltonian.matrix(), &dissipators)?;

        Ok(Self {
            spec,
            approach,
            hamiltonian,
            eigensystem,
            channels,
            dissipators,
            liouvillian,
        })
    }

    /// Steady state, qubit populations and heat fluxes from the numerical
    /// pipeline.
    pub fn solve(&self) -> Result<SteadyReport> {
        let sol = solve_steady_state(&self.liouvillian)?;
        let h = self.hamiltonian.matrix();
        let populations = (0..self.spec.n_qubits)
            .map(|site| qubit_population(&sol.rho, site))
            .collect::<Result<Vec<_>>>()?;
        let fluxes = [
            heat_flux(&self.hamiltonian, &self.dissipators[0], &sol.rho)?,
            heat_flux(&self.hamiltonian, &self.dissipators[1], &sol.rho)?,
        ];
        let channel_fluxes = self
            .channels
            .iter()
            .flatten()
            .map(|ch| ChannelFlux {
                reservoir: ch.reservoir,
                omega: ch.omega,
                flux: (h * ch.apply(sol.rho.matrix())).trace().re,
            })
            .collect();
        Ok(SteadyReport {
            approach: self.approach,
            populations,
            fluxes,
            channel_fluxes,
            residual: sol.residual,
            asymmetry: sol.asymmetry,
            rho: sol.rho,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipators::{devectorize, vectorize};
    use crate::operators::{max_abs, DenseOperator, C64};
    use crate::steady::{evolve_rk4, DensityMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> DenseOperator {
        let m = DenseOperator::from_fn(d, d, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        (&m + m.adjoint()) * C64::from(0.5)
    }

    fn specs() -> Vec<ChainSpec> {
        vec![
            ChainSpec::monomer(1.2, 0.7, 0.1),
            ChainSpec::dimer(1.5, 1.5, 1.0, 2.0, 0.0),
            ChainSpec::dimer(2.0, 1.0, 0.6, 0.5, 1.5).with_gammas(0.3, 1.4),
            ChainSpec::new(vec![1.1, 0.8, 1.7], vec![0.4, 0.25], 3.0, 0.2),
        ]
    }

    #[test]
    fn approach_round_trips_through_strings() {
        for a in Approach::ALL {
            assert_eq!(a.as_str().parse::<Approach>().unwrap(), a);
        }
        assert!("both".parse::<Approach>().is_err());
    }

    #[test]
    fn generators_preserve_trace() {
        for spec in specs() {
            for approach in Approach::ALL {
                let chain = OpenChain::build(&spec, approach).unwrap();
                for d in &chain.dissipators {
                    assert!(d.trace_defect() <= 1e-10);
                }
                assert!(chain.liouvillian.trace_defect() <= 1e-10);
            }
        }
    }

    #[test]
    fn generators_preserve_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for spec in specs() {
            for approach in Approach::ALL {
                let chain = OpenChain::build(&spec, approach).unwrap();
                for _ in 0..50 {
                    let rho = random_hermitian(&mut rng, spec.dim());
                    let out = chain.liouvillian.apply(&rho).unwrap();
                    assert!(max_abs(&(&out - out.adjoint())) <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn short_evolution_keeps_positivity() {
        for spec in specs() {
            for approach in Approach::ALL {
                let chain = OpenChain::build(&spec, approach).unwrap();
                let dt = 0.1 / chain.liouvillian.max_abs();
                let d = spec.dim();
                let traj = evolve_rk4(
                    &chain.liouvillian,
                    &DensityMatrix::maximally_mixed(d),
                    dt,
                    10.0 * dt,
                    0.0,
                )
                .unwrap();
                assert!(traj.final_state().min_eigenvalue() >= -1e-9);
            }
        }
    }

    #[test]
    fn vec_devec_round_trip() {
        let m = DenseOperator::from_fn(3, 3, |i, j| C64::new(i as f64, j as f64));
        let v = vectorize(&m);
        assert_eq!(v[1], C64::new(1.0, 0.0));
        assert_eq!(v[3], C64::new(0.0, 1.0));
        assert_eq!(devectorize(v.as_slice(), 3), m);
    }

    #[test]
    fn monomer_global_and_local_coincide() {
        let spec = ChainSpec::monomer(0.9, 3.0, 0.5).with_gammas(1.7, 0.2);
        let g = OpenChain::build(&spec, Approach::Global).unwrap();
        let l = OpenChain::build(&spec, Approach::Local).unwrap();
        let diff = max_abs(&(g.liouvillian.matrix() - l.liouvillian.matrix()));
        assert!(diff <= 1e-12);
    }

    #[test]
    fn monomer_liouvillian_has_one_dimensional_kernel() {
        let chain = OpenChain::build(&ChainSpec::monomer(1.0, 1.0, 0.0), Approach::Local).unwrap();
        let sv = chain.liouvillian.matrix().clone().singular_values();
        assert_eq!(sv.iter().filter(|s| **s < 1e-12).count(), 1);
    }

    #[test]
    fn symmetric_dimer_has_two_global_frequencies() {
        let (eps, k) = (2.5, 1.0);
        let chain =
            OpenChain::build(&ChainSpec::dimer(eps, eps, k, 1.0, 0.0), Approach::Global).unwrap();
        for bath in &chain.channels {
            let omegas: Vec<f64> = bath.iter().map(|c| c.omega).collect();
            assert_eq!(omegas.len(), 2);
            assert!((omegas[0] - (eps - k)).abs() < 1e-12);
            assert!((omegas[1] - (eps + k)).abs() < 1e-12);
        }
    }
}
