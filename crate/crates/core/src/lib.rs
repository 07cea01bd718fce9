//! Global (eigenbasis) and local (site-basis) Lindblad master equations for a
//! chain of qubits between two thermal baths: steady states, qubit
//! populations and heat fluxes, alongside the closed-form results for the
//! monomer and the symmetric dimer.
//!
//! ```
//! use qchain_core::{Approach, ChainSpec, OpenChain};
//!
//! let spec = ChainSpec::dimer(1.5, 1.5, 1.0, 2.0, 0.0);
//! let report = OpenChain::build(&spec, Approach::Local)?.solve()?;
//! assert!(report.fluxes[0] > 0.0);
//! # Ok::<(), qchain_core::Error>(())
//! ```

// `!(x <= tol)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod csv;
pub mod dissipators;
pub mod error;
pub mod model;
pub mod observables;
pub mod operators;
pub mod presets;
pub mod spec;
pub mod steady;
pub mod sweep;
pub mod verify;

pub use config::{parse_config, parse_spec, Axis, ConfigError, Grid, Outputs, SweepRequest};
pub use dissipators::{
    bose_occupation, build_global_dissipator, build_liouvillian, build_local_dissipator,
    emission_rate, global_jump_operators, spectral_density, Channel, JumpOperator, Superoperator,
    OMEGA_MIN, SECULAR_TOL,
};
pub use error::{Error, Result, SpecViolation};
pub use model::{Approach, OpenChain};
pub use observables::{
    dimer_global_heat_flux_analytic, dimer_global_populations_analytic,
    dimer_local_heat_flux_analytic, dimer_local_populations_analytic, heat_flux,
    monomer_heat_flux_analytic, monomer_population_analytic, qubit_population, universal_e,
    HeatFluxReport, PopulationReport, SteadyReport,
};
pub use operators::{
    build_chain_hamiltonian, diagonalize, dimer_analytic_eigensystem, site_operator, DenseOperator,
    EigenSystem, EigenSystemDimer, HermitianOperator, SiteOp, C64,
};
pub use spec::{validate_spec, BathSpec, ChainSpec, MAX_QUBITS};
pub use steady::{
    evolve_rk4, solve_steady_state, steady_state, trace_distance, DensityMatrix, Trajectory,
};
pub use sweep::{run_sweep, SweepTable};
pub use verify::{run_verification, VerificationReport};
