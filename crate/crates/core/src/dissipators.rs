//! Jump operators, thermal rates and GKSL superoperators.
//!
//! Superoperators act on column-stacked density matrices:
//! `vec(A rho B) = (B^T kron A) vec(rho)`.
//!
//! Every dissipator here has the form
//! `D(rho) = gamma (N + 1) D[A](rho) + gamma N D[A^H](rho)` with
//! `D[A](rho) = A rho A^H - 1/2 {A^H A, rho}`, where `A` lowers the system
//! energy by `omega` and `N = N(omega, T)` is the Bose occupation. The factor
//! `exp(omega / T)` never appears explicitly, so `T = 0` is exact.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operators::{max_abs, site_operator, DenseOperator, EigenSystem, SiteOp, C64};
use crate::spec::{BathSpec, ChainSpec};

/// Smallest Bohr frequency a bath can drive; below it `N(omega)` diverges.
pub const OMEGA_MIN: f64 = 1e-8;

/// Relative width of a secular frequency bin.
pub const SECULAR_TOL: f64 = 1e-9;

/// Matrix elements below this modulus do not produce a jump operator.
const ELEMENT_FLOOR: f64 = 1e-12;

/// Mean occupation `1 / (exp(omega / T) - 1)`; zero at `T = 0`.
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

fn check_transition(omega: f64) -> Result<()> {
    if !(omega > 0.0) {
        Err(Error::NonPositiveFrequency(omega))
    } else if omega <= OMEGA_MIN {
        Err(Error::DegenerateTransition(omega))
    } else {
        Ok(())
    }
}

/// Wide-band spectral density `J(omega) = gamma N(omega)`: the absorption rate.
pub fn spectral_density(gamma: f64, omega: f64, temperature: f64) -> Result<f64> {
    check_transition(omega)?;
    Ok(gamma * bose_occupation(omega, temperature)?)
}

/// Emission rate `gamma (N + 1)`, equal to `J(omega) exp(omega / T)`.
pub fn emission_rate(gamma: f64, omega: f64, temperature: f64) -> Result<f64> {
    check_transition(omega)?;
    Ok(gamma * (bose_occupation(omega, temperature)? + 1.0))
}

/// A system operator `V = <s_p|X|s_q> |s_p><s_q|` that lowers the energy by
/// `omega = E_q - E_p`, so `[Q, V] = -omega V`.
#[derive(Debug, Clone)]
pub struct JumpOperator {
    pub v: DenseOperator,
    pub omega: f64,
    pub reservoir: usize,
    /// Matrix element of the coupling operator, already folded into `v`.
    pub weight: C64,
    /// Lower eigenstate index `p`.
    pub lower: usize,
    /// Upper eigenstate index `q`.
    pub upper: usize,
    /// Secular bin; jumps sharing a bin are summed before forming `D[A]`.
    pub bin: usize,
}

/// `d^2 x d^2` generator acting on column-stacked `vec(rho)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: DMatrix<C64>,
}

impl Superoperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            matrix: DMatrix::zeros(dim * dim, dim * dim),
        }
    }

    pub fn from_matrix(dim: usize, matrix: DMatrix<C64>) -> Result<Self> {
        let n = dim * dim;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows(),
            });
        }
        Ok(Self { dim, matrix })
    }

    /// Hilbert-space dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// `devec(M vec(rho))`.
    pub fn apply(&self, rho: &DenseOperator) -> Result<DenseOperator> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.nrows(),
            });
        }
        let v = &self.matrix * vectorize(rho);
        Ok(devectorize(v.as_slice(), self.dim))
    }

    /// `max |vec(I)^H M|`: zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for c in 0..d * d {
            let s: C64 = (0..d).map(|i| self.matrix[(i * (d + 1), c)]).sum();
            worst = worst.max(s.norm());
        }
        worst
    }
}

impl std::ops::Add for Superoperator {
    type Output = Superoperator;

    fn add(mut self, rhs: Superoperator) -> Superoperator {
        assert_eq!(self.dim, rhs.dim, "superoperator dimensions differ");
        self.matrix += rhs.matrix;
        self
    }
}

impl std::ops::AddAssign<&Superoperator> for Superoperator {
    fn add_assign(&mut self, rhs: &Superoperator) {
        assert_eq!(self.dim, rhs.dim, "superoperator dimensions differ");
        self.matrix += &rhs.matrix;
    }
}

/// Column-stacking `vec`.
pub fn vectorize(rho: &DenseOperator) -> nalgebra::DVector<C64> {
    nalgebra::DVector::from_column_slice(rho.as_slice())
}

pub fn devectorize(v: &[C64], dim: usize) -> DenseOperator {
    DenseOperator::from_column_slice(dim, dim, v)
}

/// `rho -> A rho`.
pub fn left_multiplication(a: &DenseOperator) -> DMatrix<C64> {
    DenseOperator::identity(a.nrows(), a.nrows()).kronecker(a)
}

/// `rho -> rho A`.
pub fn right_multiplication(a: &DenseOperator) -> DMatrix<C64> {
    a.transpose()
        .kronecker(&DenseOperator::identity(a.nrows(), a.nrows()))
}

/// Superoperator matrix of `D[A](rho) = A rho A^H - 1/2 {A^H A, rho}`.
pub fn lindblad_term(a: &DenseOperator) -> DMatrix<C64> {
    let ada = a.adjoint() * a;
    let half = C64::from(0.5);
    a.conjugate().kronecker(a) - (left_multiplication(&ada) + right_multiplication(&ada)) * half
}

/// One secular channel of one bath: the summed lowering operator `A(omega)`
/// and its emission/absorption rates.
#[derive(Debug, Clone)]
pub struct Channel {
    pub omega: f64,
    pub reservoir: usize,
    pub operator: DenseOperator,
    pub emission: f64,
    pub absorption: f64,
}

impl Channel {
    fn new(omega: f64, reservoir: usize, operator: DenseOperator, bath: &BathSpec) -> Result<Self> {
        Ok(Self {
            omega,
            reservoir,
            operator,
            emission: emission_rate(bath.gamma, omega, bath.temperature)?,
            absorption: spectral_density(bath.gamma, omega, bath.temperature)?,
        })
    }

    pub fn superoperator(&self) -> Superoperator {
        let d = self.operator.nrows();
        let mut m = lindblad_term(&self.operator) * C64::from(self.emission);
        if self.absorption != 0.0 {
            m += lindblad_term(&self.operator.adjoint()) * C64::from(self.absorption);
        }
        Superoperator { dim: d, matrix: m }
    }

    /// `D(rho)` evaluated directly on the density matrix.
    pub fn apply(&self, rho: &DenseOperator) -> DenseOperator {
        let term = |a: &DenseOperator, rate: f64| {
            let ad = a.adjoint();
            let ada = &ad * a;
            (a * rho * &ad - (&ada * rho + rho * &ada) * C64::from(0.5)) * C64::from(rate)
        };
        let mut out = term(&self.operator, self.emission);
        if self.absorption != 0.0 {
            out += term(&self.operator.adjoint(), self.absorption);
        }
        out
    }
}

/// Decomposes `coupling` into eigenbasis jump operators `|s_p><s_p|X|s_q><s_q|`
/// for every pair with `E_q - E_p > OMEGA_MIN`, and groups them into secular
/// bins of relative width `secular_tol`.
///
/// A pair with a nonzero element but `|E_q - E_p| <= OMEGA_MIN` raises
/// [`Error::DegenerateTransition`].
pub fn global_jump_operators(
    es: &EigenSystem,
    coupling: &DenseOperator,
    reservoir: usize,
    secular_tol: f64,
) -> Result<Vec<JumpOperator>> {
    let d = es.dim();
    if coupling.nrows() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: coupling.nrows(),
        });
    }
    let elements = es.to_eigenbasis(coupling);
    let mut jumps = Vec::new();
    for lower in 0..d {
        for upper in 0..d {
            let weight = elements[(lower, upper)];
            if weight.norm() <= ELEMENT_FLOOR {
                continue;
            }
            let omega = es.energies[upper] - es.energies[lower];
            if omega.abs() <= OMEGA_MIN {
                return Err(Error::DegenerateTransition(omega));
            }
            if omega < 0.0 {
                continue;
            }
            jumps.push(JumpOperator {
                v: es.outer(lower, upper) * weight,
                omega,
                reservoir,
                weight,
                lower,
                upper,
                bin: 0,
            });
        }
    }

    jumps.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    let scale = es.energies.iter().fold(1.0f64, |acc, e| acc.max(e.abs()));
    let width = secular_tol * scale;
    let mut bin = 0;
    let mut anchor = jumps.first().map_or(0.0, |j| j.omega);
    for jump in &mut jumps {
        if jump.omega - anchor > width {
            bin += 1;
            anchor = jump.omega;
        }
        jump.bin = bin;
    }
    Ok(jumps)
}

/// Sums the jump operators of each secular bin into channels for `bath`.
pub fn global_channels(jumps: &[JumpOperator], bath: &BathSpec) -> Result<Vec<Channel>> {
    let mut channels: Vec<Channel> = Vec::new();
    let mut current: Option<(usize, f64, usize, DenseOperator)> = None;
    for jump in jumps {
        match &mut current {
            Some((bin, _, _, acc)) if *bin == jump.bin => *acc += &jump.v,
            _ => {
                if let Some((_, omega, reservoir, acc)) = current.take() {
                    channels.push(Channel::new(omega, reservoir, acc, bath)?);
                }
                current = Some((jump.bin, jump.omega, jump.reservoir, jump.v.clone()));
            }
        }
    }
    if let Some((_, omega, reservoir, acc)) = current {
        channels.push(Channel::new(omega, reservoir, acc, bath)?);
    }
    Ok(channels)
}

/// Full-secular global dissipator: one `D[A(omega)]` pair per bin, no
/// cross terms between different bins.
pub fn build_global_dissipator(jumps: &[JumpOperator], bath: &BathSpec) -> Result<Superoperator> {
    let channels = global_channels(jumps, bath)?;
    Ok(sum_channels(
        &channels,
        jumps.first().map_or(0, |j| j.v.nrows()),
    ))
}

pub(crate) fn sum_channels(channels: &[Channel], dim: usize) -> Superoperator {
    let mut total = Superoperator::zeros(dim);
    for ch in channels {
        total += &ch.superoperator();
    }
    total
}

/// The single site-basis channel of `bath`: `A = sigma_minus` on the attached
/// site at frequency `eps_lambda`.
pub fn local_channel(spec: &ChainSpec, bath: &BathSpec, reservoir: usize) -> Result<Channel> {
    let site = bath.attached_site;
    let eps = *spec.epsilons.get(site).ok_or(Error::IndexOutOfRange {
        site,
        n_qubits: spec.n_qubits,
    })?;
    let lower = site_operator(spec.n_qubits, site, SiteOp::Lower)?;
    Channel::new(eps, reservoir, lower, bath)
}

/// Site-basis dissipator acting on the qubit the bath is attached to.
pub fn build_local_dissipator(spec: &ChainSpec, bath: &BathSpec) -> Result<Superoperator> {
    let spec = spec.validate()?;
    let ch = local_channel(&spec, bath, 0)?;
    Ok(ch.superoperator())
}

/// `M = -i (I kron H - H^T kron I) + sum_j D_j`.
pub fn build_liouvillian(
    h: &DenseOperator,
    dissipators: &[Superoperator],
) -> Result<Superoperator> {
    let d = h.nrows();
    let mut m = (left_multiplication(h) - right_multiplication(h)) * C64::new(0.0, -1.0);
    for diss in dissipators {
        if diss.dim != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: diss.dim,
            });
        }
        m += &diss.matrix;
    }
    Ok(Superoperator { dim: d, matrix: m })
}

/// `sigma_minus + sigma_plus` on `site`.
pub fn site_coupling(n_qubits: usize, site: usize) -> Result<DenseOperator> {
    Ok(site_operator(n_qubits, site, SiteOp::Lower)?
        + site_operator(n_qubits, site, SiteOp::Raise)?)
}

/// Relative size of `[Q, V] + omega V`; zero for a proper lowering operator.
pub fn lowering_defect(h: &DenseOperator, jump: &JumpOperator) -> f64 {
    let c = h * &jump.v - &jump.v * h + &jump.v * C64::from(jump.omega);
    max_abs(&c) / max_abs(h).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_chain_hamiltonian, diagonalize};
    use proptest::prelude::*;

    fn eigensystem(spec: &ChainSpec) -> (DenseOperator, EigenSystem) {
        let h = build_chain_hamiltonian(spec).unwrap();
        let es = diagonalize(&h).unwrap();
        (h.into_inner(), es)
    }

    fn global_dissipator(spec: &ChainSpec, j: usize) -> Superoperator {
        let (_, es) = eigensystem(spec);
        let bath = spec.baths[j];
        let x = site_coupling(spec.n_qubits, bath.attached_site).unwrap();
        let jumps = global_jump_operators(&es, &x, j, SECULAR_TOL).unwrap();
        build_global_dissipator(&jumps, &bath).unwrap()
    }

    fn max_diff(a: &Superoperator, b: &Superoperator) -> f64 {
        (a.matrix() - b.matrix())
            .iter()
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    #[test]
    fn bose_zero_temperature() {
        assert_eq!(bose_occupation(1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn bose_forced_unit_occupation() {
        let n = bose_occupation(1.0, 1.0 / std::f64::consts::LN_2).unwrap();
        assert!((n - 1.0).abs() < 1e-15, "{n}");
    }

    #[test]
    fn bose_reference_value() {
        // direct scalar evaluation: 1 / (e^0.75 - 1)
        let oracle = 1.0 / (0.75f64.exp() - 1.0);
        let n = bose_occupation(1.5, 2.0).unwrap();
        assert!((n - oracle).abs() < 1e-14);
        assert!((n - 0.895_255_134_402_343_6).abs() < 1e-12);
    }

    #[test]
    fn bose_small_ratio_uses_expm1() {
        // omega/T = 1e-12: 1/(x) - 1/2 to leading order
        let n = bose_occupation(1e-6, 1e6).unwrap();
        assert!((n - (1e12 - 0.5)).abs() / 1e12 < 1e-12);
    }

    #[test]
    fn bose_rejects_nonpositive_frequency() {
        assert!(matches!(
            bose_occupation(0.0, 1.0),
            Err(Error::NonPositiveFrequency(_))
        ));
        assert!(matches!(
            bose_occupation(-1.0, 1.0),
            Err(Error::NonPositiveFrequency(_))
        ));
    }

    #[test]
    fn spectral_density_cases() {
        assert_eq!(spectral_density(1.0, 1.0, 0.0).unwrap(), 0.0);
        let j = spectral_density(1.0, 1.0, 1.0 / std::f64::consts::LN_2).unwrap();
        assert!((j - 1.0).abs() < 1e-15);
        assert!(matches!(
            spectral_density(1.0, 1e-9, 1.0),
            Err(Error::DegenerateTransition(_))
        ));
    }

    proptest! {
        #[test]
        fn detailed_balance_ratio(omega in 0.01f64..5.0, t in 0.05f64..10.0, g in 0.1f64..2.0) {
            let up = spectral_density(g, omega, t).unwrap();
            let down = emission_rate(g, omega, t).unwrap();
            let expected = (omega / t).exp();
            prop_assert!((down / up - expected).abs() <= 1e-12 * expected);
        }
    }

    #[test]
    fn monomer_has_one_jump() {
        let spec = ChainSpec::monomer(1.3, 1.0, 0.0);
        let (_, es) = eigensystem(&spec);
        let jumps =
            global_jump_operators(&es, &site_coupling(1, 0).unwrap(), 0, SECULAR_TOL).unwrap();
        assert_eq!(jumps.len(), 1);
        let lower = site_operator(1, 0, SiteOp::Lower).unwrap();
        assert!(max_abs(&(&jumps[0].v - lower)) < 1e-15);
        assert!((jumps[0].omega - 1.3).abs() < 1e-15);
    }

    #[test]
    fn symmetric_dimer_jumps_and_bins() {
        let (eps, k) = (1.5, 1.0);
        let spec = ChainSpec::dimer(eps, eps, k, 1.0, 0.0);
        let (h, es) = eigensystem(&spec);
        for j in 0..2 {
            let x = site_coupling(2, spec.baths[j].attached_site).unwrap();
            let jumps = global_jump_operators(&es, &x, j, SECULAR_TOL).unwrap();
            assert_eq!(jumps.len(), 4);
            let r = std::f64::consts::FRAC_1_SQRT_2;
            for jump in &jumps {
                assert!((jump.weight.norm() - r).abs() < 1e-12);
                assert!(lowering_defect(&h, jump) < 1e-10);
            }
            let bins: Vec<_> = jumps.iter().map(|j| j.bin).collect();
            assert_eq!(bins, vec![0, 0, 1, 1]);
            assert!((jumps[0].omega - (eps - k)).abs() < 1e-12);
            assert!((jumps[1].omega - (eps - k)).abs() < 1e-12);
            assert!((jumps[2].omega - (eps + k)).abs() < 1e-12);
            let channels = global_channels(&jumps, &spec.baths[j]).unwrap();
            assert_eq!(channels.len(), 2);
        }
    }

    #[test]
    fn asymmetric_dimer_weights_match_amplitudes() {
        use crate::operators::dimer_analytic_eigensystem;
        let (e1, e2, k) = (2.0, 1.0, 1.0);
        let spec = ChainSpec::dimer(e1, e2, k, 1.0, 0.5);
        let (_, es) = eigensystem(&spec);
        let a = dimer_analytic_eigensystem(e1, e2, k).unwrap();
        let states = a.states();
        // numeric eigenvector order is ascending: s1, s4, s3, s2
        let num_of = [0usize, 3, 2, 1];
        for j in 0..2 {
            let x = site_coupling(2, j).unwrap();
            let jumps = global_jump_operators(&es, &x, j, SECULAR_TOL).unwrap();
            // (upper, lower, expected weight) from the closed-form amplitudes
            let expected = [
                (1, 2, if j == 0 { a.c32 } else { a.c31 }),
                (1, 3, if j == 0 { a.c42 } else { a.c41 }),
                (2, 0, if j == 0 { a.c31 } else { a.c32 }),
                (3, 0, if j == 0 { a.c41 } else { a.c42 }),
            ];
            assert_eq!(jumps.len(), 4);
            for (up, low, c) in expected {
                let jump = jumps
                    .iter()
                    .find(|jp| jp.upper == num_of[up] && jp.lower == num_of[low])
                    .expect("jump present");
                // weights match up to the eigenvector sign conventions
                let phase_up = es.vector(num_of[up]).dotc(&states[up]);
                let phase_low = es.vector(num_of[low]).dotc(&states[low]);
                let w = jump.weight * phase_low.conj() * phase_up;
                assert!((w.re - c).abs() < 1e-12 && w.im.abs() < 1e-12, "{w} vs {c}");
            }
        }
    }

    #[test]
    fn degenerate_transition_is_reported() {
        let spec = ChainSpec::dimer(1.0, 1.0, 1.0, 1.0, 0.0);
        let (_, es) = eigensystem(&spec);
        let x = site_coupling(2, 0).unwrap();
        assert!(matches!(
            global_jump_operators(&es, &x, 0, SECULAR_TOL),
            Err(Error::DegenerateTransition(_))
        ));
    }

    #[test]
    fn monomer_global_equals_local() {
        let spec = ChainSpec::monomer(1.7, 2.0, 0.3).with_gammas(0.4, 1.6);
        for j in 0..2 {
            let global = global_dissipator(&spec, j);
            let local = build_local_dissipator(&spec, &spec.baths[j]).unwrap();
            assert!(max_diff(&global, &local) <= 1e-12);
        }
    }

    #[test]
    fn zero_temperature_keeps_only_emission() {
        let spec = ChainSpec::monomer(1.0, 0.0, 0.0).with_gammas(0.7, 1.0);
        let d = build_local_dissipator(&spec, &spec.baths[0]).unwrap();
        let lower = site_operator(1, 0, SiteOp::Lower).unwrap();
        let expected = lindblad_term(&lower) * C64::from(0.7);
        assert!((d.matrix() - expected).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn local_dimer_decay_targets_attached_site() {
        let spec = ChainSpec::dimer(1.0, 2.0, 0.5, 0.0, 0.0);
        let d = build_local_dissipator(&spec, &spec.baths[1]).unwrap();
        let lower = site_operator(2, 1, SiteOp::Lower).unwrap();
        assert_eq!(d.matrix(), &lindblad_term(&lower));
    }

    #[test]
    fn liouvillian_without_dissipation_is_unitary() {
        let spec = ChainSpec::monomer(1.0, 0.0, 0.0);
        let h = build_chain_hamiltonian(&spec).unwrap();
        let l = build_liouvillian(h.matrix(), &[]).unwrap();
        // diagonal H: the generator is diagonal with entries -i (E_i - E_j)
        let m = l.matrix();
        for r in 0..4 {
            for c in 0..4 {
                if r != c {
                    assert_eq!(m[(r, c)].norm(), 0.0);
                }
            }
            assert_eq!(m[(r, r)].re, 0.0);
        }
    }

    #[test]
    fn liouvillian_dimension_mismatch() {
        let h = DenseOperator::identity(4, 4);
        let d = Superoperator::zeros(2);
        assert!(matches!(
            build_liouvillian(&h, &[d]),
            Err(Error::DimensionMismatch {
                expected: 4,
                found: 2
            })
        ));
    }

    #[test]
    fn superoperator_apply_matches_channel_apply() {
        let spec = ChainSpec::dimer(1.2, 0.8, 0.4, 1.5, 0.2);
        let ch = local_channel(&spec, &spec.baths[0], 0).unwrap();
        let rho = DenseOperator::from_fn(4, 4, |i, j| {
            C64::new(
                (i + 2 * j) as f64 * 0.1,
                if i == j {
                    0.0
                } else {
                    0.05 * (i as f64 - j as f64)
                },
            )
        });
        let a = ch.superoperator().apply(&rho).unwrap();
        let b = ch.apply(&rho);
        assert!(max_abs(&(a - b)) < 1e-14);
    }
}
