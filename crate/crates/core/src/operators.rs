//! Site operators, the XX chain Hamiltonian and its eigensystem.
//!
//! Basis layout: site 0 is the leftmost (slowest-varying) tensor factor and
//! each qubit is ordered `(|1>, |0>)` = (excited, ground), so
//! `sigma_z = diag(+1, -1)` and `sigma_plus |0> = |1>`. Basis index `0` is the
//! fully excited state.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spec::{ChainSpec, MAX_QUBITS};

pub type C64 = Complex64;

/// Dense complex `d x d` matrix on the chain Hilbert space.
pub type DenseOperator = DMatrix<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteOp {
    Raise,
    Lower,
    Z,
}

impl SiteOp {
    fn single_qubit(self) -> DenseOperator {
        match self {
            SiteOp::Raise => DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]),
            SiteOp::Lower => DMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO]),
            SiteOp::Z => DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        }
    }
}

/// Largest entry modulus, `||A||_max`.
pub fn max_abs(m: &DenseOperator) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn commutator(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    a * b - b * a
}

/// Index of the product state with the given per-site excitations.
pub fn basis_index(excited: &[bool]) -> usize {
    excited
        .iter()
        .fold(0, |idx, &up| (idx << 1) | usize::from(!up))
}

/// `I x ... x sigma x ... x I` with `sigma` on `site`.
pub fn site_operator(n_qubits: usize, site: usize, kind: SiteOp) -> Result<DenseOperator> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::NTooLarge(n_qubits));
    }
    if site >= n_qubits {
        return Err(Error::IndexOutOfRange { site, n_qubits });
    }
    let id = DenseOperator::identity(2, 2);
    let sigma = kind.single_qubit();
    let mut out = DenseOperator::identity(1, 1);
    for q in 0..n_qubits {
        out = out.kronecker(if q == site { &sigma } else { &id });
    }
    Ok(out)
}

/// `sigma_plus sigma_minus` on `site`: the excitation number of that qubit.
pub fn number_operator(n_qubits: usize, site: usize) -> Result<DenseOperator> {
    let up = site_operator(n_qubits, site, SiteOp::Raise)?;
    let down = site_operator(n_qubits, site, SiteOp::Lower)?;
    Ok(up * down)
}

/// Dense operator carrying the Hermiticity contract
/// `||A - A^H||_max <= 1e-12 max(1, ||A||_max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(DenseOperator);

impl HermitianOperator {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(m: DenseOperator) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let skew = max_abs(&(&m - m.adjoint()));
        if !skew.is_finite() || skew > Self::TOLERANCE * max_abs(&m).max(1.0) {
            return Err(Error::NotHermitian(skew));
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DenseOperator {
        &self.0
    }

    pub fn into_inner(self) -> DenseOperator {
        self.0
    }
}

impl AsRef<DenseOperator> for HermitianOperator {
    fn as_ref(&self) -> &DenseOperator {
        &self.0
    }
}

/// `Q = sum_q eps_q/2 sigma_z^q + sum_i K_i (sigma_+^i sigma_-^{i+1} + h.c.)`.
pub fn build_chain_hamiltonian(spec: &ChainSpec) -> Result<HermitianOperator> {
    let spec = spec.validate()?;
    let n = spec.n_qubits;
    let d = spec.dim();
    let mut h = DenseOperator::zeros(d, d);
    for (q, &eps) in spec.epsilons.iter().enumerate() {
        h += site_operator(n, q, SiteOp::Z)? * C64::from(0.5 * eps);
    }
    for (i, &k) in spec.couplings.iter().enumerate() {
        let hop = site_operator(n, i, SiteOp::Raise)? * site_operator(n, i + 1, SiteOp::Lower)?;
        h += (&hop + hop.adjoint()) * C64::from(k);
    }
    HermitianOperator::new(h)
}

/// Eigenvalues in ascending order with eigenvectors as columns.
///
/// Phase convention: the largest-modulus entry of each column is real and
/// positive. Entries within a relative `1e-10` of the maximum count as tied;
/// the lowest index wins.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub energies: Vec<f64>,
    pub vectors: DenseOperator,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn vector(&self, p: usize) -> DVector<C64> {
        self.vectors.column(p).into_owned()
    }

    /// `<s_p| A |s_q>` for every pair, i.e. `U^H A U`.
    pub fn to_eigenbasis(&self, a: &DenseOperator) -> DenseOperator {
        self.vectors.adjoint() * a * &self.vectors
    }

    /// `|s_p><s_q|` in the site basis.
    pub fn outer(&self, p: usize, q: usize) -> DenseOperator {
        self.vectors.column(p) * self.vectors.column(q).adjoint()
    }
}

const PHASE_TIE: f64 = 1e-10;

pub fn diagonalize(h: &HermitianOperator) -> Result<EigenSystem> {
    let m = h.matrix();
    let skew = max_abs(&(m - m.adjoint()));
    if skew > HermitianOperator::TOLERANCE * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian(skew));
    }
    let sym = (m + m.adjoint()) * C64::from(0.5);
    let eig =
        SymmetricEigen::try_new(sym, f64::EPSILON, 10_000).ok_or(Error::ConvergenceFailure)?;

    let d = m.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut vectors = DenseOperator::zeros(d, d);
    let mut energies = Vec::with_capacity(d);
    for (col, &src) in order.iter().enumerate() {
        energies.push(eig.eigenvalues[src]);
        let v = eig.eigenvectors.column(src);
        let largest = v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        let pivot = v
            .iter()
            .position(|z| z.norm() >= largest * (1.0 - PHASE_TIE))
            .expect("eigenvector has a nonzero entry");
        let phase = v[pivot].conj() / v[pivot].norm();
        vectors.set_column(col, &(v * phase));
    }
    Ok(EigenSystem { energies, vectors })
}

/// Closed-form eigensystem of the two-qubit XX Hamiltonian.
///
/// States: `s1 = |0,0>` (E1), `s2 = |1,1>` (E2),
/// `s3 = c31 |1,0> + c32 |0,1>` (E3 = alpha), `s4 = c41 |1,0> + c42 |0,1>`
/// (E4 = -alpha).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystemDimer {
    pub c31: f64,
    pub c32: f64,
    pub c41: f64,
    pub c42: f64,
    pub alpha: f64,
    pub delta_eps: f64,
    pub energies: [f64; 4],
}

impl EigenSystemDimer {
    /// The four states `s1..s4` as site-basis column vectors.
    pub fn states(&self) -> [DVector<C64>; 4] {
        let ket = |amps: [(usize, f64); 2]| {
            let mut v = DVector::from_element(4, ZERO);
            for (i, a) in amps {
                v[i] += C64::from(a);
            }
            v
        };
        let s10 = basis_index(&[true, false]);
        let s01 = basis_index(&[false, true]);
        [
            ket([(basis_index(&[false, false]), 1.0), (0, 0.0)]),
            ket([(basis_index(&[true, true]), 1.0), (0, 0.0)]),
            ket([(s10, self.c31), (s01, self.c32)]),
            ket([(s10, self.c41), (s01, self.c42)]),
        ]
    }
}

pub fn dimer_analytic_eigensystem(eps1: f64, eps2: f64, coupling: f64) -> Result<EigenSystemDimer> {
    let k = coupling;
    let delta_eps = eps1 - eps2;
    let alpha = (k * k + delta_eps * delta_eps / 4.0).sqrt();
    let den3 = 2.0 * alpha * alpha - alpha * delta_eps;
    let den4 = 2.0 * alpha * alpha + alpha * delta_eps;
    if !(den3 > 0.0 && den4 > 0.0) {
        return Err(Error::DegenerateDenominator);
    }
    let (n3, n4) = (den3.sqrt(), den4.sqrt());
    let half_sum = (eps1 + eps2) / 2.0;
    Ok(EigenSystemDimer {
        c31: k / n3,
        c32: (alpha - delta_eps / 2.0) / n3,
        c41: k / n4,
        c42: -(alpha + delta_eps / 2.0) / n4,
        alpha,
        delta_eps,
        energies: [-half_sum, half_sum, alpha, -alpha],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn real_diag(m: &DenseOperator) -> Vec<f64> {
        (0..m.nrows()).map(|i| m[(i, i)].re).collect()
    }

    #[test]
    fn single_qubit_z_is_diag_plus_minus() {
        let z = site_operator(1, 0, SiteOp::Z).unwrap();
        assert_eq!(z, DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]));
    }

    #[test]
    fn raise_maps_ground_to_excited() {
        let up = site_operator(1, 0, SiteOp::Raise).unwrap();
        // column 1 is |0>, row 0 is |1>
        assert_eq!(up[(0, 1)], ONE);
        assert_eq!(up.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn raise_on_first_of_two_has_two_unit_entries() {
        let op = site_operator(2, 0, SiteOp::Raise).unwrap();
        let id = DenseOperator::identity(2, 2);
        assert_eq!(op, SiteOp::Raise.single_qubit().kronecker(&id));
        assert_eq!(op.iter().filter(|z| **z == ONE).count(), 2);
        assert_eq!(op.iter().filter(|z| z.norm() > 0.0).count(), 2);
    }

    #[test]
    fn site_operator_errors() {
        assert!(matches!(
            site_operator(2, 2, SiteOp::Z),
            Err(Error::IndexOutOfRange {
                site: 2,
                n_qubits: 2
            })
        ));
        assert!(matches!(
            site_operator(6, 0, SiteOp::Z),
            Err(Error::NTooLarge(6))
        ));
    }

    #[test]
    fn raise_lower_commutator_is_z() {
        for n in 1..=3 {
            for s in 0..n {
                let up = site_operator(n, s, SiteOp::Raise).unwrap();
                let down = site_operator(n, s, SiteOp::Lower).unwrap();
                let z = site_operator(n, s, SiteOp::Z).unwrap();
                assert_eq!(commutator(&up, &down), z);
            }
        }
    }

    #[test]
    fn operators_on_different_sites_commute() {
        let kinds = [SiteOp::Raise, SiteOp::Lower, SiteOp::Z];
        for a in 0..3 {
            for b in 0..3 {
                if a == b {
                    continue;
                }
                for ka in kinds {
                    for kb in kinds {
                        let x = site_operator(3, a, ka).unwrap();
                        let y = site_operator(3, b, kb).unwrap();
                        assert!(max_abs(&commutator(&x, &y)) <= 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn basis_index_layout() {
        assert_eq!(basis_index(&[true, true]), 0);
        assert_eq!(basis_index(&[true, false]), 1);
        assert_eq!(basis_index(&[false, true]), 2);
        assert_eq!(basis_index(&[false, false]), 3);
        let n0 = number_operator(2, 0).unwrap();
        assert_eq!(real_diag(&n0), vec![1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn monomer_hamiltonian() {
        let h = build_chain_hamiltonian(&ChainSpec::monomer(1.5, 1.0, 0.0)).unwrap();
        assert_eq!(real_diag(h.matrix()), vec![0.75, -0.75]);
        assert_eq!(h.matrix()[(0, 1)], ZERO);
    }

    #[test]
    fn symmetric_dimer_spectrum() {
        let (eps, k) = (1.5, 1.0);
        let h = build_chain_hamiltonian(&ChainSpec::dimer(eps, eps, k, 1.0, 0.0)).unwrap();
        let es = diagonalize(&h).unwrap();
        let expected = [-eps, -k, k, eps];
        for (e, x) in es.energies.iter().zip(expected) {
            assert!((e - x).abs() < 1e-12, "{e} vs {x}");
        }
        // |s3> and |s4> carry +-1/sqrt(2) on |10>, |01>
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s4 = es.vector(1);
        let s3 = es.vector(2);
        assert!((s3[1].re - r).abs() < 1e-12 && (s3[2].re - r).abs() < 1e-12);
        assert!((s4[1].re - r).abs() < 1e-12 && (s4[2].re + r).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_dimer_spectrum() {
        let h = build_chain_hamiltonian(&ChainSpec::dimer(2.0, 1.0, 1.0, 1.0, 0.0)).unwrap();
        let es = diagonalize(&h).unwrap();
        let a = 1.25f64.sqrt();
        let expected = [-1.5, -a, a, 1.5];
        for (e, x) in es.energies.iter().zip(expected) {
            assert!((e - x).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_input_keeps_identity_vectors() {
        let m =
            DenseOperator::from_diagonal(&DVector::from_vec(vec![C64::from(2.0), C64::from(-1.0)]));
        let es = diagonalize(&HermitianOperator::new(m).unwrap()).unwrap();
        assert_eq!(es.energies, vec![-1.0, 2.0]);
        assert!((es.vectors[(1, 0)] - ONE).norm() < 1e-15);
        assert!((es.vectors[(0, 1)] - ONE).norm() < 1e-15);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn symmetric_analytic_amplitudes() {
        let es = dimer_analytic_eigensystem(1.5, 1.5, 1.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(es.alpha, 1.0);
        for c in [es.c31, es.c32, es.c41] {
            assert!((c - r).abs() < 1e-15);
        }
        assert!((es.c42 + r).abs() < 1e-15);
    }

    #[test]
    fn asymmetric_analytic_constants() {
        let es = dimer_analytic_eigensystem(2.0, 1.0, 1.0).unwrap();
        assert!((es.alpha - 1.25f64.sqrt()).abs() < 1e-15);
        assert_eq!(es.delta_eps, 1.0);
        assert_eq!(es.energies, [-1.5, 1.5, es.alpha, -es.alpha]);
    }

    #[test]
    fn zero_coupling_has_degenerate_denominator() {
        assert!(matches!(
            dimer_analytic_eigensystem(2.0, 1.0, 0.0),
            Err(Error::DegenerateDenominator)
        ));
        assert!(matches!(
            dimer_analytic_eigensystem(1.0, 1.0, 0.0),
            Err(Error::DegenerateDenominator)
        ));
    }

    #[test]
    fn analytic_states_are_eigenvectors() {
        let (e1, e2, k) = (2.0, 1.0, 1.0);
        let es = dimer_analytic_eigensystem(e1, e2, k).unwrap();
        let h = build_chain_hamiltonian(&ChainSpec::dimer(e1, e2, k, 0.0, 0.0)).unwrap();
        for (state, energy) in es.states().iter().zip(es.energies) {
            let resid = h.matrix() * state - state * C64::from(energy);
            assert!(resid.iter().all(|z| z.norm() < 1e-13));
        }
    }

    proptest! {
        #[test]
        fn eigensystem_invariants(eps in prop::collection::vec(0.1f64..4.0, 3),
                                  ks in prop::collection::vec(-2.0f64..2.0, 2)) {
            let h = build_chain_hamiltonian(&ChainSpec::new(eps, ks, 1.0, 0.0)).unwrap();
            let es = diagonalize(&h).unwrap();
            let hm = h.matrix();
            let scale = max_abs(hm);
            let lam = DenseOperator::from_diagonal(
                &DVector::from_iterator(8, es.energies.iter().map(|&e| C64::from(e))));
            prop_assert!(max_abs(&(hm * &es.vectors - &es.vectors * lam)) <= 1e-10 * scale);
            let gram = es.vectors.adjoint() * &es.vectors;
            prop_assert!(max_abs(&(gram - DenseOperator::identity(8, 8))) <= 1e-10);
            prop_assert!(es.energies.windows(2).all(|w| w[0] <= w[1]));
            // traceless Hamiltonian
            prop_assert!(hm.trace().norm() <= 1e-12);
            // XX coupling conserves the excitation number
            let total = (0..3).map(|s| number_operator(3, s).unwrap())
                .fold(DenseOperator::zeros(8, 8), |a, b| a + b);
            prop_assert!(max_abs(&commutator(hm, &total)) <= 1e-12);
            for p in 0..8 {
                let col = es.vectors.column(p);
                let big = col.iter().fold(0.0f64, |a, z| a.max(z.norm()));
                let pivot = col.iter().position(|z| z.norm() >= big * (1.0 - PHASE_TIE)).unwrap();
                prop_assert!(col[pivot].im == 0.0 && col[pivot].re > 0.0);
            }
        }

        #[test]
        fn analytic_agrees_with_diagonalize(e1 in 0.05f64..5.0, e2 in 0.05f64..5.0,
                                            k in prop_oneof![-3.0f64..-0.01, 0.01f64..3.0]) {
            let es = dimer_analytic_eigensystem(e1, e2, k).unwrap();
            prop_assert!((es.c31.powi(2) + es.c32.powi(2) - 1.0).abs() < 1e-12);
            prop_assert!((es.c41.powi(2) + es.c42.powi(2) - 1.0).abs() < 1e-12);
            prop_assert!(es.energies.iter().sum::<f64>().abs() < 1e-12);
            let mut analytic = es.energies.to_vec();
            analytic.sort_by(f64::total_cmp);
            let h = build_chain_hamiltonian(&ChainSpec::dimer(e1, e2, k, 0.0, 0.0)).unwrap();
            let numeric = diagonalize(&h).unwrap().energies;
            for (a, n) in analytic.iter().zip(&numeric) {
                prop_assert!((a - n).abs() < 1e-10);
            }
        }

        #[test]
        fn diagonalize_is_deterministic(e1 in 0.1f64..3.0, k in 0.0f64..2.0) {
            let h = build_chain_hamiltonian(&ChainSpec::dimer(e1, e1, k, 0.0, 0.0)).unwrap();
            let a = diagonalize(&h).unwrap();
            let b = diagonalize(&h).unwrap();
            prop_assert_eq!(a.energies, b.energies);
            prop_assert_eq!(a.vectors, b.vectors);
        }
    }
}
