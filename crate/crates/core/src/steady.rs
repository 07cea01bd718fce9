//! Steady states of a Liouvillian and a Runge-Kutta time-evolution oracle.

use nalgebra::{DVector, FullPivLU, SymmetricEigen};

use crate::dissipators::{devectorize, vectorize, Superoperator};
use crate::error::{Error, Result};
use crate::operators::{max_abs, DenseOperator, C64};

/// Hermitian, unit-trace, positive semidefinite `d x d` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(DenseOperator);

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const POSITIVITY_TOL: f64 = 1e-8;

    /// Checks every invariant.
    pub fn new(m: DenseOperator) -> Result<Self> {
        let rho = Self(m);
        rho.check()?;
        Ok(rho)
    }

    pub(crate) fn from_raw(m: DenseOperator) -> Self {
        Self(m)
    }

    /// Projector onto the basis state `index`.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut m = DenseOperator::zeros(dim, dim);
        m[(index, index)] = C64::from(1.0);
        Self(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(DenseOperator::identity(dim, dim) * C64::from(1.0 / dim as f64))
    }

    pub fn check(&self) -> Result<()> {
        let m = &self.0;
        if !m.is_square() {
            return Err(Error::InvalidDensityMatrix("not square".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        let skew = max_abs(&(m - m.adjoint()));
        if skew > Self::HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "|rho - rho^H| = {skew:e}"
            )));
        }
        let tr = m.trace();
        if (tr - C64::from(1.0)).norm() > Self::TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace = {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -Self::POSITIVITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "eigenvalue {min:e} < 0"
            )));
        }
        Ok(())
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

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.0 + self.0.adjoint()) * C64::from(0.5);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `Tr(A rho)`.
    pub fn expectation(&self, a: &DenseOperator) -> C64 {
        (a * &self.0).trace()
    }

    /// `U^H rho U`, i.e. matrix elements `<u_i| rho |u_j>` for the columns of `u`.
    pub fn in_basis(&self, u: &DenseOperator) -> DenseOperator {
        u.adjoint() * &self.0 * u
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }
}

/// Output of [`solve_steady_state`] with solver diagnostics.
#[derive(Debug, Clone)]
pub struct SteadySolution {
    pub rho: DensityMatrix,
    /// `max |L vec(rho)|` after symmetrization.
    pub residual: f64,
    /// `max |rho - rho^H|` before symmetrization.
    pub asymmetry: f64,
    /// `min |U_kk| / max |U_kk|` of the pivoted LU factors.
    pub pivot_ratio: f64,
    /// Row of `L` replaced by the trace constraint.
    pub replaced_row: usize,
}

/// Below this pivot ratio the augmented system is treated as rank deficient.
pub const KERNEL_RANK_TOL: f64 = 1e-12;

/// Target for `max |L vec(rho)|` relative to `max(1, ||L||_max)`.
pub const STEADY_RESIDUAL_TOL: f64 = 1e-10;

pub fn steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    solve_steady_state(l).map(|s| s.rho)
}

/// Solves `L vec(rho) = 0` with `Tr rho = 1`.
///
/// The population rows `k = i (d + 1)` of `L` sum to `vec(I)^H L = 0`, so one
/// of them is redundant; the one with the largest `|L_kk|` is replaced by the
/// trace row. The augmented system is solved by full-pivot LU.
pub fn solve_steady_state(l: &Superoperator) -> Result<SteadySolution> {
    let d = l.dim();
    let n = d * d;
    let lm = l.matrix();

    let replaced_row = (0..d).map(|i| i * (d + 1)).fold(0, |best, k| {
        if lm[(k, k)].norm() > lm[(best, best)].norm() {
            k
        } else {
            best
        }
    });

    let mut a = lm.clone();
    for c in 0..n {
        a[(replaced_row, c)] = C64::from(0.0);
    }
    for i in 0..d {
        a[(replaced_row, i * (d + 1))] = C64::from(1.0);
    }
    let mut b = DVector::from_element(n, C64::from(0.0));
    b[replaced_row] = C64::from(1.0);

    let lu = FullPivLU::new(a.clone());
    let u = lu.u();
    let (lo, hi) = (0..n).fold((f64::INFINITY, 0.0f64), |(lo, hi), k| {
        let p = u[(k, k)].norm();
        (lo.min(p), hi.max(p))
    });
    let pivot_ratio = if hi > 0.0 { lo / hi } else { 0.0 };
    if !(pivot_ratio >= KERNEL_RANK_TOL) {
        return Err(Error::DegenerateKernel(pivot_ratio));
    }
    let mut x = lu.solve(&b).ok_or(Error::DegenerateKernel(pivot_ratio))?;

    let scale = l.max_abs().max(1.0);
    // one round of iterative refinement on the augmented system
    let r = &b - &a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }

    let raw = devectorize(x.as_slice(), d);
    let asymmetry = max_abs(&(&raw - raw.adjoint()));
    let mut rho = (&raw + raw.adjoint()) * C64::from(0.5);
    let tr = rho.trace();
    rho /= tr;

    let residual = (lm * vectorize(&rho))
        .iter()
        .fold(0.0_f64, |a, z| a.max(z.norm()));
    if !(residual <= STEADY_RESIDUAL_TOL * scale) {
        return Err(Error::NoConvergence(residual));
    }
    Ok(SteadySolution {
        rho: DensityMatrix::new(rho)?,
        residual,
        asymmetry,
        pivot_ratio,
        replaced_row,
    })
}

/// States sampled along an RK4 integration.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// `true` if `max |L vec(rho)|` fell below the requested threshold.
    pub converged: bool,
    pub final_residual: f64,
    /// Largest per-step trace correction divided by the step size.
    pub max_trace_drift_rate: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states
            .last()
            .expect("trajectory holds at least the initial state")
    }
}

/// Stability guard: `dt <= STEP_GUARD / ||L||_max`.
pub const STEP_GUARD: f64 = 0.1;

/// Tolerated trace drift per unit time before renormalization.
pub const TRACE_DRIFT_TOL: f64 = 1e-9;

const MAX_SNAPSHOTS: usize = 1000;

/// Classical fixed-step RK4 on `vec(rho)`, stopping early once
/// `max |L vec(rho)| <= residual_stop`. At most about a thousand evenly spaced
/// snapshots are kept, plus the final state.
pub fn evolve_rk4(
    l: &Superoperator,
    rho0: &DensityMatrix,
    dt: f64,
    t_end: f64,
    residual_stop: f64,
) -> Result<Trajectory> {
    let d = l.dim();
    if rho0.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rho0.dim(),
        });
    }
    let norm = l.max_abs();
    let max_dt = if norm > 0.0 {
        STEP_GUARD / norm
    } else {
        f64::INFINITY
    };
    if !(dt > 0.0) || dt > max_dt {
        return Err(Error::StepTooLarge { dt, max: max_dt });
    }

    let lm = l.matrix();
    let steps = (t_end / dt).ceil().max(0.0) as usize;
    let stride = steps.div_ceil(MAX_SNAPSHOTS).max(1);
    let trace_of = |v: &DVector<C64>| (0..d).map(|i| v[i * (d + 1)]).sum::<C64>();

    let mut v = vectorize(rho0.matrix());
    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    let mut max_drift = 0.0f64;
    let mut converged = false;
    let mut residual = (lm * &v).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    let half = C64::from(0.5 * dt);
    let full = C64::from(dt);
    let sixth = C64::from(dt / 6.0);

    let mut t = 0.0;
    for step in 1..=steps {
        if residual <= residual_stop {
            converged = true;
            break;
        }
        let k1 = lm * &v;
        let k2 = lm * (&v + &k1 * half);
        let k3 = lm * (&v + &k2 * half);
        let k4 = lm * (&v + &k3 * full);
        v += (k1 + (k2 + k3) * C64::from(2.0) + k4) * sixth;
        t = step as f64 * dt;

        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteState(t));
        }
        let tr = trace_of(&v);
        let rate = (tr - C64::from(1.0)).norm() / dt;
        max_drift = max_drift.max(rate);
        if rate > TRACE_DRIFT_TOL {
            return Err(Error::TraceDrift { rate });
        }
        v /= tr;
        residual = (lm * &v).iter().fold(0.0_f64, |a, z| a.max(z.norm()));

        if step % stride == 0 && step != steps {
            times.push(t);
            states.push(DensityMatrix::from_raw(devectorize(v.as_slice(), d)));
        }
    }
    if residual <= residual_stop {
        converged = true;
    }
    if times.last() != Some(&t) {
        times.push(t);
        states.push(DensityMatrix::from_raw(devectorize(v.as_slice(), d)));
    }
    Ok(Trajectory {
        times,
        states,
        converged,
        final_residual: residual,
        max_trace_drift_rate: max_drift,
    })
}

/// `1/2 sum |singular values of (a - b)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let diff = a.matrix() - b.matrix();
    let herm = (&diff + diff.adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::new(herm);
    Ok(0.5 * eig.eigenvalues.iter().map(|x| x.abs()).sum::<f64>())
}
