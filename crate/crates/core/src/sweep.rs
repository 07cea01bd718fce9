//! Parameter sweeps over a grid, run in parallel.
//!
//! Rows are computed independently and collected in grid order, so the
//! result does not depend on the number of workers.

use rayon::prelude::*;

use crate::config::{Axis, Outputs, SweepRequest};
use crate::error::{Error, Result};
use crate::model::{Approach, OpenChain};

/// Rows whose residual exceeds this are treated as failures.
pub const ROW_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub populations: Vec<f64>,
    pub fluxes: [f64; 2],
    pub rho_diagonal: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowOutcome {
    Solved(SweepPoint),
    /// The point was skipped; carries the reason tag, e.g. `degenerate-transition`.
    Skipped(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub approach: Approach,
    pub axis_value: f64,
    pub outcome: RowOutcome,
}

/// Rows ordered by approach, then by axis value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub request: SweepRequest,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn axis(&self) -> Axis {
        self.request.axis
    }

    pub fn outputs(&self) -> Outputs {
        self.request.outputs
    }

    pub fn solved(&self, approach: Approach) -> impl Iterator<Item = (f64, &SweepPoint)> + '_ {
        self.rows
            .iter()
            .filter(move |r| r.approach == approach)
            .filter_map(|r| match &r.outcome {
                RowOutcome::Solved(p) => Some((r.axis_value, p)),
                RowOutcome::Skipped(_) => None,
            })
    }

    pub fn skipped(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| matches!(r.outcome, RowOutcome::Skipped(_)))
            .count()
    }
}

fn solve_point(req: &SweepRequest, approach: Approach, x: f64) -> Result<SweepRow> {
    let spec = req.axis.apply(&req.base, x);
    let report = match OpenChain::build(&spec, approach).and_then(|c| c.solve()) {
        Ok(r) => r,
        Err(Error::DegenerateTransition(_)) => {
            return Ok(SweepRow {
                approach,
                axis_value: x,
                outcome: RowOutcome::Skipped("degenerate-transition"),
            })
        }
        Err(e) => return Err(e),
    };
    if !(report.residual <= ROW_RESIDUAL_TOL) {
        return Err(Error::NoConvergence(report.residual));
    }
    Ok(SweepRow {
        approach,
        axis_value: x,
        outcome: RowOutcome::Solved(SweepPoint {
            populations: report.populations,
            fluxes: report.fluxes,
            rho_diagonal: report.rho.diagonal(),
            residual: report.residual,
        }),
    })
}

/// Runs a sweep on `workers` threads (0 means the rayon default).
pub fn run_sweep(req: &SweepRequest, workers: usize) -> Result<SweepTable> {
    let mut approaches = req.approaches.clone();
    approaches.sort();
    approaches.dedup();
    let points = req.grid.points();
    let tasks: Vec<(Approach, f64)> = approaches
        .iter()
        .flat_map(|a| points.iter().map(move |x| (*a, *x)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to start worker threads");
    let rows = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(a, x)| solve_point(req, a, x))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SweepTable {
        request: req.clone(),
        rows,
    })
}
