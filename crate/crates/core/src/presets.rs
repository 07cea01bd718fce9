//! Built-in sweeps for the symmetric-dimer figures.

use std::path::{Path, PathBuf};

use crate::config::{Axis, Grid, Outputs, SweepRequest};
use crate::csv::write_csv;
use crate::error::Result;
use crate::model::Approach;
use crate::spec::ChainSpec;
use crate::sweep::run_sweep;

/// T1 grid shared by all presets; a choice of this tool, recorded in every
/// output file.
pub const PRESET_GRID: Grid = Grid::Logspace {
    start: 0.01,
    stop: 100.0,
    n: 200,
};

fn dimer_sweep(eps: f64) -> SweepRequest {
    SweepRequest {
        base: ChainSpec::dimer(eps, eps, 1.0, 1.0, 0.0),
        axis: Axis::T1,
        grid: PRESET_GRID,
        approaches: Approach::ALL.to_vec(),
        outputs: Outputs::default(),
    }
}

/// Populations against T1 for `eps = 1.5`, `K = 1`, `T2 = 0`.
pub fn figure2() -> SweepRequest {
    dimer_sweep(1.5)
}

/// Heat flux against T1 for `K = 1`, `T2 = 0` and `eps` in `{1.001, 2.5, 10}`.
pub fn figure3() -> [(&'static str, SweepRequest); 3] {
    [
        ("figure3a", dimer_sweep(1.001)),
        ("figure3b", dimer_sweep(2.5)),
        ("figure3c", dimer_sweep(10.0)),
    ]
}

pub fn all() -> Vec<(&'static str, SweepRequest)> {
    let mut v = vec![("figure2", figure2())];
    v.extend(figure3());
    v
}

/// Runs every preset and writes `<name>.csv` into `dir`.
pub fn write_figures(dir: &Path, workers: usize) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let note = format!("preset grid {PRESET_GRID} in T1");
    let mut written = Vec::new();
    for (name, req) in all() {
        let table = run_sweep(&req, workers)?;
        let path = dir.join(format!("{name}.csv"));
        write_csv(&path, &table, std::slice::from_ref(&note))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid_requests() {
        for (name, req) in all() {
            let req = req.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(req.grid.points().len(), 200);
            assert_eq!(req.base.couplings, vec![1.0]);
        }
        let eps: Vec<f64> = figure3().iter().map(|(_, r)| r.base.epsilons[0]).collect();
        assert_eq!(eps, vec![1.001, 2.5, 10.0]);
    }
}
