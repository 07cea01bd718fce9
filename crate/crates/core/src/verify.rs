//! Cross-checks of the numerical pipeline against the closed forms on fixed
//! parameter grids.

use std::fmt;

use crate::error::Result;
use crate::model::{Approach, OpenChain};
use crate::observables::{
    dimer_global_heat_flux_analytic, dimer_global_populations_analytic,
    dimer_local_heat_flux_analytic, dimer_local_populations_analytic, monomer_heat_flux_analytic,
    monomer_population_analytic,
};
use crate::spec::ChainSpec;

/// Allowed deviation, relative to `max(1, |closed form|)`.
pub const VERIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub points: usize,
    pub max_deviation: f64,
    /// Parameters at the worst point.
    pub worst: String,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<32} points={:<4} max_dev={:.3e} tol={:.0e} worst[{}]",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.points,
            self.max_deviation,
            self.tolerance,
            self.worst
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

struct Accumulator {
    check: Check,
}

impl Accumulator {
    fn new(name: &'static str) -> Self {
        Self {
            check: Check {
                name,
                points: 0,
                max_deviation: 0.0,
                worst: String::new(),
                tolerance: VERIFY_TOL,
            },
        }
    }

    fn record(&mut self, numeric: f64, closed: f64, at: impl FnOnce() -> String) {
        let dev = (numeric - closed).abs() / closed.abs().max(1.0);
        self.check.points += 1;
        if !(dev <= self.check.max_deviation) {
            self.check.max_deviation = dev;
            self.check.worst = at();
        }
    }
}

fn temperature_grid() -> Vec<(f64, f64)> {
    let t1s = [0.05, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
    let t2s = [0.0, 0.3, 1.5];
    t1s.iter()
        .flat_map(|&a| t2s.iter().map(move |&b| (a, b)))
        .collect()
}

/// Runs all checks.
pub fn run_verification() -> Result<VerificationReport> {
    let temps = temperature_grid();
    let mut checks = Vec::new();

    let mut mono_n = Accumulator::new("monomer population");
    let mut mono_q = Accumulator::new("monomer heat flux");
    for eps in [0.3, 1.0, 2.5] {
        for (g1, g2) in [(1.0, 1.0), (0.4, 0.4), (0.4, 1.7)] {
            for &(t1, t2) in &temps {
                let spec = ChainSpec::monomer(eps, t1, t2).with_gammas(g1, g2);
                let r = OpenChain::build(&spec, Approach::Local)?.solve()?;
                let at = || format!("eps={eps} T1={t1} T2={t2} g1={g1} g2={g2}");
                // e/2 assumes both baths share one rate
                if g1 == g2 {
                    mono_n.record(
                        r.populations[0],
                        monomer_population_analytic(eps, t1, t2)?,
                        at,
                    );
                }
                mono_q.record(
                    r.fluxes[0],
                    monomer_heat_flux_analytic(eps, t1, t2, g1, g2)?,
                    at,
                );
            }
        }
    }
    checks.extend([mono_n.check, mono_q.check]);

    let mut glob_n = Accumulator::new("dimer global populations");
    let mut glob_q = Accumulator::new("dimer global heat flux");
    let mut loc_n = Accumulator::new("dimer local populations");
    let mut loc_q = Accumulator::new("dimer local heat flux");
    let mut balance = Accumulator::new("energy balance Q1 + Q2 = 0");
    for (eps, k) in [
        (1.5, 1.0),
        (0.6, 1.0),
        (1.001, 1.0),
        (2.5, 1.0),
        (10.0, 1.0),
        (1.0, 0.3),
    ] {
        for &(t1, t2) in &temps {
            let spec = ChainSpec::dimer(eps, eps, k, t1, t2);
            let at = || format!("eps={eps} K={k} T1={t1} T2={t2}");

            let g = OpenChain::build(&spec, Approach::Global)?.solve()?;
            let gp = dimer_global_populations_analytic(eps, k, t1, t2)?;
            glob_n.record(g.populations[0], gp.n1, at);
            glob_n.record(g.populations[1], gp.n2, at);
            glob_q.record(
                g.fluxes[0],
                dimer_global_heat_flux_analytic(eps, k, t1, t2, 1.0, 1.0)?.total,
                at,
            );

            let l = OpenChain::build(&spec, Approach::Local)?.solve()?;
            let (n1, n2) = dimer_local_populations_analytic(eps, k, t1, t2)?;
            loc_n.record(l.populations[0], n1, at);
            loc_n.record(l.populations[1], n2, at);
            loc_q.record(
                l.fluxes[0],
                dimer_local_heat_flux_analytic(eps, k, t1, t2, 1.0, 1.0)?,
                at,
            );

            balance.record(g.fluxes[0] + g.fluxes[1], 0.0, || {
                format!("global {}", at())
            });
            balance.record(l.fluxes[0] + l.fluxes[1], 0.0, || format!("local {}", at()));
        }
    }
    checks.extend([
        glob_n.check,
        glob_q.check,
        loc_n.check,
        loc_q.check,
        balance.check,
    ]);

    Ok(VerificationReport { checks })
}
