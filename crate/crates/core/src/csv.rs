//! CSV output for sweep tables.
//!
//! Metadata lines start with `#`, then one header line, then data rows.
//! Floats are written with 17 significant digits so they parse back
//! bit-exactly. Skipped grid points appear as comment lines
//! `# skipped: <reason>,<axis>=<value>,approach=<approach>`.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::spec::CONVENTIONS;
use crate::sweep::{RowOutcome, SweepTable};

/// Short fingerprint of the physical conventions baked into the numbers.
pub fn conventions_hash() -> String {
    let digest = Sha256::digest(CONVENTIONS.as_bytes());
    hex::encode(&digest[..8])
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn header(table: &SweepTable) -> Vec<String> {
    let req = &table.request;
    let mut cols = vec![req.axis.name().to_string(), "approach".to_string()];
    if req.outputs.populations {
        cols.extend((1..=req.base.n_qubits).map(|i| format!("n{i}")));
    }
    if req.outputs.heat_flux {
        cols.extend(["Q1".to_string(), "Q2".to_string()]);
    }
    if req.outputs.rho_diagonals {
        cols.extend((0..req.base.dim()).map(|k| format!("rho_{k}")));
    }
    cols.push("residual".to_string());
    cols
}

/// Renders the table, with `notes` as extra metadata lines.
pub fn emit_csv(table: &SweepTable, notes: &[String]) -> String {
    let req = &table.request;
    let mut out = String::new();
    let _ = writeln!(out, "# qchain {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# conventions: {CONVENTIONS}");
    let _ = writeln!(out, "# conventions-sha256: {}", conventions_hash());
    for line in req.to_config_string().lines() {
        let _ = writeln!(out, "# config: {line}");
    }
    for note in notes {
        let _ = writeln!(out, "# note: {note}");
    }
    let _ = writeln!(out, "{}", header(table).join(","));

    for row in &table.rows {
        match &row.outcome {
            RowOutcome::Skipped(reason) => {
                let _ = writeln!(
                    out,
                    "# skipped: {reason},{}={},approach={}",
                    req.axis.name(),
                    format_float(row.axis_value),
                    row.approach
                );
            }
            RowOutcome::Solved(p) => {
                let mut fields = vec![format_float(row.axis_value), row.approach.to_string()];
                if req.outputs.populations {
                    fields.extend(p.populations.iter().map(|x| format_float(*x)));
                }
                if req.outputs.heat_flux {
                    fields.extend(p.fluxes.iter().map(|x| format_float(*x)));
                }
                if req.outputs.rho_diagonals {
                    fields.extend(p.rho_diagonal.iter().map(|x| format_float(*x)));
                }
                fields.push(format_float(p.residual));
                let _ = writeln!(out, "{}", fields.join(","));
            }
        }
    }
    out
}

pub fn write_csv(path: &Path, table: &SweepTable, notes: &[String]) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, emit_csv(table, notes))
}

/// A CSV file read back: comment lines, header and data cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCsv {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ParsedCsv {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric value of `name` in every row with the given approach.
    pub fn values(&self, name: &str, approach: &str) -> Option<Vec<f64>> {
        let col = self.column(name)?;
        let app = self.column("approach")?;
        self.rows
            .iter()
            .filter(|r| r[app] == approach)
            .map(|r| r[col].parse::<f64>().ok())
            .collect()
    }
}

pub fn parse_csv(text: &str) -> Result<ParsedCsv, String> {
    let mut comments = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim_start().to_string());
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let cells: Vec<String> = line.split(',').map(str::to_string).collect();
        match &header {
            None => header = Some(cells),
            Some(h) if h.len() != cells.len() => {
                return Err(format!(
                    "line {}: {} cells, header has {}",
                    i + 1,
                    cells.len(),
                    h.len()
                ))
            }
            Some(_) => rows.push(cells),
        }
    }
    let header = header.ok_or("missing header line")?;
    Ok(ParsedCsv {
        comments,
        header,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Axis, Grid, Outputs, SweepRequest};
    use crate::model::Approach;
    use crate::spec::ChainSpec;
    use crate::sweep::run_sweep;

    fn table() -> SweepTable {
        let req = SweepRequest {
            base: ChainSpec::dimer(1.5, 1.5, 1.0, 1.0, 0.0),
            axis: Axis::T1,
            grid: Grid::Logspace {
                start: 0.01,
                stop: 20.0,
                n: 7,
            },
            approaches: Approach::ALL.to_vec(),
            outputs: Outputs {
                populations: true,
                heat_flux: true,
                rho_diagonals: true,
            },
        };
        run_sweep(&req, 2).unwrap()
    }

    #[test]
    fn floats_round_trip_bit_exactly() {
        for x in [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            0.0,
        ] {
            assert_eq!(
                format_float(x).parse::<f64>().unwrap().to_bits(),
                x.to_bits()
            );
        }
    }

    #[test]
    fn emitted_csv_parses_back() {
        let t = table();
        let text = emit_csv(&t, &["grid chosen for testing".into()]);
        assert!(!text.contains('\r'));
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(parsed.header[..4], ["T1", "approach", "n1", "n2"]);
        assert_eq!(parsed.header.last().unwrap(), "residual");
        assert_eq!(parsed.rows.len(), 14);
        assert!(parsed
            .comments
            .iter()
            .any(|c| c.starts_with("conventions-sha256: ")));
        assert!(parsed
            .comments
            .iter()
            .any(|c| c == "config: grid = logspace(0.01, 20, 7)"));
        assert!(parsed
            .comments
            .iter()
            .any(|c| c == "note: grid chosen for testing"));

        let n1 = parsed.values("n1", "local").unwrap();
        let expected: Vec<f64> = t
            .solved(Approach::Local)
            .map(|(_, p)| p.populations[0])
            .collect();
        assert_eq!(n1, expected);
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(conventions_hash().len(), 16);
        assert_eq!(conventions_hash(), conventions_hash());
    }
}
