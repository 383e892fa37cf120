//! Ingestion of tabulated optical data.
//!
//! The on-disk format is plain CSV without a header row. `#` starts a
//! comment; the first comment in the file is kept as the table's provenance
//! note. Two column layouts are accepted, selected by [`TableFormat`]:
//!
//! * `energy_eV,eps2` with eps'' given directly, or
//! * `energy_eV,n,k` with the complex refractive index, converted through
//!   eps'' = 2 n k.

use std::io::BufRead;

use super::{MaterialError, TabulatedEps2};

/// Column layout of an optical data file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    /// Two columns: photon energy in eV, eps''.
    Eps2,
    /// Three columns: photon energy in eV, n, k.
    Nk,
}

fn parse_field(raw: &str, line: usize, what: &str) -> Result<f64, MaterialError> {
    let trimmed = raw.trim();
    trimmed.parse::<f64>().map_err(|_| MaterialError::TableFormat {
        line,
        message: format!("{what} is not a number: {trimmed:?}"),
    })
}

/// Reads an optical table, validating as it goes. Errors carry the
/// one-based source line they point at.
pub fn load_optical_table<R: BufRead>(
    reader: R,
    format: TableFormat,
) -> Result<TabulatedEps2, MaterialError> {
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut provenance: Option<String> = None;
    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line.map_err(|err| MaterialError::TableFormat {
            line: line_no,
            message: format!("read failed: {err}"),
        })?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(comment) = text.strip_prefix('#') {
            if provenance.is_none() {
                let note = comment.trim();
                if !note.is_empty() {
                    provenance = Some(note.to_string());
                }
            }
            continue;
        }
        let fields: Vec<&str> = text.split(',').collect();
        let expected = match format {
            TableFormat::Eps2 => 2,
            TableFormat::Nk => 3,
        };
        if fields.len() != expected {
            return Err(MaterialError::TableFormat {
                line: line_no,
                message: format!("expected {expected} comma-separated fields, got {}", fields.len()),
            });
        }
        let energy = parse_field(fields[0], line_no, "energy")?;
        if !energy.is_finite() || energy <= 0.0 {
            return Err(MaterialError::TableFormat {
                line: line_no,
                message: format!("energy must be positive, got {energy}"),
            });
        }
        if let Some(&(previous, _)) = points.last() {
            if energy <= previous {
                return Err(MaterialError::TableFormat {
                    line: line_no,
                    message: format!("energies must increase strictly, got {energy} after {previous}"),
                });
            }
        }
        let eps2 = match format {
            TableFormat::Eps2 => parse_field(fields[1], line_no, "eps2")?,
            TableFormat::Nk => {
                let n = parse_field(fields[1], line_no, "n")?;
                let k = parse_field(fields[2], line_no, "k")?;
                if n < 0.0 || k < 0.0 {
                    return Err(MaterialError::TableFormat {
                        line: line_no,
                        message: format!("n and k must be nonnegative, got n = {n}, k = {k}"),
                    });
                }
                2.0 * n * k
            }
        };
        if !eps2.is_finite() {
            return Err(MaterialError::TableFormat {
                line: line_no,
                message: format!("eps2 must be finite, got {eps2}"),
            });
        }
        if eps2 < 0.0 {
            return Err(MaterialError::NegativeAbsorption {
                line: line_no,
                value: eps2,
            });
        }
        points.push((energy, eps2));
    }
    // Re-validation inside the constructor is redundant but cheap; keep the
    // constructor as the single source of the type invariants.
    TabulatedEps2::new(points, provenance)
}
