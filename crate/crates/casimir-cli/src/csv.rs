//! Sweep results as CSV.
//!
//! Output is byte deterministic: fixed header, every number in 9
//! significant-digit scientific notation, `\n` line endings, no locale
//! influence. The same sweep always serializes to the same bytes.

use std::io::Write;

use thiserror::Error;

use casimir::SweepResult;

pub const CSV_HEADER: &str =
    "axis_value,pressure_Pa,ideal_pressure_Pa,reduction_factor,rel_err_estimate";

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("sweep produced no rows, refusing to write an empty table")]
    Empty,
    #[error("could not write csv: {0}")]
    Io(#[from] std::io::Error),
}

/// `{:.8e}` prints 9 significant digits with a bare exponent, e.g.
/// `-5.67608149e0`. Every number the tool emits goes through this.
pub fn sci(value: f64) -> String {
    format!("{value:.8e}")
}

/// Writes the sweep as CSV. An empty result is an input error and writes
/// nothing.
pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: &mut W) -> Result<(), CsvError> {
    if result.rows.is_empty() {
        return Err(CsvError::Empty);
    }
    let mut buffer = String::with_capacity(64 * (result.rows.len() + 1));
    buffer.push_str(CSV_HEADER);
    buffer.push('\n');
    for row in &result.rows {
        buffer.push_str(&sci(row.axis_value));
        buffer.push(',');
        buffer.push_str(&sci(row.pressure_pa));
        buffer.push(',');
        buffer.push_str(&sci(row.ideal_pressure_pa));
        buffer.push(',');
        buffer.push_str(&sci(row.reduction_factor));
        buffer.push(',');
        buffer.push_str(&sci(row.diagnostics.rel_err_estimate));
        buffer.push('\n');
    }
    out.write_all(buffer.as_bytes())?;
    Ok(())
}
