//! Comma-separated output and input with round-trip-safe numbers.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Shortest decimal form that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Writes `header` and `rows` comma-joined with LF line endings.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::File::create(path)?.write_all(out.as_bytes())?;
    Ok(())
}

/// Reads one sample per line, taking the last comma-separated field of each
/// non-empty line. An unparseable first line is treated as a header;
/// unparseable values anywhere else are reported with their line number.
pub fn read_samples(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let mut samples = Vec::new();
    let mut first_data_line = true;
    for (number, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let field = trimmed.rsplit(',').next().unwrap_or(trimmed).trim();
        match field.parse::<f64>() {
            Ok(value) => samples.push(value),
            Err(_) if first_data_line => {}
            Err(_) => {
                return Err(CliError::usage(format!(
                    "{}:{}: cannot parse {field:?} as a number",
                    path.display(),
                    number + 1
                )));
            }
        }
        first_data_line = false;
    }
    if samples.is_empty() {
        return Err(CliError::usage(format!(
            "{}: no numeric samples found",
            path.display()
        )));
    }
    Ok(samples)
}
