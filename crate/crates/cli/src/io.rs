use std::fs;
use std::io::Write;
use std::path::Path;

use ndhermite::{Error, Scalar};
use serde_json::Value;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_DOMAIN: u8 = 3;
pub const EXIT_VALIDATION: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INPUT, message: message.into() }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        CliError { code: EXIT_DOMAIN, message: message.into() }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError { code: EXIT_VALIDATION, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Extrapolation { .. }
            | Error::Undefined(_)
            | Error::SingularInversion
            | Error::ZeroDivisor
            | Error::SingularSystem
            | Error::SystemTooLarge { .. }
            | Error::NotSharedNode { .. } => EXIT_DOMAIN,
            _ => EXIT_INPUT,
        };
        CliError { code, message: e.to_string() }
    }
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    // serde_json errors carry line and column
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Points from a CSV file whose header is `x1,...,xn`.
pub fn read_points<S: Scalar>(path: &Path, n: usize) -> Result<Vec<Vec<S>>, CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let header = rdr.headers().map_err(|e| CliError::input(format!("{}: {e}", path.display())))?.clone();
    let want: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    if header.iter().map(str::trim).collect::<Vec<_>>() != want {
        return Err(CliError::input(format!(
            "{}: header must be {}, found {}",
            path.display(),
            want.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let line = row + 2;
        let rec = rec.map_err(|e| CliError::input(format!("{}: line {line}: {e}", path.display())))?;
        let x = rec
            .iter()
            .map(|f| S::parse(f.trim()))
            .collect::<Result<Vec<S>, _>>()
            .map_err(|e| CliError::input(format!("{}: line {line}: {e}", path.display())))?;
        out.push(x);
    }
    Ok(out)
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::input(e.to_string()))
        }
    }
}

pub fn emit_json(path: Option<&Path>, v: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(v).expect("serializable report");
    text.push('\n');
    emit(path, text.as_bytes())
}

pub fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::input(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::input(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::input(e.to_string()))
}

/// `lo:hi`.
pub fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let (a, b) = s.split_once(':').ok_or_else(|| CliError::input(format!("expected lo:hi, got {s:?}")))?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|_| CliError::input(format!("bad number {t:?} in range {s:?}")));
    let (lo, hi) = (p(a)?, p(b)?);
    if !(lo < hi) {
        return Err(CliError::input(format!("range {s:?} is empty")));
    }
    Ok((lo, hi))
}
