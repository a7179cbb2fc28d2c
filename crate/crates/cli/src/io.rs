//! State and matrix files, built-in states, and number formatting.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use snwit_core::qstate::{self, BipartiteState};
use snwit_core::specbounds::NonnegativeMatrix;
use snwit_core::CMatrix;

use crate::CliError;

/// `{"dimA": 2, "dimB": 2, "matrix": [[[re, im], ...], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(rename = "dimA")]
    pub dim_a: usize,
    #[serde(rename = "dimB")]
    pub dim_b: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

/// `{"rows": n, "cols": n, "entries": [...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<f64>,
}

impl StateFile {
    pub fn from_state(state: &BipartiteState) -> Self {
        let m = state.matrix();
        let matrix = m.row_iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect();
        Self { dim_a: state.dim_a(), dim_b: state.dim_b(), matrix }
    }

    fn to_matrix(&self) -> Result<CMatrix, String> {
        let n = self.dim_a * self.dim_b;
        if self.matrix.len() != n || self.matrix.iter().any(|r| r.len() != n) {
            return Err(format!("matrix must be {n}x{n} for dimA = {}, dimB = {}", self.dim_a, self.dim_b));
        }
        Ok(CMatrix::from_fn(n, n, |r, c| {
            let [re, im] = self.matrix[r][c];
            Complex64::new(re, im)
        }))
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

fn state_matrix(path: &Path) -> Result<(usize, usize, CMatrix), CliError> {
    let file: StateFile = parse_json(path)?;
    let m = file.to_matrix().map_err(|message| CliError::Parse { path: path.to_path_buf(), message })?;
    Ok((file.dim_a, file.dim_b, m))
}

/// A density matrix: Hermitian, unit trace, PSD.
pub fn read_state(path: &Path) -> Result<BipartiteState, CliError> {
    let (a, b, m) = state_matrix(path)?;
    Ok(BipartiteState::new(a, b, m)?)
}

/// Any Hermitian operator, for witness targets.
pub fn read_operator(path: &Path) -> Result<BipartiteState, CliError> {
    let (a, b, m) = state_matrix(path)?;
    Ok(BipartiteState::hermitian(a, b, m)?)
}

pub fn write_state(path: &Path, state: &BipartiteState) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&StateFile::from_state(state)).expect("state file serializes");
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn read_matrix(path: &Path) -> Result<NonnegativeMatrix, CliError> {
    let file: MatrixFile = parse_json(path)?;
    if file.rows != file.cols {
        return Err(CliError::Usage(format!("matrix must be square, got {}x{}", file.rows, file.cols)));
    }
    if file.entries.len() != file.rows * file.cols {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            message: format!("{} entries for a {}x{} matrix", file.entries.len(), file.rows, file.cols),
        });
    }
    Ok(NonnegativeMatrix::from_row_slice(file.rows, &file.entries)?)
}

/// `rho0`, `rho_family:k`, `maxmixed:d`, `maxent:d`.
pub fn builtin(name: &str) -> Result<BipartiteState, CliError> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let param = || -> Result<usize, CliError> {
        arg.and_then(|a| a.parse().ok())
            .ok_or_else(|| CliError::Usage(format!("built-in {head:?} needs an integer parameter, as in {head}:3")))
    };
    let state = match head {
        "rho0" if arg.is_none() => qstate::rho0(),
        "rho_family" => qstate::rho_family(param()?)?,
        "maxmixed" => {
            let d = param()?;
            BipartiteState::maximally_mixed(d, d)?
        }
        "maxent" => BipartiteState::from_pure(&qstate::max_entangled(param()?)?),
        _ => {
            return Err(CliError::Usage(format!(
                "unknown built-in state {name:?}; expected rho0, rho_family:k, maxmixed:d or maxent:d"
            )))
        }
    };
    Ok(state)
}

/// Ten significant digits; fixed notation for moderate exponents.
pub fn fmt_sig10(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.9e}");
    let exp: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).expect("exponent present");
    if (-5..10).contains(&exp) {
        format!("{:.*}", (9 - exp) as usize, x)
    } else {
        sci
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig10_formatting() {
        assert_eq!(fmt_sig10(0.0), "0");
        assert_eq!(fmt_sig10(-0.0), "0");
        assert_eq!(fmt_sig10(1.0), "1.000000000");
        assert_eq!(fmt_sig10(0.25), "0.2500000000");
        assert_eq!(fmt_sig10(1.0 / 3.0), "0.3333333333");
        assert_eq!(fmt_sig10(123.456), "123.4560000");
        assert_eq!(fmt_sig10(-2.5e-3), "-0.002500000000");
        assert_eq!(fmt_sig10(1.5e-12), "1.500000000e-12");
        assert_eq!(fmt_sig10(9.9999999999), "10.00000000");
    }

    #[test]
    fn builtins() {
        assert_eq!(builtin("rho0").unwrap().dim(), 16);
        assert_eq!(builtin("rho_family:3").unwrap().dim_a(), 3);
        assert_eq!(builtin("maxmixed:4").unwrap().dim(), 16);
        assert_eq!(builtin("maxent:2").unwrap().dim(), 4);
        for bad in ["rho1", "rho_family", "rho_family:x", "maxmixed:1", "rho0:2"] {
            assert!(builtin(bad).is_err(), "{bad}");
        }
    }
}
