//! JSON problem and matrix files.
//!
//! Problem file: `{"n": int, "p": int, "c": [n floats], "A": [(n+1) p×p matrices]}`.
//! Matrix file: `{"p": int, "D": [[...]]}`. Matrices are row-major.

use serde::{Deserialize, Serialize};

use super::{CopositiveProgram, SymMatrix};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    n: usize,
    p: usize,
    c: Vec<f64>,
    #[serde(rename = "A")]
    a: Vec<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    p: usize,
    #[serde(rename = "D")]
    d: Vec<Vec<f64>>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
}

fn matrix_field(field: &str, p: usize, rows: &[Vec<f64>]) -> Result<SymMatrix> {
    if rows.len() != p {
        return Err(Error::parse(field, format!("dimension mismatch: {} rows, expected p = {p}", rows.len())));
    }
    if let Some(k) = rows.iter().position(|r| r.len() != p) {
        return Err(Error::parse(
            format!("{field}[{k}]"),
            format!("dimension mismatch: {} entries, expected p = {p}", rows[k].len()),
        ));
    }
    SymMatrix::from_rows(rows).map_err(|e| match e {
        Error::Input(msg) => Error::parse(field, msg),
        other => other,
    })
}

pub fn parse_problem(bytes: &[u8]) -> Result<CopositiveProgram> {
    let raw: ProblemFile = serde_json::from_slice(bytes).map_err(json_error)?;
    if raw.c.len() != raw.n {
        return Err(Error::parse("c", format!("dimension mismatch: {} entries, expected n = {}", raw.c.len(), raw.n)));
    }
    if raw.a.len() != raw.n + 1 {
        return Err(Error::parse(
            "A",
            format!("dimension mismatch: {} matrices, expected n + 1 = {}", raw.a.len(), raw.n + 1),
        ));
    }
    let mats = raw
        .a
        .iter()
        .enumerate()
        .map(|(i, rows)| matrix_field(&format!("A[{i}]"), raw.p, rows))
        .collect::<Result<Vec<_>>>()?;
    CopositiveProgram::new(raw.c, mats).map_err(|e| match e {
        Error::Input(msg) => Error::parse("problem", msg),
        other => other,
    })
}

pub fn serialize_problem(prog: &CopositiveProgram) -> Vec<u8> {
    let raw = ProblemFile {
        n: prog.n(),
        p: prog.p(),
        c: prog.objective().to_vec(),
        a: prog.matrices().iter().map(SymMatrix::to_rows).collect(),
    };
    serde_json::to_vec_pretty(&raw).expect("problem data is always serializable")
}

pub fn parse_matrix(bytes: &[u8]) -> Result<SymMatrix> {
    let raw: MatrixFile = serde_json::from_slice(bytes).map_err(json_error)?;
    matrix_field("D", raw.p, &raw.d)
}

pub fn serialize_matrix(d: &SymMatrix) -> Vec<u8> {
    let raw = MatrixFile { p: d.dim(), d: d.to_rows() };
    serde_json::to_vec_pretty(&raw).expect("matrix data is always serializable")
}
