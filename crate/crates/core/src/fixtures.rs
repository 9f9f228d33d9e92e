//! Small hand-analysed instances used by tests, benches and the CLI docs.

use crate::model::{CopositiveProgram, SymMatrix};

fn mat(rows: &[&[f64]]) -> SymMatrix {
    SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).expect("fixture is symmetric")
}

/// `A(x) = [[1, x], [x, 1]]`; Slater holds at `x = 0`.
pub fn e1() -> CopositiveProgram {
    CopositiveProgram::new(vec![1.0], vec![SymMatrix::identity(2), mat(&[&[0.0, 1.0], &[1.0, 0.0]])]).unwrap()
}

/// `A(x) = [[0, x], [x, 1]]`; feasible set `x >= 0`, immobile index `(1, 0)`.
pub fn e2() -> CopositiveProgram {
    CopositiveProgram::new(vec![1.0], vec![mat(&[&[0.0, 0.0], &[0.0, 1.0]]), mat(&[&[0.0, 1.0], &[1.0, 0.0]])]).unwrap()
}

/// `A(x) = x [[1, -1], [-1, 1]]`; feasible set `x >= 0`, immobile index `(1/2, 1/2)`.
pub fn e3() -> CopositiveProgram {
    CopositiveProgram::new(vec![1.0], vec![SymMatrix::zeros(2), mat(&[&[1.0, -1.0], &[-1.0, 1.0]])]).unwrap()
}

/// The Horn matrix: copositive, not the sum of a PSD and a nonnegative matrix.
pub fn horn() -> SymMatrix {
    mat(&[
        &[1.0, -1.0, 1.0, 1.0, -1.0],
        &[-1.0, 1.0, -1.0, 1.0, 1.0],
        &[1.0, -1.0, 1.0, -1.0, 1.0],
        &[1.0, 1.0, -1.0, 1.0, -1.0],
        &[-1.0, 1.0, 1.0, -1.0, 1.0],
    ])
}

/// `A(x) = [[0, 0, x1], [0, -x1, x2], [x1, x2, 1]]`; feasible set `x1 = 0, x2 >= 0`.
///
/// The first face only yields `x1 >= 0` from the row at `(1, 0, 0)`; the zero
/// at `(0, 1, 0)` is found in a second iteration, so `m* = 2`. The immobile
/// set is the edge between the two.
pub fn two_step() -> CopositiveProgram {
    CopositiveProgram::new(
        vec![1.0, 1.0],
        vec![
            mat(&[&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]),
            mat(&[&[0.0, 0.0, 1.0], &[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0]]),
            mat(&[&[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0]]),
        ],
    )
    .unwrap()
}
