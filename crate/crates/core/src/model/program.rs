use serde::{Deserialize, Serialize};

use super::SymMatrix;
use crate::error::{Error, Result};
use crate::linalg;

/// Data `(n, p, c, A_0..A_n)` of `min c'x  s.t.  A_0 + sum_i x_i A_i ∈ COP^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CopositiveProgram {
    n: usize,
    p: usize,
    c: Vec<f64>,
    a: Vec<SymMatrix>,
}

impl CopositiveProgram {
    /// `a` holds `A_0, A_1, ..., A_n` in that order.
    pub fn new(c: Vec<f64>, a: Vec<SymMatrix>) -> Result<Self> {
        let n = c.len();
        if n < 1 {
            return Err(Error::input("program needs at least one decision variable"));
        }
        if a.len() != n + 1 {
            return Err(Error::input(format!("expected {} matrices A_0..A_n, got {}", n + 1, a.len())));
        }
        let p = a[0].dim();
        if p < 2 {
            return Err(Error::input(format!("matrix dimension must be at least 2, got {p}")));
        }
        if let Some(i) = a.iter().position(|m| m.dim() != p) {
            return Err(Error::input(format!("A_{i} is {0}x{0}, expected {p}x{p}", a[i].dim())));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("objective holds a non-finite entry"));
        }
        Ok(CopositiveProgram { n, p, c, a })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn objective(&self) -> &[f64] {
        &self.c
    }

    /// `A_0, ..., A_n`.
    pub fn matrices(&self) -> &[SymMatrix] {
        &self.a
    }

    /// `A_j` for `j = 0..=n`.
    pub fn matrix(&self, j: usize) -> &SymMatrix {
        &self.a[j]
    }

    /// Substitutes `x = z + y` for a feasible `y`, replacing `A_0` by `A(y)`.
    pub fn shifted(&self, y: &[f64]) -> Result<Self> {
        let a0 = eval_constraint(self, y)?;
        let mut a = self.a.clone();
        a[0] = a0;
        CopositiveProgram::new(self.c.clone(), a)
    }
}

/// `A(x) = A_0 + sum_i x_i A_i`.
pub fn eval_constraint(prog: &CopositiveProgram, x: &[f64]) -> Result<SymMatrix> {
    if x.len() != prog.n {
        return Err(Error::input(format!("x has length {}, program has n = {}", x.len(), prog.n)));
    }
    let mut out = prog.a[0].clone();
    for (xi, ai) in x.iter().zip(&prog.a[1..]) {
        if *xi != 0.0 {
            out.add_scaled(*xi, ai);
        }
    }
    Ok(out)
}

/// `dim Ker A`, where `Ker A = {D ∈ S(p) : A_j • D = 0, j = 0..n}`.
pub fn ker_dimension(prog: &CopositiveProgram, tol_rank: f64) -> usize {
    let p = prog.p;
    let rows: Vec<Vec<f64>> = prog.a.iter().map(SymMatrix::functional_coeffs).collect();
    p * (p + 1) / 2 - linalg::rank(&rows, tol_rank)
}

/// Decision variables together with the optional semi-infinite slack `mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionPoint {
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

impl DecisionPoint {
    pub fn new(prog: &CopositiveProgram, x: Vec<f64>, mu: Option<f64>) -> Result<Self> {
        if x.len() != prog.n {
            return Err(Error::input(format!("x has length {}, program has n = {}", x.len(), prog.n)));
        }
        Ok(DecisionPoint { x, mu })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn eval_constraint_examples() {
        let e1 = fixtures::e1();
        assert_eq!(eval_constraint(&e1, &[0.0]).unwrap(), SymMatrix::identity(2));
        assert_eq!(eval_constraint(&e1, &[1.0]).unwrap().to_rows(), vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        let e2 = fixtures::e2();
        assert_eq!(eval_constraint(&e2, &[2.0]).unwrap().to_rows(), vec![vec![0.0, 2.0], vec![2.0, 1.0]]);
        assert!(eval_constraint(&e2, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn ker_dimension_examples() {
        assert_eq!(ker_dimension(&fixtures::e2(), 1e-10), 1);
        assert_eq!(ker_dimension(&fixtures::e1(), 1e-10), 1);
        let zero = CopositiveProgram::new(vec![1.0, 1.0], vec![SymMatrix::zeros(3); 3]).unwrap();
        assert_eq!(ker_dimension(&zero, 1e-10), 6);
    }

    #[test]
    fn shift_moves_a0_to_the_feasible_point() {
        let e2 = fixtures::e2();
        let s = e2.shifted(&[1.0]).unwrap();
        assert_eq!(s.matrix(0), &eval_constraint(&e2, &[1.0]).unwrap());
        assert_eq!(s.matrix(1), e2.matrix(1));
    }

    #[test]
    fn rejects_inconsistent_data() {
        assert!(CopositiveProgram::new(vec![], vec![SymMatrix::zeros(2)]).is_err());
        assert!(CopositiveProgram::new(vec![1.0], vec![SymMatrix::zeros(2)]).is_err());
        assert!(CopositiveProgram::new(vec![1.0], vec![SymMatrix::zeros(2), SymMatrix::zeros(3)]).is_err());
        assert!(CopositiveProgram::new(vec![1.0], vec![SymMatrix::zeros(1), SymMatrix::zeros(1)]).is_err());
    }
}
