use std::fmt;

use serde::{Deserialize, Serialize};

use super::SimplexPoint;
use crate::error::{Error, Result};

/// Symmetry slack accepted when building from raw rows.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Dense symmetric `p×p` matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    p: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(p: usize) -> Self {
        assert!(p >= 1, "matrix dimension must be positive");
        SymMatrix { p, data: vec![0.0; p * p] }
    }

    pub fn identity(p: usize) -> Self {
        let mut m = Self::zeros(p);
        for k in 0..p {
            m.data[k * p + k] = 1.0;
        }
        m
    }

    /// Builds from rows; rejects asymmetry beyond [`SYMMETRY_TOL`] and
    /// averages the mirrored pair so the stored matrix is exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.len();
        if p == 0 {
            return Err(Error::input("matrix must have at least one row"));
        }
        for (k, r) in rows.iter().enumerate() {
            if r.len() != p {
                return Err(Error::input(format!("row {k} has length {}, expected {p}", r.len())));
            }
            if let Some(v) = r.iter().find(|v| !v.is_finite()) {
                return Err(Error::input(format!("row {k} holds non-finite entry {v}")));
            }
        }
        let mut data = vec![0.0; p * p];
        for k in 0..p {
            for l in k..p {
                let a = rows[k][l];
                let b = rows[l][k];
                if (a - b).abs() > SYMMETRY_TOL {
                    return Err(Error::input(format!("matrix not symmetric at ({k}, {l}): {a} vs {b}")));
                }
                let v = if a == b { a } else { 0.5 * (a + b) };
                data[k * p + l] = v;
                data[l * p + k] = v;
            }
        }
        Ok(SymMatrix { p, data })
    }

    /// Symmetric outer product `u v' + v u'`.
    pub fn sym_outer(u: &[f64], v: &[f64]) -> Self {
        let p = u.len();
        let mut m = Self::zeros(p);
        for k in 0..p {
            for l in 0..p {
                m.data[k * p + l] = u[k] * v[l] + v[k] * u[l];
            }
        }
        m
    }

    /// Rank-one `t t'`.
    pub fn outer(t: &[f64]) -> Self {
        let p = t.len();
        let mut m = Self::zeros(p);
        for k in 0..p {
            for l in 0..p {
                m.data[k * p + l] = t[k] * t[l];
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.data[k * self.p + l]
    }

    /// Sets both `(k, l)` and `(l, k)`.
    pub fn set(&mut self, k: usize, l: usize, v: f64) {
        self.data[k * self.p + l] = v;
        self.data[l * self.p + k] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.data[k * self.p..(k + 1) * self.p]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.p).map(<[f64]>::to_vec).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Trace inner product `A • B`.
    pub fn inner(&self, other: &SymMatrix) -> f64 {
        debug_assert_eq!(self.p, other.p);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        SymMatrix { p: self.p, data: self.data.iter().map(|v| alpha * v).collect() }
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &SymMatrix) {
        debug_assert_eq!(self.p, other.p);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// `D t` for a plain vector.
    pub fn mul_vec(&self, t: &[f64]) -> Vec<f64> {
        self.data.chunks(self.p).map(|r| r.iter().zip(t).map(|(a, b)| a * b).sum()).collect()
    }

    /// `t' D t` for a plain vector of matching length.
    pub fn quad(&self, t: &[f64]) -> f64 {
        let p = self.p;
        let mut s = 0.0;
        for k in 0..p {
            let r = &self.data[k * p..(k + 1) * p];
            let mut acc = 0.0;
            for l in 0..p {
                acc += r[l] * t[l];
            }
            s += t[k] * acc;
        }
        s
    }

    /// Upper-triangle coordinates of `D` with respect to the trace inner
    /// product: `A • D == sum_k a_k d_k` where `a` comes from
    /// [`SymMatrix::functional_coeffs`] and `d` from this method.
    pub fn upper_coords(&self) -> Vec<f64> {
        let p = self.p;
        let mut v = Vec::with_capacity(p * (p + 1) / 2);
        for k in 0..p {
            for l in k..p {
                v.push(self.get(k, l));
            }
        }
        v
    }

    /// Inverse of [`SymMatrix::upper_coords`].
    pub fn from_upper_coords(p: usize, v: &[f64]) -> Self {
        let mut m = Self::zeros(p);
        let mut it = v.iter();
        for k in 0..p {
            for l in k..p {
                m.set(k, l, *it.next().expect("p(p+1)/2 coordinates"));
            }
        }
        m
    }

    /// Coefficients of the functional `D ↦ self • D` in upper-triangle coordinates.
    pub fn functional_coeffs(&self) -> Vec<f64> {
        let p = self.p;
        let mut v = Vec::with_capacity(p * (p + 1) / 2);
        for k in 0..p {
            for l in k..p {
                v.push(if k == l { self.get(k, k) } else { 2.0 * self.get(k, l) });
            }
        }
        v
    }
}

/// `t' D t`.
pub fn quad_form(d: &SymMatrix, t: &SimplexPoint) -> Result<f64> {
    if d.dim() != t.dim() {
        return Err(Error::input(format!(
            "dimension mismatch: matrix is {}x{}, point has {} coordinates",
            d.dim(),
            d.dim(),
            t.dim()
        )));
    }
    Ok(d.quad(t.coords()))
}

/// `e_k' D t`, the `k`-th entry of `D t` (`k` is zero-based).
pub fn row_action(d: &SymMatrix, t: &SimplexPoint, k: usize) -> Result<f64> {
    if d.dim() != t.dim() {
        return Err(Error::input("dimension mismatch between matrix and point"));
    }
    if k >= d.dim() {
        return Err(Error::input(format!("row index {k} out of range for p = {}", d.dim())));
    }
    Ok(d.row(k).iter().zip(t.coords()).map(|(a, b)| a * b).sum())
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SymMatrix::from_rows(&rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.to_rows()
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.p)).finish()
    }
}

impl fmt::Display for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.data.chunks(self.p) {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:>9.4}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> SimplexPoint {
        SimplexPoint::new(c.to_vec()).unwrap()
    }

    fn m(rows: &[&[f64]]) -> SymMatrix {
        SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn quad_form_examples() {
        let half = pt(&[0.5, 0.5]);
        assert_eq!(quad_form(&SymMatrix::identity(2), &half).unwrap(), 0.5);
        assert_eq!(quad_form(&m(&[&[1.0, -1.0], &[-1.0, 1.0]]), &half).unwrap(), 0.0);
        assert_eq!(quad_form(&m(&[&[0.0, -1.0], &[-1.0, 0.0]]), &half).unwrap(), -0.5);
    }

    #[test]
    fn row_action_examples() {
        let d = m(&[&[0.0, 2.0], &[2.0, 1.0]]);
        let e1 = pt(&[1.0, 0.0]);
        assert_eq!(row_action(&d, &e1, 0).unwrap(), 0.0);
        assert_eq!(row_action(&d, &e1, 1).unwrap(), 2.0);
        assert_eq!(row_action(&SymMatrix::identity(2), &pt(&[0.5, 0.5]), 0).unwrap(), 0.5);
        assert!(row_action(&d, &e1, 2).is_err());
    }

    #[test]
    fn dimension_mismatch_is_input_error() {
        let t = pt(&[1.0, 0.0, 0.0]);
        assert!(matches!(quad_form(&SymMatrix::identity(2), &t), Err(Error::Input(_))));
    }

    #[test]
    fn asymmetric_rows_rejected() {
        let err = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap_err();
        assert!(err.to_string().contains("not symmetric"));
    }

    #[test]
    fn functional_coeffs_reproduce_inner_product() {
        let a = m(&[&[1.0, 2.0, -1.0], &[2.0, 0.5, 3.0], &[-1.0, 3.0, 4.0]]);
        let d = m(&[&[0.3, -1.0, 2.0], &[-1.0, 5.0, 0.25], &[2.0, 0.25, -2.0]]);
        let via: f64 = a.functional_coeffs().iter().zip(d.upper_coords()).map(|(x, y)| x * y).sum();
        assert!((via - a.inner(&d)).abs() < 1e-12);
    }
}
