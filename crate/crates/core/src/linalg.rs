//! Small dense kernels: LU with partial pivoting and a pivoted rank test.

/// Dense LU factorization `P A = L U` of a square row-major matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Factorizes `a` (n×n, row-major). Returns `None` when a pivot falls
    /// below `rel_tol` times the largest entry of `a`.
    pub fn factor(a: &[f64], n: usize, rel_tol: f64) -> Option<Self> {
        debug_assert_eq!(a.len(), n * n);
        let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if n > 0 && scale == 0.0 {
            return None;
        }
        let threshold = rel_tol * scale;
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut piv = col;
            let mut best = lu[col * n + col].abs();
            for row in col + 1..n {
                let v = lu[row * n + col].abs();
                if v > best {
                    best = v;
                    piv = row;
                }
            }
            if best <= threshold {
                return None;
            }
            if piv != col {
                for k in 0..n {
                    lu.swap(col * n + k, piv * n + k);
                }
                perm.swap(col, piv);
            }
            let d = lu[col * n + col];
            for row in col + 1..n {
                let f = lu[row * n + col] / d;
                lu[row * n + col] = f;
                if f != 0.0 {
                    for k in col + 1..n {
                        lu[row * n + k] -= f * lu[col * n + k];
                    }
                }
            }
        }
        Some(Lu { n, lu, perm })
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.lu[i * n + k] * x[k];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.lu[i * n + k] * x[k];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A^T y = c`.
    pub fn solve_transpose(&self, c: &[f64]) -> Vec<f64> {
        let n = self.n;
        // U^T z = c
        let mut z = c.to_vec();
        for i in 0..n {
            let mut s = z[i];
            for k in 0..i {
                s -= self.lu[k * n + i] * z[k];
            }
            z[i] = s / self.lu[i * n + i];
        }
        // L^T w = z
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in i + 1..n {
                s -= self.lu[k * n + i] * z[k];
            }
            z[i] = s;
        }
        let mut y = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = z[i];
        }
        y
    }
}

/// Orthonormal basis of the span of `vectors` by modified Gram-Schmidt;
/// vectors whose remainder has norm at most `tol` are dropped.
pub fn orthonormal_basis(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            project_out(&mut w, &basis);
        }
        let norm = dot(&w, &w).sqrt();
        if norm > tol {
            w.iter_mut().for_each(|x| *x /= norm);
            basis.push(w);
        }
    }
    basis
}

/// Removes from `v` its components along the orthonormal vectors of `basis`.
pub fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for q in basis {
        let c = dot(v, q);
        v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
    }
}

/// Rank of a set of row vectors by Gaussian elimination with complete row
/// pivoting. Each row is first scaled to unit max-norm so the result does
/// not depend on the magnitude of individual rows.
pub fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    let mut work: Vec<Vec<f64>> = rows
        .iter()
        .filter_map(|r| {
            let m = r.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            (m > 0.0).then(|| r.iter().map(|v| v / m).collect())
        })
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let mut piv = None;
        let mut best = tol;
        for (i, r) in work.iter().enumerate().skip(rank) {
            if r[col].abs() > best {
                best = r[col].abs();
                piv = Some(i);
            }
        }
        let Some(p) = piv else { continue };
        work.swap(rank, p);
        let pivot_row = work[rank].clone();
        for r in work.iter_mut().skip(rank + 1) {
            let f = r[col] / pivot_row[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row).skip(col) {
                    *v -= f * pv;
                }
            }
        }
        rank += 1;
        if rank == work.len() {
            break;
        }
    }
    rank
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_schmidt_drops_dependent_vectors() {
        let b = orthonormal_basis(&[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 1.0]], 1e-12);
        assert_eq!(b.len(), 2);
        assert!(dot(&b[0], &b[1]).abs() < 1e-15);
        let mut v = vec![1.0, 0.0, 0.0];
        project_out(&mut v, &b);
        assert!(b.iter().all(|q| dot(&v, q).abs() < 1e-15));
        assert!(dot(&v, &v) > 0.1);
    }

    #[test]
    fn lu_solves_both_orientations() {
        let a = [2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0];
        let lu = Lu::factor(&a, 3, 1e-12).unwrap();
        let x = lu.solve(&[3.0, 5.0, 5.0]);
        for (v, e) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((v - e).abs() < 1e-12);
        }
        let b = [1.0, 2.0, 0.0, 0.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let lu = Lu::factor(&b, 3, 1e-12).unwrap();
        let y = lu.solve_transpose(&[4.0, 2.0, 1.0]);
        // B^T y: [y0 + 3 y2, 2 y0 + y1, y2]
        assert!((y[0] + 3.0 * y[2] - 4.0).abs() < 1e-12);
        assert!((2.0 * y[0] + y[1] - 2.0).abs() < 1e-12);
        assert!((y[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        assert!(Lu::factor(&[1.0, 2.0, 2.0, 4.0], 2, 1e-12).is_none());
    }

    #[test]
    fn rank_ignores_scale() {
        let rows = vec![vec![1e-14, 0.0], vec![0.0, 1e9], vec![2e-14, 1e9]];
        assert_eq!(rank(&rows, 1e-10), 2);
        assert_eq!(rank(&[vec![0.0, 0.0]], 1e-10), 0);
    }
}
