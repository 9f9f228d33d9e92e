//! Seeded random matrices: generic copositive matrices and members of the
//! faces described by index records.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{orthonormal_basis, project_out};
use crate::model::SymMatrix;
use crate::regularizer::Record;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric matrix with independent entries uniform on `[lo, hi)`.
pub fn random_symmetric<R: Rng>(rng: &mut R, p: usize, lo: f64, hi: f64) -> SymMatrix {
    let mut m = SymMatrix::zeros(p);
    for k in 0..p {
        for l in k..p {
            m.set(k, l, rng.gen_range(lo..hi));
        }
    }
    m
}

fn sparse_nonnegative<R: Rng>(rng: &mut R, p: usize) -> SymMatrix {
    let mut m = SymMatrix::zeros(p);
    for k in 0..p {
        for l in k..p {
            if rng.gen_bool(0.5) {
                m.set(k, l, rng.gen_range(0.0..1.0));
            }
        }
    }
    m
}

fn gram<R: Rng>(rng: &mut R, p: usize, rank: usize, orthogonal_to: &[Vec<f64>]) -> SymMatrix {
    let mut g = SymMatrix::zeros(p);
    for _ in 0..rank {
        let mut b: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
        project_out(&mut b, orthogonal_to);
        project_out(&mut b, orthogonal_to);
        g.add_scaled(1.0, &SymMatrix::outer(&b));
    }
    g
}

/// `N + B B'` with `N` entrywise nonnegative (about half its entries zero)
/// and `B` a random `p x 2` matrix. Every such matrix is copositive.
pub fn random_copositive<R: Rng>(rng: &mut R, p: usize) -> SymMatrix {
    let mut d = sparse_nonnegative(rng, p);
    d.add_scaled(1.0, &gram(rng, p, 2, &[]));
    d
}

/// A copositive matrix `D` with `e_k'D tau = 0` for `k in L` and
/// `e_k'D tau >= 0` otherwise, for every record `(tau, L)`.
///
/// `D = N + B B'`, where `N >= 0` vanishes on the pairs `(k, l)` with
/// `k in L(i)` and `l in P_+(tau(i))`, and the columns of `B` are orthogonal
/// to every `tau(i)`.
pub fn sample_face_member<R: Rng>(rng: &mut R, p: usize, records: &[Record], tol_support: f64) -> SymMatrix {
    let mut n = sparse_nonnegative(rng, p);
    for r in records {
        for &k in &r.l {
            for l in r.tau.positive_support(tol_support) {
                n.set(k, l, 0.0);
            }
        }
    }
    let taus: Vec<Vec<f64>> = records.iter().map(|r| r.tau.coords().to_vec()).collect();
    let basis = orthonormal_basis(&taus, 1e-12);
    n.add_scaled(1.0, &gram(rng, p, 2, &basis));
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::model::SimplexPoint;
    use crate::oracle::is_copositive;

    #[test]
    fn samples_are_copositive_and_deterministic() {
        let tol = Tolerances::default();
        let mut rng = seeded_rng(7);
        let a: Vec<SymMatrix> = (0..20).map(|_| random_copositive(&mut rng, 4)).collect();
        assert!(a.iter().all(|d| is_copositive(d, &tol).unwrap().is_copositive()));
        let mut rng = seeded_rng(7);
        let b: Vec<SymMatrix> = (0..20).map(|_| random_copositive(&mut rng, 4)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn face_members_satisfy_the_rows() {
        let tol = Tolerances::default();
        let records = vec![
            Record { tau: SimplexPoint::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap(), l: vec![0, 1, 3] },
            Record { tau: SimplexPoint::new(vec![0.0, 0.0, 0.0, 1.0]).unwrap(), l: vec![3] },
        ];
        let mut rng = seeded_rng(3);
        for _ in 0..50 {
            let d = sample_face_member(&mut rng, 4, &records, tol.support);
            assert!(is_copositive(&d, &tol).unwrap().is_copositive());
            for r in &records {
                let dt = d.mul_vec(r.tau.coords());
                for k in 0..4 {
                    if r.l.contains(&k) {
                        assert!(dt[k].abs() < 1e-12);
                    } else {
                        assert!(dt[k] >= -1e-12);
                    }
                }
            }
        }
    }
}
