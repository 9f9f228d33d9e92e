//! Seeded random instances with planted immobile indices.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{orthonormal_basis, project_out};
use crate::model::{CopositiveProgram, SimplexPoint, SymMatrix, DEFAULT_TOL_SUPPORT};
use crate::regularizer::Record;
use crate::sampling::{random_symmetric, sample_face_member, seeded_rng};

/// Builds a program in which every planted point is an immobile index.
///
/// Each `A_i` (`i >= 1`) is a random symmetric matrix projected onto
/// `{D : (Dt)_k = 0 for k in P_+(t)}` for every planted `t`, which forces
/// `t'Dt = 0`. `A_0` is copositive with the same zero pattern, so `x = 0` is
/// feasible and `t'A(x)t = 0` for every `x`. Without planted points `A_0 = I`.
pub fn generate_instance(seed: u64, p: usize, n: usize, planted: &[SimplexPoint]) -> Result<CopositiveProgram> {
    if p < 2 || n < 1 {
        return Err(Error::input(format!("need p >= 2 and n >= 1, got p = {p}, n = {n}")));
    }
    if let Some(t) = planted.iter().find(|t| t.dim() != p) {
        return Err(Error::input(format!("planted point has dimension {}, expected {p}", t.dim())));
    }
    let mut rng = seeded_rng(seed);
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    if planted.is_empty() {
        let mut a = vec![SymMatrix::identity(p)];
        a.extend((0..n).map(|_| random_symmetric(&mut rng, p, -1.0, 1.0)));
        return CopositiveProgram::new(c, a);
    }

    // Functionals D -> (Dt)_k in upper-triangle coordinates.
    let index = |k: usize, l: usize| {
        let (a, b) = if k <= l { (k, l) } else { (l, k) };
        a * p - a * (a + 1) / 2 + b
    };
    let dim = p * (p + 1) / 2;
    let mut functionals = Vec::new();
    for t in planted {
        for k in t.positive_support(DEFAULT_TOL_SUPPORT) {
            let mut f = vec![0.0; dim];
            for (l, &tl) in t.coords().iter().enumerate() {
                f[index(k, l)] += tl;
            }
            functionals.push(f);
        }
    }
    let basis = orthonormal_basis(&functionals, 1e-12);
    if basis.len() >= dim {
        return Err(Error::Generator("the planted points leave no nonzero admissible A_i".into()));
    }

    let records: Vec<Record> =
        planted.iter().map(|t| Record { tau: t.clone(), l: t.positive_support(DEFAULT_TOL_SUPPORT) }).collect();
    let mut a = vec![sample_face_member(&mut rng, p, &records, DEFAULT_TOL_SUPPORT)];
    for i in 1..=n {
        let mut v = random_symmetric(&mut rng, p, -1.0, 1.0).upper_coords();
        project_out(&mut v, &basis);
        project_out(&mut v, &basis);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return Err(Error::Generator(format!("projected A_{i} vanishes")));
        }
        let m = SymMatrix::from_upper_coords(p, &v.iter().map(|x| x / norm).collect::<Vec<_>>());
        for t in planted {
            let dt = m.mul_vec(t.coords());
            let worst = t.positive_support(DEFAULT_TOL_SUPPORT).iter().map(|&k| dt[k].abs()).fold(0.0, f64::max);
            if worst > 1e-12 {
                return Err(Error::Internal(format!("projection left (A_{i} t)_k = {worst:.3e}")));
            }
        }
        a.push(m);
    }
    CopositiveProgram::new(c, a)
}
