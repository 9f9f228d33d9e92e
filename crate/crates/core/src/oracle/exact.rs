//! Exact minimization of `t'Dt` over the simplex by enumerating faces.
//!
//! On the relative interior of the face with support `S`, a local minimizer
//! solves `D_SS u = alpha 1, 1'u = 1`. Every global minimizer with minimal
//! support is such a point with a nonsingular system: if the system were
//! singular, moving along its null direction keeps the value constant (or
//! decreases it) until a smaller face is reached. Singular faces are
//! therefore skipped; their boundary faces are enumerated anyway.

use rayon::prelude::*;

use super::{CopositivityVerdict, OracleCertificate, OracleResult};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::Lu;
use crate::model::{SimplexPoint, SymMatrix};

/// Default size limit of the exact oracle.
pub const DEFAULT_P_MAX: usize = 14;

/// A stationary point of `t'Dt` on the relative interior of one face of `T`.
#[derive(Debug, Clone)]
pub struct FaceCandidate {
    /// Bitmask of the face support.
    pub mask: u32,
    pub point: SimplexPoint,
    pub value: f64,
    /// Multiplier `alpha` of the stationarity system.
    pub multiplier: f64,
}

fn solve_face(d: &SymMatrix, mask: u32) -> Option<FaceCandidate> {
    let p = d.dim();
    let idx: Vec<usize> = (0..p).filter(|k| mask & (1 << k) != 0).collect();
    let s = idx.len();
    let m = s + 1;
    let mut kkt = vec![0.0; m * m];
    for (a, &k) in idx.iter().enumerate() {
        for (b, &l) in idx.iter().enumerate() {
            kkt[a * m + b] = d.get(k, l);
        }
        kkt[a * m + s] = -1.0;
        kkt[s * m + a] = 1.0;
    }
    let mut rhs = vec![0.0; m];
    rhs[s] = 1.0;
    let sol = Lu::factor(&kkt, m, 1e-12)?.solve(&rhs);
    if sol[..s].iter().any(|&u| !(u > -1e-12)) {
        return None;
    }
    let mut coords = vec![0.0; p];
    for (a, &k) in idx.iter().enumerate() {
        coords[k] = sol[a];
    }
    let point = SimplexPoint::normalized(coords).ok()?;
    let value = d.quad(point.coords());
    Some(FaceCandidate { mask, point, value, multiplier: sol[s] })
}

/// All face-stationary points with nonnegative coordinates, ordered by support mask.
pub fn face_stationary_points(d: &SymMatrix, p_max: usize) -> Result<Vec<FaceCandidate>> {
    let p = d.dim();
    if p > p_max || p > 30 {
        return Err(Error::Capability(format!(
            "exact oracle enumerates 2^p faces and is limited to p <= {p_max} (got p = {p}); use the grid oracle"
        )));
    }
    // Thread start-up costs more than the work below a few hundred faces.
    if p <= 8 {
        return Ok((1u32..(1u32 << p)).filter_map(|mask| solve_face(d, mask)).collect());
    }
    let masks: Vec<u32> = (1u32..(1u32 << p)).collect();
    Ok(masks.par_iter().filter_map(|&mask| solve_face(d, mask)).collect())
}

/// Exact global minimum of `t'Dt` over the simplex.
pub fn min_quad_over_simplex(d: &SymMatrix) -> Result<OracleResult> {
    min_quad_over_simplex_with(d, DEFAULT_P_MAX)
}

pub fn min_quad_over_simplex_with(d: &SymMatrix, p_max: usize) -> Result<OracleResult> {
    let cands = face_stationary_points(d, p_max)?;
    // Vertices are one-element faces and always solvable, so `cands` is nonempty.
    let best = cands
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .ok_or_else(|| Error::Internal("no face candidate survived".into()))?;
    let support: Vec<usize> = (0..d.dim()).filter(|k| best.mask & (1 << k) != 0).collect();
    Ok(OracleResult {
        value: best.value,
        argmin: best.point,
        certificate: OracleCertificate::Exact { support, multiplier: best.multiplier },
    })
}

pub fn is_copositive(d: &SymMatrix, tol: &Tolerances) -> Result<CopositivityVerdict> {
    let r = min_quad_over_simplex(d)?;
    Ok(if r.value >= -tol.cop {
        CopositivityVerdict::Copositive { margin: r.value }
    } else {
        CopositivityVerdict::NotCopositive { witness: r.argmin, value: r.value }
    })
}

pub fn is_strictly_copositive(d: &SymMatrix, tol: &Tolerances) -> Result<bool> {
    Ok(min_quad_over_simplex(d)?.value > tol.strict)
}
