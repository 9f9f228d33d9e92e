//! Minimization of quadratic forms over the standard simplex and over the
//! reduced index sets `Omega(V)`, plus the copositivity tests built on top.

mod branch;
mod exact;
mod grid;
mod hull;

pub use branch::{bound_over_omega, OmegaBound, StopRule};
pub use exact::{
    face_stationary_points, is_copositive, is_strictly_copositive, min_quad_over_simplex, min_quad_over_simplex_with,
    FaceCandidate, DEFAULT_P_MAX,
};
pub use grid::{
    covering_radius, grid_denominator, grid_size, min_quad_over_omega, next_composition, scan_simplex_grid, GridScan,
    OmegaGrid,
};
pub use hull::{l1_dist_to_hull, sigma, IndexSet, OmegaDescriptor};

use serde::{Deserialize, Serialize};

use crate::model::SimplexPoint;

/// How an [`OracleResult`] was certified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleCertificate {
    /// Support enumeration: `argmin` solves `D_SS u = alpha 1` on `support`.
    Exact { support: Vec<usize>, multiplier: f64 },
    /// Grid with denominator `1/h`. Every point of the searched set lies within
    /// l1 distance `radius` of a scanned grid point, so the true minimum is at
    /// least `value_lb`. `lipschitz` is `2 max |D_kl|`.
    Grid { h: f64, radius: f64, lipschitz: f64, value_lb: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: f64,
    pub argmin: SimplexPoint,
    pub certificate: OracleCertificate,
}

impl OracleResult {
    /// Certified lower bound on the minimum (the value itself for exact results).
    pub fn value_lb(&self) -> f64 {
        match &self.certificate {
            OracleCertificate::Exact { .. } => self.value,
            OracleCertificate::Grid { value_lb, .. } => *value_lb,
        }
    }
}

/// Outcome of minimizing over `Omega(V)`, which may be empty.
#[derive(Debug, Clone, PartialEq)]
pub enum OmegaMin {
    Min(OracleResult),
    /// No simplex point is at l1 distance `sigma` from `conv V`; the value is `+inf`.
    EmptyIndexSet,
}

impl OmegaMin {
    pub fn value(&self) -> f64 {
        match self {
            OmegaMin::Min(r) => r.value,
            OmegaMin::EmptyIndexSet => f64::INFINITY,
        }
    }

    pub fn value_lb(&self) -> f64 {
        match self {
            OmegaMin::Min(r) => r.value_lb(),
            OmegaMin::EmptyIndexSet => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CopositivityVerdict {
    Copositive { margin: f64 },
    NotCopositive { witness: SimplexPoint, value: f64 },
}

impl CopositivityVerdict {
    pub fn is_copositive(&self) -> bool {
        matches!(self, CopositivityVerdict::Copositive { .. })
    }
}
