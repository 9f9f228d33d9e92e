use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default slack for simplex membership.
pub const DEFAULT_TOL_FEAS: f64 = 1e-9;
/// Default threshold separating `P_+(t)` from `P_0(t)`.
pub const DEFAULT_TOL_SUPPORT: f64 = 1e-7;

/// A point of the standard simplex `T = {t >= 0, sum t = 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

impl SimplexPoint {
    /// Validates against [`DEFAULT_TOL_FEAS`].
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        Self::with_tol(coords, DEFAULT_TOL_FEAS)
    }

    pub fn with_tol(coords: Vec<f64>, tol_feas: f64) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::input("simplex point needs at least one coordinate"));
        }
        if let Some((k, v)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < -tol_feas) {
            return Err(Error::input(format!("coordinate {k} = {v} is negative")));
        }
        let s: f64 = coords.iter().sum();
        if (s - 1.0).abs() > tol_feas {
            return Err(Error::input(format!("coordinates sum to {s}, not 1")));
        }
        Ok(SimplexPoint { coords })
    }

    /// Projects a nonnegative, nonzero vector onto `T` by clamping and rescaling.
    pub fn normalized(mut v: Vec<f64>) -> Result<Self> {
        for x in v.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let s: f64 = v.iter().sum();
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::input("cannot normalize a zero vector onto the simplex"));
        }
        v.iter_mut().for_each(|x| *x /= s);
        Ok(SimplexPoint { coords: v })
    }

    pub fn vertex(p: usize, k: usize) -> Self {
        let mut coords = vec![0.0; p];
        coords[k] = 1.0;
        SimplexPoint { coords }
    }

    pub fn barycenter(p: usize) -> Self {
        SimplexPoint { coords: vec![1.0 / p as f64; p] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// `P_+(t)` as zero-based indices in increasing order.
    pub fn positive_support(&self, tol_support: f64) -> Vec<usize> {
        (0..self.dim()).filter(|&k| self.coords[k] > tol_support).collect()
    }

    /// `P_0(t)`, the complement of [`SimplexPoint::positive_support`].
    pub fn zero_support(&self, tol_support: f64) -> Vec<usize> {
        (0..self.dim()).filter(|&k| self.coords[k] <= tol_support).collect()
    }

    pub fn linf_distance(&self, other: &SimplexPoint) -> f64 {
        self.coords.iter().zip(&other.coords).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn l1_distance(&self, other: &SimplexPoint) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).abs()).sum()
    }
}

impl TryFrom<Vec<f64>> for SimplexPoint {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        SimplexPoint::new(v)
    }
}

impl From<SimplexPoint> for Vec<f64> {
    fn from(t: SimplexPoint) -> Self {
        t.coords
    }
}
