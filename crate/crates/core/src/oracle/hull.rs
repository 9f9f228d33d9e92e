//! l1 distance to a convex hull, `sigma(V)`, and the index set `Omega(V)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation};
use crate::model::{SimplexPoint, DEFAULT_TOL_SUPPORT};

/// `rho(t, conv V)` in the l1 norm, solved as a linear program.
pub fn l1_dist_to_hull(t: &SimplexPoint, v: &[SimplexPoint]) -> Result<f64> {
    hull_lp(t.coords(), v)
}

fn hull_lp(t: &[f64], v: &[SimplexPoint]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::input("hull distance needs a nonempty point set"));
    }
    let p = t.len();
    if let Some(bad) = v.iter().find(|w| w.dim() != p) {
        return Err(Error::input(format!("hull point has dimension {}, expected {p}", bad.dim())));
    }
    // Variables: weights w_j >= 0, then slacks s_k >= 0.
    let nv = v.len();
    let mut obj = vec![0.0; nv + p];
    obj[nv..].iter_mut().for_each(|c| *c = 1.0);
    let mut lp = LinearProgram::minimize(obj);
    for j in 0..nv + p {
        lp.set_bounds(j, 0.0, f64::INFINITY);
    }
    for k in 0..p {
        let mut up = vec![0.0; nv + p];
        let mut down = vec![0.0; nv + p];
        for (j, w) in v.iter().enumerate() {
            up[j] = w.coords()[k];
            down[j] = -w.coords()[k];
        }
        up[nv + k] = 1.0;
        down[nv + k] = 1.0;
        lp.add_row(up, Relation::Ge, t[k]);
        lp.add_row(down, Relation::Ge, -t[k]);
    }
    let mut sum = vec![0.0; nv + p];
    sum[..nv].iter_mut().for_each(|c| *c = 1.0);
    lp.add_row(sum, Relation::Eq, 1.0);
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective_value.max(0.0)),
        s => Err(Error::Internal(format!("hull distance LP reported {s:?}"))),
    }
}

/// Smallest positive coordinate over all points of `V`.
pub fn sigma(v: &[SimplexPoint]) -> Result<f64> {
    sigma_with(v, DEFAULT_TOL_SUPPORT)
}

fn sigma_with(v: &[SimplexPoint], tol_support: f64) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::input("sigma(V) needs a nonempty point set"));
    }
    let s =
        v.iter().flat_map(|w| w.coords().iter().copied().filter(|&c| c > tol_support)).fold(f64::INFINITY, f64::min);
    if !s.is_finite() {
        return Err(Error::input("sigma(V): no coordinate exceeds the support tolerance"));
    }
    Ok(s)
}

/// `Omega(V) = { t in T : rho(t, conv V) >= sigma(V) }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OmegaRaw", into = "OmegaRaw")]
pub struct OmegaDescriptor {
    points: Vec<SimplexPoint>,
    sigma: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct OmegaRaw {
    #[serde(rename = "W")]
    w: Vec<SimplexPoint>,
    sigma: f64,
}

impl TryFrom<OmegaRaw> for OmegaDescriptor {
    type Error = Error;

    fn try_from(raw: OmegaRaw) -> Result<Self> {
        let d = OmegaDescriptor::new(raw.w, DEFAULT_TOL_SUPPORT)?;
        if (d.sigma - raw.sigma).abs() > 1e-9 {
            return Err(Error::input(format!("sigma {} does not match W (expected {})", raw.sigma, d.sigma)));
        }
        Ok(d)
    }
}

impl From<OmegaDescriptor> for OmegaRaw {
    fn from(d: OmegaDescriptor) -> Self {
        OmegaRaw { w: d.points, sigma: d.sigma }
    }
}

impl OmegaDescriptor {
    pub fn new(points: Vec<SimplexPoint>, tol_support: f64) -> Result<Self> {
        let sigma = sigma_with(&points, tol_support)?;
        let p = points[0].dim();
        if points.iter().any(|w| w.dim() != p) {
            return Err(Error::input("points of V have different dimensions"));
        }
        let mut lo = vec![f64::INFINITY; p];
        let mut hi = vec![f64::NEG_INFINITY; p];
        for w in &points {
            for k in 0..p {
                lo[k] = lo[k].min(w.coords()[k]);
                hi[k] = hi[k].max(w.coords()[k]);
            }
        }
        Ok(OmegaDescriptor { points, sigma, lo, hi })
    }

    pub fn points(&self) -> &[SimplexPoint] {
        &self.points
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Cheap bounds `lb <= rho(t, conv V) <= ub`: the distance to the nearest
    /// point of `V`, and the distance to the bounding box of `V`.
    pub fn distance_bounds(&self, t: &[f64]) -> (f64, f64) {
        let ub = self
            .points
            .iter()
            .map(|w| w.coords().iter().zip(t).map(|(a, b)| (a - b).abs()).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let lb = t.iter().enumerate().map(|(k, &x)| (self.lo[k] - x).max(x - self.hi[k]).max(0.0)).sum();
        (lb, ub)
    }

    /// Exact `rho(t, conv V)`.
    pub fn distance(&self, t: &[f64]) -> Result<f64> {
        let (lb, ub) = self.distance_bounds(t);
        if self.points.len() == 1 || ub - lb <= 1e-15 {
            return Ok(ub);
        }
        hull_lp(t, &self.points)
    }

    /// Whether `rho(t, conv V) >= threshold`, avoiding the LP when the bounds decide it.
    pub fn distance_at_least(&self, t: &[f64], threshold: f64) -> Result<bool> {
        let (lb, ub) = self.distance_bounds(t);
        if ub < threshold {
            return Ok(false);
        }
        if lb >= threshold {
            return Ok(true);
        }
        Ok(self.distance(t)? >= threshold)
    }

    /// Membership in `Omega(V)` with slack `tol_feas`.
    pub fn contains(&self, t: &[f64], tol_feas: f64) -> Result<bool> {
        self.distance_at_least(t, self.sigma - tol_feas)
    }

    /// `Omega(V)` is empty iff no vertex of `T` belongs to it, because
    /// `rho(., conv V)` is convex and attains its maximum over `T` at a vertex.
    pub fn is_empty(&self, tol_feas: f64) -> Result<bool> {
        let p = self.dim();
        for k in 0..p {
            if self.contains(SimplexPoint::vertex(p, k).coords(), tol_feas)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Index set of a semi-infinite constraint `t'A(x)t + mu >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum IndexSet {
    FullSimplex,
    Omega(OmegaDescriptor),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> SimplexPoint {
        SimplexPoint::new(c.to_vec()).unwrap()
    }

    #[test]
    fn hull_distance_examples() {
        assert!((l1_dist_to_hull(&pt(&[1.0, 0.0]), &[pt(&[0.0, 1.0])]).unwrap() - 2.0).abs() < 1e-12);
        assert!(l1_dist_to_hull(&pt(&[0.5, 0.5]), &[pt(&[0.5, 0.5])]).unwrap().abs() < 1e-12);
        let v = [pt(&[0.5, 0.5]), pt(&[1.0, 0.0])];
        assert!(l1_dist_to_hull(&pt(&[0.75, 0.25]), &v).unwrap().abs() < 1e-12);
        assert!(l1_dist_to_hull(&pt(&[0.75, 0.25]), &[]).is_err());
    }

    #[test]
    fn hull_distance_to_segment_in_three_dimensions() {
        // Segment from e1 to e2; the closest point to e3 is anywhere on it, distance 2.
        let v = [pt(&[1.0, 0.0, 0.0]), pt(&[0.0, 1.0, 0.0])];
        assert!((l1_dist_to_hull(&pt(&[0.0, 0.0, 1.0]), &v).unwrap() - 2.0).abs() < 1e-12);
        let t = pt(&[0.25, 0.25, 0.5]);
        assert!((l1_dist_to_hull(&t, &v).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&[pt(&[0.5, 0.5])]).unwrap(), 0.5);
        assert_eq!(sigma(&[pt(&[1.0, 0.0])]).unwrap(), 1.0);
        let v = [pt(&[1.0 / 3.0, 2.0 / 3.0, 0.0]), pt(&[0.0, 0.0, 1.0])];
        assert!((sigma(&v).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(sigma(&[]).is_err());
    }

    #[test]
    fn membership_and_bounds_agree_with_the_lp() {
        let v = vec![pt(&[0.6, 0.2, 0.2]), pt(&[0.2, 0.2, 0.6])];
        let om = OmegaDescriptor::new(v.clone(), DEFAULT_TOL_SUPPORT).unwrap();
        assert!((om.sigma() - 0.2).abs() < 1e-15);
        for a in 0..=10 {
            for b in 0..=(10 - a) {
                let t = pt(&[a as f64 / 10.0, b as f64 / 10.0, (10 - a - b) as f64 / 10.0]);
                let exact = l1_dist_to_hull(&t, &v).unwrap();
                let (lb, ub) = om.distance_bounds(t.coords());
                assert!(lb <= exact + 1e-12 && exact <= ub + 1e-12);
                assert!((om.distance(t.coords()).unwrap() - exact).abs() < 1e-12);
                assert_eq!(om.contains(t.coords(), 1e-9).unwrap(), exact >= 0.2 - 1e-9);
            }
        }
    }

    #[test]
    fn points_of_v_are_excluded_from_omega() {
        let om = OmegaDescriptor::new(vec![pt(&[1.0, 0.0])], DEFAULT_TOL_SUPPORT).unwrap();
        assert!(!om.contains(&[1.0, 0.0], 1e-9).unwrap());
        assert!(om.contains(&[0.5, 0.5], 1e-9).unwrap());
        assert!(!om.contains(&[0.51, 0.49], 1e-9).unwrap());
    }

    #[test]
    fn emptiness_probe() {
        let om = OmegaDescriptor::new(vec![pt(&[0.5, 0.5])], DEFAULT_TOL_SUPPORT).unwrap();
        assert!(!om.is_empty(1e-9).unwrap());
        // V = {e1, e2}: sigma = 1 and rho(e_k, conv V) = 0 for both vertices.
        let empty = OmegaDescriptor::new(vec![pt(&[1.0, 0.0]), pt(&[0.0, 1.0])], DEFAULT_TOL_SUPPORT).unwrap();
        assert!(empty.is_empty(1e-9).unwrap());
    }

    #[test]
    fn serde_uses_w_and_sigma() {
        let om = OmegaDescriptor::new(vec![pt(&[1.0, 0.0])], DEFAULT_TOL_SUPPORT).unwrap();
        let s = serde_json::to_string(&om).unwrap();
        assert_eq!(s, r#"{"W":[[1.0,0.0]],"sigma":1.0}"#);
        let back: OmegaDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, om);
        assert!(serde_json::from_str::<OmegaDescriptor>(r#"{"W":[[1.0,0.0]],"sigma":0.5}"#).is_err());
    }
}
