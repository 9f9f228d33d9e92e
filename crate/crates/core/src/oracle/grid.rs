//! Certified grid minimization over `T` and over `Omega(V)`.
//!
//! Grid points are the compositions `a / N` of `N` into `p` nonnegative
//! parts, so they lie on `T` exactly. Every `t in T` is within l1 distance
//! `r = 2 floor(p/2) ceil(p/2) / (p N)` of some grid point (round the `d`
//! largest fractional parts up; the error is `2 d (p - d) / (p N)` at worst).
//!
//! For `t = g + s` with `sum s = 0` and `|s|_1 <= r`,
//! `q(t) - q(g) = 2 s'Dg + s'Ds >= -r spread(Dg) - r^2 c / 2`, where
//! `spread` is max minus min and `c = max(max D, 0) - min(min D, 0)`. The
//! minimum of that local bound over the scanned points is a certified lower
//! bound; the global `grid_min - r L` with `L = 2 max |D|` is used when it
//! is tighter.

use super::exact::face_stationary_points;
use super::hull::OmegaDescriptor;
use super::{OmegaMin, OracleCertificate, OracleResult};
use crate::error::{Error, Result};
use crate::model::{SimplexPoint, SymMatrix};

/// Grid denominator `N = ceil(1/h)`.
pub fn grid_denominator(h: f64) -> usize {
    (1.0 / h - 1e-9).ceil().max(1.0) as usize
}

/// l1 covering radius of the denominator-`n` grid on the `p`-simplex.
pub fn covering_radius(p: usize, n: usize) -> f64 {
    2.0 * (p / 2) as f64 * p.div_ceil(2) as f64 / (p as f64 * n as f64)
}

/// Number of grid points, `C(n + p - 1, p - 1)`.
pub fn grid_size(p: usize, n: usize) -> f64 {
    let k = p - 1;
    (1..=k).fold(1.0, |acc, i| acc * (n + i) as f64 / i as f64)
}

/// Advances `a` to the next composition in lexicographic order; `false` after the last.
pub fn next_composition(a: &mut [u32]) -> bool {
    let p = a.len();
    let mut tail = 0u32;
    for i in (0..p.saturating_sub(1)).rev() {
        tail += a[i + 1];
        if tail > 0 {
            a[i] += 1;
            a[i + 1..].iter_mut().for_each(|x| *x = 0);
            a[p - 1] = tail - 1;
            return true;
        }
    }
    false
}

fn quad_slack(d: &SymMatrix, r: f64) -> f64 {
    let (mn, mx) = d.as_slice().iter().fold((0.0f64, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    0.5 * r * r * (mx - mn)
}

fn spread(v: &[f64]) -> f64 {
    let (mn, mx) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    mx - mn
}

/// Result of a full-simplex grid scan.
#[derive(Debug, Clone)]
pub struct GridScan {
    pub denominator: usize,
    pub radius: f64,
    pub value: f64,
    pub argmin: Vec<f64>,
    /// Certified lower bound on `min_T q`; `-inf` when the scan stopped early.
    pub value_lb: f64,
    pub stopped_early: bool,
    pub points: u64,
}

impl GridScan {
    pub fn into_result(self, d: &SymMatrix) -> Result<OracleResult> {
        Ok(OracleResult {
            value: self.value,
            argmin: SimplexPoint::normalized(self.argmin)?,
            certificate: OracleCertificate::Grid {
                h: 1.0 / self.denominator as f64,
                radius: self.radius,
                lipschitz: 2.0 * d.max_abs(),
                value_lb: self.value_lb,
            },
        })
    }
}

struct Scanner<'a> {
    d: &'a SymMatrix,
    p: usize,
    n: f64,
    r: f64,
    slack: f64,
    stop_below: Option<f64>,
    a: Vec<u32>,
    da: Vec<f64>,
    best: f64,
    best_a: Vec<u32>,
    lb: f64,
    count: u64,
    stopped: bool,
}

impl Scanner<'_> {
    /// `ys[level]` holds `sum_{i < level} a_i D e_i`.
    fn run(&mut self, level: usize, rem: u32, ys: &mut [Vec<f64>]) {
        let p = self.p;
        if level == p - 2 {
            let (c1, c2) = (p - 2, p - 1);
            let inv_n = 1.0 / self.n;
            let inv_n2 = inv_n * inv_n;
            for j in 0..=rem {
                self.a[c1] = j;
                self.a[c2] = rem - j;
                let (fj, fr) = (j as f64, (rem - j) as f64);
                let mut q = 0.0;
                for k in 0..p {
                    let v = ys[level][k] + fj * self.d.get(k, c1) + fr * self.d.get(k, c2);
                    self.da[k] = v;
                    q += self.a[k] as f64 * v;
                }
                q *= inv_n2;
                self.count += 1;
                if q < self.best {
                    self.best = q;
                    self.best_a.copy_from_slice(&self.a);
                }
                let local = q - self.r * spread(&self.da) * inv_n - self.slack;
                if local < self.lb {
                    self.lb = local;
                }
                if self.stop_below.is_some_and(|s| q < s) {
                    self.stopped = true;
                    return;
                }
            }
            return;
        }
        for j in 0..=rem {
            self.a[level] = j;
            let (head, tail) = ys.split_at_mut(level + 1);
            for k in 0..p {
                tail[0][k] = head[level][k] + j as f64 * self.d.get(k, level);
            }
            self.run(level + 1, rem - j, ys);
            if self.stopped {
                return;
            }
        }
    }
}

/// Scans every grid point of `T` with denominator `n` in lexicographic order.
/// With `stop_below`, the scan ends at the first point whose value is below it.
pub fn scan_simplex_grid(d: &SymMatrix, n: usize, stop_below: Option<f64>) -> GridScan {
    let p = d.dim();
    let r = covering_radius(p, n);
    let mut s = Scanner {
        d,
        p,
        n: n as f64,
        r,
        slack: quad_slack(d, r),
        stop_below,
        a: vec![0; p],
        da: vec![0.0; p],
        best: f64::INFINITY,
        best_a: vec![0; p],
        lb: f64::INFINITY,
        count: 0,
        stopped: false,
    };
    let mut ys = vec![vec![0.0; p]; p - 1];
    s.run(0, n as u32, &mut ys);
    let value_lb = if s.stopped { f64::NEG_INFINITY } else { s.lb.max(s.best - 2.0 * d.max_abs() * r) };
    GridScan {
        denominator: n,
        radius: r,
        value: s.best,
        argmin: s.best_a.iter().map(|&x| x as f64 / n as f64).collect(),
        value_lb,
        stopped_early: s.stopped,
        points: s.count,
    }
}

/// Grid points of `Omega(V)` together with the shell of points within the
/// covering radius of it, built once and reused for many matrices.
#[derive(Debug, Clone)]
pub struct OmegaGrid {
    omega: OmegaDescriptor,
    p: usize,
    denominator: usize,
    radius: f64,
    tol_feas: f64,
    /// Flattened coordinates of grid points in `Omega(V)`.
    members: Vec<f64>,
    /// Grid points with `sigma - r <= rho < sigma`; they cover the rest of `Omega(V)`.
    shell: Vec<f64>,
}

impl OmegaGrid {
    /// Enumerates the grid with denominator `ceil(1/h)`, coarsened until the
    /// full grid has at most `max_points` points.
    pub fn build(omega: &OmegaDescriptor, h: f64, max_points: usize, tol_feas: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::input(format!("grid resolution must be positive, got {h}")));
        }
        let p = omega.dim();
        let mut n = grid_denominator(h);
        while n > 1 && grid_size(p, n) > max_points as f64 {
            n -= (n / 16).max(1);
        }
        let radius = covering_radius(p, n);
        let (mut members, mut shell) = (Vec::new(), Vec::new());
        let mut a = vec![0u32; p];
        a[p - 1] = n as u32;
        let mut t = vec![0.0; p];
        let member_thr = omega.sigma() - tol_feas;
        let shell_thr = member_thr - radius;
        loop {
            for k in 0..p {
                t[k] = a[k] as f64 / n as f64;
            }
            let (lb, ub) = omega.distance_bounds(&t);
            if ub >= shell_thr {
                let rho = if lb >= member_thr { lb } else { omega.distance(&t)? };
                if rho >= member_thr {
                    members.extend_from_slice(&t);
                } else if rho >= shell_thr {
                    shell.extend_from_slice(&t);
                }
            }
            if !next_composition(&mut a) {
                break;
            }
        }
        Ok(OmegaGrid { omega: omega.clone(), p, denominator: n, radius, tol_feas, members, shell })
    }

    pub fn omega(&self) -> &OmegaDescriptor {
        &self.omega
    }

    pub fn h(&self) -> f64 {
        1.0 / self.denominator as f64
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn member_count(&self) -> usize {
        self.members.len() / self.p
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Certified minimum of `t'Dt` over `Omega(V)`. Exact face-stationary
    /// points of `D` lying in `Omega(V)` are added as candidates when
    /// `p <= p_max`, so exact minimizers are found whenever they are interior
    /// to a face and in the set.
    pub fn minimize(&self, d: &SymMatrix, p_max: usize) -> Result<OmegaMin> {
        if d.dim() != self.p {
            return Err(Error::input(format!("matrix dimension {} does not match grid dimension {}", d.dim(), self.p)));
        }
        if self.is_empty() {
            return Ok(OmegaMin::EmptyIndexSet);
        }
        let p = self.p;
        let r = self.radius;
        let slack = quad_slack(d, r);
        let mut dg = vec![0.0; p];
        let mut best = f64::INFINITY;
        let mut best_t: &[f64] = &self.members[..p];
        let mut lb = f64::INFINITY;
        let mut cover_min = f64::INFINITY;
        for (is_member, pts) in [(true, &self.members), (false, &self.shell)] {
            for g in pts.chunks_exact(p) {
                let mut q = 0.0;
                for k in 0..p {
                    let row = d.row(k);
                    let v: f64 = row.iter().zip(g).map(|(x, y)| x * y).sum();
                    dg[k] = v;
                    q += g[k] * v;
                }
                if is_member && q < best {
                    best = q;
                    best_t = g;
                }
                cover_min = cover_min.min(q);
                lb = lb.min(q - r * spread(&dg) - slack);
            }
        }
        let mut argmin = best_t.to_vec();
        if p <= p_max {
            for c in face_stationary_points(d, p_max)? {
                if c.value < best && self.omega.contains(c.point.coords(), self.tol_feas)? {
                    best = c.value;
                    argmin = c.point.coords().to_vec();
                }
            }
        }
        let lipschitz = 2.0 * d.max_abs();
        let value_lb = lb.max(cover_min - lipschitz * r).min(best);
        Ok(OmegaMin::Min(OracleResult {
            value: best,
            argmin: SimplexPoint::normalized(argmin)?,
            certificate: OracleCertificate::Grid { h: self.h(), radius: r, lipschitz, value_lb },
        }))
    }
}

/// Builds the Omega grid at resolution `h` (at most 400 000 points) and minimizes over it.
pub fn min_quad_over_omega(d: &SymMatrix, omega: &OmegaDescriptor, h: f64) -> Result<OmegaMin> {
    OmegaGrid::build(omega, h, 400_000, 1e-9)?.minimize(d, super::DEFAULT_P_MAX)
}
