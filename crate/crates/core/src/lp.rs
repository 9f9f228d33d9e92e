//! Dense two-phase simplex method with primal and dual extraction.
//!
//! Problems are `min c'x` over rows `a'x (<=|=|>=) b` and per-variable
//! bounds `lo <= x <= hi` (either side may be infinite). Row multipliers
//! follow the Lagrangian sign convention of a minimization: `>=` rows get
//! `y >= 0`, `<=` rows get `y <= 0`, `=` rows are free, and at an optimum
//! `c - A'y` is the vector of bound multipliers.
//!
//! Pivoting uses Dantzig's rule with lowest-index tie breaking and switches
//! to Bland's rule for the remainder of a phase once a run of degenerate
//! pivots suggests cycling. The optimal basis is refactorized before the
//! primal and dual vectors are read off.

use crate::error::{Error, Result};
use crate::linalg::{dot, Lu};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// `(lo, hi)` per variable; defaults to free.
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// `min objective'x` with all variables free and no rows.
    pub fn minimize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram { objective, constraints: Vec::new(), bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> usize {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) {
        self.bounds[var] = (lo, hi);
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::input("bounds length differs from variable count"));
        }
        for (i, r) in self.constraints.iter().enumerate() {
            if r.coeffs.len() != n {
                return Err(Error::input(format!("row {i} has {} coefficients, expected {n}", r.coeffs.len())));
            }
            if !r.rhs.is_finite() || r.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(Error::input(format!("row {i} holds non-finite data")));
            }
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::input(format!("variable {j} has invalid bounds [{lo}, {hi}]")));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("objective holds non-finite data"));
        }
        Ok(())
    }

    /// Largest row violation of `x` (bounds included).
    pub fn primal_residual(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for r in &self.constraints {
            let v = dot(&r.coeffs, x) - r.rhs;
            let viol = match r.relation {
                Relation::Le => v.max(0.0),
                Relation::Ge => (-v).max(0.0),
                Relation::Eq => v.abs(),
            };
            worst = worst.max(viol);
        }
        for (xj, &(lo, hi)) in x.iter().zip(&self.bounds) {
            worst = worst.max(lo - xj).max(xj - hi);
        }
        worst
    }

    /// Dual objective `b'y + sum_j (r_j^+ lo_j - r_j^- hi_j)` with `r = c - A'y`.
    /// Infinite when `r` puts weight on an infinite bound.
    pub fn dual_objective(&self, y: &[f64]) -> f64 {
        let mut val: f64 = self.constraints.iter().zip(y).map(|(r, yi)| r.rhs * yi).sum();
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            let rj = self.objective[j] - self.constraints.iter().zip(y).map(|(r, yi)| r.coeffs[j] * yi).sum::<f64>();
            if rj > 0.0 {
                val += if lo.is_finite() { rj * lo } else { f64::NEG_INFINITY };
            } else if rj < 0.0 {
                val += if hi.is_finite() { rj * hi } else { f64::NEG_INFINITY };
            }
        }
        val
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal point, or the last feasible vertex when unbounded.
    pub primal: Vec<f64>,
    /// One multiplier per row (meaningful at `Optimal`).
    pub dual: Vec<f64>,
    /// `c - A'y`: multipliers of the variable bounds.
    pub reduced_costs: Vec<f64>,
    pub objective_value: f64,
    /// Improving direction when `Unbounded`.
    pub ray: Option<Vec<f64>>,
    /// Basic standard-form columns at termination, in row order.
    pub basis: Vec<usize>,
}

const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;

/// Original variable expressed through standard-form columns:
/// `x = offset + sum coef * s_col`.
#[derive(Debug, Clone)]
struct VarMap {
    offset: f64,
    cols: Vec<(usize, f64)>,
}

struct StdForm {
    m: usize,
    ncols: usize,
    /// Row-major `m × ncols`, rows already sign-normalized so `b >= 0`.
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    row_sign: Vec<f64>,
    vars: Vec<VarMap>,
    orig_rows: usize,
}

impl StdForm {
    fn build(lp: &LinearProgram) -> StdForm {
        let n = lp.num_vars();
        let mut vars = Vec::with_capacity(n);
        let mut ncols = 0;
        let mut bound_rows: Vec<(usize, f64)> = Vec::new();
        for &(lo, hi) in &lp.bounds {
            let vm = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => {
                    bound_rows.push((ncols, hi - lo));
                    VarMap { offset: lo, cols: vec![(ncols, 1.0)] }
                }
                (true, false) => VarMap { offset: lo, cols: vec![(ncols, 1.0)] },
                (false, true) => VarMap { offset: hi, cols: vec![(ncols, -1.0)] },
                (false, false) => {
                    ncols += 1;
                    VarMap { offset: 0.0, cols: vec![(ncols - 1, 1.0), (ncols, -1.0)] }
                }
            };
            ncols += 1;
            vars.push(vm);
        }
        let structural = ncols;
        let orig_rows = lp.constraints.len();
        let m = orig_rows + bound_rows.len();
        let slack_count = lp.constraints.iter().filter(|r| r.relation != Relation::Eq).count() + bound_rows.len();
        let total = structural + slack_count;

        let mut a = vec![0.0; m * total];
        let mut b = vec![0.0; m];
        let mut c = vec![0.0; total];
        for (j, vm) in vars.iter().enumerate() {
            for &(col, coef) in &vm.cols {
                c[col] += coef * lp.objective[j];
            }
        }
        let mut next_slack = structural;
        for (i, r) in lp.constraints.iter().enumerate() {
            let mut rhs = r.rhs;
            for (j, vm) in vars.iter().enumerate() {
                let aij = r.coeffs[j];
                if aij == 0.0 {
                    continue;
                }
                rhs -= aij * vm.offset;
                for &(col, coef) in &vm.cols {
                    a[i * total + col] += aij * coef;
                }
            }
            match r.relation {
                Relation::Le => {
                    a[i * total + next_slack] = 1.0;
                    next_slack += 1;
                }
                Relation::Ge => {
                    a[i * total + next_slack] = -1.0;
                    next_slack += 1;
                }
                Relation::Eq => {}
            }
            b[i] = rhs;
        }
        for (k, &(col, width)) in bound_rows.iter().enumerate() {
            let i = orig_rows + k;
            a[i * total + col] = 1.0;
            a[i * total + next_slack] = 1.0;
            next_slack += 1;
            b[i] = width;
        }
        let mut row_sign = vec![1.0; m];
        for i in 0..m {
            if b[i] < 0.0 {
                row_sign[i] = -1.0;
                b[i] = -b[i];
                for v in &mut a[i * total..(i + 1) * total] {
                    *v = -*v;
                }
            }
        }
        StdForm { m, ncols: total, a, b, c, row_sign, vars, orig_rows }
    }

    fn to_original(&self, s: &[f64]) -> Vec<f64> {
        self.vars.iter().map(|vm| vm.offset + vm.cols.iter().map(|&(col, coef)| coef * s[col]).sum::<f64>()).collect()
    }

    fn direction_to_original(&self, d: &[f64]) -> Vec<f64> {
        self.vars.iter().map(|vm| vm.cols.iter().map(|&(col, coef)| coef * d[col]).sum::<f64>()).collect()
    }
}

/// Simplex tableau over `[A | I] x = b` with artificial columns appended.
struct Tableau {
    m: usize,
    width: usize,
    t: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
}

enum PhaseEnd {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn new(sf: &StdForm) -> Self {
        let m = sf.m;
        let ncols = sf.ncols;
        let width = ncols + m + 1;
        let mut t = vec![0.0; m * width];
        for i in 0..m {
            t[i * width..i * width + ncols].copy_from_slice(&sf.a[i * ncols..(i + 1) * ncols]);
            t[i * width + ncols + i] = 1.0;
            t[i * width + width - 1] = sf.b[i];
        }
        Tableau { m, width, t, obj: vec![0.0; width], basis: (ncols..ncols + m).collect() }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    /// Resets the objective row to reduced costs of `cost` under the current basis.
    fn price(&mut self, cost: &[f64]) {
        let w = self.width;
        self.obj.iter_mut().for_each(|v| *v = 0.0);
        self.obj[..cost.len()].copy_from_slice(cost);
        for i in 0..self.m {
            let cb = cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..w {
                    self.obj[j] -= cb * self.t[i * w + j];
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width;
        let inv = 1.0 / self.t[r * w + e];
        for j in 0..w {
            self.t[r * w + j] *= inv;
        }
        self.t[r * w + e] = 1.0;
        let (head, rest) = self.t.split_at_mut(r * w);
        let (prow, tail) = rest.split_at_mut(w);
        for row in head.chunks_mut(w).chain(tail.chunks_mut(w)) {
            let f = row[e];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[e] = 0.0;
            }
        }
        let f = self.obj[e];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(prow.iter()) {
                *v -= f * pv;
            }
            self.obj[e] = 0.0;
        }
        self.basis[r] = e;
    }

    /// With `phase_one`, a column with a negative reduced cost but no
    /// admissible pivot is roundoff (the phase-one objective is bounded) and is
    /// skipped until the next pivot.
    fn run(&mut self, enter_limit: usize, tol: f64, max_iter: usize, phase_one: bool) -> Result<PhaseEnd> {
        let mut bland = false;
        let mut degenerate = 0usize;
        let mut skip = vec![false; enter_limit];
        for _ in 0..max_iter {
            let entering = if bland {
                (0..enter_limit).find(|&j| !skip[j] && self.obj[j] < -tol)
            } else {
                let mut best = None;
                let mut best_v = -tol;
                for j in 0..enter_limit {
                    if !skip[j] && self.obj[j] < best_v {
                        best_v = self.obj[j];
                        best = Some(j);
                    }
                }
                best
            };
            let Some(e) = entering else {
                return Ok(PhaseEnd::Optimal);
            };
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.m {
                let a = self.at(i, e);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        if ratio < best_ratio - 1e-12 {
                            true
                        } else if ratio <= best_ratio + 1e-12 {
                            if bland {
                                self.basis[i] < self.basis[l]
                            } else {
                                let (al, ai) = (self.at(l, e), a);
                                ai > al || (ai == al && self.basis[i] < self.basis[l])
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    best_ratio = best_ratio.min(ratio);
                    leave = Some(i);
                }
            }
            let Some(r) = leave else {
                if phase_one {
                    skip[e] = true;
                    continue;
                }
                return Ok(PhaseEnd::Unbounded(e));
            };
            if best_ratio <= 1e-12 {
                degenerate += 1;
                if degenerate >= DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.pivot(r, e);
            skip.iter_mut().for_each(|v| *v = false);
        }
        Err(Error::Solver(format!("simplex iteration limit {max_iter} reached")))
    }
}

/// Solves `lp` to optimality or proves it infeasible or unbounded.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let sf = StdForm::build(lp);
    let (m, ncols) = (sf.m, sf.ncols);
    let scale = 1.0 + sf.b.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let max_iter = 20_000 + 100 * (m + ncols);
    let mut tab = Tableau::new(&sf);

    // Phase 1: minimize the sum of artificials.
    let mut phase1_cost = vec![0.0; ncols + m];
    phase1_cost[ncols..].iter_mut().for_each(|v| *v = 1.0);
    tab.price(&phase1_cost);
    match tab.run(ncols, 1e-11, max_iter, true)? {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded(_) => return Err(Error::Internal("phase one cannot be unbounded".into())),
    }
    let infeas: f64 = (0..m).filter(|&i| tab.basis[i] >= ncols).map(|i| tab.rhs(i)).sum();
    if infeas > 1e-9 * scale {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            primal: vec![0.0; lp.num_vars()],
            dual: vec![0.0; lp.constraints.len()],
            reduced_costs: vec![0.0; lp.num_vars()],
            objective_value: f64::NAN,
            ray: None,
            basis: tab.basis.clone(),
        });
    }
    // Drive zero-level artificials out of the basis where possible.
    for i in 0..m {
        if tab.basis[i] >= ncols {
            let mut best = None;
            let mut best_v = 1e-9;
            for j in 0..ncols {
                let v = tab.at(i, j).abs();
                if v > best_v {
                    best_v = v;
                    best = Some(j);
                }
            }
            if let Some(j) = best {
                tab.pivot(i, j);
            }
        }
    }

    // Phase 2.
    let mut cost = sf.c.clone();
    cost.resize(ncols + m, 0.0);
    tab.price(&cost);
    let end = tab.run(ncols, 1e-9, max_iter, false)?;

    let mut s = vec![0.0; ncols + m];
    for i in 0..m {
        s[tab.basis[i]] = tab.rhs(i).max(0.0);
    }

    if let PhaseEnd::Unbounded(e) = end {
        let mut d = vec![0.0; ncols + m];
        d[e] = 1.0;
        for i in 0..m {
            d[tab.basis[i]] = -tab.at(i, e);
        }
        let primal = sf.to_original(&s);
        let mut ray = sf.direction_to_original(&d);
        let norm = ray.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if norm > 0.0 {
            ray.iter_mut().for_each(|v| *v /= norm);
        }
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            objective_value: f64::NEG_INFINITY,
            primal,
            dual: vec![0.0; lp.constraints.len()],
            reduced_costs: vec![0.0; lp.num_vars()],
            ray: Some(ray),
            basis: tab.basis.clone(),
        });
    }

    // Refactorize the optimal basis for clean primal and dual values.
    let mut bmat = vec![0.0; m * m];
    for (k, &col) in tab.basis.iter().enumerate() {
        for i in 0..m {
            bmat[i * m + k] = if col < ncols {
                sf.a[i * ncols + col]
            } else if col - ncols == i {
                1.0
            } else {
                0.0
            };
        }
    }
    let cb: Vec<f64> = tab.basis.iter().map(|&col| cost[col]).collect();
    let (xb, y_std) = match Lu::factor(&bmat, m, 1e-13) {
        Some(lu) if m > 0 => (lu.solve(&sf.b), lu.solve_transpose(&cb)),
        _ => {
            let xb: Vec<f64> = (0..m).map(|i| tab.rhs(i)).collect();
            let y: Vec<f64> = (0..m).map(|i| -tab.obj[ncols + i]).collect();
            (xb, y)
        }
    };
    let mut s = vec![0.0; ncols + m];
    for (k, &col) in tab.basis.iter().enumerate() {
        s[col] = xb[k].max(0.0);
    }
    let primal = sf.to_original(&s);
    let dual: Vec<f64> = (0..sf.orig_rows).map(|i| sf.row_sign[i] * y_std[i]).collect();
    let residual = lp.primal_residual(&primal);
    if !(residual <= 1e-6 * scale) {
        return Err(Error::Solver(format!(
            "numerically singular basis: primal residual {residual:.3e} after refactorization"
        )));
    }
    let reduced_costs: Vec<f64> = (0..lp.num_vars())
        .map(|j| lp.objective[j] - lp.constraints.iter().zip(&dual).map(|(r, yi)| r.coeffs[j] * yi).sum::<f64>())
        .collect();
    let objective_value = dot(&lp.objective, &primal);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal,
        dual,
        reduced_costs,
        objective_value,
        ray: None,
        basis: tab.basis.clone(),
    })
}
