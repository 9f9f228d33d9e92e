//! Cutting-plane solver for the semi-infinite subproblems
//!
//! ```text
//! min mu  s.t.  e_k'A(x)tau(i) = 0   (k in L(i)),
//!               e_k'A(x)tau(i) >= 0  (k not in L(i)),
//!               t'A(x)t + mu >= 0    for all t in the index set,
//! ```
//!
//! and extraction of the multipliers `(gamma, lambda)` certifying a zero optimum.

use serde::{Deserialize, Serialize};

use crate::config::{SolverOptions, Tolerances};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpSolution, LpStatus, Relation};
use crate::model::{eval_constraint, CopositiveProgram, SimplexPoint, SymMatrix};
use crate::oracle::{
    bound_over_omega, grid_denominator, grid_size, min_quad_over_simplex_with, scan_simplex_grid, IndexSet, OmegaGrid,
    OmegaMin, StopRule,
};

/// Node budget of the branch and bound that backs up an inconclusive grid.
pub(crate) const BRANCH_NODES: usize = 20_000;

/// One subproblem: linear rows attached to the records `taus` plus the
/// semi-infinite constraint over `index_set`.
#[derive(Debug, Clone)]
pub struct SipInstance<'a> {
    pub prog: &'a CopositiveProgram,
    pub taus: Vec<SimplexPoint>,
    /// `(i, k)`: `e_k'A(x)tau(i) = 0`.
    pub eq_rows: Vec<(usize, usize)>,
    /// `(i, k)`: `e_k'A(x)tau(i) >= 0`.
    pub ineq_rows: Vec<(usize, usize)>,
    pub index_set: IndexSet,
}

impl<'a> SipInstance<'a> {
    /// The iteration-0 problem: no rows, index set `T`.
    pub fn initial(prog: &'a CopositiveProgram) -> Self {
        SipInstance {
            prog,
            taus: Vec::new(),
            eq_rows: Vec::new(),
            ineq_rows: Vec::new(),
            index_set: IndexSet::FullSimplex,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.prog.p();
        if let Some(t) = self.taus.iter().find(|t| t.dim() != p) {
            return Err(Error::input(format!("record has dimension {}, program has p = {p}", t.dim())));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(i, k) in self.eq_rows.iter().chain(&self.ineq_rows) {
            if i >= self.taus.len() || k >= p {
                return Err(Error::input(format!("row ({i}, {k}) is out of range")));
            }
            if !seen.insert((i, k)) {
                return Err(Error::input(format!("row ({i}, {k}) appears twice")));
            }
        }
        if let IndexSet::Omega(om) = &self.index_set {
            if om.dim() != p {
                return Err(Error::input("Omega descriptor dimension does not match the program"));
            }
        }
        Ok(())
    }

    /// Coefficients `e_k'A_j tau(i)` for `j = 0..=n`.
    pub fn row_coeffs(&self, i: usize, k: usize) -> Vec<f64> {
        let t = self.taus[i].coords();
        self.prog.matrices().iter().map(|a| a.row(k).iter().zip(t).map(|(x, y)| x * y).sum()).collect()
    }
}

/// A new index `tau` with its weight `gamma > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewIndex {
    pub tau: SimplexPoint,
    pub gamma: f64,
}

/// Multipliers `(gamma, lambda)` with
/// `sum gamma(i) tau(i)'A_j tau(i) + 2 sum lambda(i)'A_j tau(i) = 0` for all `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub new_indices: Vec<NewIndex>,
    /// One `p`-vector per existing record, aligned with `SipInstance::taus`.
    pub lambda: Vec<Vec<f64>>,
    /// Largest stationarity violation over `j = 0..=n`.
    pub residual: f64,
}

impl DualCertificate {
    pub fn stationarity_residual(&self, prog: &CopositiveProgram, taus: &[SimplexPoint]) -> f64 {
        stationarity_residual(prog, taus, &self.new_indices, &self.lambda)
    }
}

fn stationarity_residual(
    prog: &CopositiveProgram,
    taus: &[SimplexPoint],
    new: &[NewIndex],
    lambda: &[Vec<f64>],
) -> f64 {
    prog.matrices()
        .iter()
        .map(|a| {
            let mut s: f64 = new.iter().map(|ni| ni.gamma * a.quad(ni.tau.coords())).sum();
            for (t, l) in taus.iter().zip(lambda) {
                let at = a.mul_vec(t.coords());
                s += 2.0 * l.iter().zip(&at).map(|(x, y)| x * y).sum::<f64>();
            }
            s.abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SipDiagnostics {
    pub rounds: usize,
    pub cuts: usize,
    pub box_r: f64,
    /// Resolution of the last grid used, if any.
    pub h: Option<f64>,
    pub master_mu: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SipOutcome {
    /// `(x, mu)` is feasible with `mu < 0`; `margin = -mu` is a certified
    /// lower bound on `t'A(x)t` over the index set.
    NegativeFeasible {
        x: Vec<f64>,
        mu: f64,
        margin: f64,
        diag: SipDiagnostics,
    },
    /// The optimum is zero; `x` is the final master point.
    OptimalZero {
        x: Vec<f64>,
        certificate: DualCertificate,
        diag: SipDiagnostics,
    },
    Unresolved {
        diag: SipDiagnostics,
    },
}

/// Separation oracle for one index set, with any grid built once.
pub(crate) enum Separator {
    Exact(usize),
    SimplexGrid(usize),
    Omega(OmegaGrid, usize),
}

impl Separator {
    pub(crate) fn new(index_set: &IndexSet, p: usize, h: f64, max_points: usize, opts: &SolverOptions) -> Result<Self> {
        Ok(match index_set {
            IndexSet::FullSimplex if p <= opts.p_max => Separator::Exact(opts.p_max),
            IndexSet::FullSimplex => {
                let mut n = grid_denominator(h);
                while n > 1 && grid_size(p, n) > max_points as f64 {
                    n -= (n / 16).max(1);
                }
                Separator::SimplexGrid(n)
            }
            IndexSet::Omega(om) => Separator::Omega(OmegaGrid::build(om, h, max_points, opts.tol.feas)?, opts.p_max),
        })
    }

    pub(crate) fn minimize(&self, d: &SymMatrix) -> Result<OmegaMin> {
        Ok(match self {
            Separator::Exact(p_max) => OmegaMin::Min(min_quad_over_simplex_with(d, *p_max)?),
            Separator::SimplexGrid(n) => OmegaMin::Min(scan_simplex_grid(d, *n, None).into_result(d)?),
            Separator::Omega(g, p_max) => g.minimize(d, *p_max)?,
        })
    }

    pub(crate) fn h(&self) -> Option<f64> {
        match self {
            Separator::Exact(_) => None,
            Separator::SimplexGrid(n) => Some(1.0 / *n as f64),
            Separator::Omega(g, _) => Some(g.h()),
        }
    }
}

/// Master LP over `(x, mu)`. Rows are the equality rows, then the inequality
/// rows, then one row per cut.
struct Master<'a> {
    inst: &'a SipInstance<'a>,
    linear: Vec<(Vec<f64>, Relation)>,
    cuts: Vec<Vec<f64>>,
}

impl<'a> Master<'a> {
    fn new(inst: &'a SipInstance<'a>) -> Self {
        let eq = inst.eq_rows.iter().map(|&(i, k)| (inst.row_coeffs(i, k), Relation::Eq));
        let ineq = inst.ineq_rows.iter().map(|&(i, k)| (inst.row_coeffs(i, k), Relation::Ge));
        Master { inst, linear: eq.chain(ineq).collect(), cuts: Vec::new() }
    }

    fn add_cut(&mut self, t: &SimplexPoint) {
        self.cuts.push(self.inst.prog.matrices().iter().map(|a| a.quad(t.coords())).collect());
    }

    fn lp(&self, r: f64, with_mu: bool) -> LinearProgram {
        let n = self.inst.prog.n();
        let mut obj = vec![0.0; n + 1];
        if with_mu {
            obj[n] = 1.0;
        }
        let mut lp = LinearProgram::minimize(obj);
        for j in 0..n {
            lp.set_bounds(j, -r, r);
        }
        let scale: f64 = self.inst.prog.matrices().iter().map(SymMatrix::max_abs).skip(1).sum();
        let mu_lo = -(1.0 + self.inst.prog.matrix(0).max_abs() + r * scale);
        lp.set_bounds(n, if with_mu { mu_lo } else { 0.0 }, if with_mu { f64::INFINITY } else { 0.0 });
        for (c, rel) in &self.linear {
            let mut row = c[1..].to_vec();
            row.push(0.0);
            lp.add_row(row, *rel, -c[0]);
        }
        for c in &self.cuts {
            let mut row = c[1..].to_vec();
            row.push(1.0);
            lp.add_row(row, Relation::Ge, -c[0]);
        }
        lp
    }
}

/// Solves the subproblem by cutting planes.
pub fn solve_sip(inst: &SipInstance, opts: &SolverOptions) -> Result<SipOutcome> {
    inst.validate()?;
    opts.validate()?;
    let tol = &opts.tol;
    let prog = inst.prog;
    let n = prog.n();
    let mut master = Master::new(inst);
    let mut diag = SipDiagnostics { box_r: opts.box_r, ..Default::default() };

    if let IndexSet::Omega(om) = &inst.index_set {
        if om.is_empty(tol.feas)? {
            // The quadratic constraint is vacuous; only the rows remain.
            diag.box_r = opts.box_r_max;
            diag.message = "index set is empty".into();
            let sol = solve_lp(&master.lp(opts.box_r_max, false))?;
            return Ok(match sol.status {
                LpStatus::Optimal => {
                    diag.master_mu = -1.0;
                    SipOutcome::NegativeFeasible { x: sol.primal[..n].to_vec(), mu: -1.0, margin: f64::INFINITY, diag }
                }
                _ => {
                    diag.message = "index set is empty and the linear rows are infeasible".into();
                    SipOutcome::Unresolved { diag }
                }
            });
        }
    }

    let mut h = opts.h;
    let mut max_points = opts.max_grid_points;
    let mut sep = Separator::new(&inst.index_set, prog.p(), h, max_points, opts)?;
    diag.h = sep.h();
    let mut r = opts.box_r;
    let mut cuts: Vec<SimplexPoint> = Vec::new();
    let mut refinements = 0;

    for round in 0..opts.max_cuts {
        diag.rounds = round + 1;
        diag.box_r = r;
        let sol = solve_lp(&master.lp(r, true))?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Internal(format!("master LP reported {:?}", sol.status)));
        }
        let x = sol.primal[..n].to_vec();
        let mu = sol.primal[n];
        diag.master_mu = mu;
        if opts.a0_copositive && mu > tol.zero {
            return Err(Error::Internal(format!(
                "A_0 is flagged copositive but (x, mu) = (0, 0) is cut off: master optimum {mu}"
            )));
        }
        let on_box = x.iter().any(|v| v.abs() >= r * (1.0 - 1e-9));
        let d = eval_constraint(prog, &x)?;
        let OmegaMin::Min(res) = sep.minimize(&d)? else {
            return Err(Error::Internal("nonempty index set reported empty".into()));
        };
        if res.value + mu < -tol.feas {
            if cuts.iter().any(|c| c.linf_distance(&res.argmin) <= 1e-12) {
                diag.message = format!("separation repeated an existing cut (violation {:.3e})", res.value + mu);
                return Ok(SipOutcome::Unresolved { diag });
            }
            master.add_cut(&res.argmin);
            cuts.push(res.argmin);
            diag.cuts = cuts.len();
            continue;
        }
        if mu <= -tol.neg {
            // Any certified positive margin makes x a Slater point on the index set.
            let mut lb = res.value_lb();
            if lb < tol.neg {
                if let (IndexSet::Omega(om), true) = (&inst.index_set, prog.p() <= opts.p_max) {
                    let stop = StopRule {
                        below: -mu - tol.feas,
                        above: (-mu / 2.0).max(tol.neg),
                        max_nodes: BRANCH_NODES,
                        gap: tol.lp,
                    };
                    let b = bound_over_omega(&d, om, tol.feas, opts.p_max, stop)?;
                    if let Some(t) = b.argmin.filter(|_| b.ub + mu < -tol.feas) {
                        if !cuts.iter().any(|c| c.linf_distance(&t) <= 1e-12) {
                            master.add_cut(&t);
                            cuts.push(t);
                            diag.cuts = cuts.len();
                            continue;
                        }
                    }
                    lb = lb.max(b.lb);
                }
            }
            if lb >= tol.neg {
                return Ok(SipOutcome::NegativeFeasible { x, mu: -lb, margin: lb, diag });
            }
            if refinements < opts.refine_rounds {
                refinements += 1;
                h /= 2.0;
                max_points = max_points.saturating_mul(4).min(opts.max_grid_points.saturating_mul(4));
                let finer = Separator::new(&inst.index_set, prog.p(), h, max_points, opts)?;
                if finer.h() != sep.h() {
                    sep = finer;
                    diag.h = sep.h();
                    continue;
                }
            }
            diag.message = format!("grid lower bound {lb:.3e} does not certify master optimum {mu:.3e}");
            return Ok(SipOutcome::Unresolved { diag });
        }
        if on_box && r < opts.box_r_max {
            r = (r * 10.0).min(opts.box_r_max);
            continue;
        }
        if mu.abs() <= tol.zero {
            let certificate = extract_certificate(inst, &cuts, &sol, tol, inst.taus.is_empty())?;
            return Ok(SipOutcome::OptimalZero { x, certificate, diag });
        }
        diag.message = format!("master optimum {mu:.3e} lies in the undecided band");
        return Ok(SipOutcome::Unresolved { diag });
    }
    diag.message = format!("cut limit {} reached", opts.max_cuts);
    Ok(SipOutcome::Unresolved { diag })
}

/// Assembles `(gamma, lambda)` from the duals of a master LP laid out as in
/// [`solve_sip`]: equality rows, inequality rows, then one row per cut; the
/// variables are `x` followed by `mu`.
///
/// `gamma` is the cut dual when it exceeds `tol.mult`; `lambda_k(i)` is half
/// the dual of row `(i, k)`. If the read-off fails the stationarity test
/// (for instance because box multipliers are active) or keeps more than
/// `n + 1` points, a basic solution of the stationarity system restricted to
/// the active cuts and rows is used instead.
pub fn extract_certificate(
    inst: &SipInstance,
    cuts: &[SimplexPoint],
    master: &LpSolution,
    tol: &Tolerances,
    normalize: bool,
) -> Result<DualCertificate> {
    let prog = inst.prog;
    let (ne, ni) = (inst.eq_rows.len(), inst.ineq_rows.len());
    if master.dual.len() != ne + ni + cuts.len() {
        return Err(Error::input(format!(
            "master has {} row duals, expected {}",
            master.dual.len(),
            ne + ni + cuts.len()
        )));
    }
    let mut new_indices: Vec<NewIndex> = cuts
        .iter()
        .zip(&master.dual[ne + ni..])
        .filter(|(_, &y)| y > tol.mult)
        .map(|(t, &y)| NewIndex { tau: t.clone(), gamma: y })
        .collect();
    let mut lambda = vec![vec![0.0; prog.p()]; inst.taus.len()];
    for (r, &(i, k)) in inst.eq_rows.iter().enumerate() {
        lambda[i][k] = master.dual[r] / 2.0;
    }
    for (r, &(i, k)) in inst.ineq_rows.iter().enumerate() {
        let y = master.dual[ne + r];
        lambda[i][k] = if y <= tol.mult { 0.0 } else { y / 2.0 };
    }
    if normalize {
        let s: f64 = new_indices.iter().map(|ni| ni.gamma).sum();
        if s > 0.0 {
            new_indices.iter_mut().for_each(|ni| ni.gamma /= s);
            lambda.iter_mut().flatten().for_each(|l| *l /= s);
        }
    }
    let residual = stationarity_residual(prog, &inst.taus, &new_indices, &lambda);
    let cert = if residual <= tol.cert && !new_indices.is_empty() && new_indices.len() <= prog.n() + 1 {
        DualCertificate { new_indices, lambda, residual }
    } else {
        let reduced = reduced_certificate(inst, cuts, master, tol)?;
        if reduced.residual > tol.cert {
            return Err(Error::Certificate { residual: residual.min(reduced.residual), tolerance: tol.cert });
        }
        reduced
    };
    Ok(snapped_certificate(inst, &cert, &master.primal[..prog.n()], tol)?.unwrap_or(cert))
}

/// Cut points converge to the zero set only to about `sqrt(tol.feas)`, since
/// the violation is quadratic in the distance. Coordinates below that scale
/// are set to zero and the stationarity system is solved again on the snapped
/// points; the result is kept only if it is itself a valid certificate.
fn snapped_certificate(
    inst: &SipInstance,
    cert: &DualCertificate,
    x: &[f64],
    tol: &Tolerances,
) -> Result<Option<DualCertificate>> {
    let snap = 10.0 * tol.feas.sqrt();
    let mut changed = false;
    let mut points = Vec::with_capacity(cert.new_indices.len());
    for ni in &cert.new_indices {
        let c: Vec<f64> = ni.tau.coords().iter().map(|&v| if v <= snap { 0.0 } else { v }).collect();
        changed |= c != ni.tau.coords();
        points.push(SimplexPoint::normalized(c)?);
    }
    if !changed {
        return Ok(None);
    }
    let snapped = basic_certificate(inst, &points, x, tol)?;
    Ok(snapped.filter(|c| c.residual <= tol.cert && !c.new_indices.is_empty()))
}

/// Basic feasible solution of the stationarity system over the active cuts
/// and rows, normalized by `sum gamma = 1`. A basic solution has at most
/// `n + 1` nonzeros.
fn reduced_certificate(
    inst: &SipInstance,
    cuts: &[SimplexPoint],
    master: &LpSolution,
    tol: &Tolerances,
) -> Result<DualCertificate> {
    let prog = inst.prog;
    let n = prog.n();
    let x = &master.primal[..n];
    let mu = master.primal[n];
    let d = eval_constraint(prog, x)?;
    let act_tol = 1e-7 * (1.0 + d.max_abs());
    let active: Vec<SimplexPoint> =
        cuts.iter().filter(|t| (d.quad(t.coords()) + mu).abs() <= act_tol).cloned().collect();
    basic_certificate(inst, &active, x, tol)?.ok_or(Error::Certificate { residual: f64::INFINITY, tolerance: tol.cert })
}

/// Solves the stationarity system with weights `gamma >= 0` on `points`,
/// free multipliers on the equality rows and nonnegative ones on the
/// inequality rows active at `x`. `None` if the system has no solution.
fn basic_certificate(
    inst: &SipInstance,
    points: &[SimplexPoint],
    x: &[f64],
    tol: &Tolerances,
) -> Result<Option<DualCertificate>> {
    let prog = inst.prog;
    let n = prog.n();
    let d = eval_constraint(prog, x)?;
    let act_tol = 1e-7 * (1.0 + d.max_abs());
    let ne = inst.eq_rows.len();

    // Columns: (kind, index, coefficients over j = 0..=n).
    let mut cols: Vec<(u8, usize, Vec<f64>)> = Vec::new();
    for (c, t) in points.iter().enumerate() {
        cols.push((0, c, prog.matrices().iter().map(|a| a.quad(t.coords())).collect()));
    }
    for (r, &(i, k)) in inst.eq_rows.iter().chain(&inst.ineq_rows).enumerate() {
        let coeffs = inst.row_coeffs(i, k);
        let is_eq = r < ne;
        let value: f64 = coeffs[0] + coeffs[1..].iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        if is_eq || value.abs() <= act_tol {
            cols.push((if is_eq { 1 } else { 2 }, r, coeffs));
        }
    }
    let mut lp = LinearProgram::minimize(vec![0.0; cols.len()]);
    for (v, (kind, _, _)) in cols.iter().enumerate() {
        if *kind != 1 {
            lp.set_bounds(v, 0.0, f64::INFINITY);
        }
    }
    for j in 1..=n {
        lp.add_row(cols.iter().map(|c| c.2[j]).collect(), Relation::Eq, 0.0);
    }
    lp.add_row(cols.iter().map(|c| if c.0 == 0 { 1.0 } else { 0.0 }).collect(), Relation::Eq, 1.0);
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    let mut new_indices = Vec::new();
    let mut lambda = vec![vec![0.0; prog.p()]; inst.taus.len()];
    for ((kind, idx, _), &v) in cols.iter().zip(&sol.primal) {
        match kind {
            0 if v > tol.mult => new_indices.push(NewIndex { tau: points[*idx].clone(), gamma: v }),
            0 => {}
            _ => {
                let (i, k) = if *idx < ne { inst.eq_rows[*idx] } else { inst.ineq_rows[*idx - ne] };
                if *kind == 1 || v > tol.mult {
                    lambda[i][k] = v / 2.0;
                }
            }
        }
    }
    let residual = stationarity_residual(prog, &inst.taus, &new_indices, &lambda);
    Ok(Some(DualCertificate { new_indices, lambda, residual }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::DEFAULT_TOL_SUPPORT;
    use crate::oracle::OmegaDescriptor;

    fn pt(c: &[f64]) -> SimplexPoint {
        SimplexPoint::new(c.to_vec()).unwrap()
    }

    #[test]
    fn e1_initial_problem_is_negative_feasible() {
        let prog = fixtures::e1();
        let out = solve_sip(&SipInstance::initial(&prog), &SolverOptions::default()).unwrap();
        let SipOutcome::NegativeFeasible { x, mu, margin, .. } = out else { panic!("{out:?}") };
        assert!(mu <= -0.25 + 1e-9);
        let d = eval_constraint(&prog, &x).unwrap();
        let exact = crate::oracle::min_quad_over_simplex(&d).unwrap().value;
        assert!(exact >= margin - 1e-12 && margin > 0.0);
    }

    #[test]
    fn e2_initial_problem_has_zero_optimum_at_the_first_vertex() {
        let prog = fixtures::e2();
        let out = solve_sip(&SipInstance::initial(&prog), &SolverOptions::default()).unwrap();
        let SipOutcome::OptimalZero { certificate, .. } = out else { panic!("{out:?}") };
        assert_eq!(certificate.new_indices.len(), 1);
        let ni = &certificate.new_indices[0];
        assert!(ni.tau.linf_distance(&pt(&[1.0, 0.0])) <= 1e-6);
        assert!((ni.gamma - 1.0).abs() < 1e-9);
        assert!(certificate.lambda.is_empty());
        assert!(certificate.residual <= 1e-7);
    }

    #[test]
    fn e2_first_iteration_is_negative_feasible_on_omega() {
        let prog = fixtures::e2();
        let om = OmegaDescriptor::new(vec![pt(&[1.0, 0.0])], DEFAULT_TOL_SUPPORT).unwrap();
        let inst = SipInstance {
            prog: &prog,
            taus: vec![pt(&[1.0, 0.0])],
            eq_rows: vec![(0, 0)],
            ineq_rows: vec![(0, 1)],
            index_set: IndexSet::Omega(om),
        };
        let out = solve_sip(&inst, &SolverOptions::default()).unwrap();
        let SipOutcome::NegativeFeasible { x, mu, margin, .. } = out else { panic!("{out:?}") };
        assert!((x[0] - 1.0).abs() < 1e-9, "{x:?}");
        assert!(mu <= -0.25 + 1e-9);
        assert!(margin > 0.0);
    }

    #[test]
    fn empty_index_set_reduces_to_the_rows() {
        let prog = fixtures::e2();
        let om = OmegaDescriptor::new(vec![pt(&[1.0, 0.0]), pt(&[0.0, 1.0])], DEFAULT_TOL_SUPPORT).unwrap();
        let inst = SipInstance {
            prog: &prog,
            taus: vec![pt(&[1.0, 0.0])],
            eq_rows: vec![],
            ineq_rows: vec![(0, 1)],
            index_set: IndexSet::Omega(om),
        };
        let SipOutcome::NegativeFeasible { x, mu, .. } = solve_sip(&inst, &SolverOptions::default()).unwrap() else {
            panic!()
        };
        assert_eq!(mu, -1.0);
        assert!(x[0] >= -1e-9);
    }

    fn fake_master(primal: Vec<f64>, dual: Vec<f64>) -> LpSolution {
        LpSolution {
            status: LpStatus::Optimal,
            primal,
            dual,
            reduced_costs: vec![],
            objective_value: 0.0,
            ray: None,
            basis: vec![],
        }
    }

    #[test]
    fn certificate_read_off_single_cut() {
        let prog = fixtures::e2();
        let inst = SipInstance::initial(&prog);
        let cert = extract_certificate(
            &inst,
            &[pt(&[1.0, 0.0])],
            &fake_master(vec![0.0, 0.0], vec![1.0]),
            &Tolerances::default(),
            true,
        )
        .unwrap();
        assert_eq!(cert.new_indices, vec![NewIndex { tau: pt(&[1.0, 0.0]), gamma: 1.0 }]);
        assert_eq!(cert.residual, 0.0);
    }

    #[test]
    fn certificate_keeps_and_normalizes_two_cuts() {
        // A(x) = x [[0,1],[1,0]]: both vertices give zero cuts.
        let prog = CopositiveProgram::new(
            vec![1.0],
            vec![SymMatrix::zeros(2), SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()],
        )
        .unwrap();
        let inst = SipInstance::initial(&prog);
        let cuts = [pt(&[1.0, 0.0]), pt(&[0.0, 1.0])];
        let cert = extract_certificate(
            &inst,
            &cuts,
            &fake_master(vec![0.0, 0.0], vec![0.5, 0.5]),
            &Tolerances::default(),
            true,
        )
        .unwrap();
        assert_eq!(cert.new_indices.len(), 2);
        assert!(cert.new_indices.iter().all(|ni| (ni.gamma - 0.5).abs() < 1e-15));
        let cert = extract_certificate(
            &inst,
            &cuts,
            &fake_master(vec![0.0, 0.0], vec![0.25, 0.25]),
            &Tolerances::default(),
            true,
        )
        .unwrap();
        assert!(cert.new_indices.iter().all(|ni| (ni.gamma - 0.5).abs() < 1e-15));
    }

    #[test]
    fn certificate_drops_tiny_duals() {
        let prog = fixtures::e2();
        let inst = SipInstance::initial(&prog);
        let cuts = [pt(&[1.0, 0.0]), pt(&[0.5, 0.5])];
        let cert = extract_certificate(
            &inst,
            &cuts,
            &fake_master(vec![0.0, 0.0], vec![1.0, 1e-12]),
            &Tolerances::default(),
            true,
        )
        .unwrap();
        assert_eq!(cert.new_indices.len(), 1);
        assert_eq!(cert.new_indices[0].tau, cuts[0]);
    }

    #[test]
    fn certificate_failure_is_reported_with_the_residual() {
        // A cut at the barycenter of E1 has t'A_0 t = 1/2, so no multiplier fixes stationarity.
        let prog = fixtures::e1();
        let inst = SipInstance::initial(&prog);
        let err = extract_certificate(
            &inst,
            &[pt(&[0.5, 0.5])],
            &fake_master(vec![0.0, 0.0], vec![1.0]),
            &Tolerances::default(),
            true,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Certificate { residual, .. } if residual > 0.1));
    }

    #[test]
    fn instance_validation() {
        let prog = fixtures::e2();
        let mut inst = SipInstance::initial(&prog);
        inst.taus.push(pt(&[1.0, 0.0]));
        inst.eq_rows.push((0, 0));
        inst.ineq_rows.push((0, 0));
        assert!(inst.validate().is_err());
        inst.ineq_rows = vec![(1, 0)];
        assert!(inst.validate().is_err());
    }
}
