use serde::{Deserialize, Serialize};

use super::driver::RegularizedProblem;
use super::state::Record;
use crate::config::{SolverOptions, Tolerances};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation};
use crate::model::{eval_constraint, CopositiveProgram, SimplexPoint, SymMatrix};
use crate::oracle::{is_copositive, OmegaMin};
use crate::sampling::{random_copositive, sample_face_member, seeded_rng};
use crate::sip::Separator;

/// `M(j)` with the evidence for each excluded index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MSet {
    pub members: Vec<usize>,
    /// Best certified value of `sup e_k'A(x)t` over feasible `x` found for
    /// excluded `k`, or `None` for members.
    pub lower: Vec<Option<f64>>,
    /// Excluded indices whose maximization reached the box.
    pub unbounded_above: Vec<usize>,
    /// Excluded indices the cutting planes could not settle either way.
    pub undecided: Vec<usize>,
}

/// `M(j) = {k : e_k'A(x)t = 0 for all feasible x}`, computed over the
/// regularized description of the feasible set.
///
/// For each `k` outside `P_+(t)` the value `e_k'A(x)t` is maximized by
/// cutting planes; an LP optimum at most `tol_feas` puts `k` in `M(j)`.
/// Otherwise the LP point is pulled towards the witness until the index-set
/// constraint is certified, giving a feasible point with a positive value.
pub fn compute_m(
    prog: &CopositiveProgram,
    t: &SimplexPoint,
    reg: &RegularizedProblem,
    opts: &SolverOptions,
) -> Result<MSet> {
    let tol = &opts.tol;
    let p = prog.p();
    if t.dim() != p {
        return Err(Error::input("point dimension does not match the program"));
    }
    let at_witness = eval_constraint(prog, &reg.witness)?.quad(t.coords());
    if at_witness.abs() > 1e-6 {
        return Err(Error::input(format!("t is not an immobile index: t'A(x)t = {at_witness:.3e} at the witness")));
    }
    let support = t.positive_support(tol.support);
    let sep = match reg.omega() {
        Some(om) if om.is_empty(tol.feas)? => None,
        _ => Some(Separator::new(&reg.index_set, p, opts.h, opts.max_grid_points, opts)?),
    };
    let inst = reg.sip_instance();
    let n = prog.n();
    let r = opts.box_r_max;
    let mut out = MSet { members: Vec::new(), lower: Vec::new(), unbounded_above: Vec::new(), undecided: Vec::new() };
    let mut cuts: Vec<Vec<f64>> = Vec::new();
    let mut cut_points: Vec<SimplexPoint> = Vec::new();

    for k in 0..p {
        if support.contains(&k) {
            out.members.push(k);
            out.lower.push(None);
            continue;
        }
        let c: Vec<f64> =
            prog.matrices().iter().map(|a| a.row(k).iter().zip(t.coords()).map(|(x, y)| x * y).sum()).collect();
        let mut decided = None;
        for _ in 0..opts.max_cuts {
            let mut lp = LinearProgram::minimize(c[1..].iter().map(|v| -v).collect());
            for j in 0..n {
                lp.set_bounds(j, -r, r);
            }
            for (rows, rel) in [(&inst.eq_rows, Relation::Eq), (&inst.ineq_rows, Relation::Ge)] {
                for &(i, kk) in rows {
                    let rc = inst.row_coeffs(i, kk);
                    lp.add_row(rc[1..].to_vec(), rel, -rc[0]);
                }
            }
            for cut in &cuts {
                lp.add_row(cut[1..].to_vec(), Relation::Ge, -cut[0]);
            }
            let sol = solve_lp(&lp)?;
            if sol.status != LpStatus::Optimal {
                return Err(Error::Solver(format!("M(j) maximization reported {:?}", sol.status)));
            }
            let x = &sol.primal;
            let upper = c[0] + c[1..].iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            if upper <= tol.feas {
                decided = Some(None);
                break;
            }
            let lb = match &sep {
                None => f64::INFINITY,
                Some(sep) => {
                    let d = eval_constraint(prog, x)?;
                    match sep.minimize(&d)? {
                        OmegaMin::EmptyIndexSet => f64::INFINITY,
                        OmegaMin::Min(res) => {
                            if res.value < -tol.feas
                                && !cut_points.iter().any(|q| q.linf_distance(&res.argmin) <= 1e-12)
                            {
                                cuts.push(prog.matrices().iter().map(|a| a.quad(res.argmin.coords())).collect());
                                cut_points.push(res.argmin);
                                continue;
                            }
                            res.value_lb()
                        }
                    }
                }
            };
            // Convex combination with the witness, feasible for the index-set constraint.
            let alpha = if lb >= 0.0 { 0.0 } else { -lb / (reg.margin - lb) };
            let lower = (1.0 - alpha) * upper
                + alpha * (c[0] + c[1..].iter().zip(&reg.witness).map(|(a, b)| a * b).sum::<f64>());
            if lower > tol.feas {
                if x.iter().any(|v| v.abs() >= r * (1.0 - 1e-9)) {
                    out.unbounded_above.push(k);
                }
                decided = Some(Some(lower));
            }
            break;
        }
        match decided {
            Some(None) => {
                out.members.push(k);
                out.lower.push(None);
            }
            Some(Some(v)) => out.lower.push(Some(v)),
            None => {
                out.undecided.push(k);
                out.lower.push(None);
            }
        }
    }
    Ok(out)
}

/// The minimal face through its vertices `t(j)` and sets `M(j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalFaceDescriptor {
    pub vertices: Vec<SimplexPoint>,
    #[serde(rename = "M")]
    pub m_sets: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub samples: usize,
    pub members_form1: usize,
    pub members_form2: usize,
    pub disagreements: usize,
}

impl MinimalFaceDescriptor {
    fn rows_hold(&self, d: &SymMatrix, tol: &Tolerances, with_inequalities: bool) -> bool {
        self.vertices.iter().zip(&self.m_sets).all(|(t, m)| {
            d.mul_vec(t.coords()).iter().enumerate().all(|(k, v)| {
                if m.contains(&k) {
                    v.abs() <= tol.feas
                } else {
                    !with_inequalities || *v >= -tol.feas
                }
            })
        })
    }

    /// First form: `D` copositive with `e_k'D t(j) = 0` for `k in M(j)`.
    pub fn contains_form1(&self, d: &SymMatrix, tol: &Tolerances) -> Result<bool> {
        Ok(self.rows_hold(d, tol, false) && is_copositive(d, tol)?.is_copositive())
    }

    /// Second form: additionally `e_k'D t(j) >= 0` for `k` outside `M(j)`.
    pub fn contains_form2(&self, d: &SymMatrix, tol: &Tolerances) -> Result<bool> {
        Ok(self.rows_hold(d, tol, true) && is_copositive(d, tol)?.is_copositive())
    }

    /// Evaluates both forms on sampled copositive matrices: generic ones,
    /// members of the face cut out by `M(j)`, and members of the larger face
    /// cut out by `P_+(t(j))`. A disagreement is a hard error.
    pub fn cross_check(&self, samples: usize, seed: u64, tol: &Tolerances) -> Result<CrossCheck> {
        let p = self.vertices.first().map(SimplexPoint::dim).ok_or_else(|| Error::input("no vertices"))?;
        let by_m: Vec<Record> =
            self.vertices.iter().zip(&self.m_sets).map(|(t, m)| Record { tau: t.clone(), l: m.clone() }).collect();
        let by_support: Vec<Record> =
            self.vertices.iter().map(|t| Record { tau: t.clone(), l: t.positive_support(tol.support) }).collect();
        let mut rng = seeded_rng(seed);
        let mut rep = CrossCheck { samples, members_form1: 0, members_form2: 0, disagreements: 0 };
        for s in 0..samples {
            let d = match s % 3 {
                0 => sample_face_member(&mut rng, p, &by_m, tol.support),
                1 => sample_face_member(&mut rng, p, &by_support, tol.support),
                _ => random_copositive(&mut rng, p),
            };
            let a = self.contains_form1(&d, tol)?;
            let b = self.contains_form2(&d, tol)?;
            rep.members_form1 += a as usize;
            rep.members_form2 += b as usize;
            if a != b {
                return Err(Error::Internal(format!("minimal-face forms disagree on D = {d}")));
            }
        }
        Ok(rep)
    }
}

pub fn minimal_face(
    prog: &CopositiveProgram,
    w: &[SimplexPoint],
    reg: &RegularizedProblem,
    opts: &SolverOptions,
) -> Result<MinimalFaceDescriptor> {
    if w.is_empty() {
        return Err(Error::input("W must contain at least one point"));
    }
    let m_sets = w.iter().map(|t| compute_m(prog, t, reg, opts).map(|m| m.members)).collect::<Result<_>>()?;
    Ok(MinimalFaceDescriptor { vertices: w.to_vec(), m_sets })
}
