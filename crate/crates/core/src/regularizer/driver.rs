use serde::{Deserialize, Serialize};

use super::ledger::FaceLedgerEntry;
use super::state::{check_disjointness_condition, kernel_residual, update_index_sets, IterationState, Record};
use crate::config::SolverOptions;
use crate::error::{Error, Result};
use crate::model::{CopositiveProgram, SimplexPoint, SymMatrix};
use crate::oracle::{IndexSet, OmegaDescriptor};
use crate::sip::{solve_sip, SipDiagnostics, SipInstance, SipOutcome};

/// A finite description of the feasible set: linear rows at the records,
/// `t'A(x)t >= 0` on the index set, and a witness strictly positive there.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedProblem {
    pub prog: CopositiveProgram,
    pub taus: Vec<SimplexPoint>,
    pub eq_rows: Vec<(usize, usize)>,
    pub ineq_rows: Vec<(usize, usize)>,
    pub index_set: IndexSet,
    pub witness: Vec<f64>,
    /// Certified lower bound on `t'A(witness)t` over the index set (`+inf` if it is empty).
    pub margin: f64,
}

impl RegularizedProblem {
    /// The unchanged program, for the case where the Slater condition holds.
    pub fn unchanged(prog: &CopositiveProgram, witness: Vec<f64>, margin: f64) -> Self {
        RegularizedProblem {
            prog: prog.clone(),
            taus: Vec::new(),
            eq_rows: Vec::new(),
            ineq_rows: Vec::new(),
            index_set: IndexSet::FullSimplex,
            witness,
            margin,
        }
    }

    pub fn omega(&self) -> Option<&OmegaDescriptor> {
        match &self.index_set {
            IndexSet::Omega(om) => Some(om),
            IndexSet::FullSimplex => None,
        }
    }

    pub fn sip_instance(&self) -> SipInstance<'_> {
        SipInstance {
            prog: &self.prog,
            taus: self.taus.clone(),
            eq_rows: self.eq_rows.clone(),
            ineq_rows: self.ineq_rows.clone(),
            index_set: self.index_set.clone(),
        }
    }

    /// Values `e_k'A(x)tau(i)` of the equality rows and of the inequality rows.
    pub fn row_values(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let d = crate::model::eval_constraint(&self.prog, x)?;
        let val =
            |&(i, k): &(usize, usize)| -> f64 { d.row(k).iter().zip(self.taus[i].coords()).map(|(a, b)| a * b).sum() };
        Ok((self.eq_rows.iter().map(val).collect(), self.ineq_rows.iter().map(val).collect()))
    }
}

/// Per-iteration data of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Iteration whose subproblem produced this record.
    pub m: usize,
    /// New indices and their weights.
    pub tau: Vec<SimplexPoint>,
    pub gamma: Vec<f64>,
    /// `L(i)` of every record after the update.
    #[serde(rename = "L")]
    pub l: Vec<Vec<usize>>,
    /// Multipliers of the records present before the update.
    pub lambda: Vec<Vec<f64>>,
    #[serde(rename = "Y")]
    pub y: SymMatrix,
    /// Outcome of [`check_disjointness_condition`] for this update; the key
    /// name is part of the report schema.
    #[serde(rename = "cond_11star")]
    pub disjointness: bool,
    pub stationarity_residual: f64,
    pub kernel_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum RegStatus {
    /// The Slater condition holds at `witness`.
    Regular {
        witness: Vec<f64>,
        margin: f64,
    },
    Regularized {
        problem: RegularizedProblem,
        m_star: usize,
    },
    Failed {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegRun {
    pub status: RegStatus,
    pub iterations: Vec<IterationRecord>,
    pub ledger: Vec<FaceLedgerEntry>,
    pub state: IterationState,
    /// Diagnostics of every subproblem solve, in order.
    pub trace: Vec<SipDiagnostics>,
}

impl RegRun {
    pub fn m_star(&self) -> Option<usize> {
        match &self.status {
            RegStatus::Regular { .. } => Some(0),
            RegStatus::Regularized { m_star, .. } => Some(*m_star),
            RegStatus::Failed { .. } => None,
        }
    }

    pub fn problem(&self) -> Option<&RegularizedProblem> {
        match &self.status {
            RegStatus::Regularized { problem, .. } => Some(problem),
            _ => None,
        }
    }
}

fn sip_for_state<'a>(prog: &'a CopositiveProgram, state: &IterationState, tol_support: f64) -> Result<SipInstance<'a>> {
    if state.records.is_empty() {
        return Ok(SipInstance::initial(prog));
    }
    let (eq_rows, ineq_rows) = state.rows(prog.p());
    Ok(SipInstance {
        prog,
        taus: state.points(),
        eq_rows,
        ineq_rows,
        index_set: IndexSet::Omega(OmegaDescriptor::new(state.points(), tol_support)?),
    })
}

/// Runs the regularization algorithm: solve the subproblem on the current
/// records; a negative optimum ends the run, a zero optimum yields new
/// indices and larger `L` sets, and one ledger entry.
pub fn reg_lcop(prog: &CopositiveProgram, opts: &SolverOptions) -> Result<RegRun> {
    opts.validate()?;
    let tol = &opts.tol;
    let cap = opts.cap_for(prog.n());
    let mut run = RegRun {
        status: RegStatus::Failed { reason: String::new() },
        iterations: Vec::new(),
        ledger: Vec::new(),
        state: IterationState::default(),
        trace: Vec::new(),
    };
    let fail = |mut run: RegRun, reason: String| {
        run.status = RegStatus::Failed { reason };
        Ok(run)
    };

    for m in 0..=cap {
        let inst = sip_for_state(prog, &run.state, tol.support)?;
        let outcome = match solve_sip(&inst, opts) {
            Ok(o) => o,
            Err(e @ (Error::Certificate { .. } | Error::Solver(_))) => {
                return fail(run, format!("iteration {m}: {e}"));
            }
            Err(e) => return Err(e),
        };
        match outcome {
            SipOutcome::NegativeFeasible { x, margin, diag, .. } => {
                run.trace.push(diag);
                run.status = if m == 0 {
                    RegStatus::Regular { witness: x, margin }
                } else {
                    RegStatus::Regularized {
                        problem: RegularizedProblem {
                            prog: prog.clone(),
                            taus: inst.taus,
                            eq_rows: inst.eq_rows,
                            ineq_rows: inst.ineq_rows,
                            index_set: inst.index_set,
                            witness: x,
                            margin,
                        },
                        m_star: m,
                    }
                };
                return Ok(run);
            }
            SipOutcome::Unresolved { diag } => {
                let reason = format!("iteration {m}: subproblem unresolved: {}", diag.message);
                run.trace.push(diag);
                return fail(run, reason);
            }
            SipOutcome::OptimalZero { certificate, diag, .. } => {
                run.trace.push(diag);
                if m == cap {
                    return fail(run, format!("iteration cap {cap} reached"));
                }
                let cond = check_disjointness_condition(&run.state, &certificate, tol.support);
                let up = update_index_sets(&run.state, &certificate, tol.mult, tol.support);
                let entry = FaceLedgerEntry::new(m + 1, &certificate, &run.state, &up.state, prog.p());
                let kres = kernel_residual(prog, &entry.y);
                run.iterations.push(IterationRecord {
                    m,
                    tau: certificate.new_indices.iter().map(|ni| ni.tau.clone()).collect(),
                    gamma: certificate.new_indices.iter().map(|ni| ni.gamma).collect(),
                    l: up.state.records.iter().map(|r: &Record| r.l.clone()).collect(),
                    lambda: certificate.lambda.clone(),
                    y: entry.y.clone(),
                    disjointness: cond,
                    stationarity_residual: certificate.residual,
                    kernel_residual: kres,
                });
                if kres > tol.cert {
                    return fail(run, format!("iteration {m}: Y is {kres:.3e} away from Ker A"));
                }
                if !up.progress {
                    return fail(run, format!("iteration {m}: no new index and no L set grew"));
                }
                run.ledger.push(entry);
                run.state = up.state;
            }
        }
    }
    unreachable!("the loop returns at the cap")
}
