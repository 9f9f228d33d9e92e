//! Machine-readable run reports.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::model::CopositiveProgram;
use crate::oracle::{IndexSet, OmegaDescriptor};
use crate::regularizer::{CompressedLedger, FaceLedgerEntry, IterationRecord, RegRun, RegStatus, RegularizedProblem};
use crate::sip::SipDiagnostics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Regular,
    Regularized,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizedSection {
    pub eq_rows: Vec<(usize, usize)>,
    pub ineq_rows: Vec<(usize, usize)>,
    /// `null` when the index set is the whole simplex.
    pub omega: Option<OmegaDescriptor>,
    /// Set when no vertex of the simplex lies in `Omega`, so the quadratic
    /// constraint was dropped.
    #[serde(default)]
    pub omega_empty: bool,
    pub witness: Vec<f64>,
    /// `+inf` (empty index set) is written as `null`.
    #[serde(with = "finite_or_null")]
    pub margin: f64,
}

impl RegularizedSection {
    pub fn from_problem(reg: &RegularizedProblem, tol: &Tolerances) -> Result<Self> {
        let omega_empty = match reg.omega() {
            Some(om) => om.is_empty(tol.feas)?,
            None => false,
        };
        Ok(RegularizedSection {
            eq_rows: reg.eq_rows.clone(),
            ineq_rows: reg.ineq_rows.clone(),
            omega: reg.omega().cloned(),
            omega_empty,
            witness: reg.witness.clone(),
            margin: reg.margin,
        })
    }

    /// Rebuilds the regularized problem for `prog`.
    pub fn to_problem(&self, prog: &CopositiveProgram) -> Result<RegularizedProblem> {
        if self.witness.len() != prog.n() {
            return Err(Error::input(format!(
                "witness has {} entries, program has n = {}",
                self.witness.len(),
                prog.n()
            )));
        }
        let (taus, index_set) = match &self.omega {
            Some(om) => (om.points().to_vec(), IndexSet::Omega(om.clone())),
            None => (Vec::new(), IndexSet::FullSimplex),
        };
        let reg = RegularizedProblem {
            prog: prog.clone(),
            taus,
            eq_rows: self.eq_rows.clone(),
            ineq_rows: self.ineq_rows.clone(),
            index_set,
            witness: self.witness.clone(),
            margin: self.margin,
        };
        reg.sip_instance().validate()?;
        Ok(reg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub m_star: Option<usize>,
    pub iterations: Vec<IterationRecord>,
    pub regularized: Option<RegularizedSection>,
    pub compressed: Option<CompressedLedger>,
    #[serde(default)]
    pub ledger: Vec<FaceLedgerEntry>,
    #[serde(default)]
    pub diagnostics: Vec<SipDiagnostics>,
    pub tolerances: Tolerances,
}

impl Report {
    pub fn from_run(run: &RegRun, compressed: Option<CompressedLedger>, tol: &Tolerances) -> Result<Self> {
        let (status, reason, regularized) = match &run.status {
            RegStatus::Regular { witness, margin } => (
                Status::Regular,
                None,
                Some(RegularizedSection {
                    eq_rows: Vec::new(),
                    ineq_rows: Vec::new(),
                    omega: None,
                    omega_empty: false,
                    witness: witness.clone(),
                    margin: *margin,
                }),
            ),
            RegStatus::Regularized { problem, .. } => {
                (Status::Regularized, None, Some(RegularizedSection::from_problem(problem, tol)?))
            }
            RegStatus::Failed { reason } => (Status::Failed, Some(reason.clone()), None),
        };
        Ok(Report {
            status,
            reason,
            m_star: run.m_star(),
            iterations: run.iterations.clone(),
            regularized,
            compressed,
            ledger: run.ledger.clone(),
            diagnostics: run.trace.clone(),
            tolerances: *tol,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only serializable data")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))
    }
}

/// JSON has no infinity; a non-finite margin is stored as `null`.
mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SolverOptions;
    use crate::fixtures;
    use crate::regularizer::{compress_ledger, reg_lcop};

    fn report_for(prog: &CopositiveProgram) -> Report {
        let opts = SolverOptions::default();
        let run = reg_lcop(prog, &opts).unwrap();
        let comp = compress_ledger(&run.ledger, prog, opts.tol.rank).unwrap();
        Report::from_run(&run, Some(comp), &opts.tol).unwrap()
    }

    #[test]
    fn e2_report_round_trips() {
        let rep = report_for(&fixtures::e2());
        assert_eq!(rep.status, Status::Regularized);
        assert_eq!(rep.m_star, Some(1));
        let text = rep.to_json();
        assert_eq!(Report::from_json(&text).unwrap(), rep);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["status", "m_star", "iterations", "regularized", "compressed", "tolerances"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["status"], "regularized");
        assert_eq!(v["regularized"]["omega"]["sigma"], 1.0);
        assert_eq!(v["regularized"]["ineq_rows"], serde_json::json!([[0, 1]]));
        assert_eq!(v["iterations"][0]["L"], serde_json::json!([[0]]));
        assert_eq!(v["compressed"]["s_star"], 0);
    }

    #[test]
    fn regularized_section_rebuilds_the_problem() {
        let prog = fixtures::e3();
        let rep = report_for(&prog);
        let reg = rep.regularized.as_ref().unwrap().to_problem(&prog).unwrap();
        assert_eq!(reg.eq_rows, vec![(0, 0), (0, 1)]);
        assert!(reg.omega().is_some());
    }

    #[test]
    fn regular_report_has_no_omega() {
        let rep = report_for(&fixtures::e1());
        assert_eq!(rep.status, Status::Regular);
        assert_eq!(rep.m_star, Some(0));
        assert!(rep.regularized.as_ref().unwrap().omega.is_none());
        assert_eq!(Report::from_json(&rep.to_json()).unwrap(), rep);
    }

    #[test]
    fn infinite_margin_is_null() {
        let s = RegularizedSection {
            eq_rows: vec![],
            ineq_rows: vec![],
            omega: None,
            omega_empty: true,
            witness: vec![0.0],
            margin: f64::INFINITY,
        };
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"margin\":null"));
        assert_eq!(serde_json::from_str::<RegularizedSection>(&text).unwrap(), s);
    }
}
