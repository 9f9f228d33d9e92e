//! The sequence of matrices `Y_m` and faces `F_m` produced by the driver,
//! its verification, and the compressed (core) subsequence.

use serde::{Deserialize, Serialize};

use super::state::{build_y, kernel_residual, IterationState, Record};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::rank;
use crate::model::{ker_dimension, CopositiveProgram, SymMatrix};
use crate::oracle::is_copositive;
use crate::sampling::{random_copositive, sample_face_member, seeded_rng};
use crate::sip::{DualCertificate, NewIndex};

/// `Y_m` together with the records describing `F_m` and the multipliers
/// `Y_m` was assembled from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceLedgerEntry {
    /// One-based position `m`; `F_0 = COP^p` and `Y_0 = 0` are implicit.
    pub m: usize,
    #[serde(rename = "Y")]
    pub y: SymMatrix,
    /// Records `(tau(i), L_m(i))` defining `F_m`.
    pub face: Vec<Record>,
    pub generator: YGenerator,
}

/// The data `Y_m` is built from: the new indices with their weights, and
/// `lambda` aligned with the records of `F_{m-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YGenerator {
    pub new_indices: Vec<NewIndex>,
    pub lambda: Vec<Vec<f64>>,
    pub previous: Vec<Record>,
}

impl FaceLedgerEntry {
    pub fn new(
        m: usize,
        cert: &DualCertificate,
        state_old: &IterationState,
        state_new: &IterationState,
        p: usize,
    ) -> Self {
        FaceLedgerEntry {
            m,
            y: build_y(cert, state_old, p),
            face: state_new.records.clone(),
            generator: YGenerator {
                new_indices: cert.new_indices.clone(),
                lambda: cert.lambda.clone(),
                previous: state_old.records.clone(),
            },
        }
    }
}

/// `D in COP^p`, `e_k'D tau(i) = 0` for `k in L(i)` and `>= 0` otherwise.
pub fn face_contains(face: &[Record], d: &SymMatrix, tol: &Tolerances) -> Result<bool> {
    for r in face {
        if r.tau.dim() != d.dim() {
            return Err(Error::input("face record and matrix dimensions differ"));
        }
        let dt = d.mul_vec(r.tau.coords());
        for (k, v) in dt.iter().enumerate() {
            let ok = if r.l.contains(&k) { v.abs() <= tol.feas } else { *v >= -tol.feas };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(is_copositive(d, tol)?.is_copositive())
}

pub fn face_membership(entry: &FaceLedgerEntry, d: &SymMatrix, tol: &Tolerances) -> Result<bool> {
    face_contains(&entry.face, d, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryCheck {
    pub m: usize,
    pub kernel_residual: f64,
    /// `Y_m ∈ Ker A`.
    pub kernel_ok: bool,
    /// `Y_m` lies in the dual of the previous face: a nonnegative combination of `tau tau'` terms
    /// plus symmetrized `tau lambda'` terms whose signs fit `F*_{m-1}`.
    pub dual_cone_ok: bool,
    pub dual_cone_issue: Option<String>,
    pub samples: usize,
    /// Sampled matrices lying in `F_m`.
    pub members: usize,
    /// Face monotonicity: samples in `F_m` but not in `F_{m-1}`,
    /// plus samples in `F_{m-1} ∩ {Y_m}⊥` but not in `F_m`.
    pub face_violations: usize,
    /// Largest `|D • Y_m|` over sampled `D in F_m`.
    pub orthogonality_max: f64,
    pub orthogonality_violations: usize,
}

impl EntryCheck {
    pub fn passed(&self) -> bool {
        self.kernel_ok && self.dual_cone_ok && self.face_violations == 0 && self.orthogonality_violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerReport {
    pub entries: Vec<EntryCheck>,
    pub passed: bool,
}

fn check_generator(entry: &FaceLedgerEntry, prev_face: &[Record], tol: &Tolerances) -> Option<String> {
    let g = &entry.generator;
    if g.previous != prev_face {
        return Some("multipliers refer to records other than those of the previous face".into());
    }
    if g.lambda.len() != g.previous.len() {
        return Some("one lambda vector per previous record expected".into());
    }
    if let Some(ni) = g.new_indices.iter().find(|ni| !(ni.gamma > 0.0)) {
        return Some(format!("weight {} of a new index is not positive", ni.gamma));
    }
    for (i, (r, lam)) in g.previous.iter().zip(&g.lambda).enumerate() {
        for (k, v) in lam.iter().enumerate() {
            if !r.l.contains(&k) && *v < -tol.mult {
                return Some(format!("lambda_{k}({i}) = {v} is negative outside L({i})"));
            }
        }
    }
    let state = IterationState { m: entry.m - 1, records: g.previous.clone() };
    let cert = DualCertificate { new_indices: g.new_indices.clone(), lambda: g.lambda.clone(), residual: 0.0 };
    let rebuilt = build_y(&cert, &state, entry.y.dim());
    let diff = rebuilt.as_slice().iter().zip(entry.y.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if diff > tol.cert {
        return Some(format!("Y differs from its generator by {diff:.3e}"));
    }
    None
}

/// Checks every entry for dual-cone membership, `Y_m ∈ Ker A`, face
/// monotonicity and orthogonality; `samples` matrices per entry
/// are drawn from `F_m`, from `F_{m-1}`, and from the whole cone in turn.
pub fn verify_ledger(
    entries: &[FaceLedgerEntry],
    prog: &CopositiveProgram,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<LedgerReport> {
    let p = prog.p();
    let mut rng = seeded_rng(seed);
    let mut checks = Vec::with_capacity(entries.len());
    for (pos, e) in entries.iter().enumerate() {
        let prev_face: &[Record] = if pos == 0 { &[] } else { &entries[pos - 1].face };
        let kres = kernel_residual(prog, &e.y);
        let issue = check_generator(e, prev_face, tol);
        let mut members = 0;
        let mut face_violations = 0;
        let mut orth_max: f64 = 0.0;
        let mut orth_bad = 0;
        for s in 0..samples {
            let d = match s % 3 {
                0 => sample_face_member(&mut rng, p, &e.face, tol.support),
                1 => sample_face_member(&mut rng, p, prev_face, tol.support),
                _ => random_copositive(&mut rng, p),
            };
            let in_m = face_contains(&e.face, &d, tol)?;
            let in_prev = face_contains(prev_face, &d, tol)?;
            let dy = d.inner(&e.y).abs();
            if in_m {
                members += 1;
                orth_max = orth_max.max(dy);
                if dy > tol.cert {
                    orth_bad += 1;
                }
                if !in_prev {
                    face_violations += 1;
                }
            } else if in_prev && dy <= tol.feas {
                face_violations += 1;
            }
        }
        checks.push(EntryCheck {
            m: e.m,
            kernel_residual: kres,
            kernel_ok: kres <= tol.cert,
            dual_cone_ok: issue.is_none(),
            dual_cone_issue: issue,
            samples,
            members,
            face_violations,
            orthogonality_max: orth_max,
            orthogonality_violations: orth_bad,
        });
    }
    let passed = checks.iter().all(EntryCheck::passed);
    Ok(LedgerReport { entries: checks, passed })
}

/// Core subsequence of a ledger: entry positions whose `Y` is linearly
/// independent of the `Y`s kept before it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressedLedger {
    /// Zero-based positions into the raw ledger.
    pub core: Vec<usize>,
    /// The iteration numbers `m` of the core entries.
    pub m_s: Vec<usize>,
    pub s_star: usize,
}

pub fn compress_ledger(
    entries: &[FaceLedgerEntry],
    prog: &CopositiveProgram,
    tol_rank: f64,
) -> Result<CompressedLedger> {
    let mut kept: Vec<Vec<f64>> = Vec::new();
    let mut core = Vec::new();
    for (pos, e) in entries.iter().enumerate() {
        let v = e.y.upper_coords();
        let mut trial = kept.clone();
        trial.push(v.clone());
        if rank(&trial, tol_rank) > kept.len() {
            kept.push(v);
            core.push(pos);
        }
    }
    let s_star = core.len().saturating_sub(1);
    // Core matrices are independent members of Ker A, so even s* + 1 of them fit.
    let ker = ker_dimension(prog, tol_rank);
    if core.len() > ker {
        return Err(Error::Ledger(format!("{} independent kernel matrices exceed dim Ker A = {ker}", core.len())));
    }
    Ok(CompressedLedger { m_s: core.iter().map(|&i| entries[i].m).collect(), core, s_star })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::SimplexPoint;

    fn pt(c: &[f64]) -> SimplexPoint {
        SimplexPoint::new(c.to_vec()).unwrap()
    }

    fn e2_entry() -> FaceLedgerEntry {
        let cert = DualCertificate {
            new_indices: vec![NewIndex { tau: pt(&[1.0, 0.0]), gamma: 1.0 }],
            lambda: vec![],
            residual: 0.0,
        };
        let new = IterationState { m: 1, records: vec![Record { tau: pt(&[1.0, 0.0]), l: vec![0] }] };
        FaceLedgerEntry::new(1, &cert, &IterationState::default(), &new, 2)
    }

    fn entry_with_y(m: usize, y: SymMatrix) -> FaceLedgerEntry {
        FaceLedgerEntry {
            m,
            y,
            face: vec![],
            generator: YGenerator { new_indices: vec![], lambda: vec![], previous: vec![] },
        }
    }

    #[test]
    fn face_membership_examples() {
        let tol = Tolerances::default();
        let e = e2_entry();
        let d = SymMatrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(face_membership(&e, &d, &tol).unwrap());
        assert!(!face_membership(&e, &SymMatrix::identity(2), &tol).unwrap());
        assert!(face_contains(&[], &SymMatrix::identity(2), &tol).unwrap());
    }

    #[test]
    fn e2_ledger_verifies() {
        let rep = verify_ledger(&[e2_entry()], &fixtures::e2(), 60, 1, &Tolerances::default()).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.entries[0].members > 0);
    }

    #[test]
    fn corrupted_y_fails_the_kernel_check() {
        let mut e = e2_entry();
        e.y = SymMatrix::identity(2);
        let rep = verify_ledger(&[e], &fixtures::e2(), 30, 1, &Tolerances::default()).unwrap();
        assert!(!rep.passed);
        assert!(!rep.entries[0].kernel_ok);
        assert!((rep.entries[0].kernel_residual - 1.0).abs() < 1e-15);
        assert!(!rep.entries[0].dual_cone_ok);
    }

    #[test]
    fn empty_ledger_passes() {
        let rep = verify_ledger(&[], &fixtures::e1(), 30, 1, &Tolerances::default()).unwrap();
        assert!(rep.passed && rep.entries.is_empty());
    }

    #[test]
    fn compression_examples() {
        let zero = CopositiveProgram::new(vec![1.0], vec![SymMatrix::zeros(2); 2]).unwrap();
        let y1 = SymMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let c = compress_ledger(&[entry_with_y(1, y1.clone())], &zero, 1e-10).unwrap();
        assert_eq!((c.core.clone(), c.s_star), (vec![0], 0));
        let c = compress_ledger(&[entry_with_y(1, y1.clone()), entry_with_y(2, y1.scaled(2.0))], &zero, 1e-10).unwrap();
        assert_eq!(c.core, vec![0]);
        let y2 = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let c = compress_ledger(&[entry_with_y(1, y1), entry_with_y(2, y2)], &zero, 1e-10).unwrap();
        assert_eq!((c.core, c.m_s, c.s_star), (vec![0, 1], vec![1, 2], 1));
    }

    #[test]
    fn compression_enforces_the_kernel_bound() {
        // dim Ker A = 1 for E2, so two independent matrices cannot both be core.
        let y1 = SymMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let y2 = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let err = compress_ledger(&[entry_with_y(1, y1), entry_with_y(2, y2)], &fixtures::e2(), 1e-10);
        assert!(matches!(err, Err(Error::Ledger(_))));
    }
}
