use serde::{Deserialize, Serialize};

use crate::model::{CopositiveProgram, SimplexPoint, SymMatrix};
use crate::sip::DualCertificate;

/// An index `tau(i)` together with its set `L(i)` (zero-based, increasing).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub tau: SimplexPoint,
    #[serde(rename = "L")]
    pub l: Vec<usize>,
}

/// Records `(tau(i), L_m(i))`, `i in I_m`, at the start of iteration `m`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IterationState {
    pub m: usize,
    pub records: Vec<Record>,
}

impl IterationState {
    pub fn points(&self) -> Vec<SimplexPoint> {
        self.records.iter().map(|r| r.tau.clone()).collect()
    }

    /// `(i, k)` pairs with `k in L(i)` and with `k` outside `L(i)`.
    #[allow(clippy::type_complexity)]
    pub fn rows(&self, p: usize) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
        let mut eq = Vec::new();
        let mut ineq = Vec::new();
        for (i, r) in self.records.iter().enumerate() {
            for k in 0..p {
                if r.l.contains(&k) {
                    eq.push((i, k));
                } else {
                    ineq.push((i, k));
                }
            }
        }
        (eq, ineq)
    }

    /// `sum |L(i)| + |I|`, which grows strictly on every productive iteration.
    pub fn progress_measure(&self) -> usize {
        self.records.iter().map(|r| r.l.len()).sum::<usize>() + self.records.len()
    }

    /// Checks `P_+(tau(i)) ⊆ L(i)` for every record.
    pub fn supports_contained(&self, tol_support: f64) -> bool {
        self.records.iter().all(|r| r.tau.positive_support(tol_support).iter().all(|k| r.l.contains(k)))
    }
}

/// Result of [`update_index_sets`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateUpdate {
    pub state: IterationState,
    /// `Delta L(i)` for every old record.
    pub delta_l: Vec<Vec<usize>>,
    /// Indices of the appended records.
    pub added: Vec<usize>,
    /// `false` when neither an `L` set grew nor a record was added.
    pub progress: bool,
}

/// `L(i) <- L(i) ∪ {k not in L(i) : lambda_k(i) > tol_mult}` for old records;
/// each new index `tau` is appended with `L = P_+(tau)` unless it duplicates
/// an existing record within `tol_support` in the max norm.
pub fn update_index_sets(
    state: &IterationState,
    cert: &DualCertificate,
    tol_mult: f64,
    tol_support: f64,
) -> StateUpdate {
    let mut next = state.clone();
    next.m += 1;
    let mut delta_l = Vec::with_capacity(state.records.len());
    for (r, lam) in next.records.iter_mut().zip(&cert.lambda) {
        let dl: Vec<usize> = (0..lam.len()).filter(|k| !r.l.contains(k) && lam[*k] > tol_mult).collect();
        r.l.extend(&dl);
        r.l.sort_unstable();
        delta_l.push(dl);
    }
    let mut added = Vec::new();
    for ni in &cert.new_indices {
        if next.records.iter().any(|r| r.tau.linf_distance(&ni.tau) <= tol_support) {
            continue;
        }
        added.push(next.records.len());
        next.records.push(Record { tau: ni.tau.clone(), l: ni.tau.positive_support(tol_support) });
    }
    let progress = !added.is_empty() || delta_l.iter().any(|d| !d.is_empty());
    StateUpdate { state: next, delta_l, added, progress }
}

/// `P_0(tau_new) ∩ P_+(tau_old) ≠ ∅` for every new index and every old record.
pub fn check_disjointness_condition(state_old: &IterationState, cert: &DualCertificate, tol_support: f64) -> bool {
    cert.new_indices.iter().all(|ni| {
        let zero = ni.tau.zero_support(tol_support);
        state_old.records.iter().all(|r| r.tau.positive_support(tol_support).iter().any(|k| zero.contains(k)))
    })
}

/// `Y = sum gamma tau tau' + sum (tau lambda' + lambda tau')`, the first sum
/// over the new indices and the second over the old records.
pub fn build_y(cert: &DualCertificate, state_old: &IterationState, p: usize) -> SymMatrix {
    let mut y = SymMatrix::zeros(p);
    for ni in &cert.new_indices {
        y.add_scaled(ni.gamma, &SymMatrix::outer(ni.tau.coords()));
    }
    for (r, lam) in state_old.records.iter().zip(&cert.lambda) {
        if lam.iter().any(|v| *v != 0.0) {
            y.add_scaled(1.0, &SymMatrix::sym_outer(r.tau.coords(), lam));
        }
    }
    y
}

/// `max_j |A_j • Y|`.
pub fn kernel_residual(prog: &CopositiveProgram, y: &SymMatrix) -> f64 {
    prog.matrices().iter().map(|a| a.inner(y).abs()).fold(0.0, f64::max)
}
