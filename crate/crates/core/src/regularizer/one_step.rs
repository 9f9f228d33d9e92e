use super::driver::RegularizedProblem;
use crate::config::SolverOptions;
use crate::error::{Error, Result};
use crate::model::{CopositiveProgram, SimplexPoint};
use crate::oracle::{IndexSet, OmegaDescriptor};
use crate::sip::{solve_sip, SipInstance, SipOutcome};

/// Regularizes in one step from a caller-supplied set `W` that is asserted to
/// be the vertex set of `conv T_im`.
///
/// The rows are `A(x)t >= 0` for every `t in W`; with `strict`, the rows on
/// `P_+(t)` become equalities. A witness with `t'A(x)t > 0` on `Omega(W)` is
/// searched by one subproblem solve.
pub fn one_step_regularize(
    prog: &CopositiveProgram,
    w: &[SimplexPoint],
    strict: bool,
    opts: &SolverOptions,
) -> Result<RegularizedProblem> {
    if w.is_empty() {
        return Err(Error::input("W must contain at least one point"));
    }
    let p = prog.p();
    if w.iter().any(|t| t.dim() != p) {
        return Err(Error::input(format!("points of W must have dimension p = {p}")));
    }
    let mut eq_rows = Vec::new();
    let mut ineq_rows = Vec::new();
    for (i, t) in w.iter().enumerate() {
        let support = t.positive_support(opts.tol.support);
        for k in 0..p {
            if strict && support.contains(&k) {
                eq_rows.push((i, k));
            } else {
                ineq_rows.push((i, k));
            }
        }
    }
    let inst = SipInstance {
        prog,
        taus: w.to_vec(),
        eq_rows,
        ineq_rows,
        index_set: IndexSet::Omega(OmegaDescriptor::new(w.to_vec(), opts.tol.support)?),
    };
    match solve_sip(&inst, opts)? {
        SipOutcome::NegativeFeasible { x, margin, .. } => Ok(RegularizedProblem {
            prog: prog.clone(),
            taus: inst.taus,
            eq_rows: inst.eq_rows,
            ineq_rows: inst.ineq_rows,
            index_set: inst.index_set,
            witness: x,
            margin,
        }),
        SipOutcome::OptimalZero { certificate, .. } => {
            let blocking = certificate
                .new_indices
                .iter()
                .map(|ni| format!("{:?}", ni.tau.coords()))
                .collect::<Vec<_>>()
                .join(", ");
            Err(Error::input(format!(
                "W is not the full vertex set of conv T_im: no witness exists; blocking index {blocking}"
            )))
        }
        SipOutcome::Unresolved { diag } => {
            Err(Error::Solver(format!("one-step subproblem unresolved: {}", diag.message)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn e2_with_the_first_vertex() {
        let reg = one_step_regularize(&fixtures::e2(), &[SimplexPoint::vertex(2, 0)], false, &SolverOptions::default())
            .unwrap();
        assert_eq!(reg.ineq_rows, vec![(0, 0), (0, 1)]);
        assert!((reg.witness[0] - 1.0).abs() < 1e-9);
        assert!(reg.margin >= 0.25);
    }

    #[test]
    fn e3_strict_mode_uses_equalities() {
        let reg = one_step_regularize(&fixtures::e3(), &[SimplexPoint::barycenter(2)], true, &SolverOptions::default())
            .unwrap();
        assert_eq!(reg.eq_rows, vec![(0, 0), (0, 1)]);
        assert!(reg.ineq_rows.is_empty());
        assert!((reg.witness[0] - 1.0).abs() < 1e-9);
        assert!(reg.margin > 0.2 && reg.margin <= 0.25 + 1e-12);
    }

    #[test]
    fn empty_w_is_rejected() {
        assert!(matches!(
            one_step_regularize(&fixtures::e1(), &[], false, &SolverOptions::default()),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn incomplete_w_is_reported() {
        // E2's immobile index is (1, 0); W = {(0, 1)} leaves it inside Omega(W).
        let err = one_step_regularize(&fixtures::e2(), &[SimplexPoint::vertex(2, 1)], false, &SolverOptions::default())
            .unwrap_err();
        assert!(err.to_string().contains("not the full vertex set"), "{err}");
    }
}
