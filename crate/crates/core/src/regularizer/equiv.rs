use rand::Rng;
use serde::{Deserialize, Serialize};

use super::driver::RegularizedProblem;
use crate::config::SolverOptions;
use crate::error::Result;
use crate::model::{eval_constraint, CopositiveProgram};
use crate::oracle::{bound_over_omega, min_quad_over_simplex_with, OmegaMin, StopRule};
use crate::sampling::seeded_rng;
use crate::sip::{Separator, BRANCH_NODES};

/// Outcome of comparing the two descriptions of the feasible set on samples.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EquivReport {
    pub samples: usize,
    pub agreements: usize,
    /// Samples within the tie band of a boundary of the regularized description.
    pub ties: usize,
    /// Samples neither the Omega grid nor the branch and bound could classify.
    pub undecided: usize,
    /// Samples the copositivity test classifies as feasible.
    pub feasible_count: usize,
    pub disagreements: Vec<Disagreement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub x: Vec<f64>,
    /// `min t'A(x)t` over the simplex.
    pub copositive_min: f64,
    /// Smallest signed margin of the regularized description.
    pub regularized_margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Verdict {
    Feasible(f64),
    Infeasible(f64),
    Tie,
    Undecided,
}

/// Compares `A(x) ∈ COP` against the regularized rows plus the Omega
/// constraint on `n_samples` points drawn uniformly from the box of
/// half-width `radius` around the witness.
///
/// The Omega constraint is checked on a grid first; when the grid bracket
/// straddles the tie band, simplicial branch and bound narrows it.
pub fn feasibility_equiv_sample(
    prog: &CopositiveProgram,
    reg: &RegularizedProblem,
    n_samples: usize,
    seed: u64,
    radius: f64,
    opts: &SolverOptions,
) -> Result<EquivReport> {
    let p = prog.p();
    let band = opts.tol.band;
    let inst = reg.sip_instance();
    // Rows whose coefficients vanish hold for every x and carry no margin.
    let live_eq: Vec<usize> = (0..reg.eq_rows.len())
        .filter(|&r| {
            let (i, k) = reg.eq_rows[r];
            inst.row_coeffs(i, k).iter().any(|c| c.abs() > opts.tol.feas)
        })
        .collect();
    let mut sep: Option<Separator> = None;
    let mut rng = seeded_rng(seed);
    let mut rep = EquivReport { samples: n_samples, ..Default::default() };

    for _ in 0..n_samples {
        let x: Vec<f64> = reg.witness.iter().map(|w| w + rng.gen_range(-radius..=radius)).collect();
        let d = eval_constraint(prog, &x)?;
        let cop_min = min_quad_over_simplex_with(&d, opts.p_max)?.value;
        let cop_feasible = cop_min >= -opts.tol.cop;
        rep.feasible_count += cop_feasible as usize;

        let (eq, ineq) = reg.row_values(&x)?;
        let mut rows = Verdict::Feasible(f64::INFINITY);
        for v in live_eq.iter().map(|&r| -eq[r].abs()).chain(ineq) {
            rows = combine(rows, classify(v, v, band));
        }
        let mut verdict = rows;
        if !matches!(rows, Verdict::Infeasible(_)) {
            if sep.is_none() {
                sep = Some(Separator::new(&reg.index_set, p, opts.h, (opts.max_grid_points / 8).max(1), opts)?);
            }
            let mut omega = match sep.as_ref().expect("built above").minimize(&d)? {
                OmegaMin::EmptyIndexSet => Verdict::Feasible(f64::INFINITY),
                OmegaMin::Min(res) => classify(res.value, res.value_lb(), band),
            };
            if let (Verdict::Undecided, Some(om)) = (omega, reg.omega()) {
                if p <= opts.p_max {
                    let stop = StopRule { below: -band, above: band, max_nodes: BRANCH_NODES, gap: band / 10.0 };
                    let b = bound_over_omega(&d, om, opts.tol.feas, opts.p_max, stop)?;
                    omega = classify(b.ub, b.lb, band);
                }
            }
            verdict = combine(rows, omega);
        }
        match verdict {
            Verdict::Tie => rep.ties += 1,
            Verdict::Undecided => rep.undecided += 1,
            Verdict::Feasible(_) if cop_feasible => rep.agreements += 1,
            Verdict::Infeasible(_) if !cop_feasible => rep.agreements += 1,
            Verdict::Feasible(m) | Verdict::Infeasible(m) => {
                rep.disagreements.push(Disagreement { x, copositive_min: cop_min, regularized_margin: m })
            }
        }
    }
    Ok(rep)
}

/// Classifies a constraint `g >= 0` from an upper bound `value` and a lower
/// bound `lb` on `g`.
fn classify(value: f64, lb: f64, band: f64) -> Verdict {
    if value < -band {
        Verdict::Infeasible(value)
    } else if lb > band {
        Verdict::Feasible(lb)
    } else if lb >= -band && value <= band {
        Verdict::Tie
    } else {
        Verdict::Undecided
    }
}

/// Conjunction of two constraints.
fn combine(a: Verdict, b: Verdict) -> Verdict {
    use Verdict::*;
    match (a, b) {
        (Infeasible(u), Infeasible(v)) => Infeasible(u.min(v)),
        (Infeasible(v), _) | (_, Infeasible(v)) => Infeasible(v),
        (Undecided, _) | (_, Undecided) => Undecided,
        (Tie, _) | (_, Tie) => Tie,
        (Feasible(u), Feasible(v)) => Feasible(u.min(v)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::regularizer::{reg_lcop, RegStatus};

    fn check(prog: CopositiveProgram) -> EquivReport {
        let opts = SolverOptions::default();
        let reg = match reg_lcop(&prog, &opts).unwrap().status {
            RegStatus::Regularized { problem, .. } => problem,
            RegStatus::Regular { witness, margin } => RegularizedProblem::unchanged(&prog, witness, margin),
            s => panic!("{s:?}"),
        };
        feasibility_equiv_sample(&prog, &reg, 300, 11, 2.0, &opts).unwrap()
    }

    #[test]
    fn e2_descriptions_agree() {
        let rep = check(fixtures::e2());
        assert!(rep.disagreements.is_empty(), "{:?}", rep.disagreements);
        assert_eq!(rep.undecided, 0);
        assert!(rep.feasible_count > 50 && rep.feasible_count < 300);
    }

    #[test]
    fn e3_descriptions_agree() {
        let rep = check(fixtures::e3());
        assert!(rep.disagreements.is_empty(), "{:?}", rep.disagreements);
        assert_eq!(rep.undecided, 0);
    }

    #[test]
    fn regular_case_is_trivial() {
        let rep = check(fixtures::e1());
        assert!(rep.disagreements.is_empty());
        assert_eq!(rep.agreements + rep.ties, 300);
    }

    #[test]
    fn verdict_algebra() {
        assert_eq!(classify(-1.0, -1.0, 1e-6), Verdict::Infeasible(-1.0));
        assert_eq!(classify(1.0, 0.5, 1e-6), Verdict::Feasible(0.5));
        assert_eq!(classify(1e-7, -1e-7, 1e-6), Verdict::Tie);
        assert_eq!(classify(1.0, -1.0, 1e-6), Verdict::Undecided);
        assert_eq!(combine(Verdict::Undecided, Verdict::Infeasible(-2.0)), Verdict::Infeasible(-2.0));
        assert_eq!(combine(Verdict::Tie, Verdict::Feasible(1.0)), Verdict::Tie);
    }
}
