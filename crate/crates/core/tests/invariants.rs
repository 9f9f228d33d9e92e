use coporeg_core::config::SolverOptions;
use coporeg_core::fixtures;
use coporeg_core::generate::generate_instance;
use coporeg_core::model::{eval_constraint, ker_dimension, CopositiveProgram, SimplexPoint};
use coporeg_core::oracle::{bound_over_omega, min_quad_over_simplex, StopRule};
use coporeg_core::regularizer::{compress_ledger, face_membership, reg_lcop, RegRun, RegStatus, RegularizedProblem};
use coporeg_core::sampling::{random_copositive, sample_face_member, seeded_rng};
use rand::Rng;

/// Named programs; the generated ones can have a single feasible point.
fn cases() -> Vec<(&'static str, CopositiveProgram)> {
    let planted = |c: &[f64]| SimplexPoint::new(c.to_vec()).unwrap();
    vec![
        ("E2", fixtures::e2()),
        ("E3", fixtures::e3()),
        ("two-step", fixtures::two_step()),
        ("gen-vertex", generate_instance(5, 4, 2, &[planted(&[0.0, 1.0, 0.0, 0.0])]).unwrap()),
        ("gen-edge", generate_instance(6, 3, 2, &[planted(&[0.5, 0.0, 0.5])]).unwrap()),
    ]
}

fn solve(prog: &CopositiveProgram) -> (RegRun, RegularizedProblem) {
    let run = reg_lcop(prog, &SolverOptions::default()).unwrap();
    let reg = match &run.status {
        RegStatus::Regularized { problem, .. } => problem.clone(),
        s => panic!("{s:?}"),
    };
    (run, reg)
}

/// Orthonormal basis of the gradients of the (linear) equality rows.
fn equality_normals(reg: &RegularizedProblem) -> Vec<Vec<f64>> {
    let n = reg.prog.n();
    let base = reg.row_values(&vec![0.0; n]).unwrap().0;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for (k, b0) in base.iter().enumerate() {
        let mut g: Vec<f64> = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                reg.row_values(&e).unwrap().0[k] - b0
            })
            .collect();
        project_out(&mut g, &basis);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-9 {
            basis.push(g.iter().map(|v| v / norm).collect());
        }
    }
    basis
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
        v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
    }
}

/// Feasible points along random rays and coordinate axes from the witness, kept inside the
/// affine hull cut out by the equality rows.
fn feasible_points(reg: &RegularizedProblem, count: usize) -> Vec<Vec<f64>> {
    let (prog, witness) = (&reg.prog, &reg.witness);
    let n = prog.n();
    let normals = equality_normals(reg);
    let mut rng = seeded_rng(17);
    let mut out = vec![witness.clone()];
    for attempt in 0..50 * count {
        if out.len() == count {
            break;
        }
        let mut dir: Vec<f64> = if attempt % 2 == 0 {
            let mut d = vec![0.0; n];
            d[rng.gen_range(0..n)] = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            d
        } else {
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        project_out(&mut dir, &normals);
        // Step lengths spread over several scales, since some feasible sets are thin.
        let s = rng.gen_range(0.0..2.0) * 10f64.powi(-rng.gen_range(0..4));
        let x: Vec<f64> = witness.iter().zip(&dir).map(|(w, d)| w + s * d).collect();
        // Exact feasibility: a tolerance-feasible point may move an immobile index slightly.
        if min_quad_over_simplex(&eval_constraint(prog, &x).unwrap()).unwrap().value >= -1e-12 {
            out.push(x);
        }
    }
    out
}

#[test]
fn emitted_indices_are_immobile_on_feasible_points() {
    for (name, prog) in cases() {
        let (run, reg) = solve(&prog);
        let xs = feasible_points(&reg, 100);
        let wanted = if name.starts_with("gen") { 1 } else { 20 };
        assert!(xs.len() >= wanted, "{name}: only {} feasible samples", xs.len());
        for x in &xs {
            let d = eval_constraint(&prog, x).unwrap();
            for r in &run.state.records {
                let v = d.quad(r.tau.coords());
                assert!(v.abs() <= 1e-6, "{name}: tau {:?} gives {v:.3e} at x = {x:?}", r.tau.coords());
            }
        }
    }
}

#[test]
fn witness_margin_is_a_lower_bound_on_omega() {
    for (name, prog) in cases() {
        let (_, reg) = solve(&prog);
        assert!(reg.margin > 0.0, "{name}");
        let d = eval_constraint(&prog, &reg.witness).unwrap();
        let stop = StopRule { below: f64::NEG_INFINITY, above: f64::INFINITY, max_nodes: 200_000, gap: 1e-9 };
        let b = bound_over_omega(&d, reg.omega().unwrap(), 1e-9, 14, stop).unwrap();
        assert!(b.complete, "{name}: {b:?}");
        assert!(b.lb >= reg.margin - 1e-9, "{name}: min over Omega {:.6} < margin {:.6}", b.lb, reg.margin);
        let (eq, ineq) = reg.row_values(&reg.witness).unwrap();
        assert!(eq.iter().all(|v| v.abs() <= 1e-9) && ineq.iter().all(|&v| v >= -1e-9), "{name}");
    }
}

#[test]
fn core_faces_are_distinct_predicates() {
    let prog = fixtures::two_step();
    let (run, _) = solve(&prog);
    let tol = SolverOptions::default().tol;
    let comp = compress_ledger(&run.ledger, &prog, tol.rank).unwrap();
    assert_eq!(comp.core.len(), 2);
    let mut rng = seeded_rng(4);
    let mut samples = Vec::new();
    for &i in &comp.core {
        for _ in 0..30 {
            samples.push(sample_face_member(&mut rng, prog.p(), &run.ledger[i].face, tol.support));
        }
    }
    samples.extend((0..30).map(|_| random_copositive(&mut rng, prog.p())));
    let profile =
        |i: usize| -> Vec<bool> { samples.iter().map(|d| face_membership(&run.ledger[i], d, &tol).unwrap()).collect() };
    let a = profile(comp.core[0]);
    let b = profile(comp.core[1]);
    assert_ne!(a, b);
    // The later face is the smaller one.
    assert!(a.iter().zip(&b).all(|(x, y)| *x || !*y));
}

#[test]
fn kernel_dimension_ignores_scaling() {
    for (name, prog) in cases() {
        let k = ker_dimension(&prog, 1e-10);
        let scaled: Vec<_> =
            prog.matrices().iter().enumerate().map(|(j, a)| a.scaled(if j % 2 == 0 { -3.5 } else { 0.01 })).collect();
        let other = CopositiveProgram::new(prog.objective().to_vec(), scaled).unwrap();
        assert_eq!(ker_dimension(&other, 1e-10), k, "{name}");
    }
}
