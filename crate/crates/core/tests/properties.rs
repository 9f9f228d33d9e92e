use coporeg_core::config::{SolverOptions, Tolerances};
use coporeg_core::generate::generate_instance;
use coporeg_core::lp::{solve_lp, LinearProgram, LpStatus, Relation};
use coporeg_core::model::{eval_constraint, parse_problem, serialize_problem, SimplexPoint, SymMatrix};
use coporeg_core::oracle::{
    is_strictly_copositive, l1_dist_to_hull, min_quad_over_simplex, scan_simplex_grid, OmegaDescriptor,
};
use coporeg_core::regularizer::{reg_lcop, RegStatus};
use proptest::prelude::*;

fn sym(p: usize) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-1.0..1.0f64, p * (p + 1) / 2).prop_map(move |v| SymMatrix::from_upper_coords(p, &v))
}

fn point(p: usize) -> impl Strategy<Value = SimplexPoint> {
    prop::collection::vec(0.01..1.0f64, p).prop_map(|v| SimplexPoint::normalized(v).unwrap())
}

/// A point on a random face: some coordinates are zero.
fn face_point(p: usize) -> impl Strategy<Value = SimplexPoint> {
    (prop::collection::vec(0.01..1.0f64, p), prop::collection::vec(any::<bool>(), p)).prop_map(|(v, keep)| {
        let mut c: Vec<f64> = v.iter().zip(&keep).map(|(x, &k)| if k { *x } else { 0.0 }).collect();
        if c.iter().all(|&x| x == 0.0) {
            c[0] = 1.0;
        }
        SimplexPoint::normalized(c).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_minimum_lies_in_the_grid_bracket(d in sym(3)) {
        let exact = min_quad_over_simplex(&d).unwrap();
        let grid = scan_simplex_grid(&d, 64, None);
        prop_assert!(exact.value <= grid.value + 1e-12);
        prop_assert!(exact.value >= grid.value_lb - 1e-12);
        prop_assert!((d.quad(exact.argmin.coords()) - exact.value).abs() < 1e-9);
    }

    #[test]
    fn minimum_scales_linearly(d in sym(4), alpha in 0.01..100.0f64) {
        let a = min_quad_over_simplex(&d).unwrap().value;
        let b = min_quad_over_simplex(&d.scaled(alpha)).unwrap().value;
        prop_assert!((b - alpha * a).abs() <= 1e-9 * (1.0 + alpha));
    }

    #[test]
    fn exact_minimum_is_below_every_sampled_point(d in sym(5), ts in prop::collection::vec(point(5), 20)) {
        let m = min_quad_over_simplex(&d).unwrap().value;
        for t in &ts {
            prop_assert!(d.quad(t.coords()) >= m - 1e-12);
        }
    }

    #[test]
    fn hull_distance_is_lipschitz(
        v in prop::collection::vec(face_point(4), 1..4),
        s in point(4),
        t in point(4),
    ) {
        let ds = l1_dist_to_hull(&s, &v).unwrap();
        let dt = l1_dist_to_hull(&t, &v).unwrap();
        prop_assert!(dt <= s.l1_distance(&t) + ds + 1e-9);
        prop_assert!(dt <= 2.0 + 1e-9);
        for w in &v {
            prop_assert!(l1_dist_to_hull(w, &v).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn omega_excludes_the_hull(v in prop::collection::vec(face_point(4), 1..4), w in prop::collection::vec(0.0..1.0f64, 3)) {
        let om = OmegaDescriptor::new(v.clone(), 1e-7).unwrap();
        prop_assert!(om.sigma() > 0.0);
        // Any convex combination of V is at distance 0 < sigma.
        let weights: Vec<f64> = w.iter().take(v.len()).map(|x| x + 0.01).collect();
        let total: f64 = weights.iter().sum();
        let mut c = vec![0.0; 4];
        for (pt, wt) in v.iter().zip(&weights) {
            for (ck, tk) in c.iter_mut().zip(pt.coords()) {
                *ck += wt / total * tk;
            }
        }
        prop_assert!(!om.contains(&c, 1e-9).unwrap());
    }

    #[test]
    fn lp_strong_duality(
        a in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 3), 1..6),
        x0 in prop::collection::vec(-1.0..1.0f64, 3),
        c in prop::collection::vec(-1.0..1.0f64, 3),
    ) {
        let mut lp = LinearProgram::minimize(c);
        for j in 0..3 {
            lp.set_bounds(j, -2.0, 2.0);
        }
        for row in &a {
            let ax: f64 = row.iter().zip(&x0).map(|(u, v)| u * v).sum();
            lp.add_row(row.clone(), Relation::Le, ax + 0.1);
        }
        let sol = solve_lp(&lp).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        prop_assert!(lp.primal_residual(&sol.primal) <= 1e-9);
        let dual = lp.dual_objective(&sol.dual);
        prop_assert!((sol.objective_value - dual).abs() <= 1e-8 * (1.0 + dual.abs()), "{} vs {}", sol.objective_value, dual);
        prop_assert_eq!(solve_lp(&lp).unwrap(), sol);
    }

    #[test]
    fn problem_files_round_trip(seed in 0u64..1000, p in 2usize..5, n in 1usize..4) {
        let prog = generate_instance(seed, p, n, &[]).unwrap();
        let back = parse_problem(&serialize_problem(&prog)).unwrap();
        prop_assert_eq!(back, prog);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// A planted immobile vertex breaks Slater everywhere and is recovered.
    #[test]
    fn planted_vertex_is_recovered(seed in 0u64..10_000, p in 2usize..5, n in 1usize..3, k in 0usize..5, x in prop::collection::vec(-3.0..3.0f64, 2)) {
        let t = SimplexPoint::vertex(p, k % p);
        let prog = generate_instance(seed, p, n, std::slice::from_ref(&t)).unwrap();
        let d = eval_constraint(&prog, &x[..n]).unwrap();
        prop_assert!(d.quad(t.coords()).abs() < 1e-12);
        prop_assert!(!is_strictly_copositive(&d, &Tolerances::default()).unwrap());

        let run = reg_lcop(&prog, &SolverOptions::default()).unwrap();
        let RegStatus::Regularized { m_star, .. } = &run.status else {
            return Err(TestCaseError::fail(format!("{:?}", run.status)));
        };
        prop_assert!(*m_star >= 1);
        prop_assert!(run.state.records.iter().any(|r| r.tau.linf_distance(&t) <= 1e-6));
    }
}
