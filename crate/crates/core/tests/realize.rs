mod common;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::realization_rows;
use qp_core::bipoly::BiPoly;
use qp_core::jacobi::{jacobi_system, oracle_counts};
use qp_core::monomialize::{Kappa, MonomialTypeA};
use qp_core::quiver::QuiverSpec;
use qp_core::rational::{q, qf};
use qp_core::realize::{
    a3_kappa, a3_realization, compare_with_jacobi, contraction_relations, emit_presentation, ideal_conditions,
    solve_g_system, Bundle,
};
use qp_core::{Orientation, ReductionSystem, Q};

fn kappa(entries: &[((usize, usize), Q)]) -> Kappa {
    entries.iter().cloned().collect()
}

fn random_kappa(rng: &mut StdRng, n: usize) -> Kappa {
    let mut k = Kappa::new();
    for i in 1..2 * n {
        for j in 2..=4 {
            if rng.gen_bool(0.5) {
                let c = Q::new(rng.gen_range(-4i64..=4).into(), rng.gen_range(1i64..=3).into());
                k.insert((i, j), c);
            }
        }
    }
    k.retain(|_, c| *c != q(0));
    k
}

#[test]
fn one_curve_system() {
    let g = solve_g_system(1, &kappa(&[((1, 2), q(3))]), 0).unwrap();
    let expect = vec![BiPoly::y(), BiPoly::x(), BiPoly::y().add(&BiPoly::x().scale(&q(6))).neg()];
    assert_eq!(g.gs, expect);
}

#[test]
fn lambda_row_g_tuple() {
    let lambda = qf(1, 3);
    let r = &realization_rows()[0];
    let real = a3_realization(&r.1).unwrap();
    let (x, y) = (BiPoly::x(), BiPoly::y());
    let two_l_y = y.scale(&(q(2) * &lambda));
    let expect = vec![
        x.scale(&q(-2)).sub(&y),
        x.neg().sub(&y),
        x.clone(),
        x.add(&y),
        y.clone(),
        x.neg().add(&y).sub(&two_l_y),
        x.neg().sub(&two_l_y),
    ];
    assert_eq!(real.system.gs, expect);
}

#[test]
fn realization_table() {
    for (name, params, h) in realization_rows() {
        let real = a3_realization(&params).unwrap();
        assert_eq!(real.h, h, "{name}");
        assert_eq!(real.signs, [-1, 1, 1, -1]);
        assert!(real.system.violated().is_empty());
        assert!(ideal_conditions(&real.system).unwrap().consistent(), "{name}");
    }
}

#[test]
fn lambda_row_presentation() {
    let real = a3_realization(&realization_rows()[0].1).unwrap();
    let p = emit_presentation(&real.system);
    assert_eq!(p.factors, vec!["-2x-y", "x", "y", "-x-2/3y"]);
    assert_eq!(p.equation, "uv = (-2x-y)·x·y·(-x-2/3y)");
    assert_eq!(p.bundles, vec![Bundle::MinusOneMinusOne; 3]);
    assert!(p.nccr.loops.is_empty());
    assert_eq!(p.nccr.vertices, 4);
}

#[test]
fn zero_kappa_alternates() {
    let g = solve_g_system(3, &Kappa::new(), 0).unwrap();
    for s in 0..5 {
        assert_eq!(g.gs[s + 2], g.gs[s].neg());
    }
    let p = emit_presentation(&g);
    assert_eq!(p.bundles, vec![Bundle::MinusTwoZero; 3]);
    let internal: Vec<usize> = p.nccr.loops.iter().filter(|l| !l.flagged).map(|l| l.vertex).collect();
    assert_eq!(internal, vec![1, 2, 3]);
    let report = ideal_conditions(&g).unwrap();
    assert!(report.consistent());
    assert!(report.skip.iter().all(|c| !c.generates));
}

#[test]
fn added_loop_square_opens_the_skip() {
    let g = solve_g_system(2, &kappa(&[((1, 2), qf(-1, 2)), ((3, 2), qf(-1, 2))]), 1).unwrap();
    let r = ideal_conditions(&g).unwrap();
    let gen: Vec<bool> = r.skip.iter().map(|c| c.generates).collect();
    assert_eq!(gen, vec![true, false, true]);
    assert!(r.consistent());
}

#[test]
fn skip_test_matches_loop_squares() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..20 {
        let n = rng.gen_range(1..=4);
        let k = random_kappa(&mut rng, n);
        let t = rng.gen_range(0..2 * n);
        let g = solve_g_system(n, &k, t).unwrap();
        assert!(g.violated().is_empty());
        assert!(g.gs.iter().all(|p| !p.has_constant_term()));
        let report = ideal_conditions(&g).unwrap();
        assert!(report.consistent());
        for c in &report.skip {
            assert_eq!(c.generates, k.get(&(c.s, 2)).is_some_and(|v| *v != q(0)));
        }
        let other = solve_g_system(n, &k, (t + 1) % (2 * n)).unwrap();
        let r2 = ideal_conditions(&other).unwrap();
        assert_eq!(report.skip, r2.skip);
    }
}

#[test]
fn single_vertex_relation() {
    let rels = contraction_relations(&kappa(&[((1, 2), q(1)), ((1, 3), q(2))]), 1, 8).unwrap();
    assert_eq!(rels.len(), 1);
    assert_eq!(rels[0].len(), 2);
}

#[test]
fn contraction_relations_match_jacobi() {
    for row in [0usize, 1, 2, 4, 5] {
        let k = a3_kappa(&realization_rows()[row].1);
        assert!(compare_with_jacobi(&k, 3, 12).unwrap().equal(), "row {row}");
    }
    let cmp = compare_with_jacobi(&Kappa::new(), 2, 10).unwrap();
    assert!(cmp.equal());
}

#[test]
fn contraction_quotient_has_jacobi_dimension() {
    let spec = std::sync::Arc::new(QuiverSpec::full(3).unwrap());
    for row in [0usize, 2, 3] {
        let k = a3_kappa(&realization_rows()[row].1);
        let f = MonomialTypeA::new(spec.clone(), k.clone()).unwrap().to_potential(14);
        let jac = jacobi_system(&f, 10, &[]).unwrap().irreducible_counts();
        let rels = contraction_relations(&k, 3, 10).unwrap();
        let sys = ReductionSystem::complete(spec.quiver.clone(), Orientation::Ascending, 10, &rels);
        assert_eq!(sys.irreducible_counts(), jac);
        assert_eq!(oracle_counts(&spec.quiver, &rels, 10).unwrap(), jac);
    }
}

#[test]
fn invalid_inputs() {
    assert!(solve_g_system(2, &Kappa::new(), 4).is_err());
    assert!(solve_g_system(2, &kappa(&[((4, 2), q(1))]), 0).is_err());
    assert!(solve_g_system(2, &kappa(&[((1, 1), q(1))]), 0).is_err());
}
