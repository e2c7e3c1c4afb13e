mod common;

use std::sync::Arc;

use proptest::prelude::*;

use common::{named_pot, names, xy_pot};
use qp_core::io::{parse_potential, potential_to_json};
use qp_core::potential::{canonicalize, cyclic_derivative_named, euler_sum, rotate, Selector};
use qp_core::quiver::{ArrowId, QuiverSpec, Slot};
use qp_core::rational::{q, qf};
use qp_core::substitution::{apply_substitution, compose, Substitution};
use qp_core::{NCElement, Path, Potential, Q};

fn spec(n: usize, loopless: &[usize]) -> Arc<QuiverSpec> {
    Arc::new(QuiverSpec::new(n, loopless.iter().copied()).unwrap())
}

/// A closed walk from `start` driven by `steps`, returning home along the chain.
fn random_cycle(spec: &QuiverSpec, start: usize, steps: &[u8]) -> Vec<ArrowId> {
    let q = &spec.quiver;
    let mut v = start;
    let mut w = Vec::new();
    for &s in steps {
        let out = q.out_arrows(v);
        let a = out[s as usize % out.len()];
        w.push(a);
        v = q.arrow(a).head;
    }
    while v != start {
        let target = if v > start { v - 1 } else { v + 1 };
        let a = *q.out_arrows(v).iter().find(|&&a| q.arrow(a).head == target).unwrap();
        w.push(a);
        v = target;
    }
    if w.is_empty() {
        let a = q.out_arrows(start)[0];
        w.push(a);
        let back = *q.out_arrows(q.arrow(a).head).iter().find(|&&b| q.arrow(b).head == start).unwrap();
        if q.arrow(a).head != start {
            w.push(back);
        }
    }
    w
}

/// a ↦ a + c·a·w with w a cycle at the head of a.
fn random_substitution(spec: &QuiverSpec, trunc: u32, picks: &[(u8, Vec<u8>, i8)]) -> Substitution {
    let q = &spec.quiver;
    let mut s = Substitution::identity(q.clone(), trunc);
    for (a, steps, c) in picks {
        let a = (*a as usize % q.arrows.len()) as ArrowId;
        let head = q.arrow(a).head;
        let mut word = vec![a];
        word.extend(random_cycle(spec, head, steps));
        let p = Path::from_word(q, &word).unwrap();
        s.add_to(a, &p, &Q::from_integer((*c as i64).into())).unwrap();
    }
    s
}

fn quiver_strategy() -> impl Strategy<Value = Arc<QuiverSpec>> {
    (1usize..=4, any::<u8>()).prop_map(|(n, mask)| {
        let loopless: Vec<usize> = if n == 1 { vec![] } else { (1..=n).filter(|k| mask & (1 << k) != 0).collect() };
        spec(n, &loopless)
    })
}

#[test]
fn arrow_count_matches_m() {
    for n in 1..=5 {
        for mask in 0u32..(1 << n) {
            let loopless: Vec<usize> = (1..=n).filter(|k| mask & (1 << (k - 1)) != 0).collect();
            if n == 1 && loopless.len() == 1 {
                continue;
            }
            let s = QuiverSpec::new(n, loopless.iter().copied()).unwrap();
            assert_eq!(s.m(), 2 * n - 1 - loopless.len());
            let pairs = s.slots.iter().filter(|sl| matches!(sl, Slot::Pair { .. })).count();
            assert_eq!(s.quiver.arrows.len(), s.m() + pairs);
        }
    }
}

#[test]
fn consecutive_x_share_a_vertex() {
    let s = QuiverSpec::full(3).unwrap();
    for i in 0..s.m() - 1 {
        let xp = Path::from_word(&s.quiver, &s.xp(i)).unwrap();
        let x = Path::from_word(&s.quiver, &s.x(i + 1)).unwrap();
        assert_eq!(xp.head, x.tail);
        assert!(xp.concat(&x).is_some());
    }
}

#[test]
fn canonicalize_picks_least_rotation() {
    let s = spec(3, &[1, 2, 3]);
    let p = Path::from_names(&s.quiver, &["b1", "a1", "a2", "b2"]).unwrap();
    let c = canonicalize(&s.quiver, &p).unwrap();
    assert_eq!(c.names(&s.quiver), vec!["a1", "a2", "b2", "b1"]);
    for k in 0..4 {
        assert_eq!(canonicalize(&s.quiver, &rotate(&s.quiver, &p, k)).unwrap(), c);
    }
}

#[test]
fn canonicalize_loop_and_rejects_open_paths() {
    let s = spec(2, &[]);
    let p = Path::from_names(&s.quiver, &["a1"]).unwrap();
    assert_eq!(canonicalize(&s.quiver, &p).unwrap(), p);
    let open = Path::from_names(&s.quiver, &["a2"]).unwrap();
    assert!(canonicalize(&s.quiver, &open).is_err());
}

#[test]
fn derivative_examples() {
    let one = spec(1, &[]);
    let f = named_pot(&one, &[(q(1), &["a1", "a1"])], 10);
    let d = cyclic_derivative_named(&f, "a1").unwrap();
    assert_eq!(d, NCElement::from_path(Path::from_names(&one.quiver, &["a1"]).unwrap(), q(2), 9));

    let s = spec(3, &[1, 2, 3]);
    let f = named_pot(&s, &[(q(1), &["b1", "a1", "a2", "b2"])], 10);
    let d = cyclic_derivative_named(&f, "b1").unwrap();
    assert_eq!(d, NCElement::from_path(Path::from_names(&s.quiver, &["a1", "a2", "b2"]).unwrap(), q(1), 9));

    let f = named_pot(&s, &[(q(1), &["a2", "b2", "a2", "b2"])], 10);
    let d = cyclic_derivative_named(&f, "a2").unwrap();
    assert_eq!(d, NCElement::from_path(Path::from_names(&s.quiver, &["b2", "a2", "b2"]).unwrap(), q(2), 9));
    assert!(cyclic_derivative_named(&f, "c7").is_err());
}

#[test]
fn scaling_substitution_rescales_terms() {
    let lambda = qf(2, 7);
    let f = xy_pot(&[(q(1), "xx"), (q(1), "xy"), (lambda.clone(), "yy")], 12);
    let spec = f.spec.clone();
    let (k1, k2) = (q(3), qf(-1, 2));
    let s = Substitution::scaling(spec.quiver.clone(), 12, &[(spec.a(0), k1.clone()), (spec.a(1), k2.clone())]);
    let g = apply_substitution(&f, &s).unwrap();
    let expect = xy_pot(&[(&k1 * &k1, "xx"), (&k1 * &k2, "xy"), (&k2 * &k2 * &lambda, "yy")], 12);
    assert_eq!(g, expect);
    let id = Substitution::identity(spec.quiver.clone(), 12);
    assert_eq!(apply_substitution(&f, &id).unwrap(), f);
}

#[test]
fn completing_the_square_at_a_loop() {
    // Q_3 with a loop at vertex 2: x_1'x_2 + x_2x_3 − ½x_2² under x_2 ↦ x_2 + x_1' + x_3.
    let s = spec(3, &[1, 3]);
    let x1p = s.xp(0);
    let x2 = s.x(1);
    let x3 = s.x(2);
    let cat = |a: &[ArrowId], b: &[ArrowId]| [a, b].concat();
    let mut f = Potential::zero(s.clone(), 12);
    f.add_word(&cat(&x1p, &x2), q(1)).unwrap();
    f.add_word(&cat(&x2, &x3), q(1)).unwrap();
    f.add_word(&cat(&x2, &x2), qf(-1, 2)).unwrap();
    let mut sub = Substitution::identity(s.quiver.clone(), 12);
    let mut img = NCElement::from_path(Path::from_word(&s.quiver, &x2).unwrap(), q(1), 12);
    img.add_term(Path::from_word(&s.quiver, &x1p).unwrap(), q(1));
    img.add_term(Path::from_word(&s.quiver, &x3).unwrap(), q(1));
    sub.set(s.a(1), img).unwrap();
    let g = apply_substitution(&f, &sub).unwrap();
    let mut expect = Potential::zero(s.clone(), 12);
    expect.add_word(&cat(&x1p, &x3), q(1)).unwrap();
    expect.add_word(&cat(&x1p, &x1p), qf(1, 2)).unwrap();
    expect.add_word(&cat(&x2, &x2), qf(-1, 2)).unwrap();
    expect.add_word(&cat(&x3, &x3), qf(1, 2)).unwrap();
    assert_eq!(g, expect);
}

#[test]
fn compose_example_twice_a1_plus_a1x() {
    let s = spec(3, &[1, 2, 3]);
    let a1 = s.a(0);
    let w = names(&s, &["a1", "b1", "a1"]);
    let mut t = Substitution::identity(s.quiver.clone(), 6);
    t.add_to(a1, &Path::from_word(&s.quiver, &w).unwrap(), &q(1)).unwrap();
    let c = compose(&t, &t).unwrap();
    let mut expect = NCElement::from_path(Path::arrow(&s.quiver, a1), q(1), 6);
    expect.add_term(Path::from_word(&s.quiver, &w).unwrap(), q(2));
    expect.add_term(Path::from_names(&s.quiver, &["a1", "b1", "a1", "b1", "a1"]).unwrap(), q(2));
    assert_eq!(c.images[a1 as usize], expect);
    assert!(c.is_unitriangular());
    let id = Substitution::identity(s.quiver.clone(), 6);
    assert_eq!(compose(&t, &id).unwrap(), t);
    assert_eq!(compose(&id, &t).unwrap(), t);
}

#[test]
fn linear_part_invertibility() {
    let s = spec(2, &[]);
    let mut sub = Substitution::identity(s.quiver.clone(), 8);
    assert!(sub.is_unitriangular() && sub.is_invertible() && sub.depth().is_none());
    sub = Substitution::scaling(s.quiver.clone(), 8, &[(s.a(0), q(0))]);
    assert!(!sub.is_invertible());
    let mut u = Substitution::identity(s.quiver.clone(), 8);
    u.add_to(s.a(0), &Path::from_names(&s.quiver, &["a1", "a1"]).unwrap(), &q(5)).unwrap();
    assert_eq!(u.depth(), Some(1));
    let bad = Path::from_names(&s.quiver, &["a2", "b2"]).unwrap();
    assert!(u.add_to(s.a(1), &bad, &q(1)).is_err());
}

#[test]
fn projections() {
    let f = xy_pot(&[(q(1), "xx"), (q(1), "xy"), (q(1), "yyy")], 12);
    let p = f.project(Selector::Xdeg(2));
    assert_eq!(p, xy_pot(&[(q(1), "xx"), (q(1), "xy")], 12));
    assert_eq!(f.project(Selector::XdegBelow(3)), p);

    let s = spec(3, &[]);
    let mut g = Potential::zero(s.clone(), 12);
    g.add_word(&[s.xp(0), s.x(1)].concat(), q(1)).unwrap();
    g.add_word(&[s.xp(1), s.x(2)].concat(), q(1)).unwrap();
    assert_eq!(g.project(Selector::Through(1)), g);
    let mut h = Potential::zero(s.clone(), 12);
    h.add_word(&s.x(0).repeat(3), q(1)).unwrap();
    assert!(h.project(Selector::Block(1, 1)).is_zero());
}

#[test]
fn reduced_flag() {
    assert!(!xy_pot(&[(q(1), "x")], 8).is_reduced());
    assert!(xy_pot(&[(q(1), "xy")], 8).is_reduced());
    assert!(Potential::zero(common::xy_pot(&[], 4).spec, 4).is_reduced());
}

#[test]
fn json_round_trip() {
    let f = xy_pot(&[(qf(-3, 5), "xx"), (q(1), "xy"), (qf(1, 4), "yyy")], 20);
    let text = serde_json::to_string(&potential_to_json(&f)).unwrap();
    assert_eq!(parse_potential(&text).unwrap(), f);
    assert!(parse_potential("").is_err());
    assert!(parse_potential(r#"{"quiver":{"n":3},"terms":[{"coeff":"1","arrows":["a9"]}]}"#).is_err());
    assert!(parse_potential(r#"{"quiver":{"n":2},"terms":[{"coeff":"1","arrows":["a2"]}]}"#).is_err());
    assert!(parse_potential(r#"{"quiver":{"n":1},"terms":[{"coeff":"1/0","arrows":["a1"]}]}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotations_share_a_class(s in quiver_strategy(), start in 0usize..4, steps in prop::collection::vec(any::<u8>(), 0..8)) {
        let start = start % s.n;
        let w = random_cycle(&s, start, &steps);
        let p = Path::from_word(&s.quiver, &w).unwrap();
        let c = canonicalize(&s.quiver, &p).unwrap();
        for k in 0..p.len() {
            prop_assert_eq!(&canonicalize(&s.quiver, &rotate(&s.quiver, &p, k)).unwrap(), &c);
        }
    }

    #[test]
    fn euler_sum_scales_by_length(s in quiver_strategy(), start in 0usize..4, steps in prop::collection::vec(any::<u8>(), 0..10)) {
        let start = start % s.n;
        let w = random_cycle(&s, start, &steps);
        let mut f = Potential::zero(s.clone(), 40);
        f.add_word(&w, q(1)).unwrap();
        let e = euler_sum(&f).unwrap();
        prop_assert_eq!(e, f.scale(&q(w.len() as i64)));
    }

    #[test]
    fn derivatives_ignore_rotation(s in quiver_strategy(), start in 0usize..4, steps in prop::collection::vec(any::<u8>(), 0..8), k in 0usize..20) {
        let start = start % s.n;
        let w = random_cycle(&s, start, &steps);
        let p = Path::from_word(&s.quiver, &w).unwrap();
        let r = rotate(&s.quiver, &p, k % p.len());
        let f = Potential::from_element(s.clone(), &NCElement::from_path(p, q(1), 40)).unwrap();
        let g = Potential::from_element(s.clone(), &NCElement::from_path(r, q(1), 40)).unwrap();
        for a in 0..s.quiver.arrows.len() as ArrowId {
            prop_assert_eq!(
                qp_core::potential::cyclic_derivative(&f, a),
                qp_core::potential::cyclic_derivative(&g, a)
            );
        }
    }

    #[test]
    fn substitution_is_multiplicative(
        s in quiver_strategy(),
        picks in prop::collection::vec((any::<u8>(), prop::collection::vec(any::<u8>(), 0..3), -3i8..4), 1..4),
        st in (0usize..4, prop::collection::vec(any::<u8>(), 0..5)),
        st2 in prop::collection::vec(any::<u8>(), 0..5),
    ) {
        let trunc = 10;
        let sub = random_substitution(&s, trunc, &picks);
        let start = st.0 % s.n;
        let w1 = random_cycle(&s, start, &st.1);
        let w2 = random_cycle(&s, start, &st2);
        let p1 = NCElement::from_path(Path::from_word(&s.quiver, &w1).unwrap(), q(2), trunc);
        let p2 = NCElement::from_path(Path::from_word(&s.quiver, &w2).unwrap(), q(-1), trunc);
        let lhs = sub.apply_element(&p1.mul(&p2));
        let rhs = sub.apply_element(&p1).mul(&sub.apply_element(&p2));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_commutes_with_truncation(
        s in quiver_strategy(),
        picks in prop::collection::vec((any::<u8>(), prop::collection::vec(any::<u8>(), 0..3), -3i8..4), 1..4),
        st in (0usize..4, prop::collection::vec(any::<u8>(), 0..6)),
    ) {
        let w = random_cycle(&s, st.0 % s.n, &st.1);
        let mut f = Potential::zero(s.clone(), 14);
        f.add_word(&w, q(1)).unwrap();
        let hi = apply_substitution(&f, &random_substitution(&s, 14, &picks)).unwrap();
        let lo = apply_substitution(&f.truncate(9), &random_substitution(&s, 9, &picks)).unwrap();
        prop_assert_eq!(hi.truncate(9), lo);
    }

    #[test]
    fn compose_matches_sequential_application(
        s in quiver_strategy(),
        p1 in prop::collection::vec((any::<u8>(), prop::collection::vec(any::<u8>(), 0..3), -2i8..3), 1..3),
        p2 in prop::collection::vec((any::<u8>(), prop::collection::vec(any::<u8>(), 0..3), -2i8..3), 1..3),
        p3 in prop::collection::vec((any::<u8>(), prop::collection::vec(any::<u8>(), 0..3), -2i8..3), 1..3),
        st in (0usize..4, prop::collection::vec(any::<u8>(), 0..6)),
    ) {
        let trunc = 10;
        let (s1, s2, s3) = (random_substitution(&s, trunc, &p1), random_substitution(&s, trunc, &p2), random_substitution(&s, trunc, &p3));
        let w = random_cycle(&s, st.0 % s.n, &st.1);
        let mut f = Potential::zero(s.clone(), trunc);
        f.add_word(&w, q(1)).unwrap();
        let seq = apply_substitution(&apply_substitution(&f, &s1).unwrap(), &s2).unwrap();
        prop_assert_eq!(apply_substitution(&f, &compose(&s1, &s2).unwrap()).unwrap(), seq);
        let left = compose(&compose(&s1, &s2).unwrap(), &s3).unwrap();
        let right = compose(&s1, &compose(&s2, &s3).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn depth_raises_order(
        s in quiver_strategy(),
        picks in prop::collection::vec((any::<u8>(), prop::collection::vec(any::<u8>(), 0..3), -3i8..4), 1..4),
        st in (0usize..4, prop::collection::vec(any::<u8>(), 0..6)),
    ) {
        let sub = random_substitution(&s, 16, &picks);
        prop_assume!(sub.is_unitriangular());
        let Some(depth) = sub.depth() else { return Ok(()); };
        let w = random_cycle(&s, st.0 % s.n, &st.1);
        let mut f = Potential::zero(s.clone(), 16);
        f.add_word(&w, q(1)).unwrap();
        let diff = apply_substitution(&f, &sub).unwrap().sub(&f);
        if let Some(ord) = diff.elem.order() {
            prop_assert!(ord >= w.len() as u32 + depth);
        }
    }
}

#[test]
fn empty_potential_is_legal() {
    let s = spec(2, &[1]);
    let f = Potential::zero(s.clone(), 8);
    assert!(f.is_zero() && f.is_reduced());
    assert!(euler_sum(&f).unwrap().is_zero());
    for a in 0..s.quiver.arrows.len() as ArrowId {
        assert!(qp_core::potential::cyclic_derivative(&f, a).is_zero());
    }
}
