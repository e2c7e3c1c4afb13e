#![allow(dead_code)]

use std::sync::Arc;

use qp_core::a3::a3_spec;
use qp_core::quiver::{ArrowId, QuiverSpec};
use qp_core::{Potential, Q};

/// Word of a monomial in x = b1a1 and y = a2b2 on Q_{3,{1,2,3}}, written as a string over {x, y}.
pub fn xy_word(spec: &QuiverSpec, s: &str) -> Vec<ArrowId> {
    let mut w = Vec::new();
    for ch in s.chars() {
        match ch {
            'x' => w.extend(spec.xp(0)),
            'y' => w.extend(spec.x(1)),
            _ => panic!("unexpected letter {ch}"),
        }
    }
    w
}

/// Σ c·(monomial in x, y) on Q_{3,{1,2,3}}.
pub fn xy_pot(terms: &[(Q, &str)], trunc: u32) -> Potential {
    let spec = a3_spec();
    let mut f = Potential::zero(spec.clone(), trunc);
    for (c, s) in terms {
        f.add_word(&xy_word(&spec, s), c.clone()).unwrap();
    }
    f
}

/// Σ c·(named arrows) on the given quiver.
pub fn named_pot(spec: &Arc<QuiverSpec>, terms: &[(Q, &[&str])], trunc: u32) -> Potential {
    let mut f = Potential::zero(spec.clone(), trunc);
    for (c, names) in terms {
        let w: Vec<ArrowId> = names.iter().map(|n| spec.quiver.arrow_id(n).unwrap()).collect();
        f.add_word(&w, c.clone()).unwrap();
    }
    f
}

pub fn names(spec: &QuiverSpec, w: &[&str]) -> Vec<ArrowId> {
    w.iter().map(|n| spec.quiver.arrow_id(n).unwrap()).collect()
}

/// κ1x^p + xy + κ2y^q (+ κ3x^s) as an x/y string potential.
pub fn base_pot(k1: Q, p: usize, k2: Q, q: usize, extra: Option<(Q, usize)>, trunc: u32) -> Potential {
    let mut terms: Vec<(Q, String)> = vec![(Q::from_integer(1.into()), "xy".into())];
    terms.push((k1, "x".repeat(p)));
    terms.push((k2, "y".repeat(q)));
    if let Some((c, s)) = extra {
        terms.push((c, "x".repeat(s)));
    }
    let refs: Vec<(Q, &str)> = terms.iter().map(|(c, s)| (c.clone(), s.as_str())).collect();
    xy_pot(&refs, trunc)
}

pub fn spec_of(n: usize, loopless: &[usize]) -> Arc<QuiverSpec> {
    Arc::new(QuiverSpec::new(n, loopless.iter().copied()).unwrap())
}

fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Handcrafted reduced Type A potentials on Q_2, Q_3 and their partially looped relatives.
pub fn monomialization_inputs(trunc: u32) -> Vec<(&'static str, Potential)> {
    let q2 = Arc::new(QuiverSpec::full(2).unwrap());
    let q3 = Arc::new(QuiverSpec::full(3).unwrap());
    let q21 = spec_of(2, &[1]);
    let q32 = spec_of(3, &[2]);
    let q313 = spec_of(3, &[1, 3]);
    let q3_mid: [(Q, &[&str]); 4] = [
        (qi(1), &["a1", "a2", "b2"]),
        (qi(1), &["a2", "a3", "b2"]),
        (qi(1), &["a3", "a4", "b4"]),
        (qi(1), &["a4", "a5", "b4"]),
    ];
    let with = |base: &[(Q, &[&'static str])], extra: &[(Q, &[&'static str])]| -> Vec<(Q, Vec<&'static str>)> {
        base.iter().chain(extra).map(|(c, w)| (c.clone(), w.to_vec())).collect()
    };
    let build = |spec: &Arc<QuiverSpec>, terms: Vec<(Q, Vec<&'static str>)>| -> Potential {
        let refs: Vec<(Q, &[&str])> = terms.iter().map(|(c, w)| (c.clone(), w.as_slice())).collect();
        named_pot(spec, &refs, trunc)
    };
    vec![
        (
            "Q2 scaled middles with mixed quintic",
            named_pot(
                &q2,
                &[
                    (qi(5), &["a1", "a2", "b2"]),
                    (qi(7), &["b2", "a2", "a3"]),
                    (qi(1), &["a1", "a1", "a1"]),
                    (qi(1), &["a3", "a3", "a3"]),
                    (qi(2), &["a1", "a2", "b2", "a2", "b2"]),
                    (qi(1), &["a1", "a1", "a2", "b2"]),
                ],
                trunc,
            ),
        ),
        (
            "Q2 cubic loops with a through-term",
            named_pot(
                &q2,
                &[
                    (qi(1), &["a1", "a2", "b2"]),
                    (qi(1), &["a2", "a3", "b2"]),
                    (qi(1), &["a1", "a1", "a1"]),
                    (qi(2), &["a3", "a3", "a3"]),
                    (qi(1), &["a2", "b2", "a2", "b2"]),
                    (qi(3), &["a1", "a2", "a3", "b2"]),
                ],
                trunc,
            ),
        ),
        (
            "Q2 quartic loop with degree-five mixing",
            named_pot(
                &q2,
                &[
                    (qi(1), &["a1", "a2", "b2"]),
                    (qi(1), &["a2", "a3", "b2"]),
                    (qi(1), &["a1", "a1", "a1", "a1"]),
                    (qi(1), &["a3", "a3", "a3"]),
                    (qi(3), &["a1", "a1", "a2", "a3", "b2"]),
                    (qi(-1), &["a2", "b2", "a2", "b2", "a2", "b2"]),
                ],
                trunc,
            ),
        ),
        (
            "Q3 cubic loops with a through-term",
            build(
                &q3,
                with(
                    &q3_mid,
                    &[
                        (qi(1), &["a1", "a1", "a1"]),
                        (qi(1), &["a3", "a3", "a3"]),
                        (qi(1), &["a5", "a5", "a5"]),
                        (qi(1), &["a2", "b2", "a2", "b2"]),
                        (qi(2), &["a1", "a2", "a3", "b2"]),
                    ],
                ),
            ),
        ),
        (
            "Q3 mixed degrees up to five",
            build(
                &q3,
                with(
                    &q3_mid,
                    &[
                        (qi(1), &["a1", "a1", "a1"]),
                        (qi(1), &["a5", "a5", "a5"]),
                        (qi(1), &["a3", "a3", "a3", "a3"]),
                        (qi(1), &["a4", "b4", "a4", "b4"]),
                        (qi(2), &["a3", "a4", "a5", "b4"]),
                        (qi(-1), &["a1", "a1", "a2", "a3", "b2"]),
                    ],
                ),
            ),
        ),
        ("A3 quadratic with cubic junk", xy_pot(&[(qi(1), "xx"), (qi(2), "xy"), (qi(1), "yy"), (qi(1), "xxy"), (qi(3), "xyy")], trunc)),
        ("A3 cubic with mixed cubic", xy_pot(&[(qi(1), "xxx"), (qi(1), "xy"), (qi(1), "yyy"), (qi(1), "xxy")], trunc)),
        (
            "A3 scaled middle with quartic mixing",
            xy_pot(&[(qi(3), "xy"), (qi(1), "xx"), (qi(1), "yyyy"), (qi(1), "xyxy"), (qi(-2), "xxyy")], trunc),
        ),
        (
            "Q2 with one loop",
            named_pot(
                &q21,
                &[
                    (qi(1), &["b1", "a1", "a2"]),
                    (qi(1), &["a1", "b1", "a1", "b1"]),
                    (qi(1), &["a2", "a2", "a2"]),
                    (qi(2), &["b1", "a1", "a2", "a2"]),
                ],
                trunc,
            ),
        ),
        (
            "Q3 with loops at the ends",
            named_pot(
                &q32,
                &[
                    (qi(1), &["a1", "a2", "b2"]),
                    (qi(1), &["b2", "a2", "a3", "b3"]),
                    (qi(1), &["b3", "a3", "a4"]),
                    (qi(1), &["a1", "a1", "a1"]),
                    (qi(1), &["a4", "a4", "a4"]),
                    (qi(1), &["a2", "b2", "a2", "b2"]),
                    (qi(1), &["a3", "b3", "a3", "b3"]),
                    (qi(1), &["a1", "a1", "a2", "b2"]),
                ],
                trunc,
            ),
        ),
        (
            "Q3 with a middle loop and a cross term",
            named_pot(
                &q313,
                &[
                    (qi(1), &["b1", "a1", "a2"]),
                    (qi(1), &["a2", "a3", "b3"]),
                    (qi(2), &["b1", "a1", "a3", "b3"]),
                    (qi(1), &["a1", "b1", "a1", "b1", "a1", "b1"]),
                    (qi(1), &["a3", "b3", "a3", "b3", "a3", "b3"]),
                    (qi(1), &["a2", "a2", "a2"]),
                ],
                trunc,
            ),
        ),
    ]
}

/// Parameters (κ1, p, κ2, q, κ3, s) of the realization rows, with the expected (h_0, h_1, h_2, h_3).
pub fn realization_rows() -> Vec<(&'static str, qp_core::realize::A3Params, [qp_core::bipoly::BiPoly; 4])> {
    use qp_core::bipoly::BiPoly;
    use qp_core::realize::A3Params;
    let x = BiPoly::x;
    let y = BiPoly::y;
    let mono = |c: Q, i: u32, j: u32| BiPoly::monomial(c, i, j);
    let half = Q::new(1.into(), 2.into());
    let params = |k1: Q, p: u32, k2: Q, q: u32, k3: Q, s: u32| A3Params { kappa1: k1, p, kappa2: k2, q, kappa3: k3, s };
    let lambda = Q::new(1.into(), 3.into());
    let row = |name, p: A3Params, h0: BiPoly, h3: BiPoly| (name, p, [h0, x(), y(), h3]);
    vec![
        row(
            "(1) lambda = 1/3",
            params(qi(1), 2, lambda.clone(), 2, qi(0), 3),
            x().scale(&qi(2)).add(&y()),
            x().add(&y().scale(&(qi(2) * &lambda))),
        ),
        row(
            "(2) s = 4",
            params(qi(1), 2, Q::new(1.into(), 4.into()), 2, qi(1), 4),
            x().scale(&qi(2)).add(&y()).add(&mono(qi(4), 3, 0)),
            x().add(&y().scale(&half)),
        ),
        row(
            "(3) p = 3, q = 5",
            params(qi(1), 3, qi(1), 5, qi(0), 3),
            mono(qi(3), 2, 0).add(&y()),
            x().add(&mono(qi(5), 0, 4)),
        ),
        row(
            "(4)",
            params(qi(1), 2, Q::new(1.into(), 4.into()), 2, qi(0), 3),
            x().scale(&qi(2)).add(&y()),
            x().add(&y().scale(&half)),
        ),
        row("(5) p = 3", params(qi(1), 3, qi(0), 2, qi(0), 3), mono(qi(3), 2, 0).add(&y()), x()),
        row("(6) q = 3", params(qi(0), 2, qi(1), 3, qi(0), 3), y(), x().add(&mono(qi(3), 0, 2))),
        row("(7)", params(qi(0), 2, qi(0), 2, qi(0), 3), y(), x()),
    ]
}
