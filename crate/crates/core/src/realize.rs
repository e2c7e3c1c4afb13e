use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::bipoly::{linear_rank, BiPoly, MonomialJson};
use crate::error::{QpError, Result};
use crate::jacobi::generators;
use crate::monomialize::{Kappa, MonomialTypeA};
use crate::path::{NCElement, Path};
use crate::quiver::{ArrowId, QuiverSpec};
use crate::rational::Q;
use crate::rewrite::{Orientation, ReductionSystem};

/// Solution g_0..g_{2n} of g_{s−1} + Σ_j jκ_{sj} g_s^{j−1} + g_{s+1} = 0 for 1 ≤ s ≤ 2n−1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GSystem {
    pub n: usize,
    pub kappa: Kappa,
    /// Anchor index t: g_t and g_{t+1} are prescribed.
    pub t: usize,
    pub gs: Vec<BiPoly>,
}

/// Σ_j jκ_{sj} g^{j−1}.
fn kappa_series(kappa: &Kappa, s: usize, g: &BiPoly) -> BiPoly {
    let mut r = BiPoly::zero();
    for (&(i, j), c) in kappa {
        if i == s {
            r = r.add(&g.pow(j as u32 - 1).scale(&(Q::from_integer((j as i64).into()) * c)));
        }
    }
    r
}

fn check_kappa(n: usize, kappa: &Kappa) -> Result<()> {
    for &(i, j) in kappa.keys() {
        if i == 0 || i > 2 * n - 1 || j < 2 {
            return Err(QpError::Invalid(format!("kappa index ({i},{j}) out of range for n={n}")));
        }
    }
    Ok(())
}

/// Solves with g_t = y and g_{t+1} = x.
pub fn solve_g_system(n: usize, kappa: &Kappa, t: usize) -> Result<GSystem> {
    solve_g_system_with(n, kappa, t, BiPoly::y(), BiPoly::x())
}

/// Solves with prescribed anchors g_t and g_{t+1}, which must generate (x,y).
pub fn solve_g_system_with(n: usize, kappa: &Kappa, t: usize, gt: BiPoly, gt1: BiPoly) -> Result<GSystem> {
    if n == 0 || t > 2 * n - 1 {
        return Err(QpError::Invalid(format!("anchor t={t} out of range 0..={}", 2 * n - 1)));
    }
    check_kappa(n, kappa)?;
    if gt.has_constant_term() || gt1.has_constant_term() || linear_rank(&gt, &gt1) != 2 {
        return Err(QpError::Invalid("anchor polynomials must generate the maximal ideal".into()));
    }
    let mut gs = vec![BiPoly::zero(); 2 * n + 1];
    gs[t] = gt;
    gs[t + 1] = gt1;
    for s in t + 1..2 * n {
        gs[s + 1] = gs[s - 1].add(&kappa_series(kappa, s, &gs[s])).neg();
    }
    for s in (1..=t).rev() {
        gs[s - 1] = gs[s + 1].add(&kappa_series(kappa, s, &gs[s])).neg();
    }
    let g = GSystem { n, kappa: kappa.clone(), t, gs };
    if let Some(s) = g.violated().first() {
        return Err(QpError::Invalid(format!("equation {s} fails after solving")));
    }
    Ok(g)
}

impl GSystem {
    /// Indices s whose defining equation does not hold identically.
    pub fn violated(&self) -> Vec<usize> {
        (1..2 * self.n)
            .filter(|&s| !self.gs[s - 1].add(&kappa_series(&self.kappa, s, &self.gs[s])).add(&self.gs[s + 1]).is_zero())
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SkipCondition {
    pub s: usize,
    /// (g_{s−1}, g_{s+1}) = (x,y).
    pub generates: bool,
    pub kappa_s2_nonzero: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct IdealReport {
    /// (g_s, g_{s+1}) = (x,y) for 0 ≤ s ≤ 2n−1.
    pub adjacent: Vec<bool>,
    pub skip: Vec<SkipCondition>,
    pub constant_free: bool,
}

impl IdealReport {
    pub fn consistent(&self) -> bool {
        self.constant_free && self.adjacent.iter().all(|&b| b) && self.skip.iter().all(|c| c.generates == c.kappa_s2_nonzero)
    }
}

/// Two power series generate (x,y) exactly when their linear parts are independent.
pub fn ideal_conditions(g: &GSystem) -> Result<IdealReport> {
    let n = g.n;
    let adjacent: Vec<bool> = (0..2 * n).map(|s| linear_rank(&g.gs[s], &g.gs[s + 1]) == 2).collect();
    if let Some(s) = adjacent.iter().position(|&b| !b) {
        return Err(QpError::Invalid(format!("adjacent pair ({s},{}) fails to generate (x,y)", s + 1)));
    }
    let skip = (1..2 * n)
        .map(|s| SkipCondition {
            s,
            generates: linear_rank(&g.gs[s - 1], &g.gs[s + 1]) == 2,
            kappa_s2_nonzero: g.kappa.get(&(s, 2)).is_some_and(|c| !c.is_zero()),
        })
        .collect();
    let constant_free = g.gs.iter().all(|p| !p.has_constant_term());
    Ok(IdealReport { adjacent, skip, constant_free })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bundle {
    MinusOneMinusOne,
    MinusTwoZero,
}

impl Serialize for Bundle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            Bundle::MinusOneMinusOne => "(-1,-1)",
            Bundle::MinusTwoZero => "(-2,0)",
        })
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct NccrArrow {
    pub tail: usize,
    pub head: usize,
    pub label: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct NccrLoop {
    pub vertex: usize,
    pub label: String,
    /// Set at vertex 0, where the label follows the same linear-part rule as the curve vertices.
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Nccr {
    pub vertices: usize,
    pub arrows: Vec<NccrArrow>,
    pub loops: Vec<NccrLoop>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CAnPresentation {
    /// g_0, g_2, …, g_{2n}.
    pub factors: Vec<String>,
    pub equation: String,
    pub product: Vec<MonomialJson>,
    pub module_chain: Vec<String>,
    pub bundles: Vec<Bundle>,
    pub nccr: Nccr,
}

/// Loop labels completing the span of two linear parts; empty when they already span.
pub fn loop_labels(p: &BiPoly, q: &BiPoly) -> Vec<String> {
    match linear_rank(p, q) {
        2 => Vec::new(),
        0 => vec!["x".into(), "y".into()],
        _ => {
            let (a, b) = if p.linear_part() != (Q::zero(), Q::zero()) { p.linear_part() } else { q.linear_part() };
            let label = if b.is_zero() {
                "y"
            } else if a.is_zero() || a == b {
                "x"
            } else {
                "x+y"
            };
            vec![label.into()]
        }
    }
}

fn paren(p: &BiPoly) -> String {
    if p.terms.len() > 1 || p.terms.values().any(|c| c.is_negative()) {
        format!("({p})")
    } else {
        p.to_string()
    }
}

/// uv = g_0g_2⋯g_{2n} with its module chain, normal bundles and NCCR quiver.
pub fn emit_presentation(g: &GSystem) -> CAnPresentation {
    let n = g.n;
    let big_g: Vec<BiPoly> = (0..=n).map(|i| g.gs[2 * i].clone()).collect();
    let factors: Vec<String> = big_g.iter().map(|p| p.to_string()).collect();
    let product = big_g.iter().fold(BiPoly::constant(Q::one()), |acc, p| acc.mul(p));
    let equation = format!("uv = {}", big_g.iter().map(paren).collect::<Vec<_>>().join("·"));
    let module_chain = (1..=n)
        .map(|k| format!("(u, {})", big_g[..k].iter().map(paren).collect::<Vec<_>>().join("·")))
        .collect();
    let bundles = (1..=n)
        .map(|i| {
            if linear_rank(&big_g[i - 1], &big_g[i]) == 2 {
                Bundle::MinusOneMinusOne
            } else {
                Bundle::MinusTwoZero
            }
        })
        .collect();
    let mut arrows = Vec::new();
    for i in 1..=n {
        arrows.push(NccrArrow { tail: i - 1, head: i, label: paren(&big_g[i - 1]) });
        arrows.push(NccrArrow { tail: i, head: i - 1, label: "inc".into() });
    }
    arrows.push(NccrArrow { tail: 0, head: n, label: "u".into() });
    arrows.push(NccrArrow { tail: n, head: 0, label: format!("{}/u", paren(&big_g[n])) });
    let mut loops = Vec::new();
    for label in loop_labels(&big_g[0], &big_g[n]) {
        loops.push(NccrLoop { vertex: 0, label, flagged: true });
    }
    for i in 1..=n {
        for label in loop_labels(&big_g[i - 1], &big_g[i]) {
            loops.push(NccrLoop { vertex: i, label, flagged: false });
        }
    }
    CAnPresentation { factors, equation, product: product.to_json(), module_chain, bundles, nccr: Nccr { vertices: n + 1, arrows, loops } }
}

/// The relations T on Q_n, with the boundary terms at vertex 0 deleted.
pub fn contraction_relations(kappa: &Kappa, n: usize, trunc: u32) -> Result<Vec<NCElement>> {
    check_kappa(n, kappa)?;
    let spec = QuiverSpec::full(n)?;
    let q = &spec.quiver;
    let m = spec.m();
    let path = |w: &[ArrowId]| Path::from_word(q, w);
    let mut out = Vec::new();
    let coeffs = |i: usize| kappa.iter().filter(move |(&(s, _), _)| s == i).map(|(&(_, j), c)| (j, Q::from_integer((j as i64).into()) * c));
    for i in 0..m {
        let x_pow = |e: usize| spec.x(i).repeat(e);
        if let Some(b) = spec.b(i) {
            let a = spec.a(i);
            let mut rb = NCElement::zero(trunc);
            let mut ra = NCElement::zero(trunc);
            if i > 0 {
                rb.add_term(path(&[vec![b], spec.xp(i - 1)].concat())?, Q::one());
                ra.add_term(path(&[spec.xp(i - 1), vec![a]].concat())?, Q::one());
            }
            for (j, c) in coeffs(i + 1) {
                rb.add_term(path(&[vec![b], x_pow(j - 1)].concat())?, c.clone());
                ra.add_term(path(&[x_pow(j - 1), vec![a]].concat())?, c);
            }
            if i + 1 < m {
                rb.add_term(path(&[spec.x(i + 1), vec![b]].concat())?, Q::one());
                ra.add_term(path(&[vec![a], spec.x(i + 1)].concat())?, Q::one());
            }
            out.push(rb);
            out.push(ra);
        } else {
            let mut r = NCElement::zero(trunc);
            if i > 0 {
                r.add_term(path(&spec.xp(i - 1))?, Q::one());
            }
            for (j, c) in coeffs(i + 1) {
                r.add_term(path(&x_pow(j - 1))?, c);
            }
            if i + 1 < m {
                r.add_term(path(&spec.x(i + 1))?, Q::one());
            }
            out.push(r);
        }
    }
    Ok(out.into_iter().filter(|r| !r.is_zero()).collect())
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct IdealComparison {
    pub contraction_in_jacobi: bool,
    pub jacobi_in_contraction: bool,
}

impl IdealComparison {
    pub fn equal(&self) -> bool {
        self.contraction_in_jacobi && self.jacobi_in_contraction
    }
}

/// Mutual reduction of T and the cyclic derivatives of the monomialized potential modulo weight `trunc`.
pub fn compare_with_jacobi(kappa: &Kappa, n: usize, trunc: u32) -> Result<IdealComparison> {
    let spec = Arc::new(QuiverSpec::full(n)?);
    let f = MonomialTypeA::new(spec.clone(), kappa.clone())?.to_potential(trunc + 2);
    let jac = generators(&f, trunc, &[])?;
    let rel = contraction_relations(kappa, n, trunc)?;
    let sys_j = ReductionSystem::complete(spec.quiver.clone(), Orientation::Ascending, trunc, &jac);
    let sys_t = ReductionSystem::complete(spec.quiver.clone(), Orientation::Ascending, trunc, &rel);
    Ok(IdealComparison {
        contraction_in_jacobi: rel.iter().all(|r| sys_j.reduce(r).is_zero()),
        jacobi_in_contraction: jac.iter().all(|r| sys_t.reduce(r).is_zero()),
    })
}

/// Parameters of κ1x^p + xy + κ2y^q + κ3x^s on Q_{3,{1,2,3}}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A3Params {
    pub kappa1: Q,
    pub p: u32,
    pub kappa2: Q,
    pub q: u32,
    pub kappa3: Q,
    pub s: u32,
}

/// κ on Q_3 after adding a loop at each vertex: loops −½, x-slot −1 + κ1[p=2], y-slot −1 + κ2[q=2].
pub fn a3_kappa(p: &A3Params) -> Kappa {
    let half = -Q::one() / Q::from_integer(2.into());
    let mut k = Kappa::new();
    for i in [1, 3, 5] {
        k.insert((i, 2), half.clone());
    }
    let mut add = |i: usize, j: u32, c: &Q| {
        if c.is_zero() || j < 2 {
            return;
        }
        let e = k.entry((i, j as usize)).or_insert_with(Q::zero);
        *e += c;
    };
    add(2, 2, &-Q::one());
    add(4, 2, &-Q::one());
    add(2, p.p, &p.kappa1);
    add(4, p.q, &p.kappa2);
    add(2, p.s, &p.kappa3);
    k.retain(|_, c| !c.is_zero());
    k
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A3Realization {
    pub system: GSystem,
    /// (h_0,h_1,h_2,h_3) = (−g_0, g_2, g_4, −g_6).
    pub h: [BiPoly; 4],
    pub signs: [i8; 4],
}

/// Realization with anchors g_2 = x, g_3 = x + y.
pub fn a3_realization(p: &A3Params) -> Result<A3Realization> {
    let kappa = a3_kappa(p);
    let system = solve_g_system_with(3, &kappa, 2, BiPoly::x(), BiPoly::x().add(&BiPoly::y()))?;
    let g = &system.gs;
    let h = [g[0].neg(), g[2].clone(), g[4].clone(), g[6].neg()];
    Ok(A3Realization { system, h, signs: [-1, 1, 1, -1] })
}
