use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bipoly::BiPoly;
use crate::error::{QpError, Result};
use crate::linalg::solve;
use crate::monomialize::{monomialize, Kappa, MonomialTypeA};
use crate::path::Path;
use crate::potential::Potential;
use crate::quiver::{ArrowId, QuiverSpec};
use crate::rational::{fmt_q, q, qf, qpow, rational_root, Q};
use crate::substitution::{apply_substitution, compose, Substitution};

/// The quiver Q_{3,{1,2,3}} with x = b1a1 and y = a2b2 at the middle vertex.
pub fn a3_spec() -> Arc<QuiverSpec> {
    Arc::new(QuiverSpec::new(3, [1, 2, 3]).expect("valid quiver"))
}

fn require_a3(spec: &QuiverSpec) -> Result<()> {
    if spec.n != 3 || spec.loopless.len() != 3 {
        return Err(QpError::Invalid("potential must live on Q_{3,{1,2,3}}".into()));
    }
    Ok(())
}

/// A monomialized potential xy + Σ α_j x^j + Σ β_j y^j on Q.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct A3Potential {
    pub alpha: BTreeMap<u32, Q>,
    pub beta: BTreeMap<u32, Q>,
}

/// The base part κ1x^p + xy + κ2y^q, each power absent when its κ vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasePart {
    pub x: Option<(u32, Q)>,
    pub y: Option<(u32, Q)>,
}

/// ε12 = 2κ1 when p = 2, ε22 = 2κ2 when q = 2, zero otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A12Matrix {
    pub e12: Q,
    pub e22: Q,
}

impl A12Matrix {
    pub fn det(&self) -> Q {
        &self.e12 * &self.e22 - Q::one()
    }
}

impl A3Potential {
    pub fn new(alpha: BTreeMap<u32, Q>, beta: BTreeMap<u32, Q>) -> Result<Self> {
        if alpha.keys().chain(beta.keys()).any(|&j| j < 2) {
            return Err(QpError::Invalid("powers must be at least 2".into()));
        }
        let nz = |m: BTreeMap<u32, Q>| m.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(A3Potential { alpha: nz(alpha), beta: nz(beta) })
    }

    pub fn from_monomial(m: &MonomialTypeA) -> Result<Self> {
        require_a3(&m.spec)?;
        let mut r = A3Potential::default();
        for (&(i, j), c) in &m.kappa {
            let side = if i == 1 { &mut r.alpha } else { &mut r.beta };
            side.insert(j as u32, c.clone());
        }
        Ok(r)
    }

    pub fn kappa(&self) -> Kappa {
        let mut k = Kappa::new();
        for (&j, c) in &self.alpha {
            k.insert((1, j as usize), c.clone());
        }
        for (&j, c) in &self.beta {
            k.insert((2, j as usize), c.clone());
        }
        k
    }

    pub fn to_potential(&self, trunc: u32) -> Potential {
        MonomialTypeA::new(a3_spec(), self.kappa()).expect("valid kappa").to_potential(trunc)
    }

    pub fn to_bipoly(&self) -> BiPoly {
        let mut p = BiPoly::monomial(Q::one(), 1, 1);
        for (&j, c) in &self.alpha {
            p.add_term(j, 0, c.clone());
        }
        for (&j, c) in &self.beta {
            p.add_term(0, j, c.clone());
        }
        p
    }

    pub fn base(&self) -> BasePart {
        let first = |m: &BTreeMap<u32, Q>| m.iter().next().map(|(&j, c)| (j, c.clone()));
        BasePart { x: first(&self.alpha), y: first(&self.beta) }
    }

    /// Everything beyond the base part.
    pub fn redundant(&self) -> A3Potential {
        let rest = |m: &BTreeMap<u32, Q>| m.iter().skip(1).map(|(&j, c)| (j, c.clone())).collect();
        A3Potential { alpha: rest(&self.alpha), beta: rest(&self.beta) }
    }

    pub fn a12(&self) -> A12Matrix {
        let b = self.base();
        let e = |s: &Option<(u32, Q)>| match s {
            Some((2, k)) => k * q(2),
            _ => Q::zero(),
        };
        A12Matrix { e12: e(&b.x), e22: e(&b.y) }
    }
}

/// The seven normal forms on Q.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum A3Family {
    /// x²+xy+λy², λ ∉ {0, ¼}.
    Lambda(Q),
    /// x²+xy+¼y²+x^s, s ≥ 3.
    QuarterPower(u32),
    /// x^p+xy+y^q, p,q ≥ 2 and (p,q) ≠ (2,2).
    PowerPair(u32, u32),
    /// x²+xy+¼y².
    Quarter,
    /// x^p+xy, p ≥ 2.
    XPower(u32),
    /// xy+y^q, q ≥ 2.
    YPower(u32),
    /// xy.
    Bare,
}

impl A3Family {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            A3Family::Lambda(l) => !l.is_zero() && *l != qf(1, 4),
            A3Family::QuarterPower(s) => *s >= 3,
            A3Family::PowerPair(p, q) => *p >= 2 && *q >= 2 && (*p, *q) != (2, 2),
            A3Family::XPower(p) => *p >= 2,
            A3Family::YPower(q) => *q >= 2,
            A3Family::Quarter | A3Family::Bare => true,
        };
        if ok {
            Ok(())
        } else {
            Err(QpError::Invalid(format!("invalid family parameters {self:?}")))
        }
    }

    pub fn number(&self) -> u8 {
        match self {
            A3Family::Lambda(_) => 1,
            A3Family::QuarterPower(_) => 2,
            A3Family::PowerPair(..) => 3,
            A3Family::Quarter => 4,
            A3Family::XPower(_) => 5,
            A3Family::YPower(_) => 6,
            A3Family::Bare => 7,
        }
    }

    pub fn is_finite_dimensional(&self) -> bool {
        self.number() <= 3
    }

    pub fn params_json(&self) -> Value {
        match self {
            A3Family::Lambda(l) => json!({ "lambda": fmt_q(l) }),
            A3Family::QuarterPower(s) => json!({ "s": s }),
            A3Family::PowerPair(p, q) => json!({ "p": p, "q": q }),
            A3Family::XPower(p) => json!({ "p": p }),
            A3Family::YPower(q) => json!({ "q": q }),
            A3Family::Quarter | A3Family::Bare => json!({}),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "family": self.number(), "params": self.params_json(), "potential": self.normal_form().to_bipoly().to_string() })
    }

    pub fn normal_form(&self) -> A3Potential {
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        match self {
            A3Family::Lambda(l) => {
                a.insert(2, Q::one());
                b.insert(2, l.clone());
            }
            A3Family::QuarterPower(s) => {
                a.insert(2, Q::one());
                a.insert(*s, Q::one());
                b.insert(2, qf(1, 4));
            }
            A3Family::PowerPair(p, q) => {
                a.insert(*p, Q::one());
                b.insert(*q, Q::one());
            }
            A3Family::Quarter => {
                a.insert(2, Q::one());
                b.insert(2, qf(1, 4));
            }
            A3Family::XPower(p) => {
                a.insert(*p, Q::one());
            }
            A3Family::YPower(q) => {
                b.insert(*q, Q::one());
            }
            A3Family::Bare => {}
        }
        A3Potential { alpha: a, beta: b }
    }
}

impl fmt::Display for A3Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}", self.number(), self.normal_form().to_bipoly())
    }
}

/// Output of `normalize`: f_b, or f_b + μx^s when det(A12) = 0.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub potential: A3Potential,
    /// (s, μ) of the surviving μx^s term.
    pub mu: Option<(u32, Q)>,
    /// Composite coordinate change carrying the input to `potential` modulo m^D.
    pub substitution: Substitution,
    pub trunc: u32,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Axis {
    X,
    Y,
}

fn x_pow(spec: &QuiverSpec, e: u32) -> Vec<ArrowId> {
    spec.xp(0).repeat(e as usize)
}

fn y_pow(spec: &QuiverSpec, e: u32) -> Vec<ArrowId> {
    spec.x(1).repeat(e as usize)
}

/// Elementary coordinate changes a ↦ a + c·w, grouped into one generator.
#[derive(Clone, Debug)]
struct Generator {
    moves: Vec<(ArrowId, Vec<ArrowId>, Q)>,
}

impl Generator {
    fn to_substitution(&self, spec: &QuiverSpec, scale: &Q, trunc: u32) -> Result<Substitution> {
        let mut s = Substitution::identity(spec.quiver.clone(), trunc);
        for (a, w, c) in &self.moves {
            let p = Path::from_word(&spec.quiver, w)?;
            s.add_to(*a, &p, &(c * scale))?;
        }
        Ok(s)
    }
}

fn generators(spec: &QuiverSpec, sd: u32, kappa1: &Q, mu: &Option<(u32, Q)>) -> Vec<Generator> {
    let a1 = spec.a(0);
    let a2 = spec.a(1);
    let s = sd - 2;
    let cat = |parts: &[Vec<ArrowId>]| parts.concat();
    let mut gens = vec![
        Generator { moves: vec![(a1, cat(&[vec![a1], x_pow(spec, s)]), Q::one())] },
        Generator { moves: vec![(a2, cat(&[y_pow(spec, s), vec![a2]]), Q::one())] },
        Generator { moves: vec![(a1, cat(&[vec![a1], x_pow(spec, s - 1), y_pow(spec, 1)]), Q::one())] },
        Generator { moves: vec![(a2, cat(&[x_pow(spec, s), vec![a2]]), Q::one())] },
    ];
    if let Some((s0, _)) = mu {
        if sd > *s0 {
            let k = sd - s0;
            gens.push(Generator {
                moves: vec![
                    (a1, cat(&[vec![a1], x_pow(spec, k - 1), y_pow(spec, 1)]), Q::one()),
                    (a2, cat(&[x_pow(spec, k), vec![a2]]), -(kappa1 * q(2))),
                ],
            });
        }
    }
    gens
}

fn coeff_at(f: &A3Potential, axis: Axis, j: u32) -> Q {
    let m = if axis == Axis::X { &f.alpha } else { &f.beta };
    m.get(&j).cloned().unwrap_or_else(Q::zero)
}

/// Entries below the given exponents on each side agree.
fn agrees_below(f: &A3Potential, g: &A3Potential, xlim: u32, ylim: u32) -> bool {
    let side = |a: &BTreeMap<u32, Q>, b: &BTreeMap<u32, Q>, lim: u32| {
        a.range(..lim).eq(b.range(..lim))
    };
    side(&f.alpha, &g.alpha, xlim) && side(&f.beta, &g.beta, ylim)
}

struct Step {
    potential: A3Potential,
    substitution: Substitution,
}

fn apply_step(cur: &A3Potential, sub: &Substitution, d: u32) -> Result<Step> {
    let g = apply_substitution(&cur.to_potential(d), sub)?;
    let m = monomialize(&g, d)?;
    let substitution = compose(sub, &m.substitution)?;
    Ok(Step { potential: A3Potential::from_monomial(&m.result)?, substitution })
}

/// Brings a Type A potential on Q to its base part, plus μx^s when det(A12) = 0, modulo m^D.
pub fn normalize(f: &Potential, d: u32) -> Result<Normalized> {
    require_a3(&f.spec)?;
    let spec = f.spec.clone();
    let m = monomialize(f, d)?;
    let mut total = m.substitution;
    let mut cur = A3Potential::from_monomial(&m.result)?;
    let base = cur.base();
    let det_zero = cur.a12().det().is_zero();
    let kappa1 = base.x.as_ref().map(|(_, k)| k.clone()).unwrap_or_else(Q::zero);
    let p = base.x.as_ref().map(|(p, _)| *p);
    let q_exp = base.y.as_ref().map(|(q, _)| *q);
    let mut mu: Option<(u32, Q)> = None;
    let visible = |j: u32| 2 * j < d;
    let mut sd = 3;
    loop {
        let xt = p.map(|p| p + sd - 2).filter(|&j| visible(j));
        let yt = q_exp.map(|q| q + sd - 2).filter(|&j| visible(j));
        if xt.is_none() && yt.is_none() {
            break;
        }
        let xlim = xt.unwrap_or(d);
        let ylim = yt.unwrap_or(d);
        let mut targets = Vec::new();
        if let Some(j) = xt {
            targets.push((Axis::X, j));
        }
        if let Some(j) = yt {
            targets.push((Axis::Y, j));
        }
        for _ in 0..3 {
            let resid: Vec<Q> = targets.iter().map(|&(ax, j)| coeff_at(&cur, ax, j)).collect();
            if resid.iter().all(|c| c.is_zero()) {
                break;
            }
            let mut cols: Vec<(Generator, Vec<Q>)> = Vec::new();
            for g in generators(&spec, sd, &kappa1, &mu) {
                let sub = g.to_substitution(&spec, &Q::one(), d)?;
                let step = apply_step(&cur, &sub, d)?;
                if !agrees_below(&cur, &step.potential, xlim, ylim) {
                    continue;
                }
                let eff: Vec<Q> = targets
                    .iter()
                    .zip(&resid)
                    .map(|(&(ax, j), r)| coeff_at(&step.potential, ax, j) - r)
                    .collect();
                if eff.iter().any(|e| !e.is_zero()) {
                    cols.push((g, eff));
                }
            }
            let rows_for = |keep: &[usize]| -> (Vec<Vec<Q>>, Vec<Q>) {
                let a = keep.iter().map(|&r| cols.iter().map(|(_, e)| e[r].clone()).collect()).collect();
                let b = keep.iter().map(|&r| -resid[r].clone()).collect();
                (a, b)
            };
            let all: Vec<usize> = (0..targets.len()).collect();
            let (a, b) = rows_for(&all);
            let mut sol = if cols.is_empty() { None } else { solve(&a, &b) };
            if sol.is_none() && det_zero && mu.is_none() {
                let ys: Vec<usize> = all.iter().copied().filter(|&r| targets[r].0 == Axis::Y).collect();
                if ys.iter().all(|&r| resid[r].is_zero()) {
                    break;
                }
                let (a, b) = rows_for(&ys);
                sol = if cols.is_empty() { None } else { solve(&a, &b) };
            }
            let Some(sol) = sol else {
                return Err(QpError::Ceiling(format!("no coordinate change clears shifted degree {sd}")));
            };
            let mut sub = Substitution::identity(spec.quiver.clone(), d);
            for ((g, _), c) in cols.iter().zip(&sol) {
                if c.is_zero() {
                    continue;
                }
                sub = compose(&sub, &g.to_substitution(&spec, c, d)?)?;
            }
            let step = apply_step(&cur, &sub, d)?;
            if !agrees_below(&cur, &step.potential, xlim, ylim) {
                return Err(QpError::Ceiling(format!("coordinate change disturbed degrees below shifted degree {sd}")));
            }
            total = compose(&total, &step.substitution)?;
            cur = step.potential;
        }
        for &(ax, j) in &targets {
            let c = coeff_at(&cur, ax, j);
            if c.is_zero() {
                continue;
            }
            if ax == Axis::X && det_zero && mu.is_none() {
                mu = Some((j, c));
            } else {
                return Err(QpError::Ceiling(format!("term of power {j} survives normalization")));
            }
        }
        sd += 1;
    }
    Ok(Normalized { potential: cur, mu, substitution: total, trunc: d })
}

/// Diagonal rescaling a1 ↦ λ1a1, a2 ↦ λ2a2 composed after normalization, and the overall scalar.
#[derive(Clone, Debug)]
pub struct Normalizer {
    pub substitution: Substitution,
    pub scalar: Q,
}

#[derive(Clone, Debug)]
pub struct A3Class {
    pub family: A3Family,
    pub normalizer: Option<Normalizer>,
}

fn family_of(n: &Normalized) -> A3Family {
    let base = n.potential.base();
    if n.potential.a12().det().is_zero() {
        return match &n.mu {
            Some((s, _)) => A3Family::QuarterPower(*s),
            None => A3Family::Quarter,
        };
    }
    match (&base.x, &base.y) {
        (Some((2, k1)), Some((2, k2))) => A3Family::Lambda(k1 * k2),
        (Some((p, _)), Some((q, _))) => A3Family::PowerPair(*p, *q),
        (Some((p, _)), None) => A3Family::XPower(*p),
        (None, Some((q, _))) => A3Family::YPower(*q),
        (None, None) => A3Family::Bare,
    }
}

/// (λ1, λ2) with x ↦ λ1x, y ↦ λ2y carrying the normalized potential to the family's normal form up to 1/(λ1λ2).
fn scaling(n: &Normalized, family: &A3Family) -> Option<(Q, Q)> {
    let base = n.potential.base();
    let k1 = base.x.as_ref().map(|(_, k)| k.clone());
    let k2 = base.y.as_ref().map(|(_, k)| k.clone());
    match family {
        A3Family::Lambda(_) | A3Family::Quarter => Some((Q::one(), k1?)),
        A3Family::QuarterPower(s) => {
            let k1 = k1?;
            let (_, m) = n.mu.as_ref()?;
            let l1 = rational_root(&(&k1 / m), s - 2)?;
            let l2 = &k1 * &l1;
            Some((l1, l2))
        }
        A3Family::PowerPair(p, q) => {
            let (k1, k2) = (k1?, k2?);
            let e = (p - 1) * (q - 1) - 1;
            let l1 = rational_root(&(Q::one() / (qpow(&k1, q - 1) * &k2)), e)?;
            let l2 = &k1 * qpow(&l1, p - 1);
            Some((l1, l2))
        }
        A3Family::XPower(_) => Some((Q::one(), k1?)),
        A3Family::YPower(_) => Some((k2?, Q::one())),
        A3Family::Bare => Some((Q::one(), Q::one())),
    }
}

/// Family and parameters; the exact normalizer is attached when the required roots are rational.
pub fn classify(f: &Potential, d: u32) -> Result<A3Class> {
    let n = normalize(f, d)?;
    let family = family_of(&n);
    family.validate()?;
    let normalizer = match scaling(&n, &family) {
        Some((l1, l2)) => {
            let spec = &f.spec;
            let scale = Substitution::scaling(spec.quiver.clone(), d, &[(spec.a(0), l1.clone()), (spec.a(1), l2.clone())]);
            let substitution = compose(&n.substitution, &scale)?;
            let scalar = Q::one() / (&l1 * &l2);
            let image = apply_substitution(&f.truncate(d), &substitution)?.scale(&scalar);
            if image != family.normal_form().to_potential(d) {
                return Err(QpError::Ceiling("normalizer does not reach the normal form".into()));
            }
            Some(Normalizer { substitution, scalar })
        }
        None => None,
    };
    Ok(A3Class { family, normalizer })
}

/// Result of flopping one exceptional curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlopResult {
    OnQ(A3Family),
    /// The flopped contraction algebra lives on some Q_{3,I} with I ≠ ∅.
    NotOnQ(u8),
}

/// Closed-form flop of curve 1, 2 or 3.
pub fn flop(c: &A3Family, curve: u8) -> Result<FlopResult> {
    if !(1..=3).contains(&curve) {
        return Err(QpError::Invalid(format!("curve index {curve} out of range 1..3")));
    }
    c.validate()?;
    use A3Family::*;
    let off = FlopResult::NotOnQ(curve);
    let r = match (c, curve) {
        (Lambda(l), 1 | 3) => FlopResult::OnQ(Lambda(qf(1, 4) - l)),
        (Lambda(l), 2) => FlopResult::OnQ(Lambda(Q::one() / (q(16) * l))),
        (Quarter, 1) => FlopResult::OnQ(XPower(2)),
        (Quarter, 3) => FlopResult::OnQ(YPower(2)),
        (Quarter, 2) => FlopResult::OnQ(Quarter),
        (XPower(2), 1) | (YPower(2), 3) => FlopResult::OnQ(Quarter),
        (QuarterPower(s), 1) => FlopResult::OnQ(PowerPair(2, *s)),
        (QuarterPower(s), 3) => FlopResult::OnQ(PowerPair(*s, 2)),
        (PowerPair(2, s), 1) => FlopResult::OnQ(QuarterPower(*s)),
        (PowerPair(s, 2), 3) => FlopResult::OnQ(QuarterPower(*s)),
        _ => off,
    };
    Ok(r)
}

/// On-Q members of a derived-equivalence class and the number of flops leaving Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedOrbit {
    pub members: BTreeSet<A3Family>,
    pub off_q: usize,
}

impl DerivedOrbit {
    pub fn to_json(&self) -> Value {
        json!({
            "orbit": self.members.iter().map(A3Family::to_json).collect::<Vec<_>>(),
            "offQ": self.off_q,
        })
    }
}

/// x^p+xy+y^q ≅ x^q+xy+y^p.
fn swap(c: &A3Family) -> Option<A3Family> {
    match c {
        A3Family::PowerPair(p, q) => Some(A3Family::PowerPair(*q, *p)),
        _ => None,
    }
}

/// Closure under flops at every curve and the x↔y isomorphism.
pub fn derived_orbit(c: &A3Family) -> Result<DerivedOrbit> {
    c.validate()?;
    if !c.is_finite_dimensional() {
        return Err(QpError::OutOfScope(format!("family ({}) has infinite-dimensional Jacobi algebra", c.number())));
    }
    let mut members = BTreeSet::new();
    let mut queue = VecDeque::from([c.clone()]);
    let mut off_q = 0;
    while let Some(m) = queue.pop_front() {
        if !members.insert(m.clone()) {
            continue;
        }
        for curve in 1..=3 {
            match flop(&m, curve)? {
                FlopResult::OnQ(n) => queue.push_back(n),
                FlopResult::NotOnQ(_) => off_q += 1,
            }
        }
        queue.extend(swap(&m));
    }
    Ok(DerivedOrbit { members, off_q })
}

/// GV invariants of the A3 crepant resolution realizing the class.
pub fn gv_set(c: &A3Family) -> Result<Vec<u32>> {
    c.validate()?;
    match c {
        A3Family::Lambda(_) => Ok(vec![1; 6]),
        A3Family::QuarterPower(s) => Ok(vec![1, 1, 1, s - 1, 1, 1]),
        A3Family::PowerPair(p, q) => Ok(vec![1, 1, 1, p - 1, q - 1, 1]),
        _ => Err(QpError::OutOfScope(format!("family ({}) has infinite-dimensional Jacobi algebra", c.number()))),
    }
}

/// t ↦ (at+b)/(ct+d), kept with its first nonzero entry equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mobius {
    pub m: [Q; 4],
}

impl Mobius {
    pub fn new(a: Q, b: Q, c: Q, d: Q) -> Self {
        let m = [a, b, c, d];
        let lead = m.iter().find(|v| !v.is_zero()).cloned().unwrap_or_else(Q::one);
        Mobius { m: m.map(|v| v / &lead) }
    }

    pub fn identity() -> Self {
        Mobius::new(Q::one(), Q::zero(), Q::zero(), Q::one())
    }

    /// self after other: t ↦ self(other(t)).
    pub fn after(&self, other: &Mobius) -> Mobius {
        let [a, b, c, d] = &self.m;
        let [e, f, g, h] = &other.m;
        Mobius::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }

    pub fn apply(&self, t: &Q) -> Option<Q> {
        let [a, b, c, d] = &self.m;
        let den = c * t + d;
        if den.is_zero() {
            None
        } else {
            Some((a * t + b) / den)
        }
    }
}

/// λ ↦ ¼−λ and λ ↦ 1/(16λ).
pub fn lambda_generators() -> [Mobius; 2] {
    [
        Mobius::new(-Q::one(), qf(1, 4), Q::zero(), Q::one()),
        Mobius::new(Q::zero(), Q::one(), q(16), Q::zero()),
    ]
}

/// λ, (1−4λ)/4, 1/(4(1−4λ)), λ/(4λ−1), (4λ−1)/(16λ), 1/(16λ).
pub fn lambda_orbit_maps() -> Vec<Mobius> {
    let z = Q::zero;
    vec![
        Mobius::identity(),
        Mobius::new(q(-4), q(1), z(), q(4)),
        Mobius::new(z(), q(1), q(-16), q(4)),
        Mobius::new(q(1), z(), q(4), q(-1)),
        Mobius::new(q(4), q(-1), q(16), z()),
        Mobius::new(z(), q(1), q(16), z()),
    ]
}

/// μ ↦ 1−μ and μ ↦ 1/μ.
pub fn mu_generators() -> [Mobius; 2] {
    [Mobius::new(-Q::one(), Q::one(), Q::zero(), Q::one()), Mobius::new(Q::zero(), Q::one(), Q::one(), Q::zero())]
}

/// μ, 1−μ, 1/(1−μ), μ/(μ−1), (μ−1)/μ, 1/μ.
pub fn mu_orbit_maps() -> Vec<Mobius> {
    let z = Q::zero;
    vec![
        Mobius::identity(),
        Mobius::new(q(-1), q(1), z(), q(1)),
        Mobius::new(z(), q(1), q(-1), q(1)),
        Mobius::new(q(1), z(), q(1), q(-1)),
        Mobius::new(q(1), q(-1), q(1), z()),
        Mobius::new(z(), q(1), q(1), z()),
    ]
}

/// The group of rational functions generated under composition.
pub fn mobius_closure(gens: &[Mobius]) -> BTreeSet<Mobius> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([Mobius::identity()]);
    while let Some(m) = queue.pop_front() {
        if !seen.insert(m.clone()) {
            continue;
        }
        for g in gens {
            queue.push_back(g.after(&m));
        }
    }
    seen
}

/// The listed values at a given parameter; poles are skipped.
pub fn evaluate_orbit(maps: &[Mobius], t: &Q) -> BTreeSet<Q> {
    maps.iter().filter_map(|m| m.apply(t)).collect()
}

/// λ = μ/4 as a change of variable.
pub fn mu_to_lambda() -> Mobius {
    Mobius::new(Q::one(), Q::zero(), Q::zero(), q(4))
}

/// One quaternion-type algebra A_{p,q}(μ) and its parameter as B_{p,q}(λ), when rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ApqMember {
    pub p: u32,
    pub q: u32,
    #[serde(serialize_with = "ser_q")]
    pub mu: Q,
    #[serde(serialize_with = "ser_opt_q")]
    pub b_lambda: Option<Q>,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

fn ser_opt_q<S: serde::Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&fmt_q(v)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApqOrbit {
    pub members: Vec<ApqMember>,
    /// The derived orbit of the corresponding potentials on Q.
    pub classes: DerivedOrbit,
}

/// (−1)^q p^{−q/p} q^{−1} μ when p^{q/p} is rational.
pub fn b_lambda(p: u32, q_exp: u32, mu: &Q) -> Option<Q> {
    let root = rational_root(&qpow(&q(p as i64), q_exp), p)?;
    let sign = if q_exp % 2 == 0 { Q::one() } else { -Q::one() };
    Some(sign * mu / (root * q(q_exp as i64)))
}

/// Derived-equivalence data for the finite-dimensional quaternion-type algebras.
pub fn apq_orbit(p: u32, q_exp: u32, mu: &Q) -> Result<ApqOrbit> {
    if p < 2 || q_exp < 2 {
        return Err(QpError::OutOfScope("p and q must be at least 2".into()));
    }
    if (p, q_exp) == (2, 2) {
        if mu.is_zero() || mu.is_one() {
            return Err(QpError::OutOfScope("A_{2,2}(μ) needs μ ∉ {0, 1}".into()));
        }
        let members = evaluate_orbit(&mu_orbit_maps(), mu)
            .into_iter()
            .map(|m| ApqMember { p: 2, q: 2, b_lambda: b_lambda(2, 2, &m), mu: m })
            .collect();
        let classes = derived_orbit(&A3Family::Lambda(mu / q(4)))?;
        return Ok(ApqOrbit { members, classes });
    }
    if !mu.is_one() {
        return Err(QpError::OutOfScope("A_{p,q}(μ) with (p,q) ≠ (2,2) needs μ = 1".into()));
    }
    let mut members = vec![ApqMember { p, q: q_exp, mu: Q::one(), b_lambda: b_lambda(p, q_exp, &Q::one()) }];
    if p != q_exp {
        members.push(ApqMember { p: q_exp, q: p, mu: Q::one(), b_lambda: b_lambda(q_exp, p, &Q::one()) });
    }
    let classes = derived_orbit(&A3Family::PowerPair(p, q_exp))?;
    Ok(ApqOrbit { members, classes })
}

impl ApqOrbit {
    pub fn to_json(&self) -> Value {
        json!({ "members": self.members, "classes": self.classes.to_json() })
    }
}
