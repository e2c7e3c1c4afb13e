use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::jacobi::enumerate_paths;
use crate::linalg::{rank, SparseVec};
use crate::path::{NCElement, Path};
use crate::quiver::{Arrow, ArrowId, Quiver};
use crate::rational::{binomial, Q};
use crate::rewrite::{Orientation, ReductionSystem, Rule};

/// Cyclic double quiver on vertices 0..n with n+1 weight-two loops at every vertex.
#[derive(Clone, Debug)]
pub struct AppendixQuiver {
    pub n: usize,
    pub quiver: Arc<Quiver>,
    a: Vec<ArrowId>,
    b: Vec<ArrowId>,
    l: Vec<Vec<ArrowId>>,
}

impl AppendixQuiver {
    pub fn new(n: usize) -> Result<Self> {
        let nv = n + 1;
        let mut arrows = Vec::new();
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut l = vec![Vec::new(); nv];
        for t in 0..nv {
            a.push(arrows.len() as ArrowId);
            arrows.push(Arrow { name: format!("a{t}"), tail: t, head: (t + 1) % nv, weight: 1 });
        }
        for t in 0..nv {
            b.push(arrows.len() as ArrowId);
            arrows.push(Arrow { name: format!("b{t}"), tail: (t + 1) % nv, head: t, weight: 1 });
        }
        for (t, lt) in l.iter_mut().enumerate() {
            for i in 0..nv {
                lt.push(arrows.len() as ArrowId);
                arrows.push(Arrow { name: format!("l{t}_{i}"), tail: t, head: t, weight: 2 });
            }
        }
        Ok(AppendixQuiver { n, quiver: Arc::new(Quiver::new(nv, arrows)?), a, b, l })
    }

    fn m(&self, t: usize) -> usize {
        t % (self.n + 1)
    }

    pub fn a(&self, t: usize) -> ArrowId {
        self.a[self.m(t)]
    }

    pub fn b(&self, t: usize) -> ArrowId {
        self.b[self.m(t)]
    }

    pub fn l(&self, t: usize, i: usize) -> ArrowId {
        self.l[self.m(t)][i]
    }

    pub fn path(&self, word: &[ArrowId]) -> Path {
        Path::from_word(&self.quiver, word).expect("composable word")
    }

    fn rel(&self, trunc: u32, plus: &[ArrowId], minus: &[ArrowId]) -> NCElement {
        let mut e = NCElement::zero(trunc);
        e.add_term(self.path(plus), Q::one());
        e.add_term(self.path(minus), -Q::one());
        e
    }

    /// Leads and tails of R as (lead word, tail word).
    pub fn rule_words(&self) -> Vec<(Vec<ArrowId>, Vec<ArrowId>)> {
        let nv = self.n + 1;
        let mut v = Vec::new();
        for t in 0..nv {
            for i in 0..nv {
                v.push((vec![self.l(t, i), self.a(t)], vec![self.a(t), self.l(t + 1, i)]));
                v.push((vec![self.l(t + 1, i), self.b(t)], vec![self.b(t), self.l(t, i)]));
            }
            v.push((vec![self.a(t), self.b(t)], vec![self.l(t, t)]));
            v.push((vec![self.b(t), self.a(t)], vec![self.l(t + 1, t)]));
            for i in 0..nv {
                for j in i + 1..nv {
                    v.push((vec![self.l(t, j), self.l(t, i)], vec![self.l(t, i), self.l(t, j)]));
                }
            }
        }
        v
    }

    /// The generators of I.
    pub fn relations(&self, trunc: u32) -> Vec<NCElement> {
        let nv = self.n + 1;
        let mut v = Vec::new();
        for t in 0..nv {
            for i in 0..nv {
                v.push(self.rel(trunc, &[self.l(t, i), self.a(t)], &[self.a(t), self.l(t + 1, i)]));
                v.push(self.rel(trunc, &[self.l(t + 1, i), self.b(t)], &[self.b(t), self.l(t, i)]));
                for j in i + 1..nv {
                    v.push(self.rel(trunc, &[self.l(t, i), self.l(t, j)], &[self.l(t, j), self.l(t, i)]));
                }
            }
            v.push(self.rel(trunc, &[self.a(t), self.b(t)], &[self.l(t, t)]));
            v.push(self.rel(trunc, &[self.b(t), self.a(t)], &[self.l(t + 1, t)]));
        }
        v
    }

    pub fn is_loop(&self, id: ArrowId) -> bool {
        self.quiver.arrow(id).weight == 2
    }

    pub fn is_a(&self, id: ArrowId) -> bool {
        self.a.contains(&id)
    }

    pub fn loop_index(&self, id: ArrowId) -> usize {
        (id as usize - 2 * (self.n + 1)) % (self.n + 1)
    }

    /// Membership in A_t ∪ B_t ∪ L_t ∪ A_tL_t ∪ B_tL_t for the head t of `p`.
    pub fn in_abl(&self, p: &Path) -> bool {
        let k = p.word.iter().position(|&x| self.is_loop(x)).unwrap_or(p.len());
        let (front, back) = p.word.split_at(k);
        let front_ok = front.iter().all(|&x| self.is_a(x)) || front.iter().all(|&x| !self.is_a(x));
        let back_ok = back.iter().all(|&x| self.is_loop(x))
            && back.windows(2).all(|w| self.loop_index(w[0]) <= self.loop_index(w[1]));
        front_ok && back_ok
    }
}

/// The reduction system R in the descending (weight, length, lex) order.
pub fn appendix_system(n: usize, trunc: u32) -> Result<(AppendixQuiver, ReductionSystem)> {
    let aq = AppendixQuiver::new(n)?;
    let rules = aq
        .rule_words()
        .into_iter()
        .map(|(lead, tail)| Rule { lead: aq.path(&lead), tail: NCElement::from_path(aq.path(&tail), Q::one(), trunc) })
        .collect();
    let sys = ReductionSystem::from_rules(aq.quiver.clone(), Orientation::Descending, trunc, rules);
    Ok((aq, sys))
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CheckReport {
    pub check: String,
    pub n: usize,
    #[serde(rename = "D")]
    pub d: u32,
    pub pass: bool,
    pub witnesses: Vec<String>,
}

fn report(check: &str, n: usize, d: u32, witnesses: Vec<String>) -> CheckReport {
    CheckReport { check: check.into(), n, d, pass: witnesses.is_empty(), witnesses }
}

/// Every overlap ambiguity of R resolves; also asserts R is interreduced.
pub fn check_overlaps(n: usize, d: u32) -> Result<CheckReport> {
    let (aq, sys) = appendix_system(n, d)?;
    let mut w = Vec::new();
    if !sys.is_interreduced() {
        w.push("R has a lead containing another lead".into());
    }
    for o in sys.overlaps() {
        let r = sys.check_resolvable(&o);
        if !r.resolvable {
            let full = o.p.concat(&o.q).and_then(|x| x.concat(&o.r)).unwrap();
            w.push(format!(
                "{}: {} vs {}",
                full.display(&aq.quiver),
                r.via_left.display(&aq.quiver),
                r.via_right.display(&aq.quiver)
            ));
        }
    }
    Ok(report("overlaps", n, d, w))
}

/// Number of overlap ambiguities of R below weight d.
pub fn overlap_count(n: usize, d: u32) -> Result<usize> {
    Ok(appendix_system(n, d)?.1.overlaps().len())
}

/// Irreducible paths found by brute force agree with the A/B/L description and with the engine.
pub fn check_basis(n: usize, d: u32) -> Result<CheckReport> {
    let (aq, sys) = appendix_system(n, d)?;
    let leads: Vec<Vec<ArrowId>> = sys.rules.iter().map(|r| r.lead.word.to_vec()).collect();
    let all = enumerate_paths(&aq.quiver, d, usize::MAX)?;
    let mut w = Vec::new();
    let mut brute = vec![0u64; d as usize];
    for p in &all {
        let irreducible = !leads.iter().any(|l| l.len() <= p.len() && p.word.windows(l.len()).any(|x| x == l.as_slice()));
        if irreducible {
            brute[p.wt as usize] += 1;
        }
        if irreducible != aq.in_abl(p) && w.len() < 10 {
            w.push(format!("{} irreducible={irreducible}", p.display(&aq.quiver)));
        }
    }
    let engine = sys.irreducible_counts();
    if engine != brute {
        w.push(format!("engine counts {engine:?} differ from brute force {brute:?}"));
    }
    Ok(report("basis", n, d, w))
}

/// dim P_{t,d} for every weight below the truncation.
pub fn graded_dims(sys: &ReductionSystem, t: usize) -> Vec<u64> {
    let mut v = vec![0u64; sys.trunc as usize];
    sys.walk_irreducible(&mut |p| {
        if p.head == t {
            v[p.wt as usize] += 1;
        }
    });
    v
}

/// E_d = dim of the degree-d piece of k[l_{0,1},…,l_{0,n−1}] with loops in weight 2.
pub fn e_dim(n: usize, d: i64) -> u64 {
    if d < 0 || d % 2 != 0 {
        return 0;
    }
    let k = (d / 2) as u64;
    if n == 1 {
        return u64::from(k == 0);
    }
    binomial(k + n as u64 - 2, n as u64 - 2)
}

/// D_d − 2D_{d+1} + 2D_{d+3} − D_{d+4} + E_{d+4} = 0 for −4 ≤ d ≤ D−5.
pub fn check_recursion(n: usize, d: u32) -> Result<CheckReport> {
    let (_, sys) = appendix_system(n, d)?;
    let dims = graded_dims(&sys, 0);
    let dd = |k: i64| -> i64 {
        if k < 0 {
            0
        } else {
            dims[k as usize] as i64
        }
    };
    let mut w = Vec::new();
    for k in -4..=(d as i64 - 5) {
        let v = dd(k) - 2 * dd(k + 1) + 2 * dd(k + 3) - dd(k + 4) + e_dim(n, k + 4) as i64;
        if v != 0 {
            w.push(format!("degree {k}: residual {v}"));
        }
    }
    for t in 1..=n {
        if graded_dims(&sys, t) != dims {
            w.push(format!("vertex {t} graded dims differ from vertex 0"));
        }
    }
    Ok(report("recursion", n, d, w))
}

struct GradedBasis {
    index: HashMap<Path, usize>,
    paths: Vec<Path>,
}

impl GradedBasis {
    fn new(sys: &ReductionSystem, head: usize, wt: i64) -> Self {
        let mut paths = Vec::new();
        if wt >= 0 {
            sys.walk_irreducible(&mut |p| {
                if p.head == head && p.wt as i64 == wt {
                    paths.push(p.clone());
                }
            });
        }
        paths.sort();
        let index = paths.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        GradedBasis { index, paths }
    }

    fn coords(&self, e: &NCElement, offset: usize) -> Option<SparseVec> {
        let mut v = SparseVec::new();
        for (p, c) in &e.terms {
            v.insert(offset + *self.index.get(p)?, c.clone());
        }
        Some(v)
    }
}

/// Exactness of 0 → P_0 → P_1⊕P_n → P_1⊕P_n → P_0 → k[l_{0,1..n−1}] → 0 in each degree.
pub fn check_exactness(n: usize, d: u32) -> Result<CheckReport> {
    let (aq, sys) = appendix_system(n, d)?;
    let word = |w: &[ArrowId]| aq.path(w);
    let mul = |x: &Path, w: &Path, c: Q| -> NCElement {
        let mut e = NCElement::zero(d);
        if let Some(p) = x.concat(w) {
            e.add_term(p, c);
        }
        sys.reduce(&e)
    };
    let mul_el = |x: &NCElement, w: &Path| sys.reduce(&x.right_mul_path(w));
    let a0 = word(&[aq.a(0)]);
    let bn = word(&[aq.b(n)]);
    let l1n = word(&[aq.l(1, n)]);
    let anan0 = word(&[aq.a(n), aq.a(0)]);
    let b0bn = word(&[aq.b(0), aq.b(n)]);
    let ln0 = word(&[aq.l(n, 0)]);
    let b0 = word(&[aq.b(0)]);
    let an = word(&[aq.a(n)]);
    let t_mono = |p: &Path| p.word.iter().all(|&x| aq.is_loop(x) && (1..n).contains(&aq.loop_index(x)));
    let mut w = Vec::new();
    for k in -4..=(d as i64 - 5) {
        let p0 = GradedBasis::new(&sys, 0, k);
        let b1 = GradedBasis::new(&sys, 1, k + 1);
        let bn1 = GradedBasis::new(&sys, n, k + 1);
        let c1 = GradedBasis::new(&sys, 1, k + 3);
        let cn = GradedBasis::new(&sys, n, k + 3);
        let p4 = GradedBasis::new(&sys, 0, k + 4);
        let t_idx: Vec<usize> = (0..p4.paths.len()).filter(|&i| t_mono(&p4.paths[i])).collect();
        let off_b = b1.paths.len();
        let off_c = c1.paths.len();
        let mut fail = |msg: String| w.push(format!("degree {k}: {msg}"));

        let d4: Vec<(NCElement, NCElement)> =
            p0.paths.iter().map(|f| (mul(f, &a0, Q::one()), mul(f, &bn, Q::one()))).collect();
        let d3 = |f: &NCElement, g: &NCElement| -> (NCElement, NCElement) {
            let x = mul_el(f, &l1n).sub(&mul_el(g, &anan0));
            let y = mul_el(g, &ln0).sub(&mul_el(f, &b0bn));
            (x, y)
        };
        let d2 = |f: &NCElement, g: &NCElement| mul_el(f, &b0).add(&mul_el(g, &an));
        let d1 = |e: &NCElement| -> SparseVec {
            t_idx
                .iter()
                .enumerate()
                .filter_map(|(j, &i)| {
                    let c = e.coeff(&p4.paths[i]);
                    (!c.is_zero()).then_some((j, c))
                })
                .collect()
        };
        let unit = |p: &Path| NCElement::from_path(p.clone(), Q::one(), d);
        let zero = NCElement::zero(d);

        let mut rows4 = Vec::new();
        for (x, y) in &d4 {
            let (Some(mut u), Some(v)) = (b1.coords(x, 0), bn1.coords(y, off_b)) else {
                fail("d4 image outside the basis".into());
                continue;
            };
            u.extend(v);
            rows4.push(u);
            let (s, t) = d3(x, y);
            if !s.is_zero() || !t.is_zero() {
                fail("d3∘d4 ≠ 0".into());
            }
        }
        let dom3: Vec<(NCElement, NCElement)> = b1
            .paths
            .iter()
            .map(|p| (unit(p), zero.clone()))
            .chain(bn1.paths.iter().map(|p| (zero.clone(), unit(p))))
            .collect();
        let mut rows3 = Vec::new();
        for (f, g) in &dom3 {
            let (x, y) = d3(f, g);
            let (Some(mut u), Some(v)) = (c1.coords(&x, 0), cn.coords(&y, off_c)) else {
                fail("d3 image outside the basis".into());
                continue;
            };
            u.extend(v);
            rows3.push(u);
            if !d2(&x, &y).is_zero() {
                fail("d2∘d3 ≠ 0".into());
            }
        }
        let dom2: Vec<(NCElement, NCElement)> = c1
            .paths
            .iter()
            .map(|p| (unit(p), zero.clone()))
            .chain(cn.paths.iter().map(|p| (zero.clone(), unit(p))))
            .collect();
        let mut rows2 = Vec::new();
        for (f, g) in &dom2 {
            let e = d2(f, g);
            match p4.coords(&e, 0) {
                Some(u) => rows2.push(u),
                None => fail("d2 image outside the basis".into()),
            }
            if !d1(&e).is_empty() {
                fail("d1∘d2 ≠ 0".into());
            }
        }
        let rows1: Vec<SparseVec> = p4.paths.iter().map(|p| d1(&unit(p))).collect();
        let (r4, r3, r2, r1) = (rank(rows4), rank(rows3), rank(rows2), rank(rows1));
        let dim_a = p0.paths.len();
        let dim_b = b1.paths.len() + bn1.paths.len();
        let dim_c = c1.paths.len() + cn.paths.len();
        let dim_p = p4.paths.len();
        let dim_t = e_dim(n, k + 4) as usize;
        if t_idx.len() != dim_t {
            fail(format!("T has {} basis monomials, expected {dim_t}", t_idx.len()));
        }
        if r4 != dim_a {
            fail(format!("d4 not injective: rank {r4} < {dim_a}"));
        }
        if dim_b - r3 != r4 {
            fail(format!("not exact at P1⊕Pn (first): ker {} vs im {r4}", dim_b - r3));
        }
        if dim_c - r2 != r3 {
            fail(format!("not exact at P1⊕Pn (second): ker {} vs im {r3}", dim_c - r2));
        }
        if dim_p - r1 != r2 {
            fail(format!("not exact at P0: ker {} vs im {r2}", dim_p - r1));
        }
        if r1 != dim_t {
            fail(format!("d1 not surjective: rank {r1} < {dim_t}"));
        }
    }
    Ok(report("exactness", n, d, w))
}

/// Completing the generators of I returns exactly R.
pub fn check_completion_fixpoint(n: usize, d: u32) -> Result<CheckReport> {
    let (aq, sys) = appendix_system(n, d)?;
    let done = ReductionSystem::complete(aq.quiver.clone(), Orientation::Descending, d, &aq.relations(d));
    let key = |s: &ReductionSystem| -> BTreeSet<(Vec<ArrowId>, Vec<(Vec<ArrowId>, String)>)> {
        s.rules
            .iter()
            .map(|r| {
                (
                    r.lead.word.to_vec(),
                    r.tail.terms.iter().map(|(p, c)| (p.word.to_vec(), c.to_string())).collect(),
                )
            })
            .collect()
    };
    let mut w = Vec::new();
    let (got, want) = (key(&done), key(&sys));
    for extra in got.difference(&want) {
        w.push(format!("completion produced rule with lead {}", aq.path(&extra.0).display(&aq.quiver)));
    }
    for missing in want.difference(&got) {
        w.push(format!("completion lacks rule with lead {}", aq.path(&missing.0).display(&aq.quiver)));
    }
    let again = ReductionSystem::complete(aq.quiver.clone(), Orientation::Descending, d, &done.rules.iter().map(|r| r.relation()).collect::<Vec<_>>());
    if key(&again) != got {
        w.push("completing the completed system changed it".into());
    }
    Ok(report("completion", n, d, w))
}
