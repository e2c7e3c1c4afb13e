use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{QpError, Result};
use crate::path::{NCElement, Path};
use crate::potential::{canonicalize, CycleClass, Potential};
use crate::quiver::{ArrowId, QuiverSpec};
use crate::rational::{fmt_q, Q};
use crate::substitution::{apply_substitution, compose, Substitution};

/// κ_{ij}: 1-based index position i and exponent j ≥ 2.
pub type Kappa = BTreeMap<(usize, usize), Q>;

/// Σ x_i'x_{i+1} + Σ κ_{ij} x_i^j on a quiver Q_{n,I}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialTypeA {
    pub spec: Arc<QuiverSpec>,
    pub kappa: Kappa,
}

/// Word of x_i' x_{i+1} for a 0-based position i.
pub fn middle_word(spec: &QuiverSpec, i: usize) -> Vec<ArrowId> {
    let mut w = spec.xp(i);
    w.extend(spec.x(i + 1));
    w
}

/// Word of x_i^j for a 0-based position i.
pub fn power_word(spec: &QuiverSpec, i: usize, j: usize) -> Vec<ArrowId> {
    spec.x(i).repeat(j)
}

fn canonical_word(spec: &QuiverSpec, w: &[ArrowId]) -> Path {
    let p = Path::from_word(&spec.quiver, w).expect("composable word");
    canonicalize(&spec.quiver, &p).expect("cycle")
}

impl MonomialTypeA {
    pub fn new(spec: Arc<QuiverSpec>, kappa: Kappa) -> Result<Self> {
        for &(i, j) in kappa.keys() {
            if i == 0 || i > spec.m() || j < 2 {
                return Err(QpError::Invalid(format!("kappa index ({i},{j}) out of range")));
            }
        }
        let kappa = kappa.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(MonomialTypeA { spec, kappa })
    }

    pub fn kappa(&self, i: usize, j: usize) -> Q {
        self.kappa.get(&(i, j)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn to_potential(&self, trunc: u32) -> Potential {
        let spec = &self.spec;
        let mut f = Potential::zero(spec.clone(), trunc);
        for i in 0..spec.m().saturating_sub(1) {
            f.add_word(&middle_word(spec, i), Q::one()).expect("middle term");
        }
        for (&(i, j), c) in &self.kappa {
            f.add_word(&power_word(spec, i - 1, j), c.clone()).expect("power term");
        }
        f
    }

    /// Reads κ from a potential already in monomialized form with unit middle coefficients.
    pub fn from_potential(f: &Potential) -> Result<Self> {
        let spec = &f.spec;
        let middles: BTreeMap<Path, usize> =
            (0..spec.m().saturating_sub(1)).map(|i| (canonical_word(spec, &middle_word(spec, i)), i)).collect();
        let mut kappa = Kappa::new();
        let mut seen = vec![false; spec.m().saturating_sub(1)];
        for (cl, c) in f.classes() {
            if let Some(&i) = middles.get(&cl.representative) {
                if !c.is_one() {
                    return Err(QpError::Invalid(format!("middle term {} has coefficient {}", i + 1, fmt_q(&c))));
                }
                seen[i] = true;
            } else if cl.length() == 1 && cl.xdeg >= 2 {
                kappa.insert((cl.l + 1, cl.xdeg as usize), c);
            } else {
                return Err(QpError::Invalid(format!("term {} is not monomial", cl.representative.display(&spec.quiver))));
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(QpError::Invalid(format!("middle term {} missing", i + 1)));
        }
        MonomialTypeA::new(spec.clone(), kappa)
    }

    /// κ_{s2} = 0 at every loop position s.
    pub fn is_reduced(&self) -> bool {
        (0..self.spec.m()).all(|s| !self.spec.is_loop(s) || self.kappa(s + 1, 2).is_zero())
    }

    pub fn kappa_json(&self) -> Vec<KappaJson> {
        self.kappa.iter().map(|(&(i, j), c)| KappaJson { i, j, coeff: fmt_q(c) }).collect()
    }
}

/// One κ entry in JSON form.
#[derive(Clone, Debug, Serialize, serde::Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct KappaJson {
    pub i: usize,
    pub j: usize,
    pub coeff: String,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub enum TypeAVerdict {
    ReducedTypeA,
    TypeA,
    No,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TypeACheck {
    pub verdict: TypeAVerdict,
    /// 1-based i with x_i'x_{i+1} absent.
    pub missing: Vec<usize>,
    /// Terms of degree below two.
    pub low_degree: Vec<String>,
    /// 1-based loop positions carrying a square term.
    pub loop_squares: Vec<usize>,
}

/// Coefficient of x_i'x_{i+1} for 0-based i.
pub fn middle_coefficient(f: &Potential, i: usize) -> Q {
    f.coeff_of_word(&middle_word(&f.spec, i))
}

pub fn is_type_a(f: &Potential) -> TypeACheck {
    let spec = &f.spec;
    let missing: Vec<usize> =
        (0..spec.m().saturating_sub(1)).filter(|&i| middle_coefficient(f, i).is_zero()).map(|i| i + 1).collect();
    let mut low_degree = Vec::new();
    for (cl, _) in f.classes() {
        if cl.xdeg < 2 {
            low_degree.push(cl.representative.display(&spec.quiver));
        }
    }
    let loop_squares: Vec<usize> = (0..spec.m())
        .filter(|&s| spec.is_loop(s) && !f.coeff_of_word(&power_word(spec, s, 2)).is_zero())
        .map(|s| s + 1)
        .collect();
    let verdict = if !missing.is_empty() || !low_degree.is_empty() {
        TypeAVerdict::No
    } else if loop_squares.is_empty() {
        TypeAVerdict::ReducedTypeA
    } else {
        TypeAVerdict::TypeA
    };
    TypeACheck { verdict, missing, low_degree, loop_squares }
}

fn require_type_a(f: &Potential) -> Result<()> {
    let check = is_type_a(f);
    if check.verdict == TypeAVerdict::No {
        return Err(QpError::OutOfScope(format!(
            "not Type A (missing middle terms {:?}, degree-one terms {:?})",
            check.missing, check.low_degree
        )));
    }
    Ok(())
}

/// Rescales arrows so that every x_i'x_{i+1} has coefficient 1: a_i ↦ k_i a_i, k_1 = 1, k_{i+1} = 1/(k_iλ_i).
pub fn rescale_middle(f: &Potential) -> Result<(Potential, Substitution)> {
    let spec = &f.spec;
    let mut k = vec![Q::one()];
    for i in 0..spec.m().saturating_sub(1) {
        let lambda = middle_coefficient(f, i);
        if lambda.is_zero() {
            return Err(QpError::OutOfScope(format!("middle term {} missing", i + 1)));
        }
        let next = (&k[i] * lambda).recip();
        k.push(next);
    }
    k.truncate(spec.m());
    let factors: Vec<(ArrowId, Q)> = k.into_iter().enumerate().map(|(i, c)| (spec.a(i), c)).collect();
    let s = Substitution::scaling(spec.quiver.clone(), f.trunc(), &factors);
    Ok((apply_substitution(f, &s)?, s))
}

/// One coordinate change performed during monomialization.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PassLog {
    pub degree: u32,
    pub arrow: String,
    pub term: String,
    pub coeff: String,
}

#[derive(Clone, Debug)]
pub struct Monomialized {
    pub result: MonomialTypeA,
    pub potential: Potential,
    /// Composite coordinate change carrying the input to `potential`.
    pub substitution: Substitution,
    pub passes: Vec<PassLog>,
}

fn is_middle(spec: &QuiverSpec, cl: &CycleClass) -> bool {
    cl.xdeg == 2 && cl.r == cl.l + 1 && cl.t[cl.l] == 1 && cl.t[cl.r] == 1 && {
        let w = canonical_word(spec, &middle_word(spec, cl.l));
        w == cl.representative
    }
}

/// Non-monomial terms other than the middle terms.
fn offending(f: &Potential) -> Vec<(CycleClass, Q)> {
    f.classes().into_iter().filter(|(cl, _)| cl.length() > 1 && !is_middle(&f.spec, cl)).collect()
}

const MAX_PASSES: usize = 200_000;

/// Substitution a ↦ a + c·w.
fn single(f: &Potential, a: ArrowId, w: &[ArrowId], c: &Q) -> Result<Substitution> {
    let mut s = Substitution::identity(f.spec.quiver.clone(), f.trunc());
    s.add_to(a, &Path::from_word(&f.spec.quiver, w)?, c)?;
    Ok(s)
}

/// Arrow and correction word w such that a ↦ a − λw cancels λ·c against a middle term.
fn higher_pass(f: &Potential, cl: &CycleClass) -> Result<(ArrowId, Vec<ArrowId>)> {
    let spec = &f.spec;
    let r = cl.r;
    let s = r - 1;
    let word = &cl.representative.word;
    let len = word.len();
    let rot = |k: usize| -> Vec<ArrowId> { (0..len).map(|i| word[(k + i) % len]).collect() };
    let xr = spec.x(r);
    if let Some(bs) = spec.b(s) {
        let as_ = spec.a(s);
        for k in 0..len {
            let w = rot(k);
            if !w.starts_with(&xr) || w[len - 1] != as_ {
                continue;
            }
            let mut pos = 0;
            let mut n = 0;
            while w[pos..].starts_with(&xr) {
                pos += xr.len();
                n += 1;
            }
            if w[pos] != bs {
                continue;
            }
            let mut image: Vec<ArrowId> = w[pos + 1..].to_vec();
            for _ in 1..n {
                image.extend(&xr);
            }
            return Ok((as_, image));
        }
        Err(QpError::Invalid(format!("no x-block decomposition of {}", cl.representative.display(&spec.quiver))))
    } else {
        let as_ = spec.a(s);
        for k in 0..len {
            let w = rot(k);
            if w.ends_with(&xr) {
                return Ok((as_, w[..len - xr.len()].to_vec()));
            }
        }
        Err(QpError::Invalid(format!("no x_r factor in {}", cl.representative.display(&spec.quiver))))
    }
}

/// Rescaling and degree-two passes until the degree-two part is Σx_i'x_{i+1} + Σκ_{i2}x_i².
fn degree_two(f: &Potential, total: &mut Substitution, passes: &mut Vec<PassLog>) -> Result<Potential> {
    let spec = f.spec.clone();
    let mut g = f.clone();
    for _ in 0..(spec.m() + 4) {
        let (h, s) = rescale_middle(&g)?;
        *total = compose(total, &s)?;
        g = h;
        let mut changed = false;
        for s in 1..spec.m().saturating_sub(1) {
            if !spec.is_loop(s) {
                continue;
            }
            let mut w = spec.xp(s - 1);
            w.extend(spec.x(s + 1));
            let lambda = g.coeff_of_word(&w);
            if lambda.is_zero() {
                continue;
            }
            let image = spec.xp(s - 1);
            let sub = single(&g, spec.a(s), &image, &-lambda.clone())?;
            passes.push(PassLog {
                degree: 2,
                arrow: spec.quiver.arrow(spec.a(s)).name.clone(),
                term: canonical_word(&spec, &w).display(&spec.quiver),
                coeff: fmt_q(&lambda),
            });
            g = apply_substitution(&g, &sub)?;
            *total = compose(total, &sub)?;
            changed = true;
        }
        let unit = (0..spec.m().saturating_sub(1)).all(|i| middle_coefficient(&g, i).is_one());
        if !changed && unit {
            return Ok(g);
        }
    }
    Err(QpError::Ceiling("degree-two normalization did not settle".into()))
}

/// Right-equivalence to Σx_i'x_{i+1} + Σκ_{ij}x_i^j modulo paths of length ≥ d.
pub fn monomialize(f: &Potential, d: u32) -> Result<Monomialized> {
    require_type_a(f)?;
    let spec = f.spec.clone();
    let f0 = f.truncate(d);
    let mut total = Substitution::identity(spec.quiver.clone(), d);
    let mut passes = Vec::new();
    let mut g = degree_two(&f0, &mut total, &mut passes)?;
    let mut subs: Vec<Substitution> = Vec::new();
    for _ in 0..MAX_PASSES {
        let off = offending(&g);
        let Some(deg) = off.iter().map(|(cl, _)| cl.xdeg).min() else {
            let result = MonomialTypeA::from_potential(&g)?;
            let substitution = compose(&total, &fold_passes(&spec, d, &subs)?)?;
            return Ok(Monomialized { result, potential: g, substitution, passes });
        };
        if deg < 3 {
            return Err(QpError::Invalid(format!("degree-two term survived: {}", off[0].0.representative.display(&spec.quiver))));
        }
        let (cl, lambda) = off
            .iter()
            .filter(|(cl, _)| cl.xdeg == deg)
            .max_by(|(a, _), (b, _)| (a.r, a.t[a.r]).cmp(&(b.r, b.t[b.r])).then(b.representative.cmp(&a.representative)))
            .cloned()
            .expect("nonempty");
        let (arrow, image) = higher_pass(&g, &cl)?;
        let sub = single(&g, arrow, &image, &-lambda.clone())?;
        let next = apply_substitution(&g, &sub)?;
        if !next.elem.coeff(&cl.representative).is_zero() {
            return Err(QpError::Invalid(format!("pass failed to cancel {}", cl.representative.display(&spec.quiver))));
        }
        let below = |h: &Potential| h.project(crate::potential::Selector::XdegBelow(deg));
        if below(&next) != below(&g) {
            return Err(QpError::Invalid("pass changed lower degrees".into()));
        }
        passes.push(PassLog {
            degree: deg,
            arrow: spec.quiver.arrow(arrow).name.clone(),
            term: cl.representative.display(&spec.quiver),
            coeff: fmt_q(&lambda),
        });
        g = next;
        subs.push(sub);
    }
    Err(QpError::Ceiling(format!("monomialization exceeded {MAX_PASSES} passes")))
}

/// The composite of the passes in order, built from the last one backwards so that each step only touches one arrow.
fn fold_passes(spec: &QuiverSpec, d: u32, subs: &[Substitution]) -> Result<Substitution> {
    let mut acc = Substitution::identity(spec.quiver.clone(), d);
    for s in subs.iter().rev() {
        acc = compose(s, &acc)?;
    }
    Ok(acc)
}

/// Arrow map between two quivers of the same n, matching equal index positions.
fn arrow_map(from: &QuiverSpec, to: &QuiverSpec) -> Vec<Option<ArrowId>> {
    let mut map = vec![None; from.quiver.arrows.len()];
    for (i, slot) in from.slots.iter().enumerate() {
        if let Some(j) = to.slots.iter().position(|s| s == slot) {
            map[from.a(i) as usize] = Some(to.a(j));
            if let (Some(b), Some(c)) = (from.b(i), to.b(j)) {
                map[b as usize] = Some(c);
            }
        }
    }
    map
}

/// Relabels the terms of `f` avoiding unmapped arrows onto `to`.
fn relabel(f: &Potential, to: &Arc<QuiverSpec>) -> Result<Potential> {
    let map = arrow_map(&f.spec, to);
    let mut g = Potential::zero(to.clone(), f.trunc());
    for (p, c) in &f.elem.terms {
        let w: Option<Vec<ArrowId>> = p.word.iter().map(|&a| map[a as usize]).collect();
        if let Some(w) = w {
            g.add_word(&w, c.clone())?;
        }
    }
    Ok(g)
}

/// u = x_{t−1}' + x_{t+1} at the loop position t, omitting absent ends.
fn loop_partner(spec: &QuiverSpec, t: usize, trunc: u32) -> Result<NCElement> {
    let mut u = NCElement::zero(trunc);
    if t > 0 {
        u.add_term(Path::from_word(&spec.quiver, &spec.xp(t - 1))?, Q::one());
    }
    if t + 1 < spec.m() {
        u.add_term(Path::from_word(&spec.quiver, &spec.x(t + 1))?, Q::one());
    }
    Ok(u)
}

/// Adds a loop at a loopless 1-based vertex: relabel, subtract ½x_t², then x_t ↦ x_t − x_{t−1}' − x_{t+1}.
pub fn add_loop(f: &Potential, vertex: usize) -> Result<Potential> {
    let spec = &f.spec;
    if !spec.loopless.contains(&vertex) {
        return Err(QpError::Invalid(format!("vertex {vertex} already carries a loop")));
    }
    let loopless: Vec<usize> = spec.loopless.iter().copied().filter(|&v| v != vertex).collect();
    let big = Arc::new(QuiverSpec::new(spec.n, loopless)?);
    let t = big.loop_slot(vertex - 1).expect("new loop");
    let mut g = relabel(f, &big)?;
    let at = big.a(t);
    let u = loop_partner(&big, t, f.trunc())?;
    let mut sq = Potential::zero(big.clone(), f.trunc());
    sq.add_word(&[at, at], -Q::one() / Q::from_integer(2.into()))?;
    let mut s = Substitution::identity(big.quiver.clone(), f.trunc());
    let img = s.images[at as usize].sub(&u);
    s.set(at, img)?;
    g = g.add(&apply_substitution(&sq, &s)?);
    Ok(g)
}

/// Iterated `add_loop` over every loopless vertex, landing on Q_n.
pub fn add_all_loops(f: &Potential) -> Result<Potential> {
    let mut g = f.clone();
    for v in f.spec.loopless.iter().copied().collect::<Vec<_>>() {
        g = add_loop(&g, v)?;
    }
    Ok(g)
}

type Series = Vec<Q>;

fn series_mul(a: &Series, b: &Series) -> Series {
    let k = a.len();
    let mut r = vec![Q::zero(); k];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(k - i) {
            r[i + j] += x * y;
        }
    }
    r
}

fn series_pow(a: &Series, e: usize) -> Series {
    let mut r = vec![Q::zero(); a.len()];
    r[0] = Q::one();
    for _ in 0..e {
        r = series_mul(&r, a);
    }
    r
}

/// Coefficients F_k of the reduced part F(u) = u·z + Σκ_j z^j, where u + Σ jκ_j z^{j−1} = 0.
pub fn elimination_series(kappa: &BTreeMap<usize, Q>, order: usize) -> Result<Series> {
    let k2 = kappa.get(&2).cloned().unwrap_or_else(Q::zero);
    if k2.is_zero() {
        return Err(QpError::Invalid("loop square coefficient is zero".into()));
    }
    let len = order + 1;
    let mut u = vec![Q::zero(); len];
    if len > 1 {
        u[1] = Q::one();
    }
    let mut z = vec![Q::zero(); len];
    let denom = Q::from_integer(2.into()) * &k2;
    for _ in 0..len {
        let mut rhs = u.clone();
        for (&j, c) in kappa.range(3..) {
            let p = series_pow(&z, j - 1);
            let jc = Q::from_integer((j as i64).into()) * c;
            for (x, y) in rhs.iter_mut().zip(p) {
                *x += &jc * y;
            }
        }
        z = rhs.into_iter().map(|x| -x / &denom).collect();
    }
    let mut big_f = series_mul(&u, &z);
    for (&j, c) in kappa {
        let p = series_pow(&z, j);
        for (x, y) in big_f.iter_mut().zip(p) {
            *x += c * y;
        }
    }
    Ok(big_f)
}

/// Removes the loop at a 1-based vertex with κ_{s2} ≠ 0 by solving ∂_{x_s} f = 0 for x_s, then re-monomializes.
pub fn eliminate_loop(f: &MonomialTypeA, vertex: usize, d: u32) -> Result<Monomialized> {
    let spec = &f.spec;
    let s = spec
        .loop_slot(vertex.wrapping_sub(1))
        .ok_or_else(|| QpError::Invalid(format!("vertex {vertex} has no loop")))?;
    let series: BTreeMap<usize, Q> =
        f.kappa.iter().filter(|(&(i, _), _)| i == s + 1).map(|(&(_, j), c)| (j, c.clone())).collect();
    let big_f = elimination_series(&series, d as usize / 2 + 1)?;
    let mut loopless: Vec<usize> = spec.loopless.iter().copied().collect();
    loopless.push(vertex);
    let small = Arc::new(QuiverSpec::new(spec.n, loopless)?);
    let full = f.to_potential(d);
    let a_s = spec.a(s);
    let mut rest = Potential::zero(spec.clone(), d);
    for (p, c) in &full.elem.terms {
        if !p.word.contains(&a_s) {
            rest.elem.add_term(p.clone(), c.clone());
        }
    }
    let mut g = relabel(&rest, &small)?;
    let map = arrow_map(spec, &small);
    let u_big = loop_partner(spec, s, d)?;
    let mut u = NCElement::zero(d);
    for (p, c) in &u_big.terms {
        let w: Vec<ArrowId> = p.word.iter().map(|&a| map[a as usize].expect("neighbour arrow")).collect();
        u.add_term(Path::from_word(&small.quiver, &w)?, c.clone());
    }
    if !u.is_zero() {
        let mut power = u.clone();
        for coeff in big_f.iter().skip(1) {
            if power.is_zero() {
                break;
            }
            if !coeff.is_zero() {
                g = g.add(&Potential::from_element(small.clone(), &power.scale(coeff))?);
            }
            power = power.mul(&u);
        }
    }
    if small.m() == 0 {
        let result = MonomialTypeA::new(small.clone(), Kappa::new())?;
        let substitution = Substitution::identity(small.quiver.clone(), d);
        return Ok(Monomialized { result, potential: g, substitution, passes: Vec::new() });
    }
    monomialize(&g, d)
}
