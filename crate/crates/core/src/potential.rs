use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{QpError, Result};
use crate::path::{NCElement, Path, Word};
use crate::quiver::{ArrowId, Quiver, QuiverSpec};
use crate::rational::Q;

/// Least rotation of a nonempty cyclic word.
pub fn min_rotation(word: &[ArrowId]) -> Word {
    let n = word.len();
    let mut best = 0;
    for s in 1..n {
        for k in 0..n {
            let a = word[(s + k) % n];
            let b = word[(best + k) % n];
            if a != b {
                if a < b {
                    best = s;
                }
                break;
            }
        }
    }
    (0..n).map(|k| word[(best + k) % n]).collect()
}

/// Rotation of a cycle so that it starts at position `start`.
pub fn rotate(q: &Quiver, p: &Path, start: usize) -> Path {
    let n = p.len();
    let word: Word = (0..n).map(|k| p.word[(start + k) % n]).collect();
    let v = q.arrow(word[0]).tail;
    Path { wt: p.wt, tail: v, head: v, word }
}

/// The canonical representative of the cyclic class of `p`.
pub fn canonicalize(q: &Quiver, p: &Path) -> Result<Path> {
    if !p.is_cycle() {
        return Err(QpError::NotCyclic(p.display(q)));
    }
    if p.is_empty() {
        return Err(QpError::NotCyclic("trivial path".into()));
    }
    let word = min_rotation(&p.word);
    let v = q.arrow(word[0]).tail;
    Ok(Path { wt: p.wt, tail: v, head: v, word })
}

/// Degree bookkeeping of a cycle on Q_{n,I}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleClass {
    pub representative: Path,
    /// Occurrence counts of a_i, indexed by slot.
    pub t: Vec<u32>,
    pub xdeg: u32,
    /// Least and greatest slot with nonzero count (0-based).
    pub l: usize,
    pub r: usize,
}

impl CycleClass {
    pub fn of(spec: &QuiverSpec, p: &Path) -> Result<Self> {
        let representative = canonicalize(&spec.quiver, p)?;
        let mut t = vec![0u32; spec.m()];
        for &a in &representative.word {
            let (i, is_a) = spec.slot_of(a);
            if is_a {
                t[i] += 1;
            }
        }
        let xdeg = t.iter().sum();
        let l = t.iter().position(|&c| c > 0).unwrap_or(0);
        let r = t.iter().rposition(|&c| c > 0).unwrap_or(0);
        Ok(CycleClass { representative, t, xdeg, l, r })
    }

    pub fn length(&self) -> usize {
        self.r - self.l + 1
    }
}

/// A potential: canonical cycle classes with rational coefficients, truncated at path weight `trunc`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Potential {
    pub spec: Arc<QuiverSpec>,
    pub elem: NCElement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selector {
    Xdeg(u32),
    XdegBelow(u32),
    /// Cycles with l(c) = i and r(c) = j (0-based slots).
    Block(usize, usize),
    /// Cycles with l(c) <= s <= r(c).
    Through(usize),
}

impl Potential {
    pub fn zero(spec: Arc<QuiverSpec>, trunc: u32) -> Self {
        Potential { spec, elem: NCElement::zero(trunc) }
    }

    pub fn trunc(&self) -> u32 {
        self.elem.trunc
    }

    pub fn quiver(&self) -> &Quiver {
        &self.spec.quiver
    }

    /// Canonicalizes every cyclic term of `e`; non-cyclic terms are rejected, trivial paths dropped.
    pub fn from_element(spec: Arc<QuiverSpec>, e: &NCElement) -> Result<Self> {
        let mut f = Potential::zero(spec, e.trunc);
        for (p, c) in &e.terms {
            if p.is_empty() {
                continue;
            }
            let cp = canonicalize(&f.spec.quiver, p)?;
            f.elem.add_term(cp, c.clone());
        }
        Ok(f)
    }

    pub fn add_word(&mut self, word: &[ArrowId], c: Q) -> Result<()> {
        let p = Path::from_word(&self.spec.quiver, word)?;
        let cp = canonicalize(&self.spec.quiver, &p)?;
        self.elem.add_term(cp, c);
        Ok(())
    }

    pub fn add(&self, other: &Potential) -> Potential {
        Potential { spec: self.spec.clone(), elem: self.elem.add(&other.elem) }
    }

    pub fn sub(&self, other: &Potential) -> Potential {
        Potential { spec: self.spec.clone(), elem: self.elem.sub(&other.elem) }
    }

    pub fn scale(&self, c: &Q) -> Potential {
        Potential { spec: self.spec.clone(), elem: self.elem.scale(c) }
    }

    pub fn truncate(&self, trunc: u32) -> Potential {
        Potential { spec: self.spec.clone(), elem: self.elem.truncate(trunc) }
    }

    pub fn is_zero(&self) -> bool {
        self.elem.is_zero()
    }

    pub fn coeff_of_word(&self, word: &[ArrowId]) -> Q {
        match Path::from_word(&self.spec.quiver, word).and_then(|p| canonicalize(&self.spec.quiver, &p)) {
            Ok(p) => self.elem.coeff(&p),
            Err(_) => Q::zero(),
        }
    }

    /// Reduced: the path-length-two component vanishes.
    pub fn is_reduced(&self) -> bool {
        self.elem.terms.keys().all(|p| p.len() != 2)
    }

    pub fn classes(&self) -> Vec<(CycleClass, Q)> {
        self.elem
            .terms
            .iter()
            .map(|(p, c)| (CycleClass::of(&self.spec, p).expect("canonical cycle"), c.clone()))
            .collect()
    }

    pub fn project(&self, sel: Selector) -> Potential {
        let mut r = Potential::zero(self.spec.clone(), self.trunc());
        for (cl, c) in self.classes() {
            let keep = match sel {
                Selector::Xdeg(d) => cl.xdeg == d,
                Selector::XdegBelow(d) => cl.xdeg < d,
                Selector::Block(i, j) => cl.l == i && cl.r == j,
                Selector::Through(s) => cl.l <= s && s <= cl.r,
            };
            if keep {
                r.elem.add_term(cl.representative, c);
            }
        }
        r
    }

    pub fn display(&self) -> String {
        self.elem.display(&self.spec.quiver)
    }
}

/// Cyclic derivative with respect to arrow `a`, kept below weight `trunc`.
pub fn cyclic_derivative_to(f: &Potential, a: ArrowId, trunc: u32) -> NCElement {
    let q = &f.spec.quiver;
    let arrow = q.arrow(a);
    let mut r = NCElement::zero(trunc);
    for (p, c) in &f.elem.terms {
        let n = p.len();
        for i in 0..n {
            if p.word[i] != a {
                continue;
            }
            let word: Word = (1..n).map(|k| p.word[(i + k) % n]).collect();
            let path = if word.is_empty() {
                Path::idempotent(arrow.head)
            } else {
                Path::from_word(q, &word).expect("rotation of a cycle composes")
            };
            r.add_term(path, c.clone());
        }
    }
    r
}

/// Cyclic derivative truncated one below the potential's truncation.
pub fn cyclic_derivative(f: &Potential, a: ArrowId) -> NCElement {
    cyclic_derivative_to(f, a, f.trunc().saturating_sub(1))
}

/// Cyclic derivative by arrow name.
pub fn cyclic_derivative_named(f: &Potential, name: &str) -> Result<NCElement> {
    let a = f.spec.quiver.arrow_id(name)?;
    Ok(cyclic_derivative(f, a))
}

/// Sum of a·∂_a(f) over all arrows, canonicalized.
pub fn euler_sum(f: &Potential) -> Result<Potential> {
    let q = &f.spec.quiver;
    let mut acc = NCElement::zero(f.trunc());
    for id in 0..q.arrows.len() as ArrowId {
        let d = cyclic_derivative_to(f, id, f.trunc());
        let ap = Path::arrow(q, id);
        acc = acc.add(&d.left_mul_path(&ap));
    }
    Potential::from_element(f.spec.clone(), &acc)
}

pub fn coefficient_map(f: &Potential) -> BTreeMap<Vec<String>, Q> {
    f.elem.terms.iter().map(|(p, c)| (p.names(&f.spec.quiver), c.clone())).collect()
}
