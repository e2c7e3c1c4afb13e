use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::error::{QpError, Result};
use crate::quiver::{ArrowId, Quiver};
use crate::rational::Q;

pub type Word = SmallVec<[ArrowId; 16]>;

/// A path read left to right, with its weight and end vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    pub wt: u32,
    pub tail: usize,
    pub head: usize,
    pub word: Word,
}

impl Path {
    pub fn idempotent(v: usize) -> Self {
        Path { wt: 0, tail: v, head: v, word: Word::new() }
    }

    pub fn arrow(q: &Quiver, id: ArrowId) -> Self {
        let a = q.arrow(id);
        let mut word = Word::new();
        word.push(id);
        Path { wt: a.weight, tail: a.tail, head: a.head, word }
    }

    pub fn from_word(q: &Quiver, word: &[ArrowId]) -> Result<Self> {
        let Some(&first) = word.first() else {
            return Err(QpError::Invalid("empty word needs a vertex".into()));
        };
        let mut p = Path::arrow(q, first);
        for &id in &word[1..] {
            let a = q.arrow(id);
            if a.tail != p.head {
                return Err(QpError::NotComposable(format!(
                    "{} then {}",
                    q.arrow(*p.word.last().unwrap()).name,
                    a.name
                )));
            }
            p.word.push(id);
            p.head = a.head;
            p.wt += a.weight;
        }
        Ok(p)
    }

    pub fn from_names(q: &Quiver, names: &[&str]) -> Result<Self> {
        let ids = names.iter().map(|n| q.arrow_id(n)).collect::<Result<Vec<_>>>()?;
        Path::from_word(q, &ids)
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn is_cycle(&self) -> bool {
        self.tail == self.head
    }

    /// Concatenation, or None when the ends do not match.
    pub fn concat(&self, other: &Path) -> Option<Path> {
        if self.head != other.tail {
            return None;
        }
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        Some(Path { wt: self.wt + other.wt, tail: self.tail, head: other.head, word })
    }

    /// Sub-path word[from..to] with its end vertices.
    pub fn sub(&self, q: &Quiver, from: usize, to: usize) -> Path {
        if from == to {
            let v = if from == 0 {
                self.tail
            } else {
                q.arrow(self.word[from - 1]).head
            };
            return Path::idempotent(v);
        }
        let w = &self.word[from..to];
        Path {
            wt: w.iter().map(|&a| q.arrow(a).weight).sum(),
            tail: q.arrow(w[0]).tail,
            head: q.arrow(w[w.len() - 1]).head,
            word: Word::from_slice(w),
        }
    }

    pub fn names(&self, q: &Quiver) -> Vec<String> {
        self.word.iter().map(|&a| q.arrow(a).name.clone()).collect()
    }

    pub fn display(&self, q: &Quiver) -> String {
        if self.word.is_empty() {
            format!("e{}", self.tail)
        } else {
            self.names(q).join("·")
        }
    }
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        self.wt
            .cmp(&other.wt)
            .then(self.word.len().cmp(&other.word.len()))
            .then_with(|| self.word.cmp(&other.word))
            .then(self.tail.cmp(&other.tail))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A truncated linear combination of paths: only terms of weight below `trunc` are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NCElement {
    pub terms: BTreeMap<Path, Q>,
    pub trunc: u32,
}

impl NCElement {
    pub fn zero(trunc: u32) -> Self {
        NCElement { terms: BTreeMap::new(), trunc }
    }

    pub fn from_path(p: Path, c: Q, trunc: u32) -> Self {
        let mut e = NCElement::zero(trunc);
        e.add_term(p, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, p: Path, c: Q) {
        if p.wt >= self.trunc || c.is_zero() {
            return;
        }
        match self.terms.entry(p) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coeff(&self, p: &Path) -> Q {
        self.terms.get(p).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_scaled(&mut self, other: &NCElement, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (p, x) in &other.terms {
            self.add_term(p.clone(), x * c);
        }
    }

    pub fn add(&self, other: &NCElement) -> NCElement {
        let mut r = self.clone();
        r.add_scaled(other, &Q::one());
        r
    }

    pub fn sub(&self, other: &NCElement) -> NCElement {
        let mut r = self.clone();
        r.add_scaled(other, &-Q::one());
        r
    }

    pub fn scale(&self, c: &Q) -> NCElement {
        let mut r = NCElement::zero(self.trunc);
        r.add_scaled(self, c);
        r
    }

    pub fn mul(&self, other: &NCElement) -> NCElement {
        let trunc = self.trunc.min(other.trunc);
        let mut r = NCElement::zero(trunc);
        for (p, x) in &self.terms {
            for (s, y) in &other.terms {
                if p.wt + s.wt >= trunc {
                    continue;
                }
                if let Some(ps) = p.concat(s) {
                    r.add_term(ps, x * y);
                }
            }
        }
        r
    }

    pub fn left_mul_path(&self, p: &Path) -> NCElement {
        let mut r = NCElement::zero(self.trunc);
        for (s, y) in &self.terms {
            if let Some(ps) = p.concat(s) {
                r.add_term(ps, y.clone());
            }
        }
        r
    }

    pub fn right_mul_path(&self, p: &Path) -> NCElement {
        let mut r = NCElement::zero(self.trunc);
        for (s, y) in &self.terms {
            if let Some(sp) = s.concat(p) {
                r.add_term(sp, y.clone());
            }
        }
        r
    }

    pub fn truncate(&self, trunc: u32) -> NCElement {
        let mut r = NCElement::zero(trunc);
        for (p, c) in &self.terms {
            r.add_term(p.clone(), c.clone());
        }
        r
    }

    pub fn min_term(&self) -> Option<(&Path, &Q)> {
        self.terms.iter().next()
    }

    pub fn max_term(&self) -> Option<(&Path, &Q)> {
        self.terms.iter().next_back()
    }

    /// Smallest weight of a stored term.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|p| p.wt).min()
    }

    pub fn display(&self, q: &Quiver) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(p, c)| format!("({})·{}", c, p.display(q)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.word.as_slice())
    }
}
