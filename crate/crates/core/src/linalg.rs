use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::rational::Q;

pub type SparseVec = BTreeMap<usize, Q>;

pub fn determinant(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= &piv;
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

/// Row echelon form over sparse vectors; each row is keyed by its least index, which is its pivot.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: HashMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &usize> {
        self.rows.keys()
    }

    /// Eliminates pivot entries from the front until the least index is not a pivot.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        while let Some((&k, c)) = v.iter().next() {
            let Some(row) = self.rows.get(&k) else {
                break;
            };
            let c = c.clone();
            axpy(&mut v, row, &-c);
        }
        v
    }

    /// Adds `v` to the span; returns the reduced monic row when it is new.
    pub fn insert(&mut self, v: SparseVec) -> Option<SparseVec> {
        let v = self.reduce(v);
        let (&k, c) = v.iter().next()?;
        let inv = Q::one() / c;
        let row: SparseVec = v.into_iter().map(|(i, x)| (i, x * &inv)).collect();
        self.rows.insert(k, row.clone());
        Some(row)
    }

    /// Full reduction: every pivot index is cleared, not only the leading one.
    pub fn reduce_full(&self, v: SparseVec) -> SparseVec {
        let mut v = v;
        let mut done = SparseVec::new();
        while let Some((k, c)) = v.pop_first() {
            match self.rows.get(&k) {
                Some(row) => {
                    let c2 = c.clone();
                    for (i, x) in row.iter().skip(1) {
                        let e = v.entry(*i).or_insert_with(Q::zero);
                        *e -= &c2 * x;
                        if e.is_zero() {
                            v.remove(i);
                        }
                    }
                }
                None => {
                    done.insert(k, c);
                }
            }
        }
        done
    }
}

pub fn axpy(v: &mut SparseVec, row: &SparseVec, c: &Q) {
    for (i, x) in row {
        let e = v.entry(*i).or_insert_with(Q::zero);
        *e += c * x;
        if e.is_zero() {
            v.remove(i);
        }
    }
}

pub fn rank(rows: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Some solution of a·x = b with free variables set to zero.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        let inv = Q::one() / &m[r][c];
        for k in c..=cols {
            m[r][k] = &m[r][k] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..=cols {
                    let t = &f * &m[r][k];
                    m[i][k] -= t;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}
