use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::rational::{fmt_q, Q};

/// Polynomial in commuting variables x, y with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiPoly {
    pub terms: BTreeMap<(u32, u32), Q>,
}

/// One monomial c·x^i·y^j in JSON form.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct MonomialJson {
    pub x: u32,
    pub y: u32,
    pub coeff: String,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn constant(c: Q) -> Self {
        BiPoly::monomial(c, 0, 0)
    }

    pub fn monomial(c: Q, i: u32, j: u32) -> Self {
        let mut p = BiPoly::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn x() -> Self {
        BiPoly::monomial(Q::one(), 1, 0)
    }

    pub fn y() -> Self {
        BiPoly::monomial(Q::one(), 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> Q {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut r = self.clone();
        for (&(i, j), c) in &other.terms {
            r.add_term(i, j, c.clone());
        }
        r
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn neg(&self) -> BiPoly {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> BiPoly {
        let mut r = BiPoly::zero();
        for (&(i, j), d) in &self.terms {
            r.add_term(i, j, d * c);
        }
        r
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut r = BiPoly::zero();
        for (&(i, j), c) in &self.terms {
            for (&(k, l), d) in &other.terms {
                r.add_term(i + k, j + l, c * d);
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> BiPoly {
        let mut r = BiPoly::constant(Q::one());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Coefficients (of x, of y) of the degree-one part.
    pub fn linear_part(&self) -> (Q, Q) {
        (self.coeff(1, 0), self.coeff(0, 1))
    }

    pub fn has_constant_term(&self) -> bool {
        self.terms.contains_key(&(0, 0))
    }

    pub fn to_json(&self) -> Vec<MonomialJson> {
        self.terms.iter().map(|(&(x, y), c)| MonomialJson { x, y, coeff: fmt_q(c) }).collect()
    }

    /// Terms of increasing total degree, then decreasing x-exponent.
    fn display_order(&self) -> Vec<((u32, u32), &Q)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, c)| (*k, c)).collect();
        v.sort_by_key(|&((i, j), _)| (i + j, std::cmp::Reverse(i)));
        v
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, ((i, j), c)) in self.display_order().into_iter().enumerate() {
            let mono = match (i, j) {
                (0, 0) => String::new(),
                _ => {
                    let v = |s: &str, e: u32| match e {
                        0 => String::new(),
                        1 => s.to_string(),
                        _ => format!("{s}^{e}"),
                    };
                    format!("{}{}", v("x", i), v("y", j))
                }
            };
            let mag = c.abs();
            let coef = if mag.is_one() && !mono.is_empty() { String::new() } else { fmt_q(&mag) };
            let sign = if c.is_negative() { "-" } else if k > 0 { "+" } else { "" };
            write!(f, "{sign}{coef}{mono}")?;
        }
        Ok(())
    }
}

/// Rank of the span of the linear parts of two polynomials.
pub fn linear_rank(p: &BiPoly, q: &BiPoly) -> usize {
    let (a, b) = p.linear_part();
    let (c, d) = q.linear_part();
    if !(&a * &d - &b * &c).is_zero() {
        2
    } else if a.is_zero() && b.is_zero() && c.is_zero() && d.is_zero() {
        0
    } else {
        1
    }
}
