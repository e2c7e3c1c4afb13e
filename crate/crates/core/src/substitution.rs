use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{QpError, Result};
use crate::linalg::determinant;
use crate::path::{NCElement, Path};
use crate::potential::Potential;
use crate::quiver::{ArrowId, Quiver};
use crate::rational::Q;

/// An algebra endomorphism fixing vertices, given by the images of the arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    pub quiver: Arc<Quiver>,
    pub images: Vec<NCElement>,
    pub trunc: u32,
}

impl Substitution {
    pub fn identity(quiver: Arc<Quiver>, trunc: u32) -> Self {
        let images = (0..quiver.arrows.len())
            .map(|i| NCElement::from_path(Path::arrow(&quiver, i as ArrowId), Q::one(), trunc))
            .collect();
        Substitution { quiver, images, trunc }
    }

    /// Replaces the image of `a`; every term must run parallel to `a`.
    pub fn set(&mut self, a: ArrowId, image: NCElement) -> Result<()> {
        let arrow = self.quiver.arrow(a);
        for p in image.terms.keys() {
            if p.tail != arrow.tail || p.head != arrow.head {
                return Err(QpError::NotComposable(format!(
                    "image of {} runs {}→{}, expected {}→{}",
                    arrow.name, p.tail, p.head, arrow.tail, arrow.head
                )));
            }
        }
        self.images[a as usize] = image.truncate(self.trunc);
        Ok(())
    }

    /// a ↦ a + c·w for a single path w.
    pub fn add_to(&mut self, a: ArrowId, w: &Path, c: &Q) -> Result<()> {
        let mut img = self.images[a as usize].clone();
        img.add_term(w.clone(), c.clone());
        self.set(a, img)
    }

    /// Diagonal rescaling a ↦ k·a.
    pub fn scaling(quiver: Arc<Quiver>, trunc: u32, factors: &[(ArrowId, Q)]) -> Self {
        let mut s = Substitution::identity(quiver, trunc);
        for (a, k) in factors {
            let img = s.images[*a as usize].scale(k);
            s.images[*a as usize] = img;
        }
        s
    }

    pub fn apply_path(&self, p: &Path, trunc: u32) -> NCElement {
        self.apply_path_with(p, trunc, &self.fixed_arrows())
    }

    /// Arrows whose image is the arrow itself.
    fn fixed_arrows(&self) -> Vec<bool> {
        self.images
            .iter()
            .enumerate()
            .map(|(a, img)| {
                img.len() == 1 && {
                    let (p, c) = img.terms.iter().next().expect("one term");
                    c.is_one() && p.len() == 1 && p.word[0] as usize == a
                }
            })
            .collect()
    }

    fn apply_path_with(&self, p: &Path, trunc: u32, fixed: &[bool]) -> NCElement {
        if p.word.iter().all(|&a| fixed[a as usize]) {
            return NCElement::from_path(p.clone(), Q::one(), trunc);
        }
        let mut acc = NCElement::from_path(Path::idempotent(p.tail), Q::one(), trunc);
        for &a in &p.word {
            acc = if fixed[a as usize] {
                acc.right_mul_path(&Path::arrow(&self.quiver, a))
            } else {
                acc.mul(&self.images[a as usize])
            };
            if acc.is_zero() {
                break;
            }
        }
        acc.truncate(trunc)
    }

    pub fn apply_element(&self, x: &NCElement) -> NCElement {
        let trunc = x.trunc.min(self.trunc);
        let fixed = self.fixed_arrows();
        let mut r = x.truncate(trunc);
        let moved: Vec<(Path, Q)> = r
            .terms
            .iter()
            .filter(|(p, _)| p.word.iter().any(|&a| !fixed[a as usize]))
            .map(|(p, c)| (p.clone(), c.clone()))
            .collect();
        for (p, _) in &moved {
            r.terms.remove(p);
        }
        for (p, c) in &moved {
            r.add_scaled(&self.apply_path_with(p, trunc, &fixed), c);
        }
        r
    }

    /// Coefficient of arrow `b` in the image of arrow `a`, as a square matrix.
    pub fn linear_part(&self) -> Vec<Vec<Q>> {
        let n = self.quiver.arrows.len();
        let mut m = vec![vec![Q::zero(); n]; n];
        for (a, img) in self.images.iter().enumerate() {
            for (p, c) in &img.terms {
                if p.len() == 1 {
                    m[a][p.word[0] as usize] = c.clone();
                }
            }
        }
        m
    }

    pub fn is_invertible(&self) -> bool {
        !determinant(&self.linear_part()).is_zero()
    }

    pub fn is_unitriangular(&self) -> bool {
        let m = self.linear_part();
        m.iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, c)| if i == j { c.is_one() } else { c.is_zero() }))
    }

    /// Least i with every correction term in m^{i+1}; None when there is no correction.
    pub fn depth(&self) -> Option<u32> {
        let mut best: Option<u32> = None;
        for img in &self.images {
            for p in img.terms.keys() {
                if p.len() >= 2 {
                    let d = p.len() as u32 - 1;
                    best = Some(best.map_or(d, |b| b.min(d)));
                }
            }
        }
        best
    }

    pub fn is_identity(&self) -> bool {
        *self == Substitution::identity(self.quiver.clone(), self.trunc)
    }

    pub fn display(&self) -> Vec<(String, String)> {
        self.images
            .iter()
            .enumerate()
            .map(|(i, img)| (self.quiver.arrows[i].name.clone(), img.display(&self.quiver)))
            .collect()
    }
}

/// The image of a potential, re-canonicalized.
pub fn apply_substitution(f: &Potential, s: &Substitution) -> Result<Potential> {
    if *f.spec.quiver != *s.quiver {
        return Err(QpError::QuiverMismatch);
    }
    Potential::from_element(f.spec.clone(), &s.apply_element(&f.elem))
}

/// The composite s2∘s1, sending a to s2(s1(a)).
pub fn compose(s1: &Substitution, s2: &Substitution) -> Result<Substitution> {
    if *s1.quiver != *s2.quiver {
        return Err(QpError::QuiverMismatch);
    }
    let trunc = s1.trunc.min(s2.trunc);
    let images = s1.images.iter().map(|img| s2.apply_element(&img.truncate(trunc))).collect();
    Ok(Substitution { quiver: s1.quiver.clone(), images, trunc })
}
