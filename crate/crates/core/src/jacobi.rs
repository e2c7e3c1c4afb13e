use std::collections::HashMap;
use std::sync::Arc;

use num_traits::One;

use crate::error::{QpError, Result};
use crate::linalg::{Echelon, SparseVec};
use crate::path::{NCElement, Path};
use crate::potential::{cyclic_derivative_to, Potential};
use crate::quiver::{ArrowId, Quiver, QuiverSpec};
use crate::rational::Q;
use crate::rewrite::{Orientation, ReductionSystem};

/// The cyclic derivatives of a potential, one relation per arrow.
#[derive(Clone, Debug)]
pub struct JacobiPresentation {
    pub spec: Arc<QuiverSpec>,
    pub relations: Vec<(ArrowId, NCElement)>,
    pub source: Potential,
}

pub fn jacobi(f: &Potential) -> JacobiPresentation {
    jacobi_to(f, f.trunc().saturating_sub(1))
}

pub fn jacobi_to(f: &Potential, trunc: u32) -> JacobiPresentation {
    let relations = (0..f.spec.quiver.arrows.len() as ArrowId)
        .map(|a| (a, cyclic_derivative_to(f, a, trunc)))
        .collect();
    JacobiPresentation { spec: f.spec.clone(), relations, source: f.clone() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimStatus {
    Exact,
    LowerBound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimReport {
    pub status: DimStatus,
    pub dim: u64,
    pub per_degree: Vec<u64>,
    pub truncation: u32,
}

impl DimReport {
    pub fn is_exact(&self) -> bool {
        self.status == DimStatus::Exact
    }
}

/// Relations of Jac(f)/⟨e_v : v ∈ quotient⟩ modulo weight `trunc`; vertices are 1-based.
pub fn generators(f: &Potential, trunc: u32, quotient: &[usize]) -> Result<Vec<NCElement>> {
    let mut gens: Vec<NCElement> = jacobi_to(f, trunc).relations.into_iter().map(|(_, r)| r).collect();
    for &v in quotient {
        if v == 0 || v > f.spec.n {
            return Err(QpError::Invalid(format!("vertex {v} out of range")));
        }
        gens.push(NCElement::from_path(Path::idempotent(v - 1), Q::one(), trunc));
    }
    Ok(gens)
}

/// Completed system for the Jacobi ideal plus vertex idempotents, modulo weight `trunc`.
pub fn jacobi_system(f: &Potential, trunc: u32, quotient: &[usize]) -> Result<ReductionSystem> {
    let gens = generators(f, trunc, quotient)?;
    Ok(ReductionSystem::complete(f.spec.quiver.clone(), Orientation::Ascending, trunc, &gens))
}

/// Number of top degrees that must carry no irreducible paths for an exact report.
/// A vanishing degree D−1 already gives m^{D−1} ⊆ I + m^D, hence m^{D−1} ⊆ Ī by Nakayama.
pub const CERTIFICATE_WINDOW: usize = 2;

/// Graded dimensions of Jac(f)/m^D with the stabilization certificate.
pub fn jdim(f: &Potential, d: u32, quotient: &[usize]) -> Result<DimReport> {
    let sys = jacobi_system(f, d, quotient)?;
    let counts = sys.irreducible_counts();
    let w = CERTIFICATE_WINDOW.min(d as usize);
    let quiet_top = counts[d as usize - w..].iter().all(|&c| c == 0);
    let mut status = DimStatus::LowerBound;
    if quiet_top {
        let sys2 = jacobi_system(f, d + 2, quotient)?;
        let counts2 = sys2.irreducible_counts();
        let same = counts2[..d as usize] == counts[..] && counts2[d as usize..].iter().all(|&c| c == 0);
        if same {
            status = DimStatus::Exact;
        }
    }
    Ok(DimReport { status, dim: counts.iter().sum(), per_degree: counts, truncation: d })
}

pub fn max_paths() -> usize {
    std::env::var("QP_MAX_PATHS").ok().and_then(|s| s.parse().ok()).unwrap_or(20000)
}

/// All paths of weight below `trunc`, sorted in the term order.
pub fn enumerate_paths(q: &Quiver, trunc: u32, limit: usize) -> Result<Vec<Path>> {
    let mut out = Vec::new();
    if trunc == 0 {
        return Ok(out);
    }
    let mut stack: Vec<Path> = (0..q.vertices).map(Path::idempotent).collect();
    while let Some(p) = stack.pop() {
        for &a in q.out_arrows(p.head) {
            let arrow = q.arrow(a);
            if p.wt + arrow.weight < trunc {
                let mut np = p.clone();
                np.word.push(a);
                np.head = arrow.head;
                np.wt += arrow.weight;
                stack.push(np);
            }
        }
        out.push(p);
        if out.len() > limit {
            return Err(QpError::TooManyPaths(limit));
        }
    }
    out.sort();
    Ok(out)
}

/// Graded dimensions of kQ/(I + m^D) by linear algebra over the space of all paths.
pub fn oracle_counts(q: &Quiver, gens: &[NCElement], trunc: u32) -> Result<Vec<u64>> {
    let paths = enumerate_paths(q, trunc, max_paths())?;
    let index: HashMap<&Path, usize> = paths.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let to_vec = |e: &NCElement| -> SparseVec {
        e.terms.iter().filter(|(p, _)| p.wt < trunc).map(|(p, c)| (index[p], c.clone())).collect()
    };
    let arrows: Vec<Path> = (0..q.arrows.len() as ArrowId).map(|a| Path::arrow(q, a)).collect();
    let mut ech = Echelon::new();
    let mut queue: Vec<SparseVec> = gens.iter().map(to_vec).collect();
    while let Some(v) = queue.pop() {
        let Some(row) = ech.insert(v) else { continue };
        for a in &arrows {
            let mut left = SparseVec::new();
            let mut right = SparseVec::new();
            for (&i, c) in &row {
                let p = &paths[i];
                if p.wt + a.wt >= trunc {
                    continue;
                }
                if let Some(ap) = a.concat(p) {
                    left.insert(index[&ap], c.clone());
                }
                if let Some(pa) = p.concat(a) {
                    right.insert(index[&pa], c.clone());
                }
            }
            if !left.is_empty() {
                queue.push(left);
            }
            if !right.is_empty() {
                queue.push(right);
            }
        }
    }
    let mut counts = vec![0u64; trunc as usize];
    for p in &paths {
        counts[p.wt as usize] += 1;
    }
    for &i in ech.pivots() {
        counts[paths[i].wt as usize] -= 1;
    }
    Ok(counts)
}

/// dim Jac(f)/m^D computed without the rewriting engine.
pub fn jdim_oracle(f: &Potential, d: u32) -> Result<u64> {
    Ok(jdim_oracle_counts(f, d, &[])?.iter().sum())
}

pub fn jdim_oracle_counts(f: &Potential, d: u32, quotient: &[usize]) -> Result<Vec<u64>> {
    let gens = generators(f, d, quotient)?;
    oracle_counts(&f.spec.quiver, &gens, d)
}

#[derive(Clone, Debug)]
pub struct Commutativity {
    pub commutative: bool,
    /// The first pair of cycles whose commutator survives, with the reduced commutator.
    pub witness: Option<(Path, Path, NCElement)>,
    /// Whether the truncation was certified exact for the underlying algebra.
    pub certified: bool,
    pub cycles_checked: usize,
}

/// Pairwise commutators of irreducible cycles at vertex `i` (1-based) up to length `gen`.
pub fn vertex_commutativity(f: &Potential, i: usize, d: u32, gen: usize) -> Result<Commutativity> {
    if i == 0 || i > f.spec.n {
        return Err(QpError::Invalid(format!("vertex {i} out of range")));
    }
    let v = i - 1;
    let sys = jacobi_system(f, d, &[])?;
    let mut cycles: Vec<Path> = Vec::new();
    sys.walk_irreducible(&mut |p| {
        if p.tail == v && p.head == v && !p.is_empty() && p.len() <= gen {
            cycles.push(p.clone());
        }
    });
    cycles.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.word.cmp(&b.word)));
    let counts = sys.irreducible_counts();
    let w = CERTIFICATE_WINDOW.min(d as usize);
    let certified = counts[d as usize - w..].iter().all(|&c| c == 0);
    for (k, u) in cycles.iter().enumerate() {
        for w in &cycles[k + 1..] {
            let mut c = NCElement::zero(d);
            if let Some(uw) = u.concat(w) {
                c.add_term(uw, Q::one());
            }
            if let Some(wu) = w.concat(u) {
                c.add_term(wu, -Q::one());
            }
            let r = sys.reduce(&c);
            if !r.is_zero() {
                return Ok(Commutativity {
                    commutative: false,
                    witness: Some((u.clone(), w.clone(), r)),
                    certified,
                    cycles_checked: cycles.len(),
                });
            }
        }
    }
    Ok(Commutativity { commutative: true, witness: None, certified, cycles_checked: cycles.len() })
}

/// Total dimension with the dimensions after deleting the first and the last vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub total: DimReport,
    pub first: DimReport,
    pub last: DimReport,
}

impl Fingerprint {
    pub fn is_exact(&self) -> bool {
        self.total.is_exact() && self.first.is_exact() && self.last.is_exact()
    }

    /// (dim, sorted pair of quotient dims) when all three are exact.
    pub fn values(&self) -> Option<(u64, [u64; 2])> {
        if !self.is_exact() {
            return None;
        }
        let mut pair = [self.first.dim, self.last.dim];
        pair.sort_unstable();
        Some((self.total.dim, pair))
    }
}

pub fn fingerprint(f: &Potential, d: u32) -> Result<Fingerprint> {
    let n = f.spec.n;
    Ok(Fingerprint { total: jdim(f, d, &[])?, first: jdim(f, d, &[1])?, last: jdim(f, d, &[n])? })
}

