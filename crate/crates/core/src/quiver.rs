use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{QpError, Result};

pub type ArrowId = u8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub tail: usize,
    pub head: usize,
    pub weight: u32,
}

/// A finite quiver with weighted arrows. Arrow ids give the letter order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub vertices: usize,
    pub arrows: Vec<Arrow>,
    out: Vec<Vec<ArrowId>>,
}

impl Quiver {
    pub fn new(vertices: usize, arrows: Vec<Arrow>) -> Result<Self> {
        if arrows.len() > ArrowId::MAX as usize {
            return Err(QpError::InvalidQuiver("too many arrows".into()));
        }
        let mut out = vec![Vec::new(); vertices];
        for (i, a) in arrows.iter().enumerate() {
            if a.tail >= vertices || a.head >= vertices {
                return Err(QpError::InvalidQuiver(format!("arrow {} out of range", a.name)));
            }
            out[a.tail].push(i as ArrowId);
        }
        Ok(Quiver { vertices, arrows, out })
    }

    pub fn arrow(&self, id: ArrowId) -> &Arrow {
        &self.arrows[id as usize]
    }

    pub fn out_arrows(&self, v: usize) -> &[ArrowId] {
        &self.out[v]
    }

    pub fn arrow_id(&self, name: &str) -> Result<ArrowId> {
        self.arrows
            .iter()
            .position(|a| a.name == name)
            .map(|i| i as ArrowId)
            .ok_or_else(|| QpError::UnknownArrow(name.to_string()))
    }

    pub fn is_unit_weight(&self) -> bool {
        self.arrows.iter().all(|a| a.weight == 1)
    }
}

/// One index position of Q_{n,I}: a loop at a vertex, or an arrow pair between two vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Loop { vertex: usize },
    Pair { left: usize },
}

/// The double A_n quiver Q_{n,I} with index positions 1..m (stored 0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverSpec {
    pub n: usize,
    pub loopless: BTreeSet<usize>,
    pub slots: Vec<Slot>,
    pub quiver: Arc<Quiver>,
    a_ids: Vec<ArrowId>,
    b_ids: Vec<Option<ArrowId>>,
}

impl QuiverSpec {
    /// `loopless` holds 1-based vertex indices.
    pub fn new(n: usize, loopless: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n == 0 {
            return Err(QpError::InvalidQuiver("n must be positive".into()));
        }
        let loopless: BTreeSet<usize> = loopless.into_iter().collect();
        if let Some(&v) = loopless.iter().find(|&&v| v == 0 || v > n) {
            return Err(QpError::InvalidQuiver(format!("loopless vertex {v} out of range")));
        }
        let mut slots = Vec::new();
        for k in 1..=n {
            if !loopless.contains(&k) {
                slots.push(Slot::Loop { vertex: k - 1 });
            }
            if k < n {
                slots.push(Slot::Pair { left: k - 1 });
            }
        }
        let mut arrows = Vec::new();
        let mut a_ids = Vec::new();
        let mut b_ids = Vec::new();
        for (i, s) in slots.iter().enumerate() {
            let idx = i + 1;
            match *s {
                Slot::Loop { vertex } => {
                    a_ids.push(arrows.len() as ArrowId);
                    b_ids.push(None);
                    arrows.push(Arrow { name: format!("a{idx}"), tail: vertex, head: vertex, weight: 1 });
                }
                Slot::Pair { left } => {
                    a_ids.push(arrows.len() as ArrowId);
                    arrows.push(Arrow { name: format!("a{idx}"), tail: left, head: left + 1, weight: 1 });
                    b_ids.push(Some(arrows.len() as ArrowId));
                    arrows.push(Arrow { name: format!("b{idx}"), tail: left + 1, head: left, weight: 1 });
                }
            }
        }
        let quiver = Arc::new(Quiver::new(n, arrows)?);
        Ok(QuiverSpec { n, loopless, slots, quiver, a_ids, b_ids })
    }

    /// Number of index positions, m = 2n - 1 - |I|.
    pub fn m(&self) -> usize {
        self.slots.len()
    }

    pub fn is_loop(&self, i: usize) -> bool {
        matches!(self.slots[i], Slot::Loop { .. })
    }

    pub fn a(&self, i: usize) -> ArrowId {
        self.a_ids[i]
    }

    pub fn b(&self, i: usize) -> Option<ArrowId> {
        self.b_ids[i]
    }

    /// Vertex carrying x_i.
    pub fn left_vertex(&self, i: usize) -> usize {
        match self.slots[i] {
            Slot::Loop { vertex } => vertex,
            Slot::Pair { left } => left,
        }
    }

    /// Vertex carrying x_i'.
    pub fn right_vertex(&self, i: usize) -> usize {
        match self.slots[i] {
            Slot::Loop { vertex } => vertex,
            Slot::Pair { left } => left + 1,
        }
    }

    /// Word of x_i (a_i b_i, or the loop a_i).
    pub fn x(&self, i: usize) -> Vec<ArrowId> {
        match self.b_ids[i] {
            Some(b) => vec![self.a_ids[i], b],
            None => vec![self.a_ids[i]],
        }
    }

    /// Word of x_i' (b_i a_i, or the loop a_i).
    pub fn xp(&self, i: usize) -> Vec<ArrowId> {
        match self.b_ids[i] {
            Some(b) => vec![b, self.a_ids[i]],
            None => vec![self.a_ids[i]],
        }
    }

    /// Slot index of an arrow and whether it is the `a` arrow.
    pub fn slot_of(&self, id: ArrowId) -> (usize, bool) {
        for i in 0..self.m() {
            if self.a_ids[i] == id {
                return (i, true);
            }
            if self.b_ids[i] == Some(id) {
                return (i, false);
            }
        }
        panic!("arrow id {id} not in quiver");
    }

    /// Slot index of the loop at a 0-based vertex.
    pub fn loop_slot(&self, vertex: usize) -> Option<usize> {
        self.slots.iter().position(|s| *s == Slot::Loop { vertex })
    }

    /// The full quiver Q_n.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(n, [])
    }
}
