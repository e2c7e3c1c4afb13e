use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::path::{NCElement, Path, Word};
use crate::quiver::{ArrowId, Quiver};
use crate::rational::Q;

/// Which end of the term order is the leading monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// Lead is the least term: the local order of complete path algebras.
    Ascending,
    /// Lead is the greatest term: the order of graded, weight-homogeneous systems.
    Descending,
}

/// A rewriting rule lead → tail, standing for the relation lead − tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lead: Path,
    pub tail: NCElement,
}

impl Rule {
    pub fn relation(&self) -> NCElement {
        let mut r = self.tail.scale(&-Q::one());
        r.add_term(self.lead.clone(), Q::one());
        r
    }
}

/// An overlap ambiguity: p·q is the lead of `left`, q·r is the lead of `right`.
#[derive(Clone, Debug)]
pub struct Overlap {
    pub left: usize,
    pub right: usize,
    pub p: Path,
    pub q: Path,
    pub r: Path,
}

#[derive(Clone, Debug)]
pub struct Resolution {
    pub resolvable: bool,
    pub via_left: NCElement,
    pub via_right: NCElement,
}

#[derive(Clone, Debug)]
pub struct ReductionSystem {
    pub quiver: Arc<Quiver>,
    pub orientation: Orientation,
    pub trunc: u32,
    pub rules: Vec<Rule>,
    pub killed: Vec<bool>,
    index: HashMap<Word, usize>,
    lens: Vec<usize>,
}

impl ReductionSystem {
    pub fn empty(quiver: Arc<Quiver>, orientation: Orientation, trunc: u32) -> Self {
        let killed = vec![false; quiver.vertices];
        ReductionSystem { quiver, orientation, trunc, rules: Vec::new(), killed, index: HashMap::new(), lens: Vec::new() }
    }

    /// A system from explicit rules, as given.
    pub fn from_rules(quiver: Arc<Quiver>, orientation: Orientation, trunc: u32, rules: Vec<Rule>) -> Self {
        let mut s = Self::empty(quiver, orientation, trunc);
        s.rules = rules;
        s.rebuild();
        s
    }

    fn rebuild(&mut self) {
        self.index.clear();
        let mut lens: Vec<usize> = Vec::new();
        for (i, r) in self.rules.iter().enumerate() {
            self.index.insert(r.lead.word.clone(), i);
            if !lens.contains(&r.lead.len()) {
                lens.push(r.lead.len());
            }
        }
        lens.sort_unstable();
        self.lens = lens;
    }

    pub fn max_lead_len(&self) -> usize {
        self.lens.last().copied().unwrap_or(0)
    }

    pub fn lead_of(&self, e: &NCElement) -> Option<(Path, Q)> {
        let t = match self.orientation {
            Orientation::Ascending => e.min_term(),
            Orientation::Descending => e.max_term(),
        };
        t.map(|(p, c)| (p.clone(), c.clone()))
    }

    pub fn touches_killed(&self, p: &Path) -> bool {
        if !self.killed.iter().any(|&k| k) {
            return false;
        }
        self.killed[p.tail] || p.word.iter().any(|&a| self.killed[self.quiver.arrow(a).head])
    }

    /// Leftmost occurrence of a lead inside `word`: (rule index, position).
    pub fn find_lead(&self, word: &[ArrowId]) -> Option<(usize, usize)> {
        for pos in 0..word.len() {
            for &l in &self.lens {
                if pos + l > word.len() {
                    break;
                }
                if let Some(&i) = self.index.get(&word[pos..pos + l]) {
                    return Some((i, pos));
                }
            }
        }
        None
    }

    fn all_leads(&self, word: &[ArrowId]) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for pos in 0..word.len() {
            for &l in &self.lens {
                if pos + l > word.len() {
                    break;
                }
                if let Some(&i) = self.index.get(&word[pos..pos + l]) {
                    v.push((i, pos));
                }
            }
        }
        v
    }

    /// True when some lead is a suffix of `word`.
    fn suffix_is_lead(&self, word: &[ArrowId]) -> bool {
        let n = word.len();
        self.lens.iter().any(|&l| l <= n && self.index.contains_key(&word[n - l..]))
    }

    fn substitute(&self, p: &Path, rule: usize, pos: usize, c: &Q, into: &mut BTreeMap<Path, Q>) {
        let r = &self.rules[rule];
        let q = &self.quiver;
        let prefix = p.sub(q, 0, pos);
        let suffix = p.sub(q, pos + r.lead.len(), p.len());
        for (t, tc) in &r.tail.terms {
            let w = prefix.wt + t.wt + suffix.wt;
            if w >= self.trunc {
                continue;
            }
            let np = prefix.concat(t).and_then(|x| x.concat(&suffix)).expect("rule tail parallel to lead");
            if self.touches_killed(&np) {
                continue;
            }
            let e = into.entry(np.clone()).or_insert_with(Q::zero);
            *e += c * tc;
            if e.is_zero() {
                into.remove(&np);
            }
        }
    }

    /// Normal form modulo the rules; terms of weight at least `trunc` vanish.
    pub fn reduce(&self, x: &NCElement) -> NCElement {
        let mut work: BTreeMap<Path, Q> = BTreeMap::new();
        for (p, c) in &x.terms {
            if p.wt < self.trunc && !self.touches_killed(p) {
                work.insert(p.clone(), c.clone());
            }
        }
        let mut out = NCElement::zero(self.trunc);
        loop {
            let next = match self.orientation {
                Orientation::Ascending => work.pop_first(),
                Orientation::Descending => work.pop_last(),
            };
            let Some((p, c)) = next else { break };
            match self.find_lead(&p.word) {
                Some((ri, pos)) => self.substitute(&p, ri, pos, &c, &mut work),
                None => out.add_term(p, c),
            }
        }
        out
    }

    /// Reduction along an externally chosen schedule: `choose(n)` picks one of n options.
    pub fn reduce_with(&self, x: &NCElement, choose: &mut dyn FnMut(usize) -> usize) -> NCElement {
        let mut work: BTreeMap<Path, Q> = BTreeMap::new();
        for (p, c) in &x.terms {
            if p.wt < self.trunc && !self.touches_killed(p) {
                work.insert(p.clone(), c.clone());
            }
        }
        loop {
            let reducible: Vec<Path> = work.keys().filter(|p| self.find_lead(&p.word).is_some()).cloned().collect();
            if reducible.is_empty() {
                break;
            }
            let p = reducible[choose(reducible.len())].clone();
            let c = work.remove(&p).unwrap();
            let occ = self.all_leads(&p.word);
            let (ri, pos) = occ[choose(occ.len())];
            self.substitute(&p, ri, pos, &c, &mut work);
        }
        let mut out = NCElement::zero(self.trunc);
        for (p, c) in work {
            out.add_term(p, c);
        }
        out
    }

    fn make_rule(&self, r: &NCElement) -> Rule {
        let (lead, c) = self.lead_of(r).expect("nonzero relation");
        let mut tail = NCElement::zero(self.trunc);
        let inv = -Q::one() / &c;
        for (p, x) in &r.terms {
            if *p != lead {
                tail.add_term(p.clone(), x * &inv);
            }
        }
        Rule { lead, tail }
    }

    /// Overlaps between the leads of rules i and j, in that order.
    pub fn overlaps_between(&self, i: usize, j: usize) -> Vec<Overlap> {
        let a = &self.rules[i].lead;
        let b = &self.rules[j].lead;
        let q = &self.quiver;
        let mut v = Vec::new();
        for k in 1..a.len().min(b.len()) {
            if a.word[a.len() - k..] == b.word[..k] {
                let ov = a.sub(q, a.len() - k, a.len());
                if a.wt + b.wt - ov.wt >= self.trunc {
                    continue;
                }
                v.push(Overlap {
                    left: i,
                    right: j,
                    p: a.sub(q, 0, a.len() - k),
                    q: ov,
                    r: b.sub(q, k, b.len()),
                });
            }
        }
        v
    }

    pub fn overlaps(&self) -> Vec<Overlap> {
        let mut v = Vec::new();
        for i in 0..self.rules.len() {
            for j in 0..self.rules.len() {
                v.extend(self.overlaps_between(i, j));
            }
        }
        v
    }

    /// The two one-step reducts of p·q·r.
    pub fn reducts(&self, o: &Overlap) -> (NCElement, NCElement) {
        let via_left = self.rules[o.left].tail.right_mul_path(&o.r).truncate(self.trunc);
        let via_right = self.rules[o.right].tail.left_mul_path(&o.p).truncate(self.trunc);
        (via_left, via_right)
    }

    pub fn check_resolvable(&self, o: &Overlap) -> Resolution {
        let (l, r) = self.reducts(o);
        let via_left = self.reduce(&l);
        let via_right = self.reduce(&r);
        Resolution { resolvable: via_left == via_right, via_left, via_right }
    }

    fn spoly(&self, o: &Overlap) -> NCElement {
        let (l, r) = self.reducts(o);
        l.sub(&r)
    }

    /// True when no lead is a sub-path of another lead.
    pub fn is_interreduced(&self) -> bool {
        for (i, a) in self.rules.iter().enumerate() {
            for (j, b) in self.rules.iter().enumerate() {
                if i != j && b.lead.len() <= a.lead.len() && a.lead.word.windows(b.lead.len()).any(|w| w == b.lead.word.as_slice()) {
                    return false;
                }
            }
        }
        true
    }

    /// Per-weight counts of irreducible paths below `trunc`.
    pub fn irreducible_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.trunc as usize];
        self.walk_irreducible(&mut |p| counts[p.wt as usize] += 1);
        counts
    }

    pub fn irreducible_paths(&self) -> Vec<Path> {
        let mut v = Vec::new();
        self.walk_irreducible(&mut |p| v.push(p.clone()));
        v
    }

    pub fn walk_irreducible(&self, visit: &mut dyn FnMut(&Path)) {
        let q = &self.quiver;
        for v in 0..q.vertices {
            if self.killed[v] {
                continue;
            }
            let e = Path::idempotent(v);
            if self.trunc == 0 {
                continue;
            }
            visit(&e);
            let mut stack = vec![e];
            while let Some(p) = stack.pop() {
                for &a in q.out_arrows(p.head) {
                    let arrow = q.arrow(a);
                    if self.killed[arrow.head] || p.wt + arrow.weight >= self.trunc {
                        continue;
                    }
                    let mut np = p.clone();
                    np.word.push(a);
                    np.head = arrow.head;
                    np.wt += arrow.weight;
                    if self.suffix_is_lead(&np.word) {
                        continue;
                    }
                    visit(&np);
                    stack.push(np);
                }
            }
        }
    }

    /// Reduces every tail to normal form.
    pub fn interreduce_tails(&mut self) {
        let tails: Vec<NCElement> = self.rules.iter().map(|r| self.reduce(&r.tail)).collect();
        for (r, t) in self.rules.iter_mut().zip(tails) {
            r.tail = t;
        }
    }

    fn kill(&mut self, v: usize, queue: &mut VecDeque<NCElement>) {
        self.killed[v] = true;
        for r in self.rules.drain(..) {
            queue.push_back(r.relation());
        }
        self.rebuild();
    }

    /// Inserts a reduced nonzero relation as a rule, queueing displaced rules and new S-elements.
    fn insert(&mut self, r: NCElement, queue: &mut VecDeque<NCElement>) {
        let rule = self.make_rule(&r);
        if rule.lead.is_empty() {
            let v = rule.lead.tail;
            self.kill(v, queue);
            return;
        }
        let lw = rule.lead.word.clone();
        let (keep, displaced): (Vec<Rule>, Vec<Rule>) = self
            .rules
            .drain(..)
            .partition(|old| !old.lead.word.windows(lw.len()).any(|w| w == lw.as_slice()));
        self.rules = keep;
        for d in displaced {
            queue.push_back(d.relation());
        }
        self.rules.push(rule);
        self.rebuild();
        let new = self.rules.len() - 1;
        for j in 0..self.rules.len() {
            let mut ovs = self.overlaps_between(new, j);
            if j != new {
                ovs.extend(self.overlaps_between(j, new));
            }
            for o in ovs {
                let s = self.reduce(&self.spoly(&o));
                if !s.is_zero() {
                    queue.push_back(s);
                }
            }
        }
    }

    /// Completion of the ideal generated by `generators` modulo weight `trunc`.
    pub fn complete(quiver: Arc<Quiver>, orientation: Orientation, trunc: u32, generators: &[NCElement]) -> Self {
        let mut sys = Self::empty(quiver, orientation, trunc);
        let mut queue: VecDeque<NCElement> = generators.iter().map(|g| g.truncate(trunc)).collect();
        loop {
            while let Some(g) = queue.pop_front() {
                let r = sys.reduce(&g);
                if !r.is_zero() {
                    sys.insert(r, &mut queue);
                }
            }
            for o in sys.overlaps() {
                let s = sys.reduce(&sys.spoly(&o));
                if !s.is_zero() {
                    queue.push_back(s);
                }
            }
            if queue.is_empty() {
                break;
            }
        }
        sys.interreduce_tails();
        sys
    }

    /// True when every overlap resolves.
    pub fn is_confluent(&self) -> bool {
        self.overlaps().iter().all(|o| self.check_resolvable(o).resolvable)
    }
}
