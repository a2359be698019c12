//! Label monoids `ℕ^k` and the uniform labeling fc-multicategories `S_E` and
//! `S_E^red`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{is_profile_loop, DirectedGraph, EdgeId, EdgePath, ProfileLoop};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonoidElem(pub Vec<u32>);

impl MonoidElem {
    pub fn zero(rank: usize) -> Self {
        MonoidElem(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Sum of coordinates; the quantity truncation bounds.
    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for MonoidElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Componentwise sum. Never truncates.
pub fn add(a: &MonoidElem, b: &MonoidElem) -> Result<MonoidElem> {
    if a.rank() != b.rank() {
        return Err(Error::RankMismatch { left: a.rank(), right: b.rank() });
    }
    Ok(MonoidElem(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect()))
}

/// Every ordered pair `(β', β'')` with `β' + β'' = β`, in lexicographic order
/// of `β'`. There are `∏(β_i + 1)` of them.
pub fn decompose(beta: &MonoidElem) -> Vec<(MonoidElem, MonoidElem)> {
    let mut out = vec![(Vec::new(), Vec::new())];
    for &c in &beta.0 {
        let mut next = Vec::with_capacity(out.len() * (c as usize + 1));
        for (l, r) in &out {
            for k in 0..=c {
                let mut l2: Vec<u32> = l.clone();
                let mut r2: Vec<u32> = r.clone();
                l2.push(k);
                r2.push(c - k);
                next.push((l2, r2));
            }
        }
        out = next;
    }
    out.into_iter().map(|(l, r)| (MonoidElem(l), MonoidElem(r))).collect()
}

/// `(ℕ^rank, +, 0)` with an enumeration cap on coordinate sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelMonoid {
    pub rank: usize,
    pub truncation: u32,
}

impl LabelMonoid {
    pub fn new(rank: usize, truncation: u32) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Usage("label monoid rank must be positive".into()));
        }
        Ok(LabelMonoid { rank, truncation })
    }

    /// The trivial monoid: rank one, truncated at zero.
    pub fn trivial() -> Self {
        LabelMonoid { rank: 1, truncation: 0 }
    }

    pub fn zero(&self) -> MonoidElem {
        MonoidElem::zero(self.rank)
    }

    pub fn within(&self, b: &MonoidElem) -> bool {
        b.rank() == self.rank && b.weight() <= self.truncation
    }

    /// All elements with coordinate sum at most `max_weight`, ordered by
    /// weight then lexicographically.
    pub fn elements_upto(&self, max_weight: u32) -> Vec<MonoidElem> {
        let mut out = Vec::new();
        for w in 0..=max_weight {
            let mut cur = Vec::with_capacity(self.rank);
            compositions(self.rank, w, &mut cur, &mut out);
        }
        out
    }

    pub fn elements(&self) -> Vec<MonoidElem> {
        self.elements_upto(self.truncation)
    }

    pub fn elem(&self, coords: &[u32]) -> Result<MonoidElem> {
        if coords.len() != self.rank {
            return Err(Error::RankMismatch { left: self.rank, right: coords.len() });
        }
        Ok(MonoidElem(coords.to_vec()))
    }
}

fn compositions(parts: usize, total: u32, cur: &mut Vec<u32>, out: &mut Vec<MonoidElem>) {
    if parts == 1 {
        cur.push(total);
        out.push(MonoidElem(cur.clone()));
        cur.pop();
        return;
    }
    for k in (0..=total).rev() {
        cur.push(k);
        compositions(parts - 1, total - k, cur, out);
        cur.pop();
    }
}

/// `S_E` (every profile-loop labeled by the whole monoid) or, when
/// `reduced`, `S_E^red` (θ removed over empty-input profile-loops).
#[derive(Clone, Debug, PartialEq)]
pub struct LabelingFc {
    pub graph: Arc<DirectedGraph>,
    pub monoid: LabelMonoid,
    pub reduced: bool,
}

impl LabelingFc {
    pub fn new(graph: Arc<DirectedGraph>, monoid: LabelMonoid, reduced: bool) -> Self {
        LabelingFc { graph, monoid, reduced }
    }

    /// Whether `beta` is a 2-cell of the labeling over `l`.
    pub fn admits(&self, l: &ProfileLoop, beta: &MonoidElem) -> bool {
        self.monoid.within(beta) && !(self.reduced && l.inputs.is_empty() && beta.is_zero())
    }

    pub fn fiber(&self, l: &ProfileLoop) -> Vec<MonoidElem> {
        self.fiber_over(&l.inputs, l.output)
    }

    /// Labels over arbitrary boundary data; empty unless it is a profile-loop.
    pub fn fiber_over(&self, inputs: &EdgePath, output: EdgeId) -> Vec<MonoidElem> {
        if !matches!(is_profile_loop(&self.graph, inputs, output), Ok(true)) {
            return Vec::new();
        }
        let mut els = self.monoid.elements();
        if self.reduced && inputs.is_empty() {
            els.retain(|b| !b.is_zero());
        }
        els
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(c: &[u32]) -> MonoidElem {
        MonoidElem(c.to_vec())
    }

    #[test]
    fn addition() {
        assert_eq!(add(&e(&[0]), &e(&[0])).unwrap(), e(&[0]));
        assert_eq!(add(&e(&[1, 0]), &e(&[0, 2])).unwrap(), e(&[1, 2]));
        assert!(matches!(add(&e(&[1]), &e(&[1, 0])), Err(Error::RankMismatch { .. })));
        let m = LabelMonoid::new(2, 3).unwrap();
        for a in m.elements() {
            for b in m.elements() {
                assert_eq!(add(&a, &b).unwrap(), add(&b, &a).unwrap());
            }
        }
    }

    #[test]
    fn decomposition() {
        assert_eq!(decompose(&e(&[0])), vec![(e(&[0]), e(&[0]))]);
        assert_eq!(decompose(&e(&[2])), vec![(e(&[0]), e(&[2])), (e(&[1]), e(&[1])), (e(&[2]), e(&[0]))]);
        assert_eq!(decompose(&e(&[1, 1])).len(), 4);
        let m = LabelMonoid::new(3, 3).unwrap();
        for b in m.elements() {
            let d = decompose(&b);
            let expected: usize = b.0.iter().map(|&c| c as usize + 1).product();
            assert_eq!(d.len(), expected);
            for (l, r) in &d {
                assert_eq!(add(l, r).unwrap(), b);
                assert!(d.contains(&(r.clone(), l.clone())));
            }
            let mut dedup = d.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), d.len());
        }
    }

    #[test]
    fn enumeration_counts() {
        let m = LabelMonoid::new(2, 2).unwrap();
        // weights 0,1,2 -> 1 + 2 + 3
        assert_eq!(m.elements().len(), 6);
        assert_eq!(LabelMonoid::trivial().elements(), vec![e(&[0])]);
        assert!(LabelMonoid::new(0, 1).is_err());
    }

    #[test]
    fn fibers() {
        let g = Arc::new(DirectedGraph::new(&["v"], &[("e", "v", "v")]).unwrap());
        let m = LabelMonoid::new(1, 1).unwrap();
        let empty = g.profile(&[], "e").unwrap();
        let unary = g.profile(&["e"], "e").unwrap();
        let full = LabelingFc::new(g.clone(), m, false);
        let red = LabelingFc::new(g.clone(), m, true);
        assert_eq!(full.fiber(&empty), vec![e(&[0]), e(&[1])]);
        assert_eq!(red.fiber(&empty), vec![e(&[1])]);
        assert_eq!(red.fiber(&unary), vec![e(&[0]), e(&[1])]);

        let b = Arc::new(crate::graph::build_bimodule_graph());
        let lb = LabelingFc::new(b.clone(), m, false);
        let p = b.path(&["e1"]).unwrap();
        assert!(lb.fiber_over(&p, b.edge_id("e0").unwrap()).is_empty());
    }
}
