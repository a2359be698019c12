//! Free dg fc-multicategories generated by degree-one symbols over a graph.
//!
//! A composite of generators is a planar tree ([`CompTree`]); a 2-cell is an
//! exact linear combination of trees sharing one profile-loop and one total
//! label ([`FreeCell`]). Generators are odd, so a tree stands for the product
//! of its node generators read in planar pre-order (root first, children left
//! to right). Grafting reorders that product and picks up the corresponding
//! Koszul sign, and the differential acts as a graded derivation: the node in
//! pre-order position `j` contributes with sign `(-1)^j`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    build_bimodule_graph, build_left_module_graph, build_pair_graph, build_partition_subgraph,
    build_right_module_graph, enumerate_profile_loops, DirectedGraph, EdgeId, EdgePath, ProfileLoop,
};
use crate::label::{add, decompose, LabelMonoid, LabelingFc, MonoidElem};
use crate::scalar::{self, Scalar};

/// A generator symbol: a profile-loop together with a label. All generators
/// have degree one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub profile: ProfileLoop,
    pub label: MonoidElem,
}

impl Generator {
    pub fn arity(&self) -> usize {
        self.profile.arity()
    }

    pub fn output(&self) -> EdgeId {
        self.profile.output
    }
}

/// Named generator as listed by a preset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub name: String,
    pub generator: Generator,
    pub degree: i64,
}

/// A planar composite of generators. `Leaf(e)` is an input edge (on its own,
/// the identity 2-cell on `e`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompTree {
    Leaf(EdgeId),
    Node(Arc<Generator>, Vec<CompTree>),
}

impl CompTree {
    /// The corolla of a generator: one node whose children are its inputs.
    pub fn corolla(g: &Generator) -> CompTree {
        CompTree::Node(Arc::new(g.clone()), g.profile.inputs.edges.iter().map(|&e| CompTree::Leaf(e)).collect())
    }

    pub fn output(&self) -> EdgeId {
        match self {
            CompTree::Leaf(e) => *e,
            CompTree::Node(g, _) => g.output(),
        }
    }

    pub fn leaves(&self) -> Vec<EdgeId> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<EdgeId>) {
        match self {
            CompTree::Leaf(e) => out.push(*e),
            CompTree::Node(_, cs) => cs.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            CompTree::Leaf(_) => 1,
            CompTree::Node(_, cs) => cs.iter().map(CompTree::arity).sum(),
        }
    }

    /// Number of internal nodes, which is the degree.
    pub fn node_count(&self) -> usize {
        match self {
            CompTree::Leaf(_) => 0,
            CompTree::Node(_, cs) => 1 + cs.iter().map(CompTree::node_count).sum::<usize>(),
        }
    }

    pub fn label(&self, rank: usize) -> MonoidElem {
        let mut acc = MonoidElem::zero(rank);
        self.for_each_node(&mut |g| acc = add(&acc, &g.label).expect("uniform rank"));
        acc
    }

    fn for_each_node(&self, f: &mut impl FnMut(&Generator)) {
        if let CompTree::Node(g, cs) = self {
            f(g);
            cs.iter().for_each(|c| c.for_each_node(f));
        }
    }

    /// Node generators in planar pre-order.
    pub fn preorder(&self) -> Vec<Arc<Generator>> {
        let mut out = Vec::new();
        fn go(t: &CompTree, out: &mut Vec<Arc<Generator>>) {
            if let CompTree::Node(g, cs) = t {
                out.push(g.clone());
                cs.iter().for_each(|c| go(c, out));
            }
        }
        go(self, &mut out);
        out
    }

    pub fn profile(&self, g: &DirectedGraph) -> ProfileLoop {
        let out = self.output();
        let leaves = self.leaves();
        let inputs = if leaves.is_empty() {
            EdgePath::empty(g.src(out))
        } else {
            EdgePath { source: g.src(leaves[0]), target: g.tgt(*leaves.last().unwrap()), edges: leaves }
        };
        ProfileLoop { inputs, output: out }
    }

    /// Checks that every node's children reproduce its input word.
    pub fn check(&self) -> Result<()> {
        if let CompTree::Node(g, cs) = self {
            if cs.len() != g.arity() {
                return Err(Error::IllTyped(format!("node with {} children has arity {}", cs.len(), g.arity())));
            }
            for (c, &e) in cs.iter().zip(&g.profile.inputs.edges) {
                if c.output() != e {
                    return Err(Error::IllTyped("child output does not match node input".into()));
                }
                c.check()?;
            }
        }
        Ok(())
    }

    /// Planar substitution of `inner` for the `i`-th leaf (1-based).
    pub fn graft(&self, i: usize, inner: &CompTree) -> Result<CompTree> {
        let mut remaining = i;
        if i == 0 {
            return Err(Error::Composition("slots are 1-based".into()));
        }
        let out = self.graft_rec(&mut remaining, inner)?;
        if remaining != 0 {
            return Err(Error::Composition(format!("slot {i} out of range for arity {}", self.arity())));
        }
        Ok(out)
    }

    fn graft_rec(&self, remaining: &mut usize, inner: &CompTree) -> Result<CompTree> {
        match self {
            CompTree::Leaf(e) => {
                *remaining -= 1;
                if *remaining == 0 {
                    if inner.output() != *e {
                        return Err(Error::Composition("inner tree output does not match the slot".into()));
                    }
                    Ok(inner.clone())
                } else {
                    Ok(self.clone())
                }
            }
            CompTree::Node(g, cs) => {
                let mut out = Vec::with_capacity(cs.len());
                for c in cs {
                    if *remaining == 0 {
                        out.push(c.clone());
                    } else {
                        out.push(c.graft_rec(remaining, inner)?);
                    }
                }
                Ok(CompTree::Node(g.clone(), out))
            }
        }
    }

    /// Nodes of `self` that come after leaf `i` in pre-order.
    fn nodes_after_leaf(&self, i: usize) -> usize {
        fn go(t: &CompTree, seen_leaves: &mut usize, i: usize, after: &mut usize) {
            match t {
                CompTree::Leaf(_) => *seen_leaves += 1,
                CompTree::Node(_, cs) => {
                    if *seen_leaves >= i {
                        *after += 1;
                    }
                    cs.iter().for_each(|c| go(c, seen_leaves, i, after));
                }
            }
        }
        let mut seen = 0;
        let mut after = 0;
        go(self, &mut seen, i, &mut after);
        after
    }

    /// Koszul sign of `self ∘_i inner` relative to the pre-order product of
    /// the grafted tree: the nodes of `self` after leaf `i` move past every
    /// node of `inner`.
    pub fn graft_sign(&self, i: usize, inner: &CompTree) -> Scalar {
        scalar::sign((self.nodes_after_leaf(i) * inner.node_count()) as i64)
    }

    pub fn fmt_with(&self, fc: &FreeDgFc) -> String {
        match self {
            CompTree::Leaf(e) => fc.graph().edge(*e).id.clone(),
            CompTree::Node(g, cs) => {
                let name = fc.name(g);
                if cs.iter().all(|c| matches!(c, CompTree::Leaf(_))) {
                    name
                } else {
                    let parts: Vec<_> = cs.iter().map(|c| c.fmt_with(fc)).collect();
                    format!("{name}[{}]", parts.join(" "))
                }
            }
        }
    }
}

/// A homogeneous exact linear combination of trees over one profile-loop and
/// one total label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeCell {
    pub profile: ProfileLoop,
    pub label: MonoidElem,
    pub degree: usize,
    terms: BTreeMap<CompTree, Scalar>,
}

impl FreeCell {
    pub fn zero(profile: ProfileLoop, label: MonoidElem, degree: usize) -> Self {
        FreeCell { profile, label, degree, terms: BTreeMap::new() }
    }

    pub fn from_tree(g: &DirectedGraph, rank: usize, tree: CompTree, coeff: Scalar) -> Result<Self> {
        tree.check()?;
        let mut c = FreeCell::zero(tree.profile(g), tree.label(rank), tree.node_count());
        c.add_term(tree, coeff)?;
        Ok(c)
    }

    pub fn identity(g: &DirectedGraph, rank: usize, e: EdgeId) -> Self {
        FreeCell::from_tree(g, rank, CompTree::Leaf(e), scalar::one()).expect("leaf is well typed")
    }

    pub fn generator(g: &DirectedGraph, gen: &Generator) -> Self {
        FreeCell::from_tree(g, gen.label.rank(), CompTree::corolla(gen), scalar::one()).expect("corolla is well typed")
    }

    pub fn terms(&self) -> &BTreeMap<CompTree, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff · tree`, dropping the entry when it cancels.
    pub fn add_term(&mut self, tree: CompTree, coeff: Scalar) -> Result<()> {
        if tree.node_count() != self.degree {
            return Err(Error::IllTyped(format!(
                "tree of degree {} in a degree-{} cell",
                tree.node_count(),
                self.degree
            )));
        }
        if tree.output() != self.profile.output || tree.leaves() != self.profile.inputs.edges {
            return Err(Error::IllTyped("tree boundary differs from the cell's profile-loop".into()));
        }
        if tree.label(self.label.rank()) != self.label {
            return Err(Error::IllTyped("tree label differs from the cell's label".into()));
        }
        if coeff.is_zero() {
            return Ok(());
        }
        let entry = self.terms.entry(tree);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
        Ok(())
    }

    pub fn add_cell(&mut self, other: &FreeCell, coeff: &Scalar) -> Result<()> {
        if other.profile != self.profile
            || other.label != self.label
            || (other.degree != self.degree && !other.is_zero())
        {
            return Err(Error::IllTyped("adding cells over different fibers".into()));
        }
        for (t, c) in &other.terms {
            self.add_term(t.clone(), c * coeff)?;
        }
        Ok(())
    }

    pub fn scaled(&self, coeff: &Scalar) -> FreeCell {
        let mut out = FreeCell::zero(self.profile.clone(), self.label.clone(), self.degree);
        if !coeff.is_zero() {
            out.terms = self.terms.iter().map(|(t, c)| (t.clone(), c * coeff)).collect();
        }
        out
    }

    /// Signed partial composition `self ∘_i inner`.
    pub fn compose(&self, g: &DirectedGraph, i: usize, inner: &FreeCell) -> Result<FreeCell> {
        let profile = self.profile.compose(g, i, &inner.profile)?;
        let label = add(&self.label, &inner.label)?;
        let mut out = FreeCell::zero(profile, label, self.degree + inner.degree);
        for (t, a) in &self.terms {
            for (u, b) in &inner.terms {
                let sign = t.graft_sign(i, u);
                out.add_term(t.graft(i, u)?, a * b * sign)?;
            }
        }
        Ok(out)
    }

    pub fn fmt_with(&self, fc: &FreeDgFc) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<_> = self
            .terms
            .iter()
            .map(|(t, c)| {
                let s = t.fmt_with(fc);
                if *c == scalar::one() {
                    format!("+{s}")
                } else if *c == -scalar::one() {
                    format!("-{s}")
                } else {
                    let c = scalar::format(c);
                    if c.starts_with('-') {
                        format!("{c}·{s}")
                    } else {
                        format!("+{c}·{s}")
                    }
                }
            })
            .collect();
        parts.join(" ")
    }
}

/// A formal composite, normalised by [`normalize`].
#[derive(Clone, Debug)]
pub enum Expr {
    Gen(Generator),
    Id(EdgeId),
    Compose(Box<Expr>, usize, Box<Expr>),
    Sum(Vec<(Scalar, Expr)>),
}

impl Expr {
    pub fn compose(self, i: usize, inner: Expr) -> Expr {
        Expr::Compose(Box::new(self), i, Box::new(inner))
    }
}

/// Planar-tree normal form of a formal composite: coefficients collected,
/// zero terms dropped.
pub fn normalize(fc: &FreeDgFc, expr: &Expr) -> Result<FreeCell> {
    let g = fc.graph();
    match expr {
        Expr::Gen(gen) => {
            if !fc.is_generator(gen) {
                return Err(Error::IllTyped(format!("{} is not a generator", fc.name(gen))));
            }
            Ok(FreeCell::generator(g, gen))
        }
        Expr::Id(e) => {
            if *e >= g.edge_count() {
                return Err(Error::IllTyped(format!("unknown edge {e}")));
            }
            Ok(FreeCell::identity(g, fc.rank(), *e))
        }
        Expr::Compose(a, i, b) => {
            let a = normalize(fc, a)?;
            let b = normalize(fc, b)?;
            a.compose(g, *i, &b).map_err(|e| Error::IllTyped(e.to_string()))
        }
        Expr::Sum(items) => {
            let mut acc: Option<FreeCell> = None;
            for (c, e) in items {
                let cell = normalize(fc, e)?;
                match &mut acc {
                    None => acc = Some(cell.scaled(c)),
                    Some(a) => a.add_cell(&cell, c)?,
                }
            }
            acc.ok_or_else(|| Error::IllTyped("empty sum has no profile".into()))
        }
    }
}

/// One summand `coeff · (outer ∘_slot inner)` of a generator differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleTerm {
    pub coeff: Scalar,
    pub outer: Generator,
    pub slot: usize,
    pub inner: Generator,
}

/// How `δ` is decided on generators.
#[derive(Clone, Debug)]
pub enum DifferentialRule {
    /// `δ(m_β) = -Σ m_β' ∘_i m_β''` over every splitting of the profile-loop
    /// and the label into two generators. Used by the category, generalized,
    /// module and r-module presets.
    Splitting,
    /// The operad formula `δ(m_{n,β}) = -Σ m_{r+1+t,β'} ∘_{r+1} m_{s,β''}` on
    /// the one-loop graph.
    Operad,
    /// The three-sum bimodule formula on the bimodule graph.
    Bimodule,
    /// Explicit per-generator rules; unlisted generators are cycles.
    Custom(BTreeMap<Generator, Vec<RuleTerm>>),
}

/// Deliberate sign errors, for exercising the checkers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fault {
    /// Drop the position sign in the Leibniz extension.
    UnsignedLeibniz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PresetKind {
    Operad,
    Category,
    Generalized,
    Bimodule,
    LeftModule,
    RightModule,
    RModule,
    Custom,
}

/// A free dg fc-multicategory.
#[derive(Clone, Debug)]
pub struct FreeDgFc {
    labeling: LabelingFc,
    rule: DifferentialRule,
    preset: PresetKind,
    family: Option<BTreeMap<Generator, String>>,
    fault: Option<Fault>,
}

impl FreeDgFc {
    /// Generators are all non-unit cells of the labeling `S_E` / `S_E^red`.
    pub fn new(labeling: LabelingFc, rule: DifferentialRule, preset: PresetKind) -> Self {
        FreeDgFc { labeling, rule, preset, family: None, fault: None }
    }

    /// Generators are exactly the listed ones.
    pub fn with_family(
        labeling: LabelingFc,
        rule: DifferentialRule,
        family: BTreeMap<Generator, String>,
    ) -> Result<Self> {
        for (g, name) in &family {
            if !labeling.admits(&g.profile, &g.label) || (g.profile.is_identity() && g.label.is_zero()) {
                return Err(Error::IllTyped(format!("generator `{name}` lies outside the labeling or is a unit")));
            }
        }
        Ok(FreeDgFc { labeling, rule, preset: PresetKind::Custom, family: Some(family), fault: None })
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = Some(fault);
        self
    }

    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.labeling.graph
    }

    pub fn labeling(&self) -> &LabelingFc {
        &self.labeling
    }

    pub fn monoid(&self) -> LabelMonoid {
        self.labeling.monoid
    }

    pub fn rank(&self) -> usize {
        self.labeling.monoid.rank
    }

    pub fn preset(&self) -> PresetKind {
        self.preset
    }

    pub fn is_generator(&self, g: &Generator) -> bool {
        if let Some(f) = &self.family {
            return f.contains_key(g);
        }
        g.output() < self.graph().edge_count()
            && self.labeling.admits(&g.profile, &g.label)
            && !(g.profile.is_identity() && g.label.is_zero())
    }

    /// Generators of input length at most `arity_bound` and label weight at
    /// most `label_bound`, in a deterministic order.
    pub fn generators(&self, arity_bound: usize, label_bound: u32) -> Vec<Generator> {
        if let Some(f) = &self.family {
            return f.keys().filter(|g| g.arity() <= arity_bound && g.label.weight() <= label_bound).cloned().collect();
        }
        let mut out = Vec::new();
        for l in enumerate_profile_loops(self.graph(), arity_bound) {
            for b in self.labeling.fiber(&l) {
                let g = Generator { profile: l.clone(), label: b };
                if g.label.weight() <= label_bound && self.is_generator(&g) {
                    out.push(g);
                }
            }
        }
        out
    }

    pub fn generator_specs(&self, arity_bound: usize, label_bound: u32) -> Vec<GeneratorSpec> {
        self.generators(arity_bound, label_bound)
            .into_iter()
            .map(|g| GeneratorSpec { name: self.name(&g), generator: g, degree: 1 })
            .collect()
    }

    fn trivial_labels(&self) -> bool {
        self.labeling.monoid.truncation == 0
    }

    fn label_suffix(&self, b: &MonoidElem) -> String {
        if self.trivial_labels() {
            String::new()
        } else {
            format!(",{b}")
        }
    }

    pub fn name(&self, g: &Generator) -> String {
        if let Some(n) = self.family.as_ref().and_then(|f| f.get(g)) {
            return n.clone();
        }
        let gr = self.graph();
        match self.preset {
            PresetKind::Operad => format!("m_{{{}{}}}", g.arity(), self.label_suffix(&g.label)),
            PresetKind::Bimodule => {
                let out = gr.edge(g.output()).id.as_str();
                match out {
                    "e0" => format!("m0_{{{}{}}}", g.arity(), self.label_suffix(&g.label)),
                    "e1" => format!("m1_{{{}{}}}", g.arity(), self.label_suffix(&g.label)),
                    _ => {
                        let (n0, n1) = bimodule_split(gr, &g.profile);
                        format!("n_{{{n0},{n1}{}}}", self.label_suffix(&g.label))
                    }
                }
            }
            _ => {
                let s = gr.fmt_profile(&g.profile);
                if self.trivial_labels() {
                    format!("m{s}")
                } else {
                    format!("m{s}{}", g.label)
                }
            }
        }
    }

    /// `δ` of one generator, as a list of rule terms.
    pub fn rule_terms(&self, gen: &Generator) -> Result<Vec<RuleTerm>> {
        if !self.is_generator(gen) {
            return Err(Error::OutOfBound(format!("{} is not a generator within the truncation", self.name(gen))));
        }
        let mut out = Vec::new();
        match &self.rule {
            DifferentialRule::Splitting => self.splitting_terms(gen, &mut out),
            DifferentialRule::Operad => self.operad_terms(gen, &mut out)?,
            DifferentialRule::Bimodule => self.bimodule_terms(gen, &mut out)?,
            DifferentialRule::Custom(rules) => {
                if let Some(ts) = rules.get(gen) {
                    out.extend(ts.iter().cloned());
                }
            }
        }
        Ok(out)
    }

    fn push_if_generators(
        &self,
        out: &mut Vec<RuleTerm>,
        outer: ProfileLoop,
        slot: usize,
        inner: ProfileLoop,
        beta: &MonoidElem,
    ) {
        for (b1, b2) in decompose(beta) {
            let o = Generator { profile: outer.clone(), label: b1 };
            let i = Generator { profile: inner.clone(), label: b2 };
            if self.is_generator(&o) && self.is_generator(&i) {
                out.push(RuleTerm { coeff: -scalar::one(), outer: o, slot, inner: i });
            }
        }
    }

    fn splitting_terms(&self, gen: &Generator, out: &mut Vec<RuleTerm>) {
        let g = self.graph();
        let word = &gen.profile.inputs;
        let verts = word.vertices(g);
        let n = word.len();
        for r in 0..=n {
            for s in 0..=n - r {
                let sub = word.slice(g, r, s);
                for &f in g.edges_between(verts[r], verts[r + s]) {
                    let inner = ProfileLoop { inputs: sub.clone(), output: f };
                    let mut edges = word.edges[..r].to_vec();
                    edges.push(f);
                    edges.extend_from_slice(&word.edges[r + s..]);
                    let outer = ProfileLoop {
                        inputs: EdgePath { source: word.source, target: word.target, edges },
                        output: gen.output(),
                    };
                    self.push_if_generators(out, outer, r + 1, inner, &gen.label);
                }
            }
        }
    }

    fn operad_terms(&self, gen: &Generator, out: &mut Vec<RuleTerm>) -> Result<()> {
        let g = self.graph();
        if g.vertex_count() != 1 || g.edge_count() != 1 {
            return Err(Error::IllTyped("the operad rule needs the one-loop graph".into()));
        }
        let word = |k: usize| EdgePath { source: 0, target: 0, edges: vec![0; k] };
        let n = gen.arity();
        for r in 0..=n {
            for s in 0..=n - r {
                let t = n - r - s;
                let outer = ProfileLoop { inputs: word(r + 1 + t), output: 0 };
                let inner = ProfileLoop { inputs: word(s), output: 0 };
                self.push_if_generators(out, outer, r + 1, inner, &gen.label);
            }
        }
        Ok(())
    }

    fn bimodule_terms(&self, gen: &Generator, out: &mut Vec<RuleTerm>) -> Result<()> {
        let g = self.graph();
        let (e0, e1, e01) = (g.edge_id("e0")?, g.edge_id("e1")?, g.edge_id("e01")?);
        let (v0, v1) = (g.src(e01), g.tgt(e01));
        let loops = |e: EdgeId, v, k: usize| EdgePath { source: v, target: v, edges: vec![e; k] };
        let mixed = |n0: usize, n1: usize| {
            let mut edges = vec![e0; n0];
            edges.push(e01);
            edges.extend(std::iter::repeat_n(e1, n1));
            ProfileLoop { inputs: EdgePath { source: v0, target: v1, edges }, output: e01 }
        };
        let out_edge = gen.output();
        if out_edge == e0 || out_edge == e1 {
            let v = g.src(out_edge);
            let n = gen.arity();
            for r in 0..=n {
                for s in 0..=n - r {
                    let t = n - r - s;
                    let outer = ProfileLoop { inputs: loops(out_edge, v, r + 1 + t), output: out_edge };
                    let inner = ProfileLoop { inputs: loops(out_edge, v, s), output: out_edge };
                    self.push_if_generators(out, outer, r + 1, inner, &gen.label);
                }
            }
            return Ok(());
        }
        let (n0, n1) = bimodule_split(g, &gen.profile);
        // n ∘_{r0+1} m^(0)
        for r0 in 0..=n0 {
            for s0 in 0..=n0 - r0 {
                let t0 = n0 - r0 - s0;
                let inner = ProfileLoop { inputs: loops(e0, v0, s0), output: e0 };
                self.push_if_generators(out, mixed(r0 + 1 + t0, n1), r0 + 1, inner, &gen.label);
            }
        }
        // n ∘_{n0+r1+2} m^(1)
        for r1 in 0..=n1 {
            for s1 in 0..=n1 - r1 {
                let t1 = n1 - r1 - s1;
                let inner = ProfileLoop { inputs: loops(e1, v1, s1), output: e1 };
                self.push_if_generators(out, mixed(n0, r1 + 1 + t1), n0 + r1 + 2, inner, &gen.label);
            }
        }
        // n ∘_{n0'+1} n
        for a0 in 0..=n0 {
            for a1 in 0..=n1 {
                self.push_if_generators(out, mixed(a0, a1), a0 + 1, mixed(n0 - a0, n1 - a1), &gen.label);
            }
        }
        Ok(())
    }

    /// `δ` of a generator as a degree-two cell.
    pub fn generator_differential(&self, gen: &Generator) -> Result<FreeCell> {
        let g = self.graph();
        let mut out = FreeCell::zero(gen.profile.clone(), gen.label.clone(), 2);
        for term in self.rule_terms(gen)? {
            let outer = CompTree::corolla(&term.outer);
            let inner = CompTree::corolla(&term.inner);
            let sign = outer.graft_sign(term.slot, &inner);
            let tree = outer.graft(term.slot, &inner).map_err(|e| Error::IllTyped(format!("rule term: {e}")))?;
            if tree.profile(g) != gen.profile {
                return Err(Error::IllTyped(format!("rule term for {} has the wrong boundary", self.name(gen))));
            }
            out.add_term(tree, term.coeff * sign)?;
        }
        Ok(out)
    }

    /// `δ` extended to composites by the Leibniz rule.
    pub fn delta(&self, c: &FreeCell) -> Result<FreeCell> {
        let mut out = FreeCell::zero(c.profile.clone(), c.label.clone(), c.degree + 1);
        let mut memo: BTreeMap<Arc<Generator>, FreeCell> = BTreeMap::new();
        for (tree, coeff) in &c.terms {
            let mut position = 0usize;
            self.delta_tree(tree, &mut Vec::new(), tree, &mut position, coeff, &mut out, &mut memo)?;
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn delta_tree(
        &self,
        root: &CompTree,
        path: &mut Vec<usize>,
        node: &CompTree,
        position: &mut usize,
        coeff: &Scalar,
        out: &mut FreeCell,
        memo: &mut BTreeMap<Arc<Generator>, FreeCell>,
    ) -> Result<()> {
        let CompTree::Node(gen, children) = node else { return Ok(()) };
        let j = *position;
        *position += 1;
        if !memo.contains_key(gen) {
            memo.insert(gen.clone(), self.generator_differential(gen)?);
        }
        let dg = memo[gen].clone();
        let pos_sign = match self.fault {
            Some(Fault::UnsignedLeibniz) => scalar::one(),
            None => scalar::sign(j as i64),
        };
        for (two, c2) in dg.terms() {
            let CompTree::Node(a, a_children) = two else { continue };
            // locate the inner node b and its slot k in a
            let Some((k, b)) = a_children.iter().enumerate().find_map(|(k, ch)| match ch {
                CompTree::Node(b, _) => Some((k, b.clone())),
                CompTree::Leaf(_) => None,
            }) else {
                continue;
            };
            let b_arity = b.arity();
            let before: usize = children[..k].iter().map(CompTree::node_count).sum();
            let mut new_children: Vec<CompTree> = children[..k].to_vec();
            new_children.push(CompTree::Node(b, children[k..k + b_arity].to_vec()));
            new_children.extend_from_slice(&children[k + b_arity..]);
            let replacement = CompTree::Node(a.clone(), new_children);
            let tree = replace_at(root, path, replacement);
            let sign = pos_sign.clone() * scalar::sign(before as i64);
            out.add_term(tree, coeff * c2 * sign)?;
        }
        for (idx, ch) in children.iter().enumerate() {
            path.push(idx);
            self.delta_tree(root, path, ch, position, coeff, out, memo)?;
            path.pop();
        }
        Ok(())
    }

    /// Evaluates `δ²` on every generator within the bounds.
    pub fn delta_squared_report(&self, arity_bound: usize, label_bound: u32) -> DeltaSquaredReport {
        let gens = self.generators(arity_bound, label_bound);
        let results: Vec<Result<Option<DeltaResidue>>> = gens
            .par_iter()
            .map(|gen| {
                let d1 = self.generator_differential(gen)?;
                if let Some((t, _)) = d1.terms().iter().find(|(t, _)| t.node_count() != 2) {
                    return Err(Error::IllTyped(format!("δ({}) has a {}-node term", self.name(gen), t.node_count())));
                }
                let d2 = self.delta(&d1)?;
                Ok(if d2.is_zero() {
                    None
                } else {
                    Some(DeltaResidue {
                        generator: self.name(gen),
                        arity: gen.arity(),
                        residue: d2.fmt_with(self),
                        terms: d2.len(),
                    })
                })
            })
            .collect();
        let mut report = DeltaSquaredReport {
            preset: format!("{:?}", self.preset),
            arity_bound,
            label_bound,
            generators_checked: gens.len(),
            pass: true,
            residues: Vec::new(),
            errors: Vec::new(),
        };
        for r in results {
            match r {
                Ok(None) => {}
                Ok(Some(res)) => {
                    report.pass = false;
                    report.residues.push(res);
                }
                Err(e) => {
                    report.pass = false;
                    report.errors.push(e.to_string());
                }
            }
        }
        report
    }
}

fn replace_at(root: &CompTree, path: &[usize], replacement: CompTree) -> CompTree {
    match path.split_first() {
        None => replacement,
        Some((&i, rest)) => match root {
            CompTree::Node(g, cs) => {
                let mut cs = cs.clone();
                cs[i] = replace_at(&cs[i], rest, replacement);
                CompTree::Node(g.clone(), cs)
            }
            CompTree::Leaf(_) => unreachable!("paths only descend through nodes"),
        },
    }
}

/// `(n0, n1)` for a profile-loop `(e0^n0, e01, e1^n1; e01)`.
pub fn bimodule_split(g: &DirectedGraph, l: &ProfileLoop) -> (usize, usize) {
    let e01 = l.output;
    let pos = l.inputs.edges.iter().position(|&e| e == e01).unwrap_or(0);
    let _ = g;
    (pos, l.inputs.len().saturating_sub(pos + 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaResidue {
    pub generator: String,
    pub arity: usize,
    pub terms: usize,
    pub residue: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaSquaredReport {
    pub preset: String,
    pub arity_bound: usize,
    pub label_bound: u32,
    pub generators_checked: usize,
    pub pass: bool,
    pub residues: Vec<DeltaResidue>,
    pub errors: Vec<String>,
}

impl fmt::Display for DeltaSquaredReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "δ² {} for {} ({} generators, arity ≤ {}, label weight ≤ {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.preset,
            self.generators_checked,
            self.arity_bound,
            self.label_bound
        )?;
        for r in &self.residues {
            write!(f, "\n  δ²({}) = {} [{} terms]", r.generator, r.residue, r.terms)?;
        }
        for e in &self.errors {
            write!(f, "\n  error: {e}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- presets

/// The labeled A∞ operad: one vertex, one loop, generators `m_{n,β}` for
/// `(n,β) ≠ (0,θ), (1,θ)`.
pub fn build_ainf_operad(monoid: LabelMonoid) -> FreeDgFc {
    let g = Arc::new(DirectedGraph::new(&["v"], &[("e", "v", "v")]).expect("static graph"));
    FreeDgFc::new(LabelingFc::new(g, monoid, true), DifferentialRule::Operad, PresetKind::Operad)
}

/// The A∞ category preset on the pair graph `V × V`. `reduced` selects the
/// uncurved labeling `S_E^red`; otherwise empty-input generators with label
/// θ are present (the curved proposal).
pub fn build_ainf_category<V: AsRef<str>>(vs: &[V], monoid: LabelMonoid, reduced: bool) -> Result<FreeDgFc> {
    let g = Arc::new(build_pair_graph(vs)?);
    Ok(FreeDgFc::new(LabelingFc::new(g, monoid, reduced), DifferentialRule::Splitting, PresetKind::Category))
}

pub fn build_ainf_generalized(graph: Arc<DirectedGraph>, monoid: LabelMonoid, reduced: bool) -> FreeDgFc {
    FreeDgFc::new(LabelingFc::new(graph, monoid, reduced), DifferentialRule::Splitting, PresetKind::Generalized)
}

/// The bimodule preset on `{e0, e1, e01}` with the explicit three-sum rule.
pub fn build_ainf_bimodule(monoid: LabelMonoid) -> FreeDgFc {
    let g = Arc::new(build_bimodule_graph());
    FreeDgFc::new(LabelingFc::new(g, monoid, true), DifferentialRule::Bimodule, PresetKind::Bimodule)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

pub fn build_module_preset<V: AsRef<str>>(
    vs: &[V],
    side: Side,
    monoid: LabelMonoid,
    reduced: bool,
) -> Result<FreeDgFc> {
    let (g, kind) = match side {
        Side::Left => (build_left_module_graph(vs)?, PresetKind::LeftModule),
        Side::Right => (build_right_module_graph(vs)?, PresetKind::RightModule),
    };
    Ok(FreeDgFc::new(LabelingFc::new(Arc::new(g), monoid, reduced), DifferentialRule::Splitting, kind))
}

/// The r-module preset on the partition subgraph `⋃_{j≤k} V⁽ʲ⁾ × V⁽ᵏ⁾`.
pub fn build_rmodule_preset<V: AsRef<str>, P: AsRef<[V]>>(
    vs: &[V],
    parts: &[P],
    monoid: LabelMonoid,
    reduced: bool,
) -> Result<FreeDgFc> {
    let g = Arc::new(build_partition_subgraph(vs, parts)?);
    Ok(FreeDgFc::new(LabelingFc::new(g, monoid, reduced), DifferentialRule::Splitting, PresetKind::RModule))
}

/// Distinct generator outputs, handy for summaries.
pub fn output_edges(gens: &[Generator]) -> BTreeSet<EdgeId> {
    gens.iter().map(Generator::output).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(fc: &FreeDgFc, n: usize, b: u32) -> Generator {
        let g = fc.graph();
        let word = EdgePath { source: 0, target: 0, edges: vec![0; n] };
        let _ = g;
        Generator { profile: ProfileLoop { inputs: word, output: 0 }, label: MonoidElem(vec![b]) }
    }

    #[test]
    fn operad_generators() {
        let triv = build_ainf_operad(LabelMonoid::trivial());
        let arities: Vec<_> = triv.generators(5, 0).iter().map(Generator::arity).collect();
        assert_eq!(arities, vec![2, 3, 4, 5]);
        let lab = build_ainf_operad(LabelMonoid::new(1, 1).unwrap());
        let gens = lab.generators(2, 1);
        assert!(gens.contains(&m(&lab, 0, 1)));
        assert!(!gens.contains(&m(&lab, 0, 0)));
        assert!(!gens.contains(&m(&lab, 1, 0)));
        assert!(gens.contains(&m(&lab, 1, 1)));
    }

    #[test]
    fn low_differentials() {
        let fc = build_ainf_operad(LabelMonoid::trivial());
        let g = fc.graph().clone();
        assert!(fc.generator_differential(&m(&fc, 2, 0)).unwrap().is_zero());
        // δ(m_3) = -(m_2 ∘_1 m_2 + m_2 ∘_2 m_2)
        let d3 = fc.generator_differential(&m(&fc, 3, 0)).unwrap();
        let m2 = Expr::Gen(m(&fc, 2, 0));
        let expected = normalize(
            &fc,
            &Expr::Sum(vec![
                (-scalar::one(), m2.clone().compose(1, m2.clone())),
                (-scalar::one(), m2.clone().compose(2, m2.clone())),
            ]),
        )
        .unwrap();
        assert_eq!(d3, expected);
        assert_eq!(d3.len(), 2);
        let d4 = fc.generator_differential(&m(&fc, 4, 0)).unwrap();
        assert!(fc.delta(&d4).unwrap().is_zero());
        // δ(id) = 0
        let id = FreeCell::identity(&g, 1, 0);
        let did = fc.delta(&id).unwrap();
        assert!(did.is_zero());
        assert_eq!(did.degree, 1);

        let lab = build_ainf_operad(LabelMonoid::new(1, 1).unwrap());
        assert!(lab.generator_differential(&m(&lab, 0, 1)).unwrap().is_zero());
        assert!(matches!(lab.generator_differential(&m(&lab, 0, 2)), Err(Error::OutOfBound(_))));
    }

    #[test]
    fn normalize_units_and_cancellation() {
        let fc = build_ainf_operad(LabelMonoid::trivial());
        let m2 = Expr::Gen(m(&fc, 2, 0));
        let with_unit = normalize(&fc, &m2.clone().compose(1, Expr::Id(0))).unwrap();
        assert_eq!(with_unit, normalize(&fc, &m2).unwrap());
        let left_unit = normalize(&fc, &Expr::Id(0).compose(1, m2.clone())).unwrap();
        assert_eq!(left_unit, with_unit);
        let zero = normalize(&fc, &Expr::Sum(vec![(scalar::one(), m2.clone()), (-scalar::one(), m2.clone())])).unwrap();
        assert!(zero.is_zero());
        // parenthesizations of m2 ∘ (m2, m2)
        let a = normalize(&fc, &m2.clone().compose(1, m2.clone()).compose(3, m2.clone())).unwrap();
        let b = normalize(&fc, &m2.clone().compose(2, m2.clone()).compose(1, m2.clone())).unwrap();
        // parallel insertions of odd elements differ by a sign
        assert_eq!(a, b.scaled(&-scalar::one()));
        let c = normalize(&fc, &m2.clone().compose(1, m2.clone().compose(2, m2.clone()))).unwrap();
        let d = normalize(&fc, &m2.clone().compose(1, m2.clone()).compose(2, m2.clone())).unwrap();
        assert_eq!(c, d);
        assert!(matches!(normalize(&fc, &m2.clone().compose(3, m2.clone())), Err(Error::IllTyped(_))));
        assert!(normalize(&fc, &Expr::Gen(m(&fc, 1, 0))).is_err());
    }

    #[test]
    fn grafting_signs() {
        let fc = build_ainf_operad(LabelMonoid::trivial());
        let m2 = CompTree::corolla(&m(&fc, 2, 0));
        let t = m2.graft(1, &m2).unwrap();
        assert_eq!(t.node_count(), 2);
        // the second child of the root comes after leaf 1: one node moves past
        let lhs = m2.graft(2, &m2).unwrap();
        assert_eq!(t.graft_sign(3, &m2), scalar::one());
        assert_eq!(lhs.graft_sign(1, &m2), -scalar::one());
    }

    #[test]
    fn category_and_operad_agree_on_one_vertex() {
        let op = build_ainf_operad(LabelMonoid::new(1, 2).unwrap());
        let cat = build_ainf_category(&["v"], LabelMonoid::new(1, 2).unwrap(), true).unwrap();
        let g_op = op.generators(4, 2);
        let g_cat = cat.generators(4, 2);
        assert_eq!(g_op.len(), g_cat.len());
        for (a, b) in g_op.iter().zip(&g_cat) {
            assert_eq!(a.arity(), b.arity());
            assert_eq!(a.label, b.label);
            let da = op.rule_terms(a).unwrap().len();
            let db = cat.rule_terms(b).unwrap().len();
            assert_eq!(da, db);
        }
    }

    #[test]
    fn reduced_category_has_no_curvature() {
        let cat = build_ainf_category(&["a", "b"], LabelMonoid::trivial(), true).unwrap();
        assert!(cat.generators(4, 0).iter().all(|g| g.arity() > 0));
        let curved = build_ainf_category(&["a", "b"], LabelMonoid::trivial(), false).unwrap();
        assert!(curved.generators(4, 0).iter().any(|g| g.arity() == 0));
        let g = cat.graph().clone();
        let word = g.path(&["(a,b)", "(b,a)"]).unwrap();
        let out = g.edge_id("(a,a)").unwrap();
        assert!(cat.is_generator(&Generator {
            profile: ProfileLoop::new(&g, word, out).unwrap(),
            label: MonoidElem(vec![0])
        }));
    }

    #[test]
    fn bimodule_rule_matches_splitting() {
        let monoid = LabelMonoid::new(1, 1).unwrap();
        let bim = build_ainf_bimodule(monoid);
        let gen = build_ainf_generalized(Arc::new(build_bimodule_graph()), monoid, true);
        let gens = bim.generators(4, 1);
        assert_eq!(gens, gen.generators(4, 1));
        for g in &gens {
            assert_eq!(
                bim.generator_differential(g).unwrap(),
                gen.generator_differential(g).unwrap(),
                "{}",
                bim.name(g)
            );
        }
    }

    #[test]
    fn bimodule_middle_slot() {
        let bim = build_ainf_bimodule(LabelMonoid::trivial());
        let g = bim.graph().clone();
        let n12 =
            Generator { profile: g.profile(&["e0", "e01", "e1", "e1"], "e01").unwrap(), label: MonoidElem(vec![0]) };
        let terms = bim.rule_terms(&n12).unwrap();
        let e1 = g.edge_id("e1").unwrap();
        // n_{1,r1+1+t1} ∘_{n0+r1+2} m1_{2}: r1 = 0 only (s1 = 2)
        let mids: Vec<_> = terms.iter().filter(|t| t.inner.output() == e1).map(|t| t.slot).collect();
        assert_eq!(mids, vec![3]);
        assert!(bim.delta(&bim.generator_differential(&n12).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn fault_breaks_delta_squared() {
        let fc = build_ainf_operad(LabelMonoid::trivial()).with_fault(Fault::UnsignedLeibniz);
        assert!(!fc.delta_squared_report(5, 0).pass);
    }
}
