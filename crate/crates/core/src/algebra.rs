//! Algebras over the free dg presets.
//!
//! An algebra assigns a degree-one [`MultiMap`] to each generator. It is
//! certified in two independent ways:
//!
//! * the generic route evaluates `d̂ α(m) − α(δ m)` for each generator `m`,
//!   composing assigned maps in `End(X)`;
//! * the direct routes evaluate the A∞, A∞-category and A∞-bimodule
//!   relations term by term on basis tuples, with the internal differential
//!   substituted for the missing unary operations. They never call
//!   [`EndX::compose`] and recompute every Koszul sign from the explicit
//!   formulas.
//!
//! The internal differential is never part of the assignment.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{EndX, MultiMap, Vector};
use crate::error::{Error, Result};
use crate::free::{bimodule_split, CompTree, FreeCell, FreeDgFc, Generator, PresetKind};
use crate::graph::{EdgeId, EdgePath, ProfileLoop};
use crate::label::{decompose, MonoidElem};
use crate::scalar;

/// Checking bounds: generator input length and label weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub arity: usize,
    pub labels: u32,
}

/// A pair `(X, α)`.
#[derive(Clone, Debug)]
pub struct AlgebraData {
    pub x: EndX,
    assignment: BTreeMap<Generator, MultiMap>,
    /// Generators without an entry act as zero maps. When unset, meeting an
    /// unassigned generator is an error.
    pub implicit_zero: bool,
}

impl AlgebraData {
    /// Validates that every assigned generator belongs to `fc`, that the
    /// map has the generator's boundary and degree one, and that every
    /// stored coefficient is degree-consistent.
    pub fn new(fc: &FreeDgFc, x: EndX, assignment: BTreeMap<Generator, MultiMap>, implicit_zero: bool) -> Result<Self> {
        if x.graph().to_spec() != fc.graph().to_spec() {
            return Err(Error::Assignment("X lives over a different graph than the preset".into()));
        }
        for (g, m) in &assignment {
            if !fc.is_generator(g) {
                return Err(Error::Assignment(format!("{} is not a generator of the preset", fc.name(g))));
            }
            if m.inputs != g.profile.inputs.edges || m.output != g.output() {
                return Err(Error::Assignment(format!("map assigned to {} has the wrong boundary", fc.name(g))));
            }
            if m.degree != 1 {
                return Err(Error::Assignment(format!(
                    "map assigned to {} has degree {}, expected 1",
                    fc.name(g),
                    m.degree
                )));
            }
            x.check_map(m)?;
        }
        Ok(AlgebraData { x, assignment, implicit_zero })
    }

    pub fn assignment(&self) -> &BTreeMap<Generator, MultiMap> {
        &self.assignment
    }

    /// `α(m)` for a generator.
    pub fn map_for(&self, fc: &FreeDgFc, g: &Generator) -> Result<MultiMap> {
        match self.assignment.get(g) {
            Some(m) => Ok(m.clone()),
            None if self.implicit_zero => Ok(MultiMap::zero(g.profile.inputs.edges.clone(), g.output(), 1)),
            None => Err(Error::Unassigned(fc.name(g))),
        }
    }
}

/// `α` on one planar tree: the root map, then the children grafted left to
/// right. This order never moves a node past another, so no Koszul sign
/// appears beyond those inside `End(X)` composition.
fn evaluate_tree(
    fc: &FreeDgFc,
    a: &AlgebraData,
    t: &CompTree,
    memo: &mut BTreeMap<Generator, MultiMap>,
) -> Result<MultiMap> {
    match t {
        CompTree::Leaf(e) => Ok(a.x.identity(*e)),
        CompTree::Node(g, children) => {
            if !memo.contains_key(g.as_ref()) {
                memo.insert(g.as_ref().clone(), a.map_for(fc, g)?);
            }
            let mut cur = memo[g.as_ref()].clone();
            let mut offset = 0;
            for ch in children {
                if let CompTree::Node(..) = ch {
                    let m = evaluate_tree(fc, a, ch, memo)?;
                    cur = a.x.compose(&cur, offset + 1, &m)?;
                }
                offset += ch.arity();
            }
            Ok(cur)
        }
    }
}

/// Linear extension of `α` to a cell of the free dg fc-multicategory.
pub fn evaluate_alpha(fc: &FreeDgFc, a: &AlgebraData, c: &FreeCell) -> Result<MultiMap> {
    let mut out = MultiMap::zero(c.profile.inputs.edges.clone(), c.profile.output, c.degree as i64);
    let mut memo = BTreeMap::new();
    for (t, coeff) in c.terms() {
        let m = evaluate_tree(fc, a, t, &mut memo)?;
        out.add_scaled(&m, coeff)?;
    }
    Ok(out)
}

/// `d̂ α(m) − α(δ m)`.
pub fn generic_residue(fc: &FreeDgFc, a: &AlgebraData, g: &Generator) -> Result<MultiMap> {
    let lhs = a.x.hat_d(&a.map_for(fc, g)?)?;
    let rhs = evaluate_alpha(fc, a, &fc.generator_differential(g)?)?;
    lhs.minus(&rhs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Generic,
    Direct,
}

/// A relation that does not hold, with one basis tuple on which it fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationFailure {
    pub relation: String,
    pub arity: usize,
    pub label: String,
    pub nonzero_entries: usize,
    pub witness_inputs: String,
    pub witness_value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub route: Route,
    pub checker: String,
    pub preset: String,
    pub arity_bound: usize,
    pub label_bound: u32,
    pub relations_checked: usize,
    pub pass: bool,
    pub lowest_failing_arity: Option<usize>,
    /// Set for curved presets, whose algebras are a proposed rather than an
    /// established notion.
    pub proposed_definition: bool,
    pub failures: Vec<RelationFailure>,
}

impl fmt::Display for RelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] for {}: {} ({} relations, arity ≤ {}, label weight ≤ {})",
            self.checker,
            match self.route {
                Route::Generic => "generic",
                Route::Direct => "direct",
            },
            self.preset,
            if self.pass { "PASS" } else { "FAIL" },
            self.relations_checked,
            self.arity_bound,
            self.label_bound
        )?;
        if self.proposed_definition {
            write!(f, "\n  note: curved preset; this checks a proposed definition")?;
        }
        if let Some(a) = self.lowest_failing_arity {
            write!(f, "\n  lowest failing arity: {a}")?;
        }
        for fl in &self.failures {
            write!(
                f,
                "\n  {} (arity {}, label {}): {} nonzero entries; at {} the relation gives {}",
                fl.relation, fl.arity, fl.label, fl.nonzero_entries, fl.witness_inputs, fl.witness_value
            )?;
        }
        Ok(())
    }
}

struct Relation {
    name: String,
    arity: usize,
    label: MonoidElem,
    residue: MultiMap,
}

fn build_report(
    fc: &FreeDgFc,
    a: &AlgebraData,
    route: Route,
    checker: &str,
    bounds: Bounds,
    relations: Vec<Relation>,
) -> RelationReport {
    let mut rep = RelationReport {
        route,
        checker: checker.to_string(),
        preset: format!("{:?}", fc.preset()),
        arity_bound: bounds.arity,
        label_bound: bounds.labels,
        relations_checked: relations.len(),
        pass: true,
        lowest_failing_arity: None,
        proposed_definition: !fc.labeling().reduced,
        failures: Vec::new(),
    };
    for r in relations {
        let Some((key, val)) = r.residue.first_nonzero() else { continue };
        rep.pass = false;
        rep.lowest_failing_arity = Some(rep.lowest_failing_arity.map_or(r.arity, |x| x.min(r.arity)));
        rep.failures.push(RelationFailure {
            relation: r.name,
            arity: r.arity,
            label: r.label.to_string(),
            nonzero_entries: r.residue.support_size(),
            witness_inputs: a.x.fmt_tuple(&r.residue.inputs, key),
            witness_value: a.x.fmt_vector(r.residue.output, val),
        });
    }
    rep
}

fn collect<T: Send>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

/// The generic route: `d̂ α(m) = α(δ m)` for every generator within bounds.
pub fn check_algebra(fc: &FreeDgFc, a: &AlgebraData, bounds: Bounds) -> Result<RelationReport> {
    let gens = fc.generators(bounds.arity, bounds.labels);
    let rels = collect(
        gens.par_iter()
            .map(|g| {
                Ok(Relation {
                    name: fc.name(g),
                    arity: g.arity(),
                    label: g.label.clone(),
                    residue: generic_residue(fc, a, g)?,
                })
            })
            .collect(),
    )?;
    Ok(build_report(fc, a, Route::Generic, "cochain-map condition", bounds, rels))
}

// ------------------------------------------------------------ direct route

/// The operation standing on a profile-loop and label in a direct relation:
/// the internal differential on identity profile-loops with label θ, the
/// assigned map on generators, zero otherwise.
fn operation(fc: &FreeDgFc, a: &AlgebraData, profile: &ProfileLoop, label: &MonoidElem) -> Result<Option<MultiMap>> {
    if profile.is_identity() && label.is_zero() {
        let e = profile.output;
        return Ok((!a.x.complex(e).is_zero_differential()).then(|| a.x.differential(e)));
    }
    let g = Generator { profile: profile.clone(), label: label.clone() };
    if !fc.is_generator(&g) {
        return Ok(None);
    }
    let m = a.map_for(fc, &g)?;
    Ok((!m.is_zero()).then_some(m))
}

/// Adds `sign · outer(x_1…x_r, inner(x_{r+1}…x_{r+s}), x_{r+s+1}…)` where
/// `sign = (-1)^{|x_1|+…+|x_r|}`, at one basis tuple. `span` is `r..r+s`.
fn insertion_term(
    x: &EndX,
    args: &[usize],
    inputs: &[EdgeId],
    span: Range<usize>,
    outer: &MultiMap,
    inner: &MultiMap,
    acc: &mut Vector,
) {
    let (r, s) = (span.start, span.len());
    let v = inner.apply(&args[span]);
    if v.is_zero() {
        return;
    }
    let mut outer_args: Vec<usize> = args[..r].to_vec();
    outer_args.push(0);
    outer_args.extend_from_slice(&args[r + s..]);
    let val = x.apply_with_vector(outer, &outer_args, r, &v);
    let deg: i64 = (0..r).map(|k| x.complex(inputs[k]).degree(args[k])).sum();
    acc.add_scaled(&val, &scalar::sign(deg));
}

/// One direct term, listed as `(outer profile, slot r+1, inner profile)` with
/// the inner block covering inputs `r..r+s`.
struct Split {
    outer: ProfileLoop,
    r: usize,
    s: usize,
    inner: ProfileLoop,
}

/// Evaluates `Σ_{β'+β''=β} Σ_splits ±outer_{β'}(…, inner_{β''}(…), …)` on every
/// basis tuple.
fn evaluate_splits(
    fc: &FreeDgFc,
    a: &AlgebraData,
    profile: &ProfileLoop,
    beta: &MonoidElem,
    splits: &[Split],
) -> Result<MultiMap> {
    let inputs = &profile.inputs.edges;
    let mut terms = Vec::new();
    for sp in splits {
        for (b1, b2) in decompose(beta) {
            if let (Some(o), Some(i)) = (operation(fc, a, &sp.outer, &b1)?, operation(fc, a, &sp.inner, &b2)?) {
                terms.push((sp.r, sp.s, o, i));
            }
        }
    }
    let mut res = MultiMap::zero(inputs.clone(), profile.output, 2);
    for args in a.x.basis_tuples(inputs) {
        let mut acc = Vector::zero();
        for (r, s, o, i) in &terms {
            insertion_term(&a.x, &args, inputs, *r..*r + *s, o, i, &mut acc);
        }
        res.add_value(args, &acc, &scalar::one());
    }
    Ok(res)
}

fn loop_word(e: EdgeId, v: usize, k: usize) -> EdgePath {
    EdgePath { source: v, target: v, edges: vec![e; k] }
}

/// The A∞ relation at `(n, β)` on a loop `e` at vertex `v`:
/// `Σ_{β'+β''=β} Σ_{r+s+t=n} (-1)^{|x_1|+…+|x_r|} m_{r+1+t,β'}(x_1…x_r, m_{s,β''}(x_{r+1}…), …)`.
fn ainf_splits(e: EdgeId, v: usize, n: usize) -> Vec<Split> {
    let mut out = Vec::new();
    for r in 0..=n {
        for s in 0..=n - r {
            let t = n - r - s;
            out.push(Split {
                outer: ProfileLoop { inputs: loop_word(e, v, r + 1 + t), output: e },
                r,
                s,
                inner: ProfileLoop { inputs: loop_word(e, v, s), output: e },
            });
        }
    }
    out
}

/// Relation indices for a direct route: every generator within bounds, and
/// in the uncurved case the identity profile-loops with label θ, where the
/// relation reads `d² = 0`.
/// Relations are indexed by the generators. The excluded index `(1, θ)` on an
/// identity profile would only restate `d² = 0`, which every
/// [`CochainComplex`](crate::chain::CochainComplex) already guarantees.
fn direct_indices(fc: &FreeDgFc, bounds: Bounds) -> Vec<(ProfileLoop, MonoidElem)> {
    fc.generators(bounds.arity, bounds.labels).into_iter().map(|g| (g.profile, g.label)).collect()
}

fn relation_name(fc: &FreeDgFc, profile: &ProfileLoop, label: &MonoidElem) -> String {
    fc.name(&Generator { profile: profile.clone(), label: label.clone() })
}

fn run_direct(
    fc: &FreeDgFc,
    a: &AlgebraData,
    bounds: Bounds,
    checker: &str,
    splits_for: impl Fn(&ProfileLoop) -> Result<Vec<Split>> + Sync,
) -> Result<RelationReport> {
    let idx = direct_indices(fc, bounds);
    let rels = collect(
        idx.par_iter()
            .map(|(p, b)| {
                let splits = splits_for(p)?;
                Ok(Relation {
                    name: relation_name(fc, p, b),
                    arity: p.arity(),
                    label: b.clone(),
                    residue: evaluate_splits(fc, a, p, b, &splits)?,
                })
            })
            .collect(),
    )?;
    Ok(build_report(fc, a, Route::Direct, checker, bounds, rels))
}

/// The labeled A∞ relations, with `m_{1,θ} := d` and `m_{0,θ} := 0`.
pub fn check_ainfty_direct(fc: &FreeDgFc, a: &AlgebraData, bounds: Bounds) -> Result<RelationReport> {
    if fc.preset() != PresetKind::Operad {
        return Err(Error::Usage("the A∞ relations need the A∞ operad preset".into()));
    }
    run_direct(fc, a, bounds, "A∞ relations", |p| Ok(ainf_splits(0, 0, p.arity())))
}

/// The A∞-category relations
/// `Σ (-1)^{|x_1|+…+|x_{j-1}|} μ(x_1…x_{j-1}, μ(x_j…x_{j+k}), …, x_n) = 0` with
/// `μ_1 := d`, one relation per composable string of morphisms. The inner
/// operation may land on any edge joining the endpoints of its block, so the
/// same formula serves the generalized, module and r-module presets.
pub fn check_category_direct(fc: &FreeDgFc, a: &AlgebraData, bounds: Bounds) -> Result<RelationReport> {
    if !matches!(
        fc.preset(),
        PresetKind::Category
            | PresetKind::Generalized
            | PresetKind::LeftModule
            | PresetKind::RightModule
            | PresetKind::RModule
    ) {
        return Err(Error::Usage("the A∞-category relations need a splitting preset".into()));
    }
    let g = fc.graph().clone();
    run_direct(fc, a, bounds, "A∞-category relations", move |p| {
        let word = &p.inputs;
        let verts = word.vertices(&g);
        let n = word.len();
        let mut out = Vec::new();
        for r in 0..=n {
            for s in 0..=n - r {
                for &f in g.edges_between(verts[r], verts[r + s]) {
                    let mut edges = word.edges[..r].to_vec();
                    edges.push(f);
                    edges.extend_from_slice(&word.edges[r + s..]);
                    out.push(Split {
                        outer: ProfileLoop {
                            inputs: EdgePath { source: word.source, target: word.target, edges },
                            output: p.output,
                        },
                        r,
                        s,
                        inner: ProfileLoop { inputs: word.slice(&g, r, s), output: f },
                    });
                }
            }
        }
        Ok(out)
    })
}

/// The A∞-bimodule equation on `(e0^{n0}, e01, e1^{n1}; e01)` as three sums
/// (an A-action inserted among the `x`, a B-action among the `z`, and a
/// module operation nested in a module operation) with `n_{0,0,θ} := d`,
/// together with the A∞ relations of the two algebras on `e0` and `e1`.
pub fn check_bimodule_direct(fc: &FreeDgFc, a: &AlgebraData, bounds: Bounds) -> Result<RelationReport> {
    if fc.preset() != PresetKind::Bimodule {
        return Err(Error::Usage("the bimodule equation needs the bimodule preset".into()));
    }
    let g = fc.graph().clone();
    let (e0, e1, e01) = (g.edge_id("e0")?, g.edge_id("e1")?, g.edge_id("e01")?);
    let (v0, v1) = (g.src(e01), g.tgt(e01));
    run_direct(fc, a, bounds, "A∞-bimodule relations", move |p| {
        if p.output == e0 {
            return Ok(ainf_splits(e0, v0, p.arity()));
        }
        if p.output == e1 {
            return Ok(ainf_splits(e1, v1, p.arity()));
        }
        let mixed = |n0: usize, n1: usize| {
            let mut edges = vec![e0; n0];
            edges.push(e01);
            edges.extend(std::iter::repeat_n(e1, n1));
            ProfileLoop { inputs: EdgePath { source: v0, target: v1, edges }, output: e01 }
        };
        let (n0, n1) = bimodule_split(&g, p);
        let mut out = Vec::new();
        // sign (-1)^{|x_1|+…+|x_{r0}|}
        for r0 in 0..=n0 {
            for s0 in 0..=n0 - r0 {
                let t0 = n0 - r0 - s0;
                out.push(Split {
                    outer: mixed(r0 + 1 + t0, n1),
                    r: r0,
                    s: s0,
                    inner: ProfileLoop { inputs: loop_word(e0, v0, s0), output: e0 },
                });
            }
        }
        // sign (-1)^{Σ|x_s| + |y| + |z_1|+…+|z_{r1}|}
        for r1 in 0..=n1 {
            for s1 in 0..=n1 - r1 {
                let t1 = n1 - r1 - s1;
                out.push(Split {
                    outer: mixed(n0, r1 + 1 + t1),
                    r: n0 + 1 + r1,
                    s: s1,
                    inner: ProfileLoop { inputs: loop_word(e1, v1, s1), output: e1 },
                });
            }
        }
        // sign (-1)^{|x_1|+…+|x_{n0'}|}
        for a0 in 0..=n0 {
            for a1 in 0..=n1 {
                let (i0, i1) = (n0 - a0, n1 - a1);
                out.push(Split { outer: mixed(a0, a1), r: a0, s: i0 + 1 + i1, inner: mixed(i0, i1) });
            }
        }
        Ok(out)
    })
}

/// The direct checker matching the preset.
pub fn check_direct(fc: &FreeDgFc, a: &AlgebraData, bounds: Bounds) -> Result<RelationReport> {
    match fc.preset() {
        PresetKind::Operad => check_ainfty_direct(fc, a, bounds),
        PresetKind::Bimodule => check_bimodule_direct(fc, a, bounds),
        PresetKind::Custom => {
            Err(Error::Usage("custom presets have no direct relations; use the generic route".into()))
        }
        _ => check_category_direct(fc, a, bounds),
    }
}

/// Whether two reports reach the same verdict and, when failing, the same
/// lowest failing arity.
pub fn verdicts_agree(a: &RelationReport, b: &RelationReport) -> bool {
    a.pass == b.pass && a.lowest_failing_arity == b.lowest_failing_arity
}
