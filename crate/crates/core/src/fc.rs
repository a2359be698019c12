//! Finitely enumerable, vertically discrete fc-multicategories.
//!
//! Three kinds of instance are supported: the profile-loop fc-multicategory
//! of a graph, the labeling fc-multicategories `S_E` / `S_E^red`, and
//! hand-built instances given by explicit cell and composition tables. All of
//! them are enumerated up to an input-length bound; composites that leave the
//! enumerated range are reported as [`Composite::OutOfBound`].

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{enumerate_profile_loops, DirectedGraph, EdgeId, ProfileLoop, Subgraph};
use crate::label::{add, LabelingFc, MonoidElem};

/// A 2-cell. Identity is structural: profile, label, and (for table
/// instances) the declared name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoCell {
    pub profile: ProfileLoop,
    pub label: Option<MonoidElem>,
    pub name: Option<String>,
}

impl TwoCell {
    pub fn arity(&self) -> usize {
        self.profile.arity()
    }

    pub fn output(&self) -> EdgeId {
        self.profile.output
    }

    /// Input edge in 1-based slot `i`.
    pub fn input(&self, i: usize) -> EdgeId {
        self.profile.inputs.edges[i - 1]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Composite {
    Cell(TwoCell),
    /// The composite exists but lies outside the enumerated range (input
    /// length or label truncation), or a table has no entry for it.
    OutOfBound {
        profile: ProfileLoop,
        label: Option<MonoidElem>,
    },
}

impl Composite {
    pub fn cell(self) -> Option<TwoCell> {
        match self {
            Composite::Cell(c) => Some(c),
            Composite::OutOfBound { .. } => None,
        }
    }
}

/// Explicit cells, units and composition entries.
#[derive(Clone, Debug, Default)]
pub struct CellTable {
    cells: Vec<TwoCell>,
    by_name: HashMap<String, usize>,
    units: HashMap<EdgeId, usize>,
    compose: HashMap<(usize, usize, usize), usize>,
}

impl CellTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_cell(&mut self, name: &str, profile: ProfileLoop, label: Option<MonoidElem>) -> Result<()> {
        if self.by_name.contains_key(name) {
            return Err(Error::Parse(format!("duplicate cell `{name}`")));
        }
        self.by_name.insert(name.to_string(), self.cells.len());
        self.cells.push(TwoCell { profile, label, name: Some(name.to_string()) });
        Ok(())
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.by_name.get(name).copied().ok_or_else(|| Error::Lookup { kind: "cell", id: name.to_string() })
    }

    pub fn set_unit(&mut self, edge: EdgeId, cell: &str) -> Result<()> {
        let c = self.index(cell)?;
        if !self.cells[c].profile.is_identity() || self.cells[c].output() != edge {
            return Err(Error::Composition(format!("unit `{cell}` does not lie over an identity profile-loop")));
        }
        self.units.insert(edge, c);
        Ok(())
    }

    pub fn set_compose(&mut self, outer: &str, slot: usize, inner: &str, result: &str) -> Result<()> {
        let key = (self.index(outer)?, slot, self.index(inner)?);
        let r = self.index(result)?;
        self.compose.insert(key, r);
        Ok(())
    }

    pub fn cell(&self, name: &str) -> Result<&TwoCell> {
        Ok(&self.cells[self.index(name)?])
    }
}

#[derive(Clone, Debug)]
pub enum InstanceKind {
    ProfileLoops,
    Labeled(LabelingFc),
    Table(CellTable),
}

#[derive(Clone, Debug)]
pub struct FcInstance {
    graph: Arc<DirectedGraph>,
    max_len: usize,
    kind: InstanceKind,
    restriction: Option<Subgraph>,
}

/// One cell per profile-loop of input length at most `max_len`; composition
/// is substitution of profile-loops.
pub fn profile_loop_instance(graph: Arc<DirectedGraph>, max_len: usize) -> FcInstance {
    FcInstance { graph, max_len, kind: InstanceKind::ProfileLoops, restriction: None }
}

/// Cells are (profile-loop, label) pairs from the labeling's fibers;
/// composition adds labels.
pub fn labeled_instance(lfc: LabelingFc, max_len: usize) -> FcInstance {
    FcInstance { graph: lfc.graph.clone(), max_len, kind: InstanceKind::Labeled(lfc), restriction: None }
}

pub fn table_instance(graph: Arc<DirectedGraph>, table: CellTable) -> FcInstance {
    let max_len = table.cells.iter().map(TwoCell::arity).max().unwrap_or(0);
    FcInstance { graph, max_len, kind: InstanceKind::Table(table), restriction: None }
}

/// The full fc-submulticategory on `sub`: every 2-cell of `fc` whose profile
/// lies in `sub`.
pub fn full_submulticategory(fc: &FcInstance, sub: &DirectedGraph) -> Result<FcInstance> {
    let mut mask = Subgraph::locate(&fc.graph, sub)?;
    if let Some(r) = &fc.restriction {
        mask.vertices.retain(|v| r.vertices.contains(v));
        mask.edges.retain(|e| r.edges.contains(e));
    }
    Ok(FcInstance { restriction: Some(mask), ..fc.clone() })
}

impl FcInstance {
    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn kind(&self) -> &InstanceKind {
        &self.kind
    }

    /// The subgraph this instance lives on.
    pub fn support(&self) -> Subgraph {
        self.restriction.clone().unwrap_or_else(|| Subgraph::full(&self.graph))
    }

    pub fn restrict_mask(&self, mask: Subgraph) -> FcInstance {
        FcInstance { restriction: Some(mask), ..self.clone() }
    }

    fn in_support(&self, l: &ProfileLoop) -> bool {
        self.restriction.as_ref().is_none_or(|r| r.contains_profile(l))
    }

    pub fn contains(&self, c: &TwoCell) -> bool {
        if !self.in_support(&c.profile) || c.arity() > self.max_len {
            return false;
        }
        match &self.kind {
            InstanceKind::ProfileLoops => c.label.is_none() && c.name.is_none(),
            InstanceKind::Labeled(lfc) => {
                c.name.is_none() && c.label.as_ref().is_some_and(|b| lfc.admits(&c.profile, b))
            }
            InstanceKind::Table(t) => c.name.as_ref().and_then(|n| t.by_name.get(n)).is_some_and(|&i| t.cells[i] == *c),
        }
    }

    /// Cells over one profile-loop.
    pub fn fiber(&self, l: &ProfileLoop) -> Vec<TwoCell> {
        if !self.in_support(l) || l.arity() > self.max_len {
            return Vec::new();
        }
        match &self.kind {
            InstanceKind::ProfileLoops => vec![TwoCell { profile: l.clone(), label: None, name: None }],
            InstanceKind::Labeled(lfc) => {
                lfc.fiber(l).into_iter().map(|b| TwoCell { profile: l.clone(), label: Some(b), name: None }).collect()
            }
            InstanceKind::Table(t) => t.cells.iter().filter(|c| c.profile == *l).cloned().collect(),
        }
    }

    /// Every cell of input length at most `max_len`, in a deterministic order.
    pub fn cells(&self) -> Vec<TwoCell> {
        match &self.kind {
            InstanceKind::Table(t) => t.cells.iter().filter(|c| self.in_support(&c.profile)).cloned().collect(),
            _ => enumerate_profile_loops(&self.graph, self.max_len).iter().flat_map(|l| self.fiber(l)).collect(),
        }
    }

    pub fn identity_cell(&self, e: EdgeId) -> Result<TwoCell> {
        if e >= self.graph.edge_count() || self.restriction.as_ref().is_some_and(|r| !r.edges.contains(&e)) {
            return Err(Error::Lookup { kind: "edge", id: e.to_string() });
        }
        let profile = ProfileLoop::identity(&self.graph, e);
        match &self.kind {
            InstanceKind::ProfileLoops => Ok(TwoCell { profile, label: None, name: None }),
            InstanceKind::Labeled(lfc) => Ok(TwoCell { profile, label: Some(lfc.monoid.zero()), name: None }),
            InstanceKind::Table(t) => t
                .units
                .get(&e)
                .map(|&i| t.cells[i].clone())
                .ok_or_else(|| Error::Lookup { kind: "unit", id: self.graph.edge(e).id.clone() }),
        }
    }

    /// Partial composition `u ∘_i u'` (1-based slot).
    pub fn compose_i(&self, u: &TwoCell, i: usize, inner: &TwoCell) -> Result<Composite> {
        let profile = u.profile.compose(&self.graph, i, &inner.profile)?;
        for c in [u, inner] {
            if !self.in_support(&c.profile) {
                return Err(Error::Composition(format!("{} is not in this instance", self.fmt_cell(c))));
            }
        }
        let out_of_range = profile.arity() > self.max_len;
        match &self.kind {
            InstanceKind::ProfileLoops => {
                if out_of_range {
                    Ok(Composite::OutOfBound { profile, label: None })
                } else {
                    Ok(Composite::Cell(TwoCell { profile, label: None, name: None }))
                }
            }
            InstanceKind::Labeled(lfc) => {
                let (Some(a), Some(b)) = (&u.label, &inner.label) else {
                    return Err(Error::Composition("labeled instance requires labeled cells".into()));
                };
                let label = add(a, b)?;
                if out_of_range || !lfc.admits(&profile, &label) {
                    Ok(Composite::OutOfBound { profile, label: Some(label) })
                } else {
                    Ok(Composite::Cell(TwoCell { profile, label: Some(label), name: None }))
                }
            }
            InstanceKind::Table(t) => {
                let (Some(a), Some(b)) = (&u.name, &inner.name) else {
                    return Err(Error::Composition("table instance requires named cells".into()));
                };
                let key = (t.index(a)?, i, t.index(b)?);
                let Some(&r) = t.compose.get(&key) else {
                    let label = match (&u.label, &inner.label) {
                        (Some(x), Some(y)) => Some(add(x, y)?),
                        _ => None,
                    };
                    return Ok(Composite::OutOfBound { profile, label });
                };
                let result = &t.cells[r];
                if result.profile != profile {
                    return Err(Error::Composition(format!(
                        "table entry {a} ∘_{i} {b} = {} has profile {}, expected {}",
                        result.name.as_deref().unwrap_or("?"),
                        self.graph.fmt_profile(&result.profile),
                        self.graph.fmt_profile(&profile)
                    )));
                }
                if let (Some(x), Some(y), Some(z)) = (&u.label, &inner.label, &result.label) {
                    if add(x, y)? != *z {
                        return Err(Error::Composition(format!("table entry {a} ∘_{i} {b} breaks label additivity")));
                    }
                }
                Ok(Composite::Cell(result.clone()))
            }
        }
    }

    /// Full composition `γ(u; u_1, …, u_n)`, computed by inserting the inner
    /// cells from the last slot to the first.
    pub fn gamma(&self, u: &TwoCell, inner: &[TwoCell]) -> Result<Composite> {
        let order: Vec<usize> = (1..=inner.len()).rev().collect();
        self.gamma_in_order(u, inner, &order)
    }

    /// `γ` computed by inserting the inner cells in the given slot order
    /// (a permutation of `1..=n`). The result does not depend on the order.
    pub fn gamma_in_order(&self, u: &TwoCell, inner: &[TwoCell], order: &[usize]) -> Result<Composite> {
        if inner.len() != u.arity() {
            return Err(Error::Composition(format!("γ needs {} inner cells, got {}", u.arity(), inner.len())));
        }
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (1..=inner.len()).collect::<Vec<_>>() {
            return Err(Error::Composition("insertion order is not a permutation of the slots".into()));
        }
        for (j, c) in inner.iter().enumerate() {
            if c.output() != u.input(j + 1) {
                return Err(Error::Composition(format!("inner cell {} does not match slot {}", j + 1, j + 1)));
            }
        }
        self.gamma_unchecked(u, inner, order)
    }

    fn gamma_unchecked(&self, u: &TwoCell, inner: &[TwoCell], order: &[usize]) -> Result<Composite> {
        let mut acc = u.clone();
        let mut done = vec![false; inner.len()];
        for &j in order {
            // each earlier inserted cell replaced one slot by its own inputs
            let slot = (1..j).filter(|&k| done[k - 1]).fold(j, |s, k| s + inner[k - 1].arity() - 1);
            match self.compose_i(&acc, slot, &inner[j - 1])? {
                Composite::Cell(c) => acc = c,
                oob => return Ok(oob),
            }
            done[j - 1] = true;
        }
        Ok(Composite::Cell(acc))
    }

    pub fn fmt_cell(&self, c: &TwoCell) -> String {
        let mut s = String::new();
        if let Some(n) = &c.name {
            s.push_str(n);
            s.push(':');
        }
        s.push_str(&self.graph.fmt_profile(&c.profile));
        if let Some(b) = &c.label {
            s.push_str(&b.to_string());
        }
        s
    }

    /// Cells of input length at most `bound`, grouped by output edge.
    fn by_output(&self, bound: usize) -> Vec<Vec<TwoCell>> {
        let mut out = vec![Vec::new(); self.graph.edge_count()];
        for c in self.cells() {
            if c.arity() <= bound {
                out[c.output()].push(c);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub law: String,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub pass: bool,
    pub arity_bound: usize,
    pub checked: usize,
    pub skipped_out_of_bound: usize,
    pub violation: Option<AxiomViolation>,
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "axioms {} (arity ≤ {}, {} identities checked, {} skipped out of bound)",
            if self.pass { "PASS" } else { "FAIL" },
            self.arity_bound,
            self.checked,
            self.skipped_out_of_bound
        )?;
        if let Some(v) = &self.violation {
            write!(f, "\n  {} violated, witness: {}", v.law, v.witness)?;
        }
        Ok(())
    }
}

enum Outcome {
    Equal,
    Skipped,
    Violated(String),
}

/// Checks the nested and parallel associativity identities and both unit
/// laws for every composable configuration whose cells and composites have
/// input length at most `arity_bound`. Stops at the first violation.
pub fn check_axioms(fc: &FcInstance, arity_bound: usize) -> AxiomReport {
    let bound = arity_bound.min(fc.max_len);
    let by_out = fc.by_output(bound);
    let mut report =
        AxiomReport { pass: true, arity_bound: bound, checked: 0, skipped_out_of_bound: 0, violation: None };
    let record = |report: &mut AxiomReport, law: &str, o: Result<Outcome>| -> bool {
        match o {
            Ok(Outcome::Equal) => report.checked += 1,
            Ok(Outcome::Skipped) => report.skipped_out_of_bound += 1,
            Ok(Outcome::Violated(w)) => {
                report.pass = false;
                report.violation = Some(AxiomViolation { law: law.into(), witness: w });
                return false;
            }
            Err(e) => {
                report.pass = false;
                report.violation = Some(AxiomViolation { law: law.into(), witness: e.to_string() });
                return false;
            }
        }
        true
    };
    let step = |a: &TwoCell, i: usize, b: &TwoCell| -> Result<Option<TwoCell>> { Ok(fc.compose_i(a, i, b)?.cell()) };

    for lam in by_out.iter().flatten() {
        // unit laws
        let o = (|| -> Result<Outcome> {
            let id = fc.identity_cell(lam.output())?;
            Ok(match step(&id, 1, lam)? {
                Some(c) if c == *lam => Outcome::Equal,
                Some(c) => Outcome::Violated(format!("id ∘_1 {} = {}", fc.fmt_cell(lam), fc.fmt_cell(&c))),
                None => Outcome::Skipped,
            })
        })();
        if !record(&mut report, "left unit", o) {
            return report;
        }
        for i in 1..=lam.arity() {
            let o = (|| -> Result<Outcome> {
                let id = fc.identity_cell(lam.input(i))?;
                Ok(match step(lam, i, &id)? {
                    Some(c) if c == *lam => Outcome::Equal,
                    Some(c) => Outcome::Violated(format!("{} ∘_{i} id = {}", fc.fmt_cell(lam), fc.fmt_cell(&c))),
                    None => Outcome::Skipped,
                })
            })();
            if !record(&mut report, "right unit", o) {
                return report;
            }
        }

        let l = lam.arity();
        for i in 1..=l {
            for mu in &by_out[lam.input(i)] {
                let m = mu.arity();
                if l + m - 1 > bound {
                    continue;
                }
                // nested: (λ ∘_i μ) ∘_{i-1+j} ν = λ ∘_i (μ ∘_j ν)
                for j in 1..=m {
                    for nu in &by_out[mu.input(j)] {
                        if l + m + nu.arity() - 2 > bound || m + nu.arity() - 1 > bound {
                            continue;
                        }
                        let o = (|| -> Result<Outcome> {
                            let (Some(lm), Some(mn)) = (step(lam, i, mu)?, step(mu, j, nu)?) else {
                                return Ok(Outcome::Skipped);
                            };
                            let (Some(lhs), Some(rhs)) = (step(&lm, i - 1 + j, nu)?, step(lam, i, &mn)?) else {
                                return Ok(Outcome::Skipped);
                            };
                            Ok(if lhs == rhs {
                                Outcome::Equal
                            } else {
                                Outcome::Violated(format!(
                                    "λ={}, i={i}, μ={}, j={j}, ν={}: {} ≠ {}",
                                    fc.fmt_cell(lam),
                                    fc.fmt_cell(mu),
                                    fc.fmt_cell(nu),
                                    fc.fmt_cell(&lhs),
                                    fc.fmt_cell(&rhs)
                                ))
                            })
                        })();
                        if !record(&mut report, "nested associativity", o) {
                            return report;
                        }
                    }
                }
                // parallel: (λ ∘_i μ) ∘_{k-1+m} ν = (λ ∘_k ν) ∘_i μ for i < k
                for k in i + 1..=l {
                    for nu in &by_out[lam.input(k)] {
                        if l + m + nu.arity() - 2 > bound || l + nu.arity() - 1 > bound {
                            continue;
                        }
                        let o = (|| -> Result<Outcome> {
                            let (Some(lm), Some(ln)) = (step(lam, i, mu)?, step(lam, k, nu)?) else {
                                return Ok(Outcome::Skipped);
                            };
                            let (Some(lhs), Some(rhs)) = (step(&lm, k - 1 + m, nu)?, step(&ln, i, mu)?) else {
                                return Ok(Outcome::Skipped);
                            };
                            Ok(if lhs == rhs {
                                Outcome::Equal
                            } else {
                                Outcome::Violated(format!(
                                    "λ={}, i={i}, μ={}, k={k}, ν={}: {} ≠ {}",
                                    fc.fmt_cell(lam),
                                    fc.fmt_cell(mu),
                                    fc.fmt_cell(nu),
                                    fc.fmt_cell(&lhs),
                                    fc.fmt_cell(&rhs)
                                ))
                            })
                        })();
                        if !record(&mut report, "parallel associativity", o) {
                            return report;
                        }
                    }
                }
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderReport {
    pub pass: bool,
    pub arity_bound: usize,
    pub configurations: usize,
    pub orders_compared: usize,
    pub skipped_out_of_bound: usize,
    /// Partial configurations dropped because their labels already exceed
    /// the truncation.
    pub pruned_by_label: usize,
    pub violation: Option<String>,
}

impl fmt::Display for OrderReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "γ order-independence {} (arity ≤ {}, {} configurations, {} insertion orders, {} skipped out of bound, {} pruned by label)",
            if self.pass { "PASS" } else { "FAIL" },
            self.arity_bound,
            self.configurations,
            self.orders_compared,
            self.skipped_out_of_bound,
            self.pruned_by_label
        )?;
        if let Some(v) = &self.violation {
            write!(f, "\n  witness: {v}")?;
        }
        Ok(())
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n);
            out.push(q);
        }
    }
    out
}

/// Computes `γ(u; u_1, …, u_n)` under every insertion order of the inner
/// cells and compares the results, for every configuration whose cells and
/// composite have input length at most `arity_bound`.
pub fn check_gamma_orders(fc: &FcInstance, arity_bound: usize) -> OrderReport {
    let bound = arity_bound.min(fc.max_len);
    let by_out = fc.by_output(bound);
    let mut report = OrderReport {
        pass: true,
        arity_bound: bound,
        configurations: 0,
        orders_compared: 0,
        skipped_out_of_bound: 0,
        pruned_by_label: 0,
        violation: None,
    };
    // labels add under composition, so once the chosen cells weigh more than
    // the truncation every insertion order leaves the instance
    let max_weight = match &fc.kind {
        InstanceKind::Labeled(lfc) => lfc.monoid.truncation,
        _ => u32::MAX,
    };
    let weight = |c: &TwoCell| c.label.as_ref().map_or(0, MonoidElem::weight);
    for u in by_out.iter().flatten() {
        let orders = permutations(u.arity());
        // depth-first choice of one inner cell per slot, pruned by total arity and label weight
        let mut stack: Vec<(Vec<TwoCell>, usize, u32)> = vec![(Vec::new(), 0, weight(u))];
        while let Some((chosen, total, w)) = stack.pop() {
            if chosen.len() == u.arity() {
                report.configurations += 1;
                let mut first: Option<Composite> = None;
                for (k, ord) in orders.iter().enumerate() {
                    // the first call validates the configuration for all orders
                    let r =
                        if k == 0 { fc.gamma_in_order(u, &chosen, ord) } else { fc.gamma_unchecked(u, &chosen, ord) };
                    let r = match r {
                        Ok(r) => r,
                        Err(e) => {
                            report.pass = false;
                            report.violation = Some(e.to_string());
                            return report;
                        }
                    };
                    if matches!(r, Composite::OutOfBound { .. }) {
                        report.skipped_out_of_bound += 1;
                        continue;
                    }
                    report.orders_compared += 1;
                    match &first {
                        None => first = Some(r),
                        Some(f) if *f == r => {}
                        Some(_) => {
                            let inner: Vec<_> = chosen.iter().map(|c| fc.fmt_cell(c)).collect();
                            report.pass = false;
                            report.violation = Some(format!(
                                "γ({}; {}) depends on the insertion order {ord:?}",
                                fc.fmt_cell(u),
                                inner.join(", ")
                            ));
                            return report;
                        }
                    }
                }
                continue;
            }
            let slot = chosen.len() + 1;
            for c in &by_out[u.input(slot)] {
                if total + c.arity() > bound {
                    continue;
                }
                if w + weight(c) > max_weight {
                    report.pruned_by_label += 1;
                    continue;
                }
                let mut next = chosen.clone();
                next.push(c.clone());
                stack.push((next, total + c.arity(), w + weight(c)));
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorWitness {
    pub outer: String,
    pub slot: usize,
    pub inner: String,
    pub composite: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorClosedReport {
    pub closed: bool,
    pub bound: usize,
    pub pairs_checked: usize,
    pub witness: Option<FactorWitness>,
}

impl fmt::Display for FactorClosedReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "factor-closed: {} (input length ≤ {}, {} composable pairs)",
            if self.closed { "yes" } else { "no" },
            self.bound,
            self.pairs_checked
        )?;
        if let Some(w) = &self.witness {
            write!(
                f,
                "\n  witness: {} ∘_{} {} = {} lies in the sub, a factor does not",
                w.outer, w.slot, w.inner, w.composite
            )?;
        }
        Ok(())
    }
}

/// Whether every composable pair `(u, i, u')` of `fc` (inputs and composite
/// of length at most `bound`) whose composite lies in `sub` has both factors
/// in `sub`. `sub` must be an instance over the same graph.
pub fn is_factor_closed(fc: &FcInstance, sub: &FcInstance, bound: usize) -> Result<FactorClosedReport> {
    if !Arc::ptr_eq(&fc.graph, &sub.graph) && *fc.graph != *sub.graph {
        return Err(Error::NotSubgraph("sub-instance lives on a different graph".into()));
    }
    let bound = bound.min(fc.max_len);
    let by_out = fc.by_output(bound);
    let mut report = FactorClosedReport { closed: true, bound, pairs_checked: 0, witness: None };
    for u in by_out.iter().flatten() {
        for i in 1..=u.arity() {
            for v in &by_out[u.input(i)] {
                if u.arity() + v.arity() - 1 > bound {
                    continue;
                }
                report.pairs_checked += 1;
                let Some(c) = fc.compose_i(u, i, v)?.cell() else { continue };
                if sub.contains(&c) && !(sub.contains(u) && sub.contains(v)) {
                    report.closed = false;
                    report.witness = Some(FactorWitness {
                        outer: fc.fmt_cell(u),
                        slot: i,
                        inner: fc.fmt_cell(v),
                        composite: fc.fmt_cell(&c),
                    });
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_bimodule_graph, build_pair_graph, build_partition_subgraph};
    use crate::label::LabelMonoid;

    fn bimodule_pl(max_len: usize) -> FcInstance {
        profile_loop_instance(Arc::new(build_bimodule_graph()), max_len)
    }

    fn cell(fc: &FcInstance, inputs: &[&str], out: &str) -> TwoCell {
        TwoCell { profile: fc.graph().profile(inputs, out).unwrap(), label: None, name: None }
    }

    #[test]
    fn identities() {
        let g = Arc::new(DirectedGraph::new(&["v"], &[("e", "v", "v")]).unwrap());
        let pl = profile_loop_instance(g.clone(), 3);
        let id = pl.identity_cell(0).unwrap();
        assert_eq!(pl.fmt_cell(&id), "(e;e)");
        assert_eq!(id.arity(), 1);
        let lab = labeled_instance(LabelingFc::new(g, LabelMonoid::new(1, 2).unwrap(), false), 3);
        assert_eq!(lab.identity_cell(0).unwrap().label, Some(MonoidElem(vec![0])));
        assert!(pl.identity_cell(4).is_err());
    }

    #[test]
    fn substitution() {
        let fc = bimodule_pl(4);
        let u = cell(&fc, &["e0", "e01", "e1"], "e01");
        let v = cell(&fc, &["e0", "e01"], "e01");
        let c = fc.compose_i(&u, 2, &v).unwrap().cell().unwrap();
        assert_eq!(fc.fmt_cell(&c), "(e0,e0,e01,e1;e01)");
        for i in 1..=3 {
            let id = fc.identity_cell(u.input(i)).unwrap();
            assert_eq!(fc.compose_i(&u, i, &id).unwrap().cell().unwrap(), u);
        }
        // empty inner cell removes the slot
        let empty = cell(&fc, &[], "e0");
        let c = fc.compose_i(&u, 1, &empty).unwrap().cell().unwrap();
        assert_eq!(fc.fmt_cell(&c), "(e01,e1;e01)");
        assert!(matches!(fc.compose_i(&u, 1, &v), Err(Error::Composition(_))));
        assert!(fc.compose_i(&u, 4, &v).is_err());
        // beyond the enumeration bound
        let small = bimodule_pl(3);
        assert!(matches!(small.compose_i(&u, 2, &v).unwrap(), Composite::OutOfBound { .. }));
    }

    #[test]
    fn gamma_orders_agree() {
        let fc = bimodule_pl(6);
        let u = cell(&fc, &["e0", "e01", "e1"], "e01");
        let inner = vec![cell(&fc, &["e0", "e0"], "e0"), cell(&fc, &["e01"], "e01"), cell(&fc, &[], "e1")];
        let a = fc.gamma(&u, &inner).unwrap();
        let b = fc.gamma_in_order(&u, &inner, &[1, 2, 3]).unwrap();
        let c = fc.gamma_in_order(&u, &inner, &[2, 3, 1]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(fc.fmt_cell(&a.cell().unwrap()), "(e0,e0,e01;e01)");
        let ids: Vec<_> = (1..=3).map(|i| fc.identity_cell(u.input(i)).unwrap()).collect();
        assert_eq!(fc.gamma(&u, &ids).unwrap().cell().unwrap(), u);
        assert!(fc.gamma(&u, &inner[..2]).is_err());
        let rep = check_gamma_orders(&bimodule_pl(3), 3);
        assert!(rep.pass, "{rep}");
        assert!(rep.configurations > 0);
    }

    #[test]
    fn labeled_gamma_adds() {
        let g = Arc::new(DirectedGraph::new(&["v"], &[("e", "v", "v")]).unwrap());
        let fc = labeled_instance(LabelingFc::new(g.clone(), LabelMonoid::new(1, 4).unwrap(), false), 4);
        let lab = |ins: &[&str], b: u32| TwoCell {
            profile: g.profile(ins, "e").unwrap(),
            label: Some(MonoidElem(vec![b])),
            name: None,
        };
        let u = lab(&["e", "e"], 1);
        let r = fc.gamma(&u, &[lab(&["e"], 2), lab(&[], 1)]).unwrap().cell().unwrap();
        assert_eq!(r.label, Some(MonoidElem(vec![4])));
    }

    #[test]
    fn labeled_fibers_and_bounds() {
        let g = Arc::new(build_bimodule_graph());
        let fc = labeled_instance(LabelingFc::new(g.clone(), LabelMonoid::new(1, 1).unwrap(), false), 3);
        let l = g.profile(&["e0"], "e0").unwrap();
        let labels: Vec<_> = fc.fiber(&l).into_iter().map(|c| c.label.unwrap()).collect();
        assert_eq!(labels, vec![MonoidElem(vec![0]), MonoidElem(vec![1])]);
        let one = TwoCell { profile: l.clone(), label: Some(MonoidElem(vec![1])), name: None };
        match fc.compose_i(&one, 1, &one).unwrap() {
            Composite::OutOfBound { label, .. } => assert_eq!(label, Some(MonoidElem(vec![2]))),
            other => panic!("expected out-of-bound, got {other:?}"),
        }
    }

    #[test]
    fn audits() {
        assert!(check_axioms(&bimodule_pl(3), 3).pass);
        let g = Arc::new(DirectedGraph::new(&["v"], &[("e", "v", "v")]).unwrap());
        let lab = labeled_instance(LabelingFc::new(g, LabelMonoid::new(1, 2).unwrap(), false), 3);
        assert!(check_axioms(&lab, 3).pass);
    }

    fn tiny_table(corrupt: bool) -> FcInstance {
        let g = Arc::new(DirectedGraph::new(&["v"], &[("e", "v", "v")]).unwrap());
        let mut t = CellTable::new();
        let p0 = g.profile(&[], "e").unwrap();
        let p1 = g.profile(&["e"], "e").unwrap();
        t.add_cell("c", p0.clone(), None).unwrap();
        t.add_cell("c2", p0, None).unwrap();
        t.add_cell("id", p1.clone(), None).unwrap();
        t.add_cell("f", p1, None).unwrap();
        t.set_unit(0, "id").unwrap();
        for x in ["id", "f", "c", "c2"] {
            t.set_compose("id", 1, x, x).unwrap();
        }
        t.set_compose("f", 1, "id", "f").unwrap();
        t.set_compose("f", 1, "c", "c2").unwrap();
        t.set_compose("f", 1, "c2", "c2").unwrap();
        // f is idempotent; making it an involution breaks (f∘f)∘c = f∘(f∘c)
        t.set_compose("f", 1, "f", if corrupt { "id" } else { "f" }).unwrap();
        table_instance(g, t)
    }

    #[test]
    fn table_audit_catches_corruption() {
        assert!(check_axioms(&tiny_table(false), 1).pass);
        let bad = check_axioms(&tiny_table(true), 1);
        assert!(!bad.pass);
        assert!(bad.violation.is_some());
    }

    #[test]
    fn factor_closed_examples() {
        let g = Arc::new(build_pair_graph(&["a", "b"]).unwrap());
        let fc = profile_loop_instance(g.clone(), 3);
        let part = build_partition_subgraph(&["a", "b"], &[vec!["a"], vec!["b"]]).unwrap();
        let sub = full_submulticategory(&fc, &part).unwrap();
        assert!(is_factor_closed(&fc, &sub, 3).unwrap().closed);
        assert!(check_axioms(&sub, 3).pass);
        let ba = g.edge_id("(b,a)").unwrap();
        assert!(sub.cells().iter().all(|c| !c.profile.inputs.edges.contains(&ba) && c.output() != ba));

        let only_ab = DirectedGraph::new(&["a", "b"], &[("(a,b)", "a", "b")]).unwrap();
        let bad = full_submulticategory(&fc, &only_ab).unwrap();
        let r = is_factor_closed(&fc, &bad, 3).unwrap();
        assert!(!r.closed);
        let w = r.witness.unwrap();
        assert_eq!(w.composite, "((a,b);(a,b))");

        let same = full_submulticategory(&fc, &g).unwrap();
        assert!(is_factor_closed(&fc, &same, 3).unwrap().closed);
        assert_eq!(same.cells(), fc.cells());
    }
}
