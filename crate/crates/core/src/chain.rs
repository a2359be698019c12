//! Exact graded linear algebra over the rationals and the dg endomorphism
//! fc-multicategory `End(X)`.
//!
//! A [`MultiMap`] `X(e_1) ⊗ … ⊗ X(e_n) → X(e')` is stored sparsely, keyed by
//! tuples of basis indices. Degrees follow the shifted convention used by the
//! free presets, so every structure map has degree one. Arity-zero maps are
//! elements of the output complex (the single key is the empty tuple).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{enumerate_profile_loops, DirectedGraph, EdgeId};
use crate::scalar::{self, Scalar};

/// Sparse vector over a basis, indexed by basis position.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vector(BTreeMap<usize, Scalar>);

impl Vector {
    pub fn zero() -> Self {
        Vector(BTreeMap::new())
    }

    pub fn basis(i: usize) -> Self {
        Vector(BTreeMap::from([(i, scalar::one())]))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.0.get(&i).cloned().unwrap_or_else(scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.0.iter().map(|(&i, c)| (i, c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_coeff(&mut self, i: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(i).or_insert_with(scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&i);
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &Vector, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (i, x) in other.iter() {
            self.add_coeff(i, &(x * c));
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Vector {
        let mut out = Vector::zero();
        out.add_scaled(self, c);
        out
    }
}

/// Basis element names with their (shifted) degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedBasis {
    pub elements: Vec<(String, i64)>,
}

impl GradedBasis {
    pub fn new(elements: Vec<(String, i64)>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for (id, _) in &elements {
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidComplex(format!("duplicate basis element `{id}`")));
            }
        }
        Ok(GradedBasis { elements })
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.elements[i].1
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i].0
    }

    pub fn index(&self, id: &str) -> Result<usize> {
        self.elements
            .iter()
            .position(|(n, _)| n == id)
            .ok_or_else(|| Error::Lookup { kind: "basis element", id: id.to_string() })
    }
}

/// A finite-dimensional cochain complex with an exact differential of
/// degree `+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplex {
    basis: GradedBasis,
    d: Vec<Vector>,
    /// Transpose of `d`: for each basis element `z`, the pairs `(x, c)` with
    /// `c` the coefficient of `z` in `d x`.
    dt: Vec<Vec<(usize, Scalar)>>,
}

impl CochainComplex {
    /// Builds from differential entries `(from, to, coeff)`, meaning
    /// `d(from)` has coefficient `coeff` on `to`.
    pub fn new(basis: GradedBasis, entries: &[(usize, usize, Scalar)]) -> Result<Self> {
        let n = basis.dim();
        let mut d = vec![Vector::zero(); n];
        for (from, to, c) in entries {
            if *from >= n || *to >= n {
                return Err(Error::InvalidComplex(format!("differential entry {from} -> {to} out of range")));
            }
            if !c.is_zero() && basis.degree(*to) != basis.degree(*from) + 1 {
                return Err(Error::InvalidComplex(format!(
                    "d({}) has a component on {} but degrees are {} and {}",
                    basis.name(*from),
                    basis.name(*to),
                    basis.degree(*from),
                    basis.degree(*to)
                )));
            }
            d[*from].add_coeff(*to, c);
        }
        let mut dt = vec![Vec::new(); n];
        for (x, v) in d.iter().enumerate() {
            for (z, c) in v.iter() {
                dt[z].push((x, c.clone()));
            }
        }
        let cx = CochainComplex { basis, d, dt };
        for x in 0..n {
            let dd = cx.apply_d(&cx.d[x]);
            if !dd.is_zero() {
                return Err(Error::InvalidComplex(format!("d² ≠ 0 on {}", cx.basis.name(x))));
            }
        }
        Ok(cx)
    }

    /// A complex with zero differential.
    pub fn trivial(basis: GradedBasis) -> Self {
        CochainComplex::new(basis, &[]).expect("zero differential is valid")
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis.degree(i)
    }

    /// `d` of a basis element.
    pub fn d(&self, i: usize) -> &Vector {
        &self.d[i]
    }

    pub fn apply_d(&self, v: &Vector) -> Vector {
        let mut out = Vector::zero();
        for (i, c) in v.iter() {
            out.add_scaled(&self.d[i], c);
        }
        out
    }

    pub fn transpose(&self, z: usize) -> &[(usize, Scalar)] {
        &self.dt[z]
    }

    /// Differential entries in basis order, for serialization.
    pub fn entries(&self) -> Vec<(usize, usize, Scalar)> {
        let mut out = Vec::new();
        for (x, v) in self.d.iter().enumerate() {
            for (z, c) in v.iter() {
                out.push((x, z, c.clone()));
            }
        }
        out
    }

    pub fn is_zero_differential(&self) -> bool {
        self.d.iter().all(Vector::is_zero)
    }
}

/// An element of `X(e_1) ⊗ … ⊗ X(e_n)`, keyed by basis tuples.
pub type Tensor = BTreeMap<Vec<usize>, Scalar>;

fn tensor_add(t: &mut Tensor, key: Vec<usize>, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let slot = t.entry(key.clone()).or_insert_with(scalar::zero);
    *slot += c;
    if slot.is_zero() {
        t.remove(&key);
    }
}

fn prefix_degree(cxs: &[&CochainComplex], key: &[usize], upto: usize) -> i64 {
    (0..upto).map(|k| cxs[k].degree(key[k])).sum()
}

/// The Koszul tensor differential
/// `Σ_k (-1)^{|x_1|+…+|x_{k-1}|} x_1 ⊗ … ⊗ d x_k ⊗ … ⊗ x_n`.
pub fn tensor_differential(complexes: &[&CochainComplex], t: &Tensor) -> Result<Tensor> {
    let mut total: Option<i64> = None;
    for key in t.keys() {
        if key.len() != complexes.len() {
            return Err(Error::Degree(format!("tensor with {} factors over {} complexes", key.len(), complexes.len())));
        }
        let deg = prefix_degree(complexes, key, key.len());
        if *total.get_or_insert(deg) != deg {
            return Err(Error::Degree("tensor is not homogeneous".into()));
        }
    }
    let mut out = Tensor::new();
    for (key, c) in t {
        for k in 0..key.len() {
            let s = scalar::sign(prefix_degree(complexes, key, k));
            for (z, dc) in complexes[k].d(key[k]).iter() {
                let mut nk = key.clone();
                nk[k] = z;
                tensor_add(&mut out, nk, c * dc * &s);
            }
        }
    }
    Ok(out)
}

/// A graded multilinear map `X(e_1) ⊗ … ⊗ X(e_n) → X(e')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiMap {
    pub inputs: Vec<EdgeId>,
    pub output: EdgeId,
    pub degree: i64,
    entries: BTreeMap<Vec<usize>, Vector>,
}

impl MultiMap {
    pub fn zero(inputs: Vec<EdgeId>, output: EdgeId, degree: i64) -> Self {
        MultiMap { inputs, output, degree, entries: BTreeMap::new() }
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<Vec<usize>, Vector> {
        &self.entries
    }

    /// Number of nonzero (input tuple, output basis) coefficients.
    pub fn support_size(&self) -> usize {
        self.entries.values().map(Vector::len).sum()
    }

    /// Value on a basis tuple.
    pub fn apply(&self, args: &[usize]) -> Vector {
        self.entries.get(args).cloned().unwrap_or_default()
    }

    pub fn add_value(&mut self, key: Vec<usize>, v: &Vector, c: &Scalar) {
        if v.is_zero() || c.is_zero() {
            return;
        }
        let slot = self.entries.entry(key.clone()).or_default();
        slot.add_scaled(v, c);
        if slot.is_zero() {
            self.entries.remove(&key);
        }
    }

    /// `self += c · other` for maps of the same type.
    pub fn add_scaled(&mut self, other: &MultiMap, c: &Scalar) -> Result<()> {
        if other.inputs != self.inputs || other.output != self.output {
            return Err(Error::Composition("adding maps of different types".into()));
        }
        if other.degree != self.degree && !other.is_zero() {
            return Err(Error::Degree(format!("adding maps of degrees {} and {}", self.degree, other.degree)));
        }
        for (k, v) in &other.entries {
            self.add_value(k.clone(), v, c);
        }
        Ok(())
    }

    pub fn scaled(&self, c: &Scalar) -> MultiMap {
        let mut out = MultiMap::zero(self.inputs.clone(), self.output, self.degree);
        for (k, v) in &self.entries {
            out.add_value(k.clone(), v, c);
        }
        out
    }

    /// `self - other`.
    pub fn minus(&self, other: &MultiMap) -> Result<MultiMap> {
        let mut out = self.clone();
        out.add_scaled(other, &-scalar::one())?;
        Ok(out)
    }

    /// First nonzero entry, as a witness.
    pub fn first_nonzero(&self) -> Option<(&Vec<usize>, &Vector)> {
        self.entries.iter().next()
    }
}

/// Deliberate sign errors in `End(X)`, for exercising the checkers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndFault {
    /// Omit the Koszul sign in partial composition.
    UnsignedComposition,
}

/// A simple graph `X` over `E`: one cochain complex per edge.
#[derive(Clone, Debug)]
pub struct EndX {
    graph: Arc<DirectedGraph>,
    complexes: Vec<CochainComplex>,
    fault: Option<EndFault>,
}

impl EndX {
    pub fn new(graph: Arc<DirectedGraph>, complexes: Vec<CochainComplex>) -> Result<Self> {
        if complexes.len() != graph.edge_count() {
            return Err(Error::InvalidComplex(format!(
                "{} complexes for {} edges; every edge needs exactly one",
                complexes.len(),
                graph.edge_count()
            )));
        }
        Ok(EndX { graph, complexes, fault: None })
    }

    /// The same complexes over every edge.
    pub fn uniform(graph: Arc<DirectedGraph>, complex: CochainComplex) -> Self {
        let complexes = vec![complex; graph.edge_count()];
        EndX { graph, complexes, fault: None }
    }

    pub fn with_fault(mut self, fault: EndFault) -> Self {
        self.fault = Some(fault);
        self
    }

    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    pub fn complex(&self, e: EdgeId) -> &CochainComplex {
        &self.complexes[e]
    }

    pub fn complexes(&self) -> &[CochainComplex] {
        &self.complexes
    }

    fn cxs(&self, edges: &[EdgeId]) -> Vec<&CochainComplex> {
        edges.iter().map(|&e| &self.complexes[e]).collect()
    }

    /// All basis tuples for the given input edges, in lexicographic order.
    pub fn basis_tuples(&self, inputs: &[EdgeId]) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &e in inputs {
            let dim = self.complexes[e].dim();
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..dim).map(move |i| {
                        let mut t2 = t.clone();
                        t2.push(i);
                        t2
                    })
                })
                .collect();
        }
        out
    }

    pub fn tuple_degree(&self, inputs: &[EdgeId], key: &[usize]) -> i64 {
        inputs.iter().zip(key).map(|(&e, &i)| self.complexes[e].degree(i)).sum()
    }

    /// Adds `coeff · y` to `ξ(key)`, rejecting degree-inconsistent entries.
    pub fn insert(&self, xi: &mut MultiMap, key: Vec<usize>, y: usize, coeff: Scalar) -> Result<()> {
        if key.len() != xi.arity() {
            return Err(Error::Assignment(format!("{} arguments for an arity-{} map", key.len(), xi.arity())));
        }
        for (&e, &i) in xi.inputs.iter().zip(&key) {
            if i >= self.complexes[e].dim() {
                return Err(Error::Assignment(format!(
                    "basis index {i} out of range on edge {}",
                    self.graph.edge(e).id
                )));
            }
        }
        let out = &self.complexes[xi.output];
        if y >= out.dim() {
            return Err(Error::Assignment(format!("output basis index {y} out of range")));
        }
        let expected = self.tuple_degree(&xi.inputs, &key) + xi.degree;
        if !coeff.is_zero() && out.degree(y) != expected {
            return Err(Error::Degree(format!(
                "entry {:?} -> {} of a degree-{} map lands in degree {} instead of {}",
                key,
                out.basis().name(y),
                xi.degree,
                out.degree(y),
                expected
            )));
        }
        xi.add_value(key, &Vector::basis(y), &coeff);
        Ok(())
    }

    /// Checks every stored entry for degree consistency and range.
    pub fn check_map(&self, xi: &MultiMap) -> Result<()> {
        for &e in xi.inputs.iter().chain([&xi.output]) {
            if e >= self.complexes.len() {
                return Err(Error::Assignment(format!("unknown edge {e}")));
            }
        }
        for (k, v) in &xi.entries {
            if k.len() != xi.arity() {
                return Err(Error::Assignment("key length differs from arity".into()));
            }
            for (y, _) in v.iter() {
                let mut probe = MultiMap::zero(xi.inputs.clone(), xi.output, xi.degree);
                self.insert(&mut probe, k.clone(), y, scalar::one())?;
            }
        }
        Ok(())
    }

    /// The identity 2-cell on `e`.
    pub fn identity(&self, e: EdgeId) -> MultiMap {
        let mut xi = MultiMap::zero(vec![e], e, 0);
        for i in 0..self.complexes[e].dim() {
            xi.add_value(vec![i], &Vector::basis(i), &scalar::one());
        }
        xi
    }

    /// The internal differential `d_e` as a degree-one unary map.
    pub fn differential(&self, e: EdgeId) -> MultiMap {
        let cx = &self.complexes[e];
        let mut xi = MultiMap::zero(vec![e], e, 1);
        for i in 0..cx.dim() {
            xi.add_value(vec![i], cx.d(i), &scalar::one());
        }
        xi
    }

    /// Applies `ξ` to basis arguments with one slot replaced by a vector,
    /// extending linearly in that slot.
    pub fn apply_with_vector(&self, xi: &MultiMap, args: &[usize], slot: usize, v: &Vector) -> Vector {
        let mut key = args.to_vec();
        let mut out = Vector::zero();
        for (z, c) in v.iter() {
            key[slot] = z;
            if let Some(val) = xi.entries.get(&key) {
                out.add_scaled(val, c);
            }
        }
        out
    }

    /// `(d̂ξ)(x…) = d(ξ(x…)) − Σ_k (-1)^{|ξ|+|x_1|+…+|x_{k-1}|} ξ(x_1,…,d x_k,…,x_n)`.
    pub fn hat_d(&self, xi: &MultiMap) -> Result<MultiMap> {
        self.check_edges(xi)?;
        let out_cx = &self.complexes[xi.output];
        let cxs = self.cxs(&xi.inputs);
        let mut res = MultiMap::zero(xi.inputs.clone(), xi.output, xi.degree + 1);
        for (key, v) in &xi.entries {
            res.add_value(key.clone(), &out_cx.apply_d(v), &scalar::one());
            // ξ(…, d x_k, …) hits this entry when d x_k has a component on key[k]
            for k in 0..key.len() {
                for (x, c) in cxs[k].transpose(key[k]) {
                    let mut src = key.clone();
                    src[k] = *x;
                    let s = -scalar::sign(xi.degree + prefix_degree(&cxs, &src, k));
                    res.add_value(src, v, &(c * s));
                }
            }
        }
        Ok(res)
    }

    fn check_edges(&self, xi: &MultiMap) -> Result<()> {
        let n = self.complexes.len();
        if xi.output >= n || xi.inputs.iter().any(|&e| e >= n) {
            return Err(Error::Composition("map refers to an edge outside X".into()));
        }
        Ok(())
    }

    /// `(ξ1 ∘_i ξ2)(x_1…x_{i-1}, y…, x_{i+1}…) =
    /// (-1)^{|ξ2|(|x_1|+…+|x_{i-1}|)} ξ1(x_1,…,ξ2(y…),…)`.
    pub fn compose(&self, xi1: &MultiMap, i: usize, xi2: &MultiMap) -> Result<MultiMap> {
        self.check_edges(xi1)?;
        self.check_edges(xi2)?;
        if i == 0 || i > xi1.arity() {
            return Err(Error::Composition(format!("slot {i} out of range for arity {}", xi1.arity())));
        }
        if xi1.inputs[i - 1] != xi2.output {
            return Err(Error::Composition(format!(
                "slot {i} expects edge {} but the inner map outputs {}",
                self.graph.edge(xi1.inputs[i - 1]).id,
                self.graph.edge(xi2.output).id
            )));
        }
        let mut inputs = xi1.inputs[..i - 1].to_vec();
        inputs.extend_from_slice(&xi2.inputs);
        inputs.extend_from_slice(&xi1.inputs[i..]);
        let mut res = MultiMap::zero(inputs, xi1.output, xi1.degree + xi2.degree);

        // index the inner map by output basis element
        let mut by_out: BTreeMap<usize, Vec<(&Vec<usize>, &Scalar)>> = BTreeMap::new();
        for (k2, v2) in &xi2.entries {
            for (z, c) in v2.iter() {
                by_out.entry(z).or_default().push((k2, c));
            }
        }
        let cxs1 = self.cxs(&xi1.inputs);
        for (k1, v1) in &xi1.entries {
            let Some(hits) = by_out.get(&k1[i - 1]) else { continue };
            let koszul = match self.fault {
                Some(EndFault::UnsignedComposition) => scalar::one(),
                None => scalar::sign(xi2.degree * prefix_degree(&cxs1, k1, i - 1)),
            };
            for (k2, c) in hits {
                let mut key = k1[..i - 1].to_vec();
                key.extend_from_slice(k2);
                key.extend_from_slice(&k1[i..]);
                res.add_value(key, v1, &(*c * &koszul));
            }
        }
        Ok(res)
    }

    /// Every map with a single basis coefficient `(x…) ↦ y`, over every
    /// profile-loop of input length at most `max_arity`.
    pub fn basis_maps(&self, max_arity: usize) -> Vec<MultiMap> {
        let mut out = Vec::new();
        for l in enumerate_profile_loops(&self.graph, max_arity) {
            let inputs = l.inputs.edges.clone();
            let out_cx = &self.complexes[l.output];
            for key in self.basis_tuples(&inputs) {
                let deg_in = self.tuple_degree(&inputs, &key);
                for y in 0..out_cx.dim() {
                    let mut xi = MultiMap::zero(inputs.clone(), l.output, out_cx.degree(y) - deg_in);
                    xi.add_value(key.clone(), &Vector::basis(y), &scalar::one());
                    out.push(xi);
                }
            }
        }
        out
    }

    pub fn fmt_tuple(&self, inputs: &[EdgeId], key: &[usize]) -> String {
        let parts: Vec<_> =
            inputs.iter().zip(key).map(|(&e, &i)| self.complexes[e].basis().name(i).to_string()).collect();
        format!("({})", parts.join(", "))
    }

    pub fn fmt_vector(&self, e: EdgeId, v: &Vector) -> String {
        if v.is_zero() {
            return "0".into();
        }
        let names = self.complexes[e].basis();
        let parts: Vec<_> = v.iter().map(|(i, c)| format!("{}·{}", scalar::format(c), names.name(i))).collect();
        parts.join(" + ")
    }
}

/// Result of [`check_end_dg`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndDgReport {
    pub pass: bool,
    pub maps: usize,
    pub hat_d_squared_checked: usize,
    pub leibniz_checked: usize,
    pub axioms_checked: usize,
    pub violation: Option<String>,
}

impl fmt::Display for EndDgReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "End(X) {}: {} maps, d̂² on {}, Leibniz on {} composites, operad identities on {} configurations",
            if self.pass { "PASS" } else { "FAIL" },
            self.maps,
            self.hat_d_squared_checked,
            self.leibniz_checked,
            self.axioms_checked
        )?;
        if let Some(v) = &self.violation {
            write!(f, "\n  witness: {v}")?;
        }
        Ok(())
    }
}

/// Checks `d̂² = 0`, the Leibniz identity
/// `d̂(ξ1 ∘_i ξ2) = d̂ξ1 ∘_i ξ2 + (-1)^{|ξ1|} ξ1 ∘_i d̂ξ2` and, when
/// `axioms` is set, the unit laws and both associativity identities of
/// `∘_i` on the given maps. Parallel composites commute up to the Koszul
/// sign `(-1)^{|μ||ν|}`. Stops at the first violation.
pub fn check_end_dg(x: &EndX, samples: &[MultiMap], axioms: bool) -> Result<EndDgReport> {
    let mut rep = EndDgReport {
        pass: true,
        maps: samples.len(),
        hat_d_squared_checked: 0,
        leibniz_checked: 0,
        axioms_checked: 0,
        violation: None,
    };
    let fail = |rep: &mut EndDgReport, msg: String| {
        rep.pass = false;
        rep.violation = Some(msg);
    };
    let hats: Vec<MultiMap> = samples.iter().map(|m| x.hat_d(m)).collect::<Result<_>>()?;
    for (m, h) in samples.iter().zip(&hats) {
        let hh = x.hat_d(h)?;
        rep.hat_d_squared_checked += 1;
        if !hh.is_zero() {
            fail(&mut rep, format!("d̂² ≠ 0 on a map of arity {} and degree {}", m.arity(), m.degree));
            return Ok(rep);
        }
    }
    let mut by_out: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
    for (idx, m) in samples.iter().enumerate() {
        by_out.entry(m.output).or_default().push(idx);
    }
    let none = Vec::new();
    for (a, (m1, h1)) in samples.iter().zip(&hats).enumerate() {
        for i in 1..=m1.arity() {
            for &b in by_out.get(&m1.inputs[i - 1]).unwrap_or(&none) {
                let (m2, h2) = (&samples[b], &hats[b]);
                let comp = x.compose(m1, i, m2)?;
                let lhs = x.hat_d(&comp)?;
                let mut rhs = x.compose(h1, i, m2)?;
                rhs.add_scaled(&x.compose(m1, i, h2)?, &scalar::sign(m1.degree))?;
                rep.leibniz_checked += 1;
                if lhs != rhs {
                    fail(&mut rep, format!("Leibniz fails for sample {a} ∘_{i} sample {b}"));
                    return Ok(rep);
                }
            }
        }
    }
    if !axioms {
        return Ok(rep);
    }
    for (a, l) in samples.iter().enumerate() {
        if x.compose(&x.identity(l.output), 1, l)? != *l {
            fail(&mut rep, format!("left unit law fails on sample {a}"));
            return Ok(rep);
        }
        for i in 1..=l.arity() {
            if x.compose(l, i, &x.identity(l.inputs[i - 1]))? != *l {
                fail(&mut rep, format!("right unit law fails on sample {a} at slot {i}"));
                return Ok(rep);
            }
        }
        rep.axioms_checked += 1;
        let la = l.arity();
        for i in 1..=la {
            for &b in by_out.get(&l.inputs[i - 1]).unwrap_or(&none) {
                let mu = &samples[b];
                let lm = x.compose(l, i, mu)?;
                // nested
                for j in 1..=mu.arity() {
                    for &c in by_out.get(&mu.inputs[j - 1]).unwrap_or(&none) {
                        let nu = &samples[c];
                        let lhs = x.compose(&lm, i - 1 + j, nu)?;
                        let rhs = x.compose(l, i, &x.compose(mu, j, nu)?)?;
                        rep.axioms_checked += 1;
                        if lhs != rhs {
                            fail(&mut rep, format!("nested identity fails: samples {a} ∘_{i} ({b} ∘_{j} {c})"));
                            return Ok(rep);
                        }
                    }
                }
                // parallel, i < k
                for k in i + 1..=la {
                    for &c in by_out.get(&l.inputs[k - 1]).unwrap_or(&none) {
                        let nu = &samples[c];
                        let lhs = x.compose(&lm, k - 1 + mu.arity(), nu)?;
                        let rhs = x.compose(&x.compose(l, k, nu)?, i, mu)?.scaled(&scalar::sign(mu.degree * nu.degree));
                        rep.axioms_checked += 1;
                        if lhs != rhs {
                            fail(
                                &mut rep,
                                format!("parallel identity fails: sample {a} with {b} at {i} and {c} at {k}"),
                            );
                            return Ok(rep);
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(els: &[(&str, i64)]) -> GradedBasis {
        GradedBasis::new(els.iter().map(|(n, d)| (n.to_string(), *d)).collect()).unwrap()
    }

    fn interval() -> CochainComplex {
        CochainComplex::new(basis(&[("x", 0), ("y", 1)]), &[(0, 1, scalar::one())]).unwrap()
    }

    fn one_loop() -> Arc<DirectedGraph> {
        Arc::new(DirectedGraph::new(&["v"], &[("e", "v", "v")]).unwrap())
    }

    #[test]
    fn complex_validation() {
        assert!(CochainComplex::new(basis(&[("x", 0), ("y", 0)]), &[(0, 1, scalar::one())]).is_err());
        let bad = CochainComplex::new(
            basis(&[("a", 0), ("b", 1), ("c", 2)]),
            &[(0, 1, scalar::one()), (1, 2, scalar::one())],
        );
        assert!(matches!(bad, Err(Error::InvalidComplex(_))));
        assert!(GradedBasis::new(vec![("a".into(), 0), ("a".into(), 1)]).is_err());
    }

    #[test]
    fn tensor_signs() {
        let cx = CochainComplex::new(basis(&[("x", 1), ("y", 0), ("z", 1)]), &[(1, 2, scalar::one())]).unwrap();
        // x ⊗ y with dx = 0 and |x| = 1 gives -x ⊗ dy
        let t = Tensor::from([(vec![0, 1], scalar::one())]);
        let dt = tensor_differential(&[&cx, &cx], &t).unwrap();
        assert_eq!(dt, Tensor::from([(vec![0, 2], -scalar::one())]));
        let single = tensor_differential(&[&cx], &Tensor::from([(vec![1], scalar::one())])).unwrap();
        assert_eq!(single, Tensor::from([(vec![2], scalar::one())]));
        let inhom = Tensor::from([(vec![0], scalar::one()), (vec![1], scalar::one())]);
        assert!(tensor_differential(&[&cx], &inhom).is_err());
        // d² = 0 on every basis tensor
        for a in 0..3 {
            for b in 0..3 {
                let t = Tensor::from([(vec![a, b], scalar::one())]);
                let d1 = tensor_differential(&[&cx, &cx], &t).unwrap();
                assert!(tensor_differential(&[&cx, &cx], &d1).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn hat_d_examples() {
        let x = EndX::uniform(one_loop(), interval());
        assert!(x.hat_d(&x.identity(0)).unwrap().is_zero());
        let mut xi = MultiMap::zero(vec![0], 0, 0);
        x.insert(&mut xi, vec![0], 0, scalar::one()).unwrap();
        let h = x.hat_d(&xi).unwrap();
        assert_eq!(h.degree, 1);
        assert_eq!(h.apply(&[0]), Vector::basis(1));
        assert!(h.apply(&[1]).is_zero());
        // inconsistent degree is rejected
        assert!(matches!(x.insert(&mut xi, vec![0], 1, scalar::one()), Err(Error::Degree(_))));
    }

    #[test]
    fn composition_sign() {
        let cx = CochainComplex::trivial(basis(&[("a", 1), ("b", 0), ("c", 1), ("w", 2)]));
        let x = EndX::uniform(one_loop(), cx);
        // ξ1(a, c) = w, degree 0; ξ2(b) = c, degree 1
        let mut xi1 = MultiMap::zero(vec![0, 0], 0, 0);
        x.insert(&mut xi1, vec![0, 2], 3, scalar::one()).unwrap();
        let mut xi2 = MultiMap::zero(vec![0], 0, 1);
        x.insert(&mut xi2, vec![1], 2, scalar::one()).unwrap();
        let c = x.compose(&xi1, 2, &xi2).unwrap();
        assert_eq!(c.apply(&[0, 1]), Vector::basis(3).scaled(&-scalar::one()));
        assert!(x.compose(&xi1, 3, &xi2).is_err());
        let faulty = x.clone().with_fault(EndFault::UnsignedComposition);
        assert_eq!(faulty.compose(&xi1, 2, &xi2).unwrap().apply(&[0, 1]), Vector::basis(3));
    }

    #[test]
    fn exhaustive_small_end() {
        let x = EndX::uniform(one_loop(), interval());
        let maps = x.basis_maps(2);
        let rep = check_end_dg(&x, &maps, true).unwrap();
        assert!(rep.pass, "{rep}");
        let zero = EndX::uniform(one_loop(), CochainComplex::trivial(basis(&[("p", 0), ("q", 1)])));
        for m in zero.basis_maps(2) {
            assert!(zero.hat_d(&m).unwrap().is_zero());
        }
    }

    #[test]
    fn fault_breaks_leibniz() {
        let x = EndX::uniform(one_loop(), interval()).with_fault(EndFault::UnsignedComposition);
        let maps = x.basis_maps(2);
        let rep = check_end_dg(&x, &maps, false).unwrap();
        assert!(!rep.pass);
        assert!(rep.violation.unwrap().contains("Leibniz"));
    }
}
