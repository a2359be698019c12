//! Directed graphs, composable edge paths (the free-category monad `fc` on an
//! edge set), profile-loops, and the graph constructions used by the presets.
//!
//! Vertex and edge identifiers are opaque strings at the boundary. Inside a
//! [`DirectedGraph`] they are interned as dense indices, and paths and
//! profile-loops refer to those indices. A path or profile-loop is therefore
//! only meaningful together with the graph it was built against.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

/// Raw, unvalidated graph description as it appears in interchange files.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphIssue {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub issues: Vec<GraphIssue>,
}

/// Reports duplicate ids and dangling endpoints.
pub fn validate_graph(spec: &GraphSpec) -> ValidationReport {
    let mut issues = Vec::new();
    let mut seen = HashSet::new();
    for v in &spec.vertices {
        if !seen.insert(v.as_str()) {
            issues.push(GraphIssue {
                kind: "duplicate vertex".into(),
                message: format!("vertex `{v}` declared more than once"),
            });
        }
    }
    let mut edge_ids = HashSet::new();
    for e in &spec.edges {
        if !edge_ids.insert(e.id.as_str()) {
            issues.push(GraphIssue {
                kind: "duplicate edge".into(),
                message: format!("edge `{}` declared more than once", e.id),
            });
        }
        for (end, v) in [("src", &e.src), ("tgt", &e.tgt)] {
            if !seen.contains(v.as_str()) {
                issues.push(GraphIssue {
                    kind: "dangling endpoint".into(),
                    message: format!("edge `{}` has undeclared {end} `{v}`", e.id),
                });
            }
        }
    }
    ValidationReport { valid: issues.is_empty(), issues }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: String,
    pub src: VertexId,
    pub tgt: VertexId,
}

/// A validated finite directed graph `(V, E, s, t)`.
#[derive(Clone, Debug)]
pub struct DirectedGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, VertexId>,
    edge_index: HashMap<String, EdgeId>,
    // edges keyed by (src, tgt)
    between: HashMap<(VertexId, VertexId), Vec<EdgeId>>,
    outgoing: Vec<Vec<EdgeId>>,
}

impl PartialEq for DirectedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.to_spec() == other.to_spec()
    }
}

impl Eq for DirectedGraph {}

impl DirectedGraph {
    pub fn from_spec(spec: &GraphSpec) -> Result<Self> {
        let report = validate_graph(spec);
        if !report.valid {
            let msg: Vec<_> = report.issues.iter().map(|i| i.message.clone()).collect();
            return Err(Error::InvalidGraph(msg.join("; ")));
        }
        let vertex_index: HashMap<_, _> = spec.vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let mut edges = Vec::with_capacity(spec.edges.len());
        let mut edge_index = HashMap::new();
        let mut between: HashMap<(VertexId, VertexId), Vec<EdgeId>> = HashMap::new();
        let mut outgoing = vec![Vec::new(); spec.vertices.len()];
        for (i, e) in spec.edges.iter().enumerate() {
            let src = vertex_index[&e.src];
            let tgt = vertex_index[&e.tgt];
            edges.push(Edge { id: e.id.clone(), src, tgt });
            edge_index.insert(e.id.clone(), i);
            between.entry((src, tgt)).or_default().push(i);
            outgoing[src].push(i);
        }
        Ok(DirectedGraph { vertices: spec.vertices.clone(), edges, vertex_index, edge_index, between, outgoing })
    }

    /// Convenience constructor from `(id, src, tgt)` triples.
    pub fn new<V: AsRef<str>>(vertices: &[V], edges: &[(&str, &str, &str)]) -> Result<Self> {
        Self::from_spec(&GraphSpec {
            vertices: vertices.iter().map(|v| v.as_ref().to_string()).collect(),
            edges: edges
                .iter()
                .map(|(id, s, t)| EdgeSpec { id: id.to_string(), src: s.to_string(), tgt: t.to_string() })
                .collect(),
        })
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    id: e.id.clone(),
                    src: self.vertices[e.src].clone(),
                    tgt: self.vertices[e.tgt].clone(),
                })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, id: &str) -> Result<VertexId> {
        self.vertex_index.get(id).copied().ok_or_else(|| Error::Lookup { kind: "vertex", id: id.to_string() })
    }

    pub fn edge_id(&self, id: &str) -> Result<EdgeId> {
        self.edge_index.get(id).copied().ok_or_else(|| Error::Lookup { kind: "edge", id: id.to_string() })
    }

    pub fn src(&self, e: EdgeId) -> VertexId {
        self.edges[e].src
    }

    pub fn tgt(&self, e: EdgeId) -> VertexId {
        self.edges[e].tgt
    }

    /// Edges from `u` to `w`, in declaration order.
    pub fn edges_between(&self, u: VertexId, w: VertexId) -> &[EdgeId] {
        self.between.get(&(u, w)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn outgoing(&self, v: VertexId) -> &[EdgeId] {
        &self.outgoing[v]
    }

    /// Builds a path from edge names, checking composability.
    pub fn path(&self, edges: &[&str]) -> Result<EdgePath> {
        let ids = edges.iter().map(|e| self.edge_id(e)).collect::<Result<Vec<_>>>()?;
        EdgePath::from_edges(self, ids)
    }

    /// Builds a profile-loop from edge names.
    pub fn profile(&self, inputs: &[&str], output: &str) -> Result<ProfileLoop> {
        let out = self.edge_id(output)?;
        let path = if inputs.is_empty() { EdgePath::empty(self.src(out)) } else { self.path(inputs)? };
        ProfileLoop::new(self, path, out)
    }

    pub fn fmt_path(&self, p: &EdgePath) -> String {
        if p.edges.is_empty() {
            format!("∅@{}", self.vertices[p.source])
        } else {
            let names: Vec<_> = p.edges.iter().map(|&e| self.edges[e].id.as_str()).collect();
            names.join(",")
        }
    }

    pub fn fmt_profile(&self, l: &ProfileLoop) -> String {
        format!("({};{})", self.fmt_path(&l.inputs), self.edges[l.output].id)
    }
}

/// An element of `E* = fc(E)`: a composable string of edges. Empty paths keep
/// an explicit basepoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgePath {
    pub source: VertexId,
    pub target: VertexId,
    pub edges: Vec<EdgeId>,
}

impl EdgePath {
    pub fn empty(v: VertexId) -> Self {
        EdgePath { source: v, target: v, edges: Vec::new() }
    }

    pub fn single(g: &DirectedGraph, e: EdgeId) -> Self {
        EdgePath { source: g.src(e), target: g.tgt(e), edges: vec![e] }
    }

    /// A nonempty composable path. Empty edge lists are rejected because the
    /// basepoint would be undetermined.
    pub fn from_edges(g: &DirectedGraph, edges: Vec<EdgeId>) -> Result<Self> {
        let (Some(&first), Some(&last)) = (edges.first(), edges.last()) else {
            return Err(Error::Composition("empty edge list has no basepoint".into()));
        };
        for e in &edges {
            if *e >= g.edge_count() {
                return Err(Error::Lookup { kind: "edge", id: e.to_string() });
            }
        }
        for w in edges.windows(2) {
            if g.tgt(w[0]) != g.src(w[1]) {
                return Err(Error::Composition(format!(
                    "edges `{}` and `{}` are not composable",
                    g.edge(w[0]).id,
                    g.edge(w[1]).id
                )));
            }
        }
        Ok(EdgePath { source: g.src(first), target: g.tgt(last), edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Vertex sequence `v_0, …, v_n` along the path.
    pub fn vertices(&self, g: &DirectedGraph) -> Vec<VertexId> {
        let mut vs = Vec::with_capacity(self.edges.len() + 1);
        vs.push(self.source);
        vs.extend(self.edges.iter().map(|&e| g.tgt(e)));
        vs
    }

    /// The sub-path of edges `[start, start + len)`; empty sub-paths are based
    /// at the vertex in position `start`.
    pub fn slice(&self, g: &DirectedGraph, start: usize, len: usize) -> EdgePath {
        let edges = self.edges[start..start + len].to_vec();
        if edges.is_empty() {
            let v = if start == 0 { self.source } else { g.tgt(self.edges[start - 1]) };
            EdgePath::empty(v)
        } else {
            EdgePath { source: g.src(edges[0]), target: g.tgt(edges[edges.len() - 1]), edges }
        }
    }

    /// Replaces the edge at 0-based `pos` by `inner`, which must span the
    /// same endpoints as that edge.
    pub fn substitute(&self, g: &DirectedGraph, pos: usize, inner: &EdgePath) -> Result<EdgePath> {
        let Some(&e) = self.edges.get(pos) else {
            return Err(Error::Composition(format!("slot {} out of range for arity {}", pos + 1, self.len())));
        };
        if g.src(e) != inner.source || g.tgt(e) != inner.target {
            return Err(Error::Composition(format!(
                "path {} does not span edge `{}`",
                g.fmt_path(inner),
                g.edge(e).id
            )));
        }
        let mut edges = Vec::with_capacity(self.len() + inner.len() - 1);
        edges.extend_from_slice(&self.edges[..pos]);
        edges.extend_from_slice(&inner.edges);
        edges.extend_from_slice(&self.edges[pos + 1..]);
        Ok(EdgePath { source: self.source, target: self.target, edges })
    }
}

/// Concatenation `E* ×_V ⋯ ×_V E* → E*`.
pub fn concatenate(paths: &[EdgePath]) -> Result<EdgePath> {
    let Some(first) = paths.first() else {
        return Err(Error::Composition("cannot concatenate an empty list of paths".into()));
    };
    let mut out = first.clone();
    for p in &paths[1..] {
        if out.target != p.source {
            return Err(Error::Composition(format!(
                "path ending at vertex {} cannot be followed by a path starting at vertex {}",
                out.target, p.source
            )));
        }
        out.edges.extend_from_slice(&p.edges);
        out.target = p.target;
    }
    Ok(out)
}

/// All composable paths of length at most `max_len`, including one empty
/// path per vertex. Ordered by length, then lexicographically.
pub fn enumerate_paths(g: &DirectedGraph, max_len: usize) -> Vec<EdgePath> {
    let mut out: Vec<EdgePath> = (0..g.vertex_count()).map(EdgePath::empty).collect();
    let mut frontier: Vec<EdgePath> = (0..g.edge_count()).map(|e| EdgePath::single(g, e)).collect();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for p in &frontier {
            for &e in g.outgoing(p.target) {
                let mut q = p.clone();
                q.edges.push(e);
                q.target = g.tgt(e);
                next.push(q);
            }
        }
        out.append(&mut frontier);
        frontier = next;
    }
    out
}

/// A 2-cell boundary `(ē; e')` with `s*(ē) = s(e')` and `t*(ē) = t(e')`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProfileLoop {
    pub inputs: EdgePath,
    pub output: EdgeId,
}

impl ProfileLoop {
    pub fn new(g: &DirectedGraph, inputs: EdgePath, output: EdgeId) -> Result<Self> {
        if output >= g.edge_count() {
            return Err(Error::Lookup { kind: "edge", id: output.to_string() });
        }
        if !is_profile_loop(g, &inputs, output)? {
            return Err(Error::Composition(format!(
                "({};{}) is not a profile-loop",
                g.fmt_path(&inputs),
                g.edge(output).id
            )));
        }
        Ok(ProfileLoop { inputs, output })
    }

    /// The identity profile-loop `(e; e)`.
    pub fn identity(g: &DirectedGraph, e: EdgeId) -> Self {
        ProfileLoop { inputs: EdgePath::single(g, e), output: e }
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_identity(&self) -> bool {
        self.inputs.edges.len() == 1 && self.inputs.edges[0] == self.output
    }

    /// Profile of `u ∘_i u'` (slot `i` is 1-based).
    pub fn compose(&self, g: &DirectedGraph, i: usize, inner: &ProfileLoop) -> Result<ProfileLoop> {
        if i == 0 || i > self.arity() {
            return Err(Error::Composition(format!("slot {i} out of range for arity {}", self.arity())));
        }
        if self.inputs.edges[i - 1] != inner.output {
            return Err(Error::Composition(format!(
                "slot {i} carries `{}` but the inner cell outputs `{}`",
                g.edge(self.inputs.edges[i - 1]).id,
                g.edge(inner.output).id
            )));
        }
        Ok(ProfileLoop { inputs: self.inputs.substitute(g, i - 1, &inner.inputs)?, output: self.output })
    }
}

pub fn is_profile_loop(g: &DirectedGraph, p: &EdgePath, e: EdgeId) -> Result<bool> {
    if e >= g.edge_count() {
        return Err(Error::Lookup { kind: "edge", id: e.to_string() });
    }
    if p.source >= g.vertex_count() || p.target >= g.vertex_count() {
        return Err(Error::Lookup { kind: "vertex", id: p.source.max(p.target).to_string() });
    }
    if let Some(&bad) = p.edges.iter().find(|&&x| x >= g.edge_count()) {
        return Err(Error::Lookup { kind: "edge", id: bad.to_string() });
    }
    Ok(g.src(e) == p.source && g.tgt(e) == p.target)
}

/// All profile-loops whose input length is at most `max_len`.
pub fn enumerate_profile_loops(g: &DirectedGraph, max_len: usize) -> Vec<ProfileLoop> {
    let mut out = Vec::new();
    for p in enumerate_paths(g, max_len) {
        for &e in g.edges_between(p.source, p.target) {
            out.push(ProfileLoop { inputs: p.clone(), output: e });
        }
    }
    out
}

/// A directed subgraph, recorded as index sets inside its ambient graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgraph {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
}

impl Subgraph {
    pub fn full(g: &DirectedGraph) -> Self {
        Subgraph { vertices: (0..g.vertex_count()).collect(), edges: (0..g.edge_count()).collect() }
    }

    /// Checks that every edge has both endpoints among the vertices.
    pub fn new(g: &DirectedGraph, vertices: BTreeSet<VertexId>, edges: BTreeSet<EdgeId>) -> Result<Self> {
        for &e in &edges {
            if !vertices.contains(&g.src(e)) || !vertices.contains(&g.tgt(e)) {
                return Err(Error::NotSubgraph(format!(
                    "edge `{}` has an endpoint outside the vertex set",
                    g.edge(e).id
                )));
            }
        }
        Ok(Subgraph { vertices, edges })
    }

    /// Locates `sub` inside `g` by ids. Endpoints must agree.
    pub fn locate(g: &DirectedGraph, sub: &DirectedGraph) -> Result<Self> {
        let mut vertices = BTreeSet::new();
        for name in sub.vertex_names() {
            let v = g
                .vertex(name)
                .map_err(|_| Error::NotSubgraph(format!("vertex `{name}` is not in the ambient graph")))?;
            vertices.insert(v);
        }
        let mut edges = BTreeSet::new();
        for e in sub.edges() {
            let id = g
                .edge_id(&e.id)
                .map_err(|_| Error::NotSubgraph(format!("edge `{}` is not in the ambient graph", e.id)))?;
            if g.vertex_name(g.src(id)) != sub.vertex_name(e.src) || g.vertex_name(g.tgt(id)) != sub.vertex_name(e.tgt)
            {
                return Err(Error::NotSubgraph(format!(
                    "edge `{}` has different endpoints in the ambient graph",
                    e.id
                )));
            }
            edges.insert(id);
        }
        Ok(Subgraph { vertices, edges })
    }

    pub fn contains_path(&self, p: &EdgePath) -> bool {
        if p.edges.is_empty() {
            self.vertices.contains(&p.source)
        } else {
            p.edges.iter().all(|e| self.edges.contains(e))
        }
    }

    pub fn contains_profile(&self, l: &ProfileLoop) -> bool {
        self.edges.contains(&l.output) && self.contains_path(&l.inputs)
    }

    /// Endpoint-closedness decided by exact reachability: the subgraph fails
    /// iff some ambient edge outside it joins `u` to `w` while the subgraph
    /// contains a (possibly empty) path from `u` to `w`.
    pub fn is_endpoint_closed(&self, g: &DirectedGraph) -> bool {
        let n = g.vertex_count();
        for &u in &self.vertices {
            let mut seen = vec![false; n];
            seen[u] = true;
            let mut queue = VecDeque::from([u]);
            while let Some(x) = queue.pop_front() {
                for &e in g.outgoing(x) {
                    if self.edges.contains(&e) && !seen[g.tgt(e)] {
                        seen[g.tgt(e)] = true;
                        queue.push_back(g.tgt(e));
                    }
                }
            }
            for &e in g.outgoing(u) {
                if seen[g.tgt(e)] && !self.edges.contains(&e) {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_graph(&self, g: &DirectedGraph) -> DirectedGraph {
        let spec = GraphSpec {
            vertices: self.vertices.iter().map(|&v| g.vertex_name(v).to_string()).collect(),
            edges: self
                .edges
                .iter()
                .map(|&e| EdgeSpec {
                    id: g.edge(e).id.clone(),
                    src: g.vertex_name(g.src(e)).to_string(),
                    tgt: g.vertex_name(g.tgt(e)).to_string(),
                })
                .collect(),
        };
        DirectedGraph::from_spec(&spec).expect("subgraph of a valid graph is valid")
    }

    /// All subgraphs of `g` (vertex subsets times admissible edge subsets).
    pub fn all(g: &DirectedGraph) -> Vec<Subgraph> {
        let mut out = Vec::new();
        for vmask in 0u32..(1 << g.vertex_count()) {
            let vertices: BTreeSet<_> = (0..g.vertex_count()).filter(|v| vmask >> v & 1 == 1).collect();
            let admissible: Vec<_> =
                (0..g.edge_count()).filter(|&e| vertices.contains(&g.src(e)) && vertices.contains(&g.tgt(e))).collect();
            for emask in 0u32..(1 << admissible.len()) {
                let edges =
                    admissible.iter().enumerate().filter(|(k, _)| emask >> k & 1 == 1).map(|(_, &e)| e).collect();
                out.push(Subgraph { vertices: vertices.clone(), edges });
            }
        }
        out
    }
}

/// Whether `sub` is endpoint-closed in `g`. `sub` must be a subgraph of `g`.
pub fn is_endpoint_closed(g: &DirectedGraph, sub: &DirectedGraph) -> Result<bool> {
    Ok(Subgraph::locate(g, sub)?.is_endpoint_closed(g))
}

fn pair_edge_id(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

fn check_vertex_set<V: AsRef<str>>(vs: &[V]) -> Result<()> {
    if vs.is_empty() {
        return Err(Error::InvalidGraph("vertex set must be nonempty".into()));
    }
    let mut seen = HashSet::new();
    for v in vs {
        if !seen.insert(v.as_ref()) {
            return Err(Error::InvalidGraph(format!("duplicate vertex `{}`", v.as_ref())));
        }
    }
    Ok(())
}

fn pair_spec<V: AsRef<str>>(vs: &[V]) -> GraphSpec {
    let vertices: Vec<String> = vs.iter().map(|v| v.as_ref().to_string()).collect();
    let mut edges = Vec::new();
    for a in &vertices {
        for b in &vertices {
            edges.push(EdgeSpec { id: pair_edge_id(a, b), src: a.clone(), tgt: b.clone() });
        }
    }
    GraphSpec { vertices, edges }
}

/// The graph with edge set `V × V`; the edge from `a` to `b` is `(a,b)`.
pub fn build_pair_graph<V: AsRef<str>>(vs: &[V]) -> Result<DirectedGraph> {
    check_vertex_set(vs)?;
    DirectedGraph::from_spec(&pair_spec(vs))
}

pub const LEFT_MODULE_VERTEX: &str = "*";
pub const RIGHT_MODULE_VERTEX: &str = "*'";

/// `V ⊔ {*}` with edges `(V × V) ⊔ ({*} × V)`; there is no loop at `*`.
pub fn build_left_module_graph<V: AsRef<str>>(vs: &[V]) -> Result<DirectedGraph> {
    module_graph(vs, LEFT_MODULE_VERTEX, true)
}

/// `V ⊔ {*'}` with edges `(V × V) ⊔ (V × {*'})`; there is no loop at `*'`.
pub fn build_right_module_graph<V: AsRef<str>>(vs: &[V]) -> Result<DirectedGraph> {
    module_graph(vs, RIGHT_MODULE_VERTEX, false)
}

fn module_graph<V: AsRef<str>>(vs: &[V], fresh: &str, left: bool) -> Result<DirectedGraph> {
    check_vertex_set(vs)?;
    if vs.iter().any(|v| v.as_ref() == fresh) {
        return Err(Error::InvalidGraph(format!("vertex id `{fresh}` is reserved for the module vertex")));
    }
    let mut spec = pair_spec(vs);
    spec.vertices.push(fresh.to_string());
    for v in vs {
        let v = v.as_ref();
        let (a, b) = if left { (fresh, v) } else { (v, fresh) };
        spec.edges.push(EdgeSpec { id: pair_edge_id(a, b), src: a.into(), tgt: b.into() });
    }
    DirectedGraph::from_spec(&spec)
}

/// Vertices `v0, v1`; loops `e0`, `e1`; and `e01 : v0 → v1`.
pub fn build_bimodule_graph() -> DirectedGraph {
    DirectedGraph::new(&["v0", "v1"], &[("e0", "v0", "v0"), ("e1", "v1", "v1"), ("e01", "v0", "v1")])
        .expect("static graph")
}

/// The subgraph of the pair graph with edges `⋃_{j ≤ k} V⁽ʲ⁾ × V⁽ᵏ⁾`.
pub fn build_partition_subgraph<V: AsRef<str>, P: AsRef<[V]>>(vs: &[V], parts: &[P]) -> Result<DirectedGraph> {
    check_vertex_set(vs)?;
    let mut block = HashMap::new();
    for (j, part) in parts.iter().enumerate() {
        if part.as_ref().is_empty() {
            return Err(Error::InvalidPartition(format!("part {} is empty", j + 1)));
        }
        for v in part.as_ref() {
            if block.insert(v.as_ref().to_string(), j).is_some() {
                return Err(Error::InvalidPartition(format!("vertex `{}` lies in two parts", v.as_ref())));
            }
        }
    }
    for v in vs {
        if !block.contains_key(v.as_ref()) {
            return Err(Error::InvalidPartition(format!("vertex `{}` is not covered", v.as_ref())));
        }
    }
    if block.len() != vs.len() {
        return Err(Error::InvalidPartition("partition mentions vertices outside V".into()));
    }
    let mut spec = pair_spec(vs);
    spec.edges.retain(|e| block[&e.src] <= block[&e.tgt]);
    DirectedGraph::from_spec(&spec)
}

/// Multigraphs on `1..=max_vertices` vertices with at most `max_edges` edges
/// (loops and parallel edges allowed), one representative per isomorphism
/// class. Vertices are named `a, b, c, …` and edges `x0, x1, …`.
pub fn enumerate_small_graphs(max_vertices: usize, max_edges: usize) -> Vec<DirectedGraph> {
    let mut out = Vec::new();
    for n in 1..=max_vertices {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        let perms = permutations(n);
        let mut seen = HashSet::new();
        for k in 0..=max_edges {
            for multiset in multisets(pairs.len(), k) {
                let edges: Vec<(usize, usize)> = multiset.iter().map(|&i| pairs[i]).collect();
                let canon = perms
                    .iter()
                    .map(|p| {
                        let mut es: Vec<_> = edges.iter().map(|&(a, b)| (p[a], p[b])).collect();
                        es.sort();
                        es
                    })
                    .min()
                    .unwrap();
                if seen.insert(canon.clone()) {
                    let names: Vec<String> = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
                    let spec = GraphSpec {
                        vertices: names.clone(),
                        edges: canon
                            .iter()
                            .enumerate()
                            .map(|(i, &(a, b))| EdgeSpec {
                                id: format!("x{i}"),
                                src: names[a].clone(),
                                tgt: names[b].clone(),
                            })
                            .collect(),
                    };
                    out.push(DirectedGraph::from_spec(&spec).expect("generated graph is valid"));
                }
            }
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            return write!(f, "graph valid");
        }
        writeln!(f, "graph invalid")?;
        for i in &self.issues {
            writeln!(f, "  {}: {}", i.kind, i.message)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop_graph() -> DirectedGraph {
        DirectedGraph::new(&["v"], &[("e", "v", "v")]).unwrap()
    }

    fn spec(vs: &[&str], es: &[(&str, &str, &str)]) -> GraphSpec {
        GraphSpec {
            vertices: vs.iter().map(|s| s.to_string()).collect(),
            edges: es
                .iter()
                .map(|(i, s, t)| EdgeSpec { id: i.to_string(), src: s.to_string(), tgt: t.to_string() })
                .collect(),
        }
    }

    #[test]
    fn validation() {
        assert!(validate_graph(&spec(&["v"], &[("e", "v", "v")])).valid);
        let bad = validate_graph(&spec(&["v"], &[("e", "v", "w")]));
        assert!(!bad.valid);
        assert_eq!(bad.issues[0].kind, "dangling endpoint");
        let dup = validate_graph(&spec(&["v", "v"], &[("e", "v", "v"), ("e", "v", "v")]));
        assert_eq!(dup.issues.len(), 2);
        assert!(validate_graph(&build_bimodule_graph().to_spec()).valid);
    }

    #[test]
    fn concatenation() {
        let g = build_bimodule_graph();
        let e0 = g.path(&["e0"]).unwrap();
        let e01 = g.path(&["e01"]).unwrap();
        let e1 = g.path(&["e1"]).unwrap();
        let c = concatenate(&[e0.clone(), e01.clone(), e1.clone()]).unwrap();
        assert_eq!(g.fmt_path(&c), "e0,e01,e1");
        let v0 = g.vertex("v0").unwrap();
        assert_eq!(concatenate(&[EdgePath::empty(v0), e01.clone()]).unwrap(), e01);
        assert!(matches!(concatenate(&[e1, e0]), Err(Error::Composition(_))));
        assert!(concatenate(&[]).is_err());
    }

    #[test]
    fn path_enumeration() {
        let g = loop_graph();
        let ps = enumerate_paths(&g, 2);
        let shown: Vec<_> = ps.iter().map(|p| g.fmt_path(p)).collect();
        assert_eq!(shown, ["∅@v", "e", "e,e"]);

        let b = build_bimodule_graph();
        let shown: BTreeSet<_> = enumerate_paths(&b, 1).iter().map(|p| b.fmt_path(p)).collect();
        let want: BTreeSet<String> = ["∅@v0", "∅@v1", "e0", "e1", "e01"].iter().map(|s| s.to_string()).collect();
        assert_eq!(shown, want);

        let bare = DirectedGraph::new(&["a", "b"], &[]).unwrap();
        assert!(enumerate_paths(&bare, 5).iter().all(EdgePath::is_empty));
        assert_eq!(enumerate_paths(&bare, 5).len(), 2);
    }

    #[test]
    fn profile_loops() {
        let b = build_bimodule_graph();
        let p = b.path(&["e0", "e01", "e1"]).unwrap();
        assert!(is_profile_loop(&b, &p, b.edge_id("e01").unwrap()).unwrap());
        assert!(!is_profile_loop(&b, &b.path(&["e1"]).unwrap(), b.edge_id("e0").unwrap()).unwrap());
        let v0 = b.vertex("v0").unwrap();
        assert!(is_profile_loop(&b, &EdgePath::empty(v0), b.edge_id("e0").unwrap()).unwrap());
        assert!(is_profile_loop(&b, &EdgePath::empty(v0), 17).is_err());

        let g = loop_graph();
        let shown: Vec<_> = enumerate_profile_loops(&g, 1).iter().map(|l| g.fmt_profile(l)).collect();
        assert_eq!(shown, ["(∅@v;e)", "(e;e)"]);

        let loops = enumerate_profile_loops(&b, 3);
        let shown: BTreeSet<_> = loops.iter().map(|l| b.fmt_profile(l)).collect();
        assert!(shown.contains("(e0,e01,e1;e01)"));
        assert!(shown.contains("(e0,e01;e01)"));
        let e1 = b.edge_id("e1").unwrap();
        assert!(!loops.iter().any(|l| l.output == e1 && l.inputs.source == v0));
        let e0 = b.edge_id("e0").unwrap();
        let e01 = b.edge_id("e01").unwrap();
        assert!(!loops.iter().any(|l| l.output == e0 && l.inputs.edges.contains(&e01)));

        assert!(enumerate_profile_loops(&DirectedGraph::new(&["a"], &[]).unwrap(), 3).is_empty());
    }

    #[test]
    fn endpoint_closed_examples() {
        let g = build_pair_graph(&["a", "b"]).unwrap();
        let sub = build_partition_subgraph(&["a", "b"], &[vec!["a"], vec!["b"]]).unwrap();
        assert!(is_endpoint_closed(&g, &sub).unwrap());
        let only_ab = DirectedGraph::new(&["a", "b"], &[("(a,b)", "a", "b")]).unwrap();
        assert!(!is_endpoint_closed(&g, &only_ab).unwrap());
        assert!(is_endpoint_closed(&g, &g).unwrap());
        let foreign = DirectedGraph::new(&["a", "z"], &[]).unwrap();
        assert!(matches!(is_endpoint_closed(&g, &foreign), Err(Error::NotSubgraph(_))));
    }

    #[test]
    fn constructions() {
        let one = build_pair_graph(&["v"]).unwrap();
        assert_eq!((one.vertex_count(), one.edge_count()), (1, 1));
        assert_eq!(build_pair_graph(&["a", "b"]).unwrap().edge_count(), 4);
        assert_eq!(build_pair_graph(&["a", "b", "c"]).unwrap().edge_count(), 9);
        assert!(build_pair_graph::<&str>(&[]).is_err());

        let l = build_left_module_graph(&["v"]).unwrap();
        assert_eq!((l.vertex_count(), l.edge_count()), (2, 2));
        assert_eq!(build_left_module_graph(&["a", "b"]).unwrap().edge_count(), 6);
        let r = build_right_module_graph(&["a", "b"]).unwrap();
        let star = r.vertex(RIGHT_MODULE_VERTEX).unwrap();
        assert!(r.outgoing(star).is_empty());
        assert!(build_left_module_graph(&["*"]).is_err());

        let b = build_bimodule_graph();
        assert_eq!(b.edge_count(), 3);
        assert!(b.edges_between(b.vertex("v1").unwrap(), b.vertex("v0").unwrap()).is_empty());

        let p = build_partition_subgraph(&["a", "b"], &[vec!["a"], vec!["b"]]).unwrap();
        let ids: BTreeSet<_> = p.edges().iter().map(|e| e.id.clone()).collect();
        assert_eq!(ids, ["(a,a)", "(a,b)", "(b,b)"].iter().map(|s| s.to_string()).collect());
        let whole = build_partition_subgraph(&["a", "b"], &[vec!["a", "b"]]).unwrap();
        assert_eq!(whole, build_pair_graph(&["a", "b"]).unwrap());
        assert!(build_partition_subgraph(&["a", "b"], &[vec!["a"]]).is_err());
        assert!(build_partition_subgraph(&["a", "b"], &[vec!["a", "b"], vec!["b"]]).is_err());
    }

    #[test]
    fn small_graph_census() {
        // unlabeled multigraphs with loops: 1 vertex up to 2 edges -> 3 classes
        assert_eq!(enumerate_small_graphs(1, 2).len(), 3);
        let gs = enumerate_small_graphs(2, 1);
        // 1 vertex: {}, {loop}; 2 vertices: {}, {loop}, {a->b}
        assert_eq!(gs.len(), 5);
    }
}
