//! Test fixtures: classical dg algebras, categories and bimodules, their
//! lift to algebras over the free presets, seeded perturbations, and random
//! assignments.
//!
//! A [`DgData`] is written in the ordinary (unshifted) grading, with products
//! along composable pairs of edges in path order. [`lift`] moves everything
//! to the shifted grading `|x|' = |x| - 1` and sets
//! `m_2(x, y) = (-1)^{|x|'} x·y`, with no higher operations. Under this
//! translation associativity and the graded Leibniz rule become exactly the
//! A∞-type relations.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraData, Bounds};
use crate::chain::{CochainComplex, EndX, GradedBasis, MultiMap, Vector};
use crate::error::{Error, Result};
use crate::free::{FreeDgFc, Generator};
use crate::graph::{build_bimodule_graph, build_pair_graph, DirectedGraph, EdgeId, EdgePath, ProfileLoop};
use crate::scalar::{self, Scalar};

/// A bilinear product `X(left) ⊗ X(right) → X(output)`, as entries
/// `(x, y, z, c)` meaning `x·y` has coefficient `c` on `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Product {
    pub left: EdgeId,
    pub right: EdgeId,
    pub output: EdgeId,
    pub table: Vec<(usize, usize, usize, Scalar)>,
}

/// A dg category-like structure over a graph, in the unshifted grading.
#[derive(Clone, Debug)]
pub struct DgData {
    pub name: String,
    pub graph: Arc<DirectedGraph>,
    pub complexes: Vec<CochainComplex>,
    pub products: Vec<Product>,
}

impl DgData {
    pub fn new(
        name: &str,
        graph: Arc<DirectedGraph>,
        complexes: Vec<CochainComplex>,
        products: Vec<Product>,
    ) -> Result<Self> {
        if complexes.len() != graph.edge_count() {
            return Err(Error::InvalidComplex("one complex per edge is required".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for p in &products {
            if !seen.insert((p.left, p.right)) {
                return Err(Error::Assignment("two products on the same pair of edges".into()));
            }
            let path = EdgePath::from_edges(&graph, vec![p.left, p.right])?;
            ProfileLoop::new(&graph, path, p.output)?;
            for (x, y, z, c) in &p.table {
                let (cl, cr, co) = (&complexes[p.left], &complexes[p.right], &complexes[p.output]);
                if *x >= cl.dim() || *y >= cr.dim() || *z >= co.dim() {
                    return Err(Error::Assignment("product entry out of range".into()));
                }
                if !c.is_zero() && co.degree(*z) != cl.degree(*x) + cr.degree(*y) {
                    return Err(Error::Degree(format!(
                        "{}·{} -> {} is not degree-preserving",
                        cl.basis().name(*x),
                        cr.basis().name(*y),
                        co.basis().name(*z)
                    )));
                }
            }
        }
        Ok(DgData { name: name.to_string(), graph, complexes, products })
    }

    fn find(&self, l: EdgeId, r: EdgeId) -> Option<&Product> {
        self.products.iter().find(|p| p.left == l && p.right == r)
    }

    /// `u·v` for vectors on composable edges; `None` when no product is
    /// declared on the pair (read as zero).
    fn mul(&self, l: EdgeId, u: &Vector, r: EdgeId, v: &Vector) -> Option<(EdgeId, Vector)> {
        let p = self.find(l, r)?;
        let mut out = Vector::zero();
        for (x, y, z, c) in &p.table {
            let a = u.get(*x) * v.get(*y);
            if !a.is_zero() {
                out.add_coeff(*z, &(a * c));
            }
        }
        Some((p.output, out))
    }

    fn composable_pairs(&self) -> Vec<(EdgeId, EdgeId)> {
        let g = &self.graph;
        let mut out = Vec::new();
        for e in 0..g.edge_count() {
            for &f in g.outgoing(g.tgt(e)) {
                out.push((e, f));
            }
        }
        out
    }

    /// A basis triple on which `(xy)z ≠ x(yz)`, if any.
    pub fn associativity_witness(&self) -> Option<String> {
        let g = &self.graph;
        for (e, f) in self.composable_pairs() {
            for &h in g.outgoing(g.tgt(f)) {
                for x in 0..self.complexes[e].dim() {
                    for y in 0..self.complexes[f].dim() {
                        for z in 0..self.complexes[h].dim() {
                            let (bx, by, bz) = (Vector::basis(x), Vector::basis(y), Vector::basis(z));
                            let left = self.mul(e, &bx, f, &by).and_then(|(ef, xy)| self.mul(ef, &xy, h, &bz));
                            let right = self.mul(f, &by, h, &bz).and_then(|(fh, yz)| self.mul(e, &bx, fh, &yz));
                            let differs = match (&left, &right) {
                                (Some((a, u)), Some((b, v))) => a != b || u != v,
                                (Some((_, u)), None) | (None, Some((_, u))) => !u.is_zero(),
                                (None, None) => false,
                            };
                            if differs {
                                let n = |k: EdgeId, i: usize| self.complexes[k].basis().name(i).to_string();
                                return Some(format!(
                                    "({}·{})·{} ≠ {}·({}·{})",
                                    n(e, x),
                                    n(f, y),
                                    n(h, z),
                                    n(e, x),
                                    n(f, y),
                                    n(h, z)
                                ));
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// A basis pair on which `d(xy) ≠ dx·y + (-1)^{|x|} x·dy`, if any.
    pub fn leibniz_witness(&self) -> Option<String> {
        for p in &self.products {
            let (cl, cr, co) = (&self.complexes[p.left], &self.complexes[p.right], &self.complexes[p.output]);
            for x in 0..cl.dim() {
                for y in 0..cr.dim() {
                    let (bx, by) = (Vector::basis(x), Vector::basis(y));
                    let xy = self.mul(p.left, &bx, p.right, &by).map(|t| t.1).unwrap_or_default();
                    let lhs = co.apply_d(&xy);
                    let mut rhs = self.mul(p.left, cl.d(x), p.right, &by).map(|t| t.1).unwrap_or_default();
                    let second = self.mul(p.left, &bx, p.right, cr.d(y)).map(|t| t.1).unwrap_or_default();
                    rhs.add_scaled(&second, &scalar::sign(cl.degree(x)));
                    if lhs != rhs {
                        return Some(format!("Leibniz fails on {}·{}", cl.basis().name(x), cr.basis().name(y)));
                    }
                }
            }
        }
        None
    }

    /// The same complexes in the shifted grading.
    pub fn shifted(&self) -> Result<EndX> {
        let cxs = self.complexes.iter().map(shift_complex).collect::<Result<Vec<_>>>()?;
        EndX::new(self.graph.clone(), cxs)
    }
}

fn shift_complex(c: &CochainComplex) -> Result<CochainComplex> {
    let b = GradedBasis::new(c.basis().elements.iter().map(|(n, d)| (n.clone(), d - 1)).collect())?;
    CochainComplex::new(b, &c.entries())
}

/// The algebra over `fc` given by a dg structure: binary operations from the
/// products (sign-adjusted to the shifted grading), everything else zero.
pub fn lift(fc: &FreeDgFc, data: &DgData) -> Result<AlgebraData> {
    let x = data.shifted()?;
    let mut assignment = BTreeMap::new();
    for p in &data.products {
        let path = EdgePath::from_edges(&data.graph, vec![p.left, p.right])?;
        let gen = Generator { profile: ProfileLoop::new(&data.graph, path, p.output)?, label: fc.monoid().zero() };
        if !fc.is_generator(&gen) {
            return Err(Error::Assignment(format!("the preset has no binary generator {}", fc.name(&gen))));
        }
        let mut m = MultiMap::zero(vec![p.left, p.right], p.output, 1);
        for (a, b, z, c) in &p.table {
            let shifted_deg = x.complex(p.left).degree(*a);
            x.insert(&mut m, vec![*a, *b], *z, c * scalar::sign(shifted_deg))?;
        }
        assignment.insert(gen, m);
    }
    AlgebraData::new(fc, x, assignment, true)
}

/// One-object case of [`lift`]: a dg algebra on the one-loop graph.
pub fn lift_dga(
    fc: &FreeDgFc,
    complex: CochainComplex,
    table: Vec<(usize, usize, usize, Scalar)>,
) -> Result<AlgebraData> {
    let g = fc.graph().clone();
    if g.edge_count() != 1 || g.vertex_count() != 1 {
        return Err(Error::Usage("a dg algebra lives on the one-loop graph".into()));
    }
    let data = DgData::new("dga", g, vec![complex], vec![Product { left: 0, right: 0, output: 0, table }])?;
    lift(fc, &data)
}

fn basis(els: &[(&str, i64)]) -> GradedBasis {
    GradedBasis::new(els.iter().map(|(n, d)| (n.to_string(), *d)).collect()).expect("fixture basis")
}

fn table(entries: &[(usize, usize, usize, i64)]) -> Vec<(usize, usize, usize, Scalar)> {
    entries.iter().map(|&(x, y, z, c)| (x, y, z, scalar::int(c))).collect()
}

/// The graph of the A∞ operad: one vertex `v`, one loop `e`.
pub fn one_loop_graph() -> Arc<DirectedGraph> {
    Arc::new(DirectedGraph::new(&["v"], &[("e", "v", "v")]).expect("static graph"))
}

fn algebra(name: &str, cx: CochainComplex, entries: &[(usize, usize, usize, i64)]) -> DgData {
    DgData::new(name, one_loop_graph(), vec![cx], vec![Product { left: 0, right: 0, output: 0, table: table(entries) }])
        .expect("fixture algebra")
}

pub fn ground_field() -> DgData {
    algebra("ground field", CochainComplex::trivial(basis(&[("1", 0)])), &[(0, 0, 0, 1)])
}

/// `k[ε]/(ε²)` with zero differential.
pub fn dual_numbers() -> DgData {
    algebra(
        "dual numbers",
        CochainComplex::trivial(basis(&[("1", 0), ("ε", 0)])),
        &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1)],
    )
}

const UPPER: [(usize, usize, usize, i64); 4] = [(0, 0, 0, 1), (0, 1, 1, 1), (1, 2, 1, 1), (2, 2, 2, 1)];

/// Upper-triangular 2×2 matrices with basis `e11, e12, e22`, zero differential.
pub fn upper_triangular() -> DgData {
    algebra("upper-triangular 2×2", CochainComplex::trivial(basis(&[("e11", 0), ("e12", 0), ("e22", 0)])), &UPPER)
}

/// Upper-triangular matrices graded with `|e12| = 1` and `d e11 = e12`,
/// `d e22 = -e12`.
pub fn dg_upper_triangular() -> DgData {
    let cx = CochainComplex::new(
        basis(&[("e11", 0), ("e12", 1), ("e22", 0)]),
        &[(0, 1, scalar::one()), (2, 1, -scalar::one())],
    )
    .expect("fixture complex");
    algebra("dg upper-triangular 2×2", cx, &UPPER)
}

/// A strict dg category on objects `a`, `b`: identities on each object and
/// `Hom(a,b)` spanned by `f` (degree 0) and `g = df` (degree 1).
pub fn two_object_category() -> DgData {
    let g = Arc::new(build_pair_graph(&["a", "b"]).expect("static graph"));
    let id = |n: &str| CochainComplex::trivial(basis(&[(n, 0)]));
    let e = |s: &str| g.edge_id(s).expect("pair edge");
    let (aa, ab, ba, bb) = (e("(a,a)"), e("(a,b)"), e("(b,a)"), e("(b,b)"));
    let mut cxs = vec![CochainComplex::trivial(basis(&[])); 4];
    cxs[aa] = id("1a");
    cxs[bb] = id("1b");
    cxs[ab] = CochainComplex::new(basis(&[("f", 0), ("g", 1)]), &[(0, 1, scalar::one())]).expect("fixture complex");
    cxs[ba] = CochainComplex::trivial(basis(&[]));
    let products = vec![
        Product { left: aa, right: aa, output: aa, table: table(&[(0, 0, 0, 1)]) },
        Product { left: bb, right: bb, output: bb, table: table(&[(0, 0, 0, 1)]) },
        Product { left: aa, right: ab, output: ab, table: table(&[(0, 0, 0, 1), (0, 1, 1, 1)]) },
        Product { left: ab, right: bb, output: ab, table: table(&[(0, 0, 0, 1), (1, 0, 1, 1)]) },
    ];
    DgData::new("two-object dg category", g, cxs, products).expect("fixture category")
}

/// The ground field as a bimodule over itself, on the bimodule graph.
pub fn ground_field_bimodule() -> DgData {
    let g = Arc::new(build_bimodule_graph());
    let e = |s: &str| g.edge_id(s).expect("bimodule edge");
    let (e0, e1, e01) = (e("e0"), e("e1"), e("e01"));
    let mut cxs = vec![CochainComplex::trivial(basis(&[])); 3];
    cxs[e0] = CochainComplex::trivial(basis(&[("a", 0)]));
    cxs[e1] = CochainComplex::trivial(basis(&[("b", 0)]));
    cxs[e01] = CochainComplex::trivial(basis(&[("m", 0)]));
    let one = table(&[(0, 0, 0, 1)]);
    let products = vec![
        Product { left: e0, right: e0, output: e0, table: one.clone() },
        Product { left: e1, right: e1, output: e1, table: one.clone() },
        Product { left: e0, right: e01, output: e01, table: one.clone() },
        Product { left: e01, right: e1, output: e01, table: one },
    ];
    DgData::new("ground-field bimodule", g, cxs, products).expect("fixture bimodule")
}

/// Integer bases for the degree-preserving bilinear maps
/// `X(left) ⊗ X(right) → X(output)` that satisfy the Leibniz rule, found by
/// exact elimination. Adding any of them to a product keeps the Leibniz rule.
fn leibniz_perturbations(
    cl: &CochainComplex,
    cr: &CochainComplex,
    co: &CochainComplex,
) -> Vec<Vec<(usize, usize, usize, Scalar)>> {
    let vars: Vec<(usize, usize, usize)> = (0..cl.dim())
        .flat_map(|x| (0..cr.dim()).flat_map(move |y| (0..co.dim()).map(move |z| (x, y, z))))
        .filter(|&(x, y, z)| co.degree(z) == cl.degree(x) + cr.degree(y))
        .collect();
    let index: BTreeMap<(usize, usize, usize), usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut rows = Vec::new();
    for x in 0..cl.dim() {
        for y in 0..cr.dim() {
            // coefficient of each output basis vector in d·δ(x,y) - δ(dx,y) - (-1)^{|x|} δ(x,dy)
            let mut eqs: BTreeMap<usize, Vec<Scalar>> = BTreeMap::new();
            let mut add = |w: usize, var: (usize, usize, usize), c: Scalar| {
                if let Some(&k) = index.get(&var) {
                    eqs.entry(w).or_insert_with(|| vec![Scalar::zero(); vars.len()])[k] += c;
                }
            };
            for z in 0..co.dim() {
                for (w, c) in co.d(z).iter() {
                    add(w, (x, y, z), c.clone());
                }
            }
            for (x2, c) in cl.d(x).iter() {
                for w in 0..co.dim() {
                    add(w, (x2, y, w), -c.clone());
                }
            }
            let s = scalar::sign(cl.degree(x));
            for (y2, c) in cr.d(y).iter() {
                for w in 0..co.dim() {
                    add(w, (x, y2, w), -(c * &s));
                }
            }
            rows.extend(eqs.into_values());
        }
    }
    nullspace(rows, vars.len())
        .into_iter()
        .map(|v| {
            v.into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (vars[k].0, vars[k].1, vars[k].2, c))
                .collect()
        })
        .collect()
}

/// A basis of the kernel of the given rows, each vector scaled to integers.
fn nullspace(mut rows: Vec<Vec<Scalar>>, n: usize) -> Vec<Vec<Scalar>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        rows[r].iter_mut().for_each(|c| *c *= &inv);
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                let pivot_row = rows[r].clone();
                rows[i].iter_mut().zip(&pivot_row).for_each(|(c, pc)| *c -= &f * pc);
            }
        }
        pivots.push(col);
        r += 1;
    }
    let mut out = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Scalar::zero(); n];
        v[free] = scalar::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[i][free].clone();
        }
        let lcm = v.iter().fold(num_bigint::BigInt::from(1), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
        let scale = Scalar::from_integer(lcm);
        out.push(v.into_iter().map(|c| c * &scale).collect());
    }
    out
}

/// A seeded perturbation of one product that keeps the Leibniz rule but
/// breaks associativity. The change is a small integer combination of
/// Leibniz-compatible bilinear maps. Returns the perturbed data and a
/// description of the change.
pub fn perturb(data: &DgData, seed: u64) -> Result<(DgData, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spaces: Vec<_> = data
        .products
        .iter()
        .map(|p| leibniz_perturbations(&data.complexes[p.left], &data.complexes[p.right], &data.complexes[p.output]))
        .collect();
    if spaces.iter().all(Vec::is_empty) {
        return Err(Error::Usage(format!("no associativity-breaking perturbation found for {}", data.name)));
    }
    for _ in 0..10_000 {
        let pi = rng.gen_range(0..data.products.len());
        let space = &spaces[pi];
        if space.is_empty() {
            continue;
        }
        let mut delta: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
        for _ in 0..rng.gen_range(1..=2usize) {
            let c = scalar::int([-2, -1, 1, 2][rng.gen_range(0..4)]);
            for (x, y, z, v) in &space[rng.gen_range(0..space.len())] {
                *delta.entry((*x, *y, *z)).or_insert_with(Scalar::zero) += v * &c;
            }
        }
        delta.retain(|_, c| !c.is_zero());
        if delta.is_empty() {
            continue;
        }
        let p = &data.products[pi];
        let (cl, cr, co) = (&data.complexes[p.left], &data.complexes[p.right], &data.complexes[p.output]);
        let mut out = data.clone();
        out.products[pi].table.extend(delta.iter().map(|(&(x, y, z), c)| (x, y, z, c.clone())));
        out.name = format!("{} (perturbed)", data.name);
        debug_assert!(out.leibniz_witness().is_none());
        if let Some(w) = out.associativity_witness() {
            let change: Vec<String> = delta
                .iter()
                .map(|(&(x, y, z), c)| {
                    format!(
                        "{}·{} += {}·{}",
                        cl.basis().name(x),
                        cr.basis().name(y),
                        scalar::format(c),
                        co.basis().name(z)
                    )
                })
                .collect();
            return Ok((out, format!("{}; {w}", change.join(", "))));
        }
    }
    Err(Error::Usage(format!("no associativity-breaking perturbation found for {}", data.name)))
}

/// A random complex of dimension `1..=max_dim` in degrees `-1..=1`, with a
/// random differential satisfying `d² = 0`.
pub fn random_complex(rng: &mut ChaCha8Rng, max_dim: usize) -> CochainComplex {
    loop {
        let dim = rng.gen_range(1..=max_dim);
        let els: Vec<(String, i64)> = (0..dim).map(|i| (format!("b{i}"), rng.gen_range(-1..=1))).collect();
        let b = GradedBasis::new(els).expect("distinct names");
        let mut entries = Vec::new();
        for x in 0..dim {
            for z in 0..dim {
                if b.degree(z) == b.degree(x) + 1 && rng.gen_bool(0.5) {
                    entries.push((x, z, scalar::int(rng.gen_range(-2..=2))));
                }
            }
        }
        if let Ok(c) = CochainComplex::new(b, &entries) {
            return c;
        }
    }
}

/// A random map of degree one with coefficients in `[-2, 2]`; each
/// degree-consistent coefficient is filled with probability `density`.
pub fn random_map(x: &EndX, inputs: &[EdgeId], output: EdgeId, density: f64, rng: &mut ChaCha8Rng) -> MultiMap {
    let mut m = MultiMap::zero(inputs.to_vec(), output, 1);
    let out = x.complex(output);
    for key in x.basis_tuples(inputs) {
        let d = x.tuple_degree(inputs, &key) + 1;
        for y in 0..out.dim() {
            if out.degree(y) == d && rng.gen_bool(density) {
                let c = rng.gen_range(-2..=2);
                x.insert(&mut m, key.clone(), y, scalar::int(c)).expect("degree-consistent entry");
            }
        }
    }
    m
}

/// A seeded random algebra over `fc`: random complexes of dimension at most
/// `max_dim` on each edge, and random maps on the generators within
/// `bounds`. The seed also picks a shape: all zero, a single arity filled
/// in, or every generator filled in.
pub fn random_algebra(fc: &FreeDgFc, bounds: Bounds, max_dim: usize, seed: u64) -> Result<AlgebraData> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = fc.graph().clone();
    let cxs = (0..g.edge_count()).map(|_| random_complex(&mut rng, max_dim)).collect();
    let x = EndX::new(g, cxs)?;
    let gens = fc.generators(bounds.arity, bounds.labels);
    let shape = rng.gen_range(0..6);
    let only = rng.gen_range(0..=bounds.arity);
    let density = [0.2, 0.5][rng.gen_range(0..2)];
    let mut assignment = BTreeMap::new();
    for gen in gens {
        let fill = match shape {
            0 => false,
            1 | 2 => gen.arity() == only,
            _ => true,
        };
        if fill {
            let m = random_map(&x, &gen.profile.inputs.edges, gen.output(), density, &mut rng);
            assignment.insert(gen, m);
        }
    }
    AlgebraData::new(fc, x, assignment, true)
}

/// Cochain complexes of dimension at most three used to exercise `End(X)`.
pub fn small_complexes() -> Vec<CochainComplex> {
    let one = scalar::one();
    vec![
        CochainComplex::new(basis(&[("x", 0), ("y", 1)]), &[(0, 1, one.clone())]).expect("fixture"),
        CochainComplex::trivial(basis(&[("p", 0), ("q", 1), ("r", -1)])),
        CochainComplex::new(basis(&[("a", -1), ("b", 0), ("c", 0)]), &[(0, 1, one.clone()), (0, 2, scalar::int(-2))])
            .expect("fixture"),
        CochainComplex::new(basis(&[("u", 0), ("v", 1), ("w", 2)]), &[(0, 1, one)]).expect("fixture"),
        CochainComplex::trivial(basis(&[("s", 1)])),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_algebra, check_direct};
    use crate::free::{build_ainf_bimodule, build_ainf_category, build_ainf_operad};
    use crate::label::LabelMonoid;

    #[test]
    fn classical_fixtures_are_dg() {
        for d in [
            ground_field(),
            dual_numbers(),
            upper_triangular(),
            dg_upper_triangular(),
            two_object_category(),
            ground_field_bimodule(),
        ] {
            assert_eq!(d.associativity_witness(), None, "{}", d.name);
            assert_eq!(d.leibniz_witness(), None, "{}", d.name);
        }
    }

    #[test]
    fn lifted_dga_passes_both_routes() {
        let fc = build_ainf_operad(LabelMonoid::trivial());
        let b = Bounds { arity: 4, labels: 0 };
        for d in [ground_field(), dual_numbers(), dg_upper_triangular()] {
            let a = lift(&fc, &d).unwrap();
            let g = check_algebra(&fc, &a, b).unwrap();
            let r = check_direct(&fc, &a, b).unwrap();
            assert!(g.pass, "{g}");
            assert!(r.pass, "{r}");
        }
    }

    #[test]
    fn category_and_bimodule_fixtures_pass() {
        let b = Bounds { arity: 4, labels: 0 };
        let cat = build_ainf_category(&["a", "b"], LabelMonoid::trivial(), true).unwrap();
        let a = lift(&cat, &two_object_category()).unwrap();
        assert!(check_algebra(&cat, &a, b).unwrap().pass);
        assert!(check_direct(&cat, &a, b).unwrap().pass);
        let bim = build_ainf_bimodule(LabelMonoid::trivial());
        let a = lift(&bim, &ground_field_bimodule()).unwrap();
        assert!(check_algebra(&bim, &a, b).unwrap().pass);
        assert!(check_direct(&bim, &a, b).unwrap().pass);
    }

    #[test]
    fn perturbation_fails_at_arity_three() {
        let fc = build_ainf_operad(LabelMonoid::trivial());
        let (bad, what) = perturb(&dual_numbers(), 7).unwrap();
        assert!(!what.is_empty());
        let a = lift(&fc, &bad).unwrap();
        let b = Bounds { arity: 4, labels: 0 };
        let g = check_algebra(&fc, &a, b).unwrap();
        let r = check_direct(&fc, &a, b).unwrap();
        assert_eq!(g.lowest_failing_arity, Some(3));
        assert_eq!(r.lowest_failing_arity, Some(3));
        assert!(perturb(&ground_field(), 1).is_err());
    }

    #[test]
    fn lift_rejects_bad_degrees() {
        let cx = CochainComplex::trivial(basis(&[("1", 0), ("t", 1)]));
        let fc = build_ainf_operad(LabelMonoid::trivial());
        assert!(matches!(lift_dga(&fc, cx, table(&[(0, 0, 1, 1)])), Err(Error::Degree(_))));
    }
}
