//! The JSON interchange format.
//!
//! Every file carries `format_version`. Edges, vertices and basis elements
//! are referred to by their string ids and rationals are written as `"p/q"`
//! strings, so no floating-point value can enter through a file.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::algebra::AlgebraData;
use crate::chain::{CochainComplex, EndX, GradedBasis, MultiMap};
use crate::error::{Error, Result};
use crate::fc::{labeled_instance, profile_loop_instance, table_instance, CellTable, FcInstance};
use crate::free::{
    build_ainf_bimodule, build_ainf_category, build_ainf_generalized, build_ainf_operad, build_module_preset,
    build_rmodule_preset, DifferentialRule, FreeDgFc, Generator, RuleTerm, Side,
};
use crate::graph::{build_partition_subgraph, DirectedGraph, EdgeId, GraphSpec, ProfileLoop, Subgraph};
use crate::label::{LabelMonoid, LabelingFc, MonoidElem};
use crate::scalar;

pub const FORMAT_VERSION: u32 = 1;

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Parse(format!("unsupported format_version {v}; this build reads version {FORMAT_VERSION}")));
    }
    Ok(())
}

/// Parses JSON, reporting the line and column of syntax errors.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("interchange values always serialize")
}

/// A subgraph given by vertex and edge ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
}

impl SubgraphSpec {
    pub fn resolve(&self, g: &DirectedGraph) -> Result<Subgraph> {
        let vs = self.vertices.iter().map(|v| g.vertex(v)).collect::<Result<_>>()?;
        let es = self.edges.iter().map(|e| g.edge_id(e)).collect::<Result<_>>()?;
        Subgraph::new(g, vs, es)
    }
}

/// A declared subgraph: explicit, or the partition subgraph of a pair graph.
fn declared_subgraph(
    g: &DirectedGraph,
    sub: &Option<SubgraphSpec>,
    partition: &Option<Vec<Vec<String>>>,
) -> Result<Option<Subgraph>> {
    match (sub, partition) {
        (Some(_), Some(_)) => Err(Error::Parse("declare either `subgraph` or `partition`, not both".into())),
        (Some(s), None) => Ok(Some(s.resolve(g)?)),
        (None, Some(parts)) => {
            let p = build_partition_subgraph(g.vertex_names(), parts)?;
            Ok(Some(Subgraph::locate(g, &p)?))
        }
        (None, None) => Ok(None),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub format_version: u32,
    pub graph: GraphSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgraph: Option<SubgraphSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<String>>>,
}

impl GraphFile {
    pub fn parse(text: &str) -> Result<Self> {
        let f: GraphFile = parse_json(text)?;
        check_version(f.format_version)?;
        Ok(f)
    }

    pub fn subgraph(&self, g: &DirectedGraph) -> Result<Option<Subgraph>> {
        declared_subgraph(g, &self.subgraph, &self.partition)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSpec {
    pub name: String,
    pub inputs: Vec<String>,
    pub output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitSpec {
    pub edge: String,
    pub cell: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposeSpec {
    pub outer: String,
    pub slot: usize,
    pub inner: String,
    pub result: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceSpec {
    ProfileLoops,
    Labeled {
        rank: usize,
        truncation: u32,
        #[serde(default)]
        reduced: bool,
    },
    Table {
        cells: Vec<CellSpec>,
        units: Vec<UnitSpec>,
        compose: Vec<ComposeSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FcFile {
    pub format_version: u32,
    pub graph: GraphSpec,
    pub instance: InstanceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgraph: Option<SubgraphSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<String>>>,
}

fn profile_of(g: &DirectedGraph, inputs: &[String], output: &str) -> Result<ProfileLoop> {
    let names: Vec<&str> = inputs.iter().map(String::as_str).collect();
    g.profile(&names, output)
}

impl FcFile {
    pub fn parse(text: &str) -> Result<Self> {
        let f: FcFile = parse_json(text)?;
        check_version(f.format_version)?;
        Ok(f)
    }

    /// The instance, enumerated up to input length `max_len` (table
    /// instances are finite and ignore it), and the declared subgraph.
    pub fn build(&self, max_len: usize) -> Result<(FcInstance, Option<Subgraph>)> {
        let g = Arc::new(DirectedGraph::from_spec(&self.graph)?);
        let fc = match &self.instance {
            InstanceSpec::ProfileLoops => profile_loop_instance(g.clone(), max_len),
            InstanceSpec::Labeled { rank, truncation, reduced } => {
                labeled_instance(LabelingFc::new(g.clone(), LabelMonoid::new(*rank, *truncation)?, *reduced), max_len)
            }
            InstanceSpec::Table { cells, units, compose } => {
                let mut t = CellTable::new();
                for c in cells {
                    t.add_cell(&c.name, profile_of(&g, &c.inputs, &c.output)?, c.label.clone().map(MonoidElem))?;
                }
                for u in units {
                    t.set_unit(g.edge_id(&u.edge)?, &u.cell)?;
                }
                for c in compose {
                    t.set_compose(&c.outer, c.slot, &c.inner, &c.result)?;
                }
                table_instance(g.clone(), t)
            }
        };
        let sub = declared_subgraph(&g, &self.subgraph, &self.partition)?;
        Ok((fc, sub))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSpec {
    pub rank: usize,
    pub truncation: u32,
}

impl Default for LabelSpec {
    fn default() -> Self {
        LabelSpec { rank: 1, truncation: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub name: String,
    pub inputs: Vec<String>,
    pub output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleTermEntry {
    pub coeff: String,
    pub outer: String,
    pub slot: usize,
    pub inner: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleEntry {
    pub generator: String,
    pub terms: Vec<RuleTermEntry>,
}

/// A preset by name (`ainf`, `category`, `bimodule`, `left-module`,
/// `right-module`, `rmodule`, `generalized`), or a custom family on an
/// explicit graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresetSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<Vec<String>>,
    #[serde(default)]
    pub labels: LabelSpec,
    #[serde(default)]
    pub curved: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GeneratorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub differential: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rules: Vec<RuleEntry>,
}

impl PresetSpec {
    pub fn named(name: &str) -> Self {
        PresetSpec {
            name: name.into(),
            vertices: Vec::new(),
            parts: Vec::new(),
            labels: LabelSpec::default(),
            curved: false,
            graph: None,
            generators: Vec::new(),
            differential: None,
            rules: Vec::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Versioned {
            format_version: u32,
            #[serde(flatten)]
            preset: PresetSpec,
        }
        let v: Versioned = parse_json(text)?;
        check_version(v.format_version)?;
        Ok(v.preset)
    }

    fn vertex_list(&self, default: &[&str]) -> Vec<String> {
        if self.vertices.is_empty() {
            default.iter().map(|s| s.to_string()).collect()
        } else {
            self.vertices.clone()
        }
    }

    pub fn build(&self) -> Result<FreeDgFc> {
        let monoid = LabelMonoid::new(self.labels.rank, self.labels.truncation)?;
        let reduced = !self.curved;
        match self.name.as_str() {
            "ainf" => Ok(build_ainf_operad(monoid)),
            "category" => build_ainf_category(&self.vertex_list(&["a", "b"]), monoid, reduced),
            "bimodule" => Ok(build_ainf_bimodule(monoid)),
            "left-module" => build_module_preset(&self.vertex_list(&["a"]), Side::Left, monoid, reduced),
            "right-module" => build_module_preset(&self.vertex_list(&["a"]), Side::Right, monoid, reduced),
            "rmodule" => {
                let vs = self.vertex_list(&["a", "b"]);
                let parts = if self.parts.is_empty() { vs.iter().map(|v| vec![v.clone()]).collect() } else { self.parts.clone() };
                build_rmodule_preset(&vs, &parts, monoid, reduced)
            }
            "generalized" | "custom" => self.build_on_graph(monoid, reduced),
            other => Err(Error::Usage(format!(
                "unknown preset `{other}`; expected ainf, category, bimodule, left-module, right-module, rmodule or generalized"
            ))),
        }
    }

    fn build_on_graph(&self, monoid: LabelMonoid, reduced: bool) -> Result<FreeDgFc> {
        let spec = self.graph.as_ref().ok_or_else(|| Error::Parse("a generalized preset needs a `graph`".into()))?;
        let g = Arc::new(DirectedGraph::from_spec(spec)?);
        let labeling = LabelingFc::new(g.clone(), monoid, reduced);
        let rule_name = self.differential.as_deref().unwrap_or("category");
        let mut family = BTreeMap::new();
        let mut by_name = BTreeMap::new();
        for ge in &self.generators {
            let label = match &ge.label {
                Some(l) => monoid.elem(l)?,
                None => monoid.zero(),
            };
            let gen = Generator { profile: profile_of(&g, &ge.inputs, &ge.output)?, label };
            if by_name.insert(ge.name.clone(), gen.clone()).is_some() {
                return Err(Error::Parse(format!("duplicate generator `{}`", ge.name)));
            }
            family.insert(gen, ge.name.clone());
        }
        let rule = match rule_name {
            "category" => DifferentialRule::Splitting,
            "ainf" => DifferentialRule::Operad,
            "bimodule" => DifferentialRule::Bimodule,
            "custom" => {
                let look = |n: &str| {
                    by_name.get(n).cloned().ok_or_else(|| Error::Lookup { kind: "generator", id: n.to_string() })
                };
                let mut rules = BTreeMap::new();
                for r in &self.rules {
                    let terms = r
                        .terms
                        .iter()
                        .map(|t| {
                            Ok(RuleTerm {
                                coeff: scalar::parse(&t.coeff)?,
                                outer: look(&t.outer)?,
                                slot: t.slot,
                                inner: look(&t.inner)?,
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    rules.insert(look(&r.generator)?, terms);
                }
                DifferentialRule::Custom(rules)
            }
            other => return Err(Error::Parse(format!("unknown differential `{other}`"))),
        };
        if family.is_empty() {
            if matches!(rule, DifferentialRule::Custom(_)) {
                return Err(Error::Parse("a custom differential needs an explicit generator list".into()));
            }
            Ok(build_generalized_with_rule(g, monoid, reduced, rule))
        } else {
            FreeDgFc::with_family(labeling, rule, family)
        }
    }
}

fn build_generalized_with_rule(
    g: Arc<DirectedGraph>,
    monoid: LabelMonoid,
    reduced: bool,
    rule: DifferentialRule,
) -> FreeDgFc {
    match rule {
        DifferentialRule::Splitting => build_ainf_generalized(g, monoid, reduced),
        rule => FreeDgFc::new(LabelingFc::new(g, monoid, reduced), rule, crate::free::PresetKind::Generalized),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub id: String,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub from: String,
    pub to: String,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub edge: String,
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub differential: Vec<DiffEntry>,
}

impl ComplexSpec {
    pub fn build(&self) -> Result<CochainComplex> {
        let b = GradedBasis::new(self.basis.iter().map(|e| (e.id.clone(), e.degree)).collect())?;
        let entries = self
            .differential
            .iter()
            .map(|d| Ok((b.index(&d.from)?, b.index(&d.to)?, scalar::parse(&d.coeff)?)))
            .collect::<Result<Vec<_>>>()?;
        CochainComplex::new(b, &entries)
    }

    pub fn from_complex(edge: &str, c: &CochainComplex) -> Self {
        let b = c.basis();
        ComplexSpec {
            edge: edge.to_string(),
            basis: b.elements.iter().map(|(id, d)| BasisEntry { id: id.clone(), degree: *d }).collect(),
            differential: c
                .entries()
                .into_iter()
                .map(|(x, z, k)| DiffEntry { from: b.name(x).into(), to: b.name(z).into(), coeff: scalar::format(&k) })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapEntry {
    pub inputs: Vec<String>,
    pub output: String,
    pub coeff: String,
}

/// The map assigned to one generator, identified by its boundary and label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub inputs: Vec<String>,
    pub output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Vec<u32>>,
    pub entries: Vec<MapEntry>,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub format_version: u32,
    pub preset: PresetSpec,
    pub complexes: Vec<ComplexSpec>,
    pub assignment: Vec<AssignmentEntry>,
    #[serde(default = "default_true")]
    pub implicit_zero: bool,
}

impl AlgebraFile {
    pub fn parse(text: &str) -> Result<Self> {
        let f: AlgebraFile = parse_json(text)?;
        check_version(f.format_version)?;
        Ok(f)
    }

    pub fn build(&self) -> Result<(FreeDgFc, AlgebraData)> {
        let fc = self.preset.build()?;
        let g = fc.graph().clone();
        let mut cxs: Vec<Option<CochainComplex>> = vec![None; g.edge_count()];
        for c in &self.complexes {
            let e = g.edge_id(&c.edge)?;
            if cxs[e].is_some() {
                return Err(Error::Parse(format!("two complexes on edge `{}`", c.edge)));
            }
            cxs[e] = Some(c.build()?);
        }
        let cxs = cxs
            .into_iter()
            .enumerate()
            .map(|(e, c)| c.ok_or_else(|| Error::InvalidComplex(format!("edge `{}` has no complex", g.edge(e).id))))
            .collect::<Result<Vec<_>>>()?;
        let x = EndX::new(g.clone(), cxs)?;
        let mut assignment = BTreeMap::new();
        for a in &self.assignment {
            let label = match &a.label {
                Some(l) => fc.monoid().elem(l)?,
                None => fc.monoid().zero(),
            };
            let gen = Generator { profile: profile_of(&g, &a.inputs, &a.output)?, label };
            let mut m = MultiMap::zero(gen.profile.inputs.edges.clone(), gen.output(), 1);
            for en in &a.entries {
                if en.inputs.len() != m.arity() {
                    return Err(Error::Assignment(format!(
                        "entry with {} arguments for {}",
                        en.inputs.len(),
                        fc.name(&gen)
                    )));
                }
                let key = en
                    .inputs
                    .iter()
                    .zip(&m.inputs)
                    .map(|(id, &e)| x.complex(e).basis().index(id))
                    .collect::<Result<Vec<_>>>()?;
                let y = x.complex(m.output).basis().index(&en.output)?;
                x.insert(&mut m, key, y, scalar::parse(&en.coeff)?)?;
            }
            if assignment.insert(gen.clone(), m).is_some() {
                return Err(Error::Assignment(format!("{} is assigned twice", fc.name(&gen))));
            }
        }
        let a = AlgebraData::new(&fc, x, assignment, self.implicit_zero)?;
        Ok((fc, a))
    }

    /// Serializes an algebra over the preset described by `preset`.
    pub fn from_algebra(preset: PresetSpec, fc: &FreeDgFc, a: &AlgebraData) -> Self {
        let g = fc.graph();
        let edge = |e: EdgeId| g.edge(e).id.clone();
        let complexes = (0..g.edge_count()).map(|e| ComplexSpec::from_complex(&g.edge(e).id, a.x.complex(e))).collect();
        let assignment = a
            .assignment()
            .iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(gen, m)| {
                let mut entries = Vec::new();
                for (key, v) in m.entries() {
                    for (y, c) in v.iter() {
                        entries.push(MapEntry {
                            inputs: key
                                .iter()
                                .zip(&m.inputs)
                                .map(|(&i, &e)| a.x.complex(e).basis().name(i).to_string())
                                .collect(),
                            output: a.x.complex(m.output).basis().name(y).to_string(),
                            coeff: scalar::format(c),
                        });
                    }
                }
                AssignmentEntry {
                    name: Some(fc.name(gen)),
                    inputs: gen.profile.inputs.edges.iter().map(|&e| edge(e)).collect(),
                    output: edge(gen.output()),
                    label: (!gen.label.is_zero()).then(|| gen.label.0.clone()),
                    entries,
                }
            })
            .collect();
        AlgebraFile { format_version: FORMAT_VERSION, preset, complexes, assignment, implicit_zero: a.implicit_zero }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{dual_numbers, lift};

    #[test]
    fn version_is_enforced() {
        let text = r#"{"format_version": 2, "graph": {"vertices": ["v"], "edges": []}}"#;
        assert!(matches!(GraphFile::parse(text), Err(Error::Parse(_))));
        let bad = r#"{"format_version": 1, "graph": {"vertices": ["v"], "edges": [}"#;
        let err = GraphFile::parse(bad).unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn algebra_round_trip() {
        let preset = PresetSpec::named("ainf");
        let fc = preset.build().unwrap();
        let a = lift(&fc, &dual_numbers()).unwrap();
        let file = AlgebraFile::from_algebra(preset, &fc, &a);
        let text = to_json(&file);
        let back = AlgebraFile::parse(&text).unwrap();
        assert_eq!(back, file);
        let (_, a2) = back.build().unwrap();
        assert_eq!(a2.assignment(), a.assignment());
    }

    #[test]
    fn custom_family_and_rules() {
        let text = r#"{
            "format_version": 1,
            "name": "custom",
            "graph": {"vertices": ["v"], "edges": [{"id": "e", "src": "v", "tgt": "v"}]},
            "generators": [
                {"name": "p", "inputs": ["e", "e"], "output": "e"},
                {"name": "q", "inputs": ["e", "e", "e"], "output": "e"}
            ],
            "differential": "custom",
            "rules": [{"generator": "q", "terms": [
                {"coeff": "-1", "outer": "p", "slot": 1, "inner": "p"},
                {"coeff": "-1", "outer": "p", "slot": 2, "inner": "p"}
            ]}]
        }"#;
        let fc = PresetSpec::parse(text).unwrap().build().unwrap();
        assert_eq!(fc.generators(3, 0).len(), 2);
        assert!(fc.delta_squared_report(3, 0).pass);
        let unknown = text.replace("\"outer\": \"p\", \"slot\": 1", "\"outer\": \"zz\", \"slot\": 1");
        assert!(PresetSpec::parse(&unknown).unwrap().build().is_err());
    }
}
