//! Batch commands behind the `fcmult` binary.
//!
//! [`run`] parses arguments and returns the exit status together with the
//! text written to stdout and stderr, so the commands can be driven from
//! tests without spawning a process. Exit status is 0 when every requested
//! check passes, 1 when a check fails, and 2 for usage, parse and input
//! errors.

use std::fs;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::algebra::{check_algebra, check_direct, verdicts_agree, Bounds, RelationReport};
use crate::error::{Error, Result};
use crate::fc::{check_axioms, check_gamma_orders, is_factor_closed, AxiomReport, FactorClosedReport, OrderReport};
use crate::fixtures;
use crate::format::{to_json, AlgebraFile, FcFile, GraphFile, LabelSpec, PresetSpec};
use crate::free::{DeltaSquaredReport, Fault};
use crate::graph::{validate_graph, DirectedGraph, ValidationReport};

/// Environment variable overriding the default bounds, for example
/// `FCMULT_BOUNDS="arity=6,labels=1,path-len=3"`.
pub const BOUNDS_ENV: &str = "FCMULT_BOUNDS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteArg {
    Generic,
    Direct,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "fcmult",
    version,
    about = "Exact checks for fc-multicategories, free dg presets and A∞-type algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Largest input length (generator arity) to check.
    #[arg(long, global = true)]
    pub arity: Option<usize>,
    /// Label-weight bound. For free-d2 and algebra-check, giving it switches
    /// on `ℕ^rank` labels truncated at this weight.
    #[arg(long, global = true)]
    pub labels: Option<u32>,
    /// Rank of the label monoid when labels are on.
    #[arg(long, global = true, default_value_t = 1)]
    pub rank: usize,
    /// Path-length bound for enumerating fc instances.
    #[arg(long = "path-len", global = true)]
    pub path_len: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = RouteArg::Both)]
    pub route: RouteArg,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a graph file, and decide endpoint-closedness of a declared
    /// subgraph or partition subgraph.
    GraphCheck { file: String },
    /// Audit the operad identities of an fc instance, and factor-closedness of
    /// a declared subgraph.
    FcAudit { file: String },
    /// Check δ² = 0 on a free preset: ainf, category, bimodule, left-module,
    /// right-module, rmodule, or generalized:FILE.
    FreeD2 {
        preset: String,
        /// Object set for category, module and r-module presets.
        #[arg(long, value_delimiter = ',')]
        vertices: Vec<String>,
        /// Ordered partition for the r-module preset, as `a,b|c`.
        #[arg(long)]
        parts: Option<String>,
        /// Use the unreduced labeling, which has curvature generators.
        #[arg(long)]
        curved: bool,
        /// Drop the position sign in the Leibniz extension (debugging aid).
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Check that an assignment is an algebra over its preset.
    AlgebraCheck { file: String },
    /// Print a built-in algebra fixture as an interchange file: ground-field,
    /// dual-numbers, upper-triangular, dg-upper-triangular,
    /// two-object-category, ground-field-bimodule.
    Fixture {
        name: String,
        /// Apply a seeded associativity-breaking perturbation.
        #[arg(long)]
        perturb: bool,
    },
}

/// Bounds in force for a run; printed in every report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunBounds {
    pub arity: usize,
    pub labels: u32,
    pub path_len: usize,
}

impl Default for RunBounds {
    fn default() -> Self {
        RunBounds { arity: 5, labels: 2, path_len: 4 }
    }
}

/// Parses `arity=6,labels=1,path-len=3`; unknown keys are rejected.
pub fn parse_bounds_override(text: &str, mut b: RunBounds) -> Result<RunBounds> {
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| Error::Usage(format!("bad bound `{part}` in {BOUNDS_ENV}")))?;
        let n: usize = v.trim().parse().map_err(|_| Error::Usage(format!("bad value in `{part}` in {BOUNDS_ENV}")))?;
        match k.trim() {
            "arity" => b.arity = n,
            "labels" => b.labels = n as u32,
            "path-len" | "path_len" => b.path_len = n,
            other => return Err(Error::Usage(format!("unknown bound `{other}` in {BOUNDS_ENV}"))),
        }
    }
    Ok(b)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphCheckReport {
    pub bounds: RunBounds,
    pub validation: ValidationReport,
    pub endpoint_closed: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FcAuditReport {
    pub bounds: RunBounds,
    pub axioms: AxiomReport,
    pub gamma_orders: OrderReport,
    pub endpoint_closed: Option<bool>,
    pub factor_closed: Option<FactorClosedReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeD2Report {
    pub bounds: RunBounds,
    pub report: DeltaSquaredReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraCheckReport {
    pub bounds: RunBounds,
    pub route: RouteArg,
    pub reports: Vec<RelationReport>,
    pub routes_agree: Option<bool>,
    pub pass: bool,
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read `{path}`: {e}")))
}

/// Runs the CLI on explicit arguments (the first is the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok(o) => o,
        Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn bounds_for(cli: &Cli) -> Result<RunBounds> {
    let mut b = RunBounds::default();
    if let Ok(text) = std::env::var(BOUNDS_ENV) {
        b = parse_bounds_override(&text, b)?;
    }
    if let Some(a) = cli.arity {
        b.arity = a;
    }
    if let Some(l) = cli.labels {
        b.labels = l;
    }
    if let Some(p) = cli.path_len {
        b.path_len = p;
    }
    if b.arity == 0 || b.path_len == 0 {
        return Err(Error::Usage("bounds must be positive".into()));
    }
    Ok(b)
}

fn emit<T: Serialize>(cli: &Cli, pass: bool, value: &T, text: String) -> Outcome {
    let stdout = match cli.format {
        OutputFormat::Json => to_json(value) + "\n",
        OutputFormat::Text => text + "\n",
    };
    Outcome { code: if pass { 0 } else { 1 }, stdout, stderr: String::new() }
}

fn bounds_line(b: &RunBounds) -> String {
    format!("bounds: arity ≤ {}, label weight ≤ {}, path length ≤ {}", b.arity, b.labels, b.path_len)
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let bounds = bounds_for(cli)?;
    match &cli.command {
        Command::GraphCheck { file } => graph_check(cli, bounds, file),
        Command::FcAudit { file } => fc_audit(cli, bounds, file),
        Command::FreeD2 { preset, vertices, parts, curved, inject_fault } => {
            free_d2(cli, bounds, preset, vertices, parts.as_deref(), *curved, *inject_fault)
        }
        Command::AlgebraCheck { file } => algebra_check(cli, bounds, file),
        Command::Fixture { name, perturb } => fixture(cli, name, *perturb),
    }
}

fn graph_check(cli: &Cli, bounds: RunBounds, file: &str) -> Result<Outcome> {
    let f = GraphFile::parse(&read(file)?)?;
    let validation = validate_graph(&f.graph);
    let mut endpoint_closed = None;
    if validation.valid {
        let g = DirectedGraph::from_spec(&f.graph)?;
        if let Some(sub) = f.subgraph(&g)? {
            endpoint_closed = Some(sub.is_endpoint_closed(&g));
        }
    }
    let mut text = format!(
        "graph: {} ({} vertices, {} edges)\n{}",
        if validation.valid { "valid" } else { "INVALID" },
        f.graph.vertices.len(),
        f.graph.edges.len(),
        bounds_line(&bounds)
    );
    for i in &validation.issues {
        text.push_str(&format!("\n  {}: {}", i.kind, i.message));
    }
    if let Some(c) = endpoint_closed {
        text.push_str(&format!("\nendpoint-closed: {}", if c { "yes" } else { "no" }));
    }
    let pass = validation.valid;
    Ok(emit(cli, pass, &GraphCheckReport { bounds, validation, endpoint_closed }, text))
}

fn fc_audit(cli: &Cli, bounds: RunBounds, file: &str) -> Result<Outcome> {
    let f = FcFile::parse(&read(file)?)?;
    let (fc, sub) = f.build(bounds.path_len)?;
    let axioms = check_axioms(&fc, bounds.arity);
    let gamma_orders = check_gamma_orders(&fc, bounds.arity);
    let (endpoint_closed, factor_closed) = match sub {
        Some(s) => {
            let ec = s.is_endpoint_closed(fc.graph());
            let sub_fc = fc.restrict_mask(s);
            (Some(ec), Some(is_factor_closed(&fc, &sub_fc, bounds.arity)?))
        }
        None => (None, None),
    };
    let mut text = format!("{}\n{axioms}\n{gamma_orders}", bounds_line(&bounds));
    if let (Some(ec), Some(fcr)) = (endpoint_closed, &factor_closed) {
        text.push_str(&format!("\nendpoint-closed: {}\n{fcr}", if ec { "yes" } else { "no" }));
    }
    let pass = axioms.pass && gamma_orders.pass && factor_closed.as_ref().is_none_or(|r| r.closed);
    Ok(emit(cli, pass, &FcAuditReport { bounds, axioms, gamma_orders, endpoint_closed, factor_closed }, text))
}

fn parse_parts(text: &str) -> Vec<Vec<String>> {
    text.split('|').map(|p| p.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect()).collect()
}

fn free_d2(
    cli: &Cli,
    mut bounds: RunBounds,
    preset: &str,
    vertices: &[String],
    parts: Option<&str>,
    curved: bool,
    inject_fault: bool,
) -> Result<Outcome> {
    let mut spec = match preset.strip_prefix("generalized:") {
        Some(path) => {
            let mut s = PresetSpec::parse(&read(path)?)?;
            if s.name != "custom" {
                s.name = "generalized".into();
            }
            s
        }
        None => PresetSpec::named(preset),
    };
    if !vertices.is_empty() {
        spec.vertices = vertices.to_vec();
    }
    if let Some(p) = parts {
        spec.parts = parse_parts(p);
    }
    spec.curved |= curved;
    // labels are off unless asked for on the command line
    match cli.labels {
        Some(l) => spec.labels = LabelSpec { rank: cli.rank, truncation: l },
        None if preset.starts_with("generalized:") => {}
        None => spec.labels = LabelSpec::default(),
    }
    bounds.labels = spec.labels.truncation;
    let mut fc = spec.build()?;
    if inject_fault {
        fc = fc.with_fault(Fault::UnsignedLeibniz);
    }
    let report = fc.delta_squared_report(bounds.arity, bounds.labels);
    let text = format!("{}\n{report}", bounds_line(&bounds));
    let pass = report.pass;
    Ok(emit(cli, pass, &FreeD2Report { bounds, report }, text))
}

fn algebra_check(cli: &Cli, mut bounds: RunBounds, file: &str) -> Result<Outcome> {
    let f = AlgebraFile::parse(&read(file)?)?;
    let (fc, a) = f.build()?;
    if cli.labels.is_none() {
        bounds.labels = fc.monoid().truncation;
    }
    let b = Bounds { arity: bounds.arity, labels: bounds.labels };
    let mut reports = Vec::new();
    if matches!(cli.route, RouteArg::Generic | RouteArg::Both) {
        reports.push(check_algebra(&fc, &a, b)?);
    }
    if matches!(cli.route, RouteArg::Direct | RouteArg::Both) {
        reports.push(check_direct(&fc, &a, b)?);
    }
    let routes_agree = (reports.len() == 2).then(|| verdicts_agree(&reports[0], &reports[1]));
    let pass = reports.iter().all(|r| r.pass) && routes_agree != Some(false);
    let mut text = bounds_line(&bounds);
    for r in &reports {
        text.push_str(&format!("\n{r}"));
    }
    if let Some(agree) = routes_agree {
        text.push_str(&format!("\nroutes agree: {}", if agree { "yes" } else { "NO" }));
    }
    Ok(emit(cli, pass, &AlgebraCheckReport { bounds, route: cli.route, reports, routes_agree, pass }, text))
}

fn fixture(cli: &Cli, name: &str, perturb: bool) -> Result<Outcome> {
    let (data, preset) = match name {
        "ground-field" => (fixtures::ground_field(), PresetSpec::named("ainf")),
        "dual-numbers" => (fixtures::dual_numbers(), PresetSpec::named("ainf")),
        "upper-triangular" => (fixtures::upper_triangular(), PresetSpec::named("ainf")),
        "dg-upper-triangular" => (fixtures::dg_upper_triangular(), PresetSpec::named("ainf")),
        "two-object-category" => {
            let mut p = PresetSpec::named("category");
            p.vertices = vec!["a".into(), "b".into()];
            (fixtures::two_object_category(), p)
        }
        "ground-field-bimodule" => (fixtures::ground_field_bimodule(), PresetSpec::named("bimodule")),
        other => return Err(Error::Usage(format!("unknown fixture `{other}`"))),
    };
    let (data, note) = if perturb {
        let (d, what) = fixtures::perturb(&data, cli.seed)?;
        (d, format!("perturbation (seed {}): {what}\n", cli.seed))
    } else {
        (data, String::new())
    };
    let fc = preset.build()?;
    let a = fixtures::lift(&fc, &data)?;
    let file = AlgebraFile::from_algebra(preset, &fc, &a);
    Ok(Outcome { code: 0, stdout: to_json(&file) + "\n", stderr: note })
}
