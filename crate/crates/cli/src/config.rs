//! Config loading and validation.
//!
//! Every command takes one JSON config file. The file may carry `command`
//! and `schema_version` fields (checked when present, so a config cannot be
//! fed to the wrong subcommand); everything else is command-specific and
//! unknown fields are rejected rather than ignored.
//!
//! Mechanisms and distributions are polymorphic objects dispatched on a
//! `type` field. Dispatch is done by hand so each variant struct keeps
//! `deny_unknown_fields` and the error messages name the offending type.

use std::fs;
use std::path::{Path, PathBuf};

use edgeaudit_core::distributions::{ExactDistribution, IndependentEdgeModel, TwoQueensModel};
use edgeaudit_core::ergm::{ErgmModel, StatisticKind};
use edgeaudit_core::graphs::{EdgeIndex, Graph};
use edgeaudit_core::mechanisms::{
    ConstantMechanism, DiscreteMechanism, IdentityMechanism, LaplaceEdgeCount,
    RandomizedResponseEdges,
};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ErrorKind {
    /// Bad invocation: unusable flags or a config meant for another command.
    Usage,
    /// Config file is unreadable, malformed, or describes invalid objects.
    Config,
    /// The request needs an exact table beyond the enumeration cap.
    Capacity,
    /// Failure while computing, not while validating.
    Internal,
}

impl ErrorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ErrorKind::Usage => "usage",
            ErrorKind::Config => "config",
            ErrorKind::Capacity => "capacity",
            ErrorKind::Internal => "internal",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            ErrorKind::Usage | ErrorKind::Config => 2,
            ErrorKind::Capacity => 3,
            ErrorKind::Internal => 1,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Usage, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Config, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Internal, message: message.into() }
    }
}

/// Core error raised while building objects out of the config: the user
/// wrote the parameters, so this is a config error, except running into the
/// enumeration cap which keeps its own kind and exit code.
pub fn build_err(e: edgeaudit_core::Error) -> CliError {
    CliError { kind: kind_for_core(&e, ErrorKind::Config), message: e.to_string() }
}

/// Core error raised mid-computation on validated inputs.
pub fn run_err(e: edgeaudit_core::Error) -> CliError {
    CliError { kind: kind_for_core(&e, ErrorKind::Internal), message: e.to_string() }
}

fn kind_for_core(e: &edgeaudit_core::Error, fallback: ErrorKind) -> ErrorKind {
    match e {
        edgeaudit_core::Error::EnumerationCapExceeded { .. } => ErrorKind::Capacity,
        _ => fallback,
    }
}

/// Read, parse, and type a config file, returning the typed config plus the
/// raw object for echoing into the report.
pub fn load_config<T: DeserializeOwned>(
    path: &Path,
    command: &str,
) -> Result<(T, Map<String, Value>), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{} is not valid JSON: {e}", path.display())))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::config("config must be a JSON object"))?
        .clone();
    if let Some(declared) = obj.get("command") {
        if declared.as_str() != Some(command) {
            return Err(CliError::usage(format!(
                "config declares command {declared}, but was passed to {command}"
            )));
        }
    }
    if let Some(sv) = obj.get("schema_version") {
        if sv.as_u64() != Some(1) {
            return Err(CliError::config(format!("unsupported schema_version {sv}, expected 1")));
        }
    }
    // Identity fields are validated above; the typed structs only describe
    // the command-specific payload.
    let mut payload = obj.clone();
    payload.remove("command");
    payload.remove("schema_version");
    let typed: T = serde_json::from_value(Value::Object(payload))
        .map_err(|e| CliError::config(format!("invalid {command} config: {e}")))?;
    Ok((typed, obj))
}

/// A graph as it appears in configs and reports.
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub n: u32,
    pub edges: Vec<(u32, u32)>,
}

impl GraphJson {
    pub fn build(&self) -> Result<Graph, CliError> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for &(i, j) in &self.edges {
            edges.push(EdgeIndex::new(i, j).map_err(build_err)?);
        }
        Graph::from_edges(self.n, &edges).map_err(build_err)
    }
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct RrEdgesConfig {
    n: u32,
    p: Option<f64>,
    epsilon: Option<f64>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct LaplaceConfig {
    epsilon: f64,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct ConstantConfig {
    n: u32,
    law: Vec<f64>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct IdentityConfig {
    n: u32,
}

/// A mechanism the CLI can audit: finite-alphabet ones go through the
/// exhaustive auditors, the Laplace release through the grid auditors.
pub enum Mechanism {
    Discrete(Box<dyn DiscreteMechanism>),
    Laplace(LaplaceEdgeCount),
}

/// Split a `{"type": ..., ...}` object into its tag and remaining fields.
fn tagged<'v>(v: &'v Value, what: &str) -> Result<(&'v str, Value), CliError> {
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::config(format!("{what} must be a JSON object")))?;
    let tag = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::config(format!("{what} needs a string \"type\" field")))?;
    let mut rest = obj.clone();
    rest.remove("type");
    Ok((tag, Value::Object(rest)))
}

fn variant<T: DeserializeOwned>(tag: &str, fields: Value) -> Result<T, CliError> {
    serde_json::from_value(fields)
        .map_err(|e| CliError::config(format!("invalid {tag} config: {e}")))
}

pub fn build_mechanism(v: &Value) -> Result<Mechanism, CliError> {
    let (tag, fields) = tagged(v, "mechanism")?;
    match tag {
        "rr_edges" => {
            let cfg: RrEdgesConfig = variant(tag, fields)?;
            let mech = match (cfg.p, cfg.epsilon) {
                (Some(p), None) => RandomizedResponseEdges::new(cfg.n, p).map_err(build_err)?,
                (None, Some(eps)) => {
                    RandomizedResponseEdges::from_epsilon(cfg.n, eps).map_err(build_err)?
                }
                _ => {
                    return Err(CliError::config(
                        "rr_edges takes exactly one of \"p\" or \"epsilon\"",
                    ))
                }
            };
            Ok(Mechanism::Discrete(Box::new(mech)))
        }
        "laplace_edge_count" => {
            let cfg: LaplaceConfig = variant(tag, fields)?;
            Ok(Mechanism::Laplace(LaplaceEdgeCount::new(cfg.epsilon).map_err(build_err)?))
        }
        "constant" => {
            let cfg: ConstantConfig = variant(tag, fields)?;
            Ok(Mechanism::Discrete(Box::new(
                ConstantMechanism::new(cfg.n, cfg.law).map_err(build_err)?,
            )))
        }
        "identity" => {
            let cfg: IdentityConfig = variant(tag, fields)?;
            Ok(Mechanism::Discrete(Box::new(IdentityMechanism::new(cfg.n).map_err(build_err)?)))
        }
        other => Err(CliError::config(format!(
            "unknown mechanism type {other:?} (expected rr_edges, laplace_edge_count, constant, or identity)"
        ))),
    }
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct IndependentConfig {
    n: u32,
    pi: Option<f64>,
    pi_edges: Option<Vec<f64>>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct TwoQueensConfig {
    n: u32,
    a: f64,
    b: f64,
    q: f64,
}

/// ERGM description, shared between the `ergm` distribution type and the
/// `ergm-alpha` model list.
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct ErgmConfig {
    pub n: u32,
    pub statistics: Vec<String>,
    pub beta: Vec<f64>,
}

pub fn build_ergm_model(cfg: &ErgmConfig) -> Result<ErgmModel, CliError> {
    let mut kinds = Vec::with_capacity(cfg.statistics.len());
    for name in &cfg.statistics {
        kinds.push(StatisticKind::parse(name).ok_or_else(|| {
            CliError::config(format!(
                "unknown statistic {name:?} (expected edges, two_stars, or triangles)"
            ))
        })?);
    }
    ErgmModel::new(cfg.n, kinds, cfg.beta.clone()).map_err(build_err)
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct TableEntry {
    graph: GraphJson,
    prob: f64,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct TableConfig {
    n: u32,
    entries: Vec<TableEntry>,
}

pub fn build_distribution(v: &Value) -> Result<ExactDistribution, CliError> {
    let (tag, fields) = tagged(v, "distribution")?;
    match tag {
        "independent" => {
            let cfg: IndependentConfig = variant(tag, fields)?;
            let model = match (cfg.pi, cfg.pi_edges) {
                (Some(p), None) => IndependentEdgeModel::uniform(cfg.n, p).map_err(build_err)?,
                (None, Some(pi)) => IndependentEdgeModel::new(cfg.n, pi).map_err(build_err)?,
                _ => {
                    return Err(CliError::config(
                        "independent takes exactly one of \"pi\" or \"pi_edges\"",
                    ))
                }
            };
            model.exact_distribution().map_err(build_err)
        }
        "two_queens" => {
            let cfg: TwoQueensConfig = variant(tag, fields)?;
            let model = TwoQueensModel::new(cfg.n, cfg.a, cfg.b, cfg.q).map_err(build_err)?;
            model.exact_distribution().map_err(build_err)
        }
        "ergm" => {
            let cfg: ErgmConfig = variant(tag, fields)?;
            build_ergm_model(&cfg)?.exact_distribution().map_err(build_err)
        }
        "table" => {
            let cfg: TableConfig = variant(tag, fields)?;
            let mut entries = Vec::with_capacity(cfg.entries.len());
            for entry in &cfg.entries {
                entries.push((entry.graph.build()?, entry.prob));
            }
            ExactDistribution::from_graph_weights(cfg.n, &entries).map_err(build_err)
        }
        other => Err(CliError::config(format!(
            "unknown distribution type {other:?} (expected independent, two_queens, ergm, or table)"
        ))),
    }
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct AuditDpConfig {
    pub mechanism: Value,
    /// Vertex count for mechanisms that do not fix one themselves.
    pub n: Option<u32>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct AuditPufferfishConfig {
    pub mechanism: Value,
    pub distribution: Value,
    /// Optional export of the expanded distribution table.
    pub distribution_csv_out: Option<PathBuf>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct Lemma6Config {
    pub distribution: Value,
    pub distribution_csv_out: Option<PathBuf>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct ErgmAlphaConfig {
    pub models: Vec<ErgmConfig>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct AttackQueensConfig {
    pub a: f64,
    pub b: f64,
    pub q: f64,
    pub epsilon: f64,
    pub n_list: Vec<u32>,
    pub trials: u64,
    pub csv_out: Option<PathBuf>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct PowerCurveConfig {
    pub mechanism: Value,
    pub g0: GraphJson,
    pub g1: GraphJson,
    /// When set, the report includes the curve's maximum excess over the
    /// line beta = e^epsilon_line alpha.
    pub epsilon_line: Option<f64>,
    pub csv_out: Option<PathBuf>,
}
