//! Report rendering: audit results as JSON value trees and CSV tables.
//!
//! Reports must be byte-identical across runs and machines for the same
//! config and seed, so everything here is deterministic by construction:
//! objects are `serde_json::Map` (sorted keys), and every float is written
//! through one formatter at full round-trip precision.

use std::fs;
use std::io;
use std::path::Path;

use edgeaudit_core::attacks::AttackResult;
use edgeaudit_core::audit::{
    DpReport, GridSpec, Leakage, Lemma6Report, OutputPoint, PowerCurve, PufferfishReport,
};
use edgeaudit_core::distributions::ExactDistribution;
use edgeaudit_core::ergm::{AlphaResult, AlphaWitness};
use edgeaudit_core::graphs::{EdgeIndex, Graph};
use serde::Serialize;
use serde_json::{Map, Number, Value};

pub fn num(x: f64) -> Value {
    Value::Number(Number::from_f64(x).expect("report floats are finite"))
}

/// Leakage renders as a number, or the string "unbounded".
pub fn leakage_value(l: Leakage) -> Value {
    match l.as_finite() {
        Some(x) => num(x),
        None => Value::String("unbounded".into()),
    }
}

fn num_or_unbounded(x: f64) -> Value {
    if x.is_finite() {
        num(x)
    } else {
        Value::String("unbounded".into())
    }
}

fn option_num(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

pub fn edge_value(e: EdgeIndex) -> Value {
    Value::Array(vec![e.i().into(), e.j().into()])
}

/// Canonical graph form: vertex count plus edges sorted in slot order.
pub fn graph_value(g: &Graph) -> Value {
    let mut m = Map::new();
    m.insert("n".into(), g.n().into());
    m.insert("edges".into(), Value::Array(g.edges().into_iter().map(edge_value).collect()));
    Value::Object(m)
}

fn output_point_value(p: &OutputPoint) -> Value {
    let mut m = Map::new();
    match p {
        OutputPoint::Index(k) => m.insert("index".into(), (*k as u64).into()),
        OutputPoint::Value(y) => m.insert("value".into(), num(*y)),
    };
    Value::Object(m)
}

pub fn grid_value(grid: &GridSpec) -> Value {
    let mut m = Map::new();
    m.insert("lo".into(), num(grid.lo()));
    m.insert("hi".into(), num(grid.hi()));
    m.insert("points".into(), (grid.points() as u64).into());
    Value::Object(m)
}

pub fn dp_report_value(r: &DpReport) -> Value {
    let mut m = Map::new();
    m.insert("realized_epsilon".into(), leakage_value(r.realized_epsilon));
    m.insert("grid_based".into(), r.grid_based.into());
    let witness = r.witness.as_ref().map_or(Value::Null, |w| {
        let mut wm = Map::new();
        wm.insert("g0".into(), graph_value(&w.g0));
        wm.insert("g1".into(), graph_value(&w.g1));
        wm.insert("output".into(), output_point_value(&w.output));
        Value::Object(wm)
    });
    m.insert("witness".into(), witness);
    Value::Object(m)
}

pub fn pufferfish_report_value(r: &PufferfishReport) -> Value {
    let mut m = Map::new();
    let per_edge: Vec<Value> = r
        .per_edge
        .iter()
        .map(|a| {
            let mut am = Map::new();
            am.insert("edge".into(), edge_value(a.edge));
            am.insert("leakage".into(), leakage_value(a.leakage));
            am.insert(
                "witness_output".into(),
                a.witness_output.as_ref().map_or(Value::Null, output_point_value),
            );
            Value::Object(am)
        })
        .collect();
    let skipped: Vec<Value> = r
        .skipped
        .iter()
        .map(|s| {
            let mut sm = Map::new();
            sm.insert("edge".into(), edge_value(s.edge));
            sm.insert("edge_probability".into(), num(s.edge_probability));
            Value::Object(sm)
        })
        .collect();
    m.insert("per_edge".into(), Value::Array(per_edge));
    m.insert("skipped".into(), Value::Array(skipped));
    m.insert("overall".into(), leakage_value(r.overall));
    Value::Object(m)
}

pub fn lemma6_report_value(r: &Lemma6Report) -> Value {
    let mut m = Map::new();
    m.insert("minimal_alpha".into(), leakage_value(r.minimal_alpha));
    let witness = r.witness.as_ref().map_or(Value::Null, |(g, e)| {
        let mut wm = Map::new();
        wm.insert("graph".into(), graph_value(g));
        wm.insert("edge".into(), edge_value(*e));
        Value::Object(wm)
    });
    m.insert("witness".into(), witness);
    m.insert(
        "skipped_edges".into(),
        Value::Array(r.skipped_edges.iter().map(|&e| edge_value(e)).collect()),
    );
    Value::Object(m)
}

fn alpha_witness_value(w: &Option<AlphaWitness>) -> Value {
    w.as_ref().map_or(Value::Null, |w| {
        let mut m = Map::new();
        m.insert("model_index".into(), (w.model_index as u64).into());
        m.insert("graph".into(), graph_value(&w.graph));
        m.insert("edge".into(), edge_value(w.edge));
        Value::Object(m)
    })
}

pub fn alpha_result_value(r: &AlphaResult) -> Value {
    let mut m = Map::new();
    m.insert("alpha_exact".into(), leakage_value(r.alpha_exact));
    m.insert("zeta".into(), num(r.zeta));
    m.insert("alpha_upper".into(), num_or_unbounded(r.alpha_upper));
    m.insert("witness_alpha".into(), alpha_witness_value(&r.witness_alpha));
    m.insert("witness_zeta".into(), alpha_witness_value(&r.witness_zeta));
    Value::Object(m)
}

pub fn attack_row_value(r: &AttackResult) -> Value {
    let mut m = Map::new();
    m.insert("n".into(), r.n.into());
    m.insert("trials".into(), r.trials.into());
    m.insert("accuracy".into(), num(r.accuracy));
    m.insert("mean_noisy_density_truth1".into(), option_num(r.mean_noisy_density_truth1));
    m.insert("mean_noisy_density_truth0".into(), option_num(r.mean_noisy_density_truth0));
    m.insert("epsilon".into(), num(r.epsilon));
    m.insert("a".into(), num(r.a));
    m.insert("b".into(), num(r.b));
    m.insert("q".into(), num(r.q));
    m.insert("seed".into(), r.seed.into());
    Value::Object(m)
}

pub fn power_curve_value(c: &PowerCurve) -> Value {
    Value::Array(
        c.vertices().iter().map(|&(a, b)| Value::Array(vec![num(a), num(b)])).collect(),
    )
}

/// The fixed top-level report shape shared by every command.
pub fn envelope(command: &str, config: Map<String, Value>, result: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema_version".into(), 1u64.into());
    m.insert("command".into(), Value::String(command.into()));
    m.insert("config".into(), Value::Object(config));
    m.insert("result".into(), result);
    Value::Object(m)
}

/// Writes floats as `{:.16e}` (17 significant digits), enough to round-trip
/// every f64 exactly. serde_json only routes finite values here.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json_bytes(v: &Value) -> Vec<u8> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    v.serialize(&mut ser).expect("writing JSON to a Vec cannot fail");
    buf.push(b'\n');
    buf
}

fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_power_curve_csv(path: &Path, curve: &PowerCurve) -> io::Result<()> {
    let mut out = String::from("alpha,beta\n");
    for &(a, b) in curve.vertices() {
        out.push_str(&format!("{},{}\n", csv_float(a), csv_float(b)));
    }
    fs::write(path, out)
}

pub fn write_attack_csv(path: &Path, rows: &[AttackResult]) -> io::Result<()> {
    let mut out =
        String::from("n,trials,accuracy,mean_density_truth1,mean_density_truth0,epsilon,seed\n");
    for r in rows {
        let m1 = r.mean_noisy_density_truth1.map(csv_float).unwrap_or_default();
        let m0 = r.mean_noisy_density_truth0.map(csv_float).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            r.trials,
            csv_float(r.accuracy),
            m1,
            m0,
            csv_float(r.epsilon),
            r.seed
        ));
    }
    fs::write(path, out)
}

/// One row per graph in lexicographic order; the graph column is the edge
/// indicator string in slot order.
pub fn write_distribution_csv(path: &Path, dist: &ExactDistribution) -> io::Result<()> {
    let mut out = String::from("graph,probability\n");
    for (g, p) in dist.iter_lex() {
        let bits: String = g.edge_bits().map(|b| if b { '1' } else { '0' }).collect();
        out.push_str(&format!("{},{}\n", bits, csv_float(p)));
    }
    fs::write(path, out)
}
