//! File artifacts and structured logging.
//!
//! Every stage of the pipeline reports through [`log_line`], which emits one
//! JSON object per line on stderr so that runs can be grepped and diffed.
//! The CSV writers here define the on-disk schema for steady states, CCDF
//! curves, binned conditional means, and fit reports; [`read_values`] is the
//! matching reader that accepts either a bare list of numbers or the last
//! column of a headered CSV, so stages can be chained through files.

use flownet::graph::DirectedGraph;
use flownet::stats::{BinnedConditional, CcdfCurve};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Emits one JSON object per call on stderr, tagged with the stage name.
///
/// `fields` should be a JSON object (anything else is logged under a
/// `detail` key). Keys are emitted in sorted order so repeated runs produce
/// byte-identical logs.
pub fn log_line(stage: &str, fields: serde_json::Value) {
    let mut object = serde_json::Map::new();
    object.insert("stage".into(), stage.into());
    match fields {
        serde_json::Value::Object(map) => {
            for (key, value) in map {
                object.insert(key, value);
            }
        }
        other => {
            object.insert("detail".into(), other);
        }
    }
    eprintln!("{}", serde_json::Value::Object(object));
}

/// Writes a steady state as `node_id,x_steady`, using the graph's original
/// node labels when it has them and dense indices otherwise.
pub fn write_steady_csv(
    path: &Path,
    graph: &DirectedGraph,
    state: &[f64],
) -> std::io::Result<()> {
    let mut text = String::from("node_id,x_steady\n");
    for (node, value) in state.iter().enumerate() {
        match graph.label(node as u32) {
            Some(label) => {
                let _ = writeln!(text, "{label},{value}");
            }
            None => {
                let _ = writeln!(text, "{node},{value}");
            }
        }
    }
    fs::write(path, text)
}

/// Writes a CCDF curve as `value,ccdf`, one distinct value per row.
pub fn write_ccdf_csv(path: &Path, curve: &CcdfCurve) -> std::io::Result<()> {
    let mut text = String::from("value,ccdf\n");
    for (value, fraction) in curve.points() {
        let _ = writeln!(text, "{value},{fraction}");
    }
    fs::write(path, text)
}

/// Writes a binned conditional-mean curve as
/// `bin_center,mean,count,p05,p95,mode`. The underflow bin, when present,
/// comes first with a center of zero.
pub fn write_binned_csv(path: &Path, binned: &BinnedConditional) -> std::io::Result<()> {
    let mut text = String::from("bin_center,mean,count,p05,p95,mode\n");
    if let Some(under) = &binned.underflow {
        let _ = writeln!(
            text,
            "0,{},{},{},{},{}",
            under.mean, under.count, under.p05, under.p95, under.mode
        );
    }
    for bin in &binned.bins {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{}",
            bin.center, bin.mean, bin.count, bin.p05, bin.p95, bin.mode
        );
    }
    fs::write(path, text)
}

/// Writes per-node weighted neighbor sums as `node_id,s1,s2`.
pub fn write_nbrsums_csv(
    path: &Path,
    graph: &DirectedGraph,
    s1: &[f64],
    s2: &[f64],
) -> std::io::Result<()> {
    let mut text = String::from("node_id,s1,s2\n");
    for node in 0..s1.len() {
        let a = s1[node];
        let b = s2[node];
        match graph.label(node as u32) {
            Some(label) => {
                let _ = writeln!(text, "{label},{a},{b}");
            }
            None => {
                let _ = writeln!(text, "{node},{a},{b}");
            }
        }
    }
    fs::write(path, text)
}

/// Writes a flat `metric,value` report, preserving row order.
pub fn write_report_csv(path: &Path, rows: &[(String, f64)]) -> std::io::Result<()> {
    let mut text = String::from("metric,value\n");
    for (metric, value) in rows {
        let _ = writeln!(text, "{metric},{value}");
    }
    fs::write(path, text)
}

/// Reads a column of numbers from a file.
///
/// Accepts either one number per line or comma-separated rows, in which
/// case the last field of each row is taken. A first line that does not
/// parse is treated as a header and skipped; any later unparsable line is
/// an error. Blank lines and lines starting with `#` are ignored.
pub fn read_values(path: &Path) -> Result<Vec<f64>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut values = Vec::new();
    let mut first_data_line = true;
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        match field.parse::<f64>() {
            Ok(value) => values.push(value),
            Err(_) if first_data_line => {}
            Err(_) => {
                return Err(format!(
                    "{}: line {}: cannot parse {field:?} as a number",
                    path.display(),
                    index + 1
                ));
            }
        }
        first_data_line = false;
    }
    if values.is_empty() {
        return Err(format!("{}: no numeric values found", path.display()));
    }
    Ok(values)
}
