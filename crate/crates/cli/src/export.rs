//! Files written by the pipeline: DOT, JSON and CSV.

use std::fmt::Write as _;
use std::path::Path;

use poset_screen::{GroupRates, Poset, SelectionResult};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot serialize {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), ExportError> {
    std::fs::write(path, contents).map_err(|source| ExportError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn quote(id: &str) -> String {
    let mut out = String::with_capacity(id.len() + 2);
    out.push('"');
    for ch in id.chars() {
        match ch {
            '"' | '\\' => {
                out.push('\\');
                out.push(ch);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(ch),
        }
    }
    out.push('"');
    out
}

/// Hasse diagram in DOT. Nodes in sorted id order, then edges from the
/// dominated candidate to the one above it.
pub fn hasse_dot(p: &Poset) -> String {
    let hasse = p.transitive_reduction();
    let mut out = String::from("digraph hasse {\n  rankdir=BT;\n");
    for id in hasse.elements() {
        writeln!(out, "  {};", quote(id)).unwrap();
    }
    let mut edges: Vec<(&str, &str)> = hasse.edges().collect();
    edges.sort_unstable();
    for (lo, hi) in edges {
        writeln!(out, "  {} -> {};", quote(lo), quote(hi)).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn export_hasse_dot(p: &Poset, path: &Path) -> Result<(), ExportError> {
    write_file(path, hasse_dot(p).as_bytes())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), ExportError> {
    let text = to_json(value).map_err(|source| ExportError::Json {
        path: path.display().to_string(),
        source,
    })?;
    write_file(path, text.as_bytes())
}

fn csv_bytes<F>(path: &Path, fill: F) -> Result<Vec<u8>, ExportError>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let wrap = |source| ExportError::Csv { path: path.display().to_string(), source };
    let mut w = csv::Writer::from_writer(Vec::new());
    fill(&mut w).map_err(wrap)?;
    w.into_inner().map_err(|e| wrap(e.into_error().into()))
}

/// `group,pool,selected,rate`; the rate is blank for an empty group.
pub fn rates_csv(rates: &GroupRates, path: &Path) -> Result<Vec<u8>, ExportError> {
    csv_bytes(path, |w| {
        w.write_record(["group", "pool", "selected", "rate"])?;
        for (group, r) in rates {
            let rate = r.rate.map(|x| x.to_string()).unwrap_or_default();
            w.write_record([group.clone(), r.pool.to_string(), r.selected.to_string(), rate])?;
        }
        Ok(())
    })
}

pub fn write_rates_csv(rates: &GroupRates, path: &Path) -> Result<(), ExportError> {
    write_file(path, &rates_csv(rates, path)?)
}

/// `id,rationale`
pub fn write_selection_csv(result: &SelectionResult, path: &Path) -> Result<(), ExportError> {
    let bytes = csv_bytes(path, |w| {
        w.write_record(["id", "rationale"])?;
        for s in &result.selected {
            let tag = serde_json::to_value(s.rationale).expect("tag serializes");
            w.write_record([s.id.as_str(), tag.as_str().unwrap_or_default()])?;
        }
        Ok(())
    })?;
    write_file(path, &bytes)
}
