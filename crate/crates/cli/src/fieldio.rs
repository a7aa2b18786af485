//! Field files: the `replicate,index,value` table written by `sample`, as CSV
//! (`#` lines ignored) or as the JSON report.

use std::collections::BTreeMap;
use std::path::Path;

use circmat::fields::{GridField, Provenance};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
struct Entry {
    replicate: u64,
    index: usize,
    value: f64,
}

#[derive(Debug, Deserialize)]
struct JsonFields {
    rows: Vec<Entry>,
}

pub fn read_fields(path: &Path) -> Result<Vec<GridField>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_fields(&text)
}

pub fn parse_fields(text: &str) -> Result<Vec<GridField>, String> {
    let entries = if text.trim_start().starts_with('{') {
        serde_json::from_str::<JsonFields>(text).map_err(|e| format!("bad field JSON: {e}"))?.rows
    } else {
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
        reader
            .deserialize()
            .collect::<Result<Vec<Entry>, _>>()
            .map_err(|e| format!("bad field CSV: {e}"))?
    };
    assemble(entries)
}

fn assemble(entries: Vec<Entry>) -> Result<Vec<GridField>, String> {
    let mut grouped: BTreeMap<u64, BTreeMap<usize, f64>> = BTreeMap::new();
    for e in entries {
        if grouped.entry(e.replicate).or_default().insert(e.index, e.value).is_some() {
            return Err(format!("replicate {} repeats index {}", e.replicate, e.index));
        }
    }
    if grouped.is_empty() {
        return Err("field file has no values".into());
    }
    grouped
        .into_iter()
        .map(|(replicate, values)| {
            let n = values.len();
            if values.keys().last() != Some(&(n - 1)) {
                return Err(format!("replicate {replicate} does not cover indices 0..{n}"));
            }
            GridField::new(values.into_values().collect(), Provenance { model: "file".into(), seed: 0, replicate })
                .map_err(|e| e.to_string())
        })
        .collect()
}
