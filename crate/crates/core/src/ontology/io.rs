//! JSON ontology files.
//!
//! ```json
//! {"name": "fin",
//!  "slots": [{"name": "purpose", "values": ["car", "home"], "constrainable": true,
//!             "group_visibility": "both_groups"}],
//!  "items": [{"id": "fin-001", "assignment": {"purpose": "car"}}]}
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Item, ItemSet, Slot};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OntologyFile {
    name: String,
    slots: Vec<Slot>,
    items: Vec<ItemRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemRecord {
    id: String,
    assignment: BTreeMap<String, String>,
}

/// Names of the ontologies compiled into the library.
pub const SHIPPED_DOMAINS: [&str; 4] = ["fin", "cr", "sfr", "lap"];

fn shipped_source(name: &str) -> Option<&'static str> {
    match name {
        "fin" => Some(include_str!("../../data/fin.json")),
        "cr" => Some(include_str!("../../data/cr.json")),
        "sfr" => Some(include_str!("../../data/sfr.json")),
        "lap" => Some(include_str!("../../data/lap.json")),
        _ => None,
    }
}

pub fn shipped_domain(name: &str) -> Result<ItemSet> {
    let src = shipped_source(name)
        .ok_or_else(|| Error::Config(format!("no shipped domain named '{name}' (have {SHIPPED_DOMAINS:?})")))?;
    parse_domain(src, &format!("{name}.json"))
}

pub fn load_domain(path: impl AsRef<Path>) -> Result<ItemSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_domain(&text, &path.display().to_string())
}

/// 1-based line of the first occurrence of `needle`, or 1.
fn line_of(text: &str, needle: &str) -> usize {
    text.find(needle).map(|pos| text[..pos].lines().count().max(1)).unwrap_or(1)
}

/// Parses and validates an ontology, reporting the offending line on failure.
pub fn parse_domain(text: &str, origin: &str) -> Result<ItemSet> {
    let invalid = |line: usize, msg: String| Error::Validation { path: origin.to_string(), line, msg };
    let file: OntologyFile = serde_json::from_str(text).map_err(|e| invalid(e.line(), e.to_string()))?;

    let mut items = Vec::with_capacity(file.items.len());
    for rec in &file.items {
        let line = line_of(text, &format!("\"{}\"", rec.id));
        let mut values = Vec::with_capacity(file.slots.len());
        for slot in &file.slots {
            let raw = rec
                .assignment
                .get(&slot.name)
                .ok_or_else(|| invalid(line, format!("item '{}' has no value for slot '{}'", rec.id, slot.name)))?;
            let v = slot.value_index(raw).ok_or_else(|| {
                invalid(line, format!("item '{}': '{}' is not a value of slot '{}'", rec.id, raw, slot.name))
            })?;
            values.push(v);
        }
        if let Some(extra) = rec.assignment.keys().find(|k| !file.slots.iter().any(|s| &s.name == *k)) {
            return Err(invalid(line, format!("item '{}' assigns unknown slot '{extra}'", rec.id)));
        }
        items.push(Item { id: rec.id.clone(), values });
    }

    ItemSet::new(file.name, file.slots, items).map_err(|e| {
        let msg = e.to_string();
        // point at the first quoted name mentioned in the message
        let line = msg.split('\'').nth(1).map(|n| line_of(text, &format!("\"{n}\""))).unwrap_or(1);
        invalid(line, msg)
    })
}

pub fn to_json(domain: &ItemSet) -> Result<String> {
    let file = OntologyFile {
        name: domain.name().to_string(),
        slots: domain.slots().to_vec(),
        items: domain
            .items()
            .iter()
            .map(|item| ItemRecord {
                id: item.id.clone(),
                assignment: domain
                    .slots()
                    .iter()
                    .zip(&item.values)
                    .map(|(s, v)| (s.name.clone(), s.values[v.0].clone()))
                    .collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file)?;
    out.push('\n');
    Ok(out)
}
