use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::results::ResultRow;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKey {
    Env,
    Domain,
    /// Algorithm with its personalization suffix, e.g. `GP_s`.
    Label,
}

/// Mean and spread of `test_reward_mean` over the cells of one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub env_id: Option<u8>,
    pub domain: Option<String>,
    pub label: Option<String>,
    pub cells: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single cell.
    pub sd: f64,
    pub single_cell: bool,
    pub min: f64,
    pub max: f64,
}

type Group = (Option<u8>, Option<String>, Option<String>);

/// Groups rows by `keys` and summarizes each group, in sorted group order.
/// Grouping by [`GroupKey::Label`] alone gives the per-algorithm grand mean
/// over every environment and domain.
pub fn aggregate(rows: &[ResultRow], keys: &[GroupKey]) -> Result<Vec<SummaryRow>> {
    if rows.is_empty() {
        return Err(Error::Precondition("nothing to aggregate".into()));
    }
    let mut groups: BTreeMap<Group, Vec<f64>> = BTreeMap::new();
    for r in rows {
        let g = (
            keys.contains(&GroupKey::Env).then_some(r.env_id),
            keys.contains(&GroupKey::Domain).then(|| r.domain.clone()),
            keys.contains(&GroupKey::Label).then(|| r.label()),
        );
        groups.entry(g).or_default().push(r.test_reward_mean);
    }
    Ok(groups
        .into_iter()
        .filter_map(|((env_id, domain, label), values)| {
            if values.is_empty() {
                log::warn!("empty group {env_id:?} {domain:?} {label:?} omitted");
                return None;
            }
            let (mean, sd) = mean_sd(&values);
            Some(SummaryRow {
                env_id,
                domain,
                label,
                cells: values.len(),
                mean,
                sd,
                single_cell: values.len() == 1,
                min: values.iter().cloned().fold(f64::INFINITY, f64::min),
                max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            })
        })
        .collect())
}

pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn write_summary(path: impl AsRef<Path>, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
