use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::grid::Algorithm;
use crate::error::Result;
use crate::personalization::PersonalizationMode;

/// One line of the results CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub env_id: u8,
    pub domain: String,
    pub algorithm: Algorithm,
    pub mode: PersonalizationMode,
    pub seed: u64,
    pub train_episodes: usize,
    pub test_episodes: usize,
    pub test_reward_mean: f64,
    pub test_success_rate: f64,
    pub wall_clock_s: f64,
}

impl ResultRow {
    /// Column label in summary tables: `DQN_s` for learners, `RQ` for baselines.
    pub fn label(&self) -> String {
        if self.algorithm.learner().is_some() {
            format!("{}_{}", self.algorithm, self.mode)
        } else {
            self.algorithm.to_string()
        }
    }
}

/// Incremental CSV writer; every append is flushed.
pub struct ResultSink {
    writer: csv::Writer<File>,
}

impl ResultSink {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        if let Some(parent) = path.as_ref().parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(File::create(path)?);
        writer.write_record(HEADER)?;
        writer.flush()?;
        Ok(Self { writer })
    }

    pub fn append(&mut self, row: &ResultRow) -> Result<()> {
        self.writer.serialize(row)?;
        self.writer.flush()?;
        Ok(())
    }
}

const HEADER: [&str; 10] = [
    "env_id",
    "domain",
    "algorithm",
    "mode",
    "seed",
    "train_episodes",
    "test_episodes",
    "test_reward_mean",
    "test_success_rate",
    "wall_clock_s",
];

pub fn write_results(path: impl AsRef<Path>, rows: &[ResultRow]) -> Result<()> {
    let mut sink = ResultSink::create(path)?;
    for row in rows {
        sink.writer.serialize(row)?;
    }
    sink.writer.flush()?;
    Ok(())
}

pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let rows = reader.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?;
    Ok(rows)
}
