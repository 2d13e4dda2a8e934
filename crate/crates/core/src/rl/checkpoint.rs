//! JSON checkpoints of trained learners.
//!
//! ```json
//! {"key": {"domain": "fin", "env_id": 1, "mode": "s", "seed": 3, "algorithm": "dqn"},
//!  "learners": [{"kind": "dqn", ...}, {"kind": "dqn", ...}]}
//! ```
//!
//! `learners` holds one entry per segment in segmented mode and a single
//! entry otherwise. Replay buffers and in-flight dialogue state are not saved.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AnyLearner, LearnerKind};
use crate::error::{Error, Result};
use crate::personalization::PersonalizationMode;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CheckpointKey {
    pub domain: String,
    pub env_id: u8,
    pub mode: PersonalizationMode,
    pub seed: u64,
    pub algorithm: LearnerKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Checkpoint<T> {
    pub key: CheckpointKey,
    pub learners: Vec<AnyLearner<T>>,
}

pub fn write_checkpoint<T: Scalar>(path: impl AsRef<Path>, checkpoint: &Checkpoint<T>) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(file, checkpoint)?;
    Ok(())
}

/// Reads a checkpoint and checks it is the one asked for.
pub fn read_checkpoint<T: Scalar>(path: impl AsRef<Path>, expected: &CheckpointKey) -> Result<Checkpoint<T>> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let cp: Checkpoint<T> = serde_json::from_reader(file)?;
    if &cp.key != expected {
        return Err(Error::Config(format!("checkpoint is for {:?}, expected {expected:?}", cp.key)));
    }
    if cp.learners.iter().any(|l| l.kind() != expected.algorithm) {
        return Err(Error::Config("checkpoint learner kind does not match its key".into()));
    }
    Ok(cp)
}
