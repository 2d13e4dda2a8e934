use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{EpisodeRecord, SystemAct, UserActKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One line of a JSON-lines transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TranscriptLine<T> {
    pub turn: usize,
    pub system_act: SystemAct,
    pub true_user_act: UserActKind,
    pub observed_user_act: UserActKind,
    pub confidence: T,
}

pub fn write_transcript<T: Scalar, W: Write>(record: &EpisodeRecord<T>, mut out: W) -> Result<()> {
    for (i, t) in record.turns.iter().enumerate() {
        let line = TranscriptLine {
            turn: i,
            system_act: t.system.clone(),
            true_user_act: t.truth.clone(),
            observed_user_act: t.observed.kind.clone(),
            confidence: t.observed.confidence,
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_transcript<T: Scalar, R: BufRead>(input: R) -> Result<Vec<TranscriptLine<T>>> {
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str(&line).map_err(|e| Error::Validation {
            path: "<transcript>".into(),
            line: n + 1,
            msg: e.to_string(),
        })?;
        out.push(parsed);
    }
    Ok(out)
}
