use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear exploration decay over a fixed number of training dialogues,
/// constant afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub horizon: usize,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        Self { start: 0.5, end: 0.05, horizon: 4000 }
    }
}

impl EpsilonSchedule {
    pub fn new(start: f64) -> Self {
        Self { start, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..=1.0).contains(&self.start) && (0.0..=1.0).contains(&self.end) && self.horizon > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("bad epsilon schedule {self:?}")))
        }
    }

    /// Exploration probability after `dialogues` completed training dialogues.
    pub fn value(&self, dialogues: usize) -> f64 {
        if dialogues >= self.horizon {
            return self.end;
        }
        let frac = dialogues as f64 / self.horizon as f64;
        self.start + (self.end - self.start) * frac
    }
}
