//! Simulator difficulty settings: error rate, action masks and user model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserModel {
    Normal,
    Unfriendly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentConfig {
    pub id: u8,
    pub error_rate: f64,
    pub masks: bool,
    pub user_model: UserModel,
    /// Horizon in system turns.
    #[serde(default = "default_max_turns")]
    pub max_turns: usize,
}

fn default_max_turns() -> usize {
    25
}

impl EnvironmentConfig {
    /// One of the six standard environments, numbered 1 to 6.
    pub fn standard(id: u8) -> Result<Self> {
        use UserModel::*;
        let (error_rate, masks, user_model) = match id {
            1 => (0.0, true, Normal),
            2 => (0.0, false, Normal),
            3 => (0.15, true, Normal),
            4 => (0.15, false, Normal),
            5 => (0.15, false, Unfriendly),
            6 => (0.30, true, Normal),
            _ => return Err(Error::Config(format!("unknown environment {id}; expected 1..=6"))),
        };
        Ok(Self { id, error_rate, masks, user_model, max_turns: default_max_turns() })
    }

    pub fn all_standard() -> Vec<Self> {
        (1..=6).map(|i| Self::standard(i).expect("standard ids")).collect()
    }
}
