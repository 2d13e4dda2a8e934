//! Learned dialogue policies: a Q-network learner and a sparse GP-SARSA
//! learner behind one [`Learner`] interface, plus the adapter that plugs a
//! learner into the dialogue engine.

mod checkpoint;
mod dqn;
mod gp;
mod mlp;
mod policy;
mod schedule;

use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};

use crate::dialog::ActionMask;
use crate::error::{Error, Result};
use crate::rng::DialRng;
use crate::scalar::Scalar;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint, CheckpointKey};
pub use dqn::{Dqn, DqnConfig};
pub use gp::{GpConfig, GpSarsa};
pub use mlp::{Adam, AdamConfig, Mlp};
pub use policy::LearnerPolicy;
pub use schedule::EpsilonSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Train,
    Test,
}

/// Successor of a transition: the next belief features, the mask that was in
/// force there and the action actually taken (needed by on-policy learners).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Successor<T> {
    pub b: Vec<T>,
    pub a: usize,
    pub mask: ActionMask,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Transition<T> {
    pub b: Vec<T>,
    pub a: usize,
    pub r: T,
    /// `None` marks a terminal transition.
    pub next: Option<Successor<T>>,
}

impl<T> Transition<T> {
    pub fn is_terminal(&self) -> bool {
        self.next.is_none()
    }
}

pub trait Learner<T: Scalar> {
    fn select_action(&mut self, features: &[T], mask: &ActionMask, phase: Phase, rng: &mut DialRng) -> Result<usize>;

    /// Consumes one transition. A terminal transition closes a dialogue.
    fn observe(&mut self, transition: &Transition<T>, rng: &mut DialRng);

    /// Completed training dialogues, which index the exploration schedule.
    fn dialogues(&self) -> usize;

    /// Point estimate of Q for every action.
    fn q_values(&self, features: &[T]) -> Vec<T>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnerKind {
    Dqn,
    Gp,
}

/// Hyperparameters for both learners.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RlConfig {
    pub dqn: DqnConfig,
    pub gp: GpConfig,
}

/// A learner of either kind; this is what checkpoints hold.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", tag = "kind", rename_all = "lowercase")]
pub enum AnyLearner<T> {
    Dqn(Dqn<T>),
    Gp(GpSarsa<T>),
}

impl<T: Scalar> AnyLearner<T> {
    pub fn new(
        kind: LearnerKind,
        input_dim: usize,
        n_actions: usize,
        config: &RlConfig,
        rng: &mut DialRng,
    ) -> Result<Self> {
        Ok(match kind {
            LearnerKind::Dqn => Self::Dqn(Dqn::new(input_dim, n_actions, config.dqn.clone(), rng)?),
            LearnerKind::Gp => Self::Gp(GpSarsa::new(n_actions, config.gp)?),
        })
    }

    pub fn kind(&self) -> LearnerKind {
        match self {
            Self::Dqn(_) => LearnerKind::Dqn,
            Self::Gp(_) => LearnerKind::Gp,
        }
    }
}

impl<T: Scalar> Learner<T> for AnyLearner<T> {
    fn select_action(&mut self, features: &[T], mask: &ActionMask, phase: Phase, rng: &mut DialRng) -> Result<usize> {
        match self {
            Self::Dqn(l) => l.select_action(features, mask, phase, rng),
            Self::Gp(l) => l.select_action(features, mask, phase, rng),
        }
    }

    fn observe(&mut self, transition: &Transition<T>, rng: &mut DialRng) {
        match self {
            Self::Dqn(l) => l.observe(transition, rng),
            Self::Gp(l) => l.observe(transition, rng),
        }
    }

    fn dialogues(&self) -> usize {
        match self {
            Self::Dqn(l) => l.dialogues(),
            Self::Gp(l) => l.dialogues(),
        }
    }

    fn q_values(&self, features: &[T]) -> Vec<T> {
        match self {
            Self::Dqn(l) => l.q_values(features),
            Self::Gp(l) => l.q_values(features),
        }
    }
}

/// Highest-valued allowed action, lowest index on ties.
pub fn masked_argmax<T: Scalar>(q: &[T], mask: &ActionMask) -> Result<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, v) in q.iter().enumerate() {
        if mask.is_allowed(i) && best.is_none_or(|(_, b)| *v > b) {
            best = Some((i, *v));
        }
    }
    best.map(|(i, _)| i).ok_or_else(|| Error::Contract("action mask allows nothing".into()))
}

/// Uniform draw over the allowed actions.
pub fn uniform_allowed(mask: &ActionMask, rng: &mut DialRng) -> Result<usize> {
    mask.allowed_indices().choose(rng).copied().ok_or_else(|| Error::Contract("action mask allows nothing".into()))
}

/// Max of `q` over the allowed actions, used for bootstrapped targets.
pub(crate) fn masked_max<T: Scalar>(q: &[T], mask: &ActionMask) -> Option<T> {
    q.iter()
        .enumerate()
        .filter(|(i, _)| mask.is_allowed(*i))
        .map(|(_, v)| *v)
        .fold(None, |acc, v| Some(acc.map_or(v, |a: T| a.max(v))))
}
