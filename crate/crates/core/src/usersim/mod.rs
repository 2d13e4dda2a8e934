//! Context-conditioned simulated user: goals, behaviour profiles, turn-level
//! responses and the semantic error channel between user and system.

mod channel;
mod goal;
mod profile;
mod respond;

use serde::{Deserialize, Serialize};

pub use channel::{corrupt, BetaParams, ErrorChannel, ErrorModel};
pub use goal::{sample_goal, UserGoal};
pub use profile::{BehaviorProfile, ProfileConfig};
pub use respond::{respond, UserMemory};

use crate::dialog::{SystemAct, UserActKind};
use crate::rng::DialRng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserGroup {
    Layperson,
    Expert,
}

/// The user's group, known to the system with certainty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UserContext {
    pub group: UserGroup,
}

impl UserContext {
    pub fn new(group: UserGroup) -> Self {
        Self { group }
    }

    /// Both groups equally likely.
    pub fn sample<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        Self::new(if rng.random_bool(0.5) { UserGroup::Layperson } else { UserGroup::Expert })
    }

    /// The one-hot context vector b_c: (layperson, expert).
    pub fn vector<T: Scalar>(&self) -> [T; 2] {
        match self.group {
            UserGroup::Layperson => [T::one(), T::zero()],
            UserGroup::Expert => [T::zero(), T::one()],
        }
    }
}

/// One simulated user for one dialogue.
#[derive(Debug, Clone)]
pub struct SimulatedUser {
    pub context: UserContext,
    pub goal: UserGoal,
    pub profile: BehaviorProfile,
    memory: UserMemory,
    rng: DialRng,
}

impl SimulatedUser {
    pub fn new(context: UserContext, goal: UserGoal, profile: BehaviorProfile, rng: DialRng) -> Self {
        Self { context, goal, profile, memory: UserMemory::default(), rng }
    }

    /// True reply to a system act; advances the user's memory of the dialogue.
    pub fn respond(&mut self, act: &SystemAct) -> UserActKind {
        let reply = respond(&self.goal, &self.profile, act, &self.memory, &mut self.rng);
        self.memory.record(act, &reply, &self.profile);
        reply
    }

    pub fn memory(&self) -> &UserMemory {
        &self.memory
    }
}
