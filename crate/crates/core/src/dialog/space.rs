use serde::{Deserialize, Serialize};

use crate::belief::{Belief, BeliefTracker};
use crate::env::EnvironmentConfig;
use crate::error::{Error, Result};
use crate::ontology::{ItemSet, SlotId};
use crate::scalar::Scalar;

use super::SystemAct;

/// Slot-level abstract act; value and item bindings come from the belief.
///
/// Slot positions index `ItemSet::constrainable_slots`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SummaryAction {
    Request(usize),
    Confirm(usize),
    Select(usize),
    Recommend,
    Bye,
}

/// Index layout: requests, then confirms, then selects (one per constrainable
/// slot each), then recommend, then bye. Size `3n + 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpace {
    slots: Vec<SlotId>,
    n_values: Vec<usize>,
}

impl ActionSpace {
    pub fn new(domain: &ItemSet) -> Self {
        let slots = domain.constrainable_slots().to_vec();
        let n_values = slots.iter().map(|s| domain.slot(*s).n_values()).collect();
        Self { slots, n_values }
    }

    pub fn n_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn len(&self) -> usize {
        3 * self.slots.len() + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn decode(&self, index: usize) -> SummaryAction {
        let n = self.slots.len();
        match index {
            i if i < n => SummaryAction::Request(i),
            i if i < 2 * n => SummaryAction::Confirm(i - n),
            i if i < 3 * n => SummaryAction::Select(i - 2 * n),
            i if i == 3 * n => SummaryAction::Recommend,
            i if i == 3 * n + 1 => SummaryAction::Bye,
            _ => panic!("action index {index} out of range for {} actions", self.len()),
        }
    }

    pub fn index(&self, action: SummaryAction) -> usize {
        let n = self.slots.len();
        match action {
            SummaryAction::Request(i) => i,
            SummaryAction::Confirm(i) => n + i,
            SummaryAction::Select(i) => 2 * n + i,
            SummaryAction::Recommend => 3 * n,
            SummaryAction::Bye => 3 * n + 1,
        }
    }

    fn position(&self, slot: SlotId) -> Result<usize> {
        self.slots
            .iter()
            .position(|s| *s == slot)
            .ok_or_else(|| Error::Contract(format!("slot {} is not constrainable", slot.0)))
    }

    /// Summary index of a concrete act.
    pub fn summarize(&self, act: &SystemAct) -> Result<usize> {
        Ok(self.index(match act {
            SystemAct::Request(s) => SummaryAction::Request(self.position(*s)?),
            SystemAct::Confirm(s, _) => SummaryAction::Confirm(self.position(*s)?),
            SystemAct::Select(s, _, _) => SummaryAction::Select(self.position(*s)?),
            SystemAct::Recommend(_) => SummaryAction::Recommend,
            SystemAct::Bye => SummaryAction::Bye,
        }))
    }

    /// Concrete act for a summary index under the current belief.
    pub fn bind<T: Scalar>(
        &self,
        index: usize,
        belief: &Belief<T>,
        tracker: &BeliefTracker<T>,
        domain: &ItemSet,
    ) -> Result<SystemAct> {
        Ok(match self.decode(index) {
            SummaryAction::Request(i) => SystemAct::Request(self.slots[i]),
            SummaryAction::Confirm(i) => SystemAct::Confirm(self.slots[i], tracker.confirm_value(belief, i)),
            SummaryAction::Select(i) => {
                let (a, b) = tracker
                    .select_values(belief, i)
                    .ok_or_else(|| Error::Contract("select on a single-valued slot".into()))?;
                SystemAct::Select(self.slots[i], a, b)
            }
            SummaryAction::Recommend => SystemAct::Recommend(tracker.recommendation(belief, domain)),
            SummaryAction::Bye => SystemAct::Bye,
        })
    }

    /// Acts that are well-formed regardless of masking.
    fn legal(&self, index: usize) -> bool {
        match self.decode(index) {
            SummaryAction::Select(i) => self.n_values[i] >= 2,
            _ => true,
        }
    }
}

/// Allowed flags over the summary action space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionMask {
    pub allowed: Vec<bool>,
}

impl ActionMask {
    pub fn all(n: usize) -> Self {
        Self { allowed: vec![true; n] }
    }

    #[inline]
    pub fn is_allowed(&self, index: usize) -> bool {
        self.allowed.get(index).copied().unwrap_or(false)
    }

    pub fn allowed_indices(&self) -> Vec<usize> {
        self.allowed.iter().enumerate().filter(|(_, a)| **a).map(|(i, _)| i).collect()
    }

    pub fn count(&self) -> usize {
        self.allowed.iter().filter(|a| **a).count()
    }

    pub fn len(&self) -> usize {
        self.allowed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allowed.is_empty()
    }
}

/// Observed mass a slot must carry before confirm/select become available.
pub const OBSERVED_MASS_GATE: f64 = 0.01;

/// Which summary actions the environment allows this turn.
pub fn build_action_mask<T: Scalar>(
    belief: &Belief<T>,
    turn: usize,
    env: &EnvironmentConfig,
    space: &ActionSpace,
) -> ActionMask {
    let gate = T::of(OBSERVED_MASS_GATE);
    let allowed = (0..space.len())
        .map(|i| {
            if !space.legal(i) {
                return false;
            }
            if !env.masks {
                return true;
            }
            match space.decode(i) {
                SummaryAction::Confirm(s) | SummaryAction::Select(s) => belief.slots[s].observed > gate,
                SummaryAction::Recommend => turn > 0,
                SummaryAction::Request(_) | SummaryAction::Bye => true,
            }
        })
        .collect();
    ActionMask { allowed }
}
