//! Factored dialogue belief: per-slot user-intention distributions, a
//! dialogue-history summary, and the user's context vector.
//!
//! The tracker is a focus-style rule set. Every update returns a new
//! snapshot; beliefs are never mutated in place by the dialogue engine.

mod featurize;
mod slot;

use serde::{Deserialize, Serialize};

use crate::dialog::{ActKind, SystemAct, UserAct, UserActKind};
use crate::ontology::{ConstraintSet, ItemId, ItemSet, SlotId, ValueId};
use crate::scalar::Scalar;
use crate::usersim::UserContext;

pub use featurize::{feature_len, featurize, history_len, FeatureMode};
pub use slot::SlotBelief;

/// Summary of the dialogue so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct HistoryBelief<T> {
    pub last_act: Option<ActKind>,
    /// One flag per constrainable slot.
    pub requested: Vec<bool>,
    pub recommended: bool,
    pub turn: usize,
    pub turn_fraction: T,
    pub candidate_fraction: T,
    /// Items recommended so far, in order. Not featurized.
    pub recommended_items: Vec<ItemId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Belief<T> {
    /// One distribution per constrainable slot, in ontology order.
    pub slots: Vec<SlotBelief<T>>,
    pub history: HistoryBelief<T>,
    /// One-hot group vector (layperson, expert).
    pub context: [T; 2],
}

impl<T: Scalar> Belief<T> {
    pub fn slot(&self, domain: &ItemSet, slot: SlotId) -> Option<&SlotBelief<T>> {
        domain.constrainable_index(slot).map(|i| &self.slots[i])
    }

    pub fn with_context(mut self, context: UserContext) -> Self {
        self.context = context.vector();
        self
    }
}

/// Tracker constants. Exposed so sensitivity runs can vary them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackerConfig {
    /// Top-value mass above which a slot counts as a hard constraint.
    pub accept_threshold: f64,
    /// Fraction of the observation confidence moved to "none" by a null response.
    pub null_shift: f64,
    pub max_turns: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self { accept_threshold: 0.5, null_shift: 0.5, max_turns: 25 }
    }
}

#[derive(Debug, Clone)]
pub struct BeliefTracker<T> {
    config: TrackerConfig,
    accept: T,
    null_shift: T,
}

impl<T: Scalar> BeliefTracker<T> {
    pub fn new(config: TrackerConfig) -> Self {
        Self { accept: T::of(config.accept_threshold), null_shift: T::of(config.null_shift), config }
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    /// Belief at the start of a dialogue: every slot uniform over its values.
    pub fn fresh(&self, domain: &ItemSet, context: UserContext) -> Belief<T> {
        let n = domain.constrainable_slots().len();
        Belief {
            slots: domain
                .constrainable_slots()
                .iter()
                .map(|s| SlotBelief::uniform(domain.slot(*s).n_values()))
                .collect(),
            history: HistoryBelief {
                last_act: None,
                requested: vec![false; n],
                recommended: false,
                turn: 0,
                turn_fraction: T::zero(),
                candidate_fraction: T::one(),
                recommended_items: Vec::new(),
            },
            context: context.vector(),
        }
    }

    /// Incorporates one system act and the observed (possibly corrupted) user reply.
    pub fn update(&self, belief: &Belief<T>, domain: &ItemSet, act: &SystemAct, observed: &UserAct<T>) -> Belief<T> {
        let mut next = belief.clone();
        let p = observed.confidence.max(T::zero()).min(T::one());
        match &observed.kind {
            UserActKind::Inform(pairs) => {
                for (slot, value) in pairs {
                    if let Some(i) = domain.constrainable_index(*slot) {
                        next.slots[i].inform(*value, p);
                    }
                }
            }
            UserActKind::Affirm => {
                if let SystemAct::Confirm(slot, value) = act {
                    if let Some(i) = domain.constrainable_index(*slot) {
                        next.slots[i].inform(*value, p);
                    }
                }
            }
            UserActKind::Deny => {
                if let SystemAct::Confirm(slot, value) = act {
                    if let Some(i) = domain.constrainable_index(*slot) {
                        next.slots[i].deny(*value, p);
                    }
                }
            }
            UserActKind::Null => {
                if let Some(slot) = act.slot() {
                    if let Some(i) = domain.constrainable_index(slot) {
                        next.slots[i].shift_to_none(p * self.null_shift);
                    }
                }
            }
            UserActKind::Bye => {}
        }

        let h = &mut next.history;
        h.last_act = Some(act.kind());
        match act {
            SystemAct::Request(slot) => {
                if let Some(i) = domain.constrainable_index(*slot) {
                    h.requested[i] = true;
                }
            }
            SystemAct::Recommend(item) => {
                h.recommended = true;
                h.recommended_items.push(*item);
            }
            _ => {}
        }
        h.turn += 1;
        let frac = h.turn as f64 / self.config.max_turns.max(1) as f64;
        h.turn_fraction = T::of(frac.min(1.0));
        let n_cand = self.top_candidates(&next, domain).len();
        next.history.candidate_fraction = T::of(n_cand as f64 / domain.n_items().max(1) as f64);
        next
    }

    /// Hard constraints implied by the belief: slots whose top value is accepted.
    pub fn hard_constraints(&self, belief: &Belief<T>, domain: &ItemSet) -> ConstraintSet {
        let half = T::of(0.5);
        domain
            .constrainable_slots()
            .iter()
            .zip(&belief.slots)
            .filter_map(|(slot, sb)| {
                let (v, mass) = sb.top();
                (mass > self.accept && sb.none < half).then_some((*slot, v))
            })
            .collect()
    }

    /// Items consistent with the accepted constraints, best supported first.
    ///
    /// Falls back to the whole item list when the accepted constraints match nothing.
    pub fn top_candidates(&self, belief: &Belief<T>, domain: &ItemSet) -> Vec<ItemId> {
        let hard = self.hard_constraints(belief, domain);
        let mut items = domain.filter_unchecked(&hard);
        if items.is_empty() {
            items = domain.all_items();
        }
        let score = |id: &ItemId| -> T {
            let item = domain.item(*id);
            domain
                .constrainable_slots()
                .iter()
                .zip(&belief.slots)
                .fold(T::one(), |acc, (slot, sb)| acc * (sb.probs[item.value(*slot).0] + sb.none))
        };
        let mut scored: Vec<(ItemId, T)> = items.into_iter().map(|i| (i, score(&i))).collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        scored.into_iter().map(|(i, _)| i).collect()
    }

    /// Top candidate not yet recommended in this dialogue, else the overall top.
    pub fn recommendation(&self, belief: &Belief<T>, domain: &ItemSet) -> ItemId {
        let ranked = self.top_candidates(belief, domain);
        ranked.iter().copied().find(|i| !belief.history.recommended_items.contains(i)).unwrap_or(ranked[0])
    }

    /// Value bound to a slot-level confirm: the slot's most likely value.
    pub fn confirm_value(&self, belief: &Belief<T>, slot_index: usize) -> ValueId {
        belief.slots[slot_index].top().0
    }

    /// Values bound to a slot-level select: the two most likely values.
    pub fn select_values(&self, belief: &Belief<T>, slot_index: usize) -> Option<(ValueId, ValueId)> {
        belief.slots[slot_index].top_two()
    }
}
