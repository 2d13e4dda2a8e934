//! Non-learned questioner policies: random questioner, database-entropy and
//! experience-entropy minimizers, and a handcrafted confirm-on-uncertainty policy.
//!
//! The first three consume top hypotheses at face value; the handcrafted
//! policy reads the belief.

mod emdm;
mod hdc;
mod rq;

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;

use crate::dialog::{observed_constraints, DialogueView, SummaryAction, SystemAct, UserAct};
use crate::ontology::{max_entropy_slot, ConstraintSet, ItemId, ItemSet, SlotId};
use crate::rng::DialRng;
use crate::scalar::Scalar;

pub use emdm::{emdm_act, read_history, write_history, EmdmEpisode, EmdmHistory, ExperienceEntropy};
pub use hdc::{hdc_act, Handcrafted, CONFIRM_BAND, NONE_CEILING};
pub use rq::{emdb_act, rq_act, DatabaseEntropy, RandomQuestioner};

/// What the face-value baselines know after some turns.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ObservedState {
    pub constraints: ConstraintSet,
    pub requested: BTreeSet<SlotId>,
    pub recommended: Vec<ItemId>,
    /// Whether the environment currently allows a recommendation.
    pub may_recommend: bool,
}

impl ObservedState {
    pub fn from_history<T>(history: &[(SystemAct, UserAct<T>)], domain: &ItemSet) -> Self {
        let mut requested = BTreeSet::new();
        let mut recommended = Vec::new();
        for (act, _) in history {
            match act {
                SystemAct::Request(s) => {
                    requested.insert(*s);
                }
                SystemAct::Recommend(x) => recommended.push(*x),
                _ => {}
            }
        }
        Self { constraints: observed_constraints(history, domain), requested, recommended, may_recommend: true }
    }

    pub fn from_view<T: Scalar>(view: &DialogueView<'_, T>) -> Self {
        let mut s = Self::from_history(view.history, view.domain);
        s.may_recommend = view.mask.is_allowed(view.space.index(SummaryAction::Recommend));
        s
    }

    /// X_{C_t}: items matching the face-value constraints. Items already
    /// turned down stay in; these policies do not learn from a denial.
    pub fn candidates(&self, domain: &ItemSet) -> Vec<ItemId> {
        domain.filter_unchecked(&self.constraints)
    }

    pub fn unrequested(&self, domain: &ItemSet) -> Vec<SlotId> {
        domain.constrainable_slots().iter().copied().filter(|s| !self.requested.contains(s)).collect()
    }
}

/// True when some constrainable slot still splits the candidates.
pub fn has_differentiating_slot(domain: &ItemSet, candidates: &[ItemId]) -> bool {
    domain.constrainable_slots().iter().any(|s| {
        let first = candidates.first().map(|x| domain.item(*x).value(*s));
        candidates.iter().any(|x| Some(domain.item(*x).value(*s)) != first)
    })
}

/// Act for contradictory constraints (no item matches): keep asking while
/// slots remain, then give up.
fn exhausted_fallback(state: &ObservedState, domain: &ItemSet, rng: &mut DialRng) -> SystemAct {
    if let Some(f) = state.unrequested(domain).choose(rng) {
        return SystemAct::Request(*f);
    }
    SystemAct::Bye
}

/// `Recommend(item)` unless the mask forbids it, in which case the next rule
/// in line applies: a request.
fn recommend_or_ask(item: ItemId, state: &ObservedState, domain: &ItemSet, rng: &mut DialRng) -> SystemAct {
    if state.may_recommend {
        return SystemAct::Recommend(item);
    }
    let pool = state.unrequested(domain);
    let pool = if pool.is_empty() { domain.constrainable_slots().to_vec() } else { pool };
    SystemAct::Request(*pool.choose(rng).expect("domain has constrainable slots"))
}

/// Max-entropy slot among `slots`, entropy computed over `candidates`.
fn best_slot(domain: &ItemSet, candidates: &[ItemId], slots: &[SlotId], rng: &mut DialRng) -> Option<SlotId> {
    if candidates.is_empty() || slots.is_empty() {
        return None;
    }
    max_entropy_slot::<f64, _>(domain, candidates, slots, rng).expect("non-empty candidates")
}
