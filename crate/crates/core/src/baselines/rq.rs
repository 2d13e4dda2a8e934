use rand::seq::IndexedRandom;

use super::{best_slot, exhausted_fallback, has_differentiating_slot, recommend_or_ask, ObservedState};
use crate::dialog::{DialogueView, Policy, SystemAct};
use crate::error::Result;
use crate::ontology::ItemSet;
use crate::rng::DialRng;
use crate::scalar::Scalar;

/// Random questioner: asks random unasked slots until nothing distinguishes
/// the candidates, then recommends one of them at random.
pub fn rq_act(state: &ObservedState, domain: &ItemSet, rng: &mut DialRng) -> SystemAct {
    let candidates = state.candidates(domain);
    if candidates.is_empty() {
        return exhausted_fallback(state, domain, rng);
    }
    let unrequested = state.unrequested(domain);
    if has_differentiating_slot(domain, &candidates) && !unrequested.is_empty() {
        return SystemAct::Request(*unrequested.choose(rng).expect("non-empty"));
    }
    let item = *candidates.choose(rng).expect("non-empty");
    recommend_or_ask(item, state, domain, rng)
}

/// Database-entropy questioner: asks the unasked slot with the highest
/// entropy over the candidates; recommends like the random questioner.
pub fn emdb_act(state: &ObservedState, domain: &ItemSet, rng: &mut DialRng) -> SystemAct {
    let candidates = state.candidates(domain);
    if candidates.is_empty() {
        return exhausted_fallback(state, domain, rng);
    }
    if let Some(f) = best_slot(domain, &candidates, &state.unrequested(domain), rng) {
        return SystemAct::Request(f);
    }
    let item = *candidates.choose(rng).expect("non-empty");
    recommend_or_ask(item, state, domain, rng)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RandomQuestioner;

impl<T: Scalar> Policy<T> for RandomQuestioner {
    fn act(&mut self, view: &DialogueView<'_, T>, rng: &mut DialRng) -> Result<SystemAct> {
        Ok(rq_act(&ObservedState::from_view(view), view.domain, rng))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DatabaseEntropy;

impl<T: Scalar> Policy<T> for DatabaseEntropy {
    fn act(&mut self, view: &DialogueView<'_, T>, rng: &mut DialRng) -> Result<SystemAct> {
        Ok(emdb_act(&ObservedState::from_view(view), view.domain, rng))
    }
}
