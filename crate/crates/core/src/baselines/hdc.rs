use crate::belief::{Belief, BeliefTracker};
use crate::dialog::{ActionMask, ActionSpace, DialogueView, Policy, SummaryAction, SystemAct};
use crate::error::Result;
use crate::ontology::ItemSet;
use crate::rng::DialRng;
use crate::scalar::Scalar;

/// Top-value mass range, [lo, hi), in which a slot gets confirmed.
pub const CONFIRM_BAND: (f64, f64) = (0.5, 0.8);
/// Slots whose "none" mass reaches this are considered unconstrained.
pub const NONE_CEILING: f64 = 0.9;

/// Handcrafted policy, a deterministic function of the belief:
///
/// 1. confirm the first slot whose top value is uncertain,
/// 2. otherwise, while several candidates remain, request the first unasked
///    unresolved slot,
/// 3. otherwise recommend the best untried candidate.
///
/// A rule whose act is masked yields to the next rule.
pub fn hdc_act<T: Scalar>(
    belief: &Belief<T>,
    tracker: &BeliefTracker<T>,
    domain: &ItemSet,
    space: &ActionSpace,
    mask: &ActionMask,
) -> SystemAct {
    let (lo, hi) = (T::of(CONFIRM_BAND.0), T::of(CONFIRM_BAND.1));
    let half = T::of(0.5);
    let none_ceiling = T::of(NONE_CEILING);
    let slots = domain.constrainable_slots();

    for (i, sb) in belief.slots.iter().enumerate() {
        let (v, top) = sb.top();
        if top >= lo && top < hi && mask.is_allowed(space.index(SummaryAction::Confirm(i))) {
            return SystemAct::Confirm(slots[i], v);
        }
    }

    let untried = tracker
        .top_candidates(belief, domain)
        .into_iter()
        .filter(|x| !belief.history.recommended_items.contains(x))
        .count();
    let open_slot = belief
        .slots
        .iter()
        .enumerate()
        .find(|(i, sb)| !belief.history.requested[*i] && sb.top().1 < half && sb.none < none_ceiling)
        .map(|(i, _)| i);
    if untried > 1 {
        if let Some(i) = open_slot {
            return SystemAct::Request(slots[i]);
        }
    }

    if mask.is_allowed(space.index(SummaryAction::Recommend)) {
        return SystemAct::Recommend(tracker.recommendation(belief, domain));
    }
    SystemAct::Request(slots[open_slot.unwrap_or(0)])
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Handcrafted;

impl<T: Scalar> Policy<T> for Handcrafted {
    fn act(&mut self, view: &DialogueView<'_, T>, _rng: &mut DialRng) -> Result<SystemAct> {
        Ok(hdc_act(view.belief, view.tracker, view.domain, view.space, view.mask))
    }
}
