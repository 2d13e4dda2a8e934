use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BehaviorProfile, UserGoal};
use crate::dialog::{SystemAct, UserActKind};
use crate::ontology::SlotId;

/// What the user remembers of the dialogue so far.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserMemory {
    pub last_reply: Option<UserActKind>,
    /// Consecutive null/deny replies, the current one included.
    pub frustration: u32,
    /// Constraint slots the user has already mentioned.
    pub stated: BTreeSet<SlotId>,
}

impl UserMemory {
    pub fn record(&mut self, act: &SystemAct, reply: &UserActKind, profile: &BehaviorProfile) {
        if let UserActKind::Inform(pairs) = reply {
            self.stated.extend(pairs.iter().map(|(s, _)| *s));
        }
        if frustrating(act, reply, profile) {
            self.frustration += 1;
        } else {
            self.frustration = 0;
        }
        self.last_reply = Some(reply.clone());
    }
}

/// Whether a reply uses up patience. Turning down a recommended item only
/// counts when the profile says so.
fn frustrating(act: &SystemAct, reply: &UserActKind, profile: &BehaviorProfile) -> bool {
    match (act, reply) {
        (SystemAct::Recommend(_), UserActKind::Deny) => profile.rejections_count,
        _ => reply.is_null_or_deny(),
    }
}

/// The user's true reply to `act`.
///
/// Deterministic given the goal, profile, memory and the state of `rng`.
pub fn respond<R: Rng + ?Sized>(
    goal: &UserGoal,
    profile: &BehaviorProfile,
    act: &SystemAct,
    memory: &UserMemory,
    rng: &mut R,
) -> UserActKind {
    let c = &goal.constraints;
    let mut reply = match act {
        SystemAct::Request(f) => match c.get(*f) {
            Some(v) => UserActKind::Inform(vec![(*f, v)]),
            None => UserActKind::Null,
        },
        SystemAct::Confirm(f, v) => match c.get(*f) {
            Some(want) if want == *v => UserActKind::Affirm,
            Some(_) => UserActKind::Deny,
            None => UserActKind::Null,
        },
        SystemAct::Select(f, v1, v2) => match c.get(*f) {
            Some(want) if want == *v1 || want == *v2 => UserActKind::Inform(vec![(*f, want)]),
            _ => UserActKind::Null,
        },
        SystemAct::Recommend(x) => {
            if goal.is_target(*x) {
                return UserActKind::Bye;
            }
            UserActKind::Deny
        }
        SystemAct::Bye => return UserActKind::Bye,
    };

    match &mut reply {
        UserActKind::Inform(pairs) => {
            if profile.unfriendly {
                if rng.random_bool(profile.null_substitution) {
                    reply = UserActKind::Null;
                }
            } else if rng.random_bool(profile.p_volunteer) {
                let unstated: Vec<SlotId> = c
                    .iter()
                    .map(|(s, _)| s)
                    .filter(|s| !memory.stated.contains(s) && pairs.iter().all(|(p, _)| p != s))
                    .collect();
                if let Some(extra) = unstated.choose(rng) {
                    pairs.push((*extra, c.get(*extra).expect("goal slot")));
                }
            }
        }
        UserActKind::Null => {
            if let Some(prev @ UserActKind::Inform(_)) = &memory.last_reply {
                if rng.random_bool(profile.p_repeat) {
                    reply = prev.clone();
                }
            }
        }
        _ => {}
    }

    if frustrating(act, &reply, profile) && memory.frustration + 1 > profile.patience {
        return UserActKind::Bye;
    }
    reply
}
