use crate::belief::{Belief, BeliefTracker};
use crate::env::EnvironmentConfig;
use crate::error::{Error, Result};
use crate::ontology::{ConstraintSet, ItemId, ItemSet};
use crate::rng::DialRng;
use crate::scalar::Scalar;
use crate::usersim::{ErrorChannel, SimulatedUser, UserContext};

use super::{build_action_mask, episode_return, ActionMask, ActionSpace, SystemAct, UserAct, UserActKind};

/// Read-only pieces shared by every episode of a benchmark cell.
#[derive(Debug, Clone, Copy)]
pub struct EpisodeSetup<'a, T> {
    pub domain: &'a ItemSet,
    pub tracker: &'a BeliefTracker<T>,
    pub space: &'a ActionSpace,
    pub env: &'a EnvironmentConfig,
}

/// Everything a policy may look at when choosing an act. The true user acts
/// and the goal are deliberately absent.
#[derive(Debug, Clone, Copy)]
pub struct DialogueView<'a, T> {
    pub domain: &'a ItemSet,
    pub tracker: &'a BeliefTracker<T>,
    pub space: &'a ActionSpace,
    pub env: &'a EnvironmentConfig,
    pub context: UserContext,
    pub belief: &'a Belief<T>,
    pub mask: &'a ActionMask,
    pub turn: usize,
    /// System acts with the observed user replies, oldest first.
    pub history: &'a [(SystemAct, UserAct<T>)],
}

/// What a policy learns once the dialogue is over.
#[derive(Debug, Clone, Copy)]
pub struct EpisodeFeedback<'a, T> {
    pub domain: &'a ItemSet,
    pub context: UserContext,
    pub reward: i32,
    pub success: bool,
    pub length: usize,
    pub history: &'a [(SystemAct, UserAct<T>)],
}

pub trait Policy<T: Scalar> {
    fn begin_episode(&mut self, _context: UserContext) {}

    fn act(&mut self, view: &DialogueView<'_, T>, rng: &mut DialRng) -> Result<SystemAct>;

    fn end_episode(&mut self, _feedback: &EpisodeFeedback<'_, T>, _rng: &mut DialRng) {}
}

impl<T: Scalar, P: Policy<T> + ?Sized> Policy<T> for Box<P> {
    fn begin_episode(&mut self, context: UserContext) {
        (**self).begin_episode(context)
    }

    fn act(&mut self, view: &DialogueView<'_, T>, rng: &mut DialRng) -> Result<SystemAct> {
        (**self).act(view, rng)
    }

    fn end_episode(&mut self, feedback: &EpisodeFeedback<'_, T>, rng: &mut DialRng) {
        (**self).end_episode(feedback, rng)
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TurnRecord<T> {
    pub system: SystemAct,
    pub truth: UserActKind,
    pub observed: UserAct<T>,
    pub corrupted: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EpisodeRecord<T> {
    pub context: UserContext,
    pub goal: ConstraintSet,
    pub target_set: Vec<ItemId>,
    pub turns: Vec<TurnRecord<T>>,
    pub length: usize,
    pub success: bool,
    pub reward: i32,
    /// The user ran out of patience.
    pub hung_up: bool,
}

/// Runs one dialogue, system first, until the user says bye, the system says
/// bye, or the horizon is reached.
pub fn run_episode<T: Scalar, P: Policy<T> + ?Sized>(
    policy: &mut P,
    user: &mut SimulatedUser,
    channel: &mut ErrorChannel,
    setup: &EpisodeSetup<'_, T>,
    rng: &mut DialRng,
) -> Result<EpisodeRecord<T>> {
    let EpisodeSetup { domain, tracker, space, env } = *setup;
    let context = user.context;
    let mut belief = tracker.fresh(domain, context);
    let mut history: Vec<(SystemAct, UserAct<T>)> = Vec::new();
    let mut turns = Vec::new();
    let mut success = false;
    let mut hung_up = false;
    policy.begin_episode(context);

    for turn in 0..env.max_turns {
        let mask = build_action_mask(&belief, turn, env, space);
        let view = DialogueView {
            domain,
            tracker,
            space,
            env,
            context,
            belief: &belief,
            mask: &mask,
            turn,
            history: &history,
        };
        let act = policy.act(&view, rng)?;
        act.validate(domain)?;
        let index = space.summarize(&act)?;
        if !mask.is_allowed(index) {
            return Err(Error::Contract(format!("policy chose masked act {act:?} at turn {turn}")));
        }

        let truth = user.respond(&act);
        let (observed, corrupted) = channel.observe::<T>(&truth, domain);
        if let SystemAct::Recommend(x) = act {
            success |= user.goal.is_target(x);
        }
        let finished = act == SystemAct::Bye || truth == UserActKind::Bye;
        hung_up |= truth == UserActKind::Bye && !success && act != SystemAct::Bye;
        turns.push(TurnRecord { system: act.clone(), truth, observed: observed.clone(), corrupted });
        if finished {
            history.push((act, observed));
            break;
        }
        belief = tracker.update(&belief, domain, &act, &observed);
        history.push((act, observed));
    }

    let length = turns.len();
    let reward = episode_return(success, length);
    policy.end_episode(&EpisodeFeedback { domain, context, reward, success, length, history: &history }, rng);
    Ok(EpisodeRecord {
        context,
        goal: user.goal.constraints.clone(),
        target_set: user.goal.target_set.clone(),
        turns,
        length,
        success,
        reward,
        hung_up,
    })
}

/// Constraints implied by the top hypotheses observed so far, taking every
/// observation at face value: informs and affirmed confirmations set a slot,
/// a denied confirmation clears it.
pub fn observed_constraints<T>(history: &[(SystemAct, UserAct<T>)], domain: &ItemSet) -> ConstraintSet {
    let mut c = ConstraintSet::new();
    for (act, reply) in history {
        match (&reply.kind, act) {
            (UserActKind::Inform(pairs), _) => {
                for (s, v) in pairs {
                    if domain.slot(*s).constrainable {
                        c.insert(*s, *v);
                    }
                }
            }
            (UserActKind::Affirm, SystemAct::Confirm(s, v)) => {
                c.insert(*s, *v);
            }
            (UserActKind::Deny, SystemAct::Confirm(s, v)) if c.get(*s) == Some(*v) => {
                c.remove(*s);
            }
            _ => {}
        }
    }
    c
}
