use serde::{Deserialize, Serialize};

use crate::belief::{BeliefTracker, TrackerConfig};
use crate::dialog::{run_episode, ActionSpace, EpisodeRecord, EpisodeSetup, Policy};
use crate::env::EnvironmentConfig;
use crate::error::Result;
use crate::ontology::ItemSet;
use crate::rng::{DialRng, StreamRoot};
use crate::scalar::Scalar;
use crate::usersim::{sample_goal, BetaParams, ErrorChannel, ErrorModel, ProfileConfig, SimulatedUser, UserContext};

/// Tunable simulator knobs. All have documented defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimSettings {
    pub profiles: ProfileConfig,
    pub confidence_when_correct: BetaParams,
    pub confidence_when_corrupted: BetaParams,
    pub tracker: TrackerConfig,
}

impl Default for SimSettings {
    fn default() -> Self {
        let m = ErrorModel::new(0.0);
        Self {
            profiles: ProfileConfig::default(),
            confidence_when_correct: m.confidence_when_correct,
            confidence_when_corrupted: m.confidence_when_corrupted,
            tracker: TrackerConfig::default(),
        }
    }
}

/// Simulator for one (environment, domain) pair.
#[derive(Debug, Clone)]
pub struct Simulation<T> {
    pub domain: ItemSet,
    pub env: EnvironmentConfig,
    pub space: ActionSpace,
    pub tracker: BeliefTracker<T>,
    pub profiles: ProfileConfig,
    pub error: ErrorModel,
}

impl<T: Scalar> Simulation<T> {
    pub fn new(domain: ItemSet, env: EnvironmentConfig, settings: &SimSettings) -> Result<Self> {
        settings.profiles.validate()?;
        let error = ErrorModel {
            error_rate: env.error_rate,
            confidence_when_correct: settings.confidence_when_correct,
            confidence_when_corrupted: settings.confidence_when_corrupted,
        };
        error.validate()?;
        let tracker = BeliefTracker::new(TrackerConfig { max_turns: env.max_turns, ..settings.tracker });
        Ok(Self { space: ActionSpace::new(&domain), domain, env, tracker, profiles: settings.profiles, error })
    }

    pub fn setup(&self) -> EpisodeSetup<'_, T> {
        EpisodeSetup { domain: &self.domain, tracker: &self.tracker, space: &self.space, env: &self.env }
    }

    /// Context, goal and behaviour of the `index`-th user under `root`.
    /// Depends only on the labels, never on the policy.
    pub fn user(&self, root: &StreamRoot, index: usize) -> Result<(SimulatedUser, ErrorChannel)> {
        let ep = root.child(format!("ep{index}"));
        let mut g = ep.stream("goal");
        let context = UserContext::sample(&mut g);
        let goal = sample_goal(&self.domain, context, &mut g)?;
        let profile = self.profiles.sample(self.env.user_model, &mut g);
        let user = SimulatedUser::new(context, goal, profile, ep.stream("user"));
        let channel = ErrorChannel::new(self.error, ep.stream("channel"))?;
        Ok((user, channel))
    }

    pub fn episode<P: Policy<T> + ?Sized>(
        &self,
        policy: &mut P,
        root: &StreamRoot,
        index: usize,
        rng: &mut DialRng,
    ) -> Result<EpisodeRecord<T>> {
        let (mut user, mut channel) = self.user(root, index)?;
        run_episode(policy, &mut user, &mut channel, &self.setup(), rng)
    }
}
