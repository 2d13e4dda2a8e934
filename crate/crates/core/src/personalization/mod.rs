//! Routing of dialogues to policies: one shared policy (vanilla), one policy
//! per user segment with context hidden (segmented), or one shared policy that
//! sees the context in its input (belief-state).

use serde::{Deserialize, Serialize};

use crate::belief::{feature_len, FeatureMode};
use crate::bench::Simulation;
use crate::dialog::{DialogueView, EpisodeFeedback, Policy, SystemAct};
use crate::error::{Error, Result};
use crate::rl::{AnyLearner, Checkpoint, CheckpointKey, LearnerKind, LearnerPolicy, Phase, RlConfig};
use crate::rng::{DialRng, StreamRoot};
use crate::scalar::Scalar;
use crate::usersim::{UserContext, UserGroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PersonalizationMode {
    #[serde(rename = "v")]
    Vanilla,
    #[serde(rename = "s")]
    Segmented,
    #[serde(rename = "bs")]
    BeliefState,
}

impl PersonalizationMode {
    pub const ALL: [PersonalizationMode; 3] = [Self::Vanilla, Self::Segmented, Self::BeliefState];

    pub fn code(&self) -> &'static str {
        match self {
            Self::Vanilla => "v",
            Self::Segmented => "s",
            Self::BeliefState => "bs",
        }
    }

    pub fn parse(code: &str) -> Result<Self> {
        match code {
            "v" => Ok(Self::Vanilla),
            "s" => Ok(Self::Segmented),
            "bs" => Ok(Self::BeliefState),
            _ => Err(Error::Config(format!("unknown personalization mode '{code}' (v, s or bs)"))),
        }
    }

    pub fn features(&self) -> FeatureMode {
        match self {
            Self::BeliefState => FeatureMode::WithContext,
            _ => FeatureMode::Plain,
        }
    }
}

impl std::fmt::Display for PersonalizationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

/// Maps a context to a segment. Each entry lists the groups of one segment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentationMap {
    pub segments: Vec<Vec<UserGroup>>,
}

impl Default for SegmentationMap {
    /// One segment per group: laypersons 0, experts 1.
    fn default() -> Self {
        Self { segments: vec![vec![UserGroup::Layperson], vec![UserGroup::Expert]] }
    }
}

impl SegmentationMap {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn segment(&self, context: UserContext) -> Result<usize> {
        self.segments
            .iter()
            .position(|s| s.contains(&context.group))
            .ok_or_else(|| Error::Config(format!("context {:?} belongs to no segment", context.group)))
    }
}

pub type SegmentPolicy<T> = LearnerPolicy<T, AnyLearner<T>>;

/// A learner set for one personalization mode, usable as a dialogue policy.
#[derive(Debug, Clone)]
pub struct PersonalizedPolicy<T: Scalar> {
    pub mode: PersonalizationMode,
    pub map: SegmentationMap,
    pub policies: Vec<SegmentPolicy<T>>,
    /// Training dialogues routed to each policy.
    pub episodes: Vec<usize>,
    active: Option<usize>,
}

impl<T: Scalar> PersonalizedPolicy<T> {
    pub fn new(
        mode: PersonalizationMode,
        kind: LearnerKind,
        sim: &Simulation<T>,
        config: &RlConfig,
        map: SegmentationMap,
        rng: &mut DialRng,
    ) -> Result<Self> {
        let count = if mode == PersonalizationMode::Segmented { map.len() } else { 1 };
        if count == 0 {
            return Err(Error::Config("segmentation map has no segments".into()));
        }
        let features = mode.features();
        let dim = feature_len(&sim.domain, features);
        let policies = (0..count)
            .map(|_| Ok(LearnerPolicy::new(AnyLearner::new(kind, dim, sim.space.len(), config, rng)?, features)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { mode, map, episodes: vec![0; count], policies, active: None })
    }

    /// Index of the policy that serves `context` and the features it sees.
    pub fn route(&self, context: UserContext) -> Result<(usize, FeatureMode)> {
        let index = match self.mode {
            PersonalizationMode::Segmented => self.map.segment(context)?,
            _ => 0,
        };
        Ok((index, self.mode.features()))
    }

    pub fn freeze(&mut self) {
        self.policies.iter_mut().for_each(|p| p.freeze());
    }

    pub fn checkpoint(&self, domain: &str, env_id: u8, seed: u64) -> Checkpoint<T> {
        let algorithm = self.policies[0].learner.kind();
        Checkpoint {
            key: CheckpointKey { domain: domain.to_string(), env_id, mode: self.mode, seed, algorithm },
            learners: self.policies.iter().map(|p| p.learner.clone()).collect(),
        }
    }

    /// Rebuilds a frozen policy set from a checkpoint.
    pub fn from_checkpoint(checkpoint: Checkpoint<T>, map: SegmentationMap) -> Result<Self> {
        let mode = checkpoint.key.mode;
        let expected = if mode == PersonalizationMode::Segmented { map.len() } else { 1 };
        if checkpoint.learners.len() != expected {
            return Err(Error::Config(format!(
                "checkpoint holds {} learners, mode {mode} needs {expected}",
                checkpoint.learners.len()
            )));
        }
        let policies: Vec<SegmentPolicy<T>> =
            checkpoint.learners.into_iter().map(|l| LearnerPolicy::new(l, mode.features())).collect();
        let mut out = Self { mode, map, episodes: vec![0; policies.len()], policies, active: None };
        out.freeze();
        Ok(out)
    }

    fn active(&mut self) -> &mut SegmentPolicy<T> {
        let i = self.active.expect("begin_episode routes the dialogue first");
        &mut self.policies[i]
    }
}

impl<T: Scalar> Policy<T> for PersonalizedPolicy<T> {
    fn begin_episode(&mut self, context: UserContext) {
        let (index, _) = self.route(context).expect("segmentation map covers every group");
        self.active = Some(index);
        if self.policies[index].phase == Phase::Train {
            self.episodes[index] += 1;
        }
    }

    fn act(&mut self, view: &DialogueView<'_, T>, rng: &mut DialRng) -> Result<SystemAct> {
        self.active().act(view, rng)
    }

    fn end_episode(&mut self, feedback: &EpisodeFeedback<'_, T>, rng: &mut DialRng) {
        self.active().end_episode(feedback, rng);
        self.active = None;
    }
}

/// Outcome of training one learner set.
#[derive(Debug, Clone)]
pub struct TrainedPolicy<T: Scalar> {
    pub policy: PersonalizedPolicy<T>,
    pub train_rewards: Vec<i32>,
}

/// Trains a fresh learner set on `n_train` dialogues drawn from
/// `users.child("train")` and returns it frozen.
///
/// The exploration schedule spans each learner's expected share of the
/// training dialogues, so segment learners anneal over about `n_train / 2`.
pub fn train_cell<T: Scalar>(
    mode: PersonalizationMode,
    kind: LearnerKind,
    sim: &Simulation<T>,
    config: &RlConfig,
    n_train: usize,
    users: &StreamRoot,
    policy_root: &StreamRoot,
) -> Result<TrainedPolicy<T>> {
    let map = SegmentationMap::default();
    let share = if mode == PersonalizationMode::Segmented { map.len() } else { 1 };
    let mut config = config.clone();
    config.dqn.epsilon.horizon = (n_train / share).max(1);
    let mut init = policy_root.stream("init");
    let mut policy = PersonalizedPolicy::new(mode, kind, sim, &config, map, &mut init)?;
    let mut rng = policy_root.stream("train");
    let train_users = users.child("train");
    let mut train_rewards = Vec::with_capacity(n_train);
    for i in 0..n_train {
        train_rewards.push(sim.episode(&mut policy, &train_users, i, &mut rng)?.reward);
    }
    policy.freeze();
    Ok(TrainedPolicy { policy, train_rewards })
}
