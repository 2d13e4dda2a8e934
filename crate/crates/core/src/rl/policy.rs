use serde::{Deserialize, Serialize};

use super::{Learner, Phase, Successor, Transition};
use crate::belief::{featurize, FeatureMode};
use crate::dialog::{decompose_reward, DialogueView, EpisodeFeedback, Policy, SystemAct};
use crate::error::Result;
use crate::rng::DialRng;
use crate::scalar::Scalar;

/// Drives a [`Learner`] through the dialogue engine: featurizes the belief,
/// binds the chosen summary action and, in the training phase, turns the
/// dialogue into a stream of transitions whose rewards decompose the return.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar, L: Serialize + serde::de::DeserializeOwned")]
pub struct LearnerPolicy<T, L> {
    pub learner: L,
    pub features: FeatureMode,
    pub phase: Phase,
    #[serde(skip)]
    pending: Option<(Vec<T>, usize)>,
}

impl<T: Scalar, L: Learner<T>> LearnerPolicy<T, L> {
    pub fn new(learner: L, features: FeatureMode) -> Self {
        Self { learner, features, phase: Phase::Train, pending: None }
    }

    pub fn freeze(&mut self) {
        self.phase = Phase::Test;
        self.pending = None;
    }
}

impl<T: Scalar, L: Learner<T>> Policy<T> for LearnerPolicy<T, L> {
    fn act(&mut self, view: &DialogueView<'_, T>, rng: &mut DialRng) -> Result<SystemAct> {
        let b = featurize(view.belief, self.features);
        let a = self.learner.select_action(&b, view.mask, self.phase, rng)?;
        if self.phase == Phase::Train {
            if let Some((prev_b, prev_a)) = self.pending.take() {
                let next = Successor { b: b.clone(), a, mask: view.mask.clone() };
                let t = Transition { b: prev_b, a: prev_a, r: -T::one(), next: Some(next) };
                self.learner.observe(&t, rng);
            }
            self.pending = Some((b, a));
        }
        view.space.bind(a, view.belief, view.tracker, view.domain)
    }

    fn end_episode(&mut self, feedback: &EpisodeFeedback<'_, T>, rng: &mut DialRng) {
        if let Some((b, a)) = self.pending.take() {
            let last = *decompose_reward(feedback.length, feedback.success).last().expect("at least one turn");
            let t = Transition { b, a, r: T::of(f64::from(last)), next: None };
            self.learner.observe(&t, rng);
        }
    }
}
