//! Q-network learner: ε-greedy exploration, uniform experience replay and a
//! periodically synchronized target network.

use ndarray::Array2;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mlp::{Adam, AdamConfig, Mlp};
use super::schedule::EpsilonSchedule;
use super::{masked_argmax, masked_max, uniform_allowed, Learner, Phase, Transition};
use crate::dialog::ActionMask;
use crate::error::{Error, Result};
use crate::rng::DialRng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DqnConfig {
    pub hidden: Vec<usize>,
    pub adam: AdamConfig,
    pub gamma: f64,
    pub replay_capacity: usize,
    pub batch_size: usize,
    /// Gradient steps between target-network copies.
    pub target_sync: u64,
    pub epsilon: EpsilonSchedule,
    /// Clamp on the TD error inside the gradient (Huber-style). `None` keeps plain squared error.
    pub td_clip: Option<f64>,
}

impl Default for DqnConfig {
    fn default() -> Self {
        Self {
            hidden: vec![300, 100],
            adam: AdamConfig::default(),
            gamma: 1.0,
            replay_capacity: 2000,
            batch_size: 64,
            target_sync: 100,
            epsilon: EpsilonSchedule::new(0.5),
            td_clip: Some(1.0),
        }
    }
}

impl DqnConfig {
    pub fn validate(&self) -> Result<()> {
        self.epsilon.validate()?;
        let ok = (0.0..=1.0).contains(&self.gamma)
            && self.batch_size > 0
            && self.replay_capacity >= self.batch_size
            && self.target_sync > 0
            && self.adam.learning_rate > 0.0
            && self.td_clip.is_none_or(|c| c > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("bad DQN configuration {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Dqn<T> {
    pub config: DqnConfig,
    pub online: Mlp<T>,
    pub target: Mlp<T>,
    adam: Adam<T>,
    #[serde(skip)]
    replay: Vec<Transition<T>>,
    #[serde(skip)]
    replay_cursor: usize,
    updates: u64,
    dialogues: usize,
}

impl<T: Scalar> Dqn<T> {
    pub fn new(input_dim: usize, n_actions: usize, config: DqnConfig, rng: &mut DialRng) -> Result<Self> {
        config.validate()?;
        let mut sizes = vec![input_dim];
        sizes.extend(&config.hidden);
        sizes.push(n_actions);
        let online = Mlp::new(&sizes, rng)?;
        let adam = Adam::new(config.adam, &online);
        Ok(Self {
            target: online.clone(),
            online,
            adam,
            replay: Vec::new(),
            replay_cursor: 0,
            updates: 0,
            dialogues: 0,
            config,
        })
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn replay_len(&self) -> usize {
        self.replay.len()
    }

    pub fn epsilon(&self) -> f64 {
        self.config.epsilon.value(self.dialogues)
    }

    /// Regression targets `r + γ·max_{a' allowed} Q_target(b', a')`, or `r`
    /// for terminal transitions.
    pub fn targets(&self, batch: &[&Transition<T>]) -> Vec<T> {
        let gamma = T::of(self.config.gamma);
        let (rows, idx): (Vec<&[T]>, Vec<usize>) =
            batch.iter().enumerate().filter_map(|(i, t)| t.next.as_ref().map(|n| (n.b.as_slice(), i))).unzip();
        let mut y: Vec<T> = batch.iter().map(|t| t.r).collect();
        if rows.is_empty() || gamma == T::zero() {
            return y;
        }
        let q_next = self.target.forward(stack(&rows).view());
        for (row, i) in idx.into_iter().enumerate() {
            let mask = &batch[i].next.as_ref().expect("non-terminal").mask;
            let q: Vec<T> = q_next.row(row).to_vec();
            if let Some(best) = masked_max(&q, mask) {
                y[i] += gamma * best;
            }
        }
        y
    }

    /// Mean squared TD error of the online network on `batch`.
    pub fn td_loss(&self, batch: &[&Transition<T>]) -> T {
        let y = self.targets(batch);
        let rows: Vec<&[T]> = batch.iter().map(|t| t.b.as_slice()).collect();
        let q = self.online.forward(stack(&rows).view());
        let n = T::of(batch.len() as f64);
        batch.iter().enumerate().map(|(i, t)| (q[[i, t.a]] - y[i]).powi(2)).sum::<T>() / n
    }

    /// One gradient step on the mean squared TD error.
    pub fn train_on(&mut self, batch: &[&Transition<T>]) {
        let y = self.targets(batch);
        let rows: Vec<&[T]> = batch.iter().map(|t| t.b.as_slice()).collect();
        let scale = T::of(2.0 / batch.len() as f64);
        let clip = self.config.td_clip.map(T::of);
        let (_, grads) = self.online.gradients(stack(&rows).view(), |q| {
            let mut d = Array2::zeros(q.raw_dim());
            for (i, t) in batch.iter().enumerate() {
                let e = q[[i, t.a]] - y[i];
                d[[i, t.a]] = scale * clip.map_or(e, |c| e.max(-c).min(c));
            }
            d
        });
        self.adam.step(&mut self.online, &grads);
        self.updates += 1;
        if self.updates.is_multiple_of(self.config.target_sync) {
            self.target = self.online.clone();
        }
    }

    fn remember(&mut self, t: &Transition<T>) {
        if self.replay.len() < self.config.replay_capacity {
            self.replay.push(t.clone());
        } else {
            self.replay[self.replay_cursor] = t.clone();
        }
        self.replay_cursor = (self.replay_cursor + 1) % self.config.replay_capacity;
    }
}

fn stack<T: Scalar>(rows: &[&[T]]) -> Array2<T> {
    let dim = rows.first().map_or(0, |r| r.len());
    Array2::from_shape_fn((rows.len(), dim), |(i, j)| rows[i][j])
}

impl<T: Scalar> Learner<T> for Dqn<T> {
    fn select_action(&mut self, features: &[T], mask: &ActionMask, phase: Phase, rng: &mut DialRng) -> Result<usize> {
        if phase == Phase::Train && rng.random_bool(self.epsilon()) {
            return uniform_allowed(mask, rng);
        }
        masked_argmax(&self.online.predict(features), mask)
    }

    fn observe(&mut self, transition: &Transition<T>, rng: &mut DialRng) {
        self.remember(transition);
        if transition.is_terminal() {
            self.dialogues += 1;
        }
        if self.replay.len() >= self.config.batch_size {
            let picks = sample(rng, self.replay.len(), self.config.batch_size);
            let batch: Vec<Transition<T>> = picks.iter().map(|i| self.replay[i].clone()).collect();
            let refs: Vec<&Transition<T>> = batch.iter().collect();
            self.train_on(&refs);
        }
    }

    fn dialogues(&self) -> usize {
        self.dialogues
    }

    fn q_values(&self, features: &[T]) -> Vec<T> {
        self.online.predict(features)
    }
}
