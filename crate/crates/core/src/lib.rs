//! Personalized dialogue-management benchmark.
//!
//! Simulated recommendation dialogues between questioner policies (rule-based
//! baselines and reinforcement learners) and context-differentiated simulated
//! users, with segmentation-based and belief-state-based personalization.
//!
//! Numeric code is generic over [`Scalar`] (f32 or f64); the aliases at the
//! crate root fix it to [`Real`].

pub mod baselines;
pub mod belief;
pub mod bench;
pub mod dialog;
pub mod env;
pub mod error;
pub mod ontology;
pub mod personalization;
pub mod rl;
pub mod rng;
pub mod scalar;
pub mod usersim;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default precision.
pub type Real = f64;
pub type Belief = belief::Belief<Real>;
pub type BeliefTracker = belief::BeliefTracker<Real>;
pub type UserAct = dialog::UserAct<Real>;
pub type EpisodeRecord = dialog::EpisodeRecord<Real>;
