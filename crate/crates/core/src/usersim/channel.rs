use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::dialog::{UserAct, UserActKind};
use crate::error::{Error, Result};
use crate::ontology::{ItemSet, ValueId};
use crate::rng::DialRng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaParams {
    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    fn distribution(&self) -> Result<Beta<f64>> {
        Beta::new(self.alpha, self.beta).map_err(|e| Error::Config(format!("bad beta parameters {self:?}: {e}")))
    }
}

/// Semantic error channel standing in for speech recognition and understanding noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    pub error_rate: f64,
    pub confidence_when_correct: BetaParams,
    pub confidence_when_corrupted: BetaParams,
}

impl ErrorModel {
    pub fn new(error_rate: f64) -> Self {
        Self {
            error_rate,
            confidence_when_correct: BetaParams { alpha: 8.0, beta: 2.0 },
            confidence_when_corrupted: BetaParams { alpha: 5.0, beta: 5.0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.error_rate) {
            return Err(Error::Config(format!("error rate {} outside [0,1]", self.error_rate)));
        }
        self.confidence_when_correct.distribution()?;
        self.confidence_when_corrupted.distribution()?;
        Ok(())
    }
}

/// Passes a true act through the channel. Returns the observed act and
/// whether it was corrupted.
pub fn corrupt<T: Scalar, R: Rng + ?Sized>(
    act: &UserActKind,
    model: &ErrorModel,
    domain: &ItemSet,
    rng: &mut R,
) -> Result<(UserAct<T>, bool)> {
    let corrupted = model.error_rate > 0.0 && rng.random_bool(model.error_rate);
    let kind = if corrupted { distort(act, domain, rng) } else { act.clone() };
    let params = if corrupted { model.confidence_when_corrupted } else { model.confidence_when_correct };
    let confidence = params.distribution()?.sample(rng).clamp(0.0, 1.0);
    Ok((UserAct { kind, confidence: T::of(confidence) }, corrupted))
}

fn distort<R: Rng + ?Sized>(act: &UserActKind, domain: &ItemSet, rng: &mut R) -> UserActKind {
    match act {
        UserActKind::Inform(pairs) => UserActKind::Inform(
            pairs
                .iter()
                .map(|(slot, value)| {
                    let n = domain.slot(*slot).n_values();
                    if n < 2 {
                        return (*slot, *value);
                    }
                    // uniform over the other n - 1 values
                    let mut v = rng.random_range(0..n - 1);
                    if v >= value.0 {
                        v += 1;
                    }
                    (*slot, ValueId(v))
                })
                .collect(),
        ),
        UserActKind::Affirm => UserActKind::Deny,
        UserActKind::Deny => UserActKind::Affirm,
        UserActKind::Null | UserActKind::Bye => UserActKind::Null,
    }
}

/// An error model bound to its own randomness stream.
#[derive(Debug, Clone)]
pub struct ErrorChannel {
    model: ErrorModel,
    correct: Beta<f64>,
    corrupted: Beta<f64>,
    rng: DialRng,
}

impl ErrorChannel {
    pub fn new(model: ErrorModel, rng: DialRng) -> Result<Self> {
        model.validate()?;
        Ok(Self {
            correct: model.confidence_when_correct.distribution()?,
            corrupted: model.confidence_when_corrupted.distribution()?,
            model,
            rng,
        })
    }

    pub fn model(&self) -> &ErrorModel {
        &self.model
    }

    pub fn observe<T: Scalar>(&mut self, act: &UserActKind, domain: &ItemSet) -> (UserAct<T>, bool) {
        let e = self.model.error_rate;
        let corrupted = e > 0.0 && self.rng.random_bool(e);
        let kind = if corrupted { distort(act, domain, &mut self.rng) } else { act.clone() };
        let dist = if corrupted { &self.corrupted } else { &self.correct };
        let confidence = dist.sample(&mut self.rng).clamp(0.0, 1.0);
        (UserAct { kind, confidence: T::of(confidence) }, corrupted)
    }
}
