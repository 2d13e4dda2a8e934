use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::UserModel;
use crate::error::{Error, Result};

/// Per-dialogue behaviour of one simulated user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehaviorProfile {
    /// Chance of adding one unstated constraint to an inform.
    pub p_volunteer: f64,
    /// Chance of repeating the previous inform when the system asks something
    /// the user cannot answer.
    pub p_repeat: f64,
    /// Consecutive null/deny replies tolerated before hanging up.
    pub patience: u32,
    pub unfriendly: bool,
    /// Chance an unfriendly user swallows an inform and answers null instead.
    pub null_substitution: f64,
    /// Whether turning down a recommended item uses up patience.
    pub rejections_count: bool,
}

impl BehaviorProfile {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.p_volunteer) || !unit(self.p_repeat) || !unit(self.null_substitution) {
            return Err(Error::Config(format!("behaviour probabilities out of [0,1]: {self:?}")));
        }
        if self.patience < 1 {
            return Err(Error::Config("patience must be at least 1".into()));
        }
        Ok(())
    }
}

/// Ranges from which profiles are drawn at the start of every dialogue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileConfig {
    pub p_volunteer: (f64, f64),
    pub p_repeat: (f64, f64),
    /// Inclusive range.
    pub patience: (u32, u32),
    pub unfriendly_null_substitution: f64,
    pub rejections_count: bool,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            p_volunteer: (0.2, 0.4),
            p_repeat: (0.05, 0.15),
            patience: (4, 6),
            unfriendly_null_substitution: 0.4,
            rejections_count: true,
        }
    }
}

impl ProfileConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |(lo, hi): (f64, f64)| 0.0 <= lo && lo <= hi && hi <= 1.0;
        if !ok(self.p_volunteer) || !ok(self.p_repeat) || !(0.0..=1.0).contains(&self.unfriendly_null_substitution) {
            return Err(Error::Config(format!("invalid probability range in {self:?}")));
        }
        if self.patience.0 < 1 || self.patience.0 > self.patience.1 {
            return Err(Error::Config(format!("invalid patience range {:?}", self.patience)));
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, model: UserModel, rng: &mut R) -> BehaviorProfile {
        let draw = |rng: &mut R, (lo, hi): (f64, f64)| if hi > lo { rng.random_range(lo..=hi) } else { lo };
        let p_volunteer = draw(rng, self.p_volunteer);
        let p_repeat = draw(rng, self.p_repeat);
        let patience = rng.random_range(self.patience.0..=self.patience.1);
        let rejections_count = self.rejections_count;
        match model {
            UserModel::Normal => BehaviorProfile {
                p_volunteer,
                p_repeat,
                patience,
                unfriendly: false,
                null_substitution: 0.0,
                rejections_count,
            },
            UserModel::Unfriendly => BehaviorProfile {
                p_volunteer: 0.0,
                p_repeat,
                patience,
                unfriendly: true,
                null_substitution: self.unfriendly_null_substitution,
                rejections_count,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn sampled_profiles_are_valid() {
        let cfg = ProfileConfig::default();
        cfg.validate().unwrap();
        let mut rng = seeded(3);
        for _ in 0..500 {
            let p = cfg.sample(UserModel::Normal, &mut rng);
            p.validate().unwrap();
            assert!(!p.unfriendly);
            let u = cfg.sample(UserModel::Unfriendly, &mut rng);
            u.validate().unwrap();
            assert_eq!(u.p_volunteer, 0.0);
            assert_eq!(u.null_substitution, 0.4);
        }
    }
}
