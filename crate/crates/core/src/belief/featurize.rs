use serde::{Deserialize, Serialize};

use super::Belief;
use crate::dialog::ActKind;
use crate::ontology::ItemSet;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMode {
    /// Dialogue history and user intentions only.
    Plain,
    /// Plain features followed by the two context coordinates.
    WithContext,
}

/// Length of the dialogue-history block for `n_slots` constrainable slots.
pub fn history_len(n_slots: usize) -> usize {
    ActKind::ALL.len() + n_slots + 3
}

pub fn feature_len(domain: &ItemSet, mode: FeatureMode) -> usize {
    let n = domain.constrainable_slots().len();
    let plain = domain.constrainable_value_count() + n + history_len(n);
    match mode {
        FeatureMode::Plain => plain,
        FeatureMode::WithContext => plain + 2,
    }
}

/// Flattens a belief into a fixed-order vector:
/// slot distributions (values in ontology order, then "none"), the history
/// block (last act one-hot, requested flags, recommended flag, turn fraction,
/// candidate fraction) and, for `WithContext` only, the context one-hot.
pub fn featurize<T: Scalar>(belief: &Belief<T>, mode: FeatureMode) -> Vec<T> {
    let mut out = Vec::new();
    for slot in &belief.slots {
        out.extend_from_slice(&slot.probs);
        out.push(slot.none);
    }
    let h = &belief.history;
    for kind in ActKind::ALL {
        out.push(if h.last_act == Some(kind) { T::one() } else { T::zero() });
    }
    out.extend(h.requested.iter().map(|r| if *r { T::one() } else { T::zero() }));
    out.push(if h.recommended { T::one() } else { T::zero() });
    out.push(h.turn_fraction);
    out.push(h.candidate_fraction);
    if mode == FeatureMode::WithContext {
        out.extend_from_slice(&belief.context);
    }
    out
}
