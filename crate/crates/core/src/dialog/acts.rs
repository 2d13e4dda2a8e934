use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ontology::{ItemId, ItemSet, SlotId, ValueId};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActKind {
    Request,
    Confirm,
    Select,
    Recommend,
    Bye,
}

impl ActKind {
    pub const ALL: [ActKind; 5] =
        [ActKind::Request, ActKind::Confirm, ActKind::Select, ActKind::Recommend, ActKind::Bye];
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemAct {
    Request(SlotId),
    Confirm(SlotId, ValueId),
    Select(SlotId, ValueId, ValueId),
    Recommend(ItemId),
    Bye,
}

impl SystemAct {
    pub fn kind(&self) -> ActKind {
        match self {
            SystemAct::Request(_) => ActKind::Request,
            SystemAct::Confirm(..) => ActKind::Confirm,
            SystemAct::Select(..) => ActKind::Select,
            SystemAct::Recommend(_) => ActKind::Recommend,
            SystemAct::Bye => ActKind::Bye,
        }
    }

    /// The slot addressed by a request, confirm or select.
    pub fn slot(&self) -> Option<SlotId> {
        match self {
            SystemAct::Request(s) | SystemAct::Confirm(s, _) | SystemAct::Select(s, _, _) => Some(*s),
            _ => None,
        }
    }

    pub fn validate(&self, domain: &ItemSet) -> Result<()> {
        let check_slot = |s: SlotId| -> Result<()> {
            if s.0 >= domain.slots().len() || !domain.slot(s).constrainable {
                return Err(Error::Contract(format!("act {self:?} addresses a non-constrainable slot")));
            }
            Ok(())
        };
        let check_value = |s: SlotId, v: ValueId| -> Result<()> {
            if v.0 >= domain.slot(s).n_values() {
                return Err(Error::Contract(format!("act {self:?} uses an unknown value")));
            }
            Ok(())
        };
        match self {
            SystemAct::Request(s) => check_slot(*s),
            SystemAct::Confirm(s, v) => {
                check_slot(*s)?;
                check_value(*s, *v)
            }
            SystemAct::Select(s, v1, v2) => {
                check_slot(*s)?;
                check_value(*s, *v1)?;
                check_value(*s, *v2)?;
                if v1 == v2 {
                    return Err(Error::Contract(format!("select {self:?} repeats a value")));
                }
                Ok(())
            }
            SystemAct::Recommend(x) => {
                if x.0 >= domain.n_items() {
                    return Err(Error::Contract(format!("recommendation of unknown item {}", x.0)));
                }
                Ok(())
            }
            SystemAct::Bye => Ok(()),
        }
    }
}

/// Semantic content of a user turn.
///
/// An inform may carry several pairs: the answer plus volunteered constraints.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserActKind {
    Inform(Vec<(SlotId, ValueId)>),
    Affirm,
    Deny,
    #[serde(rename = "null_response")]
    Null,
    Bye,
}

impl UserActKind {
    pub fn is_null_or_deny(&self) -> bool {
        matches!(self, UserActKind::Null | UserActKind::Deny)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct UserAct<T> {
    pub kind: UserActKind,
    pub confidence: T,
}

impl<T: Scalar> UserAct<T> {
    /// A noiseless act, as recorded for the true user turn.
    pub fn certain(kind: UserActKind) -> Self {
        Self { kind, confidence: T::one() }
    }
}
