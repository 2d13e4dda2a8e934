//! Item universes, slots, constraints and candidate-set queries.
//!
//! An [`ItemSet`] is the questioner's search space: a list of items, each a
//! total assignment of categorical values to the domain's slots. Slot and value
//! identifiers are dense indices into the ontology; names only matter at the
//! file boundary.

mod entropy;
mod generate;
mod io;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use entropy::{entropy_of_counts, max_entropy_slot, slot_entropy, value_counts};
pub use generate::{generate_synthetic_domain, DomainSpec, SlotSpec};
pub use io::{load_domain, parse_domain, shipped_domain, to_json, SHIPPED_DOMAINS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SlotId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ValueId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ItemId(pub usize);

/// Which user groups may place a constraint on a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupVisibility {
    BothGroups,
    ExpertOnly,
    InformOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub name: String,
    pub values: Vec<String>,
    pub constrainable: bool,
    pub group_visibility: GroupVisibility,
}

impl Slot {
    pub fn value_index(&self, value: &str) -> Option<ValueId> {
        self.values.iter().position(|v| v == value).map(ValueId)
    }

    pub fn n_values(&self) -> usize {
        self.values.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub id: String,
    /// One value per slot, indexed by `SlotId`.
    pub values: Vec<ValueId>,
}

impl Item {
    #[inline]
    pub fn value(&self, slot: SlotId) -> ValueId {
        self.values[slot.0]
    }
}

/// Desired values for a subset of constrainable slots.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstraintSet {
    constraints: BTreeMap<SlotId, ValueId>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, slot: SlotId, value: ValueId) -> Option<ValueId> {
        self.constraints.insert(slot, value)
    }

    pub fn remove(&mut self, slot: SlotId) -> Option<ValueId> {
        self.constraints.remove(&slot)
    }

    pub fn get(&self, slot: SlotId) -> Option<ValueId> {
        self.constraints.get(&slot).copied()
    }

    pub fn contains_slot(&self, slot: SlotId) -> bool {
        self.constraints.contains_key(&slot)
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SlotId, ValueId)> + '_ {
        self.constraints.iter().map(|(s, v)| (*s, *v))
    }

    /// True when every constraint of `self` also appears in `other`.
    pub fn is_subset_of(&self, other: &ConstraintSet) -> bool {
        self.iter().all(|(s, v)| other.get(s) == Some(v))
    }

    pub fn matches(&self, item: &Item) -> bool {
        self.iter().all(|(s, v)| item.value(s) == v)
    }
}

impl FromIterator<(SlotId, ValueId)> for ConstraintSet {
    fn from_iter<I: IntoIterator<Item = (SlotId, ValueId)>>(iter: I) -> Self {
        Self { constraints: iter.into_iter().collect() }
    }
}

/// A validated item universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemSet {
    name: String,
    slots: Vec<Slot>,
    items: Vec<Item>,
    constrainable: Vec<SlotId>,
}

impl ItemSet {
    /// Builds an item set, checking every structural invariant.
    pub fn new(name: impl Into<String>, slots: Vec<Slot>, items: Vec<Item>) -> Result<Self> {
        let name = name.into();
        for (i, slot) in slots.iter().enumerate() {
            if slot.values.is_empty() {
                return Err(Error::Domain(format!("slot '{}' has no values", slot.name)));
            }
            let mut seen = std::collections::HashSet::new();
            for v in &slot.values {
                if !seen.insert(v) {
                    return Err(Error::Domain(format!("slot '{}' repeats value '{v}'", slot.name)));
                }
            }
            if !slot.constrainable && slot.group_visibility != GroupVisibility::InformOnly {
                return Err(Error::Domain(format!(
                    "slot '{}' is not constrainable but is visible to user groups",
                    slot.name
                )));
            }
            if slot.constrainable && slot.group_visibility == GroupVisibility::InformOnly {
                return Err(Error::Domain(format!("constrainable slot '{}' marked inform_only", slot.name)));
            }
            if slots[..i].iter().any(|s| s.name == slot.name) {
                return Err(Error::Domain(format!("duplicate slot '{}'", slot.name)));
            }
        }
        let mut ids = std::collections::HashSet::new();
        for item in &items {
            if !ids.insert(item.id.as_str()) {
                return Err(Error::Domain(format!("duplicate item id '{}'", item.id)));
            }
            if item.values.len() != slots.len() {
                return Err(Error::Domain(format!("item '{}' is not total over the slots", item.id)));
            }
            for (slot, value) in slots.iter().zip(&item.values) {
                if value.0 >= slot.values.len() {
                    return Err(Error::Domain(format!(
                        "item '{}' has out-of-range value for slot '{}'",
                        item.id, slot.name
                    )));
                }
            }
        }
        let constrainable = slots.iter().enumerate().filter(|(_, s)| s.constrainable).map(|(i, _)| SlotId(i)).collect();
        Ok(Self { name, slots, items, constrainable })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot(&self, id: SlotId) -> &Slot {
        &self.slots[id.0]
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn item(&self, id: ItemId) -> &Item {
        &self.items[id.0]
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn all_items(&self) -> Vec<ItemId> {
        (0..self.items.len()).map(ItemId).collect()
    }

    /// Constrainable slots in ontology order.
    pub fn constrainable_slots(&self) -> &[SlotId] {
        &self.constrainable
    }

    /// Constrainable slots usable by laypersons (visible to both groups).
    pub fn group1_slots(&self) -> Vec<SlotId> {
        self.constrainable
            .iter()
            .copied()
            .filter(|s| self.slot(*s).group_visibility == GroupVisibility::BothGroups)
            .collect()
    }

    /// Position of a slot within `constrainable_slots`.
    pub fn constrainable_index(&self, slot: SlotId) -> Option<usize> {
        self.constrainable.iter().position(|s| *s == slot)
    }

    /// Sum of value-set sizes over constrainable slots.
    pub fn constrainable_value_count(&self) -> usize {
        self.constrainable.iter().map(|s| self.slot(*s).n_values()).sum()
    }

    pub fn slot_by_name(&self, name: &str) -> Option<SlotId> {
        self.slots.iter().position(|s| s.name == name).map(SlotId)
    }

    pub fn item_by_name(&self, id: &str) -> Option<ItemId> {
        self.items.iter().position(|i| i.id == id).map(ItemId)
    }

    /// Resolves a `(slot name, value name)` pair to a constraint on a constrainable slot.
    pub fn resolve(&self, slot: &str, value: &str) -> Result<(SlotId, ValueId)> {
        let sid = self.slot_by_name(slot).ok_or_else(|| Error::Domain(format!("unknown slot '{slot}'")))?;
        let vid = self
            .slot(sid)
            .value_index(value)
            .ok_or_else(|| Error::Domain(format!("unknown value '{value}' for slot '{slot}'")))?;
        Ok((sid, vid))
    }

    pub fn check_constraints(&self, constraints: &ConstraintSet) -> Result<()> {
        for (slot, value) in constraints.iter() {
            let s = self.slots.get(slot.0).ok_or_else(|| Error::Domain(format!("unknown slot id {}", slot.0)))?;
            if !s.constrainable {
                return Err(Error::Domain(format!("slot '{}' is not constrainable", s.name)));
            }
            if value.0 >= s.values.len() {
                return Err(Error::Domain(format!("unknown value id {} for slot '{}'", value.0, s.name)));
            }
        }
        Ok(())
    }

    /// The candidate set: all items satisfying every constraint.
    pub fn filter_candidates(&self, constraints: &ConstraintSet) -> Result<Vec<ItemId>> {
        self.check_constraints(constraints)?;
        Ok(self.filter_unchecked(constraints))
    }

    /// `filter_candidates` without validation, for constraints built from this domain.
    pub fn filter_unchecked(&self, constraints: &ConstraintSet) -> Vec<ItemId> {
        self.items.iter().enumerate().filter(|(_, item)| constraints.matches(item)).map(|(i, _)| ItemId(i)).collect()
    }

    pub fn value_name(&self, slot: SlotId, value: ValueId) -> &str {
        &self.slot(slot).values[value.0]
    }
}

impl fmt::Display for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} items, {} slots, {} constrainable)",
            self.name,
            self.items.len(),
            self.slots.len(),
            self.constrainable.len()
        )
    }
}

/// Convenience for tests: a domain from `(slot, values, visibility)` triples and per-item value names.
pub fn toy_domain(slots: &[(&str, &[&str], GroupVisibility)], items: &[&[&str]]) -> Result<ItemSet> {
    let slots: Vec<Slot> = slots
        .iter()
        .map(|(name, values, vis)| Slot {
            name: name.to_string(),
            values: values.iter().map(|v| v.to_string()).collect(),
            constrainable: *vis != GroupVisibility::InformOnly,
            group_visibility: *vis,
        })
        .collect();
    let items = items
        .iter()
        .enumerate()
        .map(|(i, vals)| {
            let values = vals
                .iter()
                .zip(&slots)
                .map(|(v, s)| s.value_index(v).ok_or_else(|| Error::Domain(format!("bad toy value {v}"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(Item { id: format!("item{}", i + 1), values })
        })
        .collect::<Result<Vec<_>>>()?;
    ItemSet::new("toy", slots, items)
}
