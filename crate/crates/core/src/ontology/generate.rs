use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{GroupVisibility, Item, ItemSet, Slot, ValueId};
use crate::error::{Error, Result};
use crate::rng::seeded;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotSpec {
    pub name: String,
    /// Number of distinct values.
    pub values: usize,
}

/// Cardinalities of a synthetic ontology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub name: String,
    pub n_items: usize,
    pub constrainable_slots: Vec<SlotSpec>,
    pub inform_slot_count: usize,
    /// Constrainable slots that laypersons may constrain as well.
    pub group1_slots: Vec<String>,
    #[serde(default)]
    pub seed: u64,
}

fn value_names(slot: &str, n: usize) -> Vec<String> {
    let stem: String =
        slot.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' }).collect();
    (1..=n).map(|k| format!("{stem}_{k}")).collect()
}

/// Draws a deterministic item set with the requested cardinalities.
///
/// Every value of every constrainable slot is carried by at least one item.
/// Informational slots get one value per item.
pub fn generate_synthetic_domain(spec: &DomainSpec) -> Result<ItemSet> {
    if spec.n_items == 0 {
        return Err(Error::Spec("n_items must be positive".into()));
    }
    if spec.constrainable_slots.is_empty() {
        return Err(Error::Spec("at least one constrainable slot is required".into()));
    }
    for s in &spec.constrainable_slots {
        if s.values < 2 {
            return Err(Error::Spec(format!("slot '{}' needs at least 2 values", s.name)));
        }
        if s.values > spec.n_items {
            return Err(Error::Spec(format!(
                "slot '{}' has {} values but only {} items can carry them",
                s.name, s.values, spec.n_items
            )));
        }
    }
    for g in &spec.group1_slots {
        if !spec.constrainable_slots.iter().any(|s| &s.name == g) {
            return Err(Error::Spec(format!("group-1 slot '{g}' is not a constrainable slot")));
        }
    }

    let mut rng = seeded(spec.seed);
    let mut slots = Vec::new();
    let mut columns: Vec<Vec<ValueId>> = Vec::new();

    for s in &spec.constrainable_slots {
        let visibility =
            if spec.group1_slots.contains(&s.name) { GroupVisibility::BothGroups } else { GroupVisibility::ExpertOnly };
        slots.push(Slot {
            name: s.name.clone(),
            values: value_names(&s.name, s.values),
            constrainable: true,
            group_visibility: visibility,
        });
        let mut column: Vec<ValueId> = (0..s.values).map(ValueId).collect();
        while column.len() < spec.n_items {
            column.push(ValueId(rng.random_range(0..s.values)));
        }
        column.shuffle(&mut rng);
        columns.push(column);
    }
    for k in 1..=spec.inform_slot_count {
        let name = format!("info_{k}");
        slots.push(Slot {
            values: value_names(&name, spec.n_items),
            name,
            constrainable: false,
            group_visibility: GroupVisibility::InformOnly,
        });
        columns.push((0..spec.n_items).map(ValueId).collect());
    }

    let items = (0..spec.n_items)
        .map(|i| Item { id: format!("{}-{:03}", spec.name, i + 1), values: columns.iter().map(|c| c[i]).collect() })
        .collect();
    ItemSet::new(spec.name.clone(), slots, items)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fin_spec() -> DomainSpec {
        let slots = [
            ("minimum age", 4),
            ("purpose", 8),
            ("account", 3),
            ("name", 14),
            ("insurance", 3),
            ("max. duration", 8),
            ("min. duration", 6),
            ("max. principal", 10),
            ("min. principal", 8),
        ];
        DomainSpec {
            name: "fin".into(),
            n_items: 14,
            constrainable_slots: slots.iter().map(|(n, v)| SlotSpec { name: n.to_string(), values: *v }).collect(),
            inform_slot_count: 4,
            group1_slots: vec!["minimum age".into(), "purpose".into(), "account".into()],
            seed: 0,
        }
    }

    #[test]
    fn fin_cardinalities() {
        let d = generate_synthetic_domain(&fin_spec()).unwrap();
        assert_eq!(d.n_items(), 14);
        assert_eq!(d.slots().len(), 13);
        assert_eq!(d.constrainable_slots().len(), 9);
        assert_eq!(d.constrainable_value_count(), 64);
        assert_eq!(d.group1_slots().len(), 3);
        for &s in d.constrainable_slots() {
            let counts = crate::ontology::value_counts(&d, &d.all_items(), s);
            assert!(counts.iter().all(|c| *c >= 1), "every value carried by some item");
        }
    }

    #[test]
    fn cr_like() {
        let spec = DomainSpec {
            name: "cr".into(),
            n_items: 110,
            constrainable_slots: ["price range", "area", "food"]
                .iter()
                .map(|n| SlotSpec { name: n.to_string(), values: 5 })
                .collect(),
            inform_slot_count: 4,
            group1_slots: vec!["price range".into()],
            seed: 0,
        };
        let d = generate_synthetic_domain(&spec).unwrap();
        assert_eq!(d.constrainable_slots().len(), 3);
        assert_eq!(d.n_items(), 110);
    }

    #[test]
    fn deterministic_in_seed() {
        let a = generate_synthetic_domain(&fin_spec()).unwrap();
        let b = generate_synthetic_domain(&fin_spec()).unwrap();
        assert_eq!(crate::ontology::to_json(&a).unwrap(), crate::ontology::to_json(&b).unwrap());
        let mut other = fin_spec();
        other.seed = 1;
        let c = generate_synthetic_domain(&other).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn infeasible_specs() {
        let mut s = fin_spec();
        s.constrainable_slots[0].values = 1;
        assert!(matches!(generate_synthetic_domain(&s), Err(Error::Spec(_))));
        let mut s = fin_spec();
        s.constrainable_slots[3].values = 15;
        assert!(matches!(generate_synthetic_domain(&s), Err(Error::Spec(_))));
        let mut s = fin_spec();
        s.group1_slots.push("info_1".into());
        assert!(matches!(generate_synthetic_domain(&s), Err(Error::Spec(_))));
    }
}
