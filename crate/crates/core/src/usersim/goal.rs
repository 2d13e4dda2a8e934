use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{UserContext, UserGroup};
use crate::error::{Error, Result};
use crate::ontology::{ConstraintSet, ItemId, ItemSet, SlotId};

/// Most constraints a user ever holds.
pub const MAX_CONSTRAINTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserGoal {
    pub constraints: ConstraintSet,
    pub seed_item: ItemId,
    /// Items satisfying every constraint, in domain order.
    pub target_set: Vec<ItemId>,
}

impl UserGoal {
    pub fn is_target(&self, item: ItemId) -> bool {
        self.target_set.binary_search(&item).is_ok()
    }
}

/// Samples a satisfiable goal: a uniform seed item, then the group's constraint
/// slots, whose values are read off the seed item.
pub fn sample_goal<R: Rng + ?Sized>(domain: &ItemSet, context: UserContext, rng: &mut R) -> Result<UserGoal> {
    if domain.n_items() == 0 {
        return Err(Error::Config(format!("domain '{}' has no items", domain.name())));
    }
    let seed_item = ItemId(rng.random_range(0..domain.n_items()));
    let (pool, count): (Vec<SlotId>, usize) = match context.group {
        UserGroup::Layperson => {
            let pool = domain.group1_slots();
            if pool.is_empty() {
                return Err(Error::Config(format!("domain '{}' has no slots usable by laypersons", domain.name())));
            }
            let hi = MAX_CONSTRAINTS.min(pool.len());
            let count = rng.random_range(1..=hi);
            (pool, count)
        }
        UserGroup::Expert => {
            let pool = domain.constrainable_slots().to_vec();
            let count = MAX_CONSTRAINTS.min(pool.len());
            (pool, count)
        }
    };
    let mut chosen: Vec<SlotId> = pool.choose_multiple(rng, count).copied().collect();
    chosen.shuffle(rng);
    let item = domain.item(seed_item);
    let constraints: ConstraintSet = chosen.iter().map(|s| (*s, item.value(*s))).collect();
    let target_set = domain.filter_unchecked(&constraints);
    debug_assert!(target_set.contains(&seed_item));
    Ok(UserGoal { constraints, seed_item, target_set })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::shipped_domain;
    use crate::rng::seeded;

    #[test]
    fn layperson_goals_use_group_one_slots() {
        let d = shipped_domain("fin").unwrap();
        let names: Vec<SlotId> =
            ["minimum age", "purpose", "account"].iter().map(|n| d.slot_by_name(n).unwrap()).collect();
        let mut rng = seeded(0);
        for _ in 0..2000 {
            let g = sample_goal(&d, UserContext::new(UserGroup::Layperson), &mut rng).unwrap();
            assert!((1..=3).contains(&g.constraints.len()));
            assert!(g.constraints.iter().all(|(s, _)| names.contains(&s)));
            assert!(g.is_target(g.seed_item));
        }
    }

    #[test]
    fn experts_use_exactly_three() {
        let d = shipped_domain("fin").unwrap();
        let mut rng = seeded(1);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..2000 {
            let g = sample_goal(&d, UserContext::new(UserGroup::Expert), &mut rng).unwrap();
            assert_eq!(g.constraints.len(), 3);
            seen.extend(g.constraints.iter().map(|(s, _)| s));
        }
        assert_eq!(seen.len(), 9);
    }

    #[test]
    fn contexts_are_balanced() {
        let mut rng = seeded(0);
        let lay = (0..10_000).filter(|_| UserContext::sample(&mut rng).group == UserGroup::Layperson).count();
        assert!((lay as f64 / 10_000.0 - 0.5).abs() <= 0.02);
    }

    #[test]
    fn no_group_one_slots_is_a_config_error() {
        use crate::ontology::{toy_domain, GroupVisibility::*};
        let d = toy_domain(&[("A", &["a", "b"], ExpertOnly)], &[&["a"], &["b"]]).unwrap();
        let mut rng = seeded(0);
        assert!(matches!(sample_goal(&d, UserContext::new(UserGroup::Layperson), &mut rng), Err(Error::Config(_))));
        assert!(sample_goal(&d, UserContext::new(UserGroup::Expert), &mut rng).is_ok());
    }
}
