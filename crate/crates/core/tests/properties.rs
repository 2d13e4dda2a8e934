use dialmark::belief::{featurize, BeliefTracker, FeatureMode, TrackerConfig};
use dialmark::dialog::{decompose_reward, episode_return, ActionMask, SystemAct, UserAct, UserActKind};
use dialmark::ontology::{
    shipped_domain, ConstraintSet, GroupVisibility, Item, ItemId, ItemSet, Slot, SlotId, ValueId,
};
use dialmark::rl::{
    masked_argmax, uniform_allowed, Dqn, DqnConfig, EpsilonSchedule, GpConfig, GpSarsa, Learner, Phase,
};
use dialmark::rng::seeded;
use dialmark::usersim::{UserContext, UserGroup};
use proptest::prelude::*;

/// A turn as raw draws, bound to a concrete domain by `bind`.
#[derive(Debug, Clone)]
struct RawTurn {
    act: (u8, usize, usize, usize),
    reply: (u8, Vec<(usize, usize)>),
    confidence: f64,
}

fn raw_turn() -> impl Strategy<Value = RawTurn> {
    (
        (0u8..5, any::<usize>(), any::<usize>(), any::<usize>()),
        (0u8..4, prop::collection::vec((any::<usize>(), any::<usize>()), 1..3)),
        0.0f64..=1.0,
    )
        .prop_map(|(act, reply, confidence)| RawTurn { act, reply, confidence })
}

fn bind(domain: &ItemSet, raw: &RawTurn) -> (SystemAct, UserAct<f64>) {
    let slots = domain.constrainable_slots();
    let slot = |k: usize| slots[k % slots.len()];
    let value = |s: SlotId, k: usize| ValueId(k % domain.slot(s).n_values());
    let (kind, a, b, c) = raw.act;
    let act = match kind {
        0 => SystemAct::Request(slot(a)),
        1 => SystemAct::Confirm(slot(a), value(slot(a), b)),
        2 => {
            let s = slot(a);
            let n = domain.slot(s).n_values();
            SystemAct::Select(s, ValueId(b % n), ValueId((b % n + 1 + c % (n - 1)) % n))
        }
        3 => SystemAct::Recommend(ItemId(b % domain.n_items())),
        _ => SystemAct::Bye,
    };
    let reply = match raw.reply.0 {
        0 => UserActKind::Inform(raw.reply.1.iter().map(|(s, v)| (slot(*s), value(slot(*s), *v))).collect()),
        1 => UserActKind::Affirm,
        2 => UserActKind::Deny,
        _ => UserActKind::Null,
    };
    (act, UserAct { kind: reply, confidence: raw.confidence })
}

fn domain_strategy() -> impl Strategy<Value = ItemSet> {
    prop::collection::vec(2usize..5, 1..5)
        .prop_flat_map(|cards| {
            let item = cards.iter().map(|n| 0..*n).collect::<Vec<_>>();
            (Just(cards), prop::collection::vec(item, 1..40))
        })
        .prop_map(|(cards, rows)| {
            let slots = cards
                .iter()
                .enumerate()
                .map(|(i, n)| Slot {
                    name: format!("s{i}"),
                    values: (0..*n).map(|v| format!("v{v}")).collect(),
                    constrainable: true,
                    group_visibility: GroupVisibility::BothGroups,
                })
                .collect();
            let items = rows
                .into_iter()
                .enumerate()
                .map(|(i, r)| Item { id: format!("x{i}"), values: r.into_iter().map(ValueId).collect() })
                .collect();
            ItemSet::new("random", slots, items).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn slot_beliefs_stay_normalized(turns in prop::collection::vec(raw_turn(), 1..25), expert in any::<bool>()) {
        let d = shipped_domain("fin").unwrap();
        let tracker = BeliefTracker::<f64>::new(TrackerConfig::default());
        let group = if expert { UserGroup::Expert } else { UserGroup::Layperson };
        let mut b = tracker.fresh(&d, UserContext::new(group));
        for raw in &turns {
            let (act, obs) = bind(&d, raw);
            b = tracker.update(&b, &d, &act, &obs);
            for s in &b.slots {
                prop_assert!((s.total() - 1.0).abs() < 1e-9, "{s:?}");
                prop_assert!(s.probs.iter().chain([&s.none, &s.observed]).all(|p| (0.0..=1.0 + 1e-12).contains(p)));
            }
        }
    }

    #[test]
    fn plain_features_never_see_the_context(turns in prop::collection::vec(raw_turn(), 0..10)) {
        let d = shipped_domain("lap").unwrap();
        let tracker = BeliefTracker::<f64>::new(TrackerConfig::default());
        let mut b = tracker.fresh(&d, UserContext::new(UserGroup::Layperson));
        for raw in &turns {
            let (act, obs) = bind(&d, raw);
            b = tracker.update(&b, &d, &act, &obs);
        }
        let flipped = b.clone().with_context(UserContext::new(UserGroup::Expert));
        let (p, q) = (featurize(&b, FeatureMode::Plain), featurize(&flipped, FeatureMode::Plain));
        prop_assert_eq!(p.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), q.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        let (p, q) = (featurize(&b, FeatureMode::WithContext), featurize(&flipped, FeatureMode::WithContext));
        let n = p.len() - 2;
        prop_assert_eq!(&p[..n], &q[..n]);
        prop_assert_ne!(&p[n..], &q[n..]);
    }

    #[test]
    fn more_constraints_never_widen_the_candidates(d in domain_strategy(), picks in prop::collection::vec((any::<usize>(), any::<usize>()), 0..6)) {
        let mut c = ConstraintSet::new();
        let mut previous = d.filter_candidates(&c).unwrap();
        prop_assert_eq!(previous.len(), d.n_items());
        for (s, v) in picks {
            let slot = SlotId(s % d.slots().len());
            if c.contains_slot(slot) {
                continue;
            }
            c.insert(slot, ValueId(v % d.slot(slot).n_values()));
            let now = d.filter_candidates(&c).unwrap();
            prop_assert!(now.iter().all(|x| previous.contains(x)));
            prop_assert!(now.iter().all(|x| c.matches(d.item(*x))));
            previous = now;
        }
    }

    #[test]
    fn reward_stream_sums_to_the_return(length in 1usize..=25, success in any::<bool>()) {
        let stream = decompose_reward(length, success);
        prop_assert_eq!(stream.len(), length);
        prop_assert_eq!(stream.iter().sum::<i32>(), episode_return(success, length));
        prop_assert!(stream[..length - 1].iter().all(|r| *r == -1));
    }

    #[test]
    fn masked_actions_are_never_chosen(
        q in prop::collection::vec(-50.0f64..50.0, 2..12),
        bits in prop::collection::vec(any::<bool>(), 12),
        pick in any::<usize>(),
        seed in any::<u64>(),
    ) {
        let n = q.len();
        let mut allowed = bits[..n].to_vec();
        allowed[pick % n] = true;
        let mask = ActionMask { allowed };
        let mut rng = seeded(seed);
        prop_assert!(mask.is_allowed(masked_argmax(&q, &mask).unwrap()));
        prop_assert!(mask.is_allowed(uniform_allowed(&mask, &mut rng).unwrap()));

        let features: Vec<f64> = q.iter().map(|x| x / 50.0).collect();
        let mut gp = GpSarsa::<f64>::new(n, GpConfig::default()).unwrap();
        let config = DqnConfig { hidden: vec![8], ..DqnConfig::default() };
        let mut dqn = Dqn::<f64>::new(n, n, config, &mut rng).unwrap();
        for phase in [Phase::Train, Phase::Test] {
            prop_assert!(mask.is_allowed(gp.select_action(&features, &mask, phase, &mut rng).unwrap()));
            prop_assert!(mask.is_allowed(dqn.select_action(&features, &mask, phase, &mut rng).unwrap()));
        }
    }

    #[test]
    fn epsilon_decays_monotonically(start in 0.05f64..=1.0, d1 in 0usize..6000, d2 in 0usize..6000) {
        let s = EpsilonSchedule::new(start);
        let (lo, hi) = (d1.min(d2), d1.max(d2));
        prop_assert!(s.value(lo) >= s.value(hi));
        prop_assert!((0.05..=start).contains(&s.value(hi)));
    }
}
