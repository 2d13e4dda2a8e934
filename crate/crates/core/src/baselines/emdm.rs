use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};

use super::{recommend_or_ask, rq_act, ObservedState};
use crate::dialog::{observed_constraints, DialogueView, EpisodeFeedback, Policy, SystemAct};
use crate::error::{Error, Result};
use crate::ontology::{entropy_of_counts, ConstraintSet, ItemId, ItemSet, SlotId, ValueId};
use crate::rng::DialRng;
use crate::scalar::Scalar;

/// One remembered successful dialogue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmdmEpisode {
    /// Face-value constraints observed during the dialogue.
    pub evidence: Vec<(SlotId, ValueId)>,
    pub recommendation: ItemId,
}

/// Successful past dialogues. Only successes are ever stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmdmHistory {
    episodes: Vec<(ConstraintSet, ItemId)>,
}

impl EmdmHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_success(&mut self, evidence: ConstraintSet, recommendation: ItemId) {
        self.episodes.push((evidence, recommendation));
    }

    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    pub fn episodes(&self) -> impl Iterator<Item = EmdmEpisode> + '_ {
        self.episodes.iter().map(|(c, x)| EmdmEpisode { evidence: c.iter().collect(), recommendation: *x })
    }
}

pub fn write_history<W: Write>(history: &EmdmHistory, mut out: W) -> Result<()> {
    for ep in history.episodes() {
        serde_json::to_writer(&mut out, &ep)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_history<R: BufRead>(input: R) -> Result<EmdmHistory> {
    let mut h = EmdmHistory::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let ep: EmdmEpisode = serde_json::from_str(&line).map_err(|e| Error::Validation {
            path: "<emdm history>".into(),
            line: n + 1,
            msg: e.to_string(),
        })?;
        h.push_success(ep.evidence.into_iter().collect(), ep.recommendation);
    }
    Ok(h)
}

fn rec_entropy<'a>(recs: impl Iterator<Item = &'a ItemId>) -> (f64, BTreeMap<ItemId, usize>) {
    let mut counts = BTreeMap::new();
    for x in recs {
        *counts.entry(*x).or_insert(0usize) += 1;
    }
    let c: Vec<usize> = counts.values().copied().collect();
    (entropy_of_counts::<f64>(&c), counts)
}

const EPS: f64 = 1e-12;

/// Experience-entropy act.
///
/// Matching episodes are those whose evidence contains the current evidence
/// and whose recommendation has not been turned down yet. Each unasked slot is
/// scored by the expected entropy of matching recommendations after hearing
/// its value; the best score is asked if it beats the current entropy,
/// otherwise the modal recommendation is made. No matches: random questioner.
pub fn emdm_act(history: &EmdmHistory, state: &ObservedState, domain: &ItemSet, rng: &mut DialRng) -> SystemAct {
    let matching: Vec<&(ConstraintSet, ItemId)> = history
        .episodes
        .iter()
        .filter(|(ev, x)| state.constraints.is_subset_of(ev) && !state.recommended.contains(x))
        .collect();
    if matching.is_empty() {
        return rq_act(state, domain, rng);
    }
    let (h0, counts) = rec_entropy(matching.iter().map(|(_, x)| x));

    if counts.len() > 1 {
        let mut best: Vec<SlotId> = Vec::new();
        let mut best_score = f64::INFINITY;
        for f in state.unrequested(domain) {
            let mut by_value: BTreeMap<ValueId, Vec<ItemId>> = BTreeMap::new();
            for (ev, x) in &matching {
                if let Some(v) = ev.get(f) {
                    by_value.entry(v).or_default().push(*x);
                }
            }
            let total: usize = by_value.values().map(Vec::len).sum();
            if total == 0 {
                continue;
            }
            let score: f64 =
                by_value.values().map(|recs| recs.len() as f64 / total as f64 * rec_entropy(recs.iter()).0).sum();
            if score < best_score - EPS {
                best_score = score;
                best = vec![f];
            } else if (score - best_score).abs() <= EPS {
                best.push(f);
            }
        }
        if !best.is_empty() && best_score < h0 - EPS {
            return SystemAct::Request(*best.choose(rng).expect("non-empty"));
        }
    }

    let top = *counts.values().max().expect("non-empty");
    let modal: Vec<ItemId> = counts.iter().filter(|(_, c)| **c == top).map(|(x, _)| *x).collect();
    let item = *modal.choose(rng).expect("non-empty");
    recommend_or_ask(item, state, domain, rng)
}

/// Experience-entropy policy. Learns from its own successes while training.
#[derive(Debug, Clone, Default)]
pub struct ExperienceEntropy {
    pub history: EmdmHistory,
    pub frozen: bool,
}

impl ExperienceEntropy {
    pub fn new() -> Self {
        Self::default()
    }
}

impl<T: Scalar> Policy<T> for ExperienceEntropy {
    fn act(&mut self, view: &DialogueView<'_, T>, rng: &mut DialRng) -> Result<SystemAct> {
        Ok(emdm_act(&self.history, &ObservedState::from_view(view), view.domain, rng))
    }

    fn end_episode(&mut self, feedback: &EpisodeFeedback<'_, T>, _rng: &mut DialRng) {
        if self.frozen || !feedback.success {
            return;
        }
        if let Some((SystemAct::Recommend(x), _)) = feedback.history.last() {
            let evidence = observed_constraints(feedback.history, feedback.domain);
            self.history.push_success(evidence, *x);
        }
    }
}
