use serde::{Deserialize, Serialize};

use crate::ontology::ValueId;
use crate::scalar::Scalar;

/// Distribution over one slot's values plus a distinguished "no constraint" mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SlotBelief<T> {
    pub probs: Vec<T>,
    pub none: T,
    /// Mass contributed by informative observations, 1 - Π(1 - p) over informs.
    /// Stays 0 until the user has said something about the slot.
    pub observed: T,
}

impl<T: Scalar> SlotBelief<T> {
    pub fn uniform(n_values: usize) -> Self {
        let p = T::one() / T::of(n_values as f64);
        Self { probs: vec![p; n_values], none: T::zero(), observed: T::zero() }
    }

    pub fn total(&self) -> T {
        self.probs.iter().copied().sum::<T>() + self.none
    }

    /// Most likely value and its mass; lowest index wins ties.
    pub fn top(&self) -> (ValueId, T) {
        let mut best = 0;
        for (i, p) in self.probs.iter().enumerate() {
            if *p > self.probs[best] {
                best = i;
            }
        }
        (ValueId(best), self.probs[best])
    }

    pub fn top_two(&self) -> Option<(ValueId, ValueId)> {
        if self.probs.len() < 2 {
            return None;
        }
        let (first, _) = self.top();
        let mut second: Option<usize> = None;
        for (i, p) in self.probs.iter().enumerate() {
            if i == first.0 {
                continue;
            }
            match second {
                Some(s) if *p <= self.probs[s] => {}
                _ => second = Some(i),
            }
        }
        second.map(|s| (first, ValueId(s)))
    }

    /// d' = (1 - p)·d + p·δ_v
    pub fn inform(&mut self, value: ValueId, p: T) {
        let keep = T::one() - p;
        for q in &mut self.probs {
            *q *= keep;
        }
        self.none *= keep;
        self.probs[value.0] += p;
        self.observed = T::one() - (T::one() - self.observed) * keep;
    }

    /// Moves a fraction `p` of the mass on `value` to the other values and
    /// "none", proportionally to their current mass.
    pub fn deny(&mut self, value: ValueId, p: T) {
        let moved = p * self.probs[value.0];
        if moved <= T::zero() {
            return;
        }
        self.probs[value.0] -= moved;
        let others: T =
            self.probs.iter().enumerate().filter(|(i, _)| *i != value.0).map(|(_, q)| *q).sum::<T>() + self.none;
        if others > T::zero() {
            let scale = moved / others;
            for (i, q) in self.probs.iter_mut().enumerate() {
                if i != value.0 {
                    *q += *q * scale;
                }
            }
            self.none += self.none * scale;
        } else {
            // all mass sat on the denied value: spread it evenly
            let share = moved / T::of(self.probs.len() as f64);
            for (i, q) in self.probs.iter_mut().enumerate() {
                if i != value.0 {
                    *q += share;
                }
            }
            self.none += share;
        }
    }

    /// d' = (1 - q)·d + q·δ_none
    pub fn shift_to_none(&mut self, q: T) {
        let keep = T::one() - q;
        for p in &mut self.probs {
            *p *= keep;
        }
        self.none = self.none * keep + q;
    }
}
