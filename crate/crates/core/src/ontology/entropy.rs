use rand::Rng;

use super::{ItemId, ItemSet, SlotId};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Histogram of a slot's values among `candidates`, indexed by value id.
pub fn value_counts(domain: &ItemSet, candidates: &[ItemId], slot: SlotId) -> Vec<usize> {
    let mut counts = vec![0usize; domain.slot(slot).n_values()];
    for id in candidates {
        counts[domain.item(*id).value(slot).0] += 1;
    }
    counts
}

/// Shannon entropy in bits of the empirical distribution given by `counts`.
///
/// Counts are summed in sorted order so equal multisets give bit-identical
/// results, which keeps tie detection exact.
pub fn entropy_of_counts<T: Scalar>(counts: &[usize]) -> T {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return T::zero();
    }
    let mut sorted: Vec<usize> = counts.iter().copied().filter(|c| *c > 0).collect();
    sorted.sort_unstable();
    let n = T::of(total as f64);
    let mut h = T::zero();
    for c in sorted {
        let p = T::of(c as f64) / n;
        h -= p * p.log2();
    }
    // -0.0 for degenerate distributions
    h.max(T::zero())
}

pub fn slot_entropy<T: Scalar>(domain: &ItemSet, candidates: &[ItemId], slot: SlotId) -> Result<T> {
    if candidates.is_empty() {
        return Err(Error::Precondition("slot_entropy over an empty candidate set".into()));
    }
    if slot.0 >= domain.slots().len() {
        return Err(Error::Domain(format!("unknown slot id {}", slot.0)));
    }
    Ok(entropy_of_counts(&value_counts(domain, candidates, slot)))
}

/// The slot among `slots` with the highest entropy over `candidates`.
///
/// Returns `None` when every slot has zero entropy, i.e. no slot can still
/// differentiate between the candidates. Ties are broken uniformly with `rng`.
pub fn max_entropy_slot<T: Scalar, R: Rng + ?Sized>(
    domain: &ItemSet,
    candidates: &[ItemId],
    slots: &[SlotId],
    rng: &mut R,
) -> Result<Option<SlotId>> {
    let mut best: Vec<SlotId> = Vec::new();
    let mut best_h = T::zero();
    for &slot in slots {
        let h: T = slot_entropy(domain, candidates, slot)?;
        if h <= T::zero() {
            continue;
        }
        if best.is_empty() || h > best_h {
            best.clear();
            best.push(slot);
            best_h = h;
        } else if h == best_h {
            best.push(slot);
        }
    }
    Ok(match best.len() {
        0 => None,
        1 => Some(best[0]),
        n => Some(best[rng.random_range(0..n)]),
    })
}
