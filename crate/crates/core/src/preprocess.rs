//! Transformations applied before splitting.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{InteractionLog, Record, SubsetRole};

/// Requested preprocessing. Steps run in a fixed order:
/// consecutive-repeat removal, then n-core filtering, then collision shuffling.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessSpec {
    /// Minimum number of interactions per user and per item.
    pub n_core: Option<usize>,
    pub drop_consecutive_repeats: bool,
    /// Seed for shuffling the order of same-timestamp events.
    pub shuffle_collisions: Option<u64>,
}

impl PreprocessSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_core == Some(0) {
            return Err(Error::InvalidPreprocessSpec("n_core must be at least 1".into()));
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.n_core.is_none() && !self.drop_consecutive_repeats && self.shuffle_collisions.is_none()
    }

    /// Apply all requested steps. The result is tagged `preprocessed`
    /// unless nothing was requested.
    pub fn apply(&self, log: &InteractionLog) -> Result<InteractionLog> {
        self.validate()?;
        if self.is_identity() {
            return Ok(log.clone());
        }
        let mut out = log.clone();
        if self.drop_consecutive_repeats {
            out = drop_consecutive_repeats(&out);
        }
        if let Some(n) = self.n_core {
            out = n_core_filter(&out, n);
        }
        if let Some(seed) = self.shuffle_collisions {
            out = shuffle_collision_order(&out, seed);
        }
        Ok(out.with_role(SubsetRole::Preprocessed))
    }
}

/// Iteratively drop users and items with fewer than `n` interactions until
/// every remaining user and item has at least `n`. Counts interactions, not
/// distinct partners.
pub fn n_core_filter(log: &InteractionLog, n: usize) -> InteractionLog {
    let n_users = log.users_vocab().len();
    let n_items = log.items_vocab().len();
    let mut alive: Vec<Record> = log.records().to_vec();
    loop {
        let mut user_count = vec![0usize; n_users];
        let mut item_count = vec![0usize; n_items];
        for r in &alive {
            user_count[r.user as usize] += 1;
            item_count[r.item as usize] += 1;
        }
        let before = alive.len();
        alive.retain(|r| user_count[r.user as usize] >= n && item_count[r.item as usize] >= n);
        if alive.len() == before {
            break;
        }
    }
    log.derive(alive, log.role())
}

/// Within each user's sequence keep only the first interaction of every
/// maximal run of the same item.
pub fn drop_consecutive_repeats(log: &InteractionLog) -> InteractionLog {
    let mut kept = Vec::with_capacity(log.len());
    for (_, seq) in log.sequences() {
        let mut prev = None;
        for r in seq {
            if prev != Some(r.item) {
                kept.push(*r);
            }
            prev = Some(r.item);
        }
    }
    log.derive(kept, log.role())
}

/// Randomly reorder events that share a timestamp within a user.
///
/// Each maximal same-timestamp group is permuted by a Fisher–Yates shuffle
/// driven by ChaCha8 seeded through `seed_from_u64`; the permutation is
/// realized by handing the group's ordinals out in the new order. Groups are
/// visited in canonical order from one generator stream, so a seed fully
/// determines the output.
pub fn shuffle_collision_order(log: &InteractionLog, seed: u64) -> InteractionLog {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Record> = log.records().to_vec();
    for slice in log.user_slices() {
        let seq = &mut out[slice.range()];
        let mut start = 0;
        while start < seq.len() {
            let mut end = start + 1;
            while end < seq.len() && seq[end].timestamp == seq[start].timestamp {
                end += 1;
            }
            if end - start > 1 {
                permute_ordinals(&mut seq[start..end], &mut rng);
            }
            start = end;
        }
    }
    log.derive(out, log.role())
}

fn permute_ordinals(group: &mut [Record], rng: &mut ChaCha8Rng) {
    let ordinals: Vec<u64> = group.iter().map(|r| r.ordinal).collect();
    let mut order: Vec<usize> = (0..group.len()).collect();
    for i in (1..order.len()).rev() {
        let j = uniform_below(rng, i as u64 + 1) as usize;
        order.swap(i, j);
    }
    // the record at position order[k] takes the k-th smallest ordinal
    let snapshot: Vec<Record> = group.to_vec();
    for (k, &src) in order.iter().enumerate() {
        group[k] = Record {
            ordinal: ordinals[k],
            ..snapshot[src]
        };
    }
}

/// Unbiased integer in `[0, bound)` by rejection sampling on 64-bit draws.
fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % bound;
        }
    }
}
