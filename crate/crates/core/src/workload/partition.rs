use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMode {
    Iid,
    #[serde(alias = "non_iid", alias = "noniid")]
    NonIid,
}

/// Splits `0..labels.len()` across `k` devices.
///
/// `Iid` deals a shuffled index list into near-equal shards. `NonIid` cuts
/// every class into near-equal subsets, `2k` subsets in total, and hands each
/// device one subset from each of two distinct classes.
pub fn partition<R: Rng + ?Sized>(
    labels: &[usize],
    classes: usize,
    k: usize,
    mode: PartitionMode,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    if k == 0 {
        return Err(Error::config("fleet.devices", "must be at least 1"));
    }
    match mode {
        PartitionMode::Iid => Ok(iid(labels.len(), k, rng)),
        PartitionMode::NonIid => label_skew(labels, classes, k, rng),
    }
}

fn split_even(items: &[usize], parts: usize) -> Vec<Vec<usize>> {
    let base = items.len() / parts;
    let extra = items.len() % parts;
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for p in 0..parts {
        let len = base + usize::from(p < extra);
        out.push(items[start..start + len].to_vec());
        start += len;
    }
    out
}

fn iid<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    split_even(&idx, k)
}

fn label_skew<R: Rng + ?Sized>(
    labels: &[usize],
    classes: usize,
    k: usize,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    if classes < 2 {
        return Err(Error::config("workload.classes", "non-IID partitioning needs at least 2 classes"));
    }
    let total = 2 * k;
    if total < classes {
        return Err(Error::config(
            "workload.partition",
            format!("non-IID needs at least {} devices to cover {classes} classes", classes.div_ceil(2)),
        ));
    }

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, &y) in labels.iter().enumerate() {
        by_class[y].push(i);
    }

    // Subsets per class: an even split of 2k, remainder to randomly chosen classes.
    let mut order: Vec<usize> = (0..classes).collect();
    order.shuffle(rng);
    let mut per_class = vec![total / classes; classes];
    for &c in order.iter().take(total % classes) {
        per_class[c] += 1;
    }

    // Subsets laid out class by class; each class occupies a contiguous run of
    // at most k slots, so pairing slot i with slot i + k never repeats a class.
    let mut slots: Vec<(usize, Vec<usize>)> = Vec::with_capacity(total);
    for &c in &order {
        let mut members = std::mem::take(&mut by_class[c]);
        if members.len() < per_class[c] {
            return Err(Error::config(
                "fleet.devices",
                format!(
                    "class {c} has {} samples but needs {} non-empty subsets",
                    members.len(),
                    per_class[c]
                ),
            ));
        }
        members.shuffle(rng);
        for subset in split_even(&members, per_class[c]) {
            slots.push((c, subset));
        }
    }
    let (mut firsts, mut seconds): (Vec<_>, Vec<_>) = {
        let mut it = slots.into_iter();
        let a: Vec<_> = it.by_ref().take(k).collect();
        (a, it.collect())
    };

    // Randomise the pairing with validity-preserving swaps.
    for _ in 0..(8 * k) {
        let i = rng.gen_range(0..k);
        let j = rng.gen_range(0..k);
        if i != j && firsts[i].0 != seconds[j].0 && firsts[j].0 != seconds[i].0 {
            seconds.swap(i, j);
        }
    }

    let mut devices: Vec<usize> = (0..k).collect();
    devices.shuffle(rng);
    let mut shards = vec![Vec::new(); k];
    for (slot, &device) in devices.iter().enumerate() {
        let mut shard = std::mem::take(&mut firsts[slot].1);
        shard.append(&mut seconds[slot].1);
        shard.sort_unstable();
        shards[device] = shard;
    }
    Ok(shards)
}
