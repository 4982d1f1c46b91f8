//! Alignment scoring and top-C device selection.
//!
//! A device's score for a job combines how tightly the job's demand fits the
//! device (resource alignment) with how far the device's participation
//! frequency for that job sits above the fleet mean (participation fairness).
//! Ineligible and occupied devices are filtered out before scoring.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{eligible, DeviceId, DeviceProfile, JobId, JobSpec, ParticipationLedger, SchedulingPlan};

/// Weights of the resource-alignment and participation-fairness terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreWeights {
    pub alpha: f64,
    pub beta: f64,
}

impl ScoreWeights {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::config("scheduler.alpha", "must be finite and >= 0"));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::config("scheduler.beta", "must be finite and >= 0"));
        }
        if alpha + beta <= 0.0 {
            return Err(Error::config("scheduler.alpha", "alpha + beta must be > 0"));
        }
        Ok(Self { alpha, beta })
    }
}

impl Default for ScoreWeights {
    fn default() -> Self {
        Self { alpha: 0.7, beta: 0.3 }
    }
}

/// Per-resource weights of the alignment dot product, summing to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceWeights(pub [f64; 3]);

impl Default for ResourceWeights {
    fn default() -> Self {
        Self([1.0 / 3.0; 3])
    }
}

impl ResourceWeights {
    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::config("scheduler.resource_weights", "must be finite and >= 0"));
        }
        let sum: f64 = self.0.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::config(
                "scheduler.resource_weights",
                format!("must sum to 1, got {sum}"),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreBreakdown {
    pub device_id: DeviceId,
    pub job_id: JobId,
    pub resource_term: f64,
    pub fairness_term: f64,
    pub combined: f64,
}

/// Weighted dot product of demand and availability, both normalised by the
/// device's capacity, clamped to [0, 1].
pub fn resource_alignment(
    device: &DeviceProfile,
    job: &JobSpec,
    weights: &ResourceWeights,
) -> Result<f64> {
    if !device.capacity.is_valid_capacity() {
        return Err(Error::config(
            format!("fleet.device[{}].capacity", device.id),
            "every capacity component must be > 0",
        ));
    }
    if !eligible(device, job) {
        return Err(Error::Ineligible {
            device: device.id,
            job: job.id,
        });
    }
    let cap = device.capacity.components();
    let avail = device.available.components();
    let demand = job.demand.components();
    let score: f64 = (0..3)
        .map(|j| weights.0[j] * (demand[j] / cap[j]) * (avail[j] / cap[j]))
        .sum();
    Ok(score.clamp(0.0, 1.0))
}

/// Participation fairness of device `k` for job `m` after `rounds` scheduling rounds.
///
/// Counts are normalised to frequencies `s / max(1, rounds)`. The squared
/// deviation from the fleet-mean frequency is charged only to devices above
/// the mean, so under-selected devices keep the full score of 1 and are
/// preferred over over-selected ones. The result is clamped to [0, 1].
pub fn fairness_score(ledger: &ParticipationLedger, k: DeviceId, m: JobId, rounds: u32) -> f64 {
    let fleet = ledger.devices();
    if fleet == 0 {
        return 1.0;
    }
    let mean = (0..fleet)
        .map(|i| ledger.frequency(i, m, rounds))
        .sum::<f64>()
        / fleet as f64;
    let excess = (ledger.frequency(k, m, rounds) - mean).max(0.0);
    (1.0 - excess * excess).clamp(0.0, 1.0)
}

/// `(alpha * resource + beta * fairness) / (alpha + beta)`.
pub fn alignment_score(resource_term: f64, fairness_term: f64, w: &ScoreWeights) -> f64 {
    (w.alpha * resource_term + w.beta * fairness_term) / (w.alpha + w.beta)
}

/// Devices that may serve `job` right now: eligible, free, and holding data for it.
pub fn candidates<'a>(
    job: &JobSpec,
    fleet: &'a [DeviceProfile],
    occupied: &BTreeSet<DeviceId>,
) -> Vec<&'a DeviceProfile> {
    fleet
        .iter()
        .filter(|d| !occupied.contains(&d.id) && d.holds_data_for(job.id) && eligible(d, job))
        .collect()
}

pub(crate) fn ensure_enough(job: &JobSpec, needed: usize, available: usize) -> Result<()> {
    if available < needed {
        return Err(Error::Starved {
            job: job.id,
            needed,
            available,
            shortfall: needed - available,
        });
    }
    Ok(())
}

/// Scores every candidate device for `job` in round `rounds + 1`.
pub fn score_candidates(
    job: &JobSpec,
    fleet: &[DeviceProfile],
    occupied: &BTreeSet<DeviceId>,
    ledger: &ParticipationLedger,
    weights: &ScoreWeights,
    resource_weights: &ResourceWeights,
    rounds: u32,
) -> Result<Vec<ScoreBreakdown>> {
    candidates(job, fleet, occupied)
        .into_iter()
        .map(|d| {
            let resource_term = resource_alignment(d, job, resource_weights)?;
            let fairness_term = fairness_score(ledger, d.id, job.id, rounds);
            Ok(ScoreBreakdown {
                device_id: d.id,
                job_id: job.id,
                resource_term,
                fairness_term,
                combined: alignment_score(resource_term, fairness_term, weights),
            })
        })
        .collect()
}

/// Sorts `(device, score)` pairs by descending score, lower id first on ties,
/// and returns the first `n` ids.
pub(crate) fn top_n(mut scored: Vec<(DeviceId, f64)>, n: usize) -> Vec<DeviceId> {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.into_iter().take(n).map(|(id, _)| id).collect()
}

/// Picks the `round(C_m * K)` eligible, unoccupied devices with the highest
/// alignment scores. `rounds` is the number of rounds already issued for the job.
pub fn fedact_select(
    job: &JobSpec,
    fleet: &[DeviceProfile],
    occupied: &BTreeSet<DeviceId>,
    ledger: &ParticipationLedger,
    weights: &ScoreWeights,
    rounds: u32,
) -> Result<SchedulingPlan> {
    fedact_select_weighted(job, fleet, occupied, ledger, weights, &ResourceWeights::default(), rounds)
}

pub fn fedact_select_weighted(
    job: &JobSpec,
    fleet: &[DeviceProfile],
    occupied: &BTreeSet<DeviceId>,
    ledger: &ParticipationLedger,
    weights: &ScoreWeights,
    resource_weights: &ResourceWeights,
    rounds: u32,
) -> Result<SchedulingPlan> {
    let needed = job.plan_size(fleet.len());
    let scores = score_candidates(job, fleet, occupied, ledger, weights, resource_weights, rounds)?;
    ensure_enough(job, needed, scores.len())?;
    let selected = top_n(scores.iter().map(|s| (s.device_id, s.combined)).collect(), needed);
    Ok(SchedulingPlan {
        job_id: job.id,
        round: rounds + 1,
        selected,
    })
}
