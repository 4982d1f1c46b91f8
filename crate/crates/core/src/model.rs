//! Domain types shared by the schedulers, the engine and the workloads, plus
//! reproducible generation of heterogeneous device fleets.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Domain};

pub type DeviceId = usize;
pub type JobId = usize;

/// Compute (abstract units), memory (MB) and bandwidth (Mbps).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceVector {
    pub compute: f64,
    pub memory: f64,
    pub bandwidth: f64,
}

impl ResourceVector {
    pub const ZERO: ResourceVector = ResourceVector {
        compute: 0.0,
        memory: 0.0,
        bandwidth: 0.0,
    };

    pub const NAMES: [&'static str; 3] = ["compute", "memory", "bandwidth"];

    pub fn new(compute: f64, memory: f64, bandwidth: f64) -> Self {
        Self {
            compute,
            memory,
            bandwidth,
        }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.compute, self.memory, self.bandwidth]
    }

    pub fn from_components(c: [f64; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    /// True iff every component of `self` is at least the matching component of `other`.
    pub fn covers(&self, other: &ResourceVector) -> bool {
        self.components()
            .iter()
            .zip(other.components())
            .all(|(a, b)| *a >= b)
    }

    pub fn is_valid_quantity(&self) -> bool {
        self.components().iter().all(|v| v.is_finite() && *v >= 0.0)
    }

    pub fn is_valid_capacity(&self) -> bool {
        self.components().iter().all(|v| v.is_finite() && *v > 0.0)
    }
}

impl fmt::Display for ResourceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(compute={}, memory={}MB, bandwidth={}Mbps)",
            self.compute, self.memory, self.bandwidth
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceProfile {
    pub id: DeviceId,
    pub capacity: ResourceVector,
    pub available: ResourceVector,
    /// Seconds per (epoch * sample): the deterministic floor of the execution time.
    pub alpha: f64,
    /// Fluctuation rate of the exponential tail.
    pub mu: f64,
    /// Local sample count per job, indexed by job id.
    pub data_sizes: Vec<usize>,
}

impl DeviceProfile {
    pub fn data_size(&self, job: JobId) -> Option<usize> {
        self.data_sizes.get(job).copied()
    }

    /// A device is excluded from a job when it is known to hold no samples for it.
    pub fn holds_data_for(&self, job: JobId) -> bool {
        self.data_size(job).is_none_or(|d| d > 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub id: JobId,
    /// Minimum per-device resource requirement.
    pub demand: ResourceVector,
    /// Fraction of the fleet selected each round, in (0, 1].
    pub fraction: f64,
    pub max_rounds: u32,
    pub target_loss: f64,
    pub local_epochs: u32,
    pub batch_size: usize,
    /// Accuracy threshold for time-to-target reporting.
    pub target_accuracy: Option<f64>,
}

impl JobSpec {
    pub fn new(id: JobId, demand: ResourceVector) -> Self {
        Self {
            id,
            demand,
            fraction: 0.1,
            max_rounds: 50,
            target_loss: 0.0,
            local_epochs: 5,
            batch_size: 32,
            target_accuracy: None,
        }
    }

    /// Devices per round: `round(fraction * K)` with a floor of one.
    pub fn plan_size(&self, fleet_size: usize) -> usize {
        ((self.fraction * fleet_size as f64).round() as usize).max(1)
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(Error::config(
                format!("{field}.fraction_Cm"),
                format!("must lie in (0, 1], got {}", self.fraction),
            ));
        }
        if !self.demand.is_valid_quantity() {
            return Err(Error::config(
                format!("{field}.demand"),
                "components must be finite and non-negative",
            ));
        }
        if self.max_rounds == 0 {
            return Err(Error::config(
                format!("{field}.max_rounds_Rm"),
                "must be positive",
            ));
        }
        if !(self.target_loss.is_finite() && self.target_loss >= 0.0) {
            return Err(Error::config(
                format!("{field}.target_loss_lm"),
                "must be finite and non-negative",
            ));
        }
        if self.local_epochs == 0 {
            return Err(Error::config(
                format!("{field}.local_epochs_tau"),
                "must be positive",
            ));
        }
        if self.batch_size == 0 {
            return Err(Error::config(
                format!("{field}.batch_size"),
                "must be positive",
            ));
        }
        if let Some(acc) = self.target_accuracy {
            if !(0.0..=1.0).contains(&acc) {
                return Err(Error::config(
                    format!("{field}.target_accuracy"),
                    "must lie in [0, 1]",
                ));
            }
        }
        Ok(())
    }
}

/// True iff the device's current availability covers the job's demand.
pub fn eligible(device: &DeviceProfile, job: &JobSpec) -> bool {
    device.available.covers(&job.demand)
}

/// Closed interval used for sampling fleet parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn validate_positive(&self, field: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::config(field, "bounds must be finite"));
        }
        if self.min <= 0.0 {
            return Err(Error::config(
                field,
                format!("minimum must be > 0, got {}", self.min),
            ));
        }
        if self.min > self.max {
            return Err(Error::config(
                field,
                format!("minimum {} exceeds maximum {}", self.min, self.max),
            ));
        }
        Ok(())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.min == self.max {
            self.min
        } else {
            rng.gen_range(self.min..=self.max)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FleetRanges {
    pub compute: Range,
    pub memory: Range,
    pub bandwidth: Range,
    pub alpha: Range,
    pub mu: Range,
}

impl Default for FleetRanges {
    fn default() -> Self {
        Self {
            compute: Range::new(1.0, 10.0),
            memory: Range::new(512.0, 8192.0),
            bandwidth: Range::new(5.0, 100.0),
            alpha: Range::new(0.5e-4, 5e-4),
            mu: Range::new(0.5, 5.0),
        }
    }
}

impl FleetRanges {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        self.compute.validate_positive(&format!("{prefix}compute"))?;
        self.memory.validate_positive(&format!("{prefix}memory"))?;
        self.bandwidth
            .validate_positive(&format!("{prefix}bandwidth"))?;
        self.alpha.validate_positive(&format!("{prefix}alpha"))?;
        self.mu.validate_positive(&format!("{prefix}mu"))?;
        Ok(())
    }
}

/// A homogeneous group of devices sharing sampling ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSpec {
    pub devices: usize,
    pub ranges: FleetRanges,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FleetSpec {
    pub clusters: Vec<ClusterSpec>,
    /// Static background load, as a fraction of capacity, sampled per device and component.
    pub background_load: Range,
}

impl FleetSpec {
    pub fn uniform(devices: usize, ranges: FleetRanges) -> Self {
        Self {
            clusters: vec![ClusterSpec { devices, ranges }],
            background_load: Range::new(0.0, 0.3),
        }
    }

    pub fn size(&self) -> usize {
        self.clusters.iter().map(|c| c.devices).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.clusters.is_empty() || self.size() == 0 {
            return Err(Error::config("fleet.devices", "fleet must contain at least one device"));
        }
        for (i, cluster) in self.clusters.iter().enumerate() {
            let prefix = if self.clusters.len() == 1 {
                "fleet.".to_string()
            } else {
                format!("fleet.clusters[{i}].")
            };
            if cluster.devices == 0 {
                return Err(Error::config(format!("{prefix}devices"), "must be positive"));
            }
            cluster.ranges.validate(&prefix)?;
        }
        let load = self.background_load;
        if !(load.min >= 0.0 && load.min <= load.max && load.max < 1.0) {
            return Err(Error::config(
                "fleet.background_load",
                "bounds must satisfy 0 <= min <= max < 1",
            ));
        }
        Ok(())
    }

    /// Samples capacities and speeds, then applies the static background load.
    pub fn build(&self, seed: u64) -> Result<Vec<DeviceProfile>> {
        self.validate()?;
        let mut fleet = Vec::with_capacity(self.size());
        for (index, cluster) in self.clusters.iter().enumerate() {
            sample_devices(&mut fleet, index as u64, cluster.devices, &cluster.ranges, seed);
        }
        apply_background_load(&mut fleet, self.background_load, seed)?;
        Ok(fleet)
    }
}

fn sample_devices(
    out: &mut Vec<DeviceProfile>,
    stream: u64,
    count: usize,
    ranges: &FleetRanges,
    seed: u64,
) {
    let mut rng = rng::substream(seed, Domain::Fleet, stream, 0, 0);
    for _ in 0..count {
        let capacity = ResourceVector::new(
            ranges.compute.sample(&mut rng),
            ranges.memory.sample(&mut rng),
            ranges.bandwidth.sample(&mut rng),
        );
        out.push(DeviceProfile {
            id: out.len(),
            capacity,
            available: capacity,
            alpha: ranges.alpha.sample(&mut rng),
            mu: ranges.mu.sample(&mut rng),
            data_sizes: Vec::new(),
        });
    }
}

/// Generates `k` devices with uniformly sampled capacities and speed
/// parameters. Availability equals capacity; see [`apply_background_load`].
pub fn generate_fleet(k: usize, ranges: &FleetRanges, seed: u64) -> Result<Vec<DeviceProfile>> {
    if k == 0 {
        return Err(Error::config("fleet.devices", "must be at least 1"));
    }
    ranges.validate("fleet.")?;
    let mut fleet = Vec::with_capacity(k);
    sample_devices(&mut fleet, 0, k, ranges, seed);
    Ok(fleet)
}

/// Reduces each device's availability by a per-component load fraction drawn
/// uniformly from `load`.
pub fn apply_background_load(fleet: &mut [DeviceProfile], load: Range, seed: u64) -> Result<()> {
    if !(load.min >= 0.0 && load.min <= load.max && load.max < 1.0) {
        return Err(Error::config(
            "fleet.background_load",
            "bounds must satisfy 0 <= min <= max < 1",
        ));
    }
    for device in fleet.iter_mut() {
        let mut rng = rng::substream(seed, Domain::BackgroundLoad, device.id as u64, 0, 0);
        let cap = device.capacity.components();
        let mut avail = [0.0; 3];
        for (a, c) in avail.iter_mut().zip(cap) {
            *a = c * (1.0 - load.sample(&mut rng).max(0.0));
        }
        device.available = ResourceVector::from_components(avail);
    }
    Ok(())
}

/// Participation counts `s[k][m]` and the number of scheduling rounds issued per job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticipationLedger {
    counts: Vec<Vec<u32>>,
    rounds_started: Vec<u32>,
}

impl ParticipationLedger {
    pub fn new(devices: usize, jobs: usize) -> Self {
        Self {
            counts: vec![vec![0; jobs]; devices],
            rounds_started: vec![0; jobs],
        }
    }

    pub fn devices(&self) -> usize {
        self.counts.len()
    }

    pub fn jobs(&self) -> usize {
        self.rounds_started.len()
    }

    pub fn count(&self, device: DeviceId, job: JobId) -> u32 {
        self.counts[device][job]
    }

    pub fn rounds_started(&self, job: JobId) -> u32 {
        self.rounds_started[job]
    }

    /// Participation counts of every device for one job.
    pub fn job_counts(&self, job: JobId) -> Vec<u32> {
        self.counts.iter().map(|row| row[job]).collect()
    }

    /// Participation frequency `s / max(1, r)` given the number of rounds issued.
    pub fn frequency(&self, device: DeviceId, job: JobId, rounds: u32) -> f64 {
        f64::from(self.count(device, job)) / f64::from(rounds.max(1))
    }

    /// Increments the count of each selected device and the job's round counter.
    pub fn record(&mut self, plan: &SchedulingPlan) {
        for &k in &plan.selected {
            self.counts[k][plan.job_id] += 1;
        }
        self.rounds_started[plan.job_id] += 1;
    }
}

/// Functional form of [`ParticipationLedger::record`].
pub fn update_ledger(mut ledger: ParticipationLedger, plan: &SchedulingPlan) -> ParticipationLedger {
    ledger.record(plan);
    ledger
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchedulingPlan {
    pub job_id: JobId,
    pub round: u32,
    /// Selected device ids, in selection order.
    pub selected: Vec<DeviceId>,
}

impl SchedulingPlan {
    pub fn sorted_devices(&self) -> Vec<DeviceId> {
        let mut ids = self.selected.clone();
        ids.sort_unstable();
        ids
    }
}
