//! Federated training workloads driven by the engine: FedAvg over softmax
//! regression on synthetic data, or a closed-form loss surrogate for fast sweeps.

pub mod classifier;
pub mod dataset;
pub mod partition;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use classifier::{aggregate, client_update, evaluate, loss_and_gradient, ModelState};
pub use dataset::{generate_dataset, SyntheticDataset};
pub use partition::{partition, PartitionMode};

use crate::error::{Error, Result};
use crate::model::{DeviceId, JobSpec};
use crate::rng::{self, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkloadMode {
    Real,
    Surrogate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadConfig {
    pub mode: WorkloadMode,
    pub samples: usize,
    pub features: usize,
    pub classes: usize,
    pub cluster_spread: f64,
    pub learning_rate: f64,
    pub holdout_fraction: f64,
    pub partition: PartitionMode,
    pub surrogate_decay: f64,
    pub surrogate_floor: f64,
}

impl Default for WorkloadConfig {
    fn default() -> Self {
        Self {
            mode: WorkloadMode::Real,
            samples: 5000,
            features: 16,
            classes: 10,
            cluster_spread: 1.0,
            learning_rate: 0.05,
            holdout_fraction: 0.2,
            partition: PartitionMode::Iid,
            surrogate_decay: 0.3,
            surrogate_floor: 0.1,
        }
    }
}

impl WorkloadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::config("workload.learning_rate", "must be finite and > 0"));
        }
        if !(self.surrogate_decay > 0.0 && self.surrogate_decay < 1.0) {
            return Err(Error::config("workload.surrogate_decay", "must lie in (0, 1)"));
        }
        if !(self.surrogate_floor.is_finite() && self.surrogate_floor >= 0.0) {
            return Err(Error::config("workload.surrogate_floor", "must be finite and >= 0"));
        }
        if self.mode == WorkloadMode::Surrogate && self.surrogate_floor >= (self.classes as f64).ln() {
            return Err(Error::config(
                "workload.surrogate_floor",
                "must be below the initial loss ln(classes)",
            ));
        }
        Ok(())
    }
}

/// One surrogate training round: the gap to `floor` shrinks by
/// `decay * coverage`, where coverage is the fraction of classes held by the
/// round's participants.
pub fn surrogate_progress(current_loss: f64, coverage: f64, decay: f64, floor: f64) -> f64 {
    let coverage = coverage.clamp(0.0, 1.0);
    floor + (current_loss - floor).max(0.0) * (1.0 - decay * coverage)
}

#[derive(Debug, Clone)]
enum Model {
    Real(ModelState),
    Surrogate { loss: f64 },
}

/// A job's data, device shards and current global model.
#[derive(Debug, Clone)]
pub struct JobWorkload {
    train: SyntheticDataset,
    test: SyntheticDataset,
    shards: Vec<Vec<usize>>,
    shard_classes: Vec<BTreeSet<usize>>,
    model: Model,
    config: WorkloadConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundOutcome {
    pub loss: f64,
    pub accuracy: f64,
}

impl JobWorkload {
    /// Builds the dataset and device partition for `job_id` from the root seed.
    pub fn build(config: &WorkloadConfig, devices: usize, job_id: usize, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut data_rng = rng::substream(seed, Domain::Dataset, job_id as u64, 0, 0);
        let full = generate_dataset(
            config.samples,
            config.features,
            config.classes,
            config.cluster_spread,
            &mut data_rng,
        )?;
        let (train, test) = full.split_holdout(config.holdout_fraction)?;
        let mut part_rng = rng::substream(seed, Domain::Partition, job_id as u64, 0, 0);
        let shards = partition(&train.labels, train.classes, devices, config.partition, &mut part_rng)?;
        let shard_classes = shards
            .iter()
            .map(|s| s.iter().map(|&i| train.labels[i]).collect())
            .collect();
        let model = match config.mode {
            WorkloadMode::Real => Model::Real(ModelState::zeros(
                config.features,
                config.classes,
                config.learning_rate,
            )),
            WorkloadMode::Surrogate => Model::Surrogate {
                loss: (config.classes as f64).ln(),
            },
        };
        Ok(Self {
            train,
            test,
            shards,
            shard_classes,
            model,
            config: config.clone(),
        })
    }

    pub fn shard_sizes(&self) -> Vec<usize> {
        self.shards.iter().map(Vec::len).collect()
    }

    pub fn shard(&self, device: DeviceId) -> &[usize] {
        &self.shards[device]
    }

    pub fn train_set(&self) -> &SyntheticDataset {
        &self.train
    }

    pub fn test_set(&self) -> &SyntheticDataset {
        &self.test
    }

    /// Fraction of classes present in the union of the devices' shards.
    pub fn class_coverage(&self, devices: &[DeviceId]) -> f64 {
        let held: BTreeSet<usize> = devices
            .iter()
            .flat_map(|&k| self.shard_classes[k].iter().copied())
            .collect();
        held.len() as f64 / self.config.classes as f64
    }

    fn surrogate_accuracy(&self, loss: f64) -> f64 {
        let c = self.config.classes as f64;
        let initial = c.ln();
        let floor = self.config.surrogate_floor;
        let progress = ((initial - loss) / (initial - floor)).clamp(0.0, 1.0);
        1.0 / c + (1.0 - 1.0 / c) * progress
    }

    /// Local training on every selected device, sample-weighted aggregation,
    /// and evaluation on the held-out split.
    pub fn run_round(&mut self, job: &JobSpec, selected: &[DeviceId], seed: u64, round: u32) -> Result<RoundOutcome> {
        if selected.is_empty() {
            return Err(Error::Empty("round participants"));
        }
        for &k in selected {
            if self.shards[k].is_empty() {
                return Err(Error::NoData { device: k, job: job.id });
            }
        }
        match &mut self.model {
            Model::Real(state) => {
                let mut updates = Vec::with_capacity(selected.len());
                for &k in selected {
                    let mut r = rng::substream(seed, Domain::Training, job.id as u64, round as u64, k as u64);
                    let params = client_update(
                        state,
                        &self.train,
                        &self.shards[k],
                        job.local_epochs,
                        job.batch_size,
                        &mut r,
                    )
                    .map_err(|e| Error::Divergence(format!("job {} round {round} device {k}: {e}", job.id)))?;
                    updates.push((params, self.shards[k].len()));
                }
                state.parameters = aggregate(&updates)?;
                let (loss, accuracy) = evaluate(&state.parameters, &self.test)?;
                if !loss.is_finite() {
                    return Err(Error::Divergence(format!(
                        "job {} round {round}: non-finite held-out loss",
                        job.id
                    )));
                }
                Ok(RoundOutcome { loss, accuracy })
            }
            Model::Surrogate { loss } => {
                let coverage = {
                    let held: BTreeSet<usize> = selected
                        .iter()
                        .flat_map(|&k| self.shard_classes[k].iter().copied())
                        .collect();
                    held.len() as f64 / self.config.classes as f64
                };
                *loss = surrogate_progress(*loss, coverage, self.config.surrogate_decay, self.config.surrogate_floor);
                let loss = *loss;
                Ok(RoundOutcome {
                    loss,
                    accuracy: self.surrogate_accuracy(loss),
                })
            }
        }
    }
}
