//! TOML experiment configuration.
//!
//! Parsing is strict: unknown keys are rejected. Every value that falls back
//! to a default is logged and listed in [`ExperimentConfig::defaults_applied`].
//! The full schema is documented in `docs/config.md`.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::baselines::GeneticParams;
use crate::engine::{Scenario, SchedulerChoice};
use crate::error::{Error, Result};
use crate::model::{ClusterSpec, FleetRanges, FleetSpec, JobSpec, Range, ResourceVector};
use crate::scheduler::{ResourceWeights, ScoreWeights};
use crate::workload::{PartitionMode, WorkloadConfig, WorkloadMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchedulerName {
    FedAct,
    Genetic,
    Greedy,
    Random,
    Sequential,
}

impl SchedulerName {
    pub const ALL: [SchedulerName; 5] = [
        SchedulerName::FedAct,
        SchedulerName::Genetic,
        SchedulerName::Greedy,
        SchedulerName::Random,
        SchedulerName::Sequential,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SchedulerName::FedAct => "fedact",
            SchedulerName::Genetic => "genetic",
            SchedulerName::Greedy => "greedy",
            SchedulerName::Random => "random",
            SchedulerName::Sequential => "sequential",
        }
    }

    /// Parses one name, or `all` for every scheduler.
    pub fn parse_list(s: &str) -> Result<Vec<SchedulerName>> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" => Ok(Self::ALL.to_vec()),
            "fedact" => Ok(vec![SchedulerName::FedAct]),
            "genetic" => Ok(vec![SchedulerName::Genetic]),
            "greedy" => Ok(vec![SchedulerName::Greedy]),
            "random" => Ok(vec![SchedulerName::Random]),
            "sequential" => Ok(vec![SchedulerName::Sequential]),
            other => Err(Error::config(
                "scheduler.name",
                format!("unknown scheduler `{other}` (expected fedact, random, greedy, genetic, sequential or all)"),
            )),
        }
    }
}

impl Display for SchedulerName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchedulerSection {
    pub names: Vec<SchedulerName>,
    pub weights: ScoreWeights,
    pub lambda: f64,
    pub genetic: GeneticParams,
}

impl SchedulerSection {
    pub fn choice(&self, name: SchedulerName) -> SchedulerChoice {
        match name {
            SchedulerName::FedAct => SchedulerChoice::FedAct(self.weights),
            SchedulerName::Random => SchedulerChoice::Random,
            SchedulerName::Greedy => SchedulerChoice::Greedy { lambda: self.lambda },
            SchedulerName::Genetic => SchedulerChoice::Genetic(self.genetic.clone()),
            SchedulerName::Sequential => SchedulerChoice::Sequential,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub seeds: Vec<u64>,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub scheduler: SchedulerSection,
    pub run: RunSection,
    /// `field = value` for every default that was filled in.
    pub defaults_applied: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    fleet: RawFleet,
    jobs: Vec<RawJob>,
    scheduler: Option<RawScheduler>,
    workload: Option<RawWorkload>,
    run: Option<RawRun>,
}

#[derive(Debug, Default)]
struct RawRanges {
    compute: Option<[f64; 2]>,
    memory: Option<[f64; 2]>,
    bandwidth: Option<[f64; 2]>,
    alpha: Option<[f64; 2]>,
    mu: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFleet {
    devices: Option<usize>,
    background_load: Option<[f64; 2]>,
    compute: Option<[f64; 2]>,
    memory: Option<[f64; 2]>,
    bandwidth: Option<[f64; 2]>,
    alpha: Option<[f64; 2]>,
    mu: Option<[f64; 2]>,
    clusters: Option<Vec<RawCluster>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCluster {
    devices: usize,
    compute: Option<[f64; 2]>,
    memory: Option<[f64; 2]>,
    bandwidth: Option<[f64; 2]>,
    alpha: Option<[f64; 2]>,
    mu: Option<[f64; 2]>,
}

impl RawFleet {
    fn ranges(&self) -> RawRanges {
        RawRanges {
            compute: self.compute,
            memory: self.memory,
            bandwidth: self.bandwidth,
            alpha: self.alpha,
            mu: self.mu,
        }
    }
}

impl RawCluster {
    fn ranges(&self) -> RawRanges {
        RawRanges {
            compute: self.compute,
            memory: self.memory,
            bandwidth: self.bandwidth,
            alpha: self.alpha,
            mu: self.mu,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    id: Option<usize>,
    demand: Option<ResourceVector>,
    #[serde(rename = "fraction_Cm")]
    fraction: Option<f64>,
    #[serde(rename = "max_rounds_Rm")]
    max_rounds: Option<u32>,
    #[serde(rename = "target_loss_lm")]
    target_loss: Option<f64>,
    #[serde(rename = "local_epochs_tau")]
    local_epochs: Option<u32>,
    batch_size: Option<usize>,
    target_accuracy: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScheduler {
    name: Option<String>,
    alpha: Option<f64>,
    beta: Option<f64>,
    lambda: Option<f64>,
    resource_weights: Option<[f64; 3]>,
    genetic: Option<RawGenetic>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenetic {
    population_size: Option<usize>,
    generations: Option<usize>,
    mutation_rate: Option<f64>,
    crossover_rate: Option<f64>,
    tournament_size: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWorkload {
    mode: Option<WorkloadMode>,
    samples: Option<usize>,
    features: Option<usize>,
    classes: Option<usize>,
    cluster_spread: Option<f64>,
    learning_rate: Option<f64>,
    holdout_fraction: Option<f64>,
    partition: Option<PartitionMode>,
    surrogate_decay: Option<f64>,
    surrogate_floor: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    seeds: Option<Vec<u64>>,
    output: Option<PathBuf>,
}

/// Fills defaults and records which ones were used.
struct Defaults(Vec<String>);

impl Defaults {
    fn take<T: std::fmt::Debug>(&mut self, field: &str, value: Option<T>, default: T) -> T {
        value.unwrap_or_else(|| {
            let note = format!("{field} = {default:?}");
            log::info!("default applied: {note}");
            self.0.push(note);
            default
        })
    }

    fn range(&mut self, field: &str, value: Option<[f64; 2]>, default: Range) -> Range {
        let [min, max] = self.take(field, value, [default.min, default.max]);
        Range::new(min, max)
    }

    fn ranges(&mut self, prefix: &str, raw: &RawRanges, base: &FleetRanges) -> FleetRanges {
        FleetRanges {
            compute: self.range(&format!("{prefix}compute"), raw.compute, base.compute),
            memory: self.range(&format!("{prefix}memory"), raw.memory, base.memory),
            bandwidth: self.range(&format!("{prefix}bandwidth"), raw.bandwidth, base.bandwidth),
            alpha: self.range(&format!("{prefix}alpha"), raw.alpha, base.alpha),
            mu: self.range(&format!("{prefix}mu"), raw.mu, base.mu),
        }
    }
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::config(
            "config",
            format!("cannot read {}: {e}", path.display()),
        )
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut d = Defaults(Vec::new());

    // Fleet.
    let base = d.ranges("fleet.", &raw.fleet.ranges(), &FleetRanges::default());
    let clusters = match &raw.fleet.clusters {
        Some(list) if !list.is_empty() => {
            let clusters: Vec<ClusterSpec> = list
                .iter()
                .enumerate()
                .map(|(i, c)| ClusterSpec {
                    devices: c.devices,
                    ranges: d.ranges(&format!("fleet.clusters[{i}]."), &c.ranges(), &base),
                })
                .collect();
            let total: usize = clusters.iter().map(|c| c.devices).sum();
            if let Some(k) = raw.fleet.devices {
                if k != total {
                    return Err(Error::config(
                        "fleet.devices",
                        format!("is {k} but the clusters hold {total} devices"),
                    ));
                }
            }
            clusters
        }
        _ => {
            let k = raw
                .fleet
                .devices
                .ok_or_else(|| Error::config("fleet.devices", "required when no clusters are given"))?;
            vec![ClusterSpec { devices: k, ranges: base }]
        }
    };
    let fleet = FleetSpec {
        clusters,
        background_load: d.range("fleet.background_load", raw.fleet.background_load, Range::new(0.0, 0.3)),
    };
    fleet.validate()?;

    // Jobs.
    if raw.jobs.is_empty() {
        return Err(Error::config("jobs", "at least one job is required"));
    }
    let template = JobSpec::new(0, ResourceVector::new(1.0, 256.0, 1.0));
    let mut jobs = Vec::with_capacity(raw.jobs.len());
    for (i, rj) in raw.jobs.iter().enumerate() {
        let p = format!("jobs[{i}]");
        let job = JobSpec {
            id: rj.id.unwrap_or(i),
            demand: d.take(&format!("{p}.demand"), rj.demand, template.demand),
            fraction: d.take(&format!("{p}.fraction_Cm"), rj.fraction, template.fraction),
            max_rounds: d.take(&format!("{p}.max_rounds_Rm"), rj.max_rounds, template.max_rounds),
            target_loss: d.take(&format!("{p}.target_loss_lm"), rj.target_loss, template.target_loss),
            local_epochs: d.take(&format!("{p}.local_epochs_tau"), rj.local_epochs, template.local_epochs),
            batch_size: d.take(&format!("{p}.batch_size"), rj.batch_size, template.batch_size),
            target_accuracy: rj.target_accuracy,
        };
        job.validate(&p)?;
        if let Some(prev) = jobs.last().map(|j: &JobSpec| j.id) {
            if job.id <= prev {
                return Err(Error::config(format!("{p}.id"), "job ids must be strictly increasing"));
            }
        }
        let k = fleet.size();
        if job.plan_size(k) > k {
            return Err(Error::config(format!("{p}.fraction_Cm"), "selects more devices than the fleet holds"));
        }
        let max_capacity = fleet.clusters.iter().fold([0.0f64; 3], |acc, c| {
            [
                acc[0].max(c.ranges.compute.max),
                acc[1].max(c.ranges.memory.max),
                acc[2].max(c.ranges.bandwidth.max),
            ]
        });
        if !ResourceVector::from_components(max_capacity).covers(&job.demand) {
            return Err(Error::config(
                format!("{p}.demand"),
                format!("{} exceeds every device's maximum capacity", job.demand),
            ));
        }
        jobs.push(job);
    }

    // Scheduler.
    let rs = raw.scheduler.unwrap_or_default();
    let name = d.take("scheduler.name", rs.name, "fedact".to_string());
    let names = SchedulerName::parse_list(&name)?;
    let weights = ScoreWeights::new(
        d.take("scheduler.alpha", rs.alpha, 0.7),
        d.take("scheduler.beta", rs.beta, 0.3),
    )?;
    let lambda = d.take("scheduler.lambda", rs.lambda, 0.3);
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::config("scheduler.lambda", "must be finite and >= 0"));
    }
    let resource_weights = ResourceWeights(d.take(
        "scheduler.resource_weights",
        rs.resource_weights,
        ResourceWeights::default().0,
    ));
    resource_weights.validate()?;
    let rg = rs.genetic.unwrap_or_default();
    let gd = GeneticParams::default();
    let genetic = GeneticParams {
        population_size: d.take("scheduler.genetic.population_size", rg.population_size, gd.population_size),
        generations: d.take("scheduler.genetic.generations", rg.generations, gd.generations),
        mutation_rate: d.take("scheduler.genetic.mutation_rate", rg.mutation_rate, gd.mutation_rate),
        crossover_rate: d.take("scheduler.genetic.crossover_rate", rg.crossover_rate, gd.crossover_rate),
        tournament_size: d.take("scheduler.genetic.tournament_size", rg.tournament_size, gd.tournament_size),
        seed: d.take("scheduler.genetic.seed", rg.seed, gd.seed),
    };
    genetic.validate()?;

    // Workload.
    let rw = raw.workload.unwrap_or_default();
    let wd = WorkloadConfig::default();
    let workload = WorkloadConfig {
        mode: d.take("workload.mode", rw.mode, wd.mode),
        samples: d.take("workload.samples", rw.samples, wd.samples),
        features: d.take("workload.features", rw.features, wd.features),
        classes: d.take("workload.classes", rw.classes, wd.classes),
        cluster_spread: d.take("workload.cluster_spread", rw.cluster_spread, wd.cluster_spread),
        learning_rate: d.take("workload.learning_rate", rw.learning_rate, wd.learning_rate),
        holdout_fraction: d.take("workload.holdout_fraction", rw.holdout_fraction, wd.holdout_fraction),
        partition: d.take("workload.partition", rw.partition, wd.partition),
        surrogate_decay: d.take("workload.surrogate_decay", rw.surrogate_decay, wd.surrogate_decay),
        surrogate_floor: d.take("workload.surrogate_floor", rw.surrogate_floor, wd.surrogate_floor),
    };
    workload.validate()?;
    if workload.classes < 2 {
        return Err(Error::config("workload.classes", "must be at least 2"));
    }
    if workload.features == 0 {
        return Err(Error::config("workload.features", "must be at least 1"));
    }
    if workload.samples < workload.classes {
        return Err(Error::config("workload.samples", "must be at least the class count"));
    }

    // Run.
    let rr = raw.run.unwrap_or_default();
    let seeds = d.take("run.seeds", rr.seeds, vec![1]);
    if seeds.is_empty() {
        return Err(Error::config("run.seeds", "must list at least one seed"));
    }
    let output = d.take("run.output", rr.output, PathBuf::from("results"));

    Ok(ExperimentConfig {
        scenario: Scenario {
            fleet,
            jobs,
            workload,
            resource_weights,
        },
        scheduler: SchedulerSection {
            names,
            weights,
            lambda,
            genetic,
        },
        run: RunSection { seeds, output },
        defaults_applied: d.0,
    })
}
