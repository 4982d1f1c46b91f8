//! Runs every (scheduler, seed) replication of an experiment in parallel.

use rayon::prelude::*;

use crate::config::{SchedulerName, SchedulerSection};
use crate::engine::{run_simulation, Scenario, SimResult};

/// One replication. A replication that aborted keeps its error message
/// instead of a result so the rest of the sweep is still reported.
#[derive(Debug, Clone)]
pub struct Replication {
    pub scheduler: SchedulerName,
    pub seed: u64,
    pub outcome: Result<SimResult, String>,
}

impl Replication {
    /// True when the replication finished and none of its jobs failed.
    pub fn is_ok(&self) -> bool {
        match &self.outcome {
            Ok(r) => r.jobs.iter().all(|j| j.status.is_ok()),
            Err(_) => false,
        }
    }
}

/// Results come back ordered by scheduler name, then seed, regardless of the
/// order in which worker threads finish.
pub fn run_experiment(
    scenario: &Scenario,
    section: &SchedulerSection,
    schedulers: &[SchedulerName],
    seeds: &[u64],
) -> Vec<Replication> {
    let mut names = schedulers.to_vec();
    names.sort();
    names.dedup();
    let pairs: Vec<(SchedulerName, u64)> = names
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| (n, s)))
        .collect();
    let mut out: Vec<Replication> = pairs
        .par_iter()
        .map(|&(name, seed)| {
            let choice = section.choice(name);
            let outcome = run_simulation(scenario, &choice, seed).map_err(|e| e.to_string());
            match &outcome {
                Ok(r) => log::info!("{name} seed {seed}: average JCT {:.3}s", r.average_jct),
                Err(e) => log::error!("{name} seed {seed}: {e}"),
            }
            Replication {
                scheduler: name,
                seed,
                outcome,
            }
        })
        .collect();
    out.sort_by_key(|r| (r.scheduler, r.seed));
    out
}
