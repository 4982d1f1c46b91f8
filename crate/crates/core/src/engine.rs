//! Discrete-event core of the simulator.
//!
//! Jobs run synchronous FedAvg rounds (a round lasts as long as its slowest
//! device) while different jobs proceed independently of each other. A device
//! belongs to at most one in-flight round at any instant; jobs that cannot fill
//! their plan wait for the next device release and retry.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::baselines::{genetic_select, greedy_select, random_select, sequential_plan, GeneticParams};
use crate::error::{Error, Result};
use crate::model::{DeviceId, DeviceProfile, FleetSpec, JobId, JobSpec, ParticipationLedger, SchedulingPlan};
use crate::rng::{self, Domain};
use crate::scheduler::{candidates, fedact_select_weighted, ResourceWeights, ScoreWeights};
use crate::workload::{JobWorkload, WorkloadConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum SchedulerChoice {
    FedAct(ScoreWeights),
    Random,
    Greedy { lambda: f64 },
    Genetic(GeneticParams),
    Sequential,
}

impl SchedulerChoice {
    pub fn name(&self) -> &'static str {
        match self {
            SchedulerChoice::FedAct(_) => "fedact",
            SchedulerChoice::Random => "random",
            SchedulerChoice::Greedy { .. } => "greedy",
            SchedulerChoice::Genetic(_) => "genetic",
            SchedulerChoice::Sequential => "sequential",
        }
    }
}

/// Everything a replication needs apart from the scheduler and the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub fleet: FleetSpec,
    pub jobs: Vec<JobSpec>,
    pub workload: WorkloadConfig,
    pub resource_weights: ResourceWeights,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SimOptions {
    /// Keep a log of every dispatch and release.
    pub record_trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    RoundComplete,
    JobDone,
    ScheduleRetry,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEvent {
    pub time: f64,
    pub job_id: JobId,
    pub kind: EventKind,
}

impl Eq for SimEvent {}

impl Ord for SimEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.job_id.cmp(&other.job_id))
            .then(self.kind.cmp(&other.kind))
    }
}

impl PartialOrd for SimEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub job_id: JobId,
    /// One-based round number.
    pub round: u32,
    pub selected: Vec<DeviceId>,
    pub start_time: f64,
    pub round_duration: f64,
    pub global_loss: f64,
    pub global_accuracy: f64,
    /// Simulated time at which the round completed.
    pub cumulative_time: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JobStatus {
    Ok,
    Failed(String),
}

impl JobStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, JobStatus::Ok)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobResult {
    pub job_id: JobId,
    pub jct: f64,
    pub status: JobStatus,
    pub rounds: Vec<RoundRecord>,
    pub time_to_target: Option<f64>,
}

impl JobResult {
    pub fn final_accuracy(&self) -> Option<f64> {
        self.rounds.last().map(|r| r.global_accuracy)
    }

    pub fn final_loss(&self) -> Option<f64> {
        self.rounds.last().map(|r| r.global_loss)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    Dispatch,
    Release,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub time: f64,
    pub job_id: JobId,
    pub kind: TraceKind,
    pub devices: Vec<DeviceId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub scheduler: String,
    pub seed: u64,
    pub jobs: Vec<JobResult>,
    pub average_jct: f64,
    pub events_processed: usize,
    /// Final participation counts, `participation[job][device]`.
    pub participation: Vec<Vec<u32>>,
    pub trace: Vec<TraceEntry>,
}

/// Draws one execution time from the shifted exponential model: a floor of
/// `tau * alpha * D` plus an exponential tail with rate `mu / (tau * D)`.
pub fn sample_execution_time<R: Rng + ?Sized>(
    device: &DeviceProfile,
    job: &JobSpec,
    rng: &mut R,
) -> Result<f64> {
    let samples = match device.data_size(job.id) {
        Some(d) if d > 0 => d as f64,
        _ => {
            return Err(Error::NoData {
                device: device.id,
                job: job.id,
            })
        }
    };
    let work = f64::from(job.local_epochs) * samples;
    let floor = work * device.alpha;
    let tail = Exp::new(device.mu / work)
        .map_err(|e| Error::config(format!("fleet.device[{}].mu", device.id), e.to_string()))?;
    Ok(floor + tail.sample(rng))
}

/// Slowest sampled execution time among the plan's devices.
pub fn round_duration(plan: &SchedulingPlan, job: &JobSpec, fleet: &[DeviceProfile], seed: u64) -> Result<f64> {
    let mut longest = 0.0f64;
    for &k in &plan.selected {
        let mut r = rng::substream(seed, Domain::Execution, job.id as u64, u64::from(plan.round), k as u64);
        longest = longest.max(sample_execution_time(&fleet[k], job, &mut r)?);
    }
    Ok(longest)
}

/// Executes one synchronous round starting at `start_time`. Aggregation adds no time.
pub fn run_round(
    job: &JobSpec,
    plan: &SchedulingPlan,
    fleet: &[DeviceProfile],
    seed: u64,
    workload: &mut JobWorkload,
    start_time: f64,
) -> Result<RoundRecord> {
    if plan.selected.is_empty() {
        return Err(Error::Empty("scheduling plan"));
    }
    let duration = round_duration(plan, job, fleet, seed)?;
    let outcome = workload.run_round(job, &plan.selected, seed, plan.round)?;
    Ok(RoundRecord {
        job_id: job.id,
        round: plan.round,
        selected: plan.selected.clone(),
        start_time,
        round_duration: duration,
        global_loss: outcome.loss,
        global_accuracy: outcome.accuracy,
        cumulative_time: start_time + duration,
    })
}

/// Completion time of the first round whose accuracy reaches `target`.
pub fn time_to_target(history: &[RoundRecord], target: f64) -> Option<f64> {
    history
        .iter()
        .find(|r| r.global_accuracy >= target)
        .map(|r| r.cumulative_time)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsSummary {
    pub jct: Vec<f64>,
    pub average_jct: f64,
    pub time_to_target: Vec<Option<f64>>,
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// JCT per job (completion time of its last round), their mean, and
/// time-to-target per job.
pub fn compute_metrics(histories: &[Vec<RoundRecord>], targets: &[Option<f64>]) -> Result<MetricsSummary> {
    if histories.is_empty() {
        return Err(Error::Empty("round histories"));
    }
    let jct: Vec<f64> = histories
        .iter()
        .map(|h| h.last().map_or(0.0, |r| r.cumulative_time))
        .collect();
    let time_to_target = histories
        .iter()
        .enumerate()
        .map(|(i, h)| targets.get(i).copied().flatten().and_then(|t| time_to_target(h, t)))
        .collect();
    Ok(MetricsSummary {
        average_jct: mean(&jct),
        jct,
        time_to_target,
    })
}

#[derive(Debug)]
enum Phase {
    /// Waiting for its turn under sequential execution.
    Queued,
    /// Has asked for devices and will be served by a pending ScheduleRetry.
    Requesting,
    /// Could not fill its plan; retries at the next release.
    Starved { shortfall: usize },
    Running {
        plan: SchedulingPlan,
        outcome: std::result::Result<RoundRecord, String>,
    },
    Done,
}

struct JobRun {
    spec: JobSpec,
    workload: JobWorkload,
    phase: Phase,
    history: Vec<RoundRecord>,
    status: JobStatus,
    finished_at: Option<f64>,
}

struct Simulation<'a> {
    scheduler: &'a SchedulerChoice,
    resource_weights: ResourceWeights,
    seed: u64,
    fleet: Vec<DeviceProfile>,
    jobs: Vec<JobRun>,
    /// Position of each job id in `jobs`.
    index: BTreeMap<JobId, usize>,
    ledger: ParticipationLedger,
    occupied: BTreeMap<DeviceId, JobId>,
    queue: BinaryHeap<Reverse<SimEvent>>,
    now: f64,
    events: usize,
    trace: Option<Vec<TraceEntry>>,
    sequence: Vec<JobId>,
}

impl Simulation<'_> {
    fn push(&mut self, time: f64, job_id: JobId, kind: EventKind) {
        self.queue.push(Reverse(SimEvent { time, job_id, kind }));
    }

    fn occupied_set(&self) -> BTreeSet<DeviceId> {
        self.occupied.keys().copied().collect()
    }

    fn select(&self, pos: usize) -> Result<SchedulingPlan> {
        let job = &self.jobs[pos].spec;
        let rounds = self.ledger.rounds_started(job.id);
        let round = rounds + 1;
        let occupied = self.occupied_set();
        let plan = match self.scheduler {
            SchedulerChoice::FedAct(w) => fedact_select_weighted(
                job,
                &self.fleet,
                &occupied,
                &self.ledger,
                w,
                &self.resource_weights,
                rounds,
            )?,
            SchedulerChoice::Random | SchedulerChoice::Sequential => {
                let mut r = rng::substream(self.seed, Domain::Selection, job.id as u64, u64::from(round), 0);
                random_select(job, &self.fleet, &occupied, round, &mut r)?
            }
            SchedulerChoice::Greedy { lambda } => {
                greedy_select(job, &self.fleet, &occupied, &self.ledger, *lambda, rounds)?
            }
            SchedulerChoice::Genetic(params) => {
                let params = GeneticParams {
                    seed: rng::derive_seed(self.seed ^ params.seed, Domain::Genetic, job.id as u64, u64::from(round), 0),
                    ..params.clone()
                };
                genetic_select(job, &self.fleet, &occupied, &params)?
            }
        };
        Ok(SchedulingPlan { round, ..plan })
    }

    /// Tries to start the next round of the job at `pos`.
    fn dispatch(&mut self, pos: usize) -> Result<()> {
        let plan = match self.select(pos) {
            Ok(plan) => plan,
            Err(Error::Starved { shortfall, .. }) => {
                self.jobs[pos].phase = Phase::Starved { shortfall };
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        let job_id = self.jobs[pos].spec.id;
        for &k in &plan.selected {
            let previous = self.occupied.insert(k, job_id);
            debug_assert!(
                previous.is_none(),
                "device {k} assigned to job {job_id} while serving job {previous:?}"
            );
        }
        self.ledger.record(&plan);
        if let Some(trace) = &mut self.trace {
            trace.push(TraceEntry {
                time: self.now,
                job_id,
                kind: TraceKind::Dispatch,
                devices: plan.selected.clone(),
            });
        }

        let run = &mut self.jobs[pos];
        let (outcome, end) = match run_round(&run.spec, &plan, &self.fleet, self.seed, &mut run.workload, self.now) {
            Ok(record) => {
                let end = record.cumulative_time;
                (Ok(record), end)
            }
            Err(Error::Divergence(msg)) => {
                let end = self.now + round_duration(&plan, &run.spec, &self.fleet, self.seed)?;
                (Err(msg), end)
            }
            Err(e) => return Err(e),
        };
        run.phase = Phase::Running { plan, outcome };
        self.push(end, job_id, EventKind::RoundComplete);
        Ok(())
    }

    fn complete_round(&mut self, pos: usize) -> Result<()> {
        let phase = std::mem::replace(&mut self.jobs[pos].phase, Phase::Requesting);
        let Phase::Running { plan, outcome } = phase else {
            unreachable!("round completion for a job that is not running");
        };
        for &k in &plan.selected {
            self.occupied.remove(&k);
        }
        let job_id = plan.job_id;
        if let Some(trace) = &mut self.trace {
            trace.push(TraceEntry {
                time: self.now,
                job_id,
                kind: TraceKind::Release,
                devices: plan.selected.clone(),
            });
        }

        let run = &mut self.jobs[pos];
        match outcome {
            Ok(record) => {
                let finished = record.global_loss <= run.spec.target_loss || record.round >= run.spec.max_rounds;
                run.history.push(record);
                if finished {
                    run.phase = Phase::Done;
                    self.push(self.now, job_id, EventKind::JobDone);
                } else {
                    self.push(self.now, job_id, EventKind::ScheduleRetry);
                }
            }
            Err(msg) => {
                run.status = JobStatus::Failed(msg);
                run.phase = Phase::Done;
                self.push(self.now, job_id, EventKind::JobDone);
            }
        }

        let starved: Vec<JobId> = self
            .jobs
            .iter()
            .filter(|j| matches!(j.phase, Phase::Starved { .. }))
            .map(|j| j.spec.id)
            .collect();
        for id in starved {
            self.jobs[self.index[&id]].phase = Phase::Requesting;
            self.push(self.now, id, EventKind::ScheduleRetry);
        }
        Ok(())
    }

    fn finish_job(&mut self, pos: usize) {
        self.jobs[pos].finished_at = Some(self.now);
        if matches!(self.scheduler, SchedulerChoice::Sequential) {
            let id = self.jobs[pos].spec.id;
            let next = self.sequence.iter().position(|&j| j == id).map(|i| i + 1);
            if let Some(&next_id) = next.and_then(|i| self.sequence.get(i)) {
                self.jobs[self.index[&next_id]].phase = Phase::Requesting;
                self.push(self.now, next_id, EventKind::ScheduleRetry);
            }
        }
    }

    fn state_dump(&self) -> String {
        let mut s = String::new();
        for j in &self.jobs {
            let phase = match &j.phase {
                Phase::Queued => "queued".to_string(),
                Phase::Requesting => "requesting".to_string(),
                Phase::Starved { shortfall } => format!("starved (short by {shortfall})"),
                Phase::Running { plan, .. } => format!("running round {}", plan.round),
                Phase::Done => "done".to_string(),
            };
            let _ = writeln!(
                s,
                "  job {}: {phase}, {} rounds completed, plan size {}",
                j.spec.id,
                j.history.len(),
                j.spec.plan_size(self.fleet.len())
            );
        }
        let _ = write!(s, "  occupied devices: {:?}", self.occupied.keys().collect::<Vec<_>>());
        s
    }

    fn run(&mut self) -> Result<()> {
        let initial: Vec<usize> = match self.scheduler {
            SchedulerChoice::Sequential => vec![self.index[&self.sequence[0]]],
            _ => (0..self.jobs.len()).collect(),
        };
        for pos in initial {
            self.dispatch(pos)?;
        }

        while let Some(Reverse(event)) = self.queue.pop() {
            debug_assert!(event.time >= self.now, "event time went backwards");
            self.now = event.time;
            self.events += 1;
            let pos = self.index[&event.job_id];
            match event.kind {
                EventKind::RoundComplete => self.complete_round(pos)?,
                EventKind::JobDone => self.finish_job(pos),
                EventKind::ScheduleRetry => {
                    if matches!(self.jobs[pos].phase, Phase::Requesting) {
                        self.dispatch(pos)?;
                    }
                }
            }
        }

        if self.jobs.iter().any(|j| j.finished_at.is_none()) {
            return Err(Error::Deadlock {
                time: self.now,
                dump: self.state_dump(),
            });
        }
        Ok(())
    }
}

fn validate_scenario(scenario: &Scenario, fleet: &[DeviceProfile]) -> Result<()> {
    if scenario.jobs.is_empty() {
        return Err(Error::config("jobs", "at least one job is required"));
    }
    scenario.resource_weights.validate()?;
    let mut seen = BTreeSet::new();
    for (i, job) in scenario.jobs.iter().enumerate() {
        let field = format!("jobs[{i}]");
        job.validate(&field)?;
        if !seen.insert(job.id) {
            return Err(Error::config(format!("{field}.id"), format!("duplicate job id {}", job.id)));
        }
        let needed = job.plan_size(fleet.len());
        if !fleet.iter().any(|d| d.capacity.covers(&job.demand)) {
            return Err(Error::config(
                format!("{field}.demand"),
                format!("{} exceeds the capacity of every device", job.demand),
            ));
        }
        let usable = candidates(job, fleet, &BTreeSet::new()).len();
        if usable < needed {
            return Err(Error::config(
                format!("{field}.demand"),
                format!("only {usable} devices can serve the job but each round needs {needed}"),
            ));
        }
    }
    Ok(())
}

pub fn run_simulation(scenario: &Scenario, scheduler: &SchedulerChoice, seed: u64) -> Result<SimResult> {
    run_simulation_with(scenario, scheduler, seed, &SimOptions::default())
}

/// Runs one replication to completion. The result is a pure function of
/// `(scenario, scheduler, seed)`.
pub fn run_simulation_with(
    scenario: &Scenario,
    scheduler: &SchedulerChoice,
    seed: u64,
    options: &SimOptions,
) -> Result<SimResult> {
    let mut fleet = scenario.fleet.build(seed)?;
    let k = fleet.len();
    let id_span = scenario.jobs.iter().map(|j| j.id + 1).max().unwrap_or(0);

    let mut jobs = Vec::with_capacity(scenario.jobs.len());
    for spec in &scenario.jobs {
        let workload = JobWorkload::build(&scenario.workload, k, spec.id, seed)?;
        jobs.push((spec.clone(), workload));
    }
    for device in fleet.iter_mut() {
        device.data_sizes = vec![0; id_span];
    }
    for (spec, workload) in &jobs {
        for (device, size) in fleet.iter_mut().zip(workload.shard_sizes()) {
            device.data_sizes[spec.id] = size;
        }
    }
    validate_scenario(scenario, &fleet)?;

    let mut order: Vec<(JobSpec, JobWorkload)> = jobs;
    order.sort_by_key(|(spec, _)| spec.id);
    let sequence = sequential_plan(&order.iter().map(|(s, _)| s.clone()).collect::<Vec<_>>());
    let sequential = matches!(scheduler, SchedulerChoice::Sequential);
    let runs: Vec<JobRun> = order
        .into_iter()
        .enumerate()
        .map(|(i, (spec, workload))| JobRun {
            spec,
            workload,
            phase: if sequential && i > 0 { Phase::Queued } else { Phase::Requesting },
            history: Vec::new(),
            status: JobStatus::Ok,
            finished_at: None,
        })
        .collect();
    let index = runs.iter().enumerate().map(|(i, j)| (j.spec.id, i)).collect();

    let mut sim = Simulation {
        scheduler,
        resource_weights: scenario.resource_weights,
        seed,
        fleet,
        jobs: runs,
        index,
        ledger: ParticipationLedger::new(k, id_span),
        occupied: BTreeMap::new(),
        queue: BinaryHeap::new(),
        now: 0.0,
        events: 0,
        trace: options.record_trace.then(Vec::new),
        sequence,
    };
    sim.run()?;

    let histories: Vec<Vec<RoundRecord>> = sim.jobs.iter().map(|j| j.history.clone()).collect();
    let targets: Vec<Option<f64>> = sim.jobs.iter().map(|j| j.spec.target_accuracy).collect();
    let metrics = compute_metrics(&histories, &targets)?;
    let results: Vec<JobResult> = sim
        .jobs
        .iter()
        .zip(metrics.time_to_target)
        .map(|(j, ttt)| JobResult {
            job_id: j.spec.id,
            jct: j.finished_at.unwrap_or(sim.now),
            status: j.status.clone(),
            rounds: j.history.clone(),
            time_to_target: ttt,
        })
        .collect();
    let jcts: Vec<f64> = results.iter().map(|r| r.jct).collect();
    Ok(SimResult {
        scheduler: scheduler.name().to_string(),
        seed,
        average_jct: mean(&jcts),
        participation: results.iter().map(|r| sim.ledger.job_counts(r.job_id)).collect(),
        jobs: results,
        events_processed: sim.events,
        trace: sim.trace.unwrap_or_default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ResourceVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn device(id: DeviceId, alpha: f64, mu: f64, data: usize) -> DeviceProfile {
        DeviceProfile {
            id,
            capacity: ResourceVector::new(10.0, 10.0, 10.0),
            available: ResourceVector::new(10.0, 10.0, 10.0),
            alpha,
            mu,
            data_sizes: vec![data],
        }
    }

    fn job(epochs: u32) -> JobSpec {
        let mut j = JobSpec::new(0, ResourceVector::ZERO);
        j.local_epochs = epochs;
        j
    }

    #[test]
    fn samples_respect_the_floor() {
        let d = device(0, 1e-4, 2.0, 600);
        let j = job(5);
        let mut r = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            assert!(sample_execution_time(&d, &j, &mut r).unwrap() >= 0.3);
        }
    }

    #[test]
    fn doubling_mu_halves_the_tail() {
        let j = job(5);
        let tail_mean = |mu: f64| {
            let d = device(0, 1e-4, mu, 600);
            let mut r = ChaCha8Rng::seed_from_u64(2);
            (0..100_000).map(|_| sample_execution_time(&d, &j, &mut r).unwrap() - 0.3).sum::<f64>() / 1e5
        };
        let ratio = tail_mean(2.0) / tail_mean(4.0);
        assert!((ratio - 2.0).abs() < 0.04, "ratio {ratio}");
    }

    #[test]
    fn empty_shard_cannot_be_timed() {
        let d = device(4, 1e-4, 2.0, 0);
        let err = sample_execution_time(&d, &job(1), &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, Error::NoData { device: 4, job: 0 }));
    }

    #[test]
    fn round_duration_is_the_slowest_member() {
        // Floors of 3 s and 7 s with a negligible tail (mean 1e-9 s).
        let fleet = vec![device(0, 3.0 / 1000.0, 1e12, 200), device(1, 7.0 / 1000.0, 1e12, 200)];
        let j = job(5);
        let both = SchedulingPlan { job_id: 0, round: 1, selected: vec![0, 1] };
        let d = round_duration(&both, &j, &fleet, 3).unwrap();
        assert!((d - 7.0).abs() < 1e-6, "{d}");
        let single = SchedulingPlan { job_id: 0, round: 1, selected: vec![0] };
        let mut r = rng::substream(3, Domain::Execution, 0, 1, 0);
        let expected = sample_execution_time(&fleet[0], &j, &mut r).unwrap();
        assert_eq!(round_duration(&single, &j, &fleet, 3).unwrap(), expected);
    }

    #[test]
    fn metrics_examples() {
        let rec = |t: f64, acc: f64| RoundRecord {
            job_id: 0,
            round: 1,
            selected: vec![],
            start_time: 0.0,
            round_duration: 1.0,
            global_loss: 1.0,
            global_accuracy: acc,
            cumulative_time: t,
        };
        let histories = vec![vec![rec(10.0, 0.5)], vec![rec(20.0, 0.5)], vec![rec(30.0, 0.5)]];
        let m = compute_metrics(&histories, &[None, None, None]).unwrap();
        assert_eq!(m.average_jct, 20.0);

        let trace = vec![rec(5.0, 0.4), rec(9.0, 0.6), rec(14.0, 0.8)];
        assert_eq!(time_to_target(&trace, 0.6), Some(9.0));
        assert_eq!(time_to_target(&trace, 0.99), None);
        assert!(compute_metrics(&[], &[]).is_err());
    }

    #[test]
    fn event_order_is_time_then_job_then_kind() {
        let mut heap = BinaryHeap::new();
        let ev = |time, job_id, kind| Reverse(SimEvent { time, job_id, kind });
        heap.push(ev(2.0, 0, EventKind::RoundComplete));
        heap.push(ev(1.0, 1, EventKind::RoundComplete));
        heap.push(ev(1.0, 0, EventKind::ScheduleRetry));
        heap.push(ev(1.0, 0, EventKind::RoundComplete));
        let order: Vec<_> = std::iter::from_fn(|| heap.pop().map(|Reverse(e)| (e.time, e.job_id, e.kind))).collect();
        assert_eq!(
            order,
            vec![
                (1.0, 0, EventKind::RoundComplete),
                (1.0, 0, EventKind::ScheduleRetry),
                (1.0, 1, EventKind::RoundComplete),
                (2.0, 0, EventKind::RoundComplete),
            ]
        );
    }
}
