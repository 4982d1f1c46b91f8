//! Comparison schedulers: uniform random, greedy with a participation
//! penalty, a genetic subset search, and sequential single-job execution.

use std::collections::BTreeSet;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{DeviceId, DeviceProfile, JobId, JobSpec, ParticipationLedger, SchedulingPlan};
use crate::scheduler::{candidates, ensure_enough, resource_alignment, top_n, ResourceWeights};

/// Uniform sample without replacement of the eligible, unoccupied devices.
pub fn random_select<R: Rng + ?Sized>(
    job: &JobSpec,
    fleet: &[DeviceProfile],
    occupied: &BTreeSet<DeviceId>,
    round: u32,
    rng: &mut R,
) -> Result<SchedulingPlan> {
    let pool = candidates(job, fleet, occupied);
    let needed = job.plan_size(fleet.len());
    ensure_enough(job, needed, pool.len())?;
    let selected = index::sample(rng, pool.len(), needed)
        .into_iter()
        .map(|i| pool[i].id)
        .collect();
    Ok(SchedulingPlan {
        job_id: job.id,
        round,
        selected,
    })
}

/// Repeatedly takes the candidate maximising
/// `resource_alignment - lambda * frequency` until the plan is full.
pub fn greedy_select(
    job: &JobSpec,
    fleet: &[DeviceProfile],
    occupied: &BTreeSet<DeviceId>,
    ledger: &ParticipationLedger,
    lambda: f64,
    rounds: u32,
) -> Result<SchedulingPlan> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::config("scheduler.lambda", "must be finite and >= 0"));
    }
    let weights = ResourceWeights::default();
    let needed = job.plan_size(fleet.len());
    let mut pool = candidates(job, fleet, occupied)
        .into_iter()
        .map(|d| {
            let adjusted =
                resource_alignment(d, job, &weights)? - lambda * ledger.frequency(d.id, job.id, rounds);
            Ok((d.id, adjusted))
        })
        .collect::<Result<Vec<_>>>()?;
    ensure_enough(job, needed, pool.len())?;

    let mut selected = Vec::with_capacity(needed);
    while selected.len() < needed {
        let best = pool
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .expect("pool holds at least `needed` devices");
        selected.push(pool.swap_remove(best).0);
    }
    Ok(SchedulingPlan {
        job_id: job.id,
        round: rounds + 1,
        selected,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneticParams {
    pub population_size: usize,
    pub generations: usize,
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    pub tournament_size: usize,
    pub seed: u64,
}

impl Default for GeneticParams {
    fn default() -> Self {
        Self {
            population_size: 20,
            generations: 30,
            mutation_rate: 0.1,
            crossover_rate: 0.8,
            tournament_size: 3,
            seed: 0,
        }
    }
}

impl GeneticParams {
    pub fn validate(&self) -> Result<()> {
        let field = |f: &str| format!("scheduler.genetic.{f}");
        if self.population_size == 0 {
            return Err(Error::config(field("population_size"), "must be positive"));
        }
        if self.crossover_rate > 0.0 && self.population_size < 2 {
            return Err(Error::config(
                field("population_size"),
                "must be >= 2 when crossover is enabled",
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::config(field("mutation_rate"), "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::config(field("crossover_rate"), "must lie in [0, 1]"));
        }
        if self.tournament_size == 0 {
            return Err(Error::config(field("tournament_size"), "must be positive"));
        }
        Ok(())
    }
}

/// Result of a genetic search, with the elite fitness after every generation
/// (index 0 is the initial population).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneticOutcome {
    pub plan: SchedulingPlan,
    pub fitness: f64,
    pub best_per_generation: Vec<f64>,
}

struct Search<'a> {
    scores: &'a [f64],
    size: usize,
    rng: ChaCha8Rng,
}

impl Search<'_> {
    fn fitness(&self, genes: &[usize]) -> f64 {
        genes.iter().map(|&g| self.scores[g]).sum()
    }

    fn random_individual(&mut self) -> Vec<usize> {
        let mut genes = index::sample(&mut self.rng, self.scores.len(), self.size).into_vec();
        genes.sort_unstable();
        genes
    }

    /// Drops duplicates and tops the subset up with random outsiders.
    fn repair(&mut self, mut genes: Vec<usize>) -> Vec<usize> {
        genes.sort_unstable();
        genes.dedup();
        genes.truncate(self.size);
        while genes.len() < self.size {
            let g = self.rng.gen_range(0..self.scores.len());
            if let Err(pos) = genes.binary_search(&g) {
                genes.insert(pos, g);
            }
        }
        genes
    }

    fn tournament<'p>(&mut self, pop: &'p [(Vec<usize>, f64)], k: usize) -> &'p Vec<usize> {
        let mut best: Option<usize> = None;
        for _ in 0..k {
            let i = self.rng.gen_range(0..pop.len());
            best = match best {
                Some(b) if pop[b].1 >= pop[i].1 => Some(b),
                _ => Some(i),
            };
        }
        &pop[best.expect("tournament size is positive")].0
    }

    fn crossover(&mut self, a: &[usize], b: &[usize]) -> Vec<usize> {
        let mut union: Vec<usize> = a.iter().chain(b).copied().collect();
        union.sort_unstable();
        union.dedup();
        union.shuffle(&mut self.rng);
        union.truncate(self.size);
        self.repair(union)
    }

    fn mutate(&mut self, genes: Vec<usize>, rate: f64) -> Vec<usize> {
        if self.scores.len() == self.size {
            return genes;
        }
        let mut out = genes.clone();
        for slot in out.iter_mut() {
            if self.rng.gen::<f64>() < rate {
                loop {
                    let g = self.rng.gen_range(0..self.scores.len());
                    if !genes.contains(&g) {
                        *slot = g;
                        break;
                    }
                }
            }
        }
        self.repair(out)
    }
}

/// Genetic search over fixed-size subsets of the candidate devices, maximising
/// the summed resource alignment. The initial population holds the greedy
/// (top-alignment) subset plus random subsets, and the best individual always
/// survives into the next generation.
pub fn genetic_search(
    job: &JobSpec,
    fleet: &[DeviceProfile],
    occupied: &BTreeSet<DeviceId>,
    params: &GeneticParams,
) -> Result<GeneticOutcome> {
    params.validate()?;
    let weights = ResourceWeights::default();
    let pool = candidates(job, fleet, occupied);
    let needed = job.plan_size(fleet.len());
    ensure_enough(job, needed, pool.len())?;
    let scores = pool
        .iter()
        .map(|d| resource_alignment(d, job, &weights))
        .collect::<Result<Vec<_>>>()?;

    let mut search = Search {
        scores: &scores,
        size: needed,
        rng: ChaCha8Rng::seed_from_u64(params.seed),
    };

    let mut greedy = top_n(scores.iter().copied().enumerate().collect(), needed);
    greedy.sort_unstable();
    let mut population: Vec<(Vec<usize>, f64)> = Vec::with_capacity(params.population_size);
    let f = search.fitness(&greedy);
    population.push((greedy, f));
    while population.len() < params.population_size {
        let genes = search.random_individual();
        let f = search.fitness(&genes);
        population.push((genes, f));
    }

    let elite = |pop: &[(Vec<usize>, f64)]| {
        pop.iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.1.total_cmp(&b.1).then(ib.cmp(ia)))
            .map(|(i, _)| i)
            .expect("population is non-empty")
    };

    let mut best_idx = elite(&population);
    let mut history = vec![population[best_idx].1];
    for _ in 0..params.generations {
        let mut next = Vec::with_capacity(params.population_size);
        next.push(population[best_idx].clone());
        while next.len() < params.population_size {
            let a = search.tournament(&population, params.tournament_size).clone();
            let child = if search.rng.gen::<f64>() < params.crossover_rate {
                let b = search.tournament(&population, params.tournament_size).clone();
                search.crossover(&a, &b)
            } else {
                a
            };
            let child = search.mutate(child, params.mutation_rate);
            let f = search.fitness(&child);
            next.push((child, f));
        }
        population = next;
        best_idx = elite(&population);
        history.push(population[best_idx].1);
    }

    let (genes, fitness) = population.swap_remove(best_idx);
    Ok(GeneticOutcome {
        plan: SchedulingPlan {
            job_id: job.id,
            round: 0,
            selected: genes.into_iter().map(|g| pool[g].id).collect(),
        },
        fitness,
        best_per_generation: history,
    })
}

pub fn genetic_select(
    job: &JobSpec,
    fleet: &[DeviceProfile],
    occupied: &BTreeSet<DeviceId>,
    params: &GeneticParams,
) -> Result<SchedulingPlan> {
    genetic_search(job, fleet, occupied, params).map(|o| o.plan)
}

/// Execution order of the single-job baseline: submission order.
pub fn sequential_plan(jobs: &[JobSpec]) -> Vec<JobId> {
    jobs.iter().map(|j| j.id).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ResourceVector;
    use crate::scheduler::{fedact_select, ScoreWeights};

    fn dev(id: DeviceId, avail: f64) -> DeviceProfile {
        DeviceProfile {
            id,
            capacity: ResourceVector::new(10.0, 10.0, 10.0),
            available: ResourceVector::new(avail, avail, avail),
            alpha: 1e-4,
            mu: 1.0,
            data_sizes: vec![],
        }
    }

    fn job_for(plan: usize, fleet: usize, demand: f64) -> JobSpec {
        let mut j = JobSpec::new(0, ResourceVector::new(demand, demand, demand));
        j.fraction = plan as f64 / fleet as f64;
        j
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn random_forced_and_exhaustive_choices() {
        let fleet: Vec<_> = (0..4).map(|i| dev(i, if i == 3 { 9.0 } else { 1.0 })).collect();
        let plan = random_select(&job_for(1, 4, 5.0), &fleet, &BTreeSet::new(), 1, &mut rng(1)).unwrap();
        assert_eq!(plan.selected, vec![3]);

        let fleet: Vec<_> = (0..10).map(|i| dev(i, 9.0)).collect();
        let plan = random_select(&job_for(10, 10, 5.0), &fleet, &BTreeSet::new(), 1, &mut rng(1)).unwrap();
        assert_eq!(plan.sorted_devices(), (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn random_is_deterministic_under_seed() {
        let fleet: Vec<_> = (0..30).map(|i| dev(i, 9.0)).collect();
        let j = job_for(5, 30, 1.0);
        let a = random_select(&j, &fleet, &BTreeSet::new(), 1, &mut rng(9)).unwrap();
        let b = random_select(&j, &fleet, &BTreeSet::new(), 1, &mut rng(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_reports_starvation() {
        let fleet: Vec<_> = (0..3).map(|i| dev(i, 9.0)).collect();
        let occupied: BTreeSet<_> = [0, 1].into_iter().collect();
        let err = random_select(&job_for(2, 3, 1.0), &fleet, &occupied, 1, &mut rng(0)).unwrap_err();
        assert!(matches!(err, Error::Starved { shortfall: 1, .. }));
    }

    #[test]
    fn greedy_without_penalty_matches_alignment_only_fedact() {
        let fleet: Vec<_> = [9.0, 5.5, 7.0, 8.0, 6.0].iter().enumerate().map(|(i, &a)| dev(i, a)).collect();
        let j = job_for(3, 5, 5.0);
        let mut ledger = ParticipationLedger::new(5, 1);
        ledger.record(&SchedulingPlan { job_id: 0, round: 1, selected: vec![0, 3] });
        let g = greedy_select(&j, &fleet, &BTreeSet::new(), &ledger, 0.0, 1).unwrap();
        let f = fedact_select(&j, &fleet, &BTreeSet::new(), &ledger, &ScoreWeights::new(1.0, 0.0).unwrap(), 1)
            .unwrap();
        assert_eq!(g.sorted_devices(), f.sorted_devices());
    }

    #[test]
    fn greedy_penalty_prefers_fresh_devices() {
        let fleet: Vec<_> = (0..2).map(|i| dev(i, 8.0)).collect();
        let j = job_for(1, 2, 5.0);
        let mut ledger = ParticipationLedger::new(2, 1);
        for _ in 0..5 {
            ledger.record(&SchedulingPlan { job_id: 0, round: 0, selected: vec![0] });
        }
        let plan = greedy_select(&j, &fleet, &BTreeSet::new(), &ledger, 0.3, 5).unwrap();
        assert_eq!(plan.selected, vec![1]);
    }

    #[test]
    fn greedy_adjusted_scores_example() {
        // Demand 9 against capacity c with availability c gives alignment 9 / c.
        let fleet: Vec<_> = [10.0, 11.25, 90.0 / 7.0, 15.0]
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut d = dev(i, c);
                d.capacity = ResourceVector::new(c, c, c);
                d
            })
            .collect();
        let j = job_for(2, 4, 9.0);
        let w = ResourceWeights::default();
        for (d, want) in fleet.iter().zip([0.9, 0.8, 0.7, 0.6]) {
            assert!((resource_alignment(d, &j, &w).unwrap() - want).abs() < 1e-12);
        }
        // Two rounds with devices 0 and 3 each picked once: frequencies (0.5, 0, 0, 0.5).
        let mut ledger = ParticipationLedger::new(4, 1);
        ledger.record(&SchedulingPlan { job_id: 0, round: 1, selected: vec![0] });
        ledger.record(&SchedulingPlan { job_id: 0, round: 2, selected: vec![3] });
        let plan = greedy_select(&j, &fleet, &BTreeSet::new(), &ledger, 0.5, 2).unwrap();
        assert_eq!(plan.selected, vec![1, 2]);
    }

    #[test]
    fn genetic_singleton_search_space() {
        let fleet: Vec<_> = (0..4).map(|i| dev(i, if i % 2 == 0 { 9.0 } else { 1.0 })).collect();
        let j = job_for(2, 4, 5.0);
        let plan = genetic_select(&j, &fleet, &BTreeSet::new(), &GeneticParams::default()).unwrap();
        assert_eq!(plan.sorted_devices(), vec![0, 2]);
    }

    #[test]
    fn genetic_zero_generations_keeps_greedy() {
        let fleet: Vec<_> = (0..12).map(|i| dev(i, 5.0 + i as f64 * 0.4)).collect();
        let j = job_for(4, 12, 5.0);
        let params = GeneticParams { generations: 0, ..GeneticParams::default() };
        let out = genetic_search(&j, &fleet, &BTreeSet::new(), &params).unwrap();
        let greedy = greedy_select(&j, &fleet, &BTreeSet::new(), &ParticipationLedger::new(12, 1), 0.0, 0)
            .unwrap();
        let w = ResourceWeights::default();
        let greedy_fit: f64 = greedy
            .selected
            .iter()
            .map(|&k| resource_alignment(&fleet[k], &j, &w).unwrap())
            .sum();
        assert!(out.fitness >= greedy_fit - 1e-12);
        assert_eq!(out.best_per_generation.len(), 1);
    }

    #[test]
    fn genetic_elite_never_regresses() {
        let fleet: Vec<_> = (0..20).map(|i| dev(i, 5.0 + ((i * 7) % 11) as f64 * 0.4)).collect();
        let j = job_for(5, 20, 5.0);
        let params = GeneticParams { seed: 11, generations: 40, ..GeneticParams::default() };
        let out = genetic_search(&j, &fleet, &BTreeSet::new(), &params).unwrap();
        assert!(out.best_per_generation.windows(2).all(|w| w[1] >= w[0]));
        let distinct: BTreeSet<_> = out.plan.selected.iter().collect();
        assert_eq!(distinct.len(), 5);
    }

    #[test]
    fn genetic_params_validation() {
        let p = GeneticParams { population_size: 1, ..GeneticParams::default() };
        assert!(p.validate().is_err());
        let p = GeneticParams { population_size: 1, crossover_rate: 0.0, ..GeneticParams::default() };
        assert!(p.validate().is_ok());
        let p = GeneticParams { mutation_rate: 1.5, ..GeneticParams::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn sequential_order_is_submission_order() {
        let jobs: Vec<_> = (0..3).map(|i| JobSpec::new(i, ResourceVector::ZERO)).collect();
        assert_eq!(sequential_plan(&jobs), vec![0, 1, 2]);
    }
}
