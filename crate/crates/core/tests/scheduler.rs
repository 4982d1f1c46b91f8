use std::collections::BTreeSet;

use fedact::baselines::{genetic_search, greedy_select, random_select, GeneticParams};
use fedact::model::{DeviceProfile, JobSpec, ParticipationLedger, ResourceVector, SchedulingPlan};
use fedact::scheduler::{
    alignment_score, fairness_score, fedact_select, resource_alignment, score_candidates, ResourceWeights, ScoreWeights,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn device_strategy(id: usize) -> impl Strategy<Value = DeviceProfile> {
    (1.0f64..10.0, 512.0f64..8192.0, 5.0f64..100.0, 0.0f64..0.3).prop_map(move |(c, m, b, load)| {
        let capacity = ResourceVector::new(c, m, b);
        DeviceProfile {
            id,
            capacity,
            available: ResourceVector::from_components(capacity.components().map(|x| x * (1.0 - load))),
            alpha: 1e-4,
            mu: 1.0,
            data_sizes: vec![],
        }
    })
}

fn fleet_strategy(max: usize) -> impl Strategy<Value = Vec<DeviceProfile>> {
    (2..=max).prop_flat_map(|k| (0..k).map(device_strategy).collect::<Vec<_>>())
}

fn job_strategy() -> impl Strategy<Value = JobSpec> {
    (0.1f64..0.7, 16.0f64..350.0, 0.5f64..3.5, 0.05f64..=1.0).prop_map(|(c, m, b, f)| {
        let mut j = JobSpec::new(0, ResourceVector::new(c, m, b));
        j.fraction = f;
        j
    })
}

fn ledger_from(picks: &[Vec<bool>], k: usize) -> ParticipationLedger {
    let mut ledger = ParticipationLedger::new(k, 1);
    for (r, row) in picks.iter().enumerate() {
        let selected = (0..k).filter(|&i| row.get(i).copied().unwrap_or(false)).collect();
        ledger.record(&SchedulingPlan { job_id: 0, round: r as u32 + 1, selected });
    }
    ledger
}

proptest! {
    #[test]
    fn scores_stay_in_unit_interval(
        fleet in fleet_strategy(20),
        job in job_strategy(),
        picks in prop::collection::vec(prop::collection::vec(any::<bool>(), 20), 0..8),
        alpha in 0.0f64..5.0,
        beta in 0.01f64..5.0,
    ) {
        let ledger = ledger_from(&picks, fleet.len());
        let w = ScoreWeights::new(alpha, beta).unwrap();
        let scores = score_candidates(&job, &fleet, &BTreeSet::new(), &ledger, &w, &ResourceWeights::default(), ledger.rounds_started(0)).unwrap();
        prop_assert_eq!(scores.len(), fleet.len());
        for s in scores {
            prop_assert!((0.0..=1.0).contains(&s.resource_term));
            prop_assert!((0.0..=1.0).contains(&s.fairness_term));
            prop_assert!((0.0..=1.0).contains(&s.combined));
        }
    }

    #[test]
    fn alignment_is_invariant_to_joint_rescaling(
        fleet in fleet_strategy(6),
        job in job_strategy(),
        scale in prop::array::uniform3(0.1f64..10.0),
    ) {
        let w = ResourceWeights::default();
        let scaled_job = JobSpec {
            demand: ResourceVector::from_components(std::array::from_fn(|j| job.demand.components()[j] * scale[j])),
            ..job.clone()
        };
        for d in &fleet {
            let mut scaled = d.clone();
            scaled.capacity = ResourceVector::from_components(std::array::from_fn(|j| d.capacity.components()[j] * scale[j]));
            scaled.available = ResourceVector::from_components(std::array::from_fn(|j| d.available.components()[j] * scale[j]));
            let a = resource_alignment(d, &job, &w).unwrap();
            let b = resource_alignment(&scaled, &scaled_job, &w).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn more_availability_never_lowers_alignment(
        d in device_strategy(0),
        job in job_strategy(),
        extra in 0.0f64..1.0,
    ) {
        let w = ResourceWeights::default();
        let mut freer = d.clone();
        freer.available = ResourceVector::from_components(std::array::from_fn(|j| {
            let (a, c) = (d.available.components()[j], d.capacity.components()[j]);
            a + (c - a) * extra
        }));
        prop_assert!(resource_alignment(&freer, &job, &w).unwrap() >= resource_alignment(&d, &job, &w).unwrap() - 1e-15);
    }

    #[test]
    fn zero_beta_ranks_by_resource_term_only(
        fleet in fleet_strategy(15),
        job in job_strategy(),
        picks in prop::collection::vec(prop::collection::vec(any::<bool>(), 15), 0..6),
    ) {
        let ledger = ledger_from(&picks, fleet.len());
        let w = ScoreWeights::new(0.8, 0.0).unwrap();
        for s in score_candidates(&job, &fleet, &BTreeSet::new(), &ledger, &w, &ResourceWeights::default(), ledger.rounds_started(0)).unwrap() {
            prop_assert!((s.combined - s.resource_term).abs() < 1e-15);
        }
    }

    #[test]
    fn every_scheduler_respects_size_and_occupancy(
        fleet in fleet_strategy(20),
        job in job_strategy(),
        busy in prop::collection::vec(any::<bool>(), 20),
        seed in any::<u64>(),
    ) {
        let k = fleet.len();
        let needed = job.plan_size(k);
        let mut occupied = BTreeSet::new();
        for (i, &b) in busy.iter().enumerate().take(k) {
            if b && occupied.len() + needed < k {
                occupied.insert(i);
            }
        }
        let ledger = ParticipationLedger::new(k, 1);
        let plans = [
            fedact_select(&job, &fleet, &occupied, &ledger, &ScoreWeights::default(), 0).unwrap(),
            greedy_select(&job, &fleet, &occupied, &ledger, 0.5, 0).unwrap(),
            random_select(&job, &fleet, &occupied, 1, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap(),
            genetic_search(&job, &fleet, &occupied, &GeneticParams { seed, generations: 5, ..GeneticParams::default() }).unwrap().plan,
        ];
        for plan in plans {
            let set: BTreeSet<_> = plan.selected.iter().copied().collect();
            prop_assert_eq!(set.len(), needed);
            prop_assert!(set.is_disjoint(&occupied));
        }
    }

    #[test]
    fn fairness_prefers_less_used_devices(
        picks in prop::collection::vec(prop::collection::vec(any::<bool>(), 8), 1..10),
    ) {
        let ledger = ledger_from(&picks, 8);
        let r = ledger.rounds_started(0);
        for a in 0..8 {
            for b in 0..8 {
                if ledger.count(a, 0) <= ledger.count(b, 0) {
                    prop_assert!(fairness_score(&ledger, a, 0, r) >= fairness_score(&ledger, b, 0, r));
                }
            }
        }
    }
}

#[test]
fn combined_score_interpolates() {
    let w = ScoreWeights::new(1.0, 1.0).unwrap();
    assert_eq!(alignment_score(0.2, 0.6, &w), 0.4);
    assert_eq!(alignment_score(0.2, 0.6, &ScoreWeights::new(1.0, 0.0).unwrap()), 0.2);
    assert_eq!(alignment_score(0.2, 0.6, &ScoreWeights::new(0.0, 3.0).unwrap()), 0.6);
}
