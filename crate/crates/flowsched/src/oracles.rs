//! Reference schedules used to measure competitiveness.
//!
//! `srpt` is the clairvoyant shortest-remaining-processing-time rule, optimal
//! for uniform-weight flow time on one machine; it reads true processing
//! times by construction (it is an oracle, not a contestant).
//! `srpt_on_predictions` is the same rule keyed on predicted remaining time,
//! a legal non-clairvoyant policy and the usual naive baseline.
//! `optimal_weighted_small` is an exhaustive memoized search over unit time
//! slots, exact for small integer instances; a half-unit grid variant guards
//! the unit-slot granularity assumption empirically.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::model::{Instance, JobId};
use crate::rat::{rat, Rat};
use crate::sim::{
    simulate, JobView, Policy, PolicyError, PolicyEvent, SimError, SimOptions, SimResult,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has non-uniform weights; this oracle is unweighted")]
    WeightedInstance,
    #[error("instance exceeds the exhaustive oracle limits")]
    TooLarge,
    #[error("exhaustive oracle requires integer releases and processing times")]
    NonIntegerData,
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Step series of a reference run: pending count, pending weight and pending
/// volume right after each event time, plus the run's totals. The count and
/// weight are piecewise constant between events; the volume column is the
/// value sampled at the event.
#[derive(Debug, Clone)]
pub struct PendingSeries {
    steps: Vec<SeriesStep>,
    total_flow: Rat,
    n_jobs: u64,
    total_weight: Rat,
    end_time: Rat,
}

#[derive(Debug, Clone)]
pub struct SeriesStep {
    pub time: Rat,
    pub pending: u64,
    pub weight: Rat,
    pub volume: Rat,
}

impl PendingSeries {
    pub fn from_sim(result: &SimResult) -> Self {
        let mut steps: Vec<SeriesStep> = Vec::new();
        let mut released = 0u64;
        let mut total_weight = Rat::zero();
        let mut prev_weight = Rat::zero();
        for rec in &result.trace {
            if matches!(rec.kind, crate::sim::TraceKind::Release) {
                released += 1;
                // pending weight jumps only at releases
                total_weight += &rec.pending_weight - &prev_weight;
            }
            prev_weight = rec.pending_weight.clone();
            let step = SeriesStep {
                time: rec.time.clone(),
                pending: rec.pending_count,
                weight: rec.pending_weight.clone(),
                volume: rec.pending_volume.clone(),
            };
            match steps.last_mut() {
                Some(last) if last.time == step.time => *last = step,
                _ => steps.push(step),
            }
        }
        let end_time = steps.last().map(|s| s.time.clone()).unwrap_or_default();
        PendingSeries {
            steps,
            total_flow: result.flow_weighted.clone(),
            n_jobs: released,
            total_weight,
            end_time,
        }
    }

    /// Step-function lookup: the state right after the last event at or
    /// before `t` (zero state before the first event).
    pub fn at(&self, t: &Rat) -> (u64, Rat) {
        let idx = self.steps.partition_point(|s| s.time <= *t);
        if idx == 0 {
            (0, Rat::zero())
        } else {
            let s = &self.steps[idx - 1];
            (s.pending, s.weight.clone())
        }
    }

    pub fn steps(&self) -> &[SeriesStep] {
        &self.steps
    }

    pub fn times(&self) -> impl Iterator<Item = &Rat> {
        self.steps.iter().map(|s| &s.time)
    }

    pub fn total_flow(&self) -> &Rat {
        &self.total_flow
    }

    pub fn n_jobs(&self) -> u64 {
        self.n_jobs
    }

    pub fn total_weight(&self) -> &Rat {
        &self.total_weight
    }

    pub fn end_time(&self) -> &Rat {
        &self.end_time
    }

    /// Exact integral of the pending-weight step function; equals the sum
    /// form of the objective on complete runs.
    pub fn integral_weight(&self) -> Rat {
        let mut acc = Rat::zero();
        for pair in self.steps.windows(2) {
            acc += &pair[0].weight * (&pair[1].time - &pair[0].time);
        }
        acc
    }
}

/// Clairvoyant SRPT. Ties break by earliest release, then lowest id.
pub struct SrptPolicy {
    true_of: HashMap<JobId, Rat>,
    queue: BTreeSet<(Rat, Rat, JobId)>,
    key_of: HashMap<JobId, (Rat, Rat)>,
}

impl SrptPolicy {
    /// Clairvoyant by construction: the policy is handed the instance so it
    /// can key on true remaining time. Refuses non-uniform weights.
    pub fn for_instance(inst: &Instance) -> Result<Self, OracleError> {
        if !inst.is_uniform_weight() {
            return Err(OracleError::WeightedInstance);
        }
        Ok(SrptPolicy {
            true_of: inst
                .jobs()
                .iter()
                .map(|j| (j.id, j.true_proc.clone()))
                .collect(),
            queue: BTreeSet::new(),
            key_of: HashMap::new(),
        })
    }
}

impl Policy for SrptPolicy {
    fn name(&self) -> &'static str {
        "srpt"
    }

    fn on_release(&mut self, job: &JobView, _now: &Rat) -> Result<Vec<PolicyEvent>, PolicyError> {
        let rem = self
            .true_of
            .get(&job.id)
            .cloned()
            .ok_or(PolicyError::UnknownJob(job.id))?;
        if self.key_of.contains_key(&job.id) {
            return Err(PolicyError::DuplicateRelease(job.id));
        }
        self.queue.insert((rem.clone(), job.release.clone(), job.id));
        self.key_of.insert(job.id, (rem, job.release.clone()));
        Ok(Vec::new())
    }

    fn on_processed(&mut self, job_id: JobId, amount: &Rat, _now: &Rat) {
        if let Some((rem, release)) = self.key_of.get(&job_id).cloned() {
            self.queue.remove(&(rem.clone(), release.clone(), job_id));
            let rem = rem - amount;
            if rem.is_positive() {
                self.queue.insert((rem.clone(), release.clone(), job_id));
            }
            self.key_of.insert(job_id, (rem, release));
        }
    }

    fn on_complete(&mut self, job_id: JobId, _now: &Rat) -> Result<(), PolicyError> {
        let (rem, release) = self
            .key_of
            .remove(&job_id)
            .ok_or(PolicyError::UnknownJob(job_id))?;
        self.queue.remove(&(rem, release, job_id));
        Ok(())
    }

    fn select(&mut self, _now: &Rat) -> Result<Option<JobId>, PolicyError> {
        Ok(self.queue.iter().next().map(|(_, _, id)| *id))
    }
}

/// SRPT keyed on predicted remaining time, clamped at zero: a job whose
/// prediction has fully elapsed keeps top priority until it completes.
pub struct PredSrptPolicy {
    queue: BTreeSet<(Rat, Rat, JobId)>,
    key_of: HashMap<JobId, (Rat, Rat)>,
}

impl PredSrptPolicy {
    pub fn new() -> Self {
        PredSrptPolicy {
            queue: BTreeSet::new(),
            key_of: HashMap::new(),
        }
    }
}

impl Default for PredSrptPolicy {
    fn default() -> Self {
        Self::new()
    }
}

impl Policy for PredSrptPolicy {
    fn name(&self) -> &'static str {
        "srpt-pred"
    }

    fn on_release(&mut self, job: &JobView, _now: &Rat) -> Result<Vec<PolicyEvent>, PolicyError> {
        if self.key_of.contains_key(&job.id) {
            return Err(PolicyError::DuplicateRelease(job.id));
        }
        self.queue
            .insert((job.pred_proc.clone(), job.release.clone(), job.id));
        self.key_of
            .insert(job.id, (job.pred_proc.clone(), job.release.clone()));
        Ok(Vec::new())
    }

    fn on_processed(&mut self, job_id: JobId, amount: &Rat, _now: &Rat) {
        if let Some((key, release)) = self.key_of.get(&job_id).cloned() {
            self.queue.remove(&(key.clone(), release.clone(), job_id));
            let mut key = key - amount;
            if key.is_negative() {
                key = Rat::zero();
            }
            self.queue.insert((key.clone(), release.clone(), job_id));
            self.key_of.insert(job_id, (key, release));
        }
    }

    fn on_complete(&mut self, job_id: JobId, _now: &Rat) -> Result<(), PolicyError> {
        let (key, release) = self
            .key_of
            .remove(&job_id)
            .ok_or(PolicyError::UnknownJob(job_id))?;
        self.queue.remove(&(key, release, job_id));
        Ok(())
    }

    fn select(&mut self, _now: &Rat) -> Result<Option<JobId>, PolicyError> {
        Ok(self.queue.iter().next().map(|(_, _, id)| *id))
    }
}

/// Run clairvoyant SRPT over the instance; optimal for uniform weights.
pub fn srpt(inst: &Instance) -> Result<(SimResult, PendingSeries), OracleError> {
    let mut policy = SrptPolicy::for_instance(inst)?;
    let result = simulate(inst, &mut policy, &mut [], &SimOptions::default())?;
    let series = PendingSeries::from_sim(&result);
    Ok((result, series))
}

/// Run prediction-keyed SRPT over the instance.
pub fn srpt_on_predictions(inst: &Instance) -> Result<SimResult, OracleError> {
    if !inst.is_uniform_weight() {
        return Err(OracleError::WeightedInstance);
    }
    let mut policy = PredSrptPolicy::new();
    Ok(simulate(inst, &mut policy, &mut [], &SimOptions::default())?)
}

/// Size limits for the exhaustive weighted oracle.
#[derive(Debug, Clone, Copy)]
pub struct OracleLimits {
    pub max_jobs: usize,
    pub max_total_volume: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_jobs: 5,
            max_total_volume: 24,
        }
    }
}

/// Exact minimum weighted flow time over preemptive schedules, for integer
/// releases and processing times within `limits`; unit-slot search.
pub fn optimal_weighted_small(
    inst: &Instance,
    limits: &OracleLimits,
) -> Result<(Rat, PendingSeries), OracleError> {
    optimal_weighted_grid(inst, limits, 1)
}

/// The same exhaustive search on a grid of `slots_per_unit` slots per time
/// unit. For integer data the unit grid is already exact; comparing against
/// `slots_per_unit = 2` on micro-instances verifies that claim empirically.
pub fn optimal_weighted_grid(
    inst: &Instance,
    limits: &OracleLimits,
    slots_per_unit: u32,
) -> Result<(Rat, PendingSeries), OracleError> {
    assert!(slots_per_unit >= 1);
    let jobs = inst.jobs();
    if jobs.len() > limits.max_jobs {
        return Err(OracleError::TooLarge);
    }
    let mut releases: Vec<u64> = Vec::with_capacity(jobs.len());
    let mut volumes: Vec<u16> = Vec::with_capacity(jobs.len());
    let mut total_volume: u64 = 0;
    for job in jobs {
        if !job.release.is_integer() || !job.true_proc.is_integer() {
            return Err(OracleError::NonIntegerData);
        }
        let r: u64 = job
            .release
            .to_integer()
            .try_into()
            .map_err(|_| OracleError::TooLarge)?;
        let p: u64 = job
            .true_proc
            .to_integer()
            .try_into()
            .map_err(|_| OracleError::TooLarge)?;
        total_volume += p;
        releases.push(r * u64::from(slots_per_unit));
        volumes.push(
            (p * u64::from(slots_per_unit))
                .try_into()
                .map_err(|_| OracleError::TooLarge)?,
        );
    }
    if total_volume > limits.max_total_volume {
        return Err(OracleError::TooLarge);
    }
    let weights: Vec<Rat> = jobs.iter().map(|j| j.weight.clone()).collect();
    let slot_len = rat(1, i64::from(slots_per_unit));

    let mut search = SlotSearch {
        releases: &releases,
        weights: &weights,
        memo: HashMap::new(),
        slot_len: &slot_len,
    };
    let value = search.solve(0, &volumes);

    // Reconstruct a canonical optimal schedule by replaying first argmins.
    let mut schedule: Vec<(u64, usize)> = Vec::new();
    let mut rem = volumes.clone();
    let mut t: u64 = 0;
    while rem.iter().any(|&v| v > 0) {
        let ready: Vec<usize> = (0..rem.len())
            .filter(|&i| rem[i] > 0 && releases[i] <= t)
            .collect();
        if ready.is_empty() {
            t = (0..rem.len())
                .filter(|&i| rem[i] > 0)
                .map(|i| releases[i])
                .min()
                .unwrap();
            continue;
        }
        let slot_weight: Rat = ready.iter().fold(Rat::zero(), |acc, &i| acc + &weights[i]);
        let mut best: Option<(Rat, usize)> = None;
        for &i in &ready {
            rem[i] -= 1;
            let rest = search.solve(t + 1, &rem);
            rem[i] += 1;
            let total = &slot_weight * &slot_len + rest;
            if best.as_ref().map(|(b, _)| total < *b).unwrap_or(true) {
                best = Some((total, i));
            }
        }
        let (_, pick) = best.unwrap();
        schedule.push((t, pick));
        rem[pick] -= 1;
        t += 1;
    }

    let series = series_from_slots(inst, &releases, &volumes, &schedule, &slot_len, &value);
    Ok((value, series))
}

struct SlotSearch<'a> {
    releases: &'a [u64],
    weights: &'a [Rat],
    memo: HashMap<(u64, Vec<u16>), Rat>,
    slot_len: &'a Rat,
}

impl SlotSearch<'_> {
    fn solve(&mut self, t: u64, rem: &[u16]) -> Rat {
        if rem.iter().all(|&v| v == 0) {
            return Rat::zero();
        }
        if let Some(v) = self.memo.get(&(t, rem.to_vec())) {
            return v.clone();
        }
        let ready: Vec<usize> = (0..rem.len())
            .filter(|&i| rem[i] > 0 && self.releases[i] <= t)
            .collect();
        let value = if ready.is_empty() {
            let t_next = (0..rem.len())
                .filter(|&i| rem[i] > 0)
                .map(|i| self.releases[i])
                .min()
                .unwrap();
            self.solve(t_next, rem)
        } else {
            let slot_weight: Rat = ready
                .iter()
                .fold(Rat::zero(), |acc, &i| acc + &self.weights[i]);
            let mut rem = rem.to_vec();
            let mut best: Option<Rat> = None;
            for &i in &ready {
                rem[i] -= 1;
                let rest = self.solve(t + 1, &rem);
                rem[i] += 1;
                if best.as_ref().map(|b| rest < *b).unwrap_or(true) {
                    best = Some(rest);
                }
            }
            slot_weight * self.slot_len + best.unwrap()
        };
        self.memo.insert((t, rem.to_vec()), value.clone());
        value
    }
}

fn series_from_slots(
    inst: &Instance,
    releases: &[u64],
    volumes: &[u16],
    schedule: &[(u64, usize)],
    slot_len: &Rat,
    total_flow: &Rat,
) -> PendingSeries {
    let jobs = inst.jobs();
    let mut completion_slot: BTreeMap<usize, u64> = BTreeMap::new();
    let mut rem: Vec<u16> = volumes.to_vec();
    for &(t, i) in schedule {
        rem[i] -= 1;
        if rem[i] == 0 {
            completion_slot.insert(i, t + 1);
        }
    }

    // Event slots: releases and completions.
    let mut event_slots: BTreeSet<u64> = releases.iter().copied().collect();
    event_slots.extend(completion_slot.values().copied());

    let mut steps = Vec::new();
    let mut total_weight = Rat::zero();
    for j in jobs {
        total_weight += &j.weight;
    }
    for &s in &event_slots {
        let time = slot_len * rat(s as i64, 1);
        let mut pending = 0u64;
        let mut weight = Rat::zero();
        let mut volume = Rat::zero();
        for (i, job) in jobs.iter().enumerate() {
            let released = releases[i] <= s;
            let done = completion_slot.get(&i).map(|&c| c <= s).unwrap_or(false);
            if released && !done {
                pending += 1;
                weight += &job.weight;
                let used = schedule
                    .iter()
                    .filter(|&&(t, k)| k == i && t < s)
                    .count() as u16;
                volume += slot_len * rat(i64::from(volumes[i] - used), 1);
            }
        }
        steps.push(SeriesStep {
            time,
            pending,
            weight,
            volume,
        });
    }
    let end_time = steps.last().map(|s| s.time.clone()).unwrap_or_default();
    PendingSeries {
        steps,
        total_flow: total_flow.clone(),
        n_jobs: jobs.len() as u64,
        total_weight,
        end_time,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_instance, Job};
    use crate::rat::{rint, Rat};
    use num_traits::One;

    fn unit_job(id: JobId, r: i64, p: i64) -> Job {
        Job::new(id, rint(r), rint(p), rint(p), rint(1))
    }

    fn wjob(id: JobId, r: i64, p: i64, w: i64) -> Job {
        Job::new(id, rint(r), rint(p), rint(p), rint(w))
    }

    #[test]
    fn srpt_two_job_example() {
        let inst = make_instance(vec![unit_job(1, 0, 4), unit_job(2, 1, 1)], rint(1)).unwrap();
        // Oracle first: the exhaustive search confirms 6 is the optimum.
        let (opt, _) = optimal_weighted_small(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(opt, rint(6));

        let (result, series) = srpt(&inst).unwrap();
        assert_eq!(result.flow_weighted, rint(6));
        assert_eq!(result.completions[&2], rint(2));
        assert_eq!(result.completions[&1], rint(5));
        // delta* step series: 1 on [0,1), 2 on [1,2), 1 on [2,5)
        assert_eq!(series.at(&rint(0)).0, 1);
        assert_eq!(series.at(&rint(1)).0, 2);
        assert_eq!(series.at(&rint(2)).0, 1);
        assert_eq!(series.at(&rint(4)).0, 1);
        assert_eq!(series.at(&rint(5)).0, 0);
    }

    #[test]
    fn srpt_preemption_shows_on_trace() {
        use crate::sim::TraceKind;
        let inst = make_instance(vec![unit_job(1, 0, 4), unit_job(2, 1, 1)], rint(1)).unwrap();
        let (result, series) = srpt(&inst).unwrap();
        let kinds: Vec<(TraceKind, JobId)> = result
            .trace
            .iter()
            .filter(|r| matches!(r.kind, TraceKind::Preempt | TraceKind::Resume))
            .map(|r| (r.kind, r.job_id))
            .collect();
        // job 1 preempted at t=1 and resumed at t=2
        assert_eq!(
            kinds,
            vec![(TraceKind::Preempt, 1), (TraceKind::Resume, 1)]
        );
        // the series' weight integral is the sum-form objective, exactly
        assert_eq!(series.integral_weight(), *series.total_flow());
    }

    #[test]
    fn srpt_single_and_identical_jobs() {
        let inst = make_instance(vec![unit_job(1, 0, 3)], rint(1)).unwrap();
        let (result, _) = srpt(&inst).unwrap();
        assert_eq!(result.flow_weighted, rint(3));

        let inst = make_instance(vec![unit_job(1, 0, 1), unit_job(2, 0, 1)], rint(1)).unwrap();
        let (result, _) = srpt(&inst).unwrap();
        assert_eq!(result.flow_weighted, rint(3));
    }

    #[test]
    fn srpt_rejects_weighted_instances() {
        let inst = make_instance(vec![wjob(1, 0, 1, 1), wjob(2, 0, 1, 2)], rint(1)).unwrap();
        assert!(matches!(srpt(&inst), Err(OracleError::WeightedInstance)));
        assert!(matches!(
            srpt_on_predictions(&inst),
            Err(OracleError::WeightedInstance)
        ));
    }

    #[test]
    fn oracle_examples() {
        // heavy job first: 10*1 + 1*3 = 13
        let inst = make_instance(vec![wjob(1, 0, 1, 10), wjob(2, 0, 2, 1)], rint(1)).unwrap();
        let (opt, series) = optimal_weighted_small(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(opt, rint(13));
        assert_eq!(series.at(&rint(0)).1, rint(11));
        assert_eq!(series.at(&rint(1)).1, rint(1));

        let inst = make_instance(vec![wjob(1, 0, 3, 5)], rint(1)).unwrap();
        let (opt, _) = optimal_weighted_small(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(opt, rint(15));

        let inst = make_instance(vec![wjob(1, 0, 1, 1), wjob(2, 0, 1, 1)], rint(1)).unwrap();
        let (opt, _) = optimal_weighted_small(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(opt, rint(3));
    }

    #[test]
    fn oracle_rejects_oversized_and_fractional() {
        let inst = make_instance(
            vec![
                unit_job(1, 0, 9),
                unit_job(2, 0, 9),
                unit_job(3, 0, 9),
            ],
            rint(1),
        )
        .unwrap();
        assert!(matches!(
            optimal_weighted_small(&inst, &OracleLimits::default()),
            Err(OracleError::TooLarge)
        ));

        let inst = make_instance(
            vec![Job::new(1, rint(0), rat(1, 2), rat(1, 2), rint(1))],
            rint(1),
        )
        .unwrap();
        assert!(matches!(
            optimal_weighted_small(&inst, &OracleLimits::default()),
            Err(OracleError::NonIntegerData)
        ));
    }

    #[test]
    fn oracle_series_integral_matches_sum_form() {
        let inst = make_instance(
            vec![wjob(1, 0, 2, 3), wjob(2, 1, 1, 1), wjob(3, 4, 2, 2)],
            rint(1),
        )
        .unwrap();
        let (opt, series) = optimal_weighted_small(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(series.integral_weight(), opt);
    }

    #[test]
    fn half_unit_grid_agrees_on_micro_instances() {
        // Guards the unit-slot granularity assumption for integer data.
        let cases = vec![
            vec![wjob(1, 0, 1, 10), wjob(2, 0, 2, 1)],
            vec![wjob(1, 0, 2, 1), wjob(2, 1, 1, 4), wjob(3, 1, 3, 2)],
            vec![wjob(1, 2, 2, 1), wjob(2, 0, 3, 1)],
            vec![wjob(1, 0, 3, 2), wjob(2, 0, 1, 1), wjob(3, 2, 2, 4)],
        ];
        for jobs in cases {
            let inst = make_instance(jobs, rint(1)).unwrap();
            let (unit, _) = optimal_weighted_small(&inst, &OracleLimits::default()).unwrap();
            let (half, _) = optimal_weighted_grid(&inst, &OracleLimits::default(), 2).unwrap();
            assert_eq!(unit, half);
        }
    }

    #[test]
    fn pred_srpt_equals_srpt_with_perfect_predictions() {
        let inst = make_instance(
            vec![unit_job(1, 0, 4), unit_job(2, 1, 1), unit_job(3, 2, 3)],
            rint(1),
        )
        .unwrap();
        let (clairvoyant, _) = srpt(&inst).unwrap();
        let predicted = srpt_on_predictions(&inst).unwrap();
        assert_eq!(clairvoyant.completions, predicted.completions);
        assert_eq!(clairvoyant.flow_weighted, predicted.flow_weighted);
    }

    #[test]
    fn pred_srpt_clamps_exhausted_predictions_to_top_priority() {
        // Job 1 predicts 2 but really takes 3 (mu = 2): its key reaches 0 at
        // t=2 and it keeps running past its prediction even though job 2
        // (released at 1, predicted 2) is waiting.
        let inst = make_instance(
            vec![
                Job::new(1, rint(0), rint(2), rint(3), rint(1)),
                Job::new(2, rint(1), rint(2), rint(2), rint(1)),
            ],
            rint(2),
        )
        .unwrap();
        let result = srpt_on_predictions(&inst).unwrap();
        assert_eq!(result.completions[&1], rint(3));
        assert_eq!(result.completions[&2], rint(5));
        // no preemption happened: one contiguous segment per job
        assert_eq!(result.segments.len(), 2);
    }

    #[test]
    fn empty_instance_oracles() {
        let inst = make_instance(vec![], Rat::one()).unwrap();
        let (result, series) = srpt(&inst).unwrap();
        assert!(result.trace.is_empty());
        assert!(series.steps().is_empty());
        let result = srpt_on_predictions(&inst).unwrap();
        assert!(result.trace.is_empty());
        let (opt, _) = optimal_weighted_small(&inst, &OracleLimits::default()).unwrap();
        assert!(opt.is_zero());
    }

    #[test]
    fn srpt_never_beaten_by_other_unit_policies_on_micro() {
        use crate::workloads::{gen_random, RandomSpec};
        for seed in 0..40 {
            let spec = RandomSpec {
                release_max: 4,
                pred_min: 1,
                pred_max: 4,
                ..RandomSpec::unit(4, 1000 + seed)
            };
            let inst = gen_random(&spec).unwrap();
            let (srpt_run, _) = srpt(&inst).unwrap();
            let (opt, _) = optimal_weighted_small(&inst, &OracleLimits::default()).unwrap();
            assert_eq!(srpt_run.flow_weighted, opt, "seed {seed}");
            let naive = srpt_on_predictions(&inst).unwrap();
            assert!(naive.flow_weighted >= opt);
        }
    }
}
