//! Event-driven continuous-time simulator for preemptive single-machine
//! scheduling.
//!
//! The engine owns the ground truth (true remaining volumes); policies only
//! ever see a [`JobView`] carrying the release time, the *predicted*
//! processing time and the weight. Completion is detected by the engine and
//! announced to the policy, never inferred by it.
//!
//! Every implemented policy changes its decision only at events (releases,
//! completions, transfers), so the engine re-queries `select` at events only;
//! between events the chosen job runs at unit rate. Simultaneous events at
//! one time are applied in a fixed order: releases (in id order, each with
//! its rotation), then completions, then the policy's rebalance transfers,
//! then checkers, then selection.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::model::{Instance, Job, JobId};
use crate::rat::Rat;

/// What a policy is allowed to know about a job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobView {
    pub id: JobId,
    pub release: Rat,
    pub pred_proc: Rat,
    pub weight: Rat,
}

impl JobView {
    pub fn of(job: &Job) -> Self {
        JobView {
            id: job.id,
            release: job.release.clone(),
            pred_proc: job.pred_proc.clone(),
            weight: job.weight.clone(),
        }
    }
}

/// Internal reordering performed by a policy inside a hook, reported back so
/// the engine can put it on the trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicyEvent {
    Rotated { job_id: JobId },
    Transferred { job_id: JobId },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolicyError {
    #[error("job {0} released twice")]
    DuplicateRelease(JobId),
    #[error("job {0} is not pending in the policy")]
    UnknownJob(JobId),
    #[error("completion reported for job {0} which is not the processed top")]
    CompletedNonTop(JobId),
    #[error("job {0} has non-unit weight; this policy is unweighted")]
    NonUnitWeight(JobId),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

/// Behavioral contract between the engine and a scheduling policy.
///
/// State may change only inside hooks. `select` must return a pending job
/// exactly when one exists (the engine enforces non-laziness). `rebalance`
/// runs once per event time, after all releases and completions at that time
/// have been delivered.
pub trait Policy {
    fn name(&self) -> &'static str;

    fn on_release(&mut self, job: &JobView, now: &Rat) -> Result<Vec<PolicyEvent>, PolicyError>;

    fn on_complete(&mut self, job_id: JobId, now: &Rat) -> Result<(), PolicyError>;

    fn rebalance(&mut self, _now: &Rat) -> Result<Vec<PolicyEvent>, PolicyError> {
        Ok(Vec::new())
    }

    /// Called when `job_id` has just been processed for `amount > 0`.
    fn on_processed(&mut self, _job_id: JobId, _amount: &Rat, _now: &Rat) {}

    fn select(&mut self, now: &Rat) -> Result<Option<JobId>, PolicyError>;

    fn snapshot(&self, _now: &Rat) -> PolicySnapshot {
        PolicySnapshot::Opaque
    }
}

/// One bin's jobs in priority-ascending order (`jobs[k]` has priority `k+1`),
/// each with its predicted processing time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinSnapshot {
    pub jobs: Vec<(JobId, Rat)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoBinsSnapshot {
    pub mu: Rat,
    pub full: BinSnapshot,
    pub partial: BinSnapshot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperbinSnapshot {
    pub rounded_weight: Rat,
    pub full: BinSnapshot,
    pub partial: BinSnapshot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperbinsSnapshot {
    pub mu: Rat,
    pub bins: BTreeMap<i64, SuperbinSnapshot>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityWeightEntry {
    pub job_id: JobId,
    pub wclass: i64,
    pub eclass: i64,
    pub partial: bool,
    pub rounded_weight: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityWeightSnapshot {
    pub lambda: Rat,
    pub jobs: Vec<DensityWeightEntry>,
}

/// Introspection state exposed to checkers after every event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicySnapshot {
    Opaque,
    TwoBins(TwoBinsSnapshot),
    Superbins(SuperbinsSnapshot),
    DensityWeight(DensityWeightSnapshot),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    Release,
    Complete,
    Preempt,
    Resume,
    Transfer,
    Rotate,
}

impl TraceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TraceKind::Release => "release",
            TraceKind::Complete => "complete",
            TraceKind::Preempt => "preempt",
            TraceKind::Resume => "resume",
            TraceKind::Transfer => "transfer",
            TraceKind::Rotate => "rotate",
        }
    }
}

/// One trace line; the pending aggregates are the state right after the
/// record's sub-event was applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub time: Rat,
    pub kind: TraceKind,
    pub job_id: JobId,
    pub pending_count: u64,
    pub pending_weight: Rat,
    pub pending_volume: Rat,
}

/// Aggregate pending-set state handed to checker hooks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendingStats {
    pub count: u64,
    pub weight: Rat,
    pub volume: Rat,
}

/// Contiguous run of processing of one job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: Rat,
    pub end: Rat,
    pub job_id: JobId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimResult {
    pub trace: Vec<TraceRecord>,
    /// Policy snapshot after each event time (strictly increasing times),
    /// present when snapshot recording is enabled.
    pub snapshots: Vec<(Rat, PolicySnapshot)>,
    pub segments: Vec<Segment>,
    pub completions: BTreeMap<JobId, Rat>,
    pub flow_weighted: Rat,
    pub flow_unweighted: Rat,
}

#[derive(Debug, Clone)]
pub struct SimOptions {
    pub record_snapshots: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            record_snapshots: true,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("policy selected job {0} which is not pending")]
    PolicySelectedUnknownJob(JobId),
    #[error("policy idles while jobs are pending")]
    PolicyIdleWhilePending,
    #[error("run is incomplete: job {0} never finished")]
    IncompleteRun(JobId),
}

/// Per-event callback; concrete checkers live in [`crate::analysis`].
pub trait CheckerHook {
    fn name(&self) -> &str;
    fn on_event(&mut self, event_index: usize, now: &Rat, snapshot: &PolicySnapshot, stats: &PendingStats);
}

struct EngineJob {
    remaining: Rat,
    processed: Rat,
    weight: Rat,
    release: Rat,
}

/// Drive `policy` over `inst` until all jobs complete.
///
/// Time advances to the earlier of the next release and the completion of the
/// currently selected job (its true remaining volume, which only the engine
/// knows). The machine is never idle while a job is pending.
pub fn simulate(
    inst: &Instance,
    policy: &mut dyn Policy,
    checkers: &mut [&mut dyn CheckerHook],
    opts: &SimOptions,
) -> Result<SimResult, SimError> {
    let jobs = inst.jobs();
    debug_assert!(jobs
        .iter()
        .all(|j| j.true_proc == j.pred_proc || j.true_proc < inst.mu() * &j.pred_proc));

    let mut pending: BTreeMap<JobId, EngineJob> = BTreeMap::new();
    let mut count: u64 = 0;
    let mut weight = Rat::zero();
    let mut volume = Rat::zero();

    let mut now = Rat::zero();
    let mut next_release = 0usize;
    let mut running: Option<JobId> = None;
    let mut event_index = 0usize;

    let mut trace: Vec<TraceRecord> = Vec::new();
    let mut snapshots: Vec<(Rat, PolicySnapshot)> = Vec::new();
    let mut segments: Vec<Segment> = Vec::new();
    let mut completions: BTreeMap<JobId, Rat> = BTreeMap::new();
    let mut flow_weighted = Rat::zero();
    let mut flow_unweighted = Rat::zero();

    loop {
        // Next event time; pending is nonempty iff `running` is set.
        let t_event = match (&running, jobs.get(next_release)) {
            (Some(id), Some(next)) => {
                let done = &now + &pending[id].remaining;
                done.min(next.release.clone())
            }
            (Some(id), None) => &now + &pending[id].remaining,
            (None, Some(next)) => next.release.clone(),
            (None, None) => break,
        };

        // Process the running job up to the event.
        if let Some(id) = running {
            let dt = &t_event - &now;
            if dt.is_positive() {
                let job = pending.get_mut(&id).expect("running job is pending");
                job.remaining -= &dt;
                job.processed += &dt;
                volume -= &dt;
                policy.on_processed(id, &dt, &t_event);
                match segments.last_mut() {
                    Some(seg) if seg.job_id == id && seg.end == now => seg.end = t_event.clone(),
                    _ => segments.push(Segment {
                        start: now.clone(),
                        end: t_event.clone(),
                        job_id: id,
                    }),
                }
            }
        }
        now = t_event;

        let record = |kind: TraceKind,
                          job_id: JobId,
                          count: u64,
                          weight: &Rat,
                          volume: &Rat,
                          trace: &mut Vec<TraceRecord>| {
            trace.push(TraceRecord {
                time: now.clone(),
                kind,
                job_id,
                pending_count: count,
                pending_weight: weight.clone(),
                pending_volume: volume.clone(),
            });
        };

        // 1) releases at `now`, in id order (instance order is (release, id)).
        while next_release < jobs.len() && jobs[next_release].release == now {
            let job = &jobs[next_release];
            next_release += 1;
            pending.insert(
                job.id,
                EngineJob {
                    remaining: job.true_proc.clone(),
                    processed: Rat::zero(),
                    weight: job.weight.clone(),
                    release: job.release.clone(),
                },
            );
            count += 1;
            weight += &job.weight;
            volume += &job.true_proc;
            let events = policy.on_release(&JobView::of(job), &now)?;
            record(TraceKind::Release, job.id, count, &weight, &volume, &mut trace);
            for ev in events {
                if let PolicyEvent::Rotated { job_id } = ev {
                    record(TraceKind::Rotate, job_id, count, &weight, &volume, &mut trace);
                }
            }
        }

        // 2) completion of the running job, exactly when its volume hits zero.
        if let Some(id) = running {
            if pending[&id].remaining.is_zero() {
                let job = pending.remove(&id).expect("completing job is pending");
                count -= 1;
                weight -= &job.weight;
                let flow = &now - &job.release;
                flow_weighted += &job.weight * &flow;
                flow_unweighted += &flow;
                completions.insert(id, now.clone());
                policy.on_complete(id, &now)?;
                record(TraceKind::Complete, id, count, &weight, &volume, &mut trace);
                running = None;
            }
        }

        // 3) policy rebalancing (e.g. full -> partial transfers).
        for ev in policy.rebalance(&now)? {
            let (kind, job_id) = match ev {
                PolicyEvent::Transferred { job_id } => (TraceKind::Transfer, job_id),
                PolicyEvent::Rotated { job_id } => (TraceKind::Rotate, job_id),
            };
            record(kind, job_id, count, &weight, &volume, &mut trace);
        }

        // 4) checkers observe the settled state.
        if !checkers.is_empty() || opts.record_snapshots {
            let snap = policy.snapshot(&now);
            let stats = PendingStats {
                count,
                weight: weight.clone(),
                volume: volume.clone(),
            };
            for checker in checkers.iter_mut() {
                checker.on_event(event_index, &now, &snap, &stats);
            }
            if opts.record_snapshots {
                snapshots.push((now.clone(), snap));
            }
        }
        event_index += 1;

        // 5) selection.
        if pending.is_empty() {
            running = None;
            continue;
        }
        let choice = policy
            .select(&now)?
            .ok_or(SimError::PolicyIdleWhilePending)?;
        let chosen = pending
            .get(&choice)
            .ok_or(SimError::PolicySelectedUnknownJob(choice))?;
        if running != Some(choice) {
            if let Some(prev) = running {
                record(TraceKind::Preempt, prev, count, &weight, &volume, &mut trace);
            }
            if chosen.processed.is_positive() {
                record(TraceKind::Resume, choice, count, &weight, &volume, &mut trace);
            }
        }
        running = Some(choice);
    }

    for job in jobs {
        if !completions.contains_key(&job.id) {
            return Err(SimError::IncompleteRun(job.id));
        }
    }

    Ok(SimResult {
        trace,
        snapshots,
        segments,
        completions,
        flow_weighted,
        flow_unweighted,
    })
}

/// Both formulations of the weighted flow objective: the per-job sum
/// `sum w_q (c_q - r_q)` and the exact piecewise-constant integral of the
/// pending weight over the trace. They are equal on every complete run.
pub fn flow_time_both_forms(result: &SimResult, inst: &Instance) -> Result<(Rat, Rat), SimError> {
    let mut sum_form = Rat::zero();
    for job in inst.jobs() {
        let c = result
            .completions
            .get(&job.id)
            .ok_or(SimError::IncompleteRun(job.id))?;
        sum_form += &job.weight * (c - &job.release);
    }

    let mut integral = Rat::zero();
    for pair in result.trace.windows(2) {
        let dt = &pair[1].time - &pair[0].time;
        if dt.is_positive() {
            integral += &pair[0].pending_weight * dt;
        }
    }
    Ok((sum_form, integral))
}

/// Serialize a trace as CSV (`time,kind,job_id,pending_count,pending_weight,
/// pending_volume`), rationals in `num/den` form.
pub fn trace_to_csv(trace: &[TraceRecord]) -> String {
    use crate::rat::format_rat_slash;
    let mut out = String::from("time,kind,job_id,pending_count,pending_weight,pending_volume\n");
    for r in trace {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            format_rat_slash(&r.time),
            r.kind.as_str(),
            r.job_id,
            r.pending_count,
            format_rat_slash(&r.pending_weight),
            format_rat_slash(&r.pending_volume),
        ));
    }
    out
}
