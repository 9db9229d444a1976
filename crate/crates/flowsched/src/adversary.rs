//! Adaptive lower-bound workload against deterministic unweighted policies.
//!
//! The construction runs `M` phases, numbered `M-1` down to `0`. Phase `i`
//! lasts `lambda^i` time units with `lambda = (mu+1)/(mu-1)`; at its start
//! two unit-weight jobs of predicted time `lambda^i` are released, and at
//! its end the job the victim processed more is assigned a true time just
//! under `mu * lambda^i` while the other gets exactly `lambda^i`. The
//! committed value is `(7*mu+1)/8 * lambda^i`: the model's one-sided bound
//! is strict, so the boundary itself is not a legal processing time, and any
//! factor above `(mu+1)/2` keeps both phase jobs alive through all later
//! phases. After phase 0 a bombardment of perfectly-predicted jobs of size
//! `x_bomb` (the smallest remaining volume any phase job has at that point)
//! arrives back-to-back.
//!
//! Adaptivity collapses to a plain instance because the victim is
//! deterministic and, inside a phase, nothing observable depends on the
//! still-uncommitted true times: neither phase job can complete before its
//! phase ends. Each phase is therefore resolved by replaying the committed
//! prefix through the ordinary engine and reading the processing split off
//! the segment list; the final replay is the victim's run on the realized
//! instance.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::analysis::competitive_report;
use crate::model::{make_instance, Instance, Job, JobId};
use crate::rat::{format_rat, rat, rat_pow, Rat};
use crate::sim::{simulate, Policy, Segment, SimError, SimOptions, SimResult};

#[derive(Debug, Clone)]
pub struct AdversaryConfig {
    /// Distortion bound; the construction needs `1 < mu <= 2`.
    pub mu: Rat,
    /// Number of phases `M >= 1`.
    pub phases: usize,
    /// Number of bombardment jobs released after phase 0.
    pub bombardment_count: usize,
}

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error("adversary requires 1 < mu <= 2")]
    InvalidMu,
    #[error("adversary requires at least one phase")]
    NoPhases,
    #[error("victim policy failed: {0}")]
    Victim(#[from] SimError),
    #[error("phase invariant broken: {0}")]
    PhaseInvariant(String),
}

/// Per-phase processing split observed on the victim.
#[derive(Debug, Clone)]
pub struct PhaseSplit {
    /// Phase index (`M-1` down to `0`).
    pub phase: usize,
    pub more_id: JobId,
    pub more_processed: Rat,
    pub less_id: JobId,
    pub less_processed: Rat,
}

#[derive(Debug)]
pub struct AdversaryOutcome {
    /// The realized, fully concrete instance (replayable).
    pub instance: Instance,
    pub victim_flow: Rat,
    pub opt_upper_bound: Rat,
    /// `victim_flow / opt_upper_bound`; a lower bound on the victim's true
    /// competitive ratio since the denominator over-estimates nothing.
    pub ratio_lower_bound: Rat,
    pub lambda: Rat,
    pub x_bomb: Rat,
    pub phase_splits: Vec<PhaseSplit>,
    pub victim_result: SimResult,
}

fn processed_before(segments: &[Segment], job: JobId, t: &Rat) -> Rat {
    let mut total = Rat::zero();
    for seg in segments.iter().filter(|s| s.job_id == job) {
        if seg.start >= *t {
            continue;
        }
        let end = if seg.end < *t { &seg.end } else { t };
        total += end - &seg.start;
    }
    total
}

/// Run the adaptive construction against fresh victims from `victim`.
pub fn run_adversary<F>(cfg: &AdversaryConfig, victim: F) -> Result<AdversaryOutcome, AdversaryError>
where
    F: Fn() -> Box<dyn Policy>,
{
    if cfg.mu <= Rat::one() || cfg.mu > rat(2, 1) {
        return Err(AdversaryError::InvalidMu);
    }
    if cfg.phases == 0 {
        return Err(AdversaryError::NoPhases);
    }
    let one = Rat::one();
    let lambda = (&cfg.mu + &one) / (&cfg.mu - &one);
    let commit_factor = (rat(7, 1) * &cfg.mu + &one) / rat(8, 1);
    let opts = SimOptions {
        record_snapshots: false,
    };

    let mut committed: Vec<Job> = Vec::new();
    let mut splits: Vec<PhaseSplit> = Vec::new();
    let mut phase_start = Rat::zero();
    let mut next_id: JobId = 1;

    for i in (0..cfg.phases).rev() {
        let length = rat_pow(&lambda, i as i64);
        let phase_end = &phase_start + &length;
        let (id_a, id_b) = (next_id, next_id + 1);
        next_id += 2;
        // Provisional true time: the committed "more" value. It cannot be
        // reached inside the phase, so the victim's trajectory up to the
        // phase end does not depend on it.
        let provisional = &commit_factor * &length;
        let mut jobs = committed.clone();
        for id in [id_a, id_b] {
            jobs.push(Job::new(
                id,
                phase_start.clone(),
                length.clone(),
                provisional.clone(),
                Rat::one(),
            ));
        }
        let inst = make_instance(jobs, cfg.mu.clone()).expect("adversary jobs are valid");
        let mut policy = victim();
        let run = simulate(&inst, policy.as_mut(), &mut [], &opts)?;

        let worked_a = processed_before(&run.segments, id_a, &phase_end);
        let worked_b = processed_before(&run.segments, id_b, &phase_end);
        // ties resolve to the lower id
        let (more_id, more_w, less_id, less_w) = if worked_b > worked_a {
            (id_b, worked_b, id_a, worked_a)
        } else {
            (id_a, worked_a, id_b, worked_b)
        };
        if more_w >= provisional || less_w >= length {
            return Err(AdversaryError::PhaseInvariant(format!(
                "phase {i}: a phase job would complete before the phase ends"
            )));
        }
        committed.push(Job::new(
            more_id,
            phase_start.clone(),
            length.clone(),
            provisional.clone(),
            Rat::one(),
        ));
        committed.push(Job::new(
            less_id,
            phase_start.clone(),
            length.clone(),
            length.clone(),
            Rat::one(),
        ));
        splits.push(PhaseSplit {
            phase: i,
            more_id,
            more_processed: more_w,
            less_id,
            less_processed: less_w,
        });
        phase_start = phase_end;
    }
    let t_end = phase_start;

    // Smallest remaining volume among the (all still pending) phase jobs at
    // the end of phase 0 fixes the bombardment job size.
    let committed_inst = make_instance(committed.clone(), cfg.mu.clone()).expect("valid");
    let mut policy = victim();
    let run = simulate(&committed_inst, policy.as_mut(), &mut [], &opts)?;
    let mut x_bomb: Option<Rat> = None;
    for job in committed_inst.jobs() {
        let rem = &job.true_proc - processed_before(&run.segments, job.id, &t_end);
        if !rem.is_positive() {
            return Err(AdversaryError::PhaseInvariant(format!(
                "job {} finished before the bombardment begins",
                job.id
            )));
        }
        if x_bomb.as_ref().map(|x| rem < *x).unwrap_or(true) {
            x_bomb = Some(rem);
        }
    }
    let x_bomb = x_bomb.expect("at least one phase job");

    let mut all_jobs = committed;
    let mut release = t_end.clone();
    for _ in 0..cfg.bombardment_count {
        all_jobs.push(Job::new(
            next_id,
            release.clone(),
            x_bomb.clone(),
            x_bomb.clone(),
            Rat::one(),
        ));
        next_id += 1;
        release += &x_bomb;
    }
    let instance = make_instance(all_jobs, cfg.mu.clone()).expect("realized jobs are valid");
    let mut policy = victim();
    let victim_result = simulate(&instance, policy.as_mut(), &mut [], &opts)?;
    let victim_flow = victim_result.flow_unweighted.clone();

    // Neither phase job may complete before its phase ends (the adversary's
    // accounting depends on it); verified on the realized run.
    for split in &splits {
        let boundary = phase_boundary(&lambda, cfg.phases, split.phase);
        for id in [split.more_id, split.less_id] {
            if victim_result.completions[&id] <= boundary {
                return Err(AdversaryError::PhaseInvariant(format!(
                    "job {id} completed inside phase {}",
                    split.phase
                )));
            }
        }
    }

    let opt_upper_bound = explicit_schedule_flow(cfg, &lambda, &commit_factor, &x_bomb);
    let ratio_lower_bound =
        competitive_report(&victim_flow, &opt_upper_bound).expect("positive reference flow");

    Ok(AdversaryOutcome {
        instance,
        victim_flow,
        opt_upper_bound,
        ratio_lower_bound,
        lambda,
        x_bomb,
        phase_splits: splits,
        victim_result,
    })
}

/// End time of phase `i` (phases run `M-1` down to `0`).
fn phase_boundary(lambda: &Rat, phases: usize, i: usize) -> Rat {
    let mut t = Rat::zero();
    for k in (i..phases).rev() {
        t += rat_pow(lambda, k as i64);
    }
    t
}

/// Flow of the explicit reference schedule: finish the less-processed job
/// inside each phase, serve every bombardment job in its own slot, then
/// drain the long jobs shortest-first. Feasible by construction, hence an
/// upper bound on the optimum.
fn explicit_schedule_flow(
    cfg: &AdversaryConfig,
    lambda: &Rat,
    commit_factor: &Rat,
    x_bomb: &Rat,
) -> Rat {
    let mut flow = Rat::zero();
    let mut t_end = Rat::zero();
    for i in 0..cfg.phases {
        let length = rat_pow(lambda, i as i64);
        flow += &length; // the in-phase job: released at start, done at end
        t_end += &length;
    }
    flow += rat(cfg.bombardment_count as i64, 1) * x_bomb;
    let mut clock = &t_end + rat(cfg.bombardment_count as i64, 1) * x_bomb;
    // remaining long jobs, ascending true time = ascending phase index
    for i in 0..cfg.phases {
        let length = rat_pow(lambda, i as i64);
        clock += commit_factor * &length;
        let released_at = phase_boundary(lambda, cfg.phases, i) - &length;
        flow += &clock - released_at;
    }
    flow
}

/// Human-readable sidecar describing an adversary run.
pub fn meta_to_string(cfg: &AdversaryConfig, outcome: &AdversaryOutcome) -> String {
    let mut out = String::from("adversary-meta v1\n");
    let _ = writeln!(out, "mu={}", format_rat(&cfg.mu));
    let _ = writeln!(out, "lambda={}", format_rat(&outcome.lambda));
    let _ = writeln!(out, "phases={}", cfg.phases);
    let _ = writeln!(out, "bombardment_count={}", cfg.bombardment_count);
    let _ = writeln!(out, "x_bomb={}", format_rat(&outcome.x_bomb));
    for s in &outcome.phase_splits {
        let _ = writeln!(
            out,
            "phase i={} more_id={} more_processed={} less_id={} less_processed={}",
            s.phase,
            s.more_id,
            format_rat(&s.more_processed),
            s.less_id,
            format_rat(&s.less_processed)
        );
    }
    let _ = writeln!(out, "victim_flow={}", format_rat(&outcome.victim_flow));
    let _ = writeln!(
        out,
        "opt_upper_bound={}",
        format_rat(&outcome.opt_upper_bound)
    );
    let _ = writeln!(
        out,
        "ratio_lower_bound={}",
        format_rat(&outcome.ratio_lower_bound)
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{optimal_weighted_grid, srpt, OracleLimits, PredSrptPolicy};
    use crate::rat::rint;

    fn pred_srpt() -> Box<dyn Policy> {
        Box::new(PredSrptPolicy::new())
    }

    #[test]
    fn lambda_formula() {
        let out = run_adversary(
            &AdversaryConfig {
                mu: rint(2),
                phases: 1,
                bombardment_count: 0,
            },
            pred_srpt,
        )
        .unwrap();
        assert_eq!(out.lambda, rint(3));

        let out = run_adversary(
            &AdversaryConfig {
                mu: rat(3, 2),
                phases: 2,
                bombardment_count: 0,
            },
            pred_srpt,
        )
        .unwrap();
        assert_eq!(out.lambda, rint(5));
    }

    #[test]
    fn invalid_mu_rejected() {
        for mu in [rint(1), rat(1, 2), rat(5, 2)] {
            let err = run_adversary(
                &AdversaryConfig {
                    mu,
                    phases: 1,
                    bombardment_count: 0,
                },
                pred_srpt,
            )
            .unwrap_err();
            assert!(matches!(err, AdversaryError::InvalidMu));
        }
    }

    #[test]
    fn realized_instance_replays_to_the_same_flow() {
        let cfg = AdversaryConfig {
            mu: rat(3, 2),
            phases: 4,
            bombardment_count: 25,
        };
        let out = run_adversary(&cfg, pred_srpt).unwrap();
        let mut fresh = PredSrptPolicy::new();
        let replay = simulate(
            &out.instance,
            &mut fresh,
            &mut [],
            &SimOptions {
                record_snapshots: false,
            },
        )
        .unwrap();
        assert_eq!(replay.flow_unweighted, out.victim_flow);
        assert_eq!(replay.completions, out.victim_result.completions);
    }

    #[test]
    fn phase_jobs_survive_their_phases() {
        let cfg = AdversaryConfig {
            mu: rat(3, 2),
            phases: 5,
            bombardment_count: 10,
        };
        let out = run_adversary(&cfg, pred_srpt).unwrap();
        for split in &out.phase_splits {
            let boundary = phase_boundary(&out.lambda, cfg.phases, split.phase);
            for id in [split.more_id, split.less_id] {
                assert!(out.victim_result.completions[&id] > boundary);
            }
        }
        // every split respects the half-phase cap on the less-processed job
        for split in &out.phase_splits {
            let length = rat_pow(&out.lambda, split.phase as i64);
            assert!(split.less_processed <= length / rint(2));
            assert!(split.more_processed >= split.less_processed);
        }
    }

    #[test]
    fn opt_upper_bound_dominates_exact_optimum_on_tiny_run() {
        // mu=2, one phase, no bombardment: two jobs with pred 1, true 15/8
        // and 1. Scaling times by 8 gives integer data for the exhaustive
        // oracle; flows scale linearly.
        let cfg = AdversaryConfig {
            mu: rint(2),
            phases: 1,
            bombardment_count: 0,
        };
        let out = run_adversary(&cfg, pred_srpt).unwrap();
        let scale = rint(8);
        let scaled: Vec<Job> = out
            .instance
            .jobs()
            .iter()
            .map(|j| {
                Job::new(
                    j.id,
                    &j.release * &scale,
                    &j.pred_proc * &scale,
                    &j.true_proc * &scale,
                    j.weight.clone(),
                )
            })
            .collect();
        let scaled_inst = make_instance(scaled, cfg.mu.clone()).unwrap();
        let (opt, _) = optimal_weighted_grid(&scaled_inst, &OracleLimits::default(), 1).unwrap();
        assert!(&out.opt_upper_bound * &scale >= opt);
        // and the victim is never better than the optimum
        assert!(&out.victim_flow * &scale >= opt);
    }

    #[test]
    fn bombardment_jobs_are_perfectly_predicted_and_valid() {
        let cfg = AdversaryConfig {
            mu: rat(3, 2),
            phases: 3,
            bombardment_count: 12,
        };
        let out = run_adversary(&cfg, pred_srpt).unwrap();
        assert_eq!(out.instance.len(), 2 * 3 + 12);
        let bombs: Vec<&Job> = out
            .instance
            .jobs()
            .iter()
            .filter(|j| j.id > 6)
            .collect();
        assert_eq!(bombs.len(), 12);
        for b in bombs {
            assert_eq!(b.pred_proc, out.x_bomb);
            assert_eq!(b.true_proc, out.x_bomb);
        }
        // x_bomb is the minimum remaining volume; with pred-keyed SRPT the
        // smallest phase job is untouched, so it is exactly lambda^0 = 1.
        assert_eq!(out.x_bomb, rint(1));
    }

    #[test]
    fn two_bins_victim_is_driven_but_stays_within_its_guarantee() {
        use crate::analysis::theta;
        use crate::policy::TwoBinsPolicy;
        let mu = rat(3, 2);
        let cfg = AdversaryConfig {
            mu: mu.clone(),
            phases: 4,
            bombardment_count: 30,
        };
        let victim_mu = mu.clone();
        let out = run_adversary(&cfg, move || {
            Box::new(TwoBinsPolicy::new(victim_mu.clone()))
        })
        .unwrap();
        assert!(out.ratio_lower_bound >= Rat::one());
        // the robust policy keeps its proven bound even here
        let (srpt_run, _) = srpt(&out.instance).unwrap();
        let factor = rint(2) * theta(&mu);
        assert!(out.victim_flow <= factor * srpt_run.flow_weighted);
    }

    #[test]
    fn victim_never_beats_clairvoyant_srpt_on_realized_instance() {
        let cfg = AdversaryConfig {
            mu: rat(3, 2),
            phases: 3,
            bombardment_count: 5,
        };
        let out = run_adversary(&cfg, pred_srpt).unwrap();
        let (srpt_run, _) = srpt(&out.instance).unwrap();
        assert!(out.victim_flow >= srpt_run.flow_weighted);
        assert!(out.ratio_lower_bound >= Rat::one());
    }

    #[test]
    fn meta_file_mentions_key_parameters() {
        let cfg = AdversaryConfig {
            mu: rat(3, 2),
            phases: 2,
            bombardment_count: 3,
        };
        let out = run_adversary(&cfg, pred_srpt).unwrap();
        let meta = meta_to_string(&cfg, &out);
        assert!(meta.contains("lambda=5"));
        assert!(meta.contains("phases=2"));
        assert!(meta.contains("x_bomb="));
        assert!(meta.contains("phase i=1"));
    }
}
