//! Unweighted robust policy built on one full/partial bin pair.
//!
//! Releases go to the full bin at top priority and are rotated against their
//! violations; whenever the full bin outgrows the partial bin, the full
//! bin's top moves over (so transfers keep `|F| <= |P|` outside hooks); the
//! partial bin is processed LIFO. The policy never sees true processing
//! times, so the priority order is only "quasi-SRPT": the prediction-derived
//! upper bound of any lower-priority job exceeds the lower bound of any
//! higher-priority one.

use num_traits::One;

use crate::model::JobId;
use crate::policy::bins::BinPair;
use crate::rat::Rat;
use crate::sim::{
    JobView, Policy, PolicyError, PolicyEvent, PolicySnapshot, TwoBinsSnapshot,
};

pub struct TwoBinsPolicy {
    mu: Rat,
    pair: BinPair,
}

impl TwoBinsPolicy {
    pub fn new(mu: Rat) -> Self {
        Self::with_rotation(mu, true)
    }

    /// `rotation = false` skips the violation-fixing rotation at release;
    /// used to demonstrate that the invariant checkers are not vacuous.
    pub fn with_rotation(mu: Rat, rotation: bool) -> Self {
        assert!(mu >= Rat::one(), "distortion bound must be >= 1");
        TwoBinsPolicy {
            mu: mu.clone(),
            pair: BinPair::new(mu, rotation),
        }
    }
}

impl Policy for TwoBinsPolicy {
    fn name(&self) -> &'static str {
        "two-bins"
    }

    fn on_release(&mut self, job: &JobView, _now: &Rat) -> Result<Vec<PolicyEvent>, PolicyError> {
        if !job.weight.is_one() {
            return Err(PolicyError::NonUnitWeight(job.id));
        }
        if self.pair.contains(job.id) {
            return Err(PolicyError::DuplicateRelease(job.id));
        }
        let rotated = self.pair.release(job.id, job.pred_proc.clone());
        Ok(if rotated {
            vec![PolicyEvent::Rotated { job_id: job.id }]
        } else {
            Vec::new()
        })
    }

    fn on_complete(&mut self, job_id: JobId, _now: &Rat) -> Result<(), PolicyError> {
        self.pair.complete_top(job_id)
    }

    fn rebalance(&mut self, _now: &Rat) -> Result<Vec<PolicyEvent>, PolicyError> {
        let mut events = Vec::new();
        while self.pair.needs_transfer() {
            let id = self.pair.transfer_one();
            events.push(PolicyEvent::Transferred { job_id: id });
        }
        Ok(events)
    }

    fn select(&mut self, _now: &Rat) -> Result<Option<JobId>, PolicyError> {
        match self.pair.top() {
            Some(id) => Ok(Some(id)),
            None if self.pair.is_empty() => Ok(None),
            None => Err(PolicyError::InternalInconsistency(format!(
                "{} full jobs pending with an empty partial bin",
                self.pair.full_count()
            ))),
        }
    }

    fn snapshot(&self, _now: &Rat) -> PolicySnapshot {
        PolicySnapshot::TwoBins(TwoBinsSnapshot {
            mu: self.mu.clone(),
            full: self.pair.snapshot_full(),
            partial: self.pair.snapshot_part(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_instance, Job};
    use crate::rat::{rat, rint};
    use crate::sim::{simulate, SimOptions, TraceKind};

    fn view(id: JobId, pred: i64) -> JobView {
        JobView {
            id,
            release: rint(0),
            pred_proc: rint(pred),
            weight: rint(1),
        }
    }

    #[test]
    fn forced_transfer_then_lifo_selection() {
        let mut p = TwoBinsPolicy::new(rint(2));
        let now = rint(0);
        p.on_release(&view(1, 4), &now).unwrap();
        // (|F|, |P|) = (1, 0): rebalance forces one transfer
        let ev = p.rebalance(&now).unwrap();
        assert_eq!(ev, vec![PolicyEvent::Transferred { job_id: 1 }]);
        assert_eq!(p.select(&now).unwrap(), Some(1));

        p.on_release(&view(2, 4), &now).unwrap();
        p.on_release(&view(3, 4), &now).unwrap();
        // (2, 1) -> one transfer -> (1, 2); the full bin's top (job 3) moves
        let ev = p.rebalance(&now).unwrap();
        assert_eq!(ev, vec![PolicyEvent::Transferred { job_id: 3 }]);
        // LIFO: the most recently transferred job is processed
        assert_eq!(p.select(&now).unwrap(), Some(3));
        assert!(p.rebalance(&now).unwrap().is_empty());
    }

    #[test]
    fn completion_retriggers_transfer() {
        let mut p = TwoBinsPolicy::new(rint(2));
        let now = rint(0);
        for id in 1..=4 {
            p.on_release(&view(id, 2), &now).unwrap();
        }
        p.rebalance(&now).unwrap(); // (2, 2)
        let top = p.select(&now).unwrap().unwrap();
        p.on_complete(top, &now).unwrap(); // (2, 1): guard fires
        let ev = p.rebalance(&now).unwrap();
        assert_eq!(ev.len(), 1);

        let top = p.select(&now).unwrap().unwrap();
        p.on_complete(top, &now).unwrap(); // (1, 1): guard false, no move
        assert!(p.rebalance(&now).unwrap().is_empty());
    }

    #[test]
    fn rejects_weighted_and_duplicate_releases() {
        let mut p = TwoBinsPolicy::new(rint(2));
        let now = rint(0);
        let heavy = JobView {
            id: 9,
            release: rint(0),
            pred_proc: rint(1),
            weight: rint(2),
        };
        assert_eq!(
            p.on_release(&heavy, &now),
            Err(PolicyError::NonUnitWeight(9))
        );
        p.on_release(&view(1, 1), &now).unwrap();
        assert_eq!(
            p.on_release(&view(1, 1), &now),
            Err(PolicyError::DuplicateRelease(1))
        );
    }

    #[test]
    fn empty_policy_selects_none() {
        let mut p = TwoBinsPolicy::new(rat(3, 2));
        assert_eq!(p.select(&rint(0)).unwrap(), None);
    }

    #[test]
    fn rotation_appears_on_trace() {
        // second release (pred 8) violates against the first (pred 1)
        let inst = make_instance(
            vec![
                Job::new(1, rint(0), rint(1), rint(1), rint(1)),
                Job::new(2, rint(0), rint(8), rint(8), rint(1)),
            ],
            rint(2),
        )
        .unwrap();
        let mut p = TwoBinsPolicy::new(rint(2));
        let result = simulate(&inst, &mut p, &mut [], &SimOptions::default()).unwrap();
        assert!(result.trace.iter().any(|r| r.kind == TraceKind::Rotate));
        assert!(result.trace.iter().any(|r| r.kind == TraceKind::Transfer));
    }

    #[test]
    fn full_run_completes_everything() {
        let inst = make_instance(
            vec![
                Job::new(1, rint(0), rint(4), rint(6), rint(1)),
                Job::new(2, rint(1), rint(1), rint(1), rint(1)),
                Job::new(3, rint(2), rint(3), rint(5), rint(1)),
                Job::new(4, rint(9), rint(2), rint(2), rint(1)),
            ],
            rint(2),
        )
        .unwrap();
        let mut p = TwoBinsPolicy::new(rint(2));
        let result = simulate(&inst, &mut p, &mut [], &SimOptions::default()).unwrap();
        assert_eq!(result.completions.len(), 4);
        // snapshot balance outside hooks: |F| <= |P| whenever pending
        for (_, snap) in &result.snapshots {
            if let PolicySnapshot::TwoBins(s) = snap {
                if !s.full.jobs.is_empty() || !s.partial.jobs.is_empty() {
                    assert!(s.full.jobs.len() <= s.partial.jobs.len());
                }
            }
        }
    }
}
