//! Weighted policy: one full/partial bin pair per power-of-two weight class.
//!
//! Weights are rounded up to powers of 2; a job of rounded weight `2^i`
//! lives in superbin `i`, which runs the two-bins mechanics unchanged (the
//! weighted balance condition `w(F_i) <= w(P_i)` coincides with the count
//! condition because weights are uniform within a superbin). Processing goes
//! to the superbin whose partial bin is heaviest, ties to the higher class.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;

use crate::model::JobId;
use crate::policy::bins::BinPair;
use crate::rat::{ceil_to_power, rat, rat_pow, Rat};
use crate::sim::{
    JobView, Policy, PolicyError, PolicyEvent, PolicySnapshot, SuperbinSnapshot, SuperbinsSnapshot,
};

pub struct SuperbinsPolicy {
    mu: Rat,
    bins: BTreeMap<i64, BinPair>,
    class_of: HashMap<JobId, i64>,
}

impl SuperbinsPolicy {
    pub fn new(mu: Rat) -> Self {
        assert!(mu >= Rat::one(), "distortion bound must be >= 1");
        SuperbinsPolicy {
            mu,
            bins: BTreeMap::new(),
            class_of: HashMap::new(),
        }
    }

    fn rounded(class: i64) -> Rat {
        rat_pow(&rat(2, 1), class)
    }
}

impl Policy for SuperbinsPolicy {
    fn name(&self) -> &'static str {
        "superbins"
    }

    fn on_release(&mut self, job: &JobView, _now: &Rat) -> Result<Vec<PolicyEvent>, PolicyError> {
        if self.class_of.contains_key(&job.id) {
            return Err(PolicyError::DuplicateRelease(job.id));
        }
        let (class, _) = ceil_to_power(&job.weight, &rat(2, 1))
            .map_err(|e| PolicyError::InternalInconsistency(e.to_string()))?;
        self.class_of.insert(job.id, class);
        let pair = self
            .bins
            .entry(class)
            .or_insert_with(|| BinPair::new(self.mu.clone(), true));
        let rotated = pair.release(job.id, job.pred_proc.clone());
        Ok(if rotated {
            vec![PolicyEvent::Rotated { job_id: job.id }]
        } else {
            Vec::new()
        })
    }

    fn on_complete(&mut self, job_id: JobId, _now: &Rat) -> Result<(), PolicyError> {
        let class = self
            .class_of
            .remove(&job_id)
            .ok_or(PolicyError::UnknownJob(job_id))?;
        let pair = self
            .bins
            .get_mut(&class)
            .ok_or(PolicyError::UnknownJob(job_id))?;
        pair.complete_top(job_id)?;
        if pair.is_empty() {
            self.bins.remove(&class);
        }
        Ok(())
    }

    fn rebalance(&mut self, _now: &Rat) -> Result<Vec<PolicyEvent>, PolicyError> {
        let mut events = Vec::new();
        for pair in self.bins.values_mut() {
            while pair.needs_transfer() {
                let id = pair.transfer_one();
                events.push(PolicyEvent::Transferred { job_id: id });
            }
        }
        Ok(events)
    }

    fn select(&mut self, _now: &Rat) -> Result<Option<JobId>, PolicyError> {
        // arg max over classes of w(P_i) = 2^i * |P_i|; ascending iteration
        // with >= makes the highest class win ties.
        let mut best: Option<(Rat, i64)> = None;
        for (&class, pair) in &self.bins {
            let weight = Self::rounded(class) * rat(pair.part_count() as i64, 1);
            if best.as_ref().map(|(w, _)| weight >= *w).unwrap_or(true) {
                best = Some((weight, class));
            }
        }
        match best {
            None => Ok(None),
            Some((_, class)) => self.bins[&class].top().map(Some).ok_or_else(|| {
                PolicyError::InternalInconsistency(format!(
                    "superbin {class} nonempty with empty partial bin"
                ))
            }),
        }
    }

    fn snapshot(&self, _now: &Rat) -> PolicySnapshot {
        PolicySnapshot::Superbins(SuperbinsSnapshot {
            mu: self.mu.clone(),
            bins: self
                .bins
                .iter()
                .map(|(&class, pair)| {
                    (
                        class,
                        SuperbinSnapshot {
                            rounded_weight: Self::rounded(class),
                            full: pair.snapshot_full(),
                            partial: pair.snapshot_part(),
                        },
                    )
                })
                .collect(),
        })
    }
}
