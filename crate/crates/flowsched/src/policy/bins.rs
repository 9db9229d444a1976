//! Shared full/partial bin-pair mechanics.
//!
//! Jobs enter the full bin at top priority; a release-time rotation removes
//! every violation the newcomer creates, so that outside hooks the full bin
//! stays free of pairs provably out of SRPT order. The partial bin is a LIFO
//! stack fed by transfers from the full bin whenever the full side outgrows
//! the partial side; only the partial bin's top is ever processed.

use num_traits::One;

use crate::model::JobId;
use crate::rat::Rat;
use crate::sim::{BinSnapshot, PolicyError};

/// Whether a higher-priority job with prediction `pred_high` is provably
/// longer than a lower-priority job with prediction `pred_low`, i.e. the
/// pair is ordered against SRPT no matter how the true times fall.
///
/// For `mu > 1` true times live in `[pred, mu*pred)`, so the non-strict
/// comparison `mu * pred_low <= pred_high` already implies a strict gap
/// between the true times. At `mu = 1` predictions are exact (`true ==
/// pred`) and provability needs the strict form; otherwise two equal
/// predictions would count as a violation in both orders, which no
/// reordering could ever fix.
pub(crate) fn is_violation(mu: &Rat, pred_high: &Rat, pred_low: &Rat) -> bool {
    if mu.is_one() {
        pred_low < pred_high
    } else {
        mu * pred_low <= *pred_high
    }
}

/// `jobs[k]` holds priority `k+1`; the vector is the priority bijection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BinJob {
    pub id: JobId,
    pub pred: Rat,
}

#[derive(Debug, Clone)]
pub(crate) struct BinPair {
    mu: Rat,
    rotation_enabled: bool,
    full: Vec<BinJob>,
    part: Vec<BinJob>,
}

impl BinPair {
    pub fn new(mu: Rat, rotation_enabled: bool) -> Self {
        BinPair {
            mu,
            rotation_enabled,
            full: Vec::new(),
            part: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.full.is_empty() && self.part.is_empty()
    }

    pub fn full_count(&self) -> usize {
        self.full.len()
    }

    pub fn part_count(&self) -> usize {
        self.part.len()
    }

    pub fn contains(&self, id: JobId) -> bool {
        self.full.iter().chain(&self.part).any(|j| j.id == id)
    }

    /// Insert at top priority of the full bin, then rotate away the
    /// violations the newcomer causes: with violators `q_1..q_m` in
    /// decreasing priority order, the newcomer takes `q_m`'s priority and
    /// each violator moves one violation slot up (`q_1` to the top).
    /// Returns whether a rotation happened.
    pub fn release(&mut self, id: JobId, pred: Rat) -> bool {
        self.full.push(BinJob {
            id,
            pred: pred.clone(),
        });
        if !self.rotation_enabled {
            return false;
        }
        let top = self.full.len() - 1;
        let mut positions: Vec<usize> = (0..top)
            .filter(|&k| is_violation(&self.mu, &pred, &self.full[k].pred))
            .collect();
        if positions.is_empty() {
            return false;
        }
        positions.push(top);
        let newcomer = self.full[top].clone();
        for k in (1..positions.len()).rev() {
            self.full[positions[k]] = self.full[positions[k - 1]].clone();
        }
        self.full[positions[0]] = newcomer;
        true
    }

    pub fn needs_transfer(&self) -> bool {
        self.full.len() > self.part.len()
    }

    /// Move the top of the full bin to the top of the partial bin.
    pub fn transfer_one(&mut self) -> JobId {
        let job = self.full.pop().expect("transfer from nonempty full bin");
        let id = job.id;
        self.part.push(job);
        id
    }

    /// The job that gets processed: LIFO top of the partial bin.
    pub fn top(&self) -> Option<JobId> {
        self.part.last().map(|j| j.id)
    }

    pub fn complete_top(&mut self, id: JobId) -> Result<(), PolicyError> {
        match self.part.last() {
            Some(job) if job.id == id => {
                self.part.pop();
                Ok(())
            }
            _ => Err(PolicyError::CompletedNonTop(id)),
        }
    }

    pub fn snapshot_full(&self) -> BinSnapshot {
        BinSnapshot {
            jobs: self.full.iter().map(|j| (j.id, j.pred.clone())).collect(),
        }
    }

    pub fn snapshot_part(&self) -> BinSnapshot {
        BinSnapshot {
            jobs: self.part.iter().map(|j| (j.id, j.pred.clone())).collect(),
        }
    }

    #[cfg(test)]
    pub fn with_full_bin(mu: Rat, jobs: Vec<(JobId, Rat)>) -> Self {
        BinPair {
            mu,
            rotation_enabled: true,
            full: jobs
                .into_iter()
                .map(|(id, pred)| BinJob { id, pred })
                .collect(),
            part: Vec::new(),
        }
    }

    #[cfg(test)]
    pub fn full_order(&self) -> Vec<JobId> {
        self.full.iter().map(|j| j.id).collect()
    }
}
