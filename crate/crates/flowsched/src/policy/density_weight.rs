//! Weighted policy balancing weight against estimated density.
//!
//! Weights are rounded up to powers of `lambda = 16*mu + 6`; each job also
//! gets an estimated inverse-density class `eclass = floor(log2(pred / w))`
//! computed on the rounded weight. At selection time the policy finds the
//! largest weight class `i` with a pending job, the smallest eclass `j`
//! whose total rounded weight reaches `lambda^i`, and inside eclass `j` the
//! largest pending weight class; within that cell a partially-processed job
//! is preferred (keeping at most one partial job per cell) and full jobs
//! queue by release time, then id.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::model::JobId;
use crate::rat::{ceil_to_power, floor_log, rat, rat_pow, Rat, RatError};
use crate::sim::{
    DensityWeightEntry, DensityWeightSnapshot, JobView, Policy, PolicyError, PolicyEvent,
    PolicySnapshot,
};

/// Class assignment of a single job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedJob {
    pub job_id: JobId,
    pub wclass: i64,
    pub eclass: i64,
    pub rounded_weight: Rat,
    pub partial: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error(transparent)]
    Rat(#[from] RatError),
}

/// Round the weight up to a power of `lambda` and derive both classes.
pub fn classify(job: &JobView, lambda: &Rat) -> Result<ClassifiedJob, ClassifyError> {
    let (wclass, rounded_weight) = ceil_to_power(&job.weight, lambda)?;
    let eclass = floor_log(&(&job.pred_proc / &rounded_weight), &rat(2, 1))?;
    Ok(ClassifiedJob {
        job_id: job.id,
        wclass,
        eclass,
        rounded_weight,
        partial: false,
    })
}

#[derive(Debug, Default)]
struct Cell {
    partial: Option<JobId>,
    /// Full jobs ordered by (release, id).
    full: Vec<(Rat, JobId)>,
}

impl Cell {
    fn is_empty(&self) -> bool {
        self.partial.is_none() && self.full.is_empty()
    }
}

struct JobClasses {
    wclass: i64,
    eclass: i64,
    rounded: Rat,
}

pub struct DensityWeightPolicy {
    lambda: Rat,
    /// Cells keyed by (eclass, wclass) so the per-eclass wclass maximum is a
    /// range query.
    cells: BTreeMap<(i64, i64), Cell>,
    info: HashMap<JobId, JobClasses>,
    /// Total pending rounded weight per eclass.
    eclass_weight: BTreeMap<i64, Rat>,
    /// Pending job count per wclass.
    wclass_count: BTreeMap<i64, usize>,
}

impl DensityWeightPolicy {
    /// Default parameterization `lambda = 16*mu + 6`.
    pub fn new(mu: &Rat) -> Self {
        Self::with_lambda(rat(16, 1) * mu + rat(6, 1))
    }

    /// Explicit rounding base, for parameter sweeps.
    pub fn with_lambda(lambda: Rat) -> Self {
        assert!(lambda > Rat::one(), "rounding base must exceed 1");
        DensityWeightPolicy {
            lambda,
            cells: BTreeMap::new(),
            info: HashMap::new(),
            eclass_weight: BTreeMap::new(),
            wclass_count: BTreeMap::new(),
        }
    }

    pub fn lambda(&self) -> &Rat {
        &self.lambda
    }

    fn remove_job(&mut self, job_id: JobId) -> Result<(), PolicyError> {
        let classes = self
            .info
            .remove(&job_id)
            .ok_or(PolicyError::UnknownJob(job_id))?;
        let key = (classes.eclass, classes.wclass);
        let cell = self.cells.get_mut(&key).expect("cell exists for job");
        if cell.partial == Some(job_id) {
            cell.partial = None;
        } else if let Some(pos) = cell.full.iter().position(|(_, id)| *id == job_id) {
            cell.full.remove(pos);
        } else {
            return Err(PolicyError::UnknownJob(job_id));
        }
        if cell.is_empty() {
            self.cells.remove(&key);
        }
        let total = self.eclass_weight.get_mut(&classes.eclass).expect("eclass total");
        *total -= &classes.rounded;
        if total.is_zero() {
            self.eclass_weight.remove(&classes.eclass);
        }
        let count = self.wclass_count.get_mut(&classes.wclass).expect("wclass count");
        *count -= 1;
        if *count == 0 {
            self.wclass_count.remove(&classes.wclass);
        }
        Ok(())
    }
}

impl Policy for DensityWeightPolicy {
    fn name(&self) -> &'static str {
        "density-weight"
    }

    fn on_release(&mut self, job: &JobView, _now: &Rat) -> Result<Vec<PolicyEvent>, PolicyError> {
        if self.info.contains_key(&job.id) {
            return Err(PolicyError::DuplicateRelease(job.id));
        }
        let classified = classify(job, &self.lambda)
            .map_err(|e| PolicyError::InternalInconsistency(e.to_string()))?;
        let cell = self
            .cells
            .entry((classified.eclass, classified.wclass))
            .or_default();
        let entry = (job.release.clone(), job.id);
        let pos = cell.full.partition_point(|e| *e < entry);
        cell.full.insert(pos, entry);
        *self
            .eclass_weight
            .entry(classified.eclass)
            .or_insert_with(Rat::zero) += &classified.rounded_weight;
        *self.wclass_count.entry(classified.wclass).or_insert(0) += 1;
        self.info.insert(
            job.id,
            JobClasses {
                wclass: classified.wclass,
                eclass: classified.eclass,
                rounded: classified.rounded_weight,
            },
        );
        Ok(Vec::new())
    }

    fn on_processed(&mut self, job_id: JobId, _amount: &Rat, _now: &Rat) {
        let Some(classes) = self.info.get(&job_id) else {
            return;
        };
        let cell = self
            .cells
            .get_mut(&(classes.eclass, classes.wclass))
            .expect("cell exists for processed job");
        if cell.partial == Some(job_id) {
            return;
        }
        // Selection prefers the partial job, so a second one can only start
        // processing once the first is gone.
        debug_assert!(cell.partial.is_none());
        if let Some(pos) = cell.full.iter().position(|(_, id)| *id == job_id) {
            cell.full.remove(pos);
            cell.partial = Some(job_id);
        }
    }

    fn on_complete(&mut self, job_id: JobId, _now: &Rat) -> Result<(), PolicyError> {
        self.remove_job(job_id)
    }

    fn select(&mut self, _now: &Rat) -> Result<Option<JobId>, PolicyError> {
        let Some((&top_wclass, _)) = self.wclass_count.iter().next_back() else {
            return Ok(None);
        };
        let threshold = rat_pow(&self.lambda, top_wclass);
        let eclass = self
            .eclass_weight
            .iter()
            .find(|(_, total)| **total >= threshold)
            .map(|(&e, _)| e)
            .ok_or_else(|| {
                PolicyError::InternalInconsistency(
                    "no eclass reaches the top weight-class threshold".to_string(),
                )
            })?;
        let ((_, _), cell) = self
            .cells
            .range((eclass, i64::MIN)..=(eclass, i64::MAX))
            .next_back()
            .expect("nonempty eclass has a cell");
        let choice = cell
            .partial
            .or_else(|| cell.full.first().map(|(_, id)| *id))
            .expect("nonempty cell");
        Ok(Some(choice))
    }

    fn snapshot(&self, _now: &Rat) -> PolicySnapshot {
        let mut jobs: Vec<DensityWeightEntry> = Vec::with_capacity(self.info.len());
        for ((eclass, wclass), cell) in &self.cells {
            if let Some(id) = cell.partial {
                jobs.push(DensityWeightEntry {
                    job_id: id,
                    wclass: *wclass,
                    eclass: *eclass,
                    partial: true,
                    rounded_weight: self.info[&id].rounded.clone(),
                });
            }
            for (_, id) in &cell.full {
                jobs.push(DensityWeightEntry {
                    job_id: *id,
                    wclass: *wclass,
                    eclass: *eclass,
                    partial: false,
                    rounded_weight: self.info[id].rounded.clone(),
                });
            }
        }
        jobs.sort_by_key(|e| e.job_id);
        PolicySnapshot::DensityWeight(DensityWeightSnapshot {
            lambda: self.lambda.clone(),
            jobs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_instance, Job};
    use crate::rat::{rat, rint};
    use crate::sim::{simulate, SimOptions};

    fn view(id: JobId, pred: Rat, weight: Rat) -> JobView {
        JobView {
            id,
            release: rint(0),
            pred_proc: pred,
            weight,
        }
    }

    #[test]
    fn classify_examples() {
        let lambda = rint(38); // 16*2 + 6
        let c = classify(&view(1, rint(8), rint(1)), &lambda).unwrap();
        assert_eq!((c.wclass, c.rounded_weight.clone(), c.eclass), (0, rint(1), 3));

        let c = classify(&view(2, rint(3), rint(2)), &lambda).unwrap();
        // rounded to 38; floor(log2(3/38)) = -4 since 1/16 <= 3/38 < 1/8
        assert_eq!((c.wclass, c.rounded_weight.clone(), c.eclass), (1, rint(38), -4));

        let c = classify(&view(3, rint(38), rint(38)), &lambda).unwrap();
        assert_eq!((c.wclass, c.rounded_weight.clone(), c.eclass), (1, rint(38), 0));
    }

    #[test]
    fn rounded_weight_bracket_invariant() {
        use crate::workloads::SplitMix64;
        let lambda = rint(38);
        let mut rng = SplitMix64::new(0xc1a55);
        for id in 0..300 {
            // stretch across negative weight classes too (w down to 1/2000)
            let w = if id % 3 == 0 {
                rat(1, 1 + rng.below(2000) as i64)
            } else {
                rat(1 + rng.below(500) as i64, 1 + rng.below(20) as i64)
            };
            let p = rat(1 + rng.below(500) as i64, 1 + rng.below(20) as i64);
            let c = classify(&view(id, p.clone(), w.clone()), &lambda).unwrap();
            assert_eq!(c.rounded_weight, rat_pow(&lambda, c.wclass));
            assert!(&c.rounded_weight / &lambda < w && w <= c.rounded_weight);
            assert_eq!(
                c.eclass,
                floor_log(&(p / &c.rounded_weight), &rint(2)).unwrap()
            );
        }
    }

    #[test]
    fn selection_skips_light_eclasses() {
        // A: wclass 1 (weight 2 -> rounded 38), eclass 2;
        // B: wclass 0 (weight 1), eclass 0. Threshold lambda^1 = 38: eclass 0
        // holds weight 1 < 38, eclass 2 holds 38 -> pick A.
        let mut p = DensityWeightPolicy::new(&rint(2));
        let now = rint(0);
        p.on_release(&view(1, rint(152), rint(2)), &now).unwrap(); // 152/38 = 4 -> eclass 2
        p.on_release(&view(2, rint(1), rint(1)), &now).unwrap(); // eclass 0
        assert_eq!(p.select(&now).unwrap(), Some(1));
    }

    #[test]
    fn single_job_is_selected() {
        let mut p = DensityWeightPolicy::new(&rint(2));
        let now = rint(0);
        p.on_release(&view(7, rint(5), rat(1, 3)), &now).unwrap();
        assert_eq!(p.select(&now).unwrap(), Some(7));
        assert_eq!(p.select(&now).unwrap(), Some(7));
    }

    #[test]
    fn partial_job_preferred_within_cell() {
        let mut p = DensityWeightPolicy::new(&rint(2));
        let now = rint(0);
        // same cell: equal weight and same eclass
        p.on_release(&view(1, rint(8), rint(1)), &now).unwrap();
        p.on_release(&view(2, rint(8), rint(1)), &now).unwrap();
        // FIFO tie-break first
        assert_eq!(p.select(&now).unwrap(), Some(1));
        p.on_processed(1, &rint(1), &rint(1));
        // job 1 is now the cell's partial job and keeps preference
        assert_eq!(p.select(&rint(1)).unwrap(), Some(1));
        p.on_complete(1, &rint(2)).unwrap();
        assert_eq!(p.select(&rint(2)).unwrap(), Some(2));
        p.on_complete(2, &rint(3)).unwrap();
        assert_eq!(p.select(&rint(3)).unwrap(), None);
    }

    #[test]
    fn release_complete_inverse_and_unknown_rejected() {
        let mut p = DensityWeightPolicy::new(&rint(2));
        let now = rint(0);
        p.on_release(&view(1, rint(2), rint(1)), &now).unwrap();
        p.on_complete(1, &now).unwrap();
        assert_eq!(p.select(&now).unwrap(), None);
        assert!(p.cells.is_empty());
        assert!(p.eclass_weight.is_empty());
        assert!(p.wclass_count.is_empty());
        assert_eq!(p.on_complete(1, &now), Err(PolicyError::UnknownJob(1)));
        p.on_release(&view(2, rint(2), rint(1)), &now).unwrap();
        assert_eq!(
            p.on_release(&view(2, rint(2), rint(1)), &now),
            Err(PolicyError::DuplicateRelease(2))
        );
    }

    #[test]
    fn threshold_soundness_on_random_states() {
        use crate::workloads::SplitMix64;
        let mut rng = SplitMix64::new(0xd00d);
        for _ in 0..50 {
            let mut p = DensityWeightPolicy::new(&rat(3, 2));
            let now = rint(0);
            let n = 1 + rng.below(12);
            for id in 0..n {
                let w = rat(1 + rng.below(40) as i64, 1 + rng.below(3) as i64);
                let pred = rat(1 + rng.below(40) as i64, 1);
                p.on_release(&view(id, pred, w), &now).unwrap();
            }
            let chosen = p.select(&now).unwrap().unwrap();
            let top_wclass = *p.wclass_count.keys().next_back().unwrap();
            let threshold = rat_pow(&p.lambda, top_wclass);
            let chosen_eclass = p.info[&chosen].eclass;
            // the chosen eclass passes the threshold, all lower ones fail
            assert!(p.eclass_weight[&chosen_eclass] >= threshold);
            for (e, total) in p.eclass_weight.range(..chosen_eclass) {
                assert!(*total < threshold, "eclass {e} passes unexpectedly");
            }
            // selection monotonicity: chosen has the max wclass in its eclass
            let max_w = p
                .info
                .values()
                .filter(|c| c.eclass == chosen_eclass)
                .map(|c| c.wclass)
                .max()
                .unwrap();
            assert_eq!(p.info[&chosen].wclass, max_w);
        }
    }

    #[test]
    fn engine_run_marks_partials_and_completes() {
        let inst = make_instance(
            vec![
                Job::new(1, rint(0), rint(4), rint(5), rint(1)),
                Job::new(2, rint(1), rint(2), rint(2), rint(6)),
                Job::new(3, rint(1), rint(3), rint(4), rat(1, 2)),
            ],
            rint(2),
        )
        .unwrap();
        let mut p = DensityWeightPolicy::new(&rint(2));
        let result = simulate(&inst, &mut p, &mut [], &SimOptions::default()).unwrap();
        assert_eq!(result.completions.len(), 3);
        // at least one snapshot shows a partial job
        assert!(result.snapshots.iter().any(|(_, s)| match s {
            PolicySnapshot::DensityWeight(d) => d.jobs.iter().any(|e| e.partial),
            _ => false,
        }));
    }
}
