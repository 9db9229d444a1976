//! Invariant checkers and competitive-ratio reporting.
//!
//! The structural checkers (no violations, partial uniqueness, bin shape)
//! run as engine hooks after every event; the series checkers (covered
//! volume, pending bounds) run post-hoc against a reference run, sampling
//! the union of both runs' event times since all compared quantities are
//! piecewise constant between events.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::model::JobId;
use crate::oracles::PendingSeries;
use crate::rat::{format_rat, rat, Rat};
use crate::sim::{CheckerHook, PendingStats, PolicySnapshot, SimResult};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("checker `{0}` does not apply to this policy kind")]
    WrongPolicyKind(&'static str),
    #[error("series come from different instances or incomplete runs")]
    SeriesMismatch,
    #[error("reference objective is zero while the algorithm's is not")]
    ZeroOpt,
    #[error("run was simulated without snapshot recording")]
    MissingSnapshots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
}

/// Outcome of one invariant checker over one run.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub checker: String,
    pub status: CheckStatus,
    /// Present exactly when `status == Fail`.
    pub first_failure: Option<(usize, String)>,
    /// Measured extremal values, e.g. `max_ratio`.
    pub extremes: BTreeMap<String, Rat>,
}

impl CheckReport {
    fn pass(checker: &str) -> Self {
        CheckReport {
            checker: checker.to_string(),
            status: CheckStatus::Pass,
            first_failure: None,
            extremes: BTreeMap::new(),
        }
    }

    fn fail(checker: &str, event: usize, message: String) -> Self {
        CheckReport {
            checker: checker.to_string(),
            status: CheckStatus::Fail,
            first_failure: Some((event, message)),
            extremes: BTreeMap::new(),
        }
    }

    fn with_extreme(mut self, name: &str, value: Option<Rat>) -> Self {
        if let Some(v) = value {
            self.extremes.insert(name.to_string(), v);
        }
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, CheckStatus::Pass)
    }
}

/// `theta = ceil(mu^2)`, the covered-volume bar multiplier.
pub fn theta(mu: &Rat) -> Rat {
    (mu * mu).ceil()
}

fn violation_in_bin(mu: &Rat, jobs: &[(JobId, Rat)]) -> Option<String> {
    // ordered pair (q1, q2) with prio(q1) > prio(q2), provably out of SRPT
    // order (non-strict mu*pred(q2) <= pred(q1); strict when mu = 1)
    for hi in 0..jobs.len() {
        for lo in 0..hi {
            if crate::policy::bins::is_violation(mu, &jobs[hi].1, &jobs[lo].1) {
                return Some(format!(
                    "violation: job {} (pred {}) outranked by job {} (pred {})",
                    jobs[lo].0,
                    format_rat(&jobs[lo].1),
                    jobs[hi].0,
                    format_rat(&jobs[hi].1),
                ));
            }
        }
    }
    None
}

fn no_violations_rule(snap: &PolicySnapshot) -> Result<Option<String>, AnalysisError> {
    match snap {
        PolicySnapshot::TwoBins(s) => Ok(violation_in_bin(&s.mu, &s.full.jobs)),
        PolicySnapshot::Superbins(s) => {
            for (class, bin) in &s.bins {
                if let Some(msg) = violation_in_bin(&s.mu, &bin.full.jobs) {
                    return Ok(Some(format!("superbin {class}: {msg}")));
                }
            }
            Ok(None)
        }
        _ => Err(AnalysisError::WrongPolicyKind("no-violations")),
    }
}

/// Exhaustive pairwise scan of each full bin for priority pairs provably out
/// of SRPT order.
pub fn check_no_violations(snap: &PolicySnapshot) -> Result<CheckReport, AnalysisError> {
    match no_violations_rule(snap)? {
        None => Ok(CheckReport::pass("no-violations")),
        Some(msg) => Ok(CheckReport::fail("no-violations", 0, msg)),
    }
}

fn partial_uniqueness_rule(snap: &PolicySnapshot) -> Result<Option<String>, AnalysisError> {
    match snap {
        PolicySnapshot::DensityWeight(s) => {
            let mut seen: BTreeSet<(i64, i64)> = BTreeSet::new();
            for entry in s.jobs.iter().filter(|e| e.partial) {
                if !seen.insert((entry.wclass, entry.eclass)) {
                    return Ok(Some(format!(
                        "two partial jobs in cell (wclass {}, eclass {})",
                        entry.wclass, entry.eclass
                    )));
                }
            }
            Ok(None)
        }
        _ => Err(AnalysisError::WrongPolicyKind("partial-uniqueness")),
    }
}

/// At most one partially-processed job per (weight class, eclass) cell.
pub fn check_partial_uniqueness(snap: &PolicySnapshot) -> Result<CheckReport, AnalysisError> {
    match partial_uniqueness_rule(snap)? {
        None => Ok(CheckReport::pass("partial-uniqueness")),
        Some(msg) => Ok(CheckReport::fail("partial-uniqueness", 0, msg)),
    }
}

fn bin_shape_rule(snap: &PolicySnapshot) -> Result<Option<String>, AnalysisError> {
    let mut seen: BTreeSet<JobId> = BTreeSet::new();
    let mut check_pair = |full: &[(JobId, Rat)], part: &[(JobId, Rat)], label: &str| {
        for (id, _) in full.iter().chain(part) {
            if !seen.insert(*id) {
                return Some(format!("{label}: job {id} appears twice"));
            }
        }
        if (!full.is_empty() || !part.is_empty()) && full.len() > part.len() {
            return Some(format!(
                "{label}: full bin ({}) outgrew partial bin ({})",
                full.len(),
                part.len()
            ));
        }
        None
    };
    match snap {
        PolicySnapshot::TwoBins(s) => Ok(check_pair(&s.full.jobs, &s.partial.jobs, "bins")),
        PolicySnapshot::Superbins(s) => {
            for (class, bin) in &s.bins {
                if let Some(msg) =
                    check_pair(&bin.full.jobs, &bin.partial.jobs, &format!("superbin {class}"))
                {
                    return Ok(Some(msg));
                }
            }
            Ok(None)
        }
        _ => Err(AnalysisError::WrongPolicyKind("bin-shape")),
    }
}

/// Priority lists are duplicate-free and the balance `|F| <= |P|` holds in
/// every (super)bin whenever it is nonempty.
pub fn check_bin_shape(snap: &PolicySnapshot) -> Result<CheckReport, AnalysisError> {
    match bin_shape_rule(snap)? {
        None => Ok(CheckReport::pass("bin-shape")),
        Some(msg) => Ok(CheckReport::fail("bin-shape", 0, msg)),
    }
}

/// Per-job cumulative weight bases within each bin, priority ascending
/// (counts for the unweighted policy, rounded weights for superbins).
#[derive(Debug, Clone)]
pub struct CoverageView {
    pub bins: Vec<Vec<(JobId, Rat)>>,
}

impl CoverageView {
    pub fn entries(&self) -> impl Iterator<Item = &(JobId, Rat)> {
        self.bins.iter().flatten()
    }

    pub fn max_wbase(&self) -> Option<&Rat> {
        self.entries().map(|(_, w)| w).max()
    }
}

pub fn coverage_view(snap: &PolicySnapshot) -> Result<CoverageView, AnalysisError> {
    let counted = |jobs: &[(JobId, Rat)]| -> Vec<(JobId, Rat)> {
        jobs.iter()
            .enumerate()
            .map(|(k, (id, _))| (*id, rat(k as i64 + 1, 1)))
            .collect()
    };
    match snap {
        PolicySnapshot::TwoBins(s) => Ok(CoverageView {
            bins: vec![counted(&s.full.jobs), counted(&s.partial.jobs)],
        }),
        PolicySnapshot::Superbins(s) => {
            let mut bins = Vec::new();
            for bin in s.bins.values() {
                for jobs in [&bin.full.jobs, &bin.partial.jobs] {
                    let mut acc = Rat::zero();
                    bins.push(
                        jobs.iter()
                            .map(|(id, _)| {
                                acc += &bin.rounded_weight;
                                (*id, acc.clone())
                            })
                            .collect(),
                    );
                }
            }
            Ok(CoverageView { bins })
        }
        _ => Err(AnalysisError::WrongPolicyKind("coverage-view")),
    }
}

/// Stateful engine hook evaluating a structural rule after every event.
pub struct EventChecker {
    name: &'static str,
    rule: fn(&PolicySnapshot) -> Result<Option<String>, AnalysisError>,
    failure: Option<(usize, String)>,
    events: usize,
}

impl EventChecker {
    fn new(
        name: &'static str,
        rule: fn(&PolicySnapshot) -> Result<Option<String>, AnalysisError>,
    ) -> Self {
        EventChecker {
            name,
            rule,
            failure: None,
            events: 0,
        }
    }

    pub fn report(&self) -> CheckReport {
        match &self.failure {
            None => CheckReport::pass(self.name),
            Some((event, msg)) => CheckReport::fail(self.name, *event, msg.clone()),
        }
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl CheckerHook for EventChecker {
    fn name(&self) -> &str {
        self.name
    }

    fn on_event(&mut self, event: usize, now: &Rat, snap: &PolicySnapshot, _stats: &PendingStats) {
        self.events += 1;
        if self.failure.is_some() {
            return;
        }
        match (self.rule)(snap) {
            Ok(None) => {}
            Ok(Some(msg)) => {
                self.failure = Some((event, format!("t={}: {msg}", format_rat(now))));
            }
            Err(e) => {
                self.failure = Some((event, e.to_string()));
            }
        }
    }
}

pub fn no_violations_hook() -> EventChecker {
    EventChecker::new("no-violations", no_violations_rule)
}

pub fn partial_uniqueness_hook() -> EventChecker {
    EventChecker::new("partial-uniqueness", partial_uniqueness_rule)
}

pub fn bin_shape_hook() -> EventChecker {
    EventChecker::new("bin-shape", bin_shape_rule)
}

fn guard_same_instance(a: &PendingSeries, b: &PendingSeries) -> Result<(), AnalysisError> {
    // Same instance and both non-lazy imply equal job count, total weight
    // and (by work conservation) equal finishing time.
    if a.n_jobs() != b.n_jobs()
        || a.total_weight() != b.total_weight()
        || a.end_time() != b.end_time()
    {
        return Err(AnalysisError::SeriesMismatch);
    }
    Ok(())
}

fn union_times(a: &PendingSeries, b: &PendingSeries) -> Vec<Rat> {
    let mut times: Vec<Rat> = a.times().chain(b.times()).cloned().collect();
    times.sort();
    times.dedup();
    times
}

/// Local pending bound: `delta(t) <= factor * delta*(t)` (or the weighted
/// analogue) at the union of both runs' event times. Records the maximum
/// observed `delta/delta*` ratio.
pub fn check_pending_bound(
    alg: &PendingSeries,
    opt: &PendingSeries,
    factor: &Rat,
    weighted: bool,
) -> Result<CheckReport, AnalysisError> {
    guard_same_instance(alg, opt)?;
    let name = if weighted {
        "pending-bound-weighted"
    } else {
        "pending-bound"
    };
    let mut max_ratio: Option<Rat> = None;
    for (idx, t) in union_times(alg, opt).iter().enumerate() {
        let (d_alg, w_alg) = alg.at(t);
        let (d_opt, w_opt) = opt.at(t);
        let (value, reference) = if weighted {
            (w_alg, w_opt)
        } else {
            (rat(d_alg as i64, 1), rat(d_opt as i64, 1))
        };
        if reference.is_zero() {
            if !value.is_zero() {
                return Ok(CheckReport::fail(
                    name,
                    idx,
                    format!(
                        "t={}: algorithm pending {} while reference is idle",
                        format_rat(t),
                        format_rat(&value)
                    ),
                )
                .with_extreme("max_ratio", max_ratio));
            }
            continue;
        }
        let ratio = &value / &reference;
        if value > factor * &reference {
            return Ok(CheckReport::fail(
                name,
                idx,
                format!(
                    "t={}: {} > {} * {}",
                    format_rat(t),
                    format_rat(&value),
                    format_rat(factor),
                    format_rat(&reference)
                ),
            )
            .with_extreme("max_ratio", Some(ratio)));
        }
        if max_ratio.as_ref().map(|m| ratio > *m).unwrap_or(true) {
            max_ratio = Some(ratio);
        }
    }
    Ok(CheckReport::pass(name).with_extreme("max_ratio", max_ratio))
}

/// Largest pending-count (or pending-weight) ratio against a reference run,
/// sampled at the union of event times; `None` when the reference is never
/// busy at a sampled time.
pub fn max_pending_ratio(
    alg: &PendingSeries,
    opt: &PendingSeries,
    weighted: bool,
) -> Result<Option<Rat>, AnalysisError> {
    guard_same_instance(alg, opt)?;
    let mut max_ratio: Option<Rat> = None;
    for t in union_times(alg, opt) {
        let (d_alg, w_alg) = alg.at(&t);
        let (d_opt, w_opt) = opt.at(&t);
        let (value, reference) = if weighted {
            (w_alg, w_opt)
        } else {
            (rat(d_alg as i64, 1), rat(d_opt as i64, 1))
        };
        if reference.is_zero() {
            continue;
        }
        let ratio = value / reference;
        if max_ratio.as_ref().map(|m| ratio > *m).unwrap_or(true) {
            max_ratio = Some(ratio);
        }
    }
    Ok(max_ratio)
}

fn check_covered_volume(
    result: &SimResult,
    opt: &PendingSeries,
    mu: &Rat,
    weighted: bool,
) -> Result<CheckReport, AnalysisError> {
    let name = if weighted {
        "covered-volume-weighted"
    } else {
        "covered-volume"
    };
    if result.snapshots.is_empty() && !result.trace.is_empty() {
        return Err(AnalysisError::MissingSnapshots);
    }
    for (_, snap) in &result.snapshots {
        let ok = matches!(
            (weighted, snap),
            (false, PolicySnapshot::TwoBins(_)) | (true, PolicySnapshot::Superbins(_))
        );
        if !ok {
            return Err(AnalysisError::WrongPolicyKind(if weighted {
                "covered-volume-weighted"
            } else {
                "covered-volume"
            }));
        }
    }
    let alg_series = PendingSeries::from_sim(result);
    guard_same_instance(&alg_series, opt)?;

    let th = theta(mu);
    let mut times: Vec<Rat> = result
        .snapshots
        .iter()
        .map(|(t, _)| t.clone())
        .chain(opt.times().cloned())
        .collect();
    times.sort();
    times.dedup();

    let mut snap_idx = 0usize;
    let mut max_ratio: Option<Rat> = None;
    for (idx, t) in times.iter().enumerate() {
        while snap_idx + 1 < result.snapshots.len() && result.snapshots[snap_idx + 1].0 <= *t {
            snap_idx += 1;
        }
        let snap = match result.snapshots.get(snap_idx) {
            Some((time, snap)) if time <= t => snap,
            _ => continue, // before the first event: nothing pending
        };
        let view = coverage_view(snap)?;
        let (d_opt, w_opt) = opt.at(t);
        let bound = if weighted {
            &th * &w_opt
        } else {
            &th * rat(d_opt as i64, 1)
        };
        for (job, wbase) in view.entries() {
            if *wbase > bound {
                return Ok(CheckReport::fail(
                    name,
                    idx,
                    format!(
                        "t={}: job {} has wbase {} above bar {}",
                        format_rat(t),
                        job,
                        format_rat(wbase),
                        format_rat(&bound)
                    ),
                )
                .with_extreme("max_ratio", max_ratio));
            }
        }
        if let Some(wbase) = view.max_wbase() {
            if bound.is_positive() {
                let ratio = wbase / &bound;
                if max_ratio.as_ref().map(|m| ratio > *m).unwrap_or(true) {
                    max_ratio = Some(ratio);
                }
            }
        }
    }
    Ok(CheckReport::pass(name).with_extreme("max_ratio", max_ratio))
}

/// Covered-volume invariant for the unweighted two-bins policy: every
/// pending job's within-bin count base stays under `ceil(mu^2) * delta*(t)`.
pub fn check_covered_volume_unweighted(
    result: &SimResult,
    srpt_series: &PendingSeries,
    mu: &Rat,
) -> Result<CheckReport, AnalysisError> {
    check_covered_volume(result, srpt_series, mu, false)
}

/// Weighted analogue for superbins: cumulative rounded weight within each
/// bin stays under `ceil(mu^2) * W*(t)`.
pub fn check_covered_volume_weighted(
    result: &SimResult,
    opt_series: &PendingSeries,
    mu: &Rat,
) -> Result<CheckReport, AnalysisError> {
    check_covered_volume(result, opt_series, mu, true)
}

/// Exact ratio of the algorithm's objective to a reference objective.
pub fn competitive_report(alg_flow: &Rat, opt_value: &Rat) -> Result<Rat, AnalysisError> {
    if opt_value.is_zero() {
        if alg_flow.is_zero() {
            return Ok(Rat::one());
        }
        return Err(AnalysisError::ZeroOpt);
    }
    Ok(alg_flow / opt_value)
}

/// Checker report CSV:
/// `checker,instance_id,status,max_ratio_num,max_ratio_den,first_failure_event`.
pub fn reports_to_csv(rows: &[(String, CheckReport)]) -> String {
    let mut out =
        String::from("checker,instance_id,status,max_ratio_num,max_ratio_den,first_failure_event\n");
    for (instance_id, report) in rows {
        let (num, den) = match report.extremes.get("max_ratio") {
            Some(r) => (r.numer().to_string(), r.denom().to_string()),
            None => (String::new(), String::new()),
        };
        let event = report
            .first_failure
            .as_ref()
            .map(|(e, _)| e.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            report.checker,
            instance_id,
            if report.passed() { "pass" } else { "fail" },
            num,
            den,
            event
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rint;
    use crate::sim::{BinSnapshot, TwoBinsSnapshot};

    fn two_bins_snap(mu: i64, full: Vec<(JobId, i64)>, part: Vec<(JobId, i64)>) -> PolicySnapshot {
        PolicySnapshot::TwoBins(TwoBinsSnapshot {
            mu: rint(mu),
            full: BinSnapshot {
                jobs: full.into_iter().map(|(id, p)| (id, rint(p))).collect(),
            },
            partial: BinSnapshot {
                jobs: part.into_iter().map(|(id, p)| (id, rint(p))).collect(),
            },
        })
    }

    #[test]
    fn no_violations_examples() {
        // priorities ascend along the vec: a (pred 10) at prio 1, b (pred 1)
        // at prio 2: checking (b over a): 2*10 <= 1 fails -> pass
        let snap = two_bins_snap(2, vec![(1, 10), (2, 1)], vec![]);
        assert!(check_no_violations(&snap).unwrap().passed());

        // single-job bin: no pairs
        let snap = two_bins_snap(2, vec![(1, 7)], vec![]);
        assert!(check_no_violations(&snap).unwrap().passed());

        // corrupt state: pred 10 outranks pred 1 with 2*1 <= 10
        let snap = two_bins_snap(2, vec![(2, 1), (1, 10)], vec![]);
        let report = check_no_violations(&snap).unwrap();
        assert!(!report.passed());
        assert!(report.first_failure.is_some());
    }

    #[test]
    fn wrong_policy_kind_rejected() {
        assert!(matches!(
            check_no_violations(&PolicySnapshot::Opaque),
            Err(AnalysisError::WrongPolicyKind("no-violations"))
        ));
        assert!(matches!(
            check_partial_uniqueness(&PolicySnapshot::Opaque),
            Err(AnalysisError::WrongPolicyKind("partial-uniqueness"))
        ));
    }

    #[test]
    fn partial_uniqueness_detects_corrupt_cell() {
        use crate::sim::{DensityWeightEntry, DensityWeightSnapshot};
        let entry = |id, partial| DensityWeightEntry {
            job_id: id,
            wclass: 0,
            eclass: 1,
            partial,
            rounded_weight: rint(1),
        };
        let snap = PolicySnapshot::DensityWeight(DensityWeightSnapshot {
            lambda: rint(38),
            jobs: vec![entry(1, true), entry(2, false)],
        });
        assert!(check_partial_uniqueness(&snap).unwrap().passed());
        let snap = PolicySnapshot::DensityWeight(DensityWeightSnapshot {
            lambda: rint(38),
            jobs: vec![entry(1, true), entry(2, true)],
        });
        assert!(!check_partial_uniqueness(&snap).unwrap().passed());
    }

    #[test]
    fn bin_shape_checks_balance_and_uniqueness() {
        assert!(check_bin_shape(&two_bins_snap(2, vec![(1, 2)], vec![(2, 3)]))
            .unwrap()
            .passed());
        // unbalanced: |F| = 2 > |P| = 1
        let report = check_bin_shape(&two_bins_snap(2, vec![(1, 2), (3, 2)], vec![(2, 3)])).unwrap();
        assert!(!report.passed());
        // duplicate id across bins
        let report = check_bin_shape(&two_bins_snap(2, vec![(1, 2)], vec![(1, 3)])).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn coverage_view_counts_and_weights() {
        let snap = two_bins_snap(2, vec![(1, 5), (2, 4)], vec![(3, 9), (4, 1), (5, 2)]);
        let view = coverage_view(&snap).unwrap();
        assert_eq!(view.bins.len(), 2);
        assert_eq!(view.bins[0], vec![(1, rint(1)), (2, rint(2))]);
        assert_eq!(view.bins[1][2], (5, rint(3)));
        assert_eq!(view.max_wbase(), Some(&rint(3)));
        // strictly increasing within each bin
        for bin in &view.bins {
            for pair in bin.windows(2) {
                assert!(pair[0].1 < pair[1].1);
            }
        }
    }

    #[test]
    fn competitive_report_cases() {
        assert_eq!(competitive_report(&rint(6), &rint(6)).unwrap(), rint(1));
        assert_eq!(
            competitive_report(&rint(0), &rint(0)).unwrap(),
            Rat::one()
        );
        assert_eq!(
            competitive_report(&rint(3), &rint(0)),
            Err(AnalysisError::ZeroOpt)
        );
        assert_eq!(
            competitive_report(&rint(17), &rint(10)).unwrap(),
            rat(17, 10)
        );
    }

    #[test]
    fn theta_values() {
        assert_eq!(theta(&rint(1)), rint(1));
        assert_eq!(theta(&rat(3, 2)), rint(3)); // ceil(9/4)
        assert_eq!(theta(&rint(2)), rint(4));
        assert_eq!(theta(&rint(4)), rint(16));
    }

    #[test]
    fn report_csv_columns() {
        let pass = CheckReport::pass("no-violations")
            .with_extreme("max_ratio", Some(rat(1, 2)));
        let fail = CheckReport::fail("bin-shape", 7, "t=3: bad".to_string());
        let csv = reports_to_csv(&[("a".to_string(), pass), ("b".to_string(), fail)]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "checker,instance_id,status,max_ratio_num,max_ratio_den,first_failure_event"
        );
        assert_eq!(lines[1], "no-violations,a,pass,1,2,");
        assert_eq!(lines[2], "bin-shape,b,fail,,,7");
    }
}
