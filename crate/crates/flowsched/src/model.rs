//! Job and instance model.
//!
//! An [`Instance`] is a validated batch of jobs for the single-machine
//! preemptive scheduling problem where the scheduler is shown a *predicted*
//! processing time at release and a declared distortion bound `mu`: for every
//! job, `pred <= true < mu * pred` (with `true == pred` permitted so that
//! perfect predictions, in particular `mu = 1`, stay representable).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rat::{format_rat, parse_rat, Rat};

pub type JobId = u64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub id: JobId,
    pub release: Rat,
    /// Predicted processing time shown to policies.
    pub pred_proc: Rat,
    /// Real processing time; visible only to the engine and oracles.
    pub true_proc: Rat,
    pub weight: Rat,
}

impl Job {
    pub fn new(id: JobId, release: Rat, pred_proc: Rat, true_proc: Rat, weight: Rat) -> Self {
        Job {
            id,
            release,
            pred_proc,
            true_proc,
            weight,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("duplicate job id {0}")]
    DuplicateId(JobId),
    #[error("job {job}: field `{field}` must be positive")]
    NonPositiveField { job: JobId, field: &'static str },
    #[error("job {0}: release time must be non-negative")]
    NegativeRelease(JobId),
    #[error("job {0}: true processing time outside [pred, mu*pred)")]
    DistortionViolated(JobId),
    #[error("distortion bound mu must be at least 1")]
    InvalidMu,
    #[error("instance has no jobs")]
    EmptyInstance,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io: {0}")]
    Io(String),
}

/// A validated instance: jobs sorted by `(release, id)` plus the declared
/// distortion bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    jobs: Vec<Job>,
    mu: Rat,
}

/// Validate and sort jobs into an [`Instance`].
///
/// The distortion rule accepts a job iff `pred <= true` and either
/// `true < mu * pred` or `true == pred`; the equality carve-out is what makes
/// `mu = 1` usable.
pub fn make_instance(jobs: Vec<Job>, mu: Rat) -> Result<Instance, ModelError> {
    if mu < Rat::one() {
        return Err(ModelError::InvalidMu);
    }
    let mut seen = BTreeSet::new();
    for job in &jobs {
        if !seen.insert(job.id) {
            return Err(ModelError::DuplicateId(job.id));
        }
        for (field, value) in [
            ("pred_proc", &job.pred_proc),
            ("true_proc", &job.true_proc),
            ("weight", &job.weight),
        ] {
            if !value.is_positive() {
                return Err(ModelError::NonPositiveField { job: job.id, field });
            }
        }
        if job.release.is_negative() {
            return Err(ModelError::NegativeRelease(job.id));
        }
        let upper = &mu * &job.pred_proc;
        let ok = job.pred_proc <= job.true_proc
            && (job.true_proc < upper || job.true_proc == job.pred_proc);
        if !ok {
            return Err(ModelError::DistortionViolated(job.id));
        }
    }
    let mut jobs = jobs;
    jobs.sort_by(|a, b| (&a.release, a.id).cmp(&(&b.release, b.id)));
    Ok(Instance { jobs, mu })
}

impl Instance {
    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn mu(&self) -> &Rat {
        &self.mu
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn job(&self, id: JobId) -> Option<&Job> {
        self.jobs.iter().find(|j| j.id == id)
    }

    /// True iff every weight equals 1 exactly.
    pub fn is_unit_weight(&self) -> bool {
        self.jobs.iter().all(|j| j.weight.is_one())
    }

    /// True iff all weights are equal (not necessarily 1).
    pub fn is_uniform_weight(&self) -> bool {
        match self.jobs.first() {
            None => true,
            Some(first) => self.jobs.iter().all(|j| j.weight == first.weight),
        }
    }

    pub fn total_true_volume(&self) -> Rat {
        self.jobs
            .iter()
            .fold(Rat::zero(), |acc, j| acc + &j.true_proc)
    }
}

/// Max/min ratios of the true parameters, for reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceStats {
    /// max/min true processing time
    pub ratio_p: Rat,
    /// max/min weight
    pub ratio_w: Rat,
    /// max/min density (weight / true processing time)
    pub ratio_d: Rat,
    pub n: usize,
}

pub fn instance_stats(inst: &Instance) -> Result<InstanceStats, ModelError> {
    if inst.is_empty() {
        return Err(ModelError::EmptyInstance);
    }
    let ratio = |mut values: Vec<Rat>| -> Rat {
        values.sort();
        values.last().unwrap() / values.first().unwrap()
    };
    let procs: Vec<Rat> = inst.jobs.iter().map(|j| j.true_proc.clone()).collect();
    let weights: Vec<Rat> = inst.jobs.iter().map(|j| j.weight.clone()).collect();
    let densities: Vec<Rat> = inst
        .jobs
        .iter()
        .map(|j| &j.weight / &j.true_proc)
        .collect();
    Ok(InstanceStats {
        ratio_p: ratio(procs),
        ratio_w: ratio(weights),
        ratio_d: ratio(densities),
        n: inst.len(),
    })
}

const FILE_MAGIC: &str = "sppt-instance v1";

/// Serialize to the line-oriented instance format:
/// `sppt-instance v1 mu=<num>/<den>` followed by one
/// `<id> <release> <pred_proc> <true_proc> <weight>` line per job.
pub fn instance_to_string(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} mu={}/{}",
        FILE_MAGIC,
        inst.mu.numer(),
        inst.mu.denom()
    );
    for j in &inst.jobs {
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            j.id,
            format_rat(&j.release),
            format_rat(&j.pred_proc),
            format_rat(&j.true_proc),
            format_rat(&j.weight)
        );
    }
    out
}

pub fn parse_instance(text: &str) -> Result<Instance, ModelError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(ModelError::Parse {
        line: 1,
        message: "empty file".to_string(),
    })?;
    let mu_part = header
        .strip_prefix(FILE_MAGIC)
        .map(str::trim)
        .and_then(|rest| rest.strip_prefix("mu="))
        .ok_or(ModelError::Parse {
            line: 1,
            message: format!("expected `{FILE_MAGIC} mu=<num>/<den>`"),
        })?;
    let mu = parse_rat(mu_part).map_err(|e| ModelError::Parse {
        line: 1,
        message: e.to_string(),
    })?;

    let mut jobs = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(ModelError::Parse {
                line: line_no,
                message: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let id: JobId = fields[0].parse().map_err(|_| ModelError::Parse {
            line: line_no,
            message: format!("bad job id `{}`", fields[0]),
        })?;
        let mut rats = fields[1..].iter().map(|f| {
            parse_rat(f).map_err(|e| ModelError::Parse {
                line: line_no,
                message: e.to_string(),
            })
        });
        let release = rats.next().unwrap()?;
        let pred = rats.next().unwrap()?;
        let truev = rats.next().unwrap()?;
        let weight = rats.next().unwrap()?;
        jobs.push(Job::new(id, release, pred, truev, weight));
    }
    make_instance(jobs, mu)
}

pub fn read_instance_file(path: &Path) -> Result<Instance, ModelError> {
    let text = fs::read_to_string(path).map_err(|e| ModelError::Io(e.to_string()))?;
    parse_instance(&text)
}

pub fn write_instance_file(inst: &Instance, path: &Path) -> Result<(), ModelError> {
    fs::write(path, instance_to_string(inst)).map_err(|e| ModelError::Io(e.to_string()))
}
