//! Instance construction: seeded random generators, distortion injection,
//! two-sided prediction normalization, and the semiclairvoyant transform.
//!
//! All randomness flows through [`SplitMix64`], a fixed published generator
//! (Steele, Lea & Flood's SplitMix64 finalizer) so that a seed produces the
//! same instance on every platform and in every language that implements the
//! same 64-bit algorithm. Bounded draws use rejection sampling, which is
//! unbiased and equally portable.

use num_traits::One;
use thiserror::Error;

use crate::model::{make_instance, Instance, Job, ModelError};
use crate::rat::{floor_log, rat, rat_pow, Rat};

/// SplitMix64: state advances by the golden-gamma constant, output is the
/// Murmur3-style finalizer. Sub-streams come from [`SplitMix64::split`].
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..bound` (rejection sampling, no modulo bias).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return v % bound;
            }
        }
    }

    /// Independent sub-generator seeded from this stream.
    pub fn split(&mut self) -> SplitMix64 {
        SplitMix64::new(self.next_u64())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WorkloadError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("semiclairvoyant base rho must be greater than 1")]
    InvalidRho,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How true processing times are derived from predictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistortionMode {
    /// `true = pred`.
    Exact,
    /// `true = pred * (1 + (mu-1) * k/64)` for a uniform draw `k in 0..64`,
    /// i.e. a bounded-denominator rational in `[pred, mu*pred)`.
    Uniform,
    /// `true = pred * max(1, mu*k/(k+1))`, close to the upper boundary.
    Extremal { k: u64 },
}

impl DistortionMode {
    pub const EXTREMAL_DEFAULT: DistortionMode = DistortionMode::Extremal { k: 7 };
}

/// Parameters of the seeded random generator. Predicted times are integers
/// in `pred_min..=pred_max` (controls P), weights are drawn from
/// `weight_choices` (controls W), releases are integers in `0..=release_max`.
#[derive(Debug, Clone)]
pub struct RandomSpec {
    pub n: usize,
    pub release_max: u64,
    pub pred_min: u64,
    pub pred_max: u64,
    pub weight_choices: Vec<Rat>,
    pub mu: Rat,
    pub distortion: DistortionMode,
    pub seed: u64,
}

impl RandomSpec {
    /// Unit-weight spec with exact predictions; callers override fields.
    pub fn unit(n: usize, seed: u64) -> Self {
        RandomSpec {
            n,
            release_max: 32,
            pred_min: 1,
            pred_max: 16,
            weight_choices: vec![Rat::one()],
            mu: Rat::one(),
            distortion: DistortionMode::Exact,
            seed,
        }
    }

    fn validate(&self) -> Result<(), WorkloadError> {
        if self.pred_min == 0 || self.pred_min > self.pred_max {
            return Err(WorkloadError::InvalidSpec(
                "predicted range must satisfy 1 <= pred_min <= pred_max".to_string(),
            ));
        }
        if self.weight_choices.is_empty() {
            return Err(WorkloadError::InvalidSpec("empty weight set".to_string()));
        }
        if self.mu < Rat::one() {
            return Err(WorkloadError::InvalidSpec("mu must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// Deterministic-in-seed random instance.
pub fn gen_random(spec: &RandomSpec) -> Result<Instance, WorkloadError> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    let mut preds = Vec::with_capacity(spec.n);
    let mut partial_jobs = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let release = rat(rng.below(spec.release_max + 1) as i64, 1);
        let pred = rat(
            (spec.pred_min + rng.below(spec.pred_max - spec.pred_min + 1)) as i64,
            1,
        );
        let weight = spec.weight_choices[rng.below(spec.weight_choices.len() as u64) as usize].clone();
        preds.push(pred.clone());
        partial_jobs.push((i as u64 + 1, release, pred, weight));
    }
    let mut distortion_rng = rng.split();
    let trues = inject_distortion(&preds, &spec.mu, spec.distortion, &mut distortion_rng);
    let jobs = partial_jobs
        .into_iter()
        .zip(trues)
        .map(|((id, release, pred, weight), truev)| Job::new(id, release, pred, truev, weight))
        .collect();
    Ok(make_instance(jobs, spec.mu.clone())?)
}

/// Derive true processing times from predictions under the one-sided model.
pub fn inject_distortion(
    preds: &[Rat],
    mu: &Rat,
    mode: DistortionMode,
    rng: &mut SplitMix64,
) -> Vec<Rat> {
    preds
        .iter()
        .map(|pred| match mode {
            DistortionMode::Exact => pred.clone(),
            DistortionMode::Uniform => {
                let k = rng.below(64) as i64;
                pred * (Rat::one() + (mu - Rat::one()) * rat(k, 64))
            }
            DistortionMode::Extremal { k } => {
                let factor = mu * rat(k as i64, k as i64 + 1);
                if factor < Rat::one() {
                    pred.clone()
                } else {
                    pred * factor
                }
            }
        })
        .collect()
}

/// Fold a two-sided prediction error (`true in [pred/mu', mu'*pred)`) into
/// the one-sided form by dividing every prediction by `mu'`; the one-sided
/// distortion bound becomes `mu'^2`.
pub fn normalize_two_sided(preds: &[Rat], mu_prime: &Rat) -> (Vec<Rat>, Rat) {
    let scaled = preds.iter().map(|p| p / mu_prime).collect();
    (scaled, mu_prime * mu_prime)
}

/// Build an instance for the class-only prediction model: each job's
/// prediction becomes `rho^floor(log_rho true)` and the distortion bound is
/// `rho`. Input predictions are ignored.
pub fn semiclairvoyant_transform(true_jobs: &[Job], rho: &Rat) -> Result<Instance, WorkloadError> {
    if *rho <= Rat::one() {
        return Err(WorkloadError::InvalidRho);
    }
    let mut jobs = Vec::with_capacity(true_jobs.len());
    for job in true_jobs {
        let class = floor_log(&job.true_proc, rho).map_err(|_| WorkloadError::InvalidRho)?;
        let pred = rat_pow(rho, class);
        jobs.push(Job::new(
            job.id,
            job.release.clone(),
            pred,
            job.true_proc.clone(),
            job.weight.clone(),
        ));
    }
    Ok(make_instance(jobs, rho.clone())?)
}
