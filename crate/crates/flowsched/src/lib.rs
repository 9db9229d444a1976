//! Exact-arithmetic simulation library for online single-machine preemptive
//! scheduling with predicted processing times.
//!
//! A scheduler here sees, for each released job, only its predicted
//! processing time, its weight and its release time; the true processing
//! time (within a declared distortion bound `mu`: `pred <= true < mu*pred`)
//! is known only to the engine, which detects completions. The crate
//! provides:
//!
//! - an event-driven simulator over arbitrary-precision rationals
//!   ([`sim`]), so flow-time identities hold exactly, never up to epsilon;
//! - three robust policies ([`policy`]): a weight-rounding rule balancing
//!   weight against estimated density, an unweighted full/partial two-bins
//!   rule with violation-fixing rotations, and its per-weight-class
//!   superbin extension;
//! - reference schedules ([`oracles`]): clairvoyant SRPT, prediction-keyed
//!   SRPT, and an exhaustive optimal oracle for small integer instances;
//! - seeded workload generators and the semiclairvoyant transform
//!   ([`workloads`]), plus an adaptive adversarial construction
//!   ([`adversary`]);
//! - invariant checkers and ratio reporting ([`analysis`]) and the bundled
//!   verification suite ([`verify`]).
//!
//! ```
//! use flowsched::model::{make_instance, Job};
//! use flowsched::policy::TwoBinsPolicy;
//! use flowsched::rat::rint;
//! use flowsched::sim::{simulate, SimOptions};
//!
//! // two unit-weight jobs: predicted 4 and 1, true 6 and 1, distortion 2
//! let inst = make_instance(
//!     vec![
//!         Job::new(1, rint(0), rint(4), rint(6), rint(1)),
//!         Job::new(2, rint(1), rint(1), rint(1), rint(1)),
//!     ],
//!     rint(2),
//! )
//! .unwrap();
//! let mut policy = TwoBinsPolicy::new(inst.mu().clone());
//! let run = simulate(&inst, &mut policy, &mut [], &SimOptions::default()).unwrap();
//! assert_eq!(run.completions.len(), 2);
//! assert_eq!(run.flow_weighted, &run.completions[&1] + &run.completions[&2] - rint(1));
//! ```

pub mod adversary;
pub mod analysis;
pub mod model;
pub mod oracles;
pub mod policy;
pub mod rat;
pub mod sim;
pub mod verify;
pub mod workloads;
