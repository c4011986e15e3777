//! Core algorithms for monitoring sampled runs of finite-state Markov chains
//! against omega-regular properties given as deterministic Rabin automata.
//!
//! The crate provides:
//!
//! - domain types for labelled Markov chains, deterministic Rabin automata,
//!   and their synchronized product ([`chain`], [`dra`], [`product`]);
//! - exact graph and probability oracles: SCC/BSCC decomposition, reachability
//!   probability of the good bottom components, structural parameters, and a
//!   constructive witness path ([`analysis`]);
//! - candidate and strength computation along a growing sampled path, both as
//!   a naive reference recomputed from scratch ([`naive`]) and as an
//!   incremental tracker with amortized logarithmic updates ([`tracker`]);
//! - the reset controllers themselves: cautious, bold with a fixed boldness
//!   parameter, and bold with a growing schedule ([`monitor`]);
//! - built-in benchmark families and seeded random model generation
//!   ([`models`]).
//!
//! The crate is `no_std` (with `alloc`) so the online monitoring path can be
//! embedded; IO, file formats and the trial harness live in the companion
//! `resetmon` crate.
//!
//! A minimal monitoring loop over a sampled product run:
//!
//! ```
//! use resetmon_core::models::{builtin_dra, gen_fig2, BuiltinProperty};
//! use resetmon_core::{build_product, Action, Monitor, MonitorConfig, Tracker};
//!
//! let chain = gen_fig2(2);
//! let dra = builtin_dra(BuiltinProperty::Fp);
//! let product = build_product(&chain, &dra).unwrap();
//!
//! let mut tracker = Tracker::new(&product);
//! let mut monitor = Monitor::new(MonitorConfig::bold_fixed(1.0, 0.5).unwrap());
//!
//! // Feed the observed product states one at a time (normally sampled from
//! // the system; here a fixed path that dwells on the first self-loop).
//! for state in [0, 0, 0, 0] {
//!     tracker.step(state).unwrap();
//!     let verdict = monitor.step(&tracker.observation()).unwrap();
//!     if verdict.action == Action::Reset {
//!         // The candidate {s0} is bad and reached its strength threshold:
//!         // abort this run and restart the system.
//!         assert_eq!(tracker.strength(), 2);
//!         tracker.reset();
//!     }
//! }
//! assert_eq!(tracker.path_len(), 0); // the loop above ends in a reset
//! ```

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod chain;
pub mod dra;
pub mod models;
pub mod monitor;
pub mod naive;
pub mod product;
pub mod tracker;

pub use chain::{MarkovChain, ModelError, StateId, PROB_SUM_TOLERANCE};
pub use dra::{RabinAutomaton, RabinPair};
pub use monitor::{
    alpha0, schedule_alpha, threshold, Action, ConfigError, Monitor, MonitorConfig, MonitorKind,
    MonitorVerdict, Observation, Schedule,
};
pub use product::{build_product, classify_scc, ProductChain, ProductError, Verdict};
pub use tracker::{Candidate, OpCounters, Tracker, TrackerError};
