//! Finite-time heterogeneous cyclic pursuit.
//!
//! Agents on a directed cycle run `ẋ_i = −w_i·sign(x_i − x_{i+1})` and reach
//! consensus in finite time whenever every gain is positive. This crate
//! solves those dynamics exactly ([`engine`]), synthesizes gains for a
//! prescribed consensus value and time ([`synth`]), cross-checks the exact
//! solution with a brute-force integrator ([`oracle`]) and applies the
//! protocol to the line-of-sight rates of a salvo of interceptors
//! ([`guidance`], [`engagement`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod cli;
pub mod engagement;
pub mod engine;
pub mod error;
pub mod guidance;
pub mod oracle;
pub mod scenario;
pub mod synth;

pub use agents::{envelope, sigma, ConsensusInstance, Envelope, SwitchValue};
pub use engine::{run_consensus, ConsensusOutcome, EventKind, EventRecord, Segment};
pub use error::{Error, Result};
