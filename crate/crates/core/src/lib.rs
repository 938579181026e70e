//! Auditing primitives for edge differential privacy on labeled graphs.
//!
//! The crate is organized around three layers:
//!
//! * state: [`graphs`] defines the space of simple graphs on `n` labeled
//!   vertices, and [`distributions`] puts exact probability tables (stored in
//!   log space) and samplable generative models on top of it;
//! * mechanisms: [`mechanisms`] holds randomized-response over edge
//!   indicators, the Laplace edge-count release, and two degenerate
//!   mechanisms used as audit fixtures;
//! * auditors: [`audit`] measures realized privacy leakage (worst-case
//!   neighbor log-ratio, per-secret Pufferfish leakage, hypothesis-testing
//!   power curves), [`ergm`] computes the conditional-odds slack of
//!   exponential random graph models, and [`attacks`] runs the two-queens
//!   edge-inference experiment end to end.
//!
//! Everything here is deterministic given explicit inputs; randomness enters
//! only through [`rng::SeededRng`], a counter-based generator whose full
//! output sequence is fixed by a `u64` seed. The crate is `no_std` (with
//! `alloc`) so the numeric core can be embedded anywhere; file formats and
//! parallelism live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod attacks;
pub mod audit;
pub mod distributions;
pub mod ergm;
pub mod error;
pub mod graphs;
pub(crate) mod math;
pub mod mechanisms;
pub mod rng;

pub use error::{Error, Result};
