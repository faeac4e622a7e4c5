//! BanditRank: learning to rank by treating ranking as a contextual bandit.
//!
//! A policy network scores each candidate document of a query with an
//! affinity in `(0, 1)`; a stochastic head samples ordered document subsets
//! without replacement from those affinities and the whole policy is trained
//! with REINFORCE against a self-critical (greedy) baseline, directly
//! maximizing IR measures such as MAP or nDCG@10. An optional binary
//! cross-entropy term can be blended in for a hybrid objective.
//!
//! The crate is organized around the training pipeline:
//!
//! * [`letor`] / [`synth`] — LETOR-format datasets: parsing, filtering,
//!   query-level splitting, normalization, and synthetic data generation.
//! * [`metrics`] — ranking evaluation measures (P@k, AP, RR, DCG, nDCG) and
//!   the reward functions built from them.
//! * [`policy`] — the deterministic affinity network (projection + highway
//!   layers + sigmoid output) with exact reverse-mode gradients and Adam.
//! * [`bandit`] — the stochastic head: ε-mixture sampling without
//!   replacement, exact action log-probabilities, greedy ranking.
//! * [`trainer`] — per-query policy-gradient and hybrid losses, the epoch
//!   loop with validation-based model selection.
//! * [`eval`] / [`stats`] / [`compare`] — batch evaluation, paired
//!   significance tests, and the reward-function comparison harness.
//! * [`model_io`] — JSON model persistence.
//!
//! Everything is deterministic given the run seed: all random number
//! consumption derives from explicitly seeded ChaCha streams.

pub mod bandit;
pub mod compare;
pub mod config;
mod error;
pub mod eval;
pub mod letor;
pub mod metrics;
pub mod model_io;
pub mod policy;
pub mod stats;
pub mod synth;
pub mod trainer;

pub use error::{Error, Result};
