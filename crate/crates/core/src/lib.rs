//! Single-commodity network design with probabilistic arc capacities.
//!
//! The crate models the design problem as a 0-1 program with one
//! conic-quadratic capacity constraint per s-t cut,
//!
//! ```text
//! min h'x  s.t.  mu_C'x - Omega * sqrt(x' Sigma_C x) >= d   for every s-t cut C
//! ```
//!
//! and solves it by branch-and-cut on top of an internal bounded simplex
//! engine. The cutting planes exploit the supermodularity of the cut
//! capacity function in the independent case (pack and extended pack
//! inequalities) and the submodularity of the quadratic reformulation
//! `q(x) = Omega^2 x'Sigma x - (mu'x - d)^2` in the correlated case
//! (extended polymatroid inequalities, lifted and aggregated covers).
//!
//! Module map:
//!
//! * [`model`] network instances, capacity models, `f` and `q`, cut enumeration
//! * [`submodular`] set-function utilities and the Edmonds greedy algorithm
//! * [`cutgen`] every family of valid inequalities
//! * [`flow`] max-flow / min-cut
//! * [`separation`] exact and formulation-based separation of violated cuts
//! * [`lp`] bounded-variable dual simplex
//! * [`bnb`] the branch-and-cut driver
//! * [`sim`] Monte-Carlo service-level estimation
//! * [`instgen`] random benchmark instances

pub mod bnb;
pub mod config;
pub mod cutgen;
pub mod error;
pub mod fixtures;
pub mod flow;
pub mod instgen;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod report;
pub mod separation;
pub mod sim;
pub mod submodular;

pub use error::{Error, Result};
