//! Spacing shifts `Σ_P`: binary sequences whose 1-positions are pairwise at
//! distances in `P ⊆ ℕ`.
//!
//! The crate builds `P` from a symbolic description ([`pset`]), enumerates
//! the language of `Σ_P` exactly ([`language`]), searches for combinatorial
//! certificates in `P` ([`detect`]), probes orbits ([`dynamics`]) and runs
//! named finite-scale experiments over a shipped corpus ([`harness`]).

mod bits;
pub mod corpus;
pub mod detect;
pub mod dynamics;
pub mod error;
mod graph;
pub mod harness;
pub mod language;
pub mod plot;
pub mod pset;
pub mod rational;

pub use error::{Error, Result};
pub use graph::Budget;
pub use pset::{build_pset, PSetSpec, PSetView};

/// Default node budget for every bounded search.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Environment variable that overrides [`DEFAULT_BUDGET`] in the CLI.
pub const BUDGET_ENV: &str = "SPACELAB_BUDGET";
