//! Orbit analysis for nonexpansive self-maps of proper metric spaces.
//!
//! The crate iterates nonexpansive maps over a catalog of model geometries,
//! classifies each orbit as relatively compact or compactly divergent,
//! detects and certifies recurrent points, estimates the limit retraction
//! and audits the group structure of iterate limits, checks the covering
//! lemma for shift-monotone metrics on the naturals, and ships a hyperbolic
//! backend (Poincare disk, polydisc, analytic chains) on which holomorphic
//! self-maps become nonexpansive.

pub mod calka;
pub mod error;
pub mod kobayashi;
pub mod limit_group;
pub mod maps;
pub mod metric;
pub mod orbit;

pub use error::{Error, Result};
