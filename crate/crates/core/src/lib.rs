//! Simulator and exact optimizer for aerial-aided multi-access edge
//! computing over a multi-layer satellite, aerial and terrestrial network.
//!
//! The pipeline runs [`topology`] snapshots through [`demand`] models into
//! per-snapshot [`optimizer`] instances, and [`experiments`] orchestrates
//! static/dynamic comparisons and MEC deployment sweeps over them.

pub mod config;
pub mod demand;
pub mod error;
pub mod experiments;
pub mod geom;
pub mod optimizer;
pub mod report;
pub mod topology;

pub use error::{ConfigError, GeomError, ModelError, SolveError};
