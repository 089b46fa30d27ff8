//! Core library for LDES economic-viability studies: data ingestion, LP
//! formulation, solver backends, the capacity sweep, and analytics.

pub mod analytics;
pub mod error;
pub mod formulate;
pub mod ingest;
pub mod lp;
pub mod solve;
pub mod sweep;
pub mod synth;

pub use error::{Error, Result};
pub use formulate::{DispatchSolution, ObjectiveBreakdown};
pub use ingest::{GeneratorAsset, StorageAsset, SystemSpec, TimeSeries};
pub use solve::{Backend, SolveResult, SolveStatus};
pub use sweep::{BaselineResult, ViabilityCurve, ViabilityPoint};
