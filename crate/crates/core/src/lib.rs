//! Photodetector design optimization.
//!
//! A transimpedance-amplifier photodetector is described by three design
//! parameters: feedback resistance `Rf`, feedback capacitance `Cf` (both
//! from commercial E-series values) and photodiode reverse bias `VD`. Each
//! candidate is scored by a product of per-variable merits over its
//! signal-to-noise ratio, bandwidth and phase margin, and the discrete grid
//! is searched exhaustively, by Monte Carlo sampling, or by a genetic
//! algorithm. The [`stats`] module measures how close the stochastic
//! searches get to the exhaustive optimum.

pub mod circuit;
pub mod error;
pub mod landscape;
pub mod merit;
pub mod optimizers;
pub mod space;
pub mod stats;

pub use circuit::{
    CircuitModel, OpAmpParams, OperatingConditions, PerformanceModel, PerformanceVariables,
    PhotodiodeParams,
};
pub use error::{Error, Result};
pub use landscape::{CircuitLandscape, Fitness, Genes, Landscape, MeritTable, SeparableQuadratic};
pub use merit::{BilateralSpec, MeritBreakdown, MeritSpec, UnilateralSpec};
pub use optimizers::{AlgorithmConfig, GAConfig, MCConfig, SearchResult};
pub use space::{DesignPoint, DesignSpace, ESeries, ESeriesSpec};
pub use stats::{ExperimentStats, PowerLawFit, RunRecord};
