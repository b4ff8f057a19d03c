//! Representing-series expansions over systems of reproducing kernels.
//!
//! Functions are truncated Taylor series ([`PowerSeries`]). A greedy loop
//! ([`decompose`]) repeatedly dilates the residual toward the origin,
//! discretizes its reproducing integral on a layer of kernel nodes, and
//! subtracts the discretization; the atoms of all steps, read layer by layer,
//! form a series converging to the input.
//!
//! Supported spaces are H^p (`1 <= p < infinity`), the disk algebra, and
//! weighted Hardy spaces such as the Bergman and Dirichlet spaces.

pub mod analysis;
pub mod cli;
pub mod engine;
pub mod error;
mod fourier;
pub mod io;
pub mod lattice;
pub mod series;

pub use analysis::{omega1, omega2, omega3, WeightSequence};
pub use engine::{decompose, ConvergenceReport, DecomposeOptions, Decomposition, KernelAtom};
pub use error::{Error, Result};
pub use fourier::RingOffsets;
pub use lattice::{LatticeLayer, LatticeSchedule, LayerKind, LayerOptions, PhaseMode};
pub use series::{Arc, PowerSeries, SpaceSpec};
