//! Effective energy spectra, accessibility thresholds and grand-canonical
//! occupation statistics for open ensembles of quantum harmonic oscillators.
//!
//! An open system exchanges particles with a reservoir at chemical potential
//! `μ`; its energies are the eigenvalues of `H − μ𝒩`. The modules cover
//! independent oscillators ([`spectra`], [`open_system`]), oscillators with
//! translational motion in a periodic box ([`gas`]), a periodic chain of
//! coupled oscillators ([`chain`]), equilibrium occupation statistics
//! ([`statistics`]), certified evaluation of the equilibrium energy series
//! together with numerical checks of its convergence estimates ([`series`]),
//! and a brute-force Fock-space oracle ([`oracle`]).
//!
//! All energies are `f64` in whatever units the caller supplies. The
//! defaults are reduced units with `ℏ = 1`.

pub mod chain;
pub mod error;
pub mod gas;
pub mod open_system;
pub mod oracle;
pub mod series;
pub mod spectra;
pub mod statistics;

pub use chain::{ChainAssignment, ChainParams, GroupedFormEnergy};
pub use error::{Error, Result};
pub use gas::{GasOccupationState, GasParams};
pub use open_system::{AccessibleSet, FermionClass, LevelAccess, PositivityReport};
pub use oracle::{Configuration, GroundState, ModeSet};
pub use series::{SeriesResult, TruncationPolicy};
pub use spectra::{OccupationState, OscillatorParams};
pub use statistics::{StatisticsKind, Thermo};
