//! Momentum transfer to two-level atoms by frequency-chirped standing waves.
//!
//! After adiabatic elimination of the excited state, an atom in a pair of
//! counter-propagating fields only couples momentum states `2nħk` to their neighbours.
//! Sweeping the two-photon detuning linearly brings adjacent states into resonance one
//! after the other, so adiabatic rapid passage climbs the ladder one rung per crossing.
//!
//! * [`ladder`]: physical types and the tridiagonal Hamiltonian (mirror and splitter).
//! * [`propagator`]: integrating-factor Runge-Kutta time stepping and trajectories.
//! * [`spectrum`]: dressed states, avoided crossings and Landau-Zener diagnostics.
//! * [`observables`]: populations, mean velocity, Bloch period, transfer fidelity.
//! * [`scenarios`]: packaged mirror, splitter, Bloch and calibration experiments.
//! * [`config`], [`output`], [`cli`]: the key-value config format, result files and CLI.

// `!(a > b)` also rejects NaN; index loops follow the Butcher tableau notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod error;
pub mod ladder;
pub mod observables;
pub mod output;
pub mod propagator;
pub mod scenarios;
pub mod spectrum;
pub mod units;

pub use error::{Error, Result};
pub use ladder::{
    quasi_energy, ChirpProfile, ChirpSign, Drive, Drives, EnvelopeShape, Frame, LadderConfig, Mode, PulseEnvelope,
    StateVector, TridiagonalH,
};
pub use observables::SummaryMetrics;
pub use propagator::{propagate, IntegratorSpec, Method, Trajectory};
