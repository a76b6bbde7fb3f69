//! Simulation and analysis of one-dimensional discrete-time quantum walks
//! driven by a biased real coin `cos θ Z + sin θ X`.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: lattice indexing, joint walker/coin states and the initial
//!   states (origin, Gaussian, custom) used throughout.
//! - [`evolution`]: coin operator, conditional shift and the walk step for
//!   pure states and for block-stored density matrices, plus the exact
//!   `θ = 0` solution.
//! - [`noise`]: the position-dephasing channel, random per-step retention
//!   probabilities, seeded streams and Monte-Carlo averaging.
//! - [`analysis`]: coin trace-out, distributions, variance, entanglement,
//!   coin post-selection, fidelities and the critical-θ solver.
//! - [`optics`]: the beam-splitter mesh that realises the same walk with
//!   light, including random phase masks and the detection row.
//!
//! All states are immutable values; every operation returns a new value.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod lattice;
pub mod noise;
pub mod optics;
pub mod reduce;

pub use error::{Result, WalkError};
pub use lattice::{
    CoinState, InitialState, JointDensityMatrix, JointPureState, LatticeSpec, PositionWavefunction, C64,
};
