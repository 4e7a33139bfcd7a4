//! Security analysis of continuous-variable QKD with leakage from the
//! preparation station.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only numerics:
//!
//! - [`gaussian`]: covariance-matrix algebra in shot-noise units (vacuum
//!   variance 1), quadrature ordering `(x1, p1, x2, p2, ...)`.
//! - [`scenario`]: prepare-and-measure models for multimode modulation
//!   leakage and premodulation side-channel loss, plus the channel model.
//! - [`purification`]: entanglement-based equivalents (two-source
//!   Bloch-Messiah scheme and the six-mode side-channel purification).
//! - [`keyrate`]: mutual information, Holevo bounds, key rates and the
//!   closed-form limits.
//! - [`optimize`]: golden-section and bisection drivers over protocol
//!   parameters.
//! - [`validation`]: the closed-form versus numeric cross-check suite.
//!
//! Everything is a pure function of its inputs; there is no global state.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod gaussian;
pub mod keyrate;
pub mod linalg;
pub(crate) mod math;
pub mod optimize;
pub mod purification;
pub mod scenario;
pub mod snapshot;
pub mod validation;

mod error;

pub use error::Error;
pub use gaussian::{GaussianState, ModeId, Quadrature, SymplecticForm};
pub use keyrate::{KeyRateReport, holevo_bound, key_rate, key_rate_collective, key_rate_individual, mutual_info_ab};
pub use scenario::{
    Attack, ChannelModel, Direction, LeakageInputs, MultimodeLeakageScenario, PremodLeakageScenario,
    ProtocolChoice, Scenario,
};

pub type Result<T> = core::result::Result<T, Error>;
