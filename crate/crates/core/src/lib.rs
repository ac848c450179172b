//! Link-level simulation of a uniform-circular-array OAM link over a wideband
//! OFDM channel, with receive-side beam steering for tilted arrays.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod channel;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod metrics;
pub mod numerics;
pub mod oam;
pub mod scenario;
pub mod steering;
pub mod validate;

pub use error::{Error, Result};

/// metres per second
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
