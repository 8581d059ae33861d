//! Directional millimeter-wave channel measurement processing.
//!
//! This crate turns directional power-delay-profile (PDP) campaigns into the
//! usual wideband channel statistics: RMS delay spreads per pointing angle
//! and per strongest beam, close-in (1 m reference) path loss exponents,
//! coherent/non-coherent beam-combining gains and the distance extension
//! they buy, and absolute-timing omnidirectional PDPs synthesized by pairing
//! measured angles with specular ray-traced path predictions.
//!
//! The main pipelines:
//!
//! - [`campaign`] — domain types, campaign file I/O, noise thresholding,
//!   outage summaries.
//! - [`delay`] — mean excess delay, RMS delay spread, per-class statistics,
//!   empirical CDFs.
//! - [`pathloss`] — free-space anchor, anchored PLE fitting, prediction.
//! - [`combining`] — k-strongest-beam power combining feeding multibeam
//!   path loss samples.
//! - [`extension`] — distance extension exponent/factor math and the
//!   beam-combining extension table.
//! - [`raytrace`] — image-method specular ray tracer over planar facets.
//! - [`synthesis`] — angle/path matching and omnidirectional PDP synthesis.
//! - [`synth`] — seeded synthetic campaign generator with ground truth.

// validation uses `!(x > 0.0)` on purpose: the negated form rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod campaign;
pub mod combining;
pub mod delay;
mod error;
pub mod extension;
pub mod geom;
pub mod pathloss;
pub mod raytrace;
pub mod synth;
pub mod synthesis;
pub mod tables;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// Sounder multipath time resolution, ns (one PDP bin).
pub const DEFAULT_BIN_WIDTH_NS: f64 = 2.5;

/// Default SNR threshold above the mean thermal noise floor, dB.
pub const DEFAULT_THRESHOLD_DB: f64 = 5.0;

/// Propagation delay of a straight path, in nanoseconds.
pub fn path_delay_ns(length_m: f64) -> f64 {
    length_m / SPEED_OF_LIGHT_M_PER_S * 1e9
}
