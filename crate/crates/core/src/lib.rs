//! Event-based non-intrusive load monitoring.
//!
//! The pipeline filters power signals and detects events, learns each
//! appliance's operation modes and behavioral fingerprints from a small
//! training set, and labels every event of an aggregated signal with one
//! appliance mode transition.

// `!(x > 0.0)` rejects NaN on purpose; index loops mirror the math.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod classifier;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod filtering;
pub mod interval;
pub mod io;
pub mod modes;
pub mod pipeline;
pub mod scalar;
pub mod signal;
pub mod synth;

pub use error::{Error, Result};
pub use interval::Interval;
pub use scalar::Scalar;

/// Double-precision forms of the generic types.
pub type Signal = signal::PowerSignal<f64>;
pub type Event = signal::EventRecord<f64>;
pub type Model = features::ApplianceModel<f64>;
pub type Label = classifier::Label<f64>;

/// Single-precision forms, for memory-bound runs over long recordings.
pub type Signal32 = signal::PowerSignal<f32>;
pub type Model32 = features::ApplianceModel<f32>;
