//! Training-free disaggregation of electric-vehicle charging load from a
//! single whole-house real-power trace sampled once per minute.
//!
//! The pipeline runs in five stages over a processing window:
//!
//! 1. adaptive thresholding and segment extraction ([`segmentation`])
//! 2. spike-train removal by seed-and-propagate labeling ([`spike`])
//! 3. local residual-noise removal ([`segmentation`])
//! 4. segment classification from the cumulative counting function
//!    ([`classifier`])
//! 5. square-wave reconstruction of EV sessions ([`reconstruct`])
//!
//! [`pipeline`] composes the stages, [`metrics`] scores estimates against
//! ground truth and [`synth`] produces labelled synthetic households.
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod classifier;
pub mod config;
pub mod error;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod reconstruct;
pub mod segmentation;
pub mod spike;
pub mod synth;
pub mod time;

pub use error::{Error, Result};
pub use model::{
    render_events, DisaggregationResult, EvEvent, PipelineParams, PowerSeries, Segment,
    SegmentType,
};
pub use pipeline::{disaggregate, disaggregate_windows, stitch, BoundaryPolicy, WindowKind, WindowSpec};
pub use time::Timestamp;
