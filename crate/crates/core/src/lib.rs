//! Streaming person detection from 2D LiDAR range scans.
//!
//! The pipeline works on one scan at a time: every beam is preprocessed into a
//! depth-normalized cutout window, a small convolutional backbone turns each
//! cutout into a feature vector, an attention-based auto-regressive module
//! fuses those features with a per-beam template carried across frames, and
//! per-beam classification/regression heads emit person-center votes that a
//! spatial voting grid aggregates into detections.
//!
//! Besides the detector itself the crate ships everything needed to exercise
//! it at desk scale: a ray-casting scene simulator ([`sim`]), file I/O for
//! scan sequences ([`scan`]), the training loop ([`trainer`]), detection
//! metrics ([`metrics`]), tracklet association ([`tracklets`]) and a per-stage
//! latency profiler ([`bench`]).
//!
//! Numeric kernels are generic over the scalar type (see [`scalar::Real`]):
//! `f32` for training and inference, `f64` for gradient verification.

pub mod bench;
pub mod cutout;
pub mod detector;
pub mod error;
pub mod metrics;
pub mod nn;
pub mod scalar;
pub mod scan;
pub mod sim;
pub mod tracklets;
pub mod trainer;
pub mod vote;

pub use error::{Error, Result};
pub use scalar::Real;

/// Inference-precision tensor.
pub type Tensor32 = nn::Tensor<f32>;
/// Verification-precision tensor.
pub type Tensor64 = nn::Tensor<f64>;
/// Inference-precision detector network.
pub type Net32 = detector::DetectorNet<f32>;
/// Verification-precision detector network.
pub type Net64 = detector::DetectorNet<f64>;
