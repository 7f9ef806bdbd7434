//! Deepfake video detection from fused facial-landmark and heart-rate
//! features.
//!
//! The pipeline has four stages, each in its own module:
//!
//! - [`features`]: per-ROI colour statistics, the 63-wide heart-rate block
//!   and the fused per-frame vector described by a [`FeatureSchema`].
//! - [`preprocess`]: train-only z-scoring, sliding-window segmentation and
//!   feature-category selection.
//! - [`gbdt`]: a second-order gradient-boosted tree classifier with L2 leaf
//!   penalty and minimum split gain, plus a versioned model file.
//! - [`eval`]: rank-based ROC-AUC, per-video stratified splitting,
//!   frame/segment/video scoring and the category ablation harness.
//!
//! [`data`] and [`config`] hold the file formats: dataset manifests, frame
//! CSVs, the flat run-config format and the synthetic corpus generator.
//! Runnable walkthroughs live in `examples/`.

pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod features;
pub mod gbdt;
pub mod preprocess;

pub use error::{Error, Result};
pub use features::{Category, FeatureSchema, FrameFeatureTable};
pub use gbdt::{Model, TrainConfig, TreeEnsemble};
