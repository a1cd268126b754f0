//! Global total-electron-content forecasting at desk scale.
//!
//! The crate bundles a small reverse-mode tensor engine, spherical mesh and
//! graph construction, analytic Sun/Moon forcings, dataset handling with
//! storm-aware splits, two forecast architectures (a grid-to-mesh
//! message-passing network and a convolutional LSTM baseline), and a
//! persistence-benchmarked training/evaluation harness. The `ioncast` binary
//! exposes the whole pipeline behind a declarative run configuration.

pub mod astro;
pub mod error;
pub mod mesh;
pub mod tensor;

pub use error::{Error, Result};
