//! Attention-based monocular visual odometry toolkit.
//!
//! The crate estimates 6-DOF camera ego-motion from consecutive video frames
//! with a trainable network (convolutional encoder, stacked bidirectional
//! LSTMs, multi-head self-attention, fully connected head) and provides the
//! machinery around it: SE(3) pose algebra, dataset preparation with a
//! synthetic scene generator, training with Adagrad and early stopping,
//! sliding-window trajectory assembly, drift metrics, and a real-time
//! streaming inference service.

pub mod error;
pub mod geometry;

pub use error::{Error, Result};
