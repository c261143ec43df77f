//! Vold-Kalman order tracking with a railway axle-box toolkit.
//!
//! * [`vkf`] decomposes a record into per-order complex envelopes given
//!   instantaneous-frequency tracks.
//! * [`signal_lab`] synthesizes ground-truth test records.
//! * [`railway`] turns vehicle speed into order tracks, envelopes into wheel
//!   profiles, and fits the stiffness and force regressions.
//! * [`cli_io`] holds the file formats and the `vkf` command-line front end.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_io;
pub mod error;
pub mod railway;
pub mod signal_lab;
pub mod vkf;

pub use error::{Result, VkfError};
pub use num_complex::Complex64;
