//! Precoder design for a rate-splitting joint radar-communication
//! transmitter with low-resolution DACs.
//!
//! The design problem trades the communication sum-rate against the match
//! between the transmit beampattern and a desired one. It is split by
//! consensus ADMM into a sum-rate block ([`wmmse`]) and a beampattern block
//! ([`sdr`]), coordinated by [`admm`].

// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admm;
pub mod comms;
pub mod config;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod qcqp;
pub mod quantization;
pub mod radar;
pub mod scenario;
pub mod sdr;
pub mod wmmse;

pub use admm::{evaluate, run, Metrics, Problem, Solution, TraceRecord};
pub use comms::PrecoderMatrix;
pub use config::{Mode, NoiseVarFormula, SystemConfig};
pub use error::{Error, Result};
pub use quantization::QuantizationModel;
pub use scenario::{AngleGrid, ChannelSet};
