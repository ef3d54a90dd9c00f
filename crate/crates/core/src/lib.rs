//! Link-level simulator for indoor mmWave MU-MIMO-OFDM wireless VR.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! - [`numerics`]: dense complex matrices, SVD and constant-modulus projection.
//! - [`topology`]: AP/user placement inside an indoor box, distances and azimuths.
//! - [`channel`]: per-subcarrier UL scalars and rank-1 LoS DL matrices.
//! - [`beamforming`]: full-digital SVD baseline and the one-shot hybrid design
//!   (covariance-sum analog stage + per-subcarrier digital stage).
//! - [`linkmetrics`]: SINR with intra/inter-cell interference and Shannon rates.
//! - [`qos`]: transmission/processing/M/M/1 queue delays and the two-factor utility.
//! - [`runner`]: configuration, constraint checks, codebook x scenario x Es/N0
//!   sweeps, statistics and CSV output.
//!
//! Runnable walkthroughs of each stage live in `examples/`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamforming;
pub mod channel;
pub mod error;
pub mod linkmetrics;
pub mod numerics;
pub mod qos;
pub mod runner;
pub mod topology;

pub use error::{Result, SimError};
