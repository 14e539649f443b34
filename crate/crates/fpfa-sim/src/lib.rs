//! Multi-user terahertz downlink simulator built around movable-port user
//! antennas.
//!
//! Three transmitter architectures are compared on shared user drops: a
//! banded design pairing one BS subarray per frequency band with
//! movable-port receivers, a single-band full array with movable ports, and
//! the same full array with the port pinned. Each drop runs the pipeline
//! draw geometry -> synthesize port-resolved channels -> assign users to
//! bands by channel correlation -> pick ports by minimum projection -> build
//! hybrid (analog + zero-forcing) precoders -> score SINR, spectral
//! efficiency and energy efficiency.

pub mod channel;
pub mod config;
pub mod error;
pub mod freq_alloc;
pub mod harness;
pub mod metrics;
pub mod plot;
pub mod port_select;
pub mod precoder;
