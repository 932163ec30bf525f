//! Feedback-based network-coded broadcast of an in-order packet stream to
//! receivers with heterogeneous erasure channels.
//!
//! The sender keeps one stream position per receiver (its *next-needed*
//! packet, known through feedback) and each slot transmits a single linear
//! combination over a small Galois field that is innovative for every
//! receiver currently being served. Receivers Gaussian-eliminate receptions
//! into per-receiver buffers and deliver packets strictly in order.
//!
//! The crate has three legs that cross-validate each other:
//!
//! * [`sim`] — a discrete-time simulator of the scheme (exact encoding rules,
//!   per-slot erasures, long-run statistics);
//! * [`analysis`] — a closed-form model of per-receiver delivery rates,
//!   buffer densities, and coding probabilities;
//! * [`fairness`] — an iterative scheduler that picks mode probabilities
//!   equalizing completion progress across receivers.
//!
//! [`galois`], [`buffer`], and [`coder`] hold the shared machinery.

pub mod analysis;
pub mod buffer;
pub mod coder;
pub mod fairness;
pub mod galois;
pub mod sim;
