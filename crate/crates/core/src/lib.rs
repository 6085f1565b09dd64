//! Transmit covariance optimization for a two-user MISO interference channel
//! whose receivers can harvest energy from the received radio signals.
//!
//! The crate solves three transmission design problems over the same channel
//! instance and makes them comparable on a sum-rate-versus-energy basis:
//!
//! * [`ideal`] — both receivers decode and harvest simultaneously; sum rate is
//!   maximized under per-receiver minimum-energy constraints.
//! * [`tdma_a`] — slot 1 is dedicated to energy harvesting for both receivers
//!   (with the slot length minimized in closed form), slot 2 carries an
//!   unconstrained sum-rate-optimal transmission.
//! * [`tdma_b`] — in each slot one receiver decodes while the other harvests;
//!   the slot split is searched over its feasible interval.
//!
//! [`oracle`] provides independent brute-force validators and seeded instance
//! generators used to certify the solvers, and [`linalg`] / [`model`] hold the
//! small complex-vector kernel and the physical quantities (rates, harvested
//! energy) everything is built on.
//!
//! Grid evaluation is data-parallel via rayon when the `parallel` feature is
//! enabled (default); results are bit-identical for a fixed resolution
//! regardless of worker count.

pub mod error;
pub mod ideal;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod search;
pub mod tdma_a;
pub mod tdma_b;

mod exec;

pub use error::{Error, Result};
