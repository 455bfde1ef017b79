//! Simulation of orbital-angular-momentum transmission over quasi-fractal
//! uniform circular arrays (QF-UCAs): several small rings of antenna
//! elements arranged on a larger circle, with neighbouring rings sharing
//! elements.
//!
//! Modules build on each other in this order: [`linalg`], [`geometry`],
//! [`channel`], [`txrx`], [`metrics`]; [`scenario`] and [`cli`] wire them to
//! config files and CSV output.

pub mod channel;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod metrics;
pub mod scenario;
pub mod txrx;

pub use error::{Error, Result};
