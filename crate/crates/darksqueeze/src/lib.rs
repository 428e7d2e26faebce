//! Squeezing of optical dark solitons in a three-level EIT medium.
//!
//! The crate goes from atomic parameters to the propagation coefficients of
//! the probe envelope ([`medium`]), the dark soliton solution ([`soliton`]),
//! its Bogoliubov-de Gennes spectrum ([`bdg`]), the quantum dynamics of the
//! zero-mode quadratures ([`dynamics`]) and the induced atomic spin squeezing
//! ([`spin`]). [`oracles`] holds direct numerical propagators used to check
//! the analytic results.

pub mod bdg;
pub mod dynamics;
pub mod error;
pub mod medium;
pub mod numerics;
pub mod oracles;
pub mod soliton;
pub mod spin;

pub use error::{Error, Result};
