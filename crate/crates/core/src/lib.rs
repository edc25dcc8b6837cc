//! Downlink average rate of Poisson cellular networks.
//!
//! The analytic side evaluates the rate through moment generating functions
//! of the useful and interfering powers, which avoids computing coverage
//! probabilities first. [`mcsim`] provides an independent point-process
//! simulator used to validate it.
//!
//! Module layering, bottom to top: [`specfun`] and [`quadrature`] supply the
//! numerical kernels, [`fading`] the per-distribution transforms,
//! [`rate_single`] and [`rate_multi`] the rate integrals.

pub mod error;
pub mod fading;
pub mod mcsim;
pub mod quadrature;
pub mod rate_multi;
pub mod rate_single;
pub mod specfun;

pub use error::{Error, Result};
