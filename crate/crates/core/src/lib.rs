//! Shannon entropies of quantum position and momentum distributions, continuous and
//! coarse-grained by finite-resolution detectors, together with the entropic
//! uncertainty bounds they obey.
//!
//! Module map:
//!
//! - [`states`]: analytic displaced Gaussians and sampled grid states.
//! - [`fourier`]: momentum representation.
//! - [`binning`]: bin probabilities, tail mass and tail moments outside a detector window.
//! - [`entropy`]: discrete and continuous Shannon entropies (nats).
//! - [`specfun`]: spherical Bessel functions and the prolate spheroidal radial function `R00(c, 1)`.
//! - [`bounds`]: the lower bounds themselves.
//! - [`harness`]: sweeps, the crossover search and plot-ready tables.

pub mod binning;
pub mod bounds;
pub mod density;
pub mod entropy;
pub mod error;
pub mod fourier;
pub mod harness;
pub mod quad;
pub mod specfun;
pub mod states;

pub use density::{Density, Domain, Interval, Uniform};
pub use error::{Error, Result};
pub use fourier::{to_momentum, MomentumState};
pub use states::{make_gaussian, GaussianState, GridState, HbarConvention, QuantumState};
