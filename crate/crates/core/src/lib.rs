//! Time interference alignment via transmit-delay offsets in the three-user
//! interference channel.
//!
//! * [`circle`]: arcs on the unit circle and the uncovered-measure query.
//! * [`dof`]: per-pair and sum degrees of freedom of a delay matrix.
//! * [`analytic`]: closed-form DoF distributions for uncoordinated senders.
//! * [`mc`]: seeded, worker-count independent Monte Carlo engine.
//! * [`align`]: central optimization of coordinated transmit delays.
//! * [`geo`]: geostationary multi-satellite scenario.

pub mod align;
pub mod analytic;
pub mod circle;
pub mod dof;
pub mod error;
pub mod geo;
pub mod mc;

pub use error::{Error, Result};
