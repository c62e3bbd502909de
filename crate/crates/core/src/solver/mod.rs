//! Steady states, probe spectra and spectrum analysis on the truncated space.

mod peaks;
mod spectrum;
mod steady;
mod timedomain;

pub use peaks::*;
pub use spectrum::*;
pub use steady::*;
pub use timedomain::*;
