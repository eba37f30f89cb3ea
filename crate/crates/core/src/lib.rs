//! Decay dynamics and lasing threshold of a single-mode microcavity coupled
//! to a structured continuum of modes, with the coupled-resonator optical
//! waveguide (CROW) as the worked reservoir.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the
//! command-line front end live in the companion `crowlase` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod crow;
pub mod lasing;
pub mod lattice_sim;
pub mod numerics;
pub mod reservoir;
pub mod spectral;

pub use num_complex::Complex64;

pub use crow::{CrowError, CrowParams};
pub use lattice_sim::{LatticeState, LossPlacement, SimConfig, SimError, TimeSeries};
pub use lasing::{LasingError, Regime, ThresholdResult};
pub use spectral::{ComplexPole, SpectralError};
pub use reservoir::{CavityParams, CouplingShape, ReservoirError, ReservoirSpectrum, Sheet, Side};
