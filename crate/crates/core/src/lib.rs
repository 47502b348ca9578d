pub mod channel;
pub mod constellations;
pub mod detectors;
pub mod error;
pub mod io;
pub mod manifold;
pub mod packing;
pub mod rng;

pub use error::{Error, Result};
