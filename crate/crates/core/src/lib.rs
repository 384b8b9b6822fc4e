//! Indoor millimeter-wave channel models and a Monte-Carlo system simulator.
//!
//! Modules, bottom-up:
//! - [`layout`]: corridor/room floor plans and Manhattan routing
//! - [`propagation`]: distance and corner path-gain laws
//! - [`angular`]: azimuth spectra, rotational averaging, beam selection
//! - [`fading`]: Ricean traces and temporal statistics
//! - [`fitting`]: least-squares model extraction
//! - [`syssim`]: link budget and coverage simulation
//! - [`scene`] and [`cli`]: file formats and the command-line front end

pub mod angular;
pub mod cli;
pub mod error;
pub mod fading;
pub mod fitting;
pub mod layout;
pub mod propagation;
pub mod scene;
pub mod stats;
pub mod syssim;

pub use error::{Error, Result};
