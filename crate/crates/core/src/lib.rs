//! Frequency-domain models for two racetrack resonators that share a
//! zero-transmission directional coupler: they are linearly uncoupled, so each
//! ring keeps its own comb of resonances, yet four-wave mixing inside the coupler
//! couples them nonlinearly.
//!
//! Modules, bottom-up:
//! - [`geometry`]: device data model, dispersion, resonance combs.
//! - [`linear_cmt`]: coupler fields, uncoupling lengths, Kerr-perturbed coupling.
//! - [`enhancement`]: Lorentzian field enhancement and two-comb spectra.
//! - [`nonlinear`]: overlap integral J (closed form and quadrature).
//! - [`sfwm`]: dual-pump and parasitic pair rates, side-band suppression.
//! - [`design`]: coupler/gap synthesis, comb placement, Kerr budget, design report.
//! - [`config`]: JSON device documents.

pub mod config;
pub mod consts;
pub mod design;
pub mod enhancement;
pub mod error;
pub mod geometry;
pub mod linear_cmt;
pub mod nonlinear;
pub mod quadrature;
pub mod sfwm;
pub mod table;

pub use error::{Error, ErrorKind, Result};
pub use geometry::{Band, CouplingModel, DeviceSpec, RacetrackSpec, Resonance, RingId, WaveguideParams};
