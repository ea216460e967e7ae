//! Dissipative dynamics of a frequency-modulated spin-1/2, implemented
//! three ways side by side: a semiclassical relaxation engine driven by
//! classical noise, a quantum master equation with amplitude- and
//! phase-damping environments, and the operator-sum (Kraus) picture.
//! The three routes are tied together through the Bloch equations and
//! the characteristic times T1 and T2, and a control module studies how
//! sinusoidal frequency modulation attenuates longitudinal relaxation.

pub mod control;
pub mod error;
pub mod bloch;
pub mod channels;
pub mod lindblad;
pub mod modulation;
pub mod numerics;
pub mod redfield;

pub use error::{Error, Result};

pub(crate) use redfield::{flatten as flatten_mat2, unflatten as unflatten_mat2};
