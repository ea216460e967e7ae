//! Time-dependent Larmor frequency and its accumulated phase.
//!
//! The frequency law is `w_L(t) = omega0 + chi * sin(zeta * t)` and the
//! accumulated phase is its exact antiderivative, so no numerical
//! integration is involved. The static case is `chi = 0` (or `zeta = 0`).

use crate::error::{Error, Result};

/// Default threshold on zeta/omega0 below which the modulation counts as
/// adiabatic.
pub const DEFAULT_ADIABATIC_THRESHOLD: f64 = 0.01;

/// Sinusoidal modulation of the Larmor frequency.
///
/// Only the sinusoidal and static profiles are provided; the methods are
/// the extension point if another law is ever needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationProfile {
    omega0: f64,
    chi: f64,
    zeta: f64,
    adiabatic_threshold: f64,
}

impl ModulationProfile {
    pub fn new(omega0: f64, chi: f64, zeta: f64) -> Result<Self> {
        Self::with_adiabatic_threshold(omega0, chi, zeta, DEFAULT_ADIABATIC_THRESHOLD)
    }

    pub fn with_adiabatic_threshold(
        omega0: f64,
        chi: f64,
        zeta: f64,
        adiabatic_threshold: f64,
    ) -> Result<Self> {
        if !(omega0 > 0.0) {
            return Err(Error::Parameter(format!(
                "omega0 must be positive, got {omega0}"
            )));
        }
        if chi < 0.0 || zeta < 0.0 {
            return Err(Error::Parameter(format!(
                "chi and zeta must be nonnegative, got chi = {chi}, zeta = {zeta}"
            )));
        }
        if !(adiabatic_threshold > 0.0) {
            return Err(Error::Parameter(
                "adiabatic threshold must be positive".into(),
            ));
        }
        Ok(Self {
            omega0,
            chi,
            zeta,
            adiabatic_threshold,
        })
    }

    /// Static profile at frequency omega0.
    pub fn static_profile(omega0: f64) -> Result<Self> {
        Self::new(omega0, 0.0, 0.0)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn is_static(&self) -> bool {
        self.chi == 0.0 || self.zeta == 0.0
    }

    /// Whether zeta/omega0 is below the adiabatic threshold. A static
    /// profile is trivially adiabatic.
    pub fn is_adiabatic(&self) -> bool {
        self.is_static() || self.zeta / self.omega0 < self.adiabatic_threshold
    }

    /// Largest instantaneous frequency magnitude, used to size quadrature
    /// grids for oscillatory integrands.
    pub fn max_frequency(&self) -> f64 {
        self.omega0 + self.chi
    }

    /// Instantaneous Larmor frequency w_L(t) = omega0 + chi sin(zeta t).
    pub fn larmor_frequency(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        if self.is_static() {
            self.omega0
        } else {
            self.omega0 + self.chi * (self.zeta * t).sin()
        }
    }

    /// Accumulated phase Omega(t) = omega0 t + (chi/zeta)(1 - cos zeta t),
    /// reducing to omega0 t in the static case.
    pub fn accumulated_phase(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        if self.is_static() {
            self.omega0 * t
        } else {
            self.omega0 * t + self.chi / self.zeta * (1.0 - (self.zeta * t).cos())
        }
    }
}
