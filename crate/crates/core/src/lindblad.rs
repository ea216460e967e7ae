//! Quantum master-equation engine for amplitude- and phase-damping
//! environments acting on a spin-1/2.
//!
//! The amplitude bath exchanges energy through I_+/I_- with effective
//! rates `F_a = <n_a> Theta_a(t) / 2pi` (excitation) and
//! `G_a = (<n_a>+1) Theta_a(t) / 2pi` (decay); the phase bath couples
//! through I_z with the constant rate `Theta_p`. The generator keeps the
//! thermal state diag(gamma_T, 1 - gamma_T) stationary, annihilates the
//! trace and preserves Hermiticity.
//!
//! The amplitude rate `Theta_a(t)` is supplied either directly (a
//! constant or a user function) or through the bridge from the
//! semiclassical engine, which identifies
//! `(Re Theta_a / pi)(2<n_a> + 1)` with `Re[kappa_x + kappa_y]`. The
//! underlying mode-space integral of the quantum bath is deliberately
//! not computed: the bridge fixes everything observable at the
//! reduced-state level, and no concrete spectral density is assumed.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modulation::ModulationProfile;
use crate::numerics::mat2::{spin_minus, spin_plus, spin_z, ComplexMat2, DensityMatrix};
use crate::numerics::ode::{integrate_sampled, OdeStepperConfig};
use crate::numerics::quad::QuadratureConfig;
use crate::redfield::{transverse_rate, NoiseEnvironment};
use crate::{flatten_mat2, unflatten_mat2};

/// Shared, thread-safe time-dependent rate.
pub type RateFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Amplitude- and phase-damping quantum baths.
///
/// `n_a` and `gamma_t` are both derived from `beta_e`, so the thermal
/// identity `<n_a> = gamma_T / (1 - 2 gamma_T) = 1/(e^{beta E} - 1)`
/// holds by construction; `validate_thermal_identity` re-checks it.
#[derive(Clone)]
pub struct QuantumEnvironment {
    n_a: f64,
    n_p: f64,
    beta_e: f64,
    gamma_t: f64,
    theta_a: RateFn,
    theta_p: f64,
}

impl fmt::Debug for QuantumEnvironment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuantumEnvironment")
            .field("n_a", &self.n_a)
            .field("n_p", &self.n_p)
            .field("beta_e", &self.beta_e)
            .field("gamma_t", &self.gamma_t)
            .field("theta_p", &self.theta_p)
            .finish_non_exhaustive()
    }
}

/// Thermal occupation 1/(e^{beta E} - 1).
pub fn thermal_occupation(beta_e: f64) -> f64 {
    1.0 / beta_e.exp_m1()
}

/// Boltzmann factor e^{-beta E} / (1 + e^{-beta E}).
pub fn boltzmann_factor(beta_e: f64) -> f64 {
    let b = (-beta_e).exp();
    b / (1.0 + b)
}

impl QuantumEnvironment {
    /// Environment with an arbitrary time-dependent amplitude rate.
    pub fn new(beta_e: f64, n_p: f64, theta_p: f64, theta_a: RateFn) -> Result<Self> {
        if !(beta_e > 0.0) {
            return Err(Error::Parameter(format!(
                "beta_e must be positive for a finite-temperature bath, got {beta_e}"
            )));
        }
        if n_p < 0.0 {
            return Err(Error::Parameter(format!(
                "n_p must be nonnegative, got {n_p}"
            )));
        }
        if theta_p < 0.0 {
            return Err(Error::Parameter(format!(
                "theta_p must be nonnegative, got {theta_p}"
            )));
        }
        let env = Self {
            n_a: thermal_occupation(beta_e),
            n_p,
            beta_e,
            gamma_t: boltzmann_factor(beta_e),
            theta_a,
            theta_p,
        };
        env.validate_thermal_identity(1e-12)?;
        Ok(env)
    }

    /// Environment with a constant amplitude rate.
    pub fn with_constant_theta_a(
        beta_e: f64,
        n_p: f64,
        theta_p: f64,
        theta_a: f64,
    ) -> Result<Self> {
        if theta_a < 0.0 {
            return Err(Error::Parameter(format!(
                "theta_a must be nonnegative, got {theta_a}"
            )));
        }
        Self::new(beta_e, n_p, theta_p, Arc::new(move |_| theta_a))
    }

    /// `<n_a> (1 - 2 gamma_T) = gamma_T` within tol, evaluated through
    /// the cancellation-free form 1 - 2 gamma_T = tanh(beta E / 2).
    pub fn validate_thermal_identity(&self, tol: f64) -> Result<()> {
        let lhs = self.n_a * (self.beta_e / 2.0).tanh();
        if (lhs - self.gamma_t).abs() > tol * self.gamma_t.max(1.0) {
            return Err(Error::Parameter(format!(
                "thermal identity violated: <n_a>(1 - 2 gamma_T) = {lhs} vs gamma_T = {}",
                self.gamma_t
            )));
        }
        if !(self.gamma_t > 0.0 && self.gamma_t < 0.5) {
            return Err(Error::Parameter(format!(
                "gamma_T = {} outside (0, 1/2)",
                self.gamma_t
            )));
        }
        Ok(())
    }

    pub fn n_a(&self) -> f64 {
        self.n_a
    }

    pub fn n_p(&self) -> f64 {
        self.n_p
    }

    pub fn beta_e(&self) -> f64 {
        self.beta_e
    }

    pub fn gamma_t(&self) -> f64 {
        self.gamma_t
    }

    pub fn theta_a(&self, t: f64) -> f64 {
        (self.theta_a)(t)
    }

    pub fn theta_p(&self) -> f64 {
        self.theta_p
    }

    /// Longitudinal rate 1/T1(t) = (Theta_a(t)/pi)(2<n_a> + 1).
    pub fn rate_t1(&self, t: f64) -> f64 {
        self.theta_a(t) / PI * (2.0 * self.n_a + 1.0)
    }

    /// Pure-dephasing contribution Gamma_p = (Theta_p/pi)(2<n_p> + 1).
    pub fn rate_phase(&self) -> f64 {
        self.theta_p / PI * (2.0 * self.n_p + 1.0)
    }

    /// Transverse rate 1/T2(t) = 1/(2 T1(t)) + Gamma_p.
    pub fn rate_t2(&self, t: f64) -> f64 {
        0.5 * self.rate_t1(t) + self.rate_phase()
    }

    /// Thermal fixed point diag(gamma_T, 1 - gamma_T).
    pub fn fixed_point(&self) -> DensityMatrix {
        DensityMatrix::thermal(self.gamma_t).expect("gamma_T validated at construction")
    }
}

/// Effective decay rates at one instant. The imaginary parts are the
/// Lamb-shift-like hook; the standard constructors leave them zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRates {
    pub f_a: Complex64,
    pub g_a: Complex64,
    pub f_p: Complex64,
    pub g_p: Complex64,
}

/// Rates at time t: F = <n> Theta / 2pi, G = (<n> + 1) Theta / 2pi for
/// each bath.
pub fn decay_rates(env: &QuantumEnvironment, t: f64) -> DecayRates {
    let th_a = env.theta_a(t);
    let th_p = env.theta_p;
    DecayRates {
        f_a: Complex64::new(env.n_a * th_a / (2.0 * PI), 0.0),
        g_a: Complex64::new((env.n_a + 1.0) * th_a / (2.0 * PI), 0.0),
        f_p: Complex64::new(env.n_p * th_p / (2.0 * PI), 0.0),
        g_p: Complex64::new((env.n_p + 1.0) * th_p / (2.0 * PI), 0.0),
    }
}

/// Master-equation right-hand side with explicit rates.
///
/// The amplitude dissipators pair the excitation rate F_a with I_+ and
/// the decay rate G_a with I_-, which is the pairing that keeps
/// diag(gamma_T, 1 - gamma_T) stationary; complex rates enter as F and
/// F* on the two operator orderings. Matrix elements satisfy
///
/// ```text
/// d sigma_ee/dt = 2 Re{F_a} sigma_gg - 2 Re{G_a} sigma_ee
/// d sigma_eg/dt = -(F_a* + G_a + Gamma_p) sigma_eg
/// ```
pub fn master_rhs_with_rates(rates: &DecayRates, sigma: &ComplexMat2) -> ComplexMat2 {
    let ip = spin_plus();
    let im = spin_minus();
    let iz = spin_z();

    let mut out = ComplexMat2::zero();

    // F_a (I_+ sigma I_- - I_- I_+ sigma) + F_a* (I_+ sigma I_- - sigma I_- I_+)
    let up_sand = ip.mul(sigma).mul(&im);
    let proj_g = im.mul(&ip);
    out = out.add(&up_sand.sub(&proj_g.mul(sigma)).scale(rates.f_a));
    out = out.add(&up_sand.sub(&sigma.mul(&proj_g)).scale(rates.f_a.conj()));

    // G_a (I_- sigma I_+ - I_+ I_- sigma) + G_a* (I_- sigma I_+ - sigma I_+ I_-)
    let down_sand = im.mul(sigma).mul(&ip);
    let proj_e = ip.mul(&im);
    out = out.add(&down_sand.sub(&proj_e.mul(sigma)).scale(rates.g_a));
    out = out.add(&down_sand.sub(&sigma.mul(&proj_e)).scale(rates.g_a.conj()));

    // phase damping: Gamma_p * 2 (I_z sigma I_z - sigma/4)
    let gamma_p = 2.0 * (rates.f_p + rates.g_p).re;
    let dephase = iz.mul(sigma).mul(&iz).sub(&sigma.scale_re(0.25));
    out = out.add(&dephase.scale_re(2.0 * gamma_p));

    out
}

/// Right-hand side of the master equation at time t.
pub fn master_rhs(env: &QuantumEnvironment, t: f64, sigma: &ComplexMat2) -> ComplexMat2 {
    master_rhs_with_rates(&decay_rates(env, t), sigma)
}

/// Amplitude rate bridged from the semiclassical engine:
/// `Theta_a(t) = pi * Re[kappa_x + kappa_y](t) / (2<n_a> + 1)`.
///
/// With this rate the master equation reproduces the Bloch dynamics of
/// the noise environment it was built from.
pub fn theta_a_from_redfield(
    noise: &NoiseEnvironment,
    profile: &ModulationProfile,
    n_a: f64,
    quad: &QuadratureConfig,
) -> RateFn {
    let noise = *noise;
    let profile = *profile;
    let quad = *quad;
    Arc::new(move |t: f64| {
        let rate = transverse_rate(&noise, &profile, t, &quad)
            .expect("spectral-density quadrature on a smooth integrand");
        PI * rate / (2.0 * n_a + 1.0)
    })
}

/// Master-equation propagation engine.
#[derive(Debug, Clone)]
pub struct MasterEngine {
    pub env: QuantumEnvironment,
}

impl MasterEngine {
    pub fn new(env: QuantumEnvironment) -> Self {
        Self { env }
    }

    /// Propagate sigma0, returning samples at the given times.
    pub fn evolve(
        &self,
        sigma0: &DensityMatrix,
        times: &[f64],
        cfg: &OdeStepperConfig,
    ) -> Result<Vec<DensityMatrix>> {
        let y0 = flatten_mat2(sigma0.matrix());
        let states = integrate_sampled(
            |t, y: &[f64; 8]| {
                let m = unflatten_mat2(y);
                flatten_mat2(&master_rhs(&self.env, t, &m))
            },
            y0,
            times,
            cfg,
        )?;
        Ok(states
            .iter()
            .map(|y| DensityMatrix::from_unchecked(unflatten_mat2(y)))
            .collect())
    }
}
