//! Magnetization extraction, Bloch-equation integration, T1/T2
//! construction from either engine, and the identification that makes
//! the semiclassical and quantum descriptions produce the same Bloch
//! dynamics.
//!
//! Rates rather than times are carried internally (1/T1 vanishes at
//! t = 0, where T1 itself diverges). Both constructors build 1/T2 as
//! `1/(2 T1) + kappa_z`, so that identity holds pointwise by
//! construction and is merely asserted in tests.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lindblad::{thermal_occupation, QuantumEnvironment, RateFn};
use crate::modulation::ModulationProfile;
use crate::numerics::mat2::DensityMatrix;
use crate::numerics::ode::{integrate_sampled, OdeStepperConfig};
use crate::numerics::quad::QuadratureConfig;
use crate::redfield::{kappa_q, kappa_z_plateau, transverse_rate, Axis, NoiseEnvironment};

/// Magnetization components plus the equilibrium longitudinal value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Magnetization {
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
    pub m0: f64,
}

impl Magnetization {
    pub fn transverse_magnitude(&self) -> f64 {
        (self.mx * self.mx + self.my * self.my).sqrt()
    }

    /// Bloch-ball bound |m| <= 1/2 for spin-1/2 expectation values.
    pub fn within_bloch_ball(&self, tol: f64) -> bool {
        self.mx * self.mx + self.my * self.my + self.mz * self.mz <= 0.25 + tol
    }
}

/// Expectation values (Tr I_x sigma, Tr I_y sigma, Tr I_z sigma).
pub fn magnetization_of(sigma: &DensityMatrix, m0: f64) -> Magnetization {
    let [mx, my, mz] = sigma.bloch_vector();
    Magnetization { mx, my, mz, m0 }
}

/// Relaxation rates 1/T1(t) and 1/T2(t) plus the secular rate kappa_z.
#[derive(Clone)]
pub struct RelaxationTimes {
    rate1: RateFn,
    rate2: RateFn,
    kappa_z: f64,
}

impl fmt::Debug for RelaxationTimes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RelaxationTimes")
            .field("kappa_z", &self.kappa_z)
            .finish_non_exhaustive()
    }
}

impl RelaxationTimes {
    pub fn from_rates(rate1: RateFn, kappa_z: f64) -> Self {
        let r1 = rate1.clone();
        let rate2: RateFn = Arc::new(move |t| 0.5 * r1(t) + kappa_z);
        Self {
            rate1,
            rate2,
            kappa_z,
        }
    }

    /// 1/T1 at time t.
    pub fn rate1(&self, t: f64) -> f64 {
        (self.rate1)(t)
    }

    /// 1/T2 at time t.
    pub fn rate2(&self, t: f64) -> f64 {
        (self.rate2)(t)
    }

    pub fn t1(&self, t: f64) -> f64 {
        1.0 / self.rate1(t)
    }

    pub fn t2(&self, t: f64) -> f64 {
        1.0 / self.rate2(t)
    }

    pub fn kappa_z(&self) -> f64 {
        self.kappa_z
    }

    /// Residual of 1/T2 - 1/(2 T1) - kappa_z at time t.
    pub fn t2_identity_residual(&self, t: f64) -> f64 {
        self.rate2(t) - 0.5 * self.rate1(t) - self.kappa_z
    }
}

/// Rates from the semiclassical engine: 1/T1(t) = Re[kappa_x + kappa_y]
/// and kappa_z at its stationary plateau.
pub fn relaxation_times_redfield(
    env: &NoiseEnvironment,
    profile: &ModulationProfile,
    quad: &QuadratureConfig,
) -> RelaxationTimes {
    let (env, profile, quad) = (*env, *profile, *quad);
    let rate1: RateFn = Arc::new(move |t| {
        transverse_rate(&env, &profile, t, &quad)
            .expect("spectral-density quadrature on a smooth integrand")
    });
    RelaxationTimes::from_rates(rate1, kappa_z_plateau(&env))
}

/// Same construction but with the transient kappa_z(t) instead of its
/// plateau, for short-time studies. The transverse rate then uses the
/// time-dependent secular density.
pub fn relaxation_times_redfield_transient(
    env: &NoiseEnvironment,
    profile: &ModulationProfile,
    quad: &QuadratureConfig,
) -> RelaxationTimes {
    let (env, profile, quad) = (*env, *profile, *quad);
    let rate1: RateFn = Arc::new(move |t| {
        transverse_rate(&env, &profile, t, &quad)
            .expect("spectral-density quadrature on a smooth integrand")
    });
    let kz_inf = kappa_z_plateau(&env);
    let r1 = rate1.clone();
    let rate2: RateFn = Arc::new(move |t| {
        let kz = kappa_q(&env, &profile, Axis::Z, t, &quad)
            .expect("secular quadrature on a smooth integrand")
            .re;
        0.5 * r1(t) + kz
    });
    RelaxationTimes {
        rate1,
        rate2,
        kappa_z: kz_inf,
    }
}

/// Rates from the quantum environment:
/// 1/T1(t) = (Theta_a(t)/pi)(2<n_a> + 1) and the phase contribution
/// (Theta_p/pi)(2<n_p> + 1) as kappa_z.
pub fn relaxation_times_master(env: &QuantumEnvironment) -> RelaxationTimes {
    let env_c = env.clone();
    let rate1: RateFn = Arc::new(move |t| env_c.rate_t1(t));
    RelaxationTimes::from_rates(rate1, env.rate_phase())
}

/// Quantum environment whose master-equation dynamics reproduces the
/// Bloch dynamics of the given noise environment: the amplitude rate is
/// bridged from Re[kappa_x + kappa_y] and the phase rate inverts
/// kappa_z = (Theta_p/pi)(2<n_p> + 1).
pub fn identify(
    noise: &NoiseEnvironment,
    profile: &ModulationProfile,
    beta_e: f64,
    n_p: f64,
    quad: &QuadratureConfig,
) -> Result<QuantumEnvironment> {
    let n_a = thermal_occupation(beta_e);
    let theta_a = crate::lindblad::theta_a_from_redfield(noise, profile, n_a, quad);
    let theta_p = PI * kappa_z_plateau(noise) / (2.0 * n_p + 1.0);
    QuantumEnvironment::new(beta_e, n_p, theta_p, theta_a)
}

/// Bloch right-hand side: relaxing longitudinal component toward m0 and
/// decaying transverse components.
pub fn bloch_rhs(rates: &RelaxationTimes, t: f64, m: &Magnetization) -> [f64; 3] {
    let r1 = rates.rate1(t);
    let r2 = rates.rate2(t);
    [-r2 * m.mx, -r2 * m.my, -r1 * (m.mz - m.m0)]
}

/// Bloch-equation integration engine.
#[derive(Debug, Clone)]
pub struct BlochEngine {
    pub rates: RelaxationTimes,
    pub m0: f64,
}

impl BlochEngine {
    pub fn new(rates: RelaxationTimes, m0: f64) -> Self {
        Self { rates, m0 }
    }

    pub fn evolve(
        &self,
        m_init: &Magnetization,
        times: &[f64],
        cfg: &OdeStepperConfig,
    ) -> Result<Vec<Magnetization>> {
        let y0 = [m_init.mx, m_init.my, m_init.mz];
        let states = integrate_sampled(
            |t, y: &[f64; 3]| {
                let m = Magnetization {
                    mx: y[0],
                    my: y[1],
                    mz: y[2],
                    m0: self.m0,
                };
                bloch_rhs(&self.rates, t, &m)
            },
            y0,
            times,
            cfg,
        )?;
        Ok(states
            .iter()
            .map(|y| Magnetization {
                mx: y[0],
                my: y[1],
                mz: y[2],
                m0: self.m0,
            })
            .collect())
    }
}

/// Per-component maxima of |a - b| over paired magnetization samples.
pub fn max_component_deviation(a: &[Magnetization], b: &[Magnetization]) -> Result<[f64; 3]> {
    if a.len() != b.len() {
        return Err(Error::Parameter(format!(
            "trajectory lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut out = [0.0f64; 3];
    for (x, y) in a.iter().zip(b) {
        out[0] = out[0].max((x.mx - y.mx).abs());
        out[1] = out[1].max((x.my - y.my).abs());
        out[2] = out[2].max((x.mz - y.mz).abs());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::MasterEngine;
    use crate::numerics::quad::QuadRule;
    use crate::redfield::transverse_rate_static_limit;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn magnetization_of_basis_states() {
        let m = magnetization_of(&DensityMatrix::excited(), 0.0);
        assert!((m.mz - 0.5).abs() < 1e-15 && m.mx == 0.0 && m.my == 0.0);
        let m = magnetization_of(&DensityMatrix::maximally_mixed(), 0.0);
        assert!(m.mx == 0.0 && m.my == 0.0 && m.mz == 0.0);
        let m = magnetization_of(&DensityMatrix::plus_x(), 0.0);
        assert!((m.mx - 0.5).abs() < 1e-15 && m.my.abs() < 1e-15 && m.mz.abs() < 1e-15);
    }

    fn constant_rates(rate1: f64, kappa_z: f64) -> RelaxationTimes {
        RelaxationTimes::from_rates(Arc::new(move |_| rate1), kappa_z)
    }

    #[test]
    fn equilibrium_magnetization_is_stationary() {
        let rates = constant_rates(0.7, 0.2);
        let m = Magnetization {
            mx: 0.0,
            my: 0.0,
            mz: -0.1,
            m0: -0.1,
        };
        assert_eq!(bloch_rhs(&rates, 0.0, &m), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn longitudinal_closed_form() {
        let (rate1, m0) = (0.5, -0.02);
        let engine = BlochEngine::new(constant_rates(rate1, 0.1), m0);
        let times: Vec<f64> = (0..=50).map(|k| 0.1 * k as f64).collect();
        let m_init = Magnetization {
            mx: 0.0,
            my: 0.0,
            mz: 0.5,
            m0,
        };
        let out = engine
            .evolve(&m_init, &times, &OdeStepperConfig::default())
            .unwrap();
        for (t, m) in times.iter().zip(&out) {
            let expect = m0 + (0.5 - m0) * (-rate1 * t).exp();
            assert!((m.mz - expect).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn transverse_closed_form() {
        let rates = constant_rates(0.8, 0.3);
        let rate2 = 0.5 * 0.8 + 0.3;
        let engine = BlochEngine::new(rates, 0.0);
        let times: Vec<f64> = (0..=40).map(|k| 0.1 * k as f64).collect();
        let m_init = Magnetization {
            mx: 0.5,
            my: 0.0,
            mz: 0.0,
            m0: 0.0,
        };
        let out = engine
            .evolve(&m_init, &times, &OdeStepperConfig::default())
            .unwrap();
        for (t, m) in times.iter().zip(&out) {
            let expect = 0.5 * (-rate2 * t).exp();
            assert!((m.transverse_magnitude() - expect).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn redfield_rates_reach_lorentzian() {
        let env = NoiseEnvironment::isotropic(1.0, 1.0, 0.5, 0.0).unwrap();
        let omega = 2.0;
        let profile = ModulationProfile::static_profile(omega).unwrap();
        let quad = QuadratureConfig::new(256.0, QuadRule::Simpson).unwrap();
        let rates = relaxation_times_redfield(&env, &profile, &quad);
        let r1 = rates.rate1(50.0 * env.tau0);
        let expect = transverse_rate_static_limit(&env, omega);
        assert!(((r1 - expect) / expect).abs() < 1e-3);
    }

    #[test]
    fn t2_identity_pointwise_for_both_constructors() {
        let env = NoiseEnvironment::isotropic(1.0, 1.0, 0.4, 0.0).unwrap();
        let profile = ModulationProfile::new(2.0, 0.5, 1.0).unwrap();
        let quad = QuadratureConfig::default();
        let redfield = relaxation_times_redfield(&env, &profile, &quad);
        let qenv =
            QuantumEnvironment::with_constant_theta_a(0.3, 2.0, 0.4, 0.9).unwrap();
        let master = relaxation_times_master(&qenv);
        for t in [0.0, 0.3, 1.7, 6.0] {
            assert!(redfield.t2_identity_residual(t).abs() < 1e-12);
            assert!(master.t2_identity_residual(t).abs() < 1e-12);
        }
    }

    #[test]
    fn extreme_narrowing_t1_equals_t2() {
        // omega tau0 << 1 and isotropic noise: kappa_z = g^2 l^2 tau0 and
        // 1/T1 = 2 g^2 l^2 tau0, so 1/T2 = 1/T1 within 1%.
        let env = NoiseEnvironment::isotropic(1.0, 1.0, 1e-3, 0.0).unwrap();
        let profile = ModulationProfile::static_profile(1.0).unwrap();
        let quad = QuadratureConfig::default();
        let rates = relaxation_times_redfield(&env, &profile, &quad);
        let t = 60.0 * env.tau0;
        let (t1, t2) = (rates.t1(t), rates.t2(t));
        assert!(((t1 - t2) / t1).abs() < 0.01, "T1 = {t1}, T2 = {t2}");
    }

    #[test]
    fn master_rates_pure_dephasing_and_pure_amplitude() {
        let qenv = QuantumEnvironment::with_constant_theta_a(0.5, 2.0, 0.7, 0.0).unwrap();
        let rates = relaxation_times_master(&qenv);
        assert_eq!(rates.rate1(1.0), 0.0);
        let expect = 0.7 / PI * 5.0;
        assert!((rates.rate2(1.0) - expect).abs() < 1e-15);

        let qenv2 = QuantumEnvironment::with_constant_theta_a(0.5, 2.0, 0.0, 0.9).unwrap();
        let rates2 = relaxation_times_master(&qenv2);
        assert!((rates2.rate2(0.3) - 0.5 * rates2.rate1(0.3)).abs() < 1e-15);
    }

    #[test]
    fn identified_environment_matches_redfield_t1() {
        let env = NoiseEnvironment::isotropic(1.0, 1.0, 0.3, 0.0).unwrap();
        let profile = ModulationProfile::static_profile(2.0).unwrap();
        let quad = QuadratureConfig::new(128.0, QuadRule::Simpson).unwrap();
        let qenv = identify(&env, &profile, 0.01, 5.0, &quad).unwrap();
        let from_noise = relaxation_times_redfield(&env, &profile, &quad);
        let from_master = relaxation_times_master(&qenv);
        for t in [0.1, 0.5, 2.0, 8.0] {
            let (a, b) = (from_noise.rate1(t), from_master.rate1(t));
            assert!((a - b).abs() < 1e-10 * a.max(1.0), "t = {t}: {a} vs {b}");
        }
        // phase rate inverts the kappa_z identification
        let expect_theta_p = PI * kappa_z_plateau(&env) / 11.0;
        assert!((qenv.theta_p() - expect_theta_p).abs() < 1e-14);
    }

    #[test]
    fn master_and_bloch_agree_from_identified_environment() {
        // Cross-formalism oracle at the magnetization level.
        let env = NoiseEnvironment::isotropic(1.0, 5e4, 1e-5, 1e-4).unwrap();
        let omega = 1.0;
        let profile = ModulationProfile::static_profile(omega).unwrap();
        let quad = QuadratureConfig::default();
        let beta_e = 1e-4 * omega;
        let qenv = identify(&env, &profile, beta_e, thermal_occupation(beta_e), &quad).unwrap();

        let sigma0 = DensityMatrix::from_bloch(0.3, 0.15, 0.25).unwrap();
        let times: Vec<f64> = (0..=100).map(|k| 0.05 * k as f64).collect();
        let ode = OdeStepperConfig::default();

        let master = MasterEngine::new(qenv.clone());
        let master_traj = master.evolve(&sigma0, &times, &ode).unwrap();
        let m0_q = qenv.gamma_t() - 0.5;
        let master_mags: Vec<Magnetization> = master_traj
            .iter()
            .map(|s| magnetization_of(s, m0_q))
            .collect();

        let rates = relaxation_times_redfield(&env, &profile, &quad);
        let bloch = BlochEngine::new(rates, m0_q);
        let bloch_mags = bloch
            .evolve(&master_mags[0], &times, &ode)
            .unwrap();

        let dev = max_component_deviation(&master_mags, &bloch_mags).unwrap();
        for (i, d) in dev.iter().enumerate() {
            assert!(*d < 1e-6, "component {i} deviates by {d}");
        }
    }

    #[test]
    fn bloch_ball_containment_along_trajectories() {
        let engine = BlochEngine::new(constant_rates(0.6, 0.25), -0.01);
        let times: Vec<f64> = (0..=60).map(|k| 0.1 * k as f64).collect();
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..10 {
            let (x, y, z) = (
                rng.gen_range(-0.25..0.25),
                rng.gen_range(-0.25..0.25),
                rng.gen_range(-0.25..0.25),
            );
            let m_init = Magnetization {
                mx: x,
                my: y,
                mz: z,
                m0: -0.01,
            };
            for m in engine
                .evolve(&m_init, &times, &OdeStepperConfig::default())
                .unwrap()
            {
                assert!(m.within_bloch_ball(1e-6));
            }
        }
    }
}
