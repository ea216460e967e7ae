//! Semiclassical relaxation engine for a frequency-modulated spin-1/2
//! coupled to an isotropic classical noise source.
//!
//! The bath enters through the exponential autocorrelation
//! `lambda_q^2 exp(-|dt|/tau0)` per Cartesian axis. Spectral densities
//! `Theta_q(t, s*Omega)` are running integrals of the correlation weighted
//! by the accumulated-phase factor; the `kappa_q` rates strip the overall
//! phase and reduce to Lorentzians in the static long-time limit:
//!
//! ```text
//! Re[kappa_x + kappa_y] -> 2 g^2 l^2 tau0 / (1 + w^2 tau0^2)
//! kappa_z              ->   g^2 l_z^2 tau0
//! ```
//!
//! The relaxation matrix contracts these spectral densities with spin
//! matrix elements; the density matrix is propagated in deviation form
//! (state minus the high-temperature equilibrium).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modulation::ModulationProfile;
use crate::numerics::mat2::{spin_x, spin_y, spin_z, ComplexMat2, DensityMatrix, ZERO};
use crate::numerics::ode::{integrate_sampled, OdeStepperConfig};
use crate::numerics::quad::{integrate_complex, QuadratureConfig};

/// Cartesian bath axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    fn operator(self) -> ComplexMat2 {
        match self {
            Axis::X => spin_x(),
            Axis::Y => spin_y(),
            Axis::Z => spin_z(),
        }
    }
}

/// Sign of the accumulated phase entering a spectral density: the level
/// pair (k, n) contributes Omega_kn = (k - n) * Omega.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseSign {
    Minus,
    Zero,
    Plus,
}

impl PhaseSign {
    pub fn value(self) -> f64 {
        match self {
            PhaseSign::Minus => -1.0,
            PhaseSign::Zero => 0.0,
            PhaseSign::Plus => 1.0,
        }
    }

    fn from_levels(k: u8, n: u8) -> Self {
        match k as i8 - n as i8 {
            1 => PhaseSign::Plus,
            -1 => PhaseSign::Minus,
            _ => PhaseSign::Zero,
        }
    }
}

/// Classical stochastic bath: gyromagnetic factor, per-axis mean-square
/// fluctuation, correlation time and inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseEnvironment {
    pub gamma_n: f64,
    pub lambda_sq: [f64; 3],
    pub tau0: f64,
    pub beta: f64,
}

impl NoiseEnvironment {
    pub fn new(gamma_n: f64, lambda_sq: [f64; 3], tau0: f64, beta: f64) -> Result<Self> {
        if !(tau0 > 0.0) {
            return Err(Error::Parameter(format!(
                "tau0 must be positive, got {tau0}"
            )));
        }
        if lambda_sq.iter().any(|&l| l < 0.0) {
            return Err(Error::Parameter(format!(
                "lambda_sq must be nonnegative, got {lambda_sq:?}"
            )));
        }
        if beta < 0.0 {
            return Err(Error::Parameter(format!(
                "beta must be nonnegative, got {beta}"
            )));
        }
        Ok(Self {
            gamma_n,
            lambda_sq,
            tau0,
            beta,
        })
    }

    /// Equal mean-square fluctuation on all three axes.
    pub fn isotropic(gamma_n: f64, lambda_sq: f64, tau0: f64, beta: f64) -> Result<Self> {
        Self::new(gamma_n, [lambda_sq; 3], tau0, beta)
    }

    pub fn lambda_sq(&self, axis: Axis) -> f64 {
        self.lambda_sq[axis.index()]
    }

    /// Bath autocorrelation lambda_q^2 exp(-|dt|/tau0); even in dt.
    pub fn correlation(&self, axis: Axis, dt: f64) -> f64 {
        self.lambda_sq(axis) * (-dt.abs() / self.tau0).exp()
    }

    /// Coupling strength gamma_n^2 lambda_q^2 entering the spectral
    /// densities.
    fn coupling(&self, axis: Axis) -> f64 {
        self.gamma_n * self.gamma_n * self.lambda_sq(axis)
    }
}

/// Correlation-window cutoff in units of tau0. exp(-80) ~ 1.8e-35 is far
/// below every tolerance in the crate, so truncating the running integral
/// there is exact for f64 purposes.
const WINDOW_TAU0: f64 = 80.0;

/// Minimum resolution of the correlation decay (panels per tau0).
const PANELS_PER_TAU0: f64 = 24.0;

/// Minimum resolution of the oscillatory phase (panels per radian).
const PANELS_PER_RADIAN: f64 = 1.5;

fn theta_panels(
    env: &NoiseEnvironment,
    profile: &ModulationProfile,
    width: f64,
    cfg: &QuadratureConfig,
) -> usize {
    let from_user = cfg.panels_per_unit * width;
    let from_decay = PANELS_PER_TAU0 * width / env.tau0;
    let from_phase = PANELS_PER_RADIAN * profile.max_frequency() * width;
    let n = from_user.max(from_decay).max(from_phase).ceil() as usize;
    let n = n.clamp(16, 4_000_000);
    n + n % 2
}

/// Spectral density Theta_q(t, s*Omega): the running integral over the
/// correlation window of `exp(-t'/tau0) exp(i s Omega(t + t'))`, scaled
/// by gamma_n^2 lambda_q^2. `sign` selects s in {-1, 0, +1}; the zero
/// case is the secular (z-axis) density with unit phase factor.
pub fn theta_q(
    env: &NoiseEnvironment,
    profile: &ModulationProfile,
    axis: Axis,
    t: f64,
    sign: PhaseSign,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    if t < 0.0 {
        return Err(Error::Parameter(format!("time must be nonnegative, got {t}")));
    }
    let coupling = env.coupling(axis);
    if coupling == 0.0 || t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let width = t.min(WINDOW_TAU0 * env.tau0);
    let n = theta_panels(env, profile, width, cfg);
    let s = sign.value();
    let integral = integrate_complex(
        |tp| {
            let damp = (-tp / env.tau0).exp();
            if s == 0.0 {
                Complex64::new(damp, 0.0)
            } else {
                Complex64::from_polar(damp, s * profile.accumulated_phase(t + tp))
            }
        },
        0.0,
        width,
        n,
        cfg.rule,
    )?;
    Ok(integral * coupling)
}

/// Decay rate kappa_q(t): the transverse axes carry the phase-stripped
/// spectral density `Theta_q(t, +Omega) exp(-i Omega(t))`; the z axis is
/// the secular density, constant in the long-time limit.
pub fn kappa_q(
    env: &NoiseEnvironment,
    profile: &ModulationProfile,
    axis: Axis,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    match axis {
        Axis::X | Axis::Y => {
            let theta = theta_q(env, profile, axis, t, PhaseSign::Plus, cfg)?;
            Ok(theta * Complex64::from_polar(1.0, -profile.accumulated_phase(t)))
        }
        Axis::Z => theta_q(env, profile, Axis::Z, t, PhaseSign::Zero, cfg),
    }
}

/// Stationary plateau of the z-axis rate, gamma_n^2 lambda_z^2 tau0.
pub fn kappa_z_plateau(env: &NoiseEnvironment) -> f64 {
    env.coupling(Axis::Z) * env.tau0
}

/// Value of Re[kappa_x + kappa_y] at time t.
pub fn transverse_rate(
    env: &NoiseEnvironment,
    profile: &ModulationProfile,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let kx = kappa_q(env, profile, Axis::X, t, cfg)?;
    let ky = if env.lambda_sq(Axis::Y) == env.lambda_sq(Axis::X) {
        kx
    } else {
        kappa_q(env, profile, Axis::Y, t, cfg)?
    };
    Ok((kx + ky).re)
}

/// Static long-time limit of Re[kappa_x + kappa_y]: the Lorentzian
/// 2 gamma^2 lambda^2 tau0 / (1 + w^2 tau0^2) evaluated per axis.
pub fn transverse_rate_static_limit(env: &NoiseEnvironment, omega: f64) -> f64 {
    let lorentz = env.tau0 / (1.0 + omega * omega * env.tau0 * env.tau0);
    (env.coupling(Axis::X) + env.coupling(Axis::Y)) * lorentz
}

/// Relaxation matrix entries indexed by four binary level labels
/// (k, n, n', k'), with |0> the ground and |1> the excited level.
#[derive(Debug, Clone, Copy)]
pub struct RelaxationMatrix {
    entries: [[[[Complex64; 2]; 2]; 2]; 2],
}

impl RelaxationMatrix {
    pub fn get(&self, k: u8, n: u8, np: u8, kp: u8) -> Complex64 {
        self.entries[k as usize][n as usize][np as usize][kp as usize]
    }

    pub fn max_abs(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..2 {
            for n in 0..2 {
                for np in 0..2 {
                    for kp in 0..2 {
                        worst = worst.max(self.entries[k][n][np][kp].norm());
                    }
                }
            }
        }
        worst
    }
}

/// Matrix element <a| I_q |b> by level label (|1> excited, |0> ground);
/// the storage layout puts the excited level in row 0.
fn spin_element(op: &ComplexMat2, a: u8, b: u8) -> Complex64 {
    op.get(1 - a as usize, 1 - b as usize)
}

/// Spectral densities for one evaluation time, resolved by axis and
/// phase sign.
struct ThetaTable {
    by_axis: [[Complex64; 3]; 3],
}

impl ThetaTable {
    fn build(
        env: &NoiseEnvironment,
        profile: &ModulationProfile,
        t: f64,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        let mut by_axis = [[ZERO; 3]; 3];
        for axis in Axis::ALL {
            let op = axis.operator();
            let mut need_osc = false;
            let mut need_sec = false;
            for a in 0..2u8 {
                for b in 0..2u8 {
                    if spin_element(&op, a, b).norm() > 0.0 {
                        if a == b {
                            need_sec = true;
                        } else {
                            need_osc = true;
                        }
                    }
                }
            }
            let i = axis.index();
            if need_osc {
                // isotropic transverse noise shares one integral
                let plus = if axis == Axis::Y
                    && env.lambda_sq(Axis::Y) == env.lambda_sq(Axis::X)
                {
                    by_axis[Axis::X.index()][sign_slot(PhaseSign::Plus)]
                } else {
                    theta_q(env, profile, axis, t, PhaseSign::Plus, cfg)?
                };
                by_axis[i][sign_slot(PhaseSign::Plus)] = plus;
                by_axis[i][sign_slot(PhaseSign::Minus)] = plus.conj();
            }
            if need_sec {
                by_axis[i][sign_slot(PhaseSign::Zero)] =
                    theta_q(env, profile, axis, t, PhaseSign::Zero, cfg)?;
            }
        }
        Ok(Self { by_axis })
    }

    fn get(&self, axis: Axis, sign: PhaseSign) -> Complex64 {
        self.by_axis[axis.index()][sign_slot(sign)]
    }
}

fn sign_slot(sign: PhaseSign) -> usize {
    match sign {
        PhaseSign::Minus => 0,
        PhaseSign::Zero => 1,
        PhaseSign::Plus => 2,
    }
}

/// All sixteen relaxation-matrix entries at time t.
pub fn relaxation_matrix(
    env: &NoiseEnvironment,
    profile: &ModulationProfile,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<RelaxationMatrix> {
    let thetas = ThetaTable::build(env, profile, t, cfg)?;
    let omega_t = profile.accumulated_phase(t);
    // e^{i Omega_ab(t)} for level labels a, b
    let phase = |a: u8, b: u8| -> Complex64 {
        Complex64::from_polar(1.0, PhaseSign::from_levels(a, b).value() * omega_t)
    };
    let theta = |axis: Axis, a: u8, b: u8| thetas.get(axis, PhaseSign::from_levels(a, b));

    let ops = [spin_x(), spin_y(), spin_z()];
    let mut entries = [[[[ZERO; 2]; 2]; 2]; 2];
    for k in 0..2u8 {
        for n in 0..2u8 {
            for np in 0..2u8 {
                for kp in 0..2u8 {
                    let mut r = ZERO;
                    for (qi, axis) in Axis::ALL.iter().enumerate() {
                        let op = &ops[qi];
                        let direct = spin_element(op, k, n) * spin_element(op, np, kp);
                        if direct.norm() > 0.0 {
                            r += (theta(*axis, np, kp) * phase(k, n)
                                + theta(*axis, k, n) * phase(np, kp))
                                * direct;
                        }
                        for j in 0..2u8 {
                            if kp == np {
                                let w = spin_element(op, k, j) * spin_element(op, j, n);
                                if w.norm() > 0.0 {
                                    r -= w * theta(*axis, j, n) * phase(k, j);
                                }
                            }
                            if k == n {
                                let w = spin_element(op, j, kp) * spin_element(op, np, j);
                                if w.norm() > 0.0 {
                                    r -= w * theta(*axis, np, j) * phase(j, kp);
                                }
                            }
                        }
                    }
                    entries[k as usize][n as usize][np as usize][kp as usize] = r;
                }
            }
        }
    }
    Ok(RelaxationMatrix { entries })
}

/// Redfield propagation engine. Values are immutable after construction;
/// independent trajectories may run in parallel.
#[derive(Debug, Clone)]
pub struct RedfieldEngine {
    pub env: NoiseEnvironment,
    pub profile: ModulationProfile,
    pub quad: QuadratureConfig,
    /// Drop the coherent `-i [H_S, Sigma]` term and keep only the
    /// environment-induced dynamics.
    pub drop_free_evolution: bool,
}

/// Result of a Redfield propagation: state samples plus a positivity
/// diagnostic (most negative eigenvalue seen along the trajectory).
#[derive(Debug, Clone)]
pub struct RedfieldRun {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub min_eigenvalue: f64,
}

impl RedfieldEngine {
    pub fn new(env: NoiseEnvironment, profile: ModulationProfile) -> Self {
        Self {
            env,
            profile,
            quad: QuadratureConfig::default(),
            drop_free_evolution: false,
        }
    }

    pub fn with_quadrature(mut self, quad: QuadratureConfig) -> Self {
        self.quad = quad;
        self
    }

    pub fn without_free_evolution(mut self) -> Self {
        self.drop_free_evolution = true;
        self
    }

    /// High-temperature equilibrium state (1 - beta H_S(0)) / 2.
    pub fn sigma_eq(&self) -> DensityMatrix {
        let x = self.env.beta * self.profile.omega0() / 2.0;
        DensityMatrix::from_unchecked(ComplexMat2::diag(
            Complex64::new((1.0 - x) / 2.0, 0.0),
            Complex64::new((1.0 + x) / 2.0, 0.0),
        ))
    }

    /// Equilibrium longitudinal magnetization Tr(I_z sigma_eq).
    pub fn equilibrium_mz(&self) -> f64 {
        -self.env.beta * self.profile.omega0() / 4.0
    }

    /// Right-hand side in deviation form: d(Sigma)/dt for
    /// Sigma = sigma - sigma_eq.
    pub fn rhs(&self, t: f64, sigma_dev: &ComplexMat2) -> Result<ComplexMat2> {
        let r = relaxation_matrix(&self.env, &self.profile, t, &self.quad)?;
        let omega_t = self.profile.accumulated_phase(t);
        let phase = |a: u8, b: u8| -> Complex64 {
            Complex64::from_polar(1.0, PhaseSign::from_levels(a, b).value() * omega_t)
        };
        let elem = |a: u8, b: u8| sigma_dev.get(1 - a as usize, 1 - b as usize);

        let mut out = ComplexMat2::zero();
        for k in 0..2u8 {
            for kp in 0..2u8 {
                let mut acc = ZERO;
                for n in 0..2u8 {
                    for np in 0..2u8 {
                        let entry = r.get(k, n, np, kp);
                        if entry.norm() > 0.0 {
                            // e^{-i(Omega_kk' + Omega_n'n)}
                            let ph = (phase(k, kp) * phase(np, n)).conj();
                            acc += ph * entry * elem(n, np);
                        }
                    }
                }
                out.m[1 - k as usize][1 - kp as usize] = acc;
            }
        }
        if !self.drop_free_evolution {
            let h = spin_z().scale_re(self.profile.larmor_frequency(t));
            let comm = h.commutator(sigma_dev);
            out = out.sub(&comm.scale(Complex64::new(0.0, 1.0)));
        }
        Ok(out)
    }

    /// Propagate sigma0 and return density-matrix samples at the given
    /// times (first entry must be the initial time).
    pub fn evolve(
        &self,
        sigma0: &DensityMatrix,
        times: &[f64],
        cfg: &OdeStepperConfig,
    ) -> Result<RedfieldRun> {
        let eq = self.sigma_eq();
        let dev0 = sigma0.matrix().sub(eq.matrix());
        let y0 = flatten(&dev0);
        let mut rhs_err: Option<Error> = None;
        let states = integrate_sampled(
            |t, y: &[f64; 8]| {
                let m = unflatten(y);
                match self.rhs(t, &m) {
                    Ok(d) => flatten(&d),
                    Err(e) => {
                        rhs_err = Some(e);
                        [0.0; 8]
                    }
                }
            },
            y0,
            times,
            cfg,
        )?;
        if let Some(e) = rhs_err {
            return Err(e);
        }
        let mut min_eig = f64::INFINITY;
        let states: Vec<DensityMatrix> = states
            .iter()
            .map(|y| {
                let sigma = unflatten(y).add(eq.matrix());
                let dm = DensityMatrix::from_unchecked(sigma);
                min_eig = min_eig.min(dm.min_eigenvalue());
                dm
            })
            .collect();
        Ok(RedfieldRun {
            times: times.to_vec(),
            states,
            min_eigenvalue: min_eig,
        })
    }
}

pub(crate) fn flatten(m: &ComplexMat2) -> [f64; 8] {
    let mut out = [0.0; 8];
    for r in 0..2 {
        for c in 0..2 {
            out[2 * (2 * r + c)] = m.m[r][c].re;
            out[2 * (2 * r + c) + 1] = m.m[r][c].im;
        }
    }
    out
}

pub(crate) fn unflatten(y: &[f64; 8]) -> ComplexMat2 {
    let mut m = ComplexMat2::zero();
    for r in 0..2 {
        for c in 0..2 {
            m.m[r][c] = Complex64::new(y[2 * (2 * r + c)], y[2 * (2 * r + c) + 1]);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::QuadRule;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn fine_quad() -> QuadratureConfig {
        QuadratureConfig::new(512.0, QuadRule::Simpson).unwrap()
    }

    fn test_env() -> NoiseEnvironment {
        NoiseEnvironment::isotropic(1.0, 1.0, 0.5, 0.0).unwrap()
    }

    fn static_profile(omega: f64) -> ModulationProfile {
        ModulationProfile::static_profile(omega).unwrap()
    }

    #[test]
    fn correlation_at_zero_lag() {
        let env = NoiseEnvironment::new(2.0, [0.3, 0.4, 0.5], 1.5, 0.0).unwrap();
        assert_eq!(env.correlation(Axis::X, 0.0), 0.3);
        assert_eq!(env.correlation(Axis::Z, 0.0), 0.5);
    }

    #[test]
    fn correlation_at_one_correlation_time() {
        let env = test_env();
        let v = env.correlation(Axis::Y, 0.5);
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn correlation_is_even() {
        let env = test_env();
        assert_eq!(env.correlation(Axis::X, -0.5), env.correlation(Axis::X, 0.5));
    }

    #[test]
    fn theta_vanishes_at_time_zero() {
        let env = test_env();
        let p = static_profile(2.0);
        let v = theta_q(&env, &p, Axis::X, 0.0, PhaseSign::Plus, &fine_quad()).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    /// Static closed form: Theta = g^2 l^2 e^{iwt} (1 - e^{-(1/tau0 - iw)t})
    /// / (1/tau0 - iw).
    fn theta_static_closed_form(env: &NoiseEnvironment, omega: f64, t: f64) -> Complex64 {
        let g2l2 = env.gamma_n * env.gamma_n * env.lambda_sq(Axis::X);
        let pole = Complex64::new(1.0 / env.tau0, -omega);
        let num = Complex64::new(1.0, 0.0) - (-pole * t).exp();
        Complex64::from_polar(1.0, omega * t) * g2l2 * num / pole
    }

    #[test]
    fn theta_matches_static_closed_form() {
        let env = test_env();
        let omega = 2.0;
        let p = static_profile(omega);
        for t in [0.3, 1.0, 3.0] {
            let numeric = theta_q(&env, &p, Axis::X, t, PhaseSign::Plus, &fine_quad()).unwrap();
            let exact = theta_static_closed_form(&env, omega, t);
            assert!(
                (numeric - exact).norm() < 1e-8,
                "t = {t}: {numeric} vs {exact}"
            );
        }
    }

    #[test]
    fn theta_secular_long_time_plateau() {
        let env = test_env();
        let p = static_profile(2.0);
        let v = theta_q(&env, &p, Axis::Z, 60.0 * env.tau0, PhaseSign::Zero, &fine_quad())
            .unwrap();
        let expect = env.gamma_n * env.gamma_n * env.lambda_sq(Axis::Z) * env.tau0;
        assert!((v.re - expect).abs() / expect < 1e-8, "got {v}");
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn theta_minus_is_conjugate_of_plus() {
        let env = test_env();
        let p = ModulationProfile::new(2.0, 0.5, 1.0).unwrap();
        let plus = theta_q(&env, &p, Axis::X, 1.7, PhaseSign::Plus, &fine_quad()).unwrap();
        let minus = theta_q(&env, &p, Axis::X, 1.7, PhaseSign::Minus, &fine_quad()).unwrap();
        assert!((plus.conj() - minus).norm() < 1e-12);
    }

    #[test]
    fn kappa_transverse_reaches_lorentzian() {
        let env = test_env();
        let omega = 2.0;
        let p = static_profile(omega);
        let t = 50.0 * env.tau0;
        let rate = transverse_rate(&env, &p, t, &fine_quad()).unwrap();
        let expect = transverse_rate_static_limit(&env, omega);
        assert!(
            ((rate - expect) / expect).abs() < 1e-3,
            "rate {rate} vs {expect}"
        );
        // 2 g^2 l^2 tau0 / (1 + w^2 tau0^2) with the numbers above
        assert!((expect - 2.0 * 0.5 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn kappa_z_reaches_plateau() {
        let env = test_env();
        let p = static_profile(2.0);
        let v = kappa_q(&env, &p, Axis::Z, 50.0 * env.tau0, &fine_quad()).unwrap();
        let expect = kappa_z_plateau(&env);
        assert!(((v.re - expect) / expect).abs() < 1e-3);
    }

    #[test]
    fn kappa_vanishes_at_time_zero() {
        let env = test_env();
        let p = static_profile(2.0);
        for axis in Axis::ALL {
            let v = kappa_q(&env, &p, axis, 0.0, &fine_quad()).unwrap();
            assert_eq!(v, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn relaxation_matrix_zero_at_time_zero() {
        let env = test_env();
        let p = static_profile(2.0);
        let r = relaxation_matrix(&env, &p, 0.0, &fine_quad()).unwrap();
        assert!(r.max_abs() < 1e-15);
    }

    /// Stationary textbook entries: the same contraction built from the
    /// closed-form long-time spectral densities
    /// e^{i s w t} g^2 l^2 / (1/tau0 - i s w), an independent algebraic
    /// route with no quadrature.
    fn stationary_relaxation_entry(
        env: &NoiseEnvironment,
        omega: f64,
        t: f64,
        k: u8,
        n: u8,
        np: u8,
        kp: u8,
    ) -> Complex64 {
        let theta_inf = |axis: Axis, a: u8, b: u8| -> Complex64 {
            let s = PhaseSign::from_levels(a, b).value();
            let g2l2 = env.gamma_n * env.gamma_n * env.lambda_sq(axis);
            Complex64::from_polar(1.0, s * omega * t) * g2l2
                / Complex64::new(1.0 / env.tau0, -s * omega)
        };
        let phase = |a: u8, b: u8| -> Complex64 {
            Complex64::from_polar(1.0, PhaseSign::from_levels(a, b).value() * omega * t)
        };
        let ops = [spin_x(), spin_y(), spin_z()];
        let mut r = ZERO;
        for (qi, axis) in Axis::ALL.iter().enumerate() {
            let op = &ops[qi];
            let direct = spin_element(op, k, n) * spin_element(op, np, kp);
            if direct.norm() > 0.0 {
                r += (theta_inf(*axis, np, kp) * phase(k, n)
                    + theta_inf(*axis, k, n) * phase(np, kp))
                    * direct;
            }
            for j in 0..2u8 {
                if kp == np {
                    let w = spin_element(op, k, j) * spin_element(op, j, n);
                    if w.norm() > 0.0 {
                        r -= w * theta_inf(*axis, j, n) * phase(k, j);
                    }
                }
                if k == n {
                    let w = spin_element(op, j, kp) * spin_element(op, np, j);
                    if w.norm() > 0.0 {
                        r -= w * theta_inf(*axis, np, j) * phase(j, kp);
                    }
                }
            }
        }
        r
    }

    #[test]
    fn relaxation_matrix_static_limit_matches_textbook_form() {
        let env = test_env();
        let omega = 2.0;
        let p = static_profile(omega);
        let t = 60.0 * env.tau0;
        let r = relaxation_matrix(&env, &p, t, &fine_quad()).unwrap();
        let scale = r.max_abs();
        for k in 0..2u8 {
            for n in 0..2u8 {
                for np in 0..2u8 {
                    for kp in 0..2u8 {
                        let got = r.get(k, n, np, kp);
                        let want = stationary_relaxation_entry(&env, omega, t, k, n, np, kp);
                        assert!(
                            (got - want).norm() / scale < 1e-8,
                            "entry ({k}{n},{np}{kp}): {got} vs {want}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn relaxation_matrix_conjugation_symmetry() {
        // R_{kn,n'k'} = conj(R_{k'n',nk}) preserves Hermiticity of the
        // propagated state.
        let env = NoiseEnvironment::new(1.0, [0.8, 1.1, 0.6], 0.4, 0.0).unwrap();
        let p = ModulationProfile::new(2.0, 0.7, 1.3).unwrap();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..10 {
            let t: f64 = rng.gen_range(0.05..4.0);
            let r = relaxation_matrix(&env, &p, t, &fine_quad()).unwrap();
            let scale = r.max_abs();
            for k in 0..2u8 {
                for n in 0..2u8 {
                    for np in 0..2u8 {
                        for kp in 0..2u8 {
                            let a = r.get(k, n, np, kp);
                            let b = r.get(kp, np, n, k).conj();
                            assert!(
                                (a - b).norm() / scale < 1e-10,
                                "t = {t}, entry ({k}{n},{np}{kp}): {a} vs {b}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rhs_zero_deviation_is_fixed_point() {
        let engine = RedfieldEngine::new(test_env(), static_profile(2.0));
        let d = engine.rhs(1.0, &ComplexMat2::zero()).unwrap();
        assert!(d.frobenius_norm() < 1e-15);
    }

    #[test]
    fn rhs_population_flow_matches_magnetization_equation() {
        // For diagonal deviation and dropped free evolution,
        // d<I_z>/dt = -Re[kappa_x + kappa_y] (mz - m0).
        let env = test_env();
        let p = static_profile(2.0);
        let engine = RedfieldEngine::new(env, p)
            .with_quadrature(fine_quad())
            .without_free_evolution();
        let dev = ComplexMat2::diag(Complex64::new(0.3, 0.0), Complex64::new(-0.3, 0.0));
        for t in [0.2, 0.8, 2.5] {
            let d = engine.rhs(t, &dev).unwrap();
            let dmz = 0.5 * (d.get(0, 0).re - d.get(1, 1).re);
            let rate = transverse_rate(&env, &p, t, &fine_quad()).unwrap();
            let mz_dev = 0.5 * (dev.get(0, 0).re - dev.get(1, 1).re);
            let expect = -rate * mz_dev;
            assert!(
                (dmz - expect).abs() < 1e-10 * rate.max(1.0),
                "t = {t}: {dmz} vs {expect}"
            );
        }
    }

    #[test]
    fn rhs_coherence_decay_matches_transverse_rate() {
        // Re part of the coherence decay equals Re[kappa_x+kappa_y]/2 + kappa_z.
        let env = test_env();
        let p = static_profile(2.0);
        let engine = RedfieldEngine::new(env, p)
            .with_quadrature(fine_quad())
            .without_free_evolution();
        let dev = ComplexMat2::from_rows(ZERO, Complex64::new(1.0, 0.0), ZERO, ZERO);
        for t in [0.4, 1.5, 3.0] {
            let d = engine.rhs(t, &dev).unwrap();
            let rate_t = transverse_rate(&env, &p, t, &fine_quad()).unwrap();
            let kz = kappa_q(&env, &p, Axis::Z, t, &fine_quad()).unwrap();
            // coherence element sits at matrix (0, 1) = <1|..|0>
            let got = d.get(0, 1).re;
            let expect = -(rate_t / 2.0 + kz.re);
            assert!(
                (got - expect).abs() < 1e-9,
                "t = {t}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn equilibrium_is_stationary_under_evolution() {
        let env = NoiseEnvironment::isotropic(1.0, 1.0, 0.25, 0.01).unwrap();
        let p = static_profile(2.0);
        let engine = RedfieldEngine::new(env, p);
        let eq = engine.sigma_eq();
        let times: Vec<f64> = (0..=40).map(|k| 0.1 * k as f64).collect();
        let run = engine
            .evolve(&eq, &times, &OdeStepperConfig::default())
            .unwrap();
        for s in &run.states {
            assert!(s.matrix().max_abs_diff(eq.matrix()) < 1e-10);
        }
    }

    #[test]
    fn longitudinal_relaxation_rate_matches_lorentzian() {
        // From the excited state, fit the exponential approach of mz to m0
        // and compare against the stationary transverse-rate formula.
        let env = NoiseEnvironment::isotropic(1.0, 1.0, 0.25, 0.01).unwrap();
        let omega = 2.0;
        let p = static_profile(omega);
        let engine = RedfieldEngine::new(env, p).without_free_evolution();
        let times: Vec<f64> = (0..=100).map(|k| 0.05 * k as f64).collect();
        let run = engine
            .evolve(&DensityMatrix::excited(), &times, &OdeStepperConfig::default())
            .unwrap();
        let m0 = engine.equilibrium_mz();
        // linear fit of ln(mz - m0) over the post-transient window
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (t, s) in times.iter().zip(&run.states) {
            if *t >= 2.5 && *t <= 4.5 {
                xs.push(*t);
                ys.push((s.bloch_vector()[2] - m0).ln());
            }
        }
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let expect = transverse_rate_static_limit(&env, omega);
        assert!(
            ((-slope - expect) / expect).abs() < 0.01,
            "fitted rate {} vs {expect}",
            -slope
        );
    }

    #[test]
    fn evolution_preserves_trace_and_hermiticity() {
        let env = NoiseEnvironment::isotropic(1.0, 1.0, 0.25, 0.01).unwrap();
        let p = ModulationProfile::new(2.0, 0.5, 1.0).unwrap();
        let engine = RedfieldEngine::new(env, p);
        let sigma0 = DensityMatrix::from_bloch(0.3, 0.1, 0.2).unwrap();
        let times: Vec<f64> = (0..=60).map(|k| 0.1 * k as f64).collect();
        let run = engine
            .evolve(&sigma0, &times, &OdeStepperConfig::default())
            .unwrap();
        for s in &run.states {
            assert!((s.matrix().trace().re - 1.0).abs() < 1e-9);
            assert!(s.matrix().trace().im.abs() < 1e-12);
            assert!(s.matrix().is_hermitian(1e-9));
        }
    }

    #[test]
    fn relaxation_contracts_toward_equilibrium() {
        let env = NoiseEnvironment::isotropic(1.0, 1.0, 0.1, 0.01).unwrap();
        let p = static_profile(2.0);
        let engine = RedfieldEngine::new(env, p).without_free_evolution();
        let sigma0 = DensityMatrix::from_bloch(0.3, 0.1, 0.2).unwrap();
        let times: Vec<f64> = (0..=50).map(|k| 0.2 * k as f64).collect();
        let run = engine
            .evolve(&sigma0, &times, &OdeStepperConfig::default())
            .unwrap();
        let eq = engine.sigma_eq();
        let mut prev = f64::INFINITY;
        for (t, s) in times.iter().zip(&run.states) {
            let d = s.trace_distance(&eq);
            if *t >= 1.0 {
                assert!(d <= prev + 1e-9, "distance grew at t = {t}: {d} > {prev}");
                prev = d;
            }
        }
        // weak-coupling regime: positivity holds along the trajectory
        assert!(run.min_eigenvalue > -1e-6);
    }
}
