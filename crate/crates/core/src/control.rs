//! Decoherence-control protocol: the dimensionless decay integral
//! D(tau), the decay function a(tau) = 1 - e^{-D}, parameter sweeps over
//! (eta, chi/zeta) and experimental feasibility checks.
//!
//! Everything is expressed in units of the static relaxation time T1_0:
//! tau = t / T1_0, eta = 1/(T1_0 zeta), and the bath enters through the
//! two dimensionless numbers omega_L T1_0 and tau0 / T1_0. The decay
//! integral is the triangular double integral
//!
//! ```text
//! D(tau) = P int_0^tau dtau2 int_0^tau2 dtau1
//!          exp(-tau1 / r) cos(w tau1 + 2 c sin^2(2 tau1 / eta))
//! ```
//!
//! with r = tau0/T1_0, w = omega_L T1_0, c = chi/zeta and prefactor
//! P = 2 (gamma_n lambda T1_0)^2. The calibrated prefactor makes the
//! static (c = 0) curve decay at unit rate, P = (1 + (w r)^2) / r, which
//! places the knee of a(tau) at tau = 1.
//!
//! The cosine argument `2 tau1 / eta` is kept as the default; re-deriving
//! the phase from the modulated spectral density gives `tau1 / (2 eta)`
//! instead (a factor 4 in the argument), and that variant is available
//! behind [`CosArgVariant::Rederived`]. Neither form is silently
//! corrected into the other.
//!
//! Because the integrand depends on tau1 only, the inner antiderivative
//! is computed once on a fine grid and cached; the exponential window
//! makes everything beyond ~80 r constant, which is exploited for
//! tau >> r.

use crate::error::{Error, Result};
use crate::numerics::quad::{cumulative_uniform, QuadratureConfig};

/// Correlation-window cutoff in units of r = tau0/T1_0.
const WINDOW_R: f64 = 80.0;

/// Minimum panels per correlation time in the inner integral.
const PANELS_PER_R: f64 = 24.0;

/// Minimum panels per radian of integrand phase.
const PANELS_PER_RADIAN: f64 = 1.5;

/// Default ratio eta * omega_L T1_0 below which the adiabatic-consistency
/// warning fires (zeta not much smaller than omega_L).
pub const ADIABATIC_CONSISTENCY_RATIO: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosArgVariant {
    /// Modulation phase 2 c sin^2(2 tau1 / eta).
    Verbatim,
    /// Modulation phase 2 c sin^2(tau1 / (2 eta)) from re-deriving the
    /// spectral-density argument.
    Rederived,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prefactor {
    /// P = (1 + (w r)^2) / r so the static decay rate is exactly 1/T1_0.
    Calibrated,
    Manual(f64),
}

/// Dimensionless control knobs for the decay-integral sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlParams {
    pub eta: f64,
    pub chi_over_zeta: f64,
    pub omega_t1: f64,
    pub tau0_over_t1: f64,
    /// Lorentzian-sharpness ratio, recorded for reporting only.
    pub epsilon: Option<f64>,
    pub prefactor: Prefactor,
    pub variant: CosArgVariant,
}

impl ControlParams {
    pub fn new(eta: f64, chi_over_zeta: f64, omega_t1: f64, tau0_over_t1: f64) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(Error::Parameter(format!("eta must be positive, got {eta}")));
        }
        if chi_over_zeta < 0.0 {
            return Err(Error::Parameter(format!(
                "chi/zeta must be nonnegative, got {chi_over_zeta}"
            )));
        }
        if !(omega_t1 > 0.0) {
            return Err(Error::Parameter(format!(
                "omega_L T1_0 must be positive, got {omega_t1}"
            )));
        }
        if !(tau0_over_t1 > 0.0) {
            return Err(Error::Parameter(format!(
                "tau0/T1_0 must be positive, got {tau0_over_t1}"
            )));
        }
        Ok(Self {
            eta,
            chi_over_zeta,
            omega_t1,
            tau0_over_t1,
            epsilon: None,
            prefactor: Prefactor::Calibrated,
            variant: CosArgVariant::Verbatim,
        })
    }

    pub fn with_pair(&self, eta: f64, chi_over_zeta: f64) -> Result<Self> {
        let mut out = Self::new(eta, chi_over_zeta, self.omega_t1, self.tau0_over_t1)?;
        out.epsilon = self.epsilon;
        out.prefactor = self.prefactor;
        out.variant = self.variant;
        Ok(out)
    }

    /// Whether zeta stays well below omega_L (eta * w >= the consistency
    /// ratio); a false value is a warning, not an error.
    pub fn adiabatic_consistent(&self) -> bool {
        self.eta * self.omega_t1 >= ADIABATIC_CONSISTENCY_RATIO
    }

    pub fn prefactor_value(&self) -> f64 {
        match self.prefactor {
            Prefactor::Manual(p) => p,
            Prefactor::Calibrated => {
                let wr = self.omega_t1 * self.tau0_over_t1;
                (1.0 + wr * wr) / self.tau0_over_t1
            }
        }
    }

    /// Inner integrand of the decay functional at tau1.
    pub fn integrand(&self, tau1: f64) -> f64 {
        let r = self.tau0_over_t1;
        let c = self.chi_over_zeta;
        let phase_arg = match self.variant {
            CosArgVariant::Verbatim => 2.0 * tau1 / self.eta,
            CosArgVariant::Rederived => tau1 / (2.0 * self.eta),
        };
        let modulation = if c == 0.0 {
            0.0
        } else {
            let s = phase_arg.sin();
            2.0 * c * s * s
        };
        (-tau1 / r).exp() * (self.omega_t1 * tau1 + modulation).cos()
    }

    fn inner_panel_density(&self, cfg: &QuadratureConfig) -> f64 {
        let osc = self.omega_t1
            + if self.chi_over_zeta == 0.0 {
                0.0
            } else {
                match self.variant {
                    CosArgVariant::Verbatim => 4.0 * self.chi_over_zeta / self.eta,
                    CosArgVariant::Rederived => self.chi_over_zeta / self.eta,
                }
            };
        cfg.panels_per_unit
            .max(PANELS_PER_R / self.tau0_over_t1)
            .max(PANELS_PER_RADIAN * osc)
    }
}

/// Cached evaluation of D(tau): cumulative integrals of the inner
/// integrand on a uniform grid covering the correlation window, with the
/// exact linear tail beyond it.
#[derive(Debug, Clone)]
pub struct DecayCurve {
    prefactor: f64,
    h: f64,
    x_end: f64,
    /// inner antiderivative G(x) = int_0^x g
    g: Vec<f64>,
    /// outer antiderivative H(x) = int_0^x G
    hh: Vec<f64>,
}

impl DecayCurve {
    pub fn build(cp: &ControlParams, tau_max: f64, cfg: &QuadratureConfig) -> Result<Self> {
        if tau_max < 0.0 {
            return Err(Error::Parameter(format!(
                "tau_max must be nonnegative, got {tau_max}"
            )));
        }
        let x_end = (WINDOW_R * cp.tau0_over_t1).min(tau_max.max(cp.tau0_over_t1));
        let density = cp.inner_panel_density(cfg);
        let n = ((density * x_end).ceil() as usize).clamp(16, 4_000_000);
        let n = n + n % 2;
        let h = x_end / n as f64;
        let mut samples = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let v = cp.integrand(h * k as f64);
            if !v.is_finite() {
                return Err(Error::IntegrandDomain { x: h * k as f64 });
            }
            samples.push(v);
        }
        let g = cumulative_uniform(&samples, h, cfg.rule);
        let hh = cumulative_uniform(&g, h, cfg.rule);
        Ok(Self {
            prefactor: cp.prefactor_value(),
            h,
            x_end,
            g,
            hh,
        })
    }

    /// Cubic Hermite evaluation of H at x inside the grid, using G as
    /// the known derivative.
    fn eval_hh(&self, x: f64) -> f64 {
        let n = self.g.len() - 1;
        let idx = ((x / self.h).floor() as usize).min(n.saturating_sub(1));
        let x0 = self.h * idx as f64;
        let s = (x - x0) / self.h;
        let (p0, p1) = (self.hh[idx], self.hh[idx + 1]);
        let (m0, m1) = (self.g[idx] * self.h, self.g[idx + 1] * self.h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * p0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * p1
            + (s3 - s2) * m1
    }

    /// D(tau); beyond the correlation window the inner integral is
    /// constant and the tail is exactly linear.
    pub fn decay_integral(&self, tau: f64) -> Result<f64> {
        if tau < 0.0 {
            return Err(Error::Parameter(format!(
                "tau must be nonnegative, got {tau}"
            )));
        }
        if tau == 0.0 {
            return Ok(0.0);
        }
        let raw = if tau <= self.x_end {
            self.eval_hh(tau)
        } else {
            let h_end = *self.hh.last().expect("nonempty grid");
            let g_end = *self.g.last().expect("nonempty grid");
            h_end + g_end * (tau - self.x_end)
        };
        Ok(self.prefactor * raw)
    }

    /// a(tau) = 1 - e^{-D(tau)}.
    pub fn decay_function(&self, tau: f64) -> Result<f64> {
        Ok(-(-self.decay_integral(tau)?).exp_m1())
    }
}

/// Single-point decay integral D(tau).
pub fn decay_integral(cp: &ControlParams, tau: f64, cfg: &QuadratureConfig) -> Result<f64> {
    DecayCurve::build(cp, tau, cfg)?.decay_integral(tau)
}

/// Single-point decay function a(tau) in [0, 1).
pub fn decay_function(cp: &ControlParams, tau: f64, cfg: &QuadratureConfig) -> Result<f64> {
    DecayCurve::build(cp, tau, cfg)?.decay_function(tau)
}

/// Parameter grid for the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub eta: Vec<f64>,
    pub chi_over_zeta: Vec<f64>,
    pub tau: Vec<f64>,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.eta.is_empty() || self.chi_over_zeta.is_empty() || self.tau.is_empty() {
            return Err(Error::Parameter(
                "sweep grid must have nonempty eta, chi/zeta and tau lists".into(),
            ));
        }
        if self.tau.iter().any(|t| *t < 0.0) {
            return Err(Error::Parameter("tau samples must be nonnegative".into()));
        }
        if self.tau.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter(
                "tau samples must be strictly increasing".into(),
            ));
        }
        Ok(())
    }

    /// Uniform tau grid over [0, tau_max].
    pub fn uniform_tau(eta: Vec<f64>, chi_over_zeta: Vec<f64>, tau_max: f64, samples: usize) -> Result<Self> {
        if !(tau_max >= 0.0) {
            return Err(Error::Parameter(format!(
                "tau_max must be nonnegative, got {tau_max}"
            )));
        }
        let tau = if tau_max == 0.0 || samples <= 1 {
            vec![0.0]
        } else {
            (0..samples)
                .map(|k| tau_max * k as f64 / (samples - 1) as f64)
                .collect()
        };
        let g = Self {
            eta,
            chi_over_zeta,
            tau,
        };
        g.validate()?;
        Ok(g)
    }
}

/// One sweep cell: the decay integral and decay function at one
/// (eta, chi/zeta, tau), or the failure that prevented it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eta: f64,
    pub chi_over_zeta: f64,
    pub tau: f64,
    pub d: Option<f64>,
    pub a: Option<f64>,
    pub error: Option<String>,
}

/// Cartesian sweep over the grid; rows come out ordered by
/// (eta index, chi/zeta index, tau index) regardless of evaluation
/// order, and failed cells are recorded without aborting the sweep.
pub fn sweep(grid: &SweepGrid, base: &ControlParams, cfg: &QuadratureConfig) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    let tau_max = *grid.tau.last().expect("validated nonempty");
    let mut rows = Vec::with_capacity(grid.eta.len() * grid.chi_over_zeta.len() * grid.tau.len());
    for &eta in &grid.eta {
        for &c in &grid.chi_over_zeta {
            let cell = base
                .with_pair(eta, c)
                .and_then(|cp| DecayCurve::build(&cp, tau_max, cfg));
            match cell {
                Ok(curve) => {
                    for &tau in &grid.tau {
                        match (curve.decay_integral(tau), curve.decay_function(tau)) {
                            (Ok(d), Ok(a)) => rows.push(SweepRow {
                                eta,
                                chi_over_zeta: c,
                                tau,
                                d: Some(d),
                                a: Some(a),
                                error: None,
                            }),
                            (Err(e), _) | (_, Err(e)) => rows.push(SweepRow {
                                eta,
                                chi_over_zeta: c,
                                tau,
                                d: None,
                                a: None,
                                error: Some(e.to_string()),
                            }),
                        }
                    }
                }
                Err(e) => {
                    for &tau in &grid.tau {
                        rows.push(SweepRow {
                            eta,
                            chi_over_zeta: c,
                            tau,
                            d: None,
                            a: None,
                            error: Some(e.to_string()),
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Warn,
    Fail,
}

/// One feasibility condition with its margin (how many times the
/// threshold is exceeded).
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityCheck {
    pub name: &'static str,
    pub margin: f64,
    pub status: CheckStatus,
}

/// Feasibility report for a physical realization: modulation-rate and
/// modulation-amplitude conditions plus the control-field window.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub checks: Vec<FeasibilityCheck>,
    /// Control-field magnitude chi / gamma_n.
    pub control_field: f64,
    /// Allowed window (1/(gamma_n T1_0), B0) for the control field.
    pub field_window: (f64, f64),
}

impl FeasibilityReport {
    pub fn worst(&self) -> CheckStatus {
        let mut worst = CheckStatus::Pass;
        for c in &self.checks {
            worst = match (worst, c.status) {
                (_, CheckStatus::Fail) | (CheckStatus::Fail, _) => CheckStatus::Fail,
                (_, CheckStatus::Warn) | (CheckStatus::Warn, _) => CheckStatus::Warn,
                _ => CheckStatus::Pass,
            };
        }
        worst
    }
}

/// Classify a ">> 1" margin: pass at 100x, fail at or below 1x.
fn classify(margin: f64) -> CheckStatus {
    if margin >= ADIABATIC_CONSISTENCY_RATIO {
        CheckStatus::Pass
    } else if margin > 1.0 {
        CheckStatus::Warn
    } else {
        CheckStatus::Fail
    }
}

/// Check the protocol conditions for physical inputs: modulation rate
/// and amplitude both well above 1/T1_0, and the control field inside
/// (1/(gamma_n T1_0), B0).
pub fn feasibility(
    zeta: f64,
    chi: f64,
    b0: f64,
    gamma_n: f64,
    t1_0: f64,
) -> Result<FeasibilityReport> {
    if !(b0 > 0.0) || !(gamma_n > 0.0) || !(t1_0 > 0.0) {
        return Err(Error::Parameter(format!(
            "b0, gamma_n and t1_0 must be positive, got ({b0}, {gamma_n}, {t1_0})"
        )));
    }
    if zeta < 0.0 || chi < 0.0 {
        return Err(Error::Parameter(format!(
            "zeta and chi must be nonnegative, got ({zeta}, {chi})"
        )));
    }
    let control_field = chi / gamma_n;
    let low = 1.0 / (gamma_n * t1_0);
    let checks = vec![
        FeasibilityCheck {
            name: "modulation rate zeta >> 1/T1_0",
            margin: zeta * t1_0,
            status: classify(zeta * t1_0),
        },
        FeasibilityCheck {
            name: "modulation amplitude chi >> 1/T1_0",
            margin: chi * t1_0,
            status: classify(chi * t1_0),
        },
        FeasibilityCheck {
            name: "control field above 1/(gamma_n T1_0)",
            margin: if low > 0.0 { control_field / low } else { f64::INFINITY },
            status: classify(control_field / low),
        },
        FeasibilityCheck {
            name: "control field below static field B0",
            margin: if control_field > 0.0 {
                b0 / control_field
            } else {
                f64::INFINITY
            },
            status: classify(if control_field > 0.0 {
                b0 / control_field
            } else {
                f64::INFINITY
            }),
        },
    ];
    Ok(FeasibilityReport {
        checks,
        control_field,
        field_window: (low, b0),
    })
}
