//! Scenario configuration: a TOML tree with one section per engine
//! concern. Unknown keys are rejected and all physical range constraints
//! are re-checked at load time.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use spinrelax_core::bloch::identify;
use spinrelax_core::control::{ControlParams, CosArgVariant, Prefactor, SweepGrid};
use spinrelax_core::lindblad::{thermal_occupation, QuantumEnvironment};
use spinrelax_core::modulation::{ModulationProfile, DEFAULT_ADIABATIC_THRESHOLD};
use spinrelax_core::numerics::mat2::DensityMatrix;
use spinrelax_core::numerics::ode::{OdeMethod, OdeStepperConfig};
use spinrelax_core::numerics::quad::{QuadRule, QuadratureConfig};
use spinrelax_core::redfield::NoiseEnvironment;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub modulation: Option<ModulationSection>,
    pub noise: Option<NoiseSection>,
    pub quantum: Option<QuantumSection>,
    pub control: Option<ControlSection>,
    pub run: Option<RunSection>,
    pub quadrature: Option<QuadratureSection>,
    pub kraus: Option<KrausSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationSection {
    pub omega0: f64,
    #[serde(default)]
    pub chi: f64,
    #[serde(default)]
    pub zeta: f64,
    pub adiabatic_threshold: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub gamma_n: f64,
    /// Per-axis mean-square fluctuation; exactly one of `lambda_sq` and
    /// `lambda_sq_iso` must be present.
    pub lambda_sq: Option<[f64; 3]>,
    pub lambda_sq_iso: Option<f64>,
    pub tau0: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaMode {
    Bridged,
    Direct,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumSection {
    pub beta_e: f64,
    /// Phase-bath occupation; defaults to the amplitude-bath occupation.
    pub n_p: Option<f64>,
    pub theta_a_mode: ThetaMode,
    /// Constant amplitude rate, required in direct mode.
    pub theta_a: Option<f64>,
    /// Constant phase rate; in bridged mode defaults to the value that
    /// reproduces the secular rate of the noise environment.
    pub theta_p: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    pub eta: f64,
    pub chi_over_zeta: f64,
    pub omega_t1: f64,
    pub tau0_over_t1: f64,
    pub epsilon: Option<f64>,
    /// Manual prefactor override; absent means calibrated.
    pub prefactor: Option<f64>,
    pub variant: Option<VariantName>,
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantName {
    Verbatim,
    Rederived,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub eta: Vec<f64>,
    pub chi_over_zeta: Vec<f64>,
    pub tau_max: f64,
    pub tau_samples: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub t_span: [f64; 2],
    pub samples: usize,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    pub max_step: Option<f64>,
    pub method: Option<MethodName>,
    pub output: Option<String>,
    pub seed: Option<u64>,
    pub initial_bloch: Option<[f64; 3]>,
    #[serde(default = "default_true")]
    pub drop_free_evolution: bool,
    #[serde(default = "default_equivalence_tol")]
    pub equivalence_tol: f64,
}

fn default_rel_tol() -> f64 {
    1e-9
}

fn default_abs_tol() -> f64 {
    1e-12
}

fn default_true() -> bool {
    true
}

fn default_equivalence_tol() -> f64 {
    1e-5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    FixedRk4,
    AdaptiveRk45,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub panels_per_unit: f64,
    pub rule: Option<RuleName>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleName {
    Trapezoid,
    Simpson,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausSection {
    /// Explicit single-point checks in addition to the grids.
    pub p: Option<f64>,
    pub a: Option<f64>,
    pub gamma_t: Option<f64>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| CliError::Config(format!("{} is not UTF-8: {e}", path.display())))?;
        let cfg: ScenarioConfig = toml::from_str(text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok((cfg, bytes))
    }

    pub fn modulation_profile(&self) -> Result<ModulationProfile, CliError> {
        let m = self
            .modulation
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [modulation] section".into()))?;
        ModulationProfile::with_adiabatic_threshold(
            m.omega0,
            m.chi,
            m.zeta,
            m.adiabatic_threshold.unwrap_or(DEFAULT_ADIABATIC_THRESHOLD),
        )
        .map_err(|e| CliError::Config(format!("[modulation] {e}")))
    }

    pub fn noise_environment(&self) -> Result<NoiseEnvironment, CliError> {
        let n = self
            .noise
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [noise] section".into()))?;
        let lambda_sq = match (n.lambda_sq, n.lambda_sq_iso) {
            (Some(l), None) => l,
            (None, Some(iso)) => [iso; 3],
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "[noise] has both lambda_sq and lambda_sq_iso".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config(
                    "[noise] needs lambda_sq or lambda_sq_iso".into(),
                ))
            }
        };
        NoiseEnvironment::new(n.gamma_n, lambda_sq, n.tau0, n.beta)
            .map_err(|e| CliError::Config(format!("[noise] {e}")))
    }

    /// Quantum environment, bridged from the noise sections or built
    /// from direct constant rates.
    pub fn quantum_environment(&self) -> Result<QuantumEnvironment, CliError> {
        let q = self
            .quantum
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [quantum] section".into()))?;
        let n_p = q.n_p.unwrap_or_else(|| thermal_occupation(q.beta_e));
        match q.theta_a_mode {
            ThetaMode::Bridged => {
                let noise = self.noise_environment()?;
                let profile = self.modulation_profile()?;
                let quad = self.quadrature_config()?;
                let mut env = identify(&noise, &profile, q.beta_e, n_p, &quad)
                    .map_err(|e| CliError::Config(format!("[quantum] {e}")))?;
                if let Some(theta_p) = q.theta_p {
                    let theta_a = spinrelax_core::lindblad::theta_a_from_redfield(
                        &noise,
                        &profile,
                        thermal_occupation(q.beta_e),
                        &quad,
                    );
                    env = QuantumEnvironment::new(q.beta_e, n_p, theta_p, theta_a)
                        .map_err(|e| CliError::Config(format!("[quantum] {e}")))?;
                }
                Ok(env)
            }
            ThetaMode::Direct => {
                let theta_a = q.theta_a.ok_or_else(|| {
                    CliError::Config("[quantum] direct mode requires theta_a".into())
                })?;
                let theta_p = q.theta_p.ok_or_else(|| {
                    CliError::Config("[quantum] direct mode requires theta_p".into())
                })?;
                QuantumEnvironment::new(q.beta_e, n_p, theta_p, Arc::new(move |_| theta_a))
                    .map_err(|e| CliError::Config(format!("[quantum] {e}")))
            }
        }
    }

    pub fn quadrature_config(&self) -> Result<QuadratureConfig, CliError> {
        match &self.quadrature {
            None => Ok(QuadratureConfig::default()),
            Some(s) => QuadratureConfig::new(
                s.panels_per_unit,
                match s.rule.unwrap_or(RuleName::Simpson) {
                    RuleName::Simpson => QuadRule::Simpson,
                    RuleName::Trapezoid => QuadRule::Trapezoid,
                },
            )
            .map_err(|e| CliError::Config(format!("[quadrature] {e}"))),
        }
    }

    pub fn run_section(&self) -> Result<&RunSection, CliError> {
        self.run
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [run] section".into()))
    }

    pub fn ode_config(&self) -> Result<OdeStepperConfig, CliError> {
        let r = self.run_section()?;
        let cfg = OdeStepperConfig {
            rel_tol: r.rel_tol,
            abs_tol: r.abs_tol,
            max_step: match r.max_step {
                Some(h) if h > 0.0 => h,
                Some(h) => {
                    return Err(CliError::Config(format!(
                        "[run] max_step must be positive, got {h}"
                    )))
                }
                None => f64::INFINITY,
            },
            method: match r.method.unwrap_or(MethodName::AdaptiveRk45) {
                MethodName::AdaptiveRk45 => OdeMethod::AdaptiveRk45,
                MethodName::FixedRk4 => OdeMethod::FixedRk4,
            },
        };
        cfg.validate()
            .map_err(|e| CliError::Config(format!("[run] {e}")))?;
        Ok(cfg)
    }

    pub fn sample_times(&self) -> Result<Vec<f64>, CliError> {
        let r = self.run_section()?;
        let [t0, t1] = r.t_span;
        if !(t1 >= t0) || t0 < 0.0 {
            return Err(CliError::Config(format!(
                "[run] t_span must satisfy 0 <= t0 <= t1, got ({t0}, {t1})"
            )));
        }
        if r.samples == 0 {
            return Err(CliError::Config("[run] samples must be at least 1".into()));
        }
        if r.samples == 1 || t1 == t0 {
            return Ok(vec![t0]);
        }
        Ok((0..r.samples)
            .map(|k| t0 + (t1 - t0) * k as f64 / (r.samples - 1) as f64)
            .collect())
    }

    pub fn initial_state(&self) -> Result<DensityMatrix, CliError> {
        let r = self.run_section()?;
        let [x, y, z] = r.initial_bloch.unwrap_or([0.0, 0.0, 0.25]);
        DensityMatrix::from_bloch(x, y, z)
            .map_err(|e| CliError::Config(format!("[run] initial_bloch: {e}")))
    }

    pub fn control_params(&self) -> Result<ControlParams, CliError> {
        let c = self
            .control
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [control] section".into()))?;
        let mut cp = ControlParams::new(c.eta, c.chi_over_zeta, c.omega_t1, c.tau0_over_t1)
            .map_err(|e| CliError::Config(format!("[control] {e}")))?;
        cp.epsilon = c.epsilon;
        if let Some(p) = c.prefactor {
            cp.prefactor = Prefactor::Manual(p);
        }
        if let Some(v) = c.variant {
            cp.variant = match v {
                VariantName::Verbatim => CosArgVariant::Verbatim,
                VariantName::Rederived => CosArgVariant::Rederived,
            };
        }
        Ok(cp)
    }

    pub fn sweep_grid(&self) -> Result<SweepGrid, CliError> {
        let c = self
            .control
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [control] section".into()))?;
        let s = c
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [control.sweep] section".into()))?;
        SweepGrid::uniform_tau(
            s.eta.clone(),
            s.chi_over_zeta.clone(),
            s.tau_max,
            s.tau_samples,
        )
        .map_err(|e| CliError::Config(format!("[control.sweep] {e}")))
    }
}
