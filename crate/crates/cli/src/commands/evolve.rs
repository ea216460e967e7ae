//! `evolve`: propagate one scenario with the selected engine and emit
//! the state trajectory as CSV. All engines share one column schema so
//! outputs can be diffed directly.

use std::path::Path;

use spinrelax_core::channels::{
    amplitude_a, amplitude_a_from_rate, apply_channel, kraus_amplitude, kraus_phase, phase_p,
};
use spinrelax_core::lindblad::MasterEngine;
use spinrelax_core::numerics::mat2::DensityMatrix;
use spinrelax_core::redfield::{transverse_rate, RedfieldEngine};

use crate::config::{ScenarioConfig, ThetaMode};
use crate::table::{Cell, ResultTable};
use crate::{CliError, Engine};

const COLUMNS: [&str; 8] = [
    "t",
    "sigma_11",
    "sigma_00",
    "re_sigma_10",
    "im_sigma_10",
    "mx",
    "my",
    "mz",
];
const UNITS: [&str; 8] = [
    "time",
    "dimensionless",
    "dimensionless",
    "dimensionless",
    "dimensionless",
    "dimensionless",
    "dimensionless",
    "dimensionless",
];

fn state_row(t: f64, sigma: &DensityMatrix) -> Vec<Cell> {
    let [mx, my, mz] = sigma.bloch_vector();
    let c = sigma.coherence();
    vec![
        t.into(),
        sigma.excited_population().into(),
        sigma.ground_population().into(),
        c.re.into(),
        c.im.into(),
        mx.into(),
        my.into(),
        mz.into(),
    ]
}

pub fn trajectory(
    config: &ScenarioConfig,
    engine: Engine,
    strict_adiabatic: bool,
) -> Result<(Vec<f64>, Vec<DensityMatrix>), CliError> {
    let times = config.sample_times()?;
    let sigma0 = config.initial_state()?;
    let ode = config.ode_config()?;
    let quad = config.quadrature_config()?;

    let states = match engine {
        Engine::Redfield => {
            let profile = config.modulation_profile()?;
            if strict_adiabatic && !profile.is_adiabatic() {
                return Err(CliError::Config(
                    "modulation is not adiabatic (zeta/omega0 above threshold) and strict mode is on"
                        .into(),
                ));
            }
            let env = config.noise_environment()?;
            let mut engine = RedfieldEngine::new(env, profile).with_quadrature(quad);
            engine.drop_free_evolution = config.run_section()?.drop_free_evolution;
            let run = engine
                .evolve(&sigma0, &times, &ode)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            run.states
        }
        Engine::Master => {
            let profile = config.modulation_profile();
            if let (true, Ok(p)) = (strict_adiabatic, &profile) {
                if !p.is_adiabatic() {
                    return Err(CliError::Config(
                        "modulation is not adiabatic (zeta/omega0 above threshold) and strict mode is on"
                            .into(),
                    ));
                }
            }
            let env = config.quantum_environment()?;
            MasterEngine::new(env)
                .evolve(&sigma0, &times, &ode)
                .map_err(|e| CliError::Numerical(e.to_string()))?
        }
        Engine::Kraus => kraus_trajectory(config, &times, &sigma0, strict_adiabatic)?,
    };
    Ok((times, states))
}

/// Operator-sum evolution: at each output time apply the amplitude and
/// phase channels with the accumulated p(t), a(t).
fn kraus_trajectory(
    config: &ScenarioConfig,
    times: &[f64],
    sigma0: &DensityMatrix,
    strict_adiabatic: bool,
) -> Result<Vec<DensityMatrix>, CliError> {
    let qsec = config
        .quantum
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [quantum] section".into()))?;
    let env = config.quantum_environment()?;
    let gamma_p = env.rate_phase();
    let gamma_t = env.gamma_t();
    let quad = config.quadrature_config()?;

    let bridged = qsec.theta_a_mode == ThetaMode::Bridged;
    let (noise, profile) = if bridged {
        let profile = config.modulation_profile()?;
        if strict_adiabatic && !profile.is_adiabatic() {
            return Err(CliError::Config(
                "modulation is not adiabatic (zeta/omega0 above threshold) and strict mode is on"
                    .into(),
            ));
        }
        (Some(config.noise_environment()?), Some(profile))
    } else {
        (None, None)
    };

    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let a = if bridged {
            let noise = noise.as_ref().expect("bridged mode");
            let profile = profile.as_ref().expect("bridged mode");
            amplitude_a_from_rate(
                |s| transverse_rate(noise, profile, s, &quad).unwrap_or(f64::NAN),
                t,
                &quad,
            )
        } else {
            amplitude_a(env.rate_t1(0.0) * t)
        }
        .map_err(|e| CliError::Numerical(e.to_string()))?;
        let p = phase_p(gamma_p, t).map_err(|e| CliError::Numerical(e.to_string()))?;
        let amp = kraus_amplitude(a, gamma_t).map_err(|e| CliError::Numerical(e.to_string()))?;
        let ph = kraus_phase(p).map_err(|e| CliError::Numerical(e.to_string()))?;
        out.push(apply_channel(&ph, &apply_channel(&amp, sigma0)));
    }
    Ok(out)
}

pub fn run(
    config: &ScenarioConfig,
    config_bytes: &[u8],
    engine: Engine,
    out: Option<&Path>,
    strict_adiabatic: bool,
) -> Result<(), CliError> {
    let (times, states) = trajectory(config, engine, strict_adiabatic)?;
    let mut table =
        ResultTable::new(COLUMNS.to_vec(), UNITS.to_vec()).with_provenance(config_bytes);
    for (t, s) in times.iter().zip(&states) {
        table.push(state_row(*t, s));
    }
    let out_path = out.map(Path::to_path_buf).or_else(|| {
        config
            .run
            .as_ref()
            .and_then(|r| r.output.as_ref())
            .map(Into::into)
    });
    table.emit(out_path.as_deref())
}
