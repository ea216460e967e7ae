//! `equivalence`: run the semiclassical engine, the master equation and
//! the Bloch ODEs on one scenario and compare all three magnetization
//! trajectories pairwise. Exit status 2 when any component exceeds the
//! configured tolerance.

use std::path::Path;

use spinrelax_core::bloch::{
    magnetization_of, max_component_deviation, relaxation_times_redfield, BlochEngine,
    Magnetization,
};
use spinrelax_core::lindblad::MasterEngine;
use spinrelax_core::redfield::RedfieldEngine;

use crate::config::ScenarioConfig;
use crate::table::{Cell, ResultTable};
use crate::CliError;

pub struct EquivalenceReport {
    /// (pair label, [dmx, dmy, dmz])
    pub deviations: Vec<(&'static str, [f64; 3])>,
    pub tolerance: f64,
    pub breaches: Vec<String>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.breaches.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "three-way equivalence check (tolerance {:.1e})\n",
            self.tolerance
        ));
        for (pair, d) in &self.deviations {
            out.push_str(&format!(
                "  {pair}: max |dmx| = {:.3e}, max |dmy| = {:.3e}, max |dmz| = {:.3e}\n",
                d[0], d[1], d[2]
            ));
        }
        if self.passed() {
            out.push_str("result: PASS\n");
        } else {
            out.push_str("result: FAIL\n");
            for b in &self.breaches {
                out.push_str(&format!("  breach: {b}\n"));
            }
        }
        out
    }
}

pub fn compare(config: &ScenarioConfig) -> Result<(EquivalenceReport, ResultTable), CliError> {
    let times = config.sample_times()?;
    let sigma0 = config.initial_state()?;
    let ode = config.ode_config()?;
    let quad = config.quadrature_config()?;
    let tolerance = config.run_section()?.equivalence_tol;

    let profile = config.modulation_profile()?;
    let noise = config.noise_environment()?;

    // environment-induced dynamics only: the master equation has no
    // coherent term, so the comparison drops it in the other two engines
    let redfield = RedfieldEngine::new(noise, profile)
        .with_quadrature(quad)
        .without_free_evolution();
    let m0 = redfield.equilibrium_mz();
    let run = redfield
        .evolve(&sigma0, &times, &ode)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let mags_redfield: Vec<Magnetization> = run
        .states
        .iter()
        .map(|s| magnetization_of(s, m0))
        .collect();

    let qenv = config.quantum_environment()?;
    let mags_master: Vec<Magnetization> = MasterEngine::new(qenv)
        .evolve(&sigma0, &times, &ode)
        .map_err(|e| CliError::Numerical(e.to_string()))?
        .iter()
        .map(|s| magnetization_of(s, m0))
        .collect();

    let rates = relaxation_times_redfield(&noise, &profile, &quad);
    let mags_bloch = BlochEngine::new(rates, m0)
        .evolve(&mags_redfield[0], &times, &ode)
        .map_err(|e| CliError::Numerical(e.to_string()))?;

    let pairs = [
        ("redfield vs master", &mags_redfield, &mags_master),
        ("redfield vs bloch", &mags_redfield, &mags_bloch),
        ("master vs bloch", &mags_master, &mags_bloch),
    ];
    let mut deviations = Vec::new();
    let mut breaches = Vec::new();
    for (label, a, b) in pairs {
        let d = max_component_deviation(a, b).map_err(|e| CliError::Numerical(e.to_string()))?;
        for (i, (name, channel)) in [
            ("mx", "transverse (T2) channel"),
            ("my", "transverse (T2) channel"),
            ("mz", "longitudinal (T1) channel"),
        ]
        .iter()
        .enumerate()
        {
            if d[i] > tolerance {
                breaches.push(format!(
                    "{label}: {name} deviates by {:.3e} > {tolerance:.1e} [{channel}]",
                    d[i]
                ));
            }
        }
        deviations.push((label, d));
    }

    let mut table = ResultTable::new(
        vec![
            "t", "mx_redfield", "my_redfield", "mz_redfield", "mx_master", "my_master",
            "mz_master", "mx_bloch", "my_bloch", "mz_bloch",
        ],
        vec!["time"].into_iter().chain(vec!["dimensionless"; 9]).collect(),
    );
    for (k, t) in times.iter().enumerate() {
        table.push(vec![
            Cell::from(*t),
            mags_redfield[k].mx.into(),
            mags_redfield[k].my.into(),
            mags_redfield[k].mz.into(),
            mags_master[k].mx.into(),
            mags_master[k].my.into(),
            mags_master[k].mz.into(),
            mags_bloch[k].mx.into(),
            mags_bloch[k].my.into(),
            mags_bloch[k].mz.into(),
        ]);
    }

    Ok((
        EquivalenceReport {
            deviations,
            tolerance,
            breaches,
        },
        table,
    ))
}

pub fn run(
    config: &ScenarioConfig,
    config_bytes: &[u8],
    out: Option<&Path>,
) -> Result<(), CliError> {
    let (report, table) = compare(config)?;
    print!("{}", report.render());
    if let Some(path) = out {
        let table = ResultTable {
            provenance: ResultTable::new(vec![], vec![])
                .with_provenance(config_bytes)
                .provenance,
            ..table
        };
        table.emit(Some(path))?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Breach("equivalence tolerance exceeded".into()))
    }
}
