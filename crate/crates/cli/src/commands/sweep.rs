//! `control-sweep`: evaluate the decay curves over the (eta, chi/zeta)
//! grid, emit the Cartesian table as CSV and print a summary asserting
//! the attenuation ordering.

use std::path::Path;

use rayon::prelude::*;

use spinrelax_core::control::{DecayCurve, SweepRow};

use crate::config::ScenarioConfig;
use crate::table::{Cell, ResultTable};
use crate::CliError;

const COLUMNS: [&str; 6] = ["eta", "chi_over_zeta", "tau", "d", "a", "error"];
const UNITS: [&str; 6] = [
    "dimensionless",
    "dimensionless",
    "dimensionless",
    "dimensionless",
    "dimensionless",
    "text",
];

pub fn rows(config: &ScenarioConfig) -> Result<Vec<SweepRow>, CliError> {
    let base = config.control_params()?;
    let grid = config.sweep_grid()?;
    let quad = config.quadrature_config()?;
    let tau_max = *grid.tau.last().expect("validated nonempty");

    // cells are independent; evaluate (eta, chi/zeta) pairs in parallel
    // and assemble rows in grid order
    let pairs: Vec<(f64, f64)> = grid
        .eta
        .iter()
        .flat_map(|&e| grid.chi_over_zeta.iter().map(move |&c| (e, c)))
        .collect();
    let per_pair: Vec<Vec<SweepRow>> = pairs
        .par_iter()
        .map(|&(eta, c)| {
            let cell = base
                .with_pair(eta, c)
                .and_then(|cp| DecayCurve::build(&cp, tau_max, &quad));
            match cell {
                Ok(curve) => grid
                    .tau
                    .iter()
                    .map(|&tau| match (curve.decay_integral(tau), curve.decay_function(tau)) {
                        (Ok(d), Ok(a)) => SweepRow {
                            eta,
                            chi_over_zeta: c,
                            tau,
                            d: Some(d),
                            a: Some(a),
                            error: None,
                        },
                        (Err(e), _) | (_, Err(e)) => SweepRow {
                            eta,
                            chi_over_zeta: c,
                            tau,
                            d: None,
                            a: None,
                            error: Some(e.to_string()),
                        },
                    })
                    .collect(),
                Err(e) => grid
                    .tau
                    .iter()
                    .map(|&tau| SweepRow {
                        eta,
                        chi_over_zeta: c,
                        tau,
                        d: None,
                        a: None,
                        error: Some(e.to_string()),
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(per_pair.into_iter().flatten().collect())
}

/// Ordering summary: for each eta, the decay function at the last tau
/// sample must be nonincreasing as chi/zeta grows.
pub struct SweepSummary {
    pub lines: Vec<String>,
    pub ordering_ok: bool,
}

pub fn summarize(config: &ScenarioConfig, rows: &[SweepRow]) -> Result<SweepSummary, CliError> {
    let grid = config.sweep_grid()?;
    let tau_ref = *grid.tau.last().expect("validated nonempty");
    let mut lines = Vec::new();
    let mut ordering_ok = true;
    for &eta in &grid.eta {
        let mut prev: Option<(f64, f64)> = None;
        for &c in &grid.chi_over_zeta {
            let a = rows
                .iter()
                .find(|r| r.eta == eta && r.chi_over_zeta == c && r.tau == tau_ref)
                .and_then(|r| r.a);
            let Some(a) = a else {
                lines.push(format!(
                    "eta = {eta}, chi/zeta = {c}: cell failed, ordering not checked"
                ));
                continue;
            };
            if let Some((c_prev, a_prev)) = prev {
                let margin = a_prev - a;
                let ok = margin >= 0.0;
                ordering_ok &= ok;
                lines.push(format!(
                    "eta = {eta}: a(chi/zeta = {c}) {} a(chi/zeta = {c_prev}) at tau = {tau_ref} (margin {margin:+.3e})",
                    if ok { "<=" } else { ">" }
                ));
            }
            prev = Some((c, a));
        }
    }
    Ok(SweepSummary { lines, ordering_ok })
}

pub fn run(
    config: &ScenarioConfig,
    config_bytes: &[u8],
    out: Option<&Path>,
) -> Result<(), CliError> {
    let rows = rows(config)?;
    let mut table =
        ResultTable::new(COLUMNS.to_vec(), UNITS.to_vec()).with_provenance(config_bytes);
    for r in &rows {
        table.push(vec![
            r.eta.into(),
            r.chi_over_zeta.into(),
            r.tau.into(),
            r.d.map(Cell::from).unwrap_or(Cell::Empty),
            r.a.map(Cell::from).unwrap_or(Cell::Empty),
            r.error
                .as_ref()
                .map(|e| Cell::Text(e.replace(',', ";")))
                .unwrap_or(Cell::Empty),
        ]);
    }
    let out_path = out.map(Path::to_path_buf).or_else(|| {
        config
            .run
            .as_ref()
            .and_then(|r| r.output.as_ref())
            .map(Into::into)
    });
    table.emit(out_path.as_deref())?;

    let summary = summarize(config, &rows)?;
    for line in &summary.lines {
        eprintln!("{line}");
    }
    if rows.iter().any(|r| r.error.is_some()) {
        return Err(CliError::Numerical("one or more sweep cells failed".into()));
    }
    if !summary.ordering_ok {
        return Err(CliError::Breach(
            "attenuation ordering violated in sweep".into(),
        ));
    }
    Ok(())
}
