//! `kraus-verify`: completeness, fixed-point and composition checks for
//! the channel families, over parameter grids plus any explicit values
//! from the config.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinrelax_core::channels::{apply_channel, kraus_amplitude, kraus_phase};
use spinrelax_core::lindblad::boltzmann_factor;
use spinrelax_core::numerics::mat2::DensityMatrix;

use crate::config::ScenarioConfig;
use crate::CliError;

const TOL: f64 = 1e-12;

fn random_state(rng: &mut ChaCha8Rng) -> DensityMatrix {
    loop {
        let (x, y, z) = (
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        );
        if x * x + y * y + z * z <= 0.25 {
            return DensityMatrix::from_bloch(x, y, z).expect("inside the Bloch ball");
        }
    }
}

pub fn run(config: &ScenarioConfig) -> Result<(), CliError> {
    let mut worst_completeness = 0.0f64;

    // explicit single points from the config are validated first so an
    // out-of-range parameter is a loud error, not a silent pass
    if let Some(k) = &config.kraus {
        if let Some(p) = k.p {
            kraus_phase(p).map_err(|e| CliError::Config(format!("[kraus] {e}")))?;
        }
        match (k.a, k.gamma_t) {
            (Some(a), Some(g)) => {
                kraus_amplitude(a, g).map_err(|e| CliError::Config(format!("[kraus] {e}")))?;
            }
            (Some(a), None) => {
                let g = config
                    .quantum
                    .as_ref()
                    .map(|q| boltzmann_factor(q.beta_e))
                    .ok_or_else(|| {
                        CliError::Config("[kraus] a given without gamma_t or [quantum]".into())
                    })?;
                kraus_amplitude(a, g).map_err(|e| CliError::Config(format!("[kraus] {e}")))?;
            }
            (None, Some(g)) => {
                kraus_amplitude(0.5, g).map_err(|e| CliError::Config(format!("[kraus] {e}")))?;
            }
            (None, None) => {}
        }
    }

    for i in 0..=20 {
        let p = 0.5 * i as f64 / 20.0;
        let ks = kraus_phase(p).map_err(|e| CliError::Numerical(e.to_string()))?;
        worst_completeness = worst_completeness.max(ks.completeness_defect());
    }
    for i in 0..=20 {
        let a = 0.99 * i as f64 / 20.0;
        for j in 0..20 {
            let gamma_t = 0.5 * (j + 1) as f64 / 21.0;
            let ks =
                kraus_amplitude(a, gamma_t).map_err(|e| CliError::Numerical(e.to_string()))?;
            worst_completeness = worst_completeness.max(ks.completeness_defect());
        }
    }

    // thermal fixed point across the a-grid, plus full thermalization of
    // seeded random states at a = 1
    let gamma_t = config
        .quantum
        .as_ref()
        .map(|q| boltzmann_factor(q.beta_e))
        .unwrap_or(0.25);
    let thermal =
        DensityMatrix::thermal(gamma_t).map_err(|e| CliError::Config(format!("[quantum] {e}")))?;
    let mut worst_fixed_point = 0.0f64;
    for i in 1..=20 {
        let a = i as f64 / 20.0;
        let ks = kraus_amplitude(a, gamma_t).map_err(|e| CliError::Numerical(e.to_string()))?;
        worst_fixed_point = worst_fixed_point.max(apply_channel(&ks, &thermal).trace_distance(&thermal));
    }
    let seed = config.run.as_ref().and_then(|r| r.seed).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = kraus_amplitude(1.0, gamma_t).map_err(|e| CliError::Numerical(e.to_string()))?;
    for _ in 0..50 {
        let out = apply_channel(&full, &random_state(&mut rng));
        worst_fixed_point = worst_fixed_point.max(out.trace_distance(&thermal));
    }

    // phase composition semigroup: p1 then p2 equals the fused step
    let mut worst_composition = 0.0f64;
    let probe = DensityMatrix::plus_x();
    for &(p1, p2) in &[(0.05, 0.2), (0.15, 0.3), (0.25, 0.45)] {
        let stepwise = apply_channel(
            &kraus_phase(p2).map_err(|e| CliError::Numerical(e.to_string()))?,
            &apply_channel(
                &kraus_phase(p1).map_err(|e| CliError::Numerical(e.to_string()))?,
                &probe,
            ),
        );
        let fused = 0.5 * (1.0 - (1.0 - 2.0 * p1) * (1.0 - 2.0 * p2));
        let direct = apply_channel(
            &kraus_phase(fused).map_err(|e| CliError::Numerical(e.to_string()))?,
            &probe,
        );
        worst_composition =
            worst_composition.max(stepwise.matrix().max_abs_diff(direct.matrix()));
    }

    println!("kraus verification");
    println!("  completeness defect (grids): {worst_completeness:.3e}");
    println!("  thermal fixed-point distance (gamma_T = {gamma_t:.4}): {worst_fixed_point:.3e}");
    println!("  phase composition defect: {worst_composition:.3e}");
    let ok = worst_completeness < TOL && worst_fixed_point < TOL && worst_composition < TOL;
    println!("result: {}", if ok { "PASS" } else { "FAIL" });
    if ok {
        Ok(())
    } else {
        Err(CliError::Breach("kraus verification failed".into()))
    }
}
