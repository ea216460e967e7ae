//! Parameter-regime probe for the decay functional: scans the
//! dimensionless bath values (omega_L T1_0, tau0/T1_0) and prints the
//! decay-curve landmarks used to choose defaults. Not part of the
//! regular suite; run with
//! `cargo test --test decay_regimes --release -- --ignored --nocapture`.

use spinrelax_core::control::{ControlParams, DecayCurve};
use spinrelax_core::numerics::quad::QuadratureConfig;

#[test]
#[ignore]
fn scan_bath_parameters() {
    let cfg = QuadratureConfig::default();
    let tau_max = 3.0;
    println!(
        "{:>8} {:>8} | {:>8} {:>8} {:>8} {:>8} {:>8} | {:>8}",
        "w*T1", "r", "a_st(1)", "a(.1,1)", "a(.1,10)", "a(.01,1)", "a(.01,10)", "eta gap"
    );
    for omega_t1 in [4.0, 10.0, 100.0, 1.0e4] {
        for r in [1.0e-4, 0.01, 0.03, 0.08] {
            let curve = |eta: f64, c: f64| {
                let cp = ControlParams::new(eta, c, omega_t1, r).unwrap();
                DecayCurve::build(&cp, tau_max, &cfg).unwrap()
            };
            let cells = [
                curve(0.1, 0.0),
                curve(0.1, 1.0),
                curve(0.1, 10.0),
                curve(0.01, 1.0),
                curve(0.01, 10.0),
            ];
            let a1: Vec<f64> = cells.iter().map(|c| c.decay_function(1.0).unwrap()).collect();
            let mut gap: f64 = 0.0;
            for k in 0..=100 {
                let tau = tau_max * k as f64 / 100.0;
                gap = gap.max(
                    (cells[1].decay_function(tau).unwrap() - cells[3].decay_function(tau).unwrap())
                        .abs(),
                );
                gap = gap.max(
                    (cells[2].decay_function(tau).unwrap() - cells[4].decay_function(tau).unwrap())
                        .abs(),
                );
            }
            println!(
                "{:>8.1} {:>8.4} | {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} | {:>8.1e}",
                omega_t1, r, a1[0], a1[1], a1[2], a1[3], a1[4], gap
            );
        }
    }
}
