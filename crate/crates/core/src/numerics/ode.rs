//! Explicit Runge-Kutta integration over fixed-size real state vectors.
//!
//! Complex states are flattened to real/imaginary interleaved components,
//! so every engine in the crate shares this one integrator.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeMethod {
    FixedRk4,
    AdaptiveRk45,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeStepperConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub method: OdeMethod,
}

impl Default for OdeStepperConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            method: OdeMethod::AdaptiveRk45,
        }
    }
}

impl OdeStepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::Parameter(format!(
                "tolerances must be strictly positive (rel = {}, abs = {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::Parameter(format!(
                "max_step must be positive, got {}",
                self.max_step
            )));
        }
        Ok(())
    }
}

/// Time-ordered solution samples.
#[derive(Debug, Clone)]
pub struct OdeTrajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// 5th-order weights equal the last row of A (FSAL); 4th-order weights below.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Dopri5<'a, const N: usize, F: FnMut(f64, &[f64; N]) -> [f64; N]> {
    rhs: &'a mut F,
    cfg: OdeStepperConfig,
}

impl<'a, const N: usize, F: FnMut(f64, &[f64; N]) -> [f64; N]> Dopri5<'a, N, F> {
    /// One accepted adaptive step from (t, y); returns (t_new, y_new, h_next).
    /// `h` is the proposed step, already clamped by the caller.
    fn step(&mut self, t: f64, y: &[f64; N], mut h: f64, t_end: f64) -> Result<(f64, [f64; N], f64)> {
        loop {
            h = h.min(self.cfg.max_step).min(t_end - t);
            if h <= f64::EPSILON * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t });
            }
            let mut k = [[0.0; N]; 7];
            k[0] = (self.rhs)(t, y);
            for stage in 0..6 {
                let mut ys = *y;
                for (j, kj) in k.iter().enumerate().take(stage + 1) {
                    let a = A[stage][j];
                    if a != 0.0 {
                        for i in 0..N {
                            ys[i] += h * a * kj[i];
                        }
                    }
                }
                k[stage + 1] = (self.rhs)(t + C[stage] * h, &ys);
            }
            // 5th-order solution (weights = last row of A, plus k6 weight 0)
            let mut y5 = *y;
            for (j, kj) in k.iter().enumerate().take(6) {
                let b = A[5][j];
                if b != 0.0 {
                    for i in 0..N {
                        y5[i] += h * b * kj[i];
                    }
                }
            }
            // embedded 4th-order solution for the error estimate
            let mut err_norm_sq = 0.0;
            for i in 0..N {
                let mut y4i = y[i];
                for (j, kj) in k.iter().enumerate() {
                    if B4[j] != 0.0 {
                        y4i += h * B4[j] * kj[i];
                    }
                }
                let scale = self.cfg.abs_tol + self.cfg.rel_tol * y[i].abs().max(y5[i].abs());
                let e = (y5[i] - y4i) / scale;
                err_norm_sq += e * e;
            }
            let err = (err_norm_sq / N as f64).sqrt();
            if err <= 1.0 {
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                return Ok((t + h, y5, h * factor));
            }
            if !err.is_finite() {
                h *= 0.1;
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            }
        }
    }
}

fn rk4_step<const N: usize, F: FnMut(f64, &[f64; N]) -> [f64; N]>(
    rhs: &mut F,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> [f64; N] {
    let k1 = rhs(t, y);
    let mut y2 = *y;
    for i in 0..N {
        y2[i] += 0.5 * h * k1[i];
    }
    let k2 = rhs(t + 0.5 * h, &y2);
    let mut y3 = *y;
    for i in 0..N {
        y3[i] += 0.5 * h * k2[i];
    }
    let k3 = rhs(t + 0.5 * h, &y3);
    let mut y4 = *y;
    for i in 0..N {
        y4[i] += h * k3[i];
    }
    let k4 = rhs(t + h, &y4);
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrate dy/dt = rhs(t, y) over [t0, t1], returning the accepted-step
/// trajectory (first sample at t0, last exactly at t1).
pub fn integrate_ode<const N: usize, F: FnMut(f64, &[f64; N]) -> [f64; N]>(
    mut rhs: F,
    y0: [f64; N],
    t_span: (f64, f64),
    cfg: &OdeStepperConfig,
) -> Result<OdeTrajectory<N>> {
    cfg.validate()?;
    let (t0, t1) = t_span;
    if !(t1 > t0) {
        return Err(Error::Parameter(format!(
            "t_span must satisfy t1 > t0, got ({t0}, {t1})"
        )));
    }
    let mut times = vec![t0];
    let mut states = vec![y0];
    match cfg.method {
        OdeMethod::FixedRk4 => {
            let span = t1 - t0;
            let h_target = cfg.max_step.min(span / 16.0);
            let n = (span / h_target).ceil() as usize;
            let h = span / n as f64;
            let mut y = y0;
            for k in 0..n {
                let t = t0 + h * k as f64;
                y = rk4_step(&mut rhs, t, &y, h);
                times.push(if k + 1 == n { t1 } else { t + h });
                states.push(y);
            }
        }
        OdeMethod::AdaptiveRk45 => {
            let mut stepper = Dopri5 {
                rhs: &mut rhs,
                cfg: *cfg,
            };
            let mut t = t0;
            let mut y = y0;
            let mut h = ((t1 - t0) / 100.0).min(cfg.max_step);
            while t < t1 {
                let (tn, yn, hn) = stepper.step(t, &y, h, t1)?;
                t = tn;
                y = yn;
                h = hn;
                times.push(t);
                states.push(y);
            }
        }
    }
    Ok(OdeTrajectory { times, states })
}

/// Integrate and return the state at each requested sample time. The
/// sample grid must be strictly increasing; the first entry is the
/// initial time.
pub fn integrate_sampled<const N: usize, F: FnMut(f64, &[f64; N]) -> [f64; N]>(
    mut rhs: F,
    y0: [f64; N],
    times: &[f64],
    cfg: &OdeStepperConfig,
) -> Result<Vec<[f64; N]>> {
    cfg.validate()?;
    if times.len() < 2 {
        return Ok(vec![y0; times.len()]);
    }
    for w in times.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Parameter(
                "sample times must be strictly increasing".into(),
            ));
        }
    }
    let mut out = Vec::with_capacity(times.len());
    out.push(y0);
    let mut y = y0;
    match cfg.method {
        OdeMethod::FixedRk4 => {
            for w in times.windows(2) {
                let span = w[1] - w[0];
                let h_target = cfg.max_step.min(span);
                let n = (span / h_target).ceil().max(1.0) as usize;
                let h = span / n as f64;
                for k in 0..n {
                    y = rk4_step(&mut rhs, w[0] + h * k as f64, &y, h);
                }
                out.push(y);
            }
        }
        OdeMethod::AdaptiveRk45 => {
            let mut stepper = Dopri5 {
                rhs: &mut rhs,
                cfg: *cfg,
            };
            let mut h = ((times[times.len() - 1] - times[0]) / 100.0).min(cfg.max_step);
            for w in times.windows(2) {
                let mut t = w[0];
                while t < w[1] {
                    let (tn, yn, hn) = stepper.step(t, &y, h, w[1])?;
                    t = tn;
                    y = yn;
                    h = hn;
                }
                out.push(y);
            }
        }
    }
    Ok(out)
}
