//! Composite quadrature: 1-D rules, cumulative integrals on uniform grids
//! and the triangular double integral used by the decay functional.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadRule {
    Trapezoid,
    Simpson,
}

/// Resolution and rule for composite quadrature. `panels_per_unit` scales
/// the panel count with the width of the integration interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub panels_per_unit: f64,
    pub rule: QuadRule,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            panels_per_unit: 64.0,
            rule: QuadRule::Simpson,
        }
    }
}

impl QuadratureConfig {
    pub fn new(panels_per_unit: f64, rule: QuadRule) -> Result<Self> {
        if !(panels_per_unit > 0.0) || !panels_per_unit.is_finite() {
            return Err(Error::Parameter(format!(
                "panels_per_unit must be positive, got {panels_per_unit}"
            )));
        }
        Ok(Self {
            panels_per_unit,
            rule,
        })
    }

    /// Even panel count for an interval of the given width, at least `min`.
    pub fn panels(&self, width: f64, min: usize) -> usize {
        let n = (self.panels_per_unit * width).ceil() as usize;
        let n = n.max(min).max(2);
        n + n % 2
    }
}

fn check_finite(v: f64, x: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::IntegrandDomain { x })
    }
}

/// Composite rule over [a, b] with n panels (n even for Simpson).
pub fn integrate_real<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    n: usize,
    rule: QuadRule,
) -> Result<f64> {
    if b == a {
        return Ok(0.0);
    }
    let n = match rule {
        QuadRule::Trapezoid => n.max(1),
        QuadRule::Simpson => {
            let n = n.max(2);
            n + n % 2
        }
    };
    let h = (b - a) / n as f64;
    let mut acc = 0.0;
    match rule {
        QuadRule::Trapezoid => {
            acc += 0.5 * (check_finite(f(a), a)? + check_finite(f(b), b)?);
            for k in 1..n {
                let x = a + h * k as f64;
                acc += check_finite(f(x), x)?;
            }
            Ok(acc * h)
        }
        QuadRule::Simpson => {
            acc += check_finite(f(a), a)? + check_finite(f(b), b)?;
            for k in 1..n {
                let x = a + h * k as f64;
                let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * check_finite(f(x), x)?;
            }
            Ok(acc * h / 3.0)
        }
    }
}

/// Complex-valued composite rule over [a, b].
pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    n: usize,
    rule: QuadRule,
) -> Result<Complex64> {
    let mut re_err: Option<Error> = None;
    let mut samples = |x: f64, g: &mut F| -> Complex64 {
        let v = g(x);
        if !v.re.is_finite() || !v.im.is_finite() {
            re_err = Some(Error::IntegrandDomain { x });
        }
        v
    };
    if b == a {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n = match rule {
        QuadRule::Trapezoid => n.max(1),
        QuadRule::Simpson => {
            let n = n.max(2);
            n + n % 2
        }
    };
    let h = (b - a) / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    match rule {
        QuadRule::Trapezoid => {
            acc += (samples(a, &mut f) + samples(b, &mut f)) * 0.5;
            for k in 1..n {
                acc += samples(a + h * k as f64, &mut f);
            }
            acc *= h;
        }
        QuadRule::Simpson => {
            acc += samples(a, &mut f) + samples(b, &mut f);
            for k in 1..n {
                let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                acc += samples(a + h * k as f64, &mut f) * w;
            }
            acc *= h / 3.0;
        }
    }
    match re_err {
        Some(e) => Err(e),
        None => Ok(acc),
    }
}

/// Cumulative integral of uniformly spaced samples, returned at every
/// sample point. Simpson is applied over even pairs of panels; odd
/// endpoints get a half-panel Simpson-3/8-free correction using the
/// local three-point rule, which keeps fourth-order accuracy.
pub fn cumulative_uniform(samples: &[f64], h: f64, rule: QuadRule) -> Vec<f64> {
    let n = samples.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    match rule {
        QuadRule::Trapezoid => {
            for k in 1..n {
                out[k] = out[k - 1] + 0.5 * h * (samples[k - 1] + samples[k]);
            }
        }
        QuadRule::Simpson => {
            for k in 1..n {
                if k % 2 == 0 {
                    out[k] = out[k - 2]
                        + h / 3.0 * (samples[k - 2] + 4.0 * samples[k - 1] + samples[k]);
                } else if k + 1 < n {
                    // integral over one panel from the local parabola
                    out[k] = out[k - 1]
                        + h / 12.0 * (5.0 * samples[k - 1] + 8.0 * samples[k] - samples[k + 1]);
                } else {
                    out[k] = out[k - 1]
                        + h / 12.0 * (-samples[k - 2] + 8.0 * samples[k - 1] + 5.0 * samples[k]);
                }
            }
        }
    }
    out
}

/// Triangular double integral: the outer variable runs over [0, T] and the
/// inner one over [0, outer]. Returns 0 exactly for T = 0.
pub fn nested_integral<F: Fn(f64, f64) -> f64>(
    f: F,
    t_max: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if t_max < 0.0 {
        return Err(Error::Parameter(format!(
            "outer limit must be nonnegative, got {t_max}"
        )));
    }
    if t_max == 0.0 {
        return Ok(0.0);
    }
    let n_outer = cfg.panels(t_max, 8);
    let h = t_max / n_outer as f64;
    let inner = |tau2: f64| -> Result<f64> {
        let n_inner = cfg.panels(tau2, 4);
        integrate_real(|tau1| f(tau1, tau2), 0.0, tau2, n_inner, cfg.rule)
    };
    // outer rule applied to the inner antiderivative
    let mut acc = 0.0;
    match cfg.rule {
        QuadRule::Trapezoid => {
            acc += 0.5 * (inner(0.0)? + inner(t_max)?);
            for k in 1..n_outer {
                acc += inner(h * k as f64)?;
            }
            Ok(acc * h)
        }
        QuadRule::Simpson => {
            acc += inner(0.0)? + inner(t_max)?;
            for k in 1..n_outer {
                let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * inner(h * k as f64)?;
            }
            Ok(acc * h / 3.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrand_gives_triangle_area() {
        let cfg = QuadratureConfig::default();
        let v = nested_integral(|_, _| 1.0, 2.0, &cfg).unwrap();
        assert!((v - 2.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn zero_integrand_gives_zero() {
        let cfg = QuadratureConfig::default();
        assert_eq!(nested_integral(|_, _| 0.0, 5.0, &cfg).unwrap(), 0.0);
        assert_eq!(nested_integral(|_, _| 1.0, 0.0, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn exponential_inner_integrand() {
        // int_0^3 (1 - e^{-t2}) dt2 = 3 - 1 + e^{-3}
        let cfg = QuadratureConfig::default();
        let v = nested_integral(|t1, _| (-t1).exp(), 3.0, &cfg).unwrap();
        let expect = 2.0497870683678639;
        assert!((v - expect).abs() < 1e-6, "got {v}, expected {expect}");
    }

    #[test]
    fn non_finite_sample_is_domain_error() {
        let cfg = QuadratureConfig::default();
        let r = nested_integral(|t1, _| 1.0 / t1, 1.0, &cfg);
        assert!(matches!(r, Err(Error::IntegrandDomain { .. })));
    }

    #[test]
    fn simpson_order_is_near_four() {
        let exact = 1.0 - (-2.0f64).exp();
        let err = |n: usize| {
            (integrate_real(|x| (-x).exp(), 0.0, 2.0, n, QuadRule::Simpson).unwrap() - exact)
                .abs()
        };
        let (e1, e2) = (err(16), err(32));
        let order = (e1 / e2).log2();
        assert!(
            (order - 4.0).abs() < 0.5,
            "empirical Simpson order {order}"
        );
    }

    #[test]
    fn trapezoid_order_is_near_two() {
        let exact = 1.0 - (-2.0f64).exp();
        let err = |n: usize| {
            (integrate_real(|x| (-x).exp(), 0.0, 2.0, n, QuadRule::Trapezoid).unwrap() - exact)
                .abs()
        };
        let (e1, e2) = (err(16), err(32));
        let order = (e1 / e2).log2();
        assert!(
            (order - 2.0).abs() < 0.5,
            "empirical trapezoid order {order}"
        );
    }

    #[test]
    fn nested_error_drops_at_simpson_order() {
        let exact = 2.0497870683678639;
        let err = |ppu: f64| {
            let cfg = QuadratureConfig::new(ppu, QuadRule::Simpson).unwrap();
            (nested_integral(|t1, _| (-t1).exp(), 3.0, &cfg).unwrap() - exact).abs()
        };
        let (e1, e2) = (err(16.0), err(32.0));
        let order = (e1 / e2).log2();
        assert!(
            (order - 4.0).abs() < 1.0,
            "empirical nested order {order} (errors {e1:e}, {e2:e})"
        );
    }

    #[test]
    fn cumulative_simpson_matches_closed_form() {
        let n = 201;
        let h = 3.0 / (n - 1) as f64;
        let samples: Vec<f64> = (0..n).map(|k| (-(h * k as f64)).exp()).collect();
        let cum = cumulative_uniform(&samples, h, QuadRule::Simpson);
        for k in 0..n {
            let x = h * k as f64;
            let exact = 1.0 - (-x).exp();
            assert!(
                (cum[k] - exact).abs() < 1e-8,
                "k = {k}: {} vs {exact}",
                cum[k]
            );
        }
    }

    #[test]
    fn complex_rule_matches_analytic_phase_integral() {
        // int_0^1 e^{i w x} dx = (e^{iw} - 1)/(iw)
        let w = 3.0;
        let v = integrate_complex(
            |x| Complex64::from_polar(1.0, w * x),
            0.0,
            1.0,
            200,
            QuadRule::Simpson,
        )
        .unwrap();
        let exact = (Complex64::from_polar(1.0, w) - 1.0) / Complex64::new(0.0, w);
        assert!((v - exact).norm() < 1e-9);
    }
}
