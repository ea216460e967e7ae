//! Operator-sum representation of phase damping and finite-temperature
//! amplitude damping, plus the scalar-norm level of the equivalent
//! phenomenological-operator maps.
//!
//! The phase channel has two Kraus operators parametrized by
//! `p(t) = (1 - e^{-Gamma_p t}) / 2`; it leaves populations alone and
//! scales coherences by `(1 - 2p)`. The amplitude channel has four
//! operators parametrized by the decay function
//! `a(t) = 1 - exp(-int_0^t 1/T1)` and the Boltzmann factor `gamma_T`;
//! its fixed point is the thermal state diag(gamma_T, 1 - gamma_T) and
//! it scales coherences by `sqrt(1 - a)`. Completeness
//! `sum E_k^dag E_k = 1` is an algebraic identity for both families.
//!
//! `a = 1` is accepted as the closed-limit endpoint (the channel formula
//! is continuous there and maps every input to the thermal state), even
//! though the decay function itself only approaches 1.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::mat2::{ComplexMat2, DensityMatrix, ONE, ZERO};
use crate::numerics::quad::{integrate_real, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Phase,
    Amplitude,
}

/// Parameter record attached to a Kraus set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelParams {
    Phase { p: f64 },
    Amplitude { a: f64, gamma_t: f64 },
}

/// Ordered Kraus operators with their channel tag and parameters.
#[derive(Debug, Clone)]
pub struct KrausSet {
    pub operators: Vec<ComplexMat2>,
    pub kind: ChannelKind,
    pub params: ChannelParams,
}

impl KrausSet {
    /// Largest entry of `sum E_k^dag E_k - 1`.
    pub fn completeness_defect(&self) -> f64 {
        let mut acc = ComplexMat2::zero();
        for e in &self.operators {
            acc = acc.add(&e.adjoint().mul(e));
        }
        acc.max_abs_diff(&ComplexMat2::identity())
    }
}

/// Phase-flip probability p(t) = (1 - e^{-Gamma_p t}) / 2.
pub fn phase_p(gamma_p: f64, t: f64) -> Result<f64> {
    if gamma_p < 0.0 || t < 0.0 {
        return Err(Error::Parameter(format!(
            "phase_p needs gamma_p >= 0 and t >= 0, got ({gamma_p}, {t})"
        )));
    }
    Ok(-0.5 * (-gamma_p * t).exp_m1())
}

/// Decay function a = 1 - e^{-x} for the accumulated rate integral
/// x = int_0^t (1/T1) dtau.
pub fn amplitude_a(rate_integral: f64) -> Result<f64> {
    if rate_integral < 0.0 {
        return Err(Error::Parameter(format!(
            "rate integral must be nonnegative, got {rate_integral}"
        )));
    }
    Ok(-(-rate_integral).exp_m1())
}

/// Decay function from a time-dependent rate 1/T1(tau), integrating the
/// rate numerically over [0, t].
pub fn amplitude_a_from_rate<F: Fn(f64) -> f64>(
    rate_t1: F,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Parameter(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let n = cfg.panels(t, 16);
    let integral = integrate_real(rate_t1, 0.0, t, n, cfg.rule)?;
    amplitude_a(integral)
}

/// Two-operator phase-damping set: sqrt(1-p) 1 and sqrt(p) diag(1, -1).
pub fn kraus_phase(p: f64) -> Result<KrausSet> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::Parameter(format!("p = {p} outside [0, 1/2]")));
    }
    let e0 = ComplexMat2::identity().scale_re((1.0 - p).sqrt());
    let e1 = ComplexMat2::diag(ONE, -ONE).scale_re(p.sqrt());
    Ok(KrausSet {
        operators: vec![e0, e1],
        kind: ChannelKind::Phase,
        params: ChannelParams::Phase { p },
    })
}

/// Four-operator finite-temperature amplitude-damping set.
pub fn kraus_amplitude(a: f64, gamma_t: f64) -> Result<KrausSet> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Parameter(format!("a = {a} outside [0, 1]")));
    }
    if !(gamma_t > 0.0 && gamma_t <= 0.5) {
        return Err(Error::Parameter(format!(
            "gamma_T = {gamma_t} outside (0, 1/2]"
        )));
    }
    let (sg, sq) = (gamma_t.sqrt(), (1.0 - gamma_t).sqrt());
    let (sa, s1a) = (a.sqrt(), (1.0 - a).sqrt());
    let re = |x: f64| Complex64::new(x, 0.0);
    let e0 = ComplexMat2::from_rows(re(sg), ZERO, ZERO, re(sg * s1a));
    let e1 = ComplexMat2::from_rows(ZERO, re(sg * sa), ZERO, ZERO);
    let e2 = ComplexMat2::from_rows(re(sq * s1a), ZERO, ZERO, re(sq));
    let e3 = ComplexMat2::from_rows(ZERO, ZERO, re(sq * sa), ZERO);
    Ok(KrausSet {
        operators: vec![e0, e1, e2, e3],
        kind: ChannelKind::Amplitude,
        params: ChannelParams::Amplitude { a, gamma_t },
    })
}

/// Apply the operator sum: sigma -> sum_k E_k sigma E_k^dag.
pub fn apply_channel(ks: &KrausSet, sigma: &DensityMatrix) -> DensityMatrix {
    let mut out = ComplexMat2::zero();
    for e in &ks.operators {
        out = out.add(&e.mul(sigma.matrix()).mul(&e.adjoint()));
    }
    DensityMatrix::from_unchecked(out)
}

/// Scalar norms of the phenomenological operators. Per-mode amplitudes
/// are represented only through their summed norms; the individual modes
/// are unobservable at the reduced-state level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhenomenologicalNorms {
    Phase {
        /// |T_11| = e^{-Gamma_p t}: amplitude for the excited state to
        /// keep its phase relation.
        t11_norm: f64,
        /// sum_j |f_j|^2 = 1 - e^{-2 Gamma_p t}.
        f_sq_sum: f64,
    },
    Amplitude {
        /// |T_00| = sqrt(1 - (1 - e^{-2 Gamma_a t}) gamma_T).
        t00_norm: f64,
        /// |T_11| = sqrt(e^{-2 Gamma_a t} + (1 - e^{-2 Gamma_a t}) gamma_T).
        t11_norm: f64,
        /// sum_j |h_j|^2 = sqrt((1 - e^{-2 Gamma_a t}) gamma_T), the
        /// upward-transition norm. Stored in this square-root form even
        /// though it is dimensionally odd next to |T_00|^2 (it is the
        /// square root of the complementary probability); it is excluded
        /// from the consistency cross-checks for that reason.
        h_sq_sum: f64,
        /// sum_j |g_j|^2 = (1 - e^{-2 Gamma_a t})(1 - gamma_T), the
        /// downward-transition norm; reduces to 1 - e^{-2 Gamma_a t} at
        /// zero temperature.
        g_sq_sum: f64,
    },
}

/// Norms of the phase map at time t for dephasing rate Gamma_p.
pub fn phenomenological_norms_phase(gamma_p: f64, t: f64) -> Result<PhenomenologicalNorms> {
    if gamma_p < 0.0 || t < 0.0 {
        return Err(Error::Parameter(format!(
            "phase norms need gamma_p >= 0, t >= 0, got ({gamma_p}, {t})"
        )));
    }
    Ok(PhenomenologicalNorms::Phase {
        t11_norm: (-gamma_p * t).exp(),
        f_sq_sum: -(-2.0 * gamma_p * t).exp_m1(),
    })
}

/// Norms of the finite-temperature amplitude map at time t. `gamma_a`
/// is the amplitude rate in the convention e^{-2 Gamma_a t} = 1 - a(t),
/// i.e. twice Gamma_a is the population relaxation rate 1/T1.
pub fn phenomenological_norms_amplitude(
    gamma_a: f64,
    gamma_t: f64,
    t: f64,
) -> Result<PhenomenologicalNorms> {
    if gamma_a < 0.0 || t < 0.0 {
        return Err(Error::Parameter(format!(
            "amplitude norms need gamma_a >= 0, t >= 0, got ({gamma_a}, {t})"
        )));
    }
    if !(0.0..=0.5).contains(&gamma_t) {
        return Err(Error::Parameter(format!(
            "gamma_T = {gamma_t} outside [0, 1/2]"
        )));
    }
    let decay = (-2.0 * gamma_a * t).exp();
    let filled = 1.0 - decay;
    Ok(PhenomenologicalNorms::Amplitude {
        t00_norm: (1.0 - filled * gamma_t).sqrt(),
        t11_norm: (decay + filled * gamma_t).sqrt(),
        h_sq_sum: (filled * gamma_t).sqrt(),
        g_sq_sum: filled * (1.0 - gamma_t),
    })
}

/// Density matrix reconstructed from the phase map: populations are
/// untouched and coherences pick up the factor |T_11| = e^{-Gamma_p t},
/// which equals (1 - 2p(t)) exactly.
pub fn reconstruct_phase_map(
    norms: &PhenomenologicalNorms,
    sigma0: &DensityMatrix,
) -> Result<DensityMatrix> {
    let PhenomenologicalNorms::Phase { t11_norm, .. } = norms else {
        return Err(Error::Parameter(
            "phase reconstruction requires phase norms".into(),
        ));
    };
    let m0 = sigma0.matrix();
    let out = ComplexMat2::from_rows(
        m0.get(0, 0),
        m0.get(0, 1) * *t11_norm,
        m0.get(1, 0) * *t11_norm,
        m0.get(1, 1),
    );
    Ok(DensityMatrix::from_unchecked(out))
}

/// Populations reconstructed from the amplitude map:
/// excited(t) = excited(0) |T_11|^2 + ground(0) (1 - |T_00|^2).
pub fn reconstruct_amplitude_populations(
    norms: &PhenomenologicalNorms,
    sigma0: &DensityMatrix,
) -> Result<[f64; 2]> {
    let PhenomenologicalNorms::Amplitude {
        t00_norm, t11_norm, ..
    } = norms
    else {
        return Err(Error::Parameter(
            "amplitude reconstruction requires amplitude norms".into(),
        ));
    };
    let pe = sigma0.excited_population();
    let pg = sigma0.ground_population();
    let excited = pe * t11_norm * t11_norm + pg * (1.0 - t00_norm * t00_norm);
    Ok([excited, 1.0 - excited])
}
