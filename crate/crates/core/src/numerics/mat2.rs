//! Complex 2x2 matrices, spin-1/2 operators and density matrices.
//!
//! The matrix layout follows the convention used throughout the crate:
//! row/column 0 is the excited level |1> and row/column 1 is the ground
//! level |0>, so the excited population sits in the top-left entry.
//! Spin operators satisfy `I_z |k> = (k - 1/2) |k>` for level labels
//! k in {0, 1}.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense complex 2x2 matrix with value semantics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMat2 {
    pub m: [[Complex64; 2]; 2],
}

impl ComplexMat2 {
    pub const fn new(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn zero() -> Self {
        Self::new([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Self::new([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn from_rows(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self::new([[a, b], [c, d]])
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Self::from_rows(a, ZERO, ZERO, d)
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.m[r][c]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_rows(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] *= s;
            }
        }
        out
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] += other.m[r][c];
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = *self;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] -= other.m[r][c];
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] = self.m[r][0] * other.m[0][c] + self.m[r][1] * other.m[1][c];
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self))
    }

    /// Largest absolute entry-wise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                s += self.m[r][c].norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Eigenvalues of a Hermitian matrix, ascending. The Hermitian part
    /// of the matrix is used, so callers should check Hermiticity first
    /// when it matters.
    pub fn eigvals_hermitian(&self) -> [f64; 2] {
        let h = self.add(&self.adjoint()).scale_re(0.5);
        let tr = h.trace().re;
        let det = h.det().re;
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        [(tr - disc) / 2.0, (tr + disc) / 2.0]
    }
}

/// Spin operator I_x = sigma_x / 2.
pub fn spin_x() -> ComplexMat2 {
    ComplexMat2::from_rows(ZERO, ONE * 0.5, ONE * 0.5, ZERO)
}

/// Spin operator I_y = sigma_y / 2.
pub fn spin_y() -> ComplexMat2 {
    ComplexMat2::from_rows(ZERO, -I * 0.5, I * 0.5, ZERO)
}

/// Spin operator I_z = sigma_z / 2 (excited level on top).
pub fn spin_z() -> ComplexMat2 {
    ComplexMat2::diag(ONE * 0.5, -ONE * 0.5)
}

/// Raising operator I_+ = |1><0|.
pub fn spin_plus() -> ComplexMat2 {
    ComplexMat2::from_rows(ZERO, ONE, ZERO, ZERO)
}

/// Lowering operator I_- = |0><1|.
pub fn spin_minus() -> ComplexMat2 {
    ComplexMat2::from_rows(ZERO, ZERO, ONE, ZERO)
}

/// True iff `m` is Hermitian within `tol`, has unit trace within `tol`
/// and no eigenvalue below `-tol`.
pub fn is_density_matrix(m: &ComplexMat2, tol: f64) -> bool {
    assert!(tol > 0.0, "tolerance must be positive");
    if !m.is_hermitian(tol) {
        return false;
    }
    if (m.trace() - ONE).norm() > tol {
        return false;
    }
    let [lo, _] = m.eigvals_hermitian();
    lo >= -tol
}

/// Validated 2x2 density matrix (Hermitian, unit trace, positive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMat2,
}

impl DensityMatrix {
    pub const VALIDATION_TOL: f64 = 1e-9;

    pub fn new(mat: ComplexMat2) -> Result<Self> {
        Self::with_tol(mat, Self::VALIDATION_TOL)
    }

    pub fn with_tol(mat: ComplexMat2, tol: f64) -> Result<Self> {
        if !is_density_matrix(&mat, tol) {
            return Err(Error::NotADensityMatrix(format!(
                "trace = {}, eigenvalues = {:?}",
                mat.trace(),
                mat.eigvals_hermitian()
            )));
        }
        Ok(Self { mat })
    }

    /// Wrap without validation. For engine output where invariants are
    /// guaranteed only up to integrator tolerance.
    pub fn from_unchecked(mat: ComplexMat2) -> Self {
        Self { mat }
    }

    /// State with Bloch vector (mx, my, mz); valid when |m| <= 1/2.
    pub fn from_bloch(mx: f64, my: f64, mz: f64) -> Result<Self> {
        let r2 = mx * mx + my * my + mz * mz;
        if r2 > 0.25 + 1e-12 {
            return Err(Error::Parameter(format!(
                "Bloch vector length {} exceeds 1/2",
                r2.sqrt()
            )));
        }
        let mut m = ComplexMat2::identity().scale_re(0.5);
        m = m.add(&spin_x().scale_re(2.0 * mx));
        m = m.add(&spin_y().scale_re(2.0 * my));
        m = m.add(&spin_z().scale_re(2.0 * mz));
        Ok(Self { mat: m })
    }

    pub fn excited() -> Self {
        Self {
            mat: ComplexMat2::diag(ONE, ZERO),
        }
    }

    pub fn ground() -> Self {
        Self {
            mat: ComplexMat2::diag(ZERO, ONE),
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            mat: ComplexMat2::identity().scale_re(0.5),
        }
    }

    /// |+><+| with respect to I_x.
    pub fn plus_x() -> Self {
        Self::from_bloch(0.5, 0.0, 0.0).expect("pure state on the Bloch sphere")
    }

    /// Thermal state diag(gamma_T, 1 - gamma_T) in (excited, ground) order.
    pub fn thermal(gamma_t: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&gamma_t) {
            return Err(Error::Parameter(format!(
                "gamma_T = {gamma_t} outside [0, 1/2]"
            )));
        }
        Ok(Self {
            mat: ComplexMat2::diag(
                Complex64::new(gamma_t, 0.0),
                Complex64::new(1.0 - gamma_t, 0.0),
            ),
        })
    }

    pub fn matrix(&self) -> &ComplexMat2 {
        &self.mat
    }

    /// Excited-level population (top-left entry).
    pub fn excited_population(&self) -> f64 {
        self.mat.m[0][0].re
    }

    pub fn ground_population(&self) -> f64 {
        self.mat.m[1][1].re
    }

    /// Coherence <1| sigma |0>.
    pub fn coherence(&self) -> Complex64 {
        self.mat.m[0][1]
    }

    /// (mx, my, mz) = (Tr I_x sigma, Tr I_y sigma, Tr I_z sigma).
    pub fn bloch_vector(&self) -> [f64; 3] {
        let c = self.coherence();
        [c.re, -c.im, 0.5 * (self.mat.m[0][0].re - self.mat.m[1][1].re)]
    }

    /// Trace distance (1/2) * sum |eigenvalues of the difference|.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let d = self.mat.sub(&other.mat);
        let [a, b] = d.eigvals_hermitian();
        0.5 * (a.abs() + b.abs())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.mat.eigvals_hermitian()[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_mat(rng: &mut StdRng) -> ComplexMat2 {
        let mut m = ComplexMat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                m.m[r][c] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        m
    }

    /// Unitary from two angles: rotation by theta about an axis with phase phi.
    fn random_unitary(rng: &mut StdRng) -> ComplexMat2 {
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let (s, c) = (theta.sin(), theta.cos());
        ComplexMat2::from_rows(
            Complex64::new(c, 0.0),
            Complex64::from_polar(s, phi),
            -Complex64::from_polar(s, -phi),
            Complex64::new(c, 0.0),
        )
    }

    #[test]
    fn algebra_axioms_on_random_triples() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..100 {
            let (a, b, c) = (random_mat(&mut rng), random_mat(&mut rng), random_mat(&mut rng));
            let assoc_mul = a.mul(&b).mul(&c).max_abs_diff(&a.mul(&b.mul(&c)));
            assert!(assoc_mul < 1e-12, "multiplication associativity: {assoc_mul}");
            let assoc_add = a.add(&b).add(&c).max_abs_diff(&a.add(&b.add(&c)));
            assert!(assoc_add < 1e-12, "addition associativity: {assoc_add}");
            let distrib = a
                .mul(&b.add(&c))
                .max_abs_diff(&a.mul(&b).add(&a.mul(&c)));
            assert!(distrib < 1e-12, "distributivity: {distrib}");
        }
    }

    #[test]
    fn adjoint_is_involutive() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let a = random_mat(&mut rng);
            assert_eq!(a.adjoint().adjoint(), a);
        }
    }

    #[test]
    fn spin_operator_algebra() {
        // [I_x, I_y] = i I_z and cyclic
        let comm = spin_x().commutator(&spin_y());
        assert!(comm.max_abs_diff(&spin_z().scale(I)) < 1e-15);
        // I_+ I_- is the excited projector
        let p1 = spin_plus().mul(&spin_minus());
        assert!(p1.max_abs_diff(&ComplexMat2::diag(ONE, ZERO)) < 1e-15);
        // I_x = (I_+ + I_-)/2
        let ix = spin_plus().add(&spin_minus()).scale_re(0.5);
        assert!(ix.max_abs_diff(&spin_x()) < 1e-15);
    }

    #[test]
    fn maximally_mixed_is_density_matrix() {
        let m = ComplexMat2::identity().scale_re(0.5);
        assert!(is_density_matrix(&m, 1e-12));
    }

    #[test]
    fn negative_population_rejected() {
        let m = ComplexMat2::diag(Complex64::new(1.5, 0.0), Complex64::new(-0.5, 0.0));
        assert!(!is_density_matrix(&m, 1e-12));
    }

    #[test]
    fn oversized_coherence_rejected() {
        // Eigenvalues 0.5 +- 0.6, so one is -0.1.
        let m = ComplexMat2::from_rows(
            Complex64::new(0.5, 0.0),
            Complex64::new(0.6, 0.0),
            Complex64::new(0.6, 0.0),
            Complex64::new(0.5, 0.0),
        );
        assert!(!is_density_matrix(&m, 1e-12));
        let [lo, hi] = m.eigvals_hermitian();
        assert!((lo + 0.1).abs() < 1e-12 && (hi - 1.1).abs() < 1e-12);
    }

    #[test]
    fn density_test_invariant_under_unitary_conjugation() {
        let mut rng = StdRng::seed_from_u64(2024);
        for _ in 0..100 {
            let rho = DensityMatrix::from_bloch(
                rng.gen_range(-0.3..0.3),
                rng.gen_range(-0.3..0.3),
                rng.gen_range(-0.3..0.3),
            )
            .unwrap();
            let u = random_unitary(&mut rng);
            let rotated = u.mul(rho.matrix()).mul(&u.adjoint());
            assert!(is_density_matrix(&rotated, 1e-10));

            let bad = ComplexMat2::diag(Complex64::new(1.3, 0.0), Complex64::new(-0.3, 0.0));
            let rotated_bad = u.mul(&bad).mul(&u.adjoint());
            assert!(!is_density_matrix(&rotated_bad, 1e-10));
        }
    }

    #[test]
    fn bloch_vector_round_trip() {
        let rho = DensityMatrix::from_bloch(0.3, -0.1, 0.2).unwrap();
        let [mx, my, mz] = rho.bloch_vector();
        assert!((mx - 0.3).abs() < 1e-15);
        assert!((my + 0.1).abs() < 1e-15);
        assert!((mz - 0.2).abs() < 1e-15);
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states() {
        let d = DensityMatrix::excited().trace_distance(&DensityMatrix::ground());
        assert!((d - 1.0).abs() < 1e-15);
    }
}
