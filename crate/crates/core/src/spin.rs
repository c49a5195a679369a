// Copyright 2026 The spinfriction Authors
// SPDX-License-Identifier: Apache-2.0

//! Two-level algebra: complex 2x2 matrices, spin operators, density
//! matrices, Bloch vectors and closed-form spectral calculus.
//!
//! Every Hermitian 2x2 matrix is written as `c*I + (b . sigma)/2`, which
//! gives the spectrum `c -/+ |b|/2` and lets eigenvectors, exponentials and
//! logarithms be evaluated without iteration.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Entrywise tolerance for the Hermitian check.
pub const HERMITIAN_TOL: f64 = 1e-14;
/// Tolerance on `|tr(rho) - 1|`.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue a density matrix may have.
pub const EIGENVALUE_FLOOR: f64 = -1e-12;
/// Slack on the Bloch-ball radius.
pub const BLOCH_RADIUS_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A complex 2x2 matrix stored row-major.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct ComplexMatrix2(pub [[Complex64; 2]; 2]);

impl ComplexMatrix2 {
    pub const ZERO: Self = Self([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Self = Self([[ONE, ZERO], [ZERO, ONE]]);

    pub const fn new(a00: Complex64, a01: Complex64, a10: Complex64, a11: Complex64) -> Self {
        Self([[a00, a01], [a10, a11]])
    }

    pub fn from_real(rows: [[f64; 2]; 2]) -> Self {
        Self::new(
            rows[0][0].into(),
            rows[0][1].into(),
            rows[1][0].into(),
            rows[1][1].into(),
        )
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    #[inline]
    pub fn adjoint(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Self([[a.conj(), c.conj()], [b.conj(), d.conj()]])
    }

    #[inline]
    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn determinant(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    #[inline]
    pub fn scale(&self, k: Complex64) -> Self {
        let [[a, b], [c, d]] = self.0;
        Self([[a * k, b * k], [c * k, d * k]])
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(Complex64::new(k, 0.0))
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&Self::ZERO)
    }

    pub fn is_finite(&self) -> bool {
        self.entries().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.0.iter().flatten().copied()
    }

    /// `(self + self^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_real(0.5)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }
}

impl fmt::Debug for ComplexMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.0;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

impl Add for ComplexMatrix2 {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let ([[a, b], [c, d]], [[e, f], [g, h]]) = (self.0, rhs.0);
        Self([[a + e, b + f], [c + g, d + h]])
    }
}

impl Sub for ComplexMatrix2 {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        let ([[a, b], [c, d]], [[e, f], [g, h]]) = (self.0, rhs.0);
        Self([[a - e, b - f], [c - g, d - h]])
    }
}

impl Neg for ComplexMatrix2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-1.0)
    }
}

impl Mul for ComplexMatrix2 {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let ([[a, b], [c, d]], [[e, f], [g, h]]) = (self.0, rhs.0);
        Self([
            [a * e + b * g, a * f + b * h],
            [c * e + d * g, c * f + d * h],
        ])
    }
}

/// Cartesian spin axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// A Hermitian 2x2 matrix: Hamiltonians and observables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianOperator(ComplexMatrix2);

impl HermitianOperator {
    /// Validates Hermiticity to [`HERMITIAN_TOL`] and stores the exact
    /// Hermitian part.
    pub fn new(matrix: ComplexMatrix2) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::InvalidParameter("operator has non-finite entries".into()));
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self(matrix.hermitian_part()))
    }

    /// `c*I + (bx*sx + by*sy + bz*sz)/2`; Hermitian by construction.
    pub fn from_components(c: f64, b: [f64; 3]) -> Self {
        let [bx, by, bz] = b;
        Self(ComplexMatrix2::new(
            Complex64::new(c + 0.5 * bz, 0.0),
            Complex64::new(0.5 * bx, -0.5 * by),
            Complex64::new(0.5 * bx, 0.5 * by),
            Complex64::new(c - 0.5 * bz, 0.0),
        ))
    }

    /// Inverse of [`from_components`](Self::from_components): returns `(c, b)`.
    pub fn components(&self) -> (f64, [f64; 3]) {
        let m = &self.0 .0;
        let c = 0.5 * (m[0][0].re + m[1][1].re);
        let bz = m[0][0].re - m[1][1].re;
        (c, [2.0 * m[0][1].re, -2.0 * m[0][1].im, bz])
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix2 {
        &self.0
    }

    /// `tr(self * rho)`, real for Hermitian arguments.
    pub fn expectation(&self, rho: &DensityMatrix) -> f64 {
        (self.0 * rho.0).trace().re
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(self.0.scale_real(k))
    }

    /// Applies a real function to the spectrum: `sum_j f(l_j) |v_j><v_j|`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Self {
        let eig = eigendecompose(self);
        let parts = eig.projectors();
        Self(parts[0].scale_real(f(eig.eigenvalues[0])) + parts[1].scale_real(f(eig.eigenvalues[1])))
            .symmetrized()
    }

    fn symmetrized(self) -> Self {
        Self(self.0.hermitian_part())
    }
}

impl Add for HermitianOperator {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

/// `I_axis = sigma_axis / 2`.
pub fn spin_operator(axis: Axis) -> HermitianOperator {
    let b = match axis {
        Axis::X => [1.0, 0.0, 0.0],
        Axis::Y => [0.0, 1.0, 0.0],
        Axis::Z => [0.0, 0.0, 1.0],
    };
    HermitianOperator::from_components(0.0, b)
}

/// The driven-spin Hamiltonian `b0*Iz + bx*Ix`.
pub fn hamiltonian(b0: f64, bx: f64) -> HermitianOperator {
    HermitianOperator::from_components(0.0, [bx, 0.0, b0])
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &HermitianOperator, b: &HermitianOperator) -> ComplexMatrix2 {
    a.matrix().commutator(b.matrix())
}

/// Level splitting `sqrt(b0^2 + b^2)` of [`hamiltonian`].
pub fn energy_gap(b0: f64, b: f64) -> f64 {
    b0.hypot(b)
}

/// Spectral decomposition of a Hermitian 2x2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigendecomposition {
    /// Ascending.
    pub eigenvalues: [f64; 2],
    /// `eigenvectors[j]` belongs to `eigenvalues[j]`.
    pub eigenvectors: [[Complex64; 2]; 2],
}

impl Eigendecomposition {
    /// Rank-one projectors `|v_j><v_j|`.
    pub fn projectors(&self) -> [ComplexMatrix2; 2] {
        self.eigenvectors.map(outer)
    }

    pub fn reconstruct(&self) -> ComplexMatrix2 {
        let [p0, p1] = self.projectors();
        p0.scale_real(self.eigenvalues[0]) + p1.scale_real(self.eigenvalues[1])
    }

    /// `<v_i|m|v_i>` for each eigenvector; real part of the diagonal in the eigenbasis.
    pub fn diagonal_of(&self, m: &ComplexMatrix2) -> [f64; 2] {
        self.eigenvectors.map(|v| sandwich(&v, m).re)
    }
}

fn outer(v: [Complex64; 2]) -> ComplexMatrix2 {
    ComplexMatrix2::new(
        v[0] * v[0].conj(),
        v[0] * v[1].conj(),
        v[1] * v[0].conj(),
        v[1] * v[1].conj(),
    )
}

/// `<v|m|v>`.
pub(crate) fn sandwich(v: &[Complex64; 2], m: &ComplexMatrix2) -> Complex64 {
    let mv0 = m.0[0][0] * v[0] + m.0[0][1] * v[1];
    let mv1 = m.0[1][0] * v[0] + m.0[1][1] * v[1];
    v[0].conj() * mv0 + v[1].conj() * mv1
}

/// `|<u|v>|^2`.
pub(crate) fn overlap_sq(u: &[Complex64; 2], v: &[Complex64; 2]) -> f64 {
    (u[0].conj() * v[0] + u[1].conj() * v[1]).norm_sqr()
}

/// Unit spinor with `(b . sigma)|v> = |b| |v>`, for `b != 0`.
///
/// Uses whichever of the two equivalent closed forms avoids cancellation,
/// so the poles map onto the standard basis exactly.
fn spinor_along(b: [f64; 3], r: f64) -> [Complex64; 2] {
    let [bx, by, bz] = b;
    let (u, w) = if bz >= 0.0 {
        (Complex64::new(r + bz, 0.0), Complex64::new(bx, by))
    } else {
        (Complex64::new(bx, -by), Complex64::new(r - bz, 0.0))
    };
    let norm = u.norm().hypot(w.norm());
    [u / norm, w / norm]
}

/// Closed-form eigendecomposition. Eigenvalues ascending; a degenerate
/// spectrum returns the standard basis.
pub fn eigendecompose(h: &HermitianOperator) -> Eigendecomposition {
    let (c, b) = h.components();
    let r = b[0].hypot(b[1]).hypot(b[2]);
    if r == 0.0 {
        return Eigendecomposition {
            eigenvalues: [c, c],
            eigenvectors: [[ONE, ZERO], [ZERO, ONE]],
        };
    }
    let minus_b = [-b[0], -b[1], -b[2]];
    // The eigenvalue of smaller magnitude loses digits to cancellation in
    // c -/+ r/2; recover it from the determinant instead.
    let m = &h.0 .0;
    let det = m[0][0].re * m[1][1].re - m[0][1].norm_sqr();
    let eigenvalues = if c > 0.0 {
        let hi = c + 0.5 * r;
        [(det / hi).min(hi), hi]
    } else if c < 0.0 {
        let lo = c - 0.5 * r;
        [lo, (det / lo).max(lo)]
    } else {
        [-0.5 * r, 0.5 * r]
    };
    Eigendecomposition {
        eigenvalues,
        eigenvectors: [spinor_along(minus_b, r), spinor_along(b, r)],
    }
}

/// Expectation values `(<sx>, <sy>, <sz>)`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize)]
pub struct BlochVector {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl BlochVector {
    pub const fn new(rx: f64, ry: f64, rz: f64) -> Self {
        Self { rx, ry, rz }
    }

    pub fn norm(&self) -> f64 {
        self.rx.hypot(self.ry).hypot(self.rz)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.rx, self.ry, self.rz]
    }
}

/// A qubit state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix2);

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix2) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {defect:e})")));
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let rho = Self(matrix.hermitian_part());
        let lowest = rho.eigenvalues()[0];
        if lowest < EIGENVALUE_FLOOR {
            return Err(Error::InvalidState(format!("negative eigenvalue {lowest:e}")));
        }
        Ok(rho)
    }

    /// Skips validation; for states produced by trusted arithmetic
    /// (unitary conjugation, spectral construction).
    #[inline]
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix2) -> Self {
        Self(matrix)
    }

    pub fn maximally_mixed() -> Self {
        Self(ComplexMatrix2::IDENTITY.scale_real(0.5))
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix2 {
        &self.0
    }

    pub fn as_operator(&self) -> HermitianOperator {
        HermitianOperator(self.0)
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 2] {
        eigendecompose(&self.as_operator()).eigenvalues
    }

    /// `U rho U^dagger`, re-symmetrized to keep round-off from breaking Hermiticity.
    #[inline]
    pub fn conjugate_by(&self, u: &ComplexMatrix2) -> Self {
        let m = &self.0 .0;
        if m[0][1] == ZERO && m[1][0] == ZERO && m[0][0] == m[1][1] {
            // Multiples of the identity are invariant under every unitary.
            return *self;
        }
        Self((*u * self.0 * u.adjoint()).hermitian_part())
    }

    pub fn bloch(&self) -> BlochVector {
        bloch_from_state(self)
    }
}

/// `r = (2 Re rho01, -2 Im rho01, rho00 - rho11)`.
pub fn bloch_from_state(rho: &DensityMatrix) -> BlochVector {
    let m = &rho.0 .0;
    BlochVector {
        rx: 2.0 * m[0][1].re,
        ry: -2.0 * m[0][1].im,
        rz: m[0][0].re - m[1][1].re,
    }
}

/// `rho = (I + r . sigma)/2`; rejects vectors outside the Bloch ball.
pub fn state_from_bloch(r: &BlochVector) -> Result<DensityMatrix> {
    let len = r.norm();
    if !len.is_finite() || len > 1.0 + BLOCH_RADIUS_TOL {
        return Err(Error::NonPhysicalBloch(len));
    }
    let op = HermitianOperator::from_components(0.5, r.as_array());
    Ok(DensityMatrix(op.0))
}

/// `[Ia, Ib] = i * eps_abc * Ic` as a signed axis, or `None` when `a == b`.
pub fn levi_civita_partner(a: Axis, b: Axis) -> Option<(f64, Axis)> {
    use Axis::*;
    match (a, b) {
        (X, Y) => Some((1.0, Z)),
        (Y, Z) => Some((1.0, X)),
        (Z, X) => Some((1.0, Y)),
        (Y, X) => Some((-1.0, Z)),
        (Z, Y) => Some((-1.0, X)),
        (X, Z) => Some((-1.0, Y)),
        _ => None,
    }
}
