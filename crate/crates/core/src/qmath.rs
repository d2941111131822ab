//! Dense complex linear algebra for 2×2 and 4×4 operators.
//!
//! Two-spin operators act on the product basis in the fixed order
//! `(↑↑, ↑↓, ↓↑, ↓↓)`; the first tensor slot is spin 1 (the electron in the
//! donor model), the second is spin 2.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::SMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default tolerance for hermiticity / unitarity checks.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Square complex matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquareMatrix<const N: usize>(pub [[C64; N]; N]);

pub type Matrix2 = SquareMatrix<2>;
pub type Matrix4 = SquareMatrix<4>;

impl<const N: usize> SquareMatrix<N> {
    pub fn zeros() -> Self {
        Self([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for k in 0..N {
            m.0[k][k] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for (k, d) in diag.into_iter().enumerate() {
            m.0[k][k] = d;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                m.0[r][c] = f(r, c);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[row][col]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|r, c| self.0[c][r].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|r, c| self.0[c][r])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|r, c| self.0[r][c].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|k| self.0[k][k]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(|r, c| self.0[r][c] * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self::from_fn(|r, c| self.0[r][c] * s)
    }

    pub fn apply(&self, v: &[C64; N]) -> [C64; N] {
        let mut out = [ZERO; N];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..N).map(|c| self.0[r][c] * v[c]).sum();
        }
        out
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..N {
            for c in 0..N {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `max |U†U - 1|` entry-wise.
    pub fn unitarity_residual(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    /// `max |M - M†|` entry-wise.
    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }
}

impl<const N: usize> Default for SquareMatrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Mul for SquareMatrix<N> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|r, c| (0..N).map(|k| self.0[r][k] * rhs.0[k][c]).sum())
    }
}

impl<const N: usize> Add for SquareMatrix<N> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|r, c| self.0[r][c] + rhs.0[r][c])
    }
}

impl<const N: usize> Sub for SquareMatrix<N> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|r, c| self.0[r][c] - rhs.0[r][c])
    }
}

impl<const N: usize> Neg for SquareMatrix<N> {
    type Output = Self;

    fn neg(self) -> Self {
        Self::from_fn(|r, c| -self.0[r][c])
    }
}

impl Matrix2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self([[a, b], [c, d]])
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn column(&self, col: usize) -> [C64; 2] {
        [self.0[0][col], self.0[1][col]]
    }

    pub fn from_columns(a: [C64; 2], b: [C64; 2]) -> Self {
        Self([[a[0], b[0]], [a[1], b[1]]])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

pub fn pauli(axis: Axis) -> Matrix2 {
    match axis {
        Axis::X => Matrix2::new(ZERO, ONE, ONE, ZERO),
        Axis::Y => Matrix2::new(ZERO, -I, I, ZERO),
        Axis::Z => Matrix2::new(ONE, ZERO, ZERO, -ONE),
    }
}

/// `σ·n` for a unit vector given by polar angle `theta` and azimuth `phi`.
pub fn pauli_along(theta: f64, phi: f64) -> Matrix2 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    pauli(Axis::X).scale_re(st * cp) + pauli(Axis::Y).scale_re(st * sp) + pauli(Axis::Z).scale_re(ct)
}

/// Tensor product `a ⊗ b`.
pub fn kron(a: &Matrix2, b: &Matrix2) -> Matrix4 {
    Matrix4::from_fn(|r, c| a.0[r / 2][c / 2] * b.0[r % 2][c % 2])
}

/// Operator acting on spin 1 only: `op ⊗ 1`.
pub fn on_first(op: &Matrix2) -> Matrix4 {
    kron(op, &Matrix2::identity())
}

/// Operator acting on spin 2 only: `1 ⊗ op`.
pub fn on_second(op: &Matrix2) -> Matrix4 {
    kron(&Matrix2::identity(), op)
}

/// `exp(-i h t)` for a hermitian 4×4 `h`, computed without any closed form:
/// eigendecomposition first, scaled Taylor series if the eigensolver fails.
pub fn expm_oracle(h: &Matrix4, t: f64) -> Result<Matrix4> {
    expm_oracle_with_tol(h, t, DEFAULT_TOL)
}

/// As [`expm_oracle`] with an explicit hermiticity tolerance, relative to
/// `max(1, max|h_ij|)`.
pub fn expm_oracle_with_tol(h: &Matrix4, t: f64, tol: f64) -> Result<Matrix4> {
    check_hermitian(h, tol)?;
    Ok(expm_eigen(h, t).unwrap_or_else(|| expm_taylor(h, t)))
}

fn check_hermitian(h: &Matrix4, tol: f64) -> Result<()> {
    if !h.is_finite() {
        return Err(Error::NonFinite("hamiltonian"));
    }
    let scale = h.max_abs().max(1.0);
    let deviation = h.hermiticity_residual();
    if deviation > tol * scale {
        return Err(Error::NonHermitian { deviation });
    }
    Ok(())
}

/// Eigendecomposition route. Returns `None` if the solver does not converge.
pub fn expm_eigen(h: &Matrix4, t: f64) -> Option<Matrix4> {
    let m = SMatrix::<C64, 4, 4>::from_fn(|r, c| h.0[r][c]);
    // symmetrize so the solver only ever sees an exactly hermitian matrix
    let m = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::try_new(m, f64::EPSILON, 10_000)?;
    let phases: [C64; 4] = std::array::from_fn(|k| C64::from_polar(1.0, -eig.eigenvalues[k] * t));
    let v = &eig.eigenvectors;
    Some(Matrix4::from_fn(|r, c| {
        (0..4).map(|k| v[(r, k)] * phases[k] * v[(c, k)].conj()).sum()
    }))
}

/// Scaling-and-squaring Taylor route for `exp(-i h t)`.
pub fn expm_taylor(h: &Matrix4, t: f64) -> Matrix4 {
    let x = h.scale(C64::new(0.0, -t));
    let norm = x.max_abs() * 4.0;
    let mut squarings = 0u32;
    if norm > 0.25 {
        squarings = (norm / 0.25).log2().ceil() as u32;
    }
    let x = x.scale_re(0.5_f64.powi(squarings as i32));
    let mut sum = Matrix4::identity();
    let mut term = Matrix4::identity();
    for k in 1..=30 {
        term = (term * x).scale_re(1.0 / k as f64);
        sum = sum + term;
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Result of a 2×2 singular value decomposition, `a = left · diag(s) · right†`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Svd2 {
    pub singular_values: [f64; 2],
    pub left: Matrix2,
    pub right: Matrix2,
}

impl Svd2 {
    pub fn reconstruct(&self) -> Matrix2 {
        let s = Matrix2::from_diagonal([
            C64::new(self.singular_values[0], 0.0),
            C64::new(self.singular_values[1], 0.0),
        ]);
        self.left * s * self.right.adjoint()
    }
}

/// Unit vector orthogonal to `v` (assumed normalized), `(-v₁*, v₀*)`.
fn complement(v: [C64; 2]) -> [C64; 2] {
    [-v[1].conj(), v[0].conj()]
}

fn vec_norm(v: &[C64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// Rescale `v` so its first nonzero component is real and nonnegative;
/// returns the phase that was removed.
fn fix_phase(v: &mut [C64; 2]) -> C64 {
    let pivot = if v[0].norm() > 1e-14 { v[0] } else { v[1] };
    if pivot.norm() == 0.0 {
        return ONE;
    }
    let phase = pivot / pivot.norm();
    v[0] /= phase;
    v[1] /= phase;
    phase
}

/// Singular value decomposition of a 2×2 complex matrix.
///
/// Left vectors are gauged so their first nonzero component is real and
/// nonnegative; the remaining phase sits in the right vectors. When the two
/// singular values coincide the left basis is the identity.
pub fn svd2(a: &Matrix2) -> Svd2 {
    let h = *a * a.adjoint();
    let p = h.0[0][0].re;
    let r = h.0[1][1].re;
    let q = h.0[0][1];
    let half_diff = 0.5 * (p - r);
    let disc = (half_diff * half_diff + q.norm_sqr()).sqrt();
    let trace = p + r;

    let mut u1 = if disc <= 1e-14 * trace.max(f64::MIN_POSITIVE) {
        [ONE, ZERO]
    } else {
        // λ − p = disc − half_diff, λ − r = disc + half_diff; keep the better conditioned one
        let cand_a = [q, C64::new(disc - half_diff, 0.0)];
        let cand_b = [C64::new(disc + half_diff, 0.0), q.conj()];
        let v = if vec_norm(&cand_a) >= vec_norm(&cand_b) { cand_a } else { cand_b };
        let n = vec_norm(&v);
        [v[0] / n, v[1] / n]
    };
    fix_phase(&mut u1);
    let mut u2 = complement(u1);
    fix_phase(&mut u2);

    let adj = a.adjoint();
    let w1 = adj.apply(&u1);
    let s1 = vec_norm(&w1);
    let v1 = if s1 > 0.0 { [w1[0] / s1, w1[1] / s1] } else { [ONE, ZERO] };

    // second right vector: a†u2 with any v1 leakage projected out, so that
    // u2† a v2 is real ≥ 0; falls back to the orthogonal complement when a is rank one
    let w2 = adj.apply(&u2);
    let leak = v1[0].conj() * w2[0] + v1[1].conj() * w2[1];
    let w2 = [w2[0] - leak * v1[0], w2[1] - leak * v1[1]];
    let s2 = vec_norm(&w2);
    let v2 = if s2 > 1e-300 {
        [w2[0] / s2, w2[1] / s2]
    } else {
        complement(v1)
    };

    Svd2 {
        singular_values: [s1, s2],
        left: Matrix2::from_columns(u1, u2),
        right: Matrix2::from_columns(v1, v2),
    }
}
