//! Pure states of one and two spin-½ particles.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{Matrix2, Matrix4, ONE, ZERO};

/// Tolerance on `Σ|a|² = 1`.
pub const NORM_TOL: f64 = 1e-12;

/// Basis labels in storage order.
pub const BASIS_LABELS: [&str; 4] = ["uu", "ud", "du", "dd"];

/// Two-spin pure state over `(↑↑, ↑↓, ↓↑, ↓↓)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[C64; 4]", into = "[C64; 4]")]
pub struct TwoQubitState([C64; 4]);

impl TwoQubitState {
    /// Builds a state, rejecting non-finite or non-normalized amplitudes.
    pub fn new(amplitudes: [C64; 4]) -> Result<Self> {
        let s = Self::unchecked(amplitudes)?;
        let norm = s.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(s)
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(amplitudes: [C64; 4]) -> Result<Self> {
        let s = Self::unchecked(amplitudes)?;
        let norm = s.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(amplitudes.map(|a| a / norm)))
    }

    fn unchecked(amplitudes: [C64; 4]) -> Result<Self> {
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        Ok(Self(amplitudes))
    }

    /// Internal constructor for results of unitary evolution.
    pub(crate) fn from_evolution(amplitudes: [C64; 4]) -> Self {
        Self(amplitudes)
    }

    pub fn basis(index: usize) -> Self {
        let mut a = [ZERO; 4];
        a[index] = ONE;
        Self(a)
    }

    pub fn up_up() -> Self {
        Self::basis(0)
    }

    pub fn up_down() -> Self {
        Self::basis(1)
    }

    pub fn down_up() -> Self {
        Self::basis(2)
    }

    pub fn down_down() -> Self {
        Self::basis(3)
    }

    /// Unpolarized triplet `(|↑↓⟩ + |↓↑⟩)/√2`.
    pub fn triplet_zero() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Self([ZERO, h, h, ZERO])
    }

    /// Singlet `(|↑↓⟩ - |↓↑⟩)/√2`.
    pub fn singlet() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Self([ZERO, h, -h, ZERO])
    }

    pub fn product(first: &SingleQubitState, second: &SingleQubitState) -> Self {
        let a = first.amplitudes();
        let b = second.amplitudes();
        Self([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    }

    /// Haar-random state: eight standard normals, normalized.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let a: [C64; 4] = std::array::from_fn(|_| {
                C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            if let Ok(s) = Self::normalized(a) {
                return s;
            }
        }
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.0
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.0[index]
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// Amplitude matrix: rows index spin 1, columns index spin 2.
    pub fn amplitude_matrix(&self) -> Matrix2 {
        Matrix2::new(self.0[0], self.0[1], self.0[2], self.0[3])
    }

    pub fn from_amplitude_matrix(m: &Matrix2) -> Self {
        Self([m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]])
    }

    pub fn evolve(&self, u: &Matrix4) -> Self {
        Self(u.apply(&self.0))
    }

    pub fn scaled(&self, phase: C64) -> Self {
        Self(self.0.map(|a| a * phase))
    }

    /// `⟨self|h|self⟩` (real part).
    pub fn expectation(&self, h: &Matrix4) -> f64 {
        let hv = h.apply(&self.0);
        self.0.iter().zip(hv.iter()).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

impl TryFrom<[C64; 4]> for TwoQubitState {
    type Error = Error;

    fn try_from(a: [C64; 4]) -> Result<Self> {
        Self::new(a)
    }
}

impl From<TwoQubitState> for [C64; 4] {
    fn from(s: TwoQubitState) -> Self {
        s.0
    }
}

/// One-spin state `a|↑⟩ + b|↓⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleQubitState(pub [C64; 2]);

impl SingleQubitState {
    pub fn new(up: C64, down: C64) -> Self {
        Self([up, down])
    }

    pub fn up() -> Self {
        Self([ONE, ZERO])
    }

    pub fn down() -> Self {
        Self([ZERO, ONE])
    }

    pub fn amplitudes(&self) -> &[C64; 2] {
        &self.0
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }
}
