//! Trace fidelity between the z-field propagator and the gate `W` it
//! realizes at the triplet-entangling field and time.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::donor::{split_propagator, DonorParams};
use crate::error::{Error, Result};
use crate::qmath::{Matrix4, I};

/// Unitarity tolerance for [`fidelity_trace`] inputs.
pub const UNITARY_TOL: f64 = 1e-10;

/// Default curve window and density.
pub const DEFAULT_T_MAX: f64 = 40e-9;
pub const DEFAULT_POINTS: usize = 1024;

/// `B_z = A / (γₑ + γₙ)`.
pub fn entangling_field(d: &DonorParams) -> f64 {
    d.hyperfine_a / d.gamma_sum()
}

/// `t = π / (√2 A)`.
pub fn entangling_time(d: &DonorParams) -> f64 {
    PI / (SQRT_2 * d.hyperfine_a)
}

/// The gate `W = U(t*)` at `B_z*`, written with explicit phases.
pub fn gate_w(d: &DonorParams) -> Matrix4 {
    let r = d.gamma_diff() / d.gamma_sum();
    let k = PI / (2.0 * SQRT_2);
    let mid = -I * FRAC_1_SQRT_2 * C64::from_polar(1.0, PI / (4.0 * SQRT_2));
    let mut w = Matrix4::zeros();
    w.0[0][0] = C64::from_polar(1.0, -k * (r + 0.5));
    w.0[1][1] = mid;
    w.0[1][2] = mid;
    w.0[2][1] = mid;
    w.0[2][2] = -mid;
    w.0[3][3] = C64::from_polar(1.0, k * (r - 0.5));
    w
}

/// `(1/N) Re Tr[W†U]` with `N = 4`.
pub fn fidelity_trace(u: &Matrix4, w: &Matrix4) -> Result<f64> {
    for m in [u, w] {
        let deviation = m.unitarity_residual();
        if deviation.is_nan() || deviation > UNITARY_TOL {
            return Err(Error::NonUnitary { deviation });
        }
    }
    Ok(0.25 * (w.adjoint() * *u).trace().re)
}

/// Closed-form `F(t)` at the entangling field:
/// `½ cos(At/4 − π/(4√2)) [cos(r(At/2 − π/(2√2))) + sin(At/√2)]`, `r = (γₑ−γₙ)/(γₑ+γₙ)`.
pub fn fidelity_analytic(d: &DonorParams, t: f64) -> f64 {
    let a = d.hyperfine_a;
    let r = d.gamma_diff() / d.gamma_sum();
    0.5 * (0.25 * a * t - PI / (4.0 * SQRT_2)).cos()
        * ((r * (0.5 * a * t - PI / (2.0 * SQRT_2))).cos() + (a * t / SQRT_2).sin())
}

/// [`fidelity_analytic`] guarded against use at any other field than `A/(γₑ+γₙ)`.
pub fn fidelity_analytic_at(d: &DonorParams, bz: f64, t: f64) -> Result<f64> {
    let expected = entangling_field(d);
    if (bz - expected).abs() > 1e-9 * expected.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidParameter(format!(
            "closed-form fidelity holds only at B_z = {expected:e} T, got {bz:e} T"
        )));
    }
    Ok(fidelity_analytic(d, t))
}

/// `F(t)` from the propagator and `W` directly.
pub fn fidelity_numeric(d: &DonorParams, t: f64) -> f64 {
    let u = split_propagator(d, entangling_field(d), t);
    0.25 * (gate_w(d).adjoint() * u).trace().re
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    /// `(t in seconds, F)` pairs, strictly increasing in `t`.
    pub samples: Vec<(f64, f64)>,
    pub params: DonorParams,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub t: f64,
    pub fidelity: f64,
}

impl FidelityCurve {
    /// Largest sample on the grid.
    pub fn grid_peak(&self) -> Peak {
        let (t, fidelity) = self
            .samples
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("curve has at least two samples");
        Peak { t, fidelity }
    }

    /// Grid peak polished by golden-section search on the neighbouring cells.
    pub fn refined_peak(&self) -> Peak {
        let idx = self
            .samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .map(|(i, _)| i)
            .expect("curve has at least two samples");
        let lo = self.samples[idx.saturating_sub(1)].0;
        let hi = self.samples[(idx + 1).min(self.samples.len() - 1)].0;
        let t = golden_section_max(|t| fidelity_analytic(&self.params, t), lo, hi, 200);
        let fidelity = fidelity_analytic(&self.params, t);
        if fidelity >= self.samples[idx].1 {
            Peak { t, fidelity }
        } else {
            self.grid_peak()
        }
    }

    /// Largest `|analytic − trace|` over the samples.
    pub fn max_trace_deviation(&self) -> f64 {
        self.samples
            .iter()
            .map(|&(t, f)| (f - fidelity_numeric(&self.params, t)).abs())
            .fold(0.0, f64::max)
    }
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iterations: usize) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iterations {
        if hi - lo <= f64::EPSILON * hi.abs().max(1e-30) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// `n` uniform samples of [`fidelity_analytic`] on `[0, t_max]`, endpoints included.
pub fn fidelity_curve(d: &DonorParams, t_max: f64, n: usize) -> Result<FidelityCurve> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {n}")));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidParameter(format!("t_max must be positive, got {t_max}")));
    }
    let step = t_max / (n - 1) as f64;
    let samples = (0..n)
        .map(|k| {
            let t = if k == n - 1 { t_max } else { k as f64 * step };
            (t, fidelity_analytic(d, t))
        })
        .collect();
    Ok(FidelityCurve { samples, params: *d })
}
