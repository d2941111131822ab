//! Field and evolution time that take `|↑↓⟩` to a maximally entangled
//! state `(|↑↓⟩ + e^{iχ}|↓↑⟩)/√2` under a z field.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::donor::{DerivedFrequencies, DonorParams};
use crate::error::{Error, Result};
use crate::state::TwoQubitState;

/// Residual tolerance used to flag the entangling conditions as met.
pub const CONDITION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglerSpec {
    /// Requested relative phase.
    pub chi: f64,
    /// Signed field along z, tesla.
    pub bz: f64,
    /// Evolution time, seconds.
    pub t: f64,
}

/// `(cos Ωt − i(ω₋/Ω) sin Ωt)|↑↓⟩ + (A/2Ω) sin Ωt e^{−iπ/2}|↓↑⟩`.
pub fn subspace_state(d: &DonorParams, bz: f64, t: f64) -> TwoQubitState {
    let f = DerivedFrequencies::new(d, bz);
    let (s, c) = (f.omega * t).sin_cos();
    let (ratio_m, ratio_a) = if f.omega == 0.0 {
        (0.0, 0.0)
    } else {
        (f.omega_minus / f.omega, d.hyperfine_a / (2.0 * f.omega))
    };
    let zero = C64::new(0.0, 0.0);
    TwoQubitState::from_evolution([
        zero,
        C64::new(c, -ratio_m * s),
        C64::new(0.0, -ratio_a * s),
        zero,
    ])
}

/// `(|↑↓⟩ + e^{iχ}|↓↑⟩)/√2`.
pub fn entangled_target(chi: f64) -> TwoQubitState {
    let zero = C64::new(0.0, 0.0);
    TwoQubitState::from_evolution([
        zero,
        C64::new(FRAC_1_SQRT_2, 0.0),
        C64::from_polar(FRAC_1_SQRT_2, chi),
        zero,
    ])
}

/// Minimal-time solution: `B_z = A cos χ / (γₑ + γₙ)` and
/// `t = 2 arctan√(1 + 2cot²χ) / (A√(1 + cos²χ))`.
pub fn solve_entangler(d: &DonorParams, chi: f64) -> Result<EntanglerSpec> {
    solve_entangler_branch(d, chi, 0)
}

/// As [`solve_entangler`], adding `branch` half-periods `π/Ω` to the time.
pub fn solve_entangler_branch(d: &DonorParams, chi: f64, branch: u32) -> Result<EntanglerSpec> {
    let a = d.hyperfine_a;
    if !chi.is_finite() {
        return Err(Error::NonFinite("chi"));
    }
    if a == 0.0 || d.gamma_sum() == 0.0 {
        return Err(Error::Domain("hyperfine coupling and γₑ + γₙ must be nonzero".into()));
    }
    let (s, c) = chi.sin_cos();
    let bz = a * c / d.gamma_sum();
    // arctan√(1 + 2cot²χ) written so that sin χ = 0 gives π/2 exactly
    let angle = (s * s + 2.0 * c * c).sqrt().atan2(s.abs());
    let omega = 0.5 * a.abs() * (1.0 + c * c).sqrt();
    let t = (angle + branch as f64 * PI) / omega;
    Ok(EntanglerSpec { chi, bz, t })
}

/// Pure-state concurrence `2|a↑↑ a↓↓ − a↑↓ a↓↑|`.
pub fn concurrence(state: &TwoQubitState) -> f64 {
    let a = state.amplitudes();
    (2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglerReport {
    /// `(cos²χ′(Ω² − 2ω₋²) − ω₋² sin²χ′) / Ω²` for the achieved phase χ′.
    pub cot_residual: f64,
    /// `(sin²Ωt (Ω² − 2ω₋²) − cos²Ωt Ω²) / Ω²`.
    pub tan_residual: f64,
    /// `(Ω² − 2ω₋²) / Ω²`; negative means the conditions have no real solution.
    pub domain_margin: f64,
    pub domain_ok: bool,
    /// Whether `cot χ′` has the sign of `−ω₋`.
    pub cot_sign_ok: bool,
    /// Relative phase `arg(a↓↑ / a↑↓)` of the state actually reached.
    pub achieved_chi: f64,
    /// Fidelity with `(|↑↓⟩ + e^{iχ′}|↓↑⟩)/√2`.
    pub fidelity_achieved: f64,
    /// Fidelity with the requested `(|↑↓⟩ + e^{iχ}|↓↑⟩)/√2`.
    pub fidelity_requested: f64,
    pub concurrence: f64,
    pub conditions_met: bool,
}

/// Evaluates both entangling conditions for `spec` and the state they produce.
pub fn verify_entangling_conditions(d: &DonorParams, spec: &EntanglerSpec) -> EntanglerReport {
    let f = DerivedFrequencies::new(d, spec.bz);
    let w2 = f.omega * f.omega;
    let wm2 = f.omega_minus * f.omega_minus;
    let margin = w2 - 2.0 * wm2;
    let domain_margin = if w2 > 0.0 { margin / w2 } else { f64::NEG_INFINITY };
    let domain_ok = domain_margin >= -CONDITION_TOL;

    let psi = subspace_state(d, spec.bz, spec.t);
    let achieved = psi.amplitude(2) / psi.amplitude(1);
    let achieved_chi = achieved.arg();
    let (sc, cc) = achieved_chi.sin_cos();

    let scale = if w2 > 0.0 { w2 } else { 1.0 };
    let cot_residual = (cc * cc * margin - wm2 * sc * sc) / scale;
    let (st, ct) = (f.omega * spec.t).sin_cos();
    let tan_residual = (st * st * margin - ct * ct * w2) / scale;
    // cot χ′ = −ω₋/√(Ω² − 2ω₋²): cos χ′ · sin χ′ must not share the sign of ω₋
    let cot_sign_ok = cc.abs() < 1e-9 || sc.abs() < 1e-9 || (cc * sc) * f.omega_minus <= 0.0;

    let fidelity_achieved = crate::schmidt::fidelity_states(&entangled_target(achieved_chi), &psi);
    let fidelity_requested = crate::schmidt::fidelity_states(&entangled_target(spec.chi), &psi);
    let conditions_met = domain_ok
        && cot_sign_ok
        && cot_residual.abs() <= CONDITION_TOL
        && tan_residual.abs() <= CONDITION_TOL;

    EntanglerReport {
        cot_residual,
        tan_residual,
        domain_margin,
        domain_ok,
        cot_sign_ok,
        achieved_chi,
        fidelity_achieved,
        fidelity_requested,
        concurrence: concurrence(&psi),
        conditions_met,
    }
}
