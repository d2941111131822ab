//! Schmidt form of two-spin states and the inverse problem: given a target
//! state, find the coupling time and the two pulses that prepare it.
//!
//! The protocol output is `(U₁ ⊗ U₂) M₀` with `M₀` the amplitude matrix of
//! the freely evolved state and `U₁, U₂ ∈ SU(2)` the pulse unitaries. The
//! Schmidt coefficients fix `t₁`; the singular vectors fix `U₁, U₂` up to a
//! one-parameter gauge `U₁ → U₁D, U₂ → U₂D` with `D = diag(e^{iλ}, e^{-iλ})`
//! and independent sign flips. The solver pins that gauge by requiring
//! `⟨↑|U₂|↑⟩` real nonnegative (`β′` real) and `cos χ₁ ≥ 0`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use log::{debug, warn};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::{prepare, PreparationPlan, PulseParams};
use crate::optimize::nelder_mead;
use crate::qmath::{svd2, Matrix2, I, ONE, ZERO};
use crate::state::{SingleQubitState, TwoQubitState, NORM_TOL};

/// Synthesis is accepted only at or above this state fidelity.
pub const SYNTHESIS_FIDELITY_THRESHOLD: f64 = 1.0 - 1e-9;

/// Evaluation budget of the numerical fallback.
pub const FALLBACK_MAX_EVALUATIONS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtForm {
    pub c1: f64,
    pub c2: f64,
    pub alpha: [SingleQubitState; 2],
    pub beta: [SingleQubitState; 2],
}

impl SchmidtForm {
    /// `c₁|α₁⟩|β₁⟩ + c₂|α₂⟩|β₂⟩`.
    pub fn reconstruct(&self) -> TwoQubitState {
        let t1 = TwoQubitState::product(&self.alpha[0], &self.beta[0]);
        let t2 = TwoQubitState::product(&self.alpha[1], &self.beta[1]);
        let a: [C64; 4] =
            std::array::from_fn(|k| t1.amplitude(k) * self.c1 + t2.amplitude(k) * self.c2);
        TwoQubitState::from_evolution(a)
    }

    /// Largest deviation of `⟨αᵢ|αⱼ⟩`, `⟨βᵢ|βⱼ⟩` from `δᵢⱼ`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for set in [&self.alpha, &self.beta] {
            for i in 0..2 {
                for j in 0..2 {
                    let target = if i == j { ONE } else { ZERO };
                    worst = worst.max((set[i].inner(&set[j]) - target).norm());
                }
            }
        }
        worst
    }

    /// `|c₁² + c₂² - 1|`.
    pub fn normalization_residual(&self) -> f64 {
        (self.c1 * self.c1 + self.c2 * self.c2 - 1.0).abs()
    }
}

fn require_unit_norm(state: &TwoQubitState) -> Result<()> {
    let norm = state.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// Schmidt decomposition via the SVD of the amplitude matrix, `c₁ ≥ c₂ ≥ 0`.
pub fn decompose(state: &TwoQubitState) -> Result<SchmidtForm> {
    require_unit_norm(state)?;
    let svd = svd2(&state.amplitude_matrix());
    let conj_col = |m: &Matrix2, k: usize| {
        let c = m.column(k);
        SingleQubitState::new(c[0].conj(), c[1].conj())
    };
    let col = |m: &Matrix2, k: usize| {
        let c = m.column(k);
        SingleQubitState::new(c[0], c[1])
    };
    Ok(SchmidtForm {
        c1: svd.singular_values[0],
        c2: svd.singular_values[1],
        alpha: [col(&svd.left, 0), col(&svd.left, 1)],
        beta: [conj_col(&svd.right, 0), conj_col(&svd.right, 1)],
    })
}

/// The protocol's own Schmidt-type expansion of `prepare(plan)`, with the
/// signed coefficients `cos(At₁/2)`, `sin(At₁/2)` and the single-spin
/// states built from `α, α′, β, β′` including the `e^{-iπ/4}` factors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolSchmidt {
    pub c1: f64,
    pub c2: f64,
    pub alpha: C64,
    pub alpha_prime: C64,
    pub beta: C64,
    pub beta_prime: C64,
}

impl ProtocolSchmidt {
    pub fn from_plan(plan: &PreparationPlan) -> Self {
        let (c2, c1) = (0.5 * plan.coupling_a() * plan.t1()).sin_cos();
        let p1 = plan.pulse1();
        let p2 = plan.pulse2();
        let (s1, k1) = p1.chi().sin_cos();
        let (s2, k2) = p2.chi().sin_cos();
        Self {
            c1,
            c2,
            alpha: C64::new(k1, -s1 * p1.theta().cos()),
            alpha_prime: C64::from_polar(s1 * p1.theta().sin(), p1.phi() - FRAC_PI_2),
            beta: C64::from_polar(s2 * p2.theta().sin(), -(p2.phi() + FRAC_PI_2)),
            beta_prime: C64::new(k2, s2 * p2.theta().cos()),
        }
    }

    pub fn alpha_states(&self) -> [SingleQubitState; 2] {
        let g = C64::from_polar(1.0, -FRAC_PI_4);
        [
            SingleQubitState::new(self.alpha, self.alpha_prime),
            SingleQubitState::new(-self.alpha_prime.conj() * g, self.alpha.conj() * g),
        ]
    }

    pub fn beta_states(&self) -> [SingleQubitState; 2] {
        let g = C64::from_polar(1.0, -FRAC_PI_4);
        [
            SingleQubitState::new(self.beta, self.beta_prime),
            SingleQubitState::new(self.beta_prime.conj() * g, -self.beta.conj() * g),
        ]
    }

    pub fn reconstruct(&self) -> TwoQubitState {
        let [a1, a2] = self.alpha_states();
        let [b1, b2] = self.beta_states();
        let t1 = TwoQubitState::product(&a1, &b1);
        let t2 = TwoQubitState::product(&a2, &b2);
        TwoQubitState::from_evolution(std::array::from_fn(|k| {
            t1.amplitude(k) * self.c1 + t2.amplitude(k) * self.c2
        }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    First,
    Second,
}

/// Modulus and phase of the pulse-dependent diagonal amplitude of one spin
/// (`α = |α|e^{-iγ}` for spin 1, `β′ = |β′|e^{iη}` for spin 2) plus the pulse azimuth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinAngles {
    pub spin: Spin,
    pub modulus: f64,
    pub phase: f64,
    pub phi: f64,
}

/// `|α| = √(cos²χ + sin²χ cos²θ)`, phase `atan2(sin χ cos θ, cos χ)`.
pub fn pulse_angles_from_params(p: &PulseParams, which: Spin) -> SpinAngles {
    let (s, c) = p.chi().sin_cos();
    let axial = s * p.theta().cos();
    SpinAngles {
        spin: which,
        modulus: c.hypot(axial),
        phase: axial.atan2(c),
        phi: p.phi(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseAngleSolution {
    pub abs_alpha: f64,
    pub gamma: f64,
    pub abs_beta_prime: f64,
    pub eta: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl PulseAngleSolution {
    pub fn from_plan(plan: &PreparationPlan) -> Self {
        let a = pulse_angles_from_params(&plan.pulse1(), Spin::First);
        let b = pulse_angles_from_params(&plan.pulse2(), Spin::Second);
        Self {
            abs_alpha: a.modulus,
            gamma: a.phase,
            abs_beta_prime: b.modulus,
            eta: b.phase,
            phi1: a.phi,
            phi2: b.phi,
        }
    }

    /// `|α′| = √(1 - |α|²)`.
    pub fn abs_alpha_prime(&self) -> f64 {
        (1.0 - self.abs_alpha * self.abs_alpha).max(0.0).sqrt()
    }
}

/// `sin²χ₁ ≥ |α′|²`, the reality condition for `γ` at fixed `|α′|`.
pub fn gamma_feasible(chi1: f64, abs_alpha_prime: f64) -> bool {
    let s = chi1.sin();
    s * s >= abs_alpha_prime * abs_alpha_prime - 1e-12
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthesisResult {
    pub plan: PreparationPlan,
    /// `arg⟨target|prepare(plan)⟩`.
    pub global_phase: f64,
    /// `|⟨target|prepare(plan)⟩|²`, recomputed from the plan.
    pub residual_fidelity: f64,
    pub used_fallback: bool,
}

/// `|⟨a|b⟩|²`.
pub fn fidelity_states(a: &TwoQubitState, b: &TwoQubitState) -> f64 {
    a.inner(b).norm_sqr()
}

fn evaluate(target: &TwoQubitState, plan: PreparationPlan, used_fallback: bool) -> SynthesisResult {
    let overlap = target.inner(&prepare(&plan));
    SynthesisResult {
        plan,
        global_phase: overlap.arg(),
        residual_fidelity: overlap.norm_sqr().min(1.0),
        used_fallback,
    }
}

/// Closed-form inversion. Always produces a plan; its quality is checked by the caller.
pub fn synthesize_closed_form(target: &TwoQubitState, coupling_a: f64) -> Result<PreparationPlan> {
    let svd = svd2(&target.amplitude_matrix());
    let half = svd.singular_values[0].clamp(0.0, 1.0).acos();
    let t1 = 2.0 * half / coupling_a.abs();
    let sigma = coupling_a.signum();

    // M₀ = diag(1, -iσ) · diag(c₁, c₂) · X
    let u1 = svd.left * Matrix2::from_diagonal([ONE, I * sigma]);
    let det1 = u1.det();
    let mut u1 = u1.scale(C64::from_polar(1.0, -0.5 * det1.arg()));
    let x = Matrix2::new(ZERO, ONE, ONE, ZERO);
    let u2 = svd.right.conj() * x;
    let det2 = u2.det();
    let mut u2 = u2.scale(C64::from_polar(1.0, -0.5 * det2.arg()));

    let lead = u2.get(0, 0);
    if lead.norm() > 1e-12 {
        let gauge = Matrix2::from_diagonal([lead.conj() / lead.norm(), lead / lead.norm()]);
        u1 = u1 * gauge;
        u2 = u2 * gauge;
    }
    // product target: a diagonal phase on spin 1 is then only a global phase
    let lead = u1.get(0, 0);
    if svd.singular_values[1] < 1e-12 && lead.norm() > 1e-12 {
        u1 = u1 * Matrix2::from_diagonal([lead.conj() / lead.norm(), lead / lead.norm()]);
    }
    if u1.trace().re < 0.0 {
        u1 = -u1;
    }

    let pulse1 = PulseParams::from_su2(&u1);
    let pulse2 = PulseParams::from_su2(&u2);

    let abs_alpha_prime = u1.get(1, 0).norm();
    if !gamma_feasible(pulse1.chi(), abs_alpha_prime) {
        warn!(
            "candidate pulse violates sin²χ₁ ≥ |α′|²: χ₁ = {}, |α′| = {}",
            pulse1.chi(),
            abs_alpha_prime
        );
    }
    PreparationPlan::new(coupling_a, t1, pulse1, pulse2)
}

fn plan_from_raw(coupling_a: f64, x: &[f64]) -> PreparationPlan {
    PreparationPlan::new(
        coupling_a,
        x[0].abs(),
        PulseParams::new(x[1], x[2], x[3]),
        PulseParams::new(x[4], x[5], x[6]),
    )
    .expect("finite raw parameters")
}

/// Derivative-free polish of a seed plan, minimizing `1 - fidelity` over
/// the seven raw parameters.
pub fn refine(target: &TwoQubitState, seed: &PreparationPlan, max_evaluations: usize) -> SynthesisResult {
    let a = seed.coupling_a();
    let (p1, p2) = (seed.pulse1(), seed.pulse2());
    let x0 = [seed.t1(), p1.chi(), p1.theta(), p1.phi(), p2.chi(), p2.theta(), p2.phi()];
    let step = 0.05 * (1.0 / a.abs()).min(1.0);
    let cost = |x: &[f64]| {
        if x.iter().any(|v| !v.is_finite()) {
            return f64::INFINITY;
        }
        1.0 - fidelity_states(target, &prepare(&plan_from_raw(a, x)))
    };
    // shrink steps evaluate a whole simplex at once; keep headroom for that
    let budget = max_evaluations.saturating_sub(x0.len() + 1);
    let min = nelder_mead(cost, &x0, step, budget, 1e-16);
    debug!("fallback used {} evaluations, cost {:e}", min.evaluations, min.value);
    evaluate(target, plan_from_raw(a, &min.x), true)
}

/// Finds a plan whose output equals `target` up to a global phase.
pub fn synthesize(target: &TwoQubitState, coupling_a: f64) -> Result<SynthesisResult> {
    require_unit_norm(target)?;
    if coupling_a == 0.0 || !coupling_a.is_finite() {
        return Err(Error::InvalidParameter("coupling A must be finite and nonzero".into()));
    }
    let plan = synthesize_closed_form(target, coupling_a)?;
    let mut best = evaluate(target, plan, false);
    if best.residual_fidelity < SYNTHESIS_FIDELITY_THRESHOLD {
        debug!("closed form reached fidelity {:e}; refining", best.residual_fidelity);
        let refined = refine(target, &best.plan, FALLBACK_MAX_EVALUATIONS);
        if refined.residual_fidelity > best.residual_fidelity {
            best = refined;
        }
    }
    if best.residual_fidelity < SYNTHESIS_FIDELITY_THRESHOLD {
        warn!("synthesis failed: residual fidelity {:e}", best.residual_fidelity);
        return Err(Error::SynthesisFailed {
            residual_fidelity: best.residual_fidelity,
            best: Box::new(best),
        });
    }
    Ok(best)
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > std::f64::consts::PI {
        r - TAU
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::PreparationPlan;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn random_plan(rng: &mut impl Rng) -> PreparationPlan {
        let mag = rng.random_range(0.1..10.0);
        let a = if rng.random_bool(0.5) { mag } else { -mag };
        let t1 = rng.random_range(0.0..TAU / mag);
        let mut pulse = || {
            PulseParams::new(rng.random_range(0.0..TAU), rng.random_range(0.0..PI), rng.random_range(0.0..TAU))
        };
        let (p1, p2) = (pulse(), pulse());
        PreparationPlan::new(a, t1, p1, p2).unwrap()
    }

    #[test]
    fn product_state_decomposition() {
        let f = decompose(&TwoQubitState::up_down()).unwrap();
        assert!((f.c1 - 1.0).abs() < 1e-15 && f.c2.abs() < 1e-15);
        assert!((f.alpha[0].inner(&SingleQubitState::up()).norm() - 1.0).abs() < 1e-15);
        assert!((f.beta[0].inner(&SingleQubitState::down()).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn triplet_decomposition() {
        let f = decompose(&TwoQubitState::triplet_zero()).unwrap();
        assert!((f.c1 - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((f.c2 - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(f.reconstruct().max_abs_diff(&TwoQubitState::triplet_zero()) < 1e-15);
    }

    #[test]
    fn decompose_rejects_unnormalized() {
        let s = TwoQubitState::from_evolution([ONE, ONE, ZERO, ZERO]);
        assert!(matches!(decompose(&s), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn coefficients_follow_coupling_time() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..500 {
            let plan = random_plan(&mut rng);
            let f = decompose(&prepare(&plan)).unwrap();
            let (s, c) = (0.5 * plan.coupling_a() * plan.t1()).sin_cos();
            let (hi, lo) = if c.abs() >= s.abs() { (c.abs(), s.abs()) } else { (s.abs(), c.abs()) };
            assert!((f.c1 - hi).abs() < 1e-10 && (f.c2 - lo).abs() < 1e-10);
            assert!(f.orthonormality_residual() < 1e-12);
            assert!(f.normalization_residual() < 1e-12);
        }
    }

    #[test]
    fn protocol_expansion_matches_forward_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..500 {
            let plan = random_plan(&mut rng);
            let ps = ProtocolSchmidt::from_plan(&plan);
            assert!(ps.reconstruct().max_abs_diff(&prepare(&plan)) < 1e-12);
            let form = SchmidtForm {
                c1: ps.c1,
                c2: ps.c2,
                alpha: ps.alpha_states(),
                beta: ps.beta_states(),
            };
            assert!(form.orthonormality_residual() < 1e-12);
            let angles = PulseAngleSolution::from_plan(&plan);
            assert!((angles.abs_alpha - ps.alpha.norm()).abs() < 1e-12);
            assert!((C64::from_polar(angles.abs_alpha, -angles.gamma) - ps.alpha).norm() < 1e-12);
            assert!((C64::from_polar(angles.abs_beta_prime, angles.eta) - ps.beta_prime).norm() < 1e-12);
            let alpha_sq = angles.abs_alpha.powi(2) + ps.alpha_prime.norm_sqr();
            assert!((alpha_sq - 1.0).abs() < 1e-12);
            assert!(gamma_feasible(plan.pulse1().chi(), ps.alpha_prime.norm()));
        }
    }

    #[test]
    fn pulse_angle_examples() {
        let a = pulse_angles_from_params(&PulseParams::zero(), Spin::First);
        assert_eq!((a.modulus, a.phase), (1.0, 0.0));
        let chi = PI / 3.0;
        let a = pulse_angles_from_params(&PulseParams::new(chi, FRAC_PI_2, 0.0), Spin::First);
        assert!((a.modulus - chi.cos().abs()).abs() < 1e-15 && a.phase.abs() < 1e-15);
        let a = pulse_angles_from_params(&PulseParams::along_z(FRAC_PI_4), Spin::First);
        assert!((a.modulus - 1.0).abs() < 1e-15 && (a.phase - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn feasibility_examples() {
        assert!(gamma_feasible(FRAC_PI_2, 0.0));
        assert!(gamma_feasible(FRAC_PI_2, 1.0));
        assert!(!gamma_feasible(0.0, 0.5));
        assert!(gamma_feasible(PI / 6.0, 0.5));
    }

    #[test]
    fn feasibility_is_monotone_in_chi() {
        for k in 0..=20 {
            let ap = k as f64 / 20.0;
            let mut prev = false;
            for j in 0..=200 {
                let now = gamma_feasible(FRAC_PI_2 * j as f64 / 200.0, ap);
                assert!(!prev || now, "lost feasibility at |α′| = {ap}, step {j}");
                prev = now;
            }
        }
    }

    #[test]
    fn synthesize_initial_state() {
        let r = synthesize(&TwoQubitState::up_down(), 1.0).unwrap();
        assert_eq!(r.plan.t1(), 0.0);
        assert!(r.plan.pulse1().chi().abs() < 1e-15 && r.plan.pulse2().chi().abs() < 1e-15);
        assert!((r.residual_fidelity - 1.0).abs() < 1e-15);
    }

    #[test]
    fn synthesize_triplet_lands_in_known_family() {
        let a = 3.0;
        let r = synthesize(&TwoQubitState::triplet_zero(), a).unwrap();
        let p = r.plan;
        assert!((p.t1() - PI / (2.0 * a)).abs() < 1e-12);
        assert!(p.pulse1().theta().abs() < 1e-12 && p.pulse2().theta().abs() < 1e-12);
        assert!((p.pulse1().chi() - p.pulse2().chi() - FRAC_PI_4).abs() < 1e-12);
        assert!(r.residual_fidelity >= 1.0 - 1e-12);
    }

    #[test]
    fn synthesize_rejects_bad_inputs() {
        assert!(synthesize(&TwoQubitState::up_down(), 0.0).is_err());
        let s = TwoQubitState::from_evolution([ONE, ONE, ZERO, ZERO]);
        assert!(matches!(synthesize(&s, 1.0), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn round_trip_random_plans() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let plan = random_plan(&mut rng);
            let target = prepare(&plan);
            let r = synthesize(&target, plan.coupling_a()).unwrap();
            assert!(r.residual_fidelity >= SYNTHESIS_FIDELITY_THRESHOLD);
            assert!(!r.used_fallback);
            let phased = target.scaled(C64::from_polar(1.0, r.global_phase));
            assert!(prepare(&r.plan).max_abs_diff(&phased) < 1e-9);
        }
    }

    #[test]
    fn azimuth_of_first_pulse_is_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..200 {
            let target = TwoQubitState::random(&mut rng);
            let a = rng.random_range(0.5..5.0);
            let base = synthesize(&target, a).unwrap().plan;
            let delta = rng.random_range(-PI..PI);
            let p1 = base.pulse1();
            let shifted = PreparationPlan::new(
                a,
                base.t1(),
                PulseParams::new(p1.chi(), p1.theta(), p1.phi() + delta),
                base.pulse2(),
            )
            .unwrap();

            // same effect expressed on the protocol expansion: α′ → α′ e^{iδ}
            let mut ps = ProtocolSchmidt::from_plan(&base);
            ps.alpha_prime *= C64::from_polar(1.0, delta);
            assert!(ps.reconstruct().max_abs_diff(&prepare(&shifted)) < 1e-12);

            let again = synthesize(&prepare(&shifted), a).unwrap().plan;
            let moved = wrap_angle(again.pulse1().phi() - base.pulse1().phi() - delta);
            assert!(moved.abs() < 1e-8, "azimuth moved by {moved}");
            assert!((again.t1() - base.t1()).abs() < 1e-9);
        }
    }

    #[test]
    fn refine_recovers_from_perturbed_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let target = TwoQubitState::random(&mut rng);
        let exact = synthesize_closed_form(&target, 1.0).unwrap();
        let p1 = exact.pulse1();
        let seed = PreparationPlan::new(
            1.0,
            exact.t1() + 0.02,
            PulseParams::new(p1.chi() + 0.03, p1.theta() - 0.02, p1.phi()),
            exact.pulse2(),
        )
        .unwrap();
        let before = fidelity_states(&target, &prepare(&seed));
        let r = refine(&target, &seed, FALLBACK_MAX_EVALUATIONS);
        assert!(r.used_fallback);
        assert!(r.residual_fidelity > before);
        assert!(r.residual_fidelity > 1.0 - 1e-9, "{}", r.residual_fidelity);
    }

    #[test]
    fn fidelity_examples() {
        let t0 = TwoQubitState::triplet_zero();
        assert!((fidelity_states(&t0, &t0) - 1.0).abs() < 1e-15);
        assert_eq!(fidelity_states(&TwoQubitState::up_down(), &TwoQubitState::down_up()), 0.0);
        let phased = t0.scaled(C64::from_polar(1.0, -FRAC_PI_4));
        assert!((fidelity_states(&t0, &phased) - 1.0).abs() < 1e-15);
    }
}
