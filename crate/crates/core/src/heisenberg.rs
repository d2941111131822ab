//! Two-step preparation: free evolution under the isotropic Heisenberg
//! coupling from `|↑↓⟩`, then simultaneous instantaneous pulses on each spin.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{on_first, on_second, pauli, pauli_along, Axis, Matrix2, Matrix4, I};
use crate::state::TwoQubitState;

/// One delta pulse: rotation `exp(-i χ σ·n)` with `n = (sinθ cosφ, sinθ sinφ, cosθ)`.
///
/// Angles are canonicalized on construction to `θ ∈ [0, π]`, `φ ∈ [0, 2π)`
/// without changing the unitary (`θ → -θ` is absorbed as `φ → φ + π`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawPulse")]
pub struct PulseParams {
    chi: f64,
    theta: f64,
    phi: f64,
}

#[derive(Deserialize)]
struct RawPulse {
    chi: f64,
    #[serde(default)]
    theta: f64,
    #[serde(default)]
    phi: f64,
}

impl From<RawPulse> for PulseParams {
    fn from(r: RawPulse) -> Self {
        PulseParams::new(r.chi, r.theta, r.phi)
    }
}

impl PulseParams {
    pub fn new(chi: f64, theta: f64, phi: f64) -> Self {
        let mut theta = theta.rem_euclid(TAU);
        let mut phi = phi;
        if theta > PI {
            theta = TAU - theta;
            phi += PI;
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Self { chi, theta, phi }
    }

    /// No pulse.
    pub fn zero() -> Self {
        Self { chi: 0.0, theta: 0.0, phi: 0.0 }
    }

    /// Pulse along `z` with area `chi`.
    pub fn along_z(chi: f64) -> Self {
        Self::new(chi, 0.0, 0.0)
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// `cos χ - i σ·n sin χ` on a single spin.
    pub fn unitary(&self) -> Matrix2 {
        let (s, c) = self.chi.sin_cos();
        Matrix2::identity().scale_re(c) - pauli_along(self.theta, self.phi).scale(I * s)
    }

    /// Recovers pulse angles from an SU(2) matrix `cos χ - i sin χ σ·n`,
    /// with `χ ∈ [0, π]`. For `sin χ = 0` the axis is taken along `z`.
    pub fn from_su2(u: &Matrix2) -> Self {
        let cos_chi = 0.5 * (u.get(0, 0).re + u.get(1, 1).re);
        // sin χ · n
        let nz = -0.5 * (u.get(0, 0).im - u.get(1, 1).im);
        // sin χ (n_x - i n_y) = i u01 ;  sin χ (n_x + i n_y) = i u10
        let m = 0.5 * (I * u.get(0, 1) + (I * u.get(1, 0)).conj());
        let nx = m.re;
        let ny = -m.im;
        let transverse = nx.hypot(ny);
        let sin_chi = transverse.hypot(nz);
        let chi = sin_chi.atan2(cos_chi);
        if sin_chi < 1e-15 {
            return Self::new(chi, 0.0, 0.0);
        }
        let theta = transverse.atan2(nz);
        let phi = if transverse > 0.0 { ny.atan2(nx) } else { 0.0 };
        Self::new(chi, theta, phi)
    }
}

/// Full input to the two-step protocol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPlan")]
pub struct PreparationPlan {
    coupling_a: f64,
    t1: f64,
    pulse1: PulseParams,
    pulse2: PulseParams,
}

#[derive(Deserialize)]
struct RawPlan {
    coupling_a: f64,
    t1: f64,
    pulse1: PulseParams,
    pulse2: PulseParams,
}

impl TryFrom<RawPlan> for PreparationPlan {
    type Error = Error;

    fn try_from(r: RawPlan) -> Result<Self> {
        PreparationPlan::new(r.coupling_a, r.t1, r.pulse1, r.pulse2)
    }
}

impl PreparationPlan {
    pub fn new(coupling_a: f64, t1: f64, pulse1: PulseParams, pulse2: PulseParams) -> Result<Self> {
        if !coupling_a.is_finite() {
            return Err(Error::NonFinite("coupling A"));
        }
        if !(t1.is_finite() && t1 >= 0.0) {
            return Err(Error::InvalidParameter(format!("t1 must be finite and >= 0, got {t1}")));
        }
        for p in [pulse1, pulse2] {
            if !(p.chi.is_finite() && p.theta.is_finite() && p.phi.is_finite()) {
                return Err(Error::NonFinite("pulse angles"));
            }
        }
        Ok(Self { coupling_a, t1, pulse1, pulse2 })
    }

    pub fn coupling_a(&self) -> f64 {
        self.coupling_a
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn pulse1(&self) -> PulseParams {
        self.pulse1
    }

    pub fn pulse2(&self) -> PulseParams {
        self.pulse2
    }
}

/// `H = (A/4)(Σᵢ σᵢ¹σᵢ² + 1)`.
pub fn hamiltonian_isotropic(coupling_a: f64) -> Matrix4 {
    let exchange = Axis::ALL
        .iter()
        .map(|&ax| on_first(&pauli(ax)) * on_second(&pauli(ax)))
        .fold(Matrix4::identity(), |acc, m| acc + m);
    exchange.scale_re(coupling_a / 4.0)
}

/// `exp(-i H t) = cos(At/2) - i (2/A) sin(At/2) H`; identity at `A = 0`.
pub fn propagator_step1(coupling_a: f64, t: f64) -> Matrix4 {
    if coupling_a == 0.0 {
        return Matrix4::identity();
    }
    let half = 0.5 * coupling_a * t;
    let h = hamiltonian_isotropic(coupling_a);
    Matrix4::identity().scale_re(half.cos()) - h.scale(I * (2.0 / coupling_a * half.sin()))
}

/// `cos(At₁/2)|↑↓⟩ - i sin(At₁/2)|↓↑⟩`, the state after free evolution from `|↑↓⟩`.
pub fn state_after_step1(coupling_a: f64, t1: f64) -> TwoQubitState {
    let (s, c) = (0.5 * coupling_a * t1).sin_cos();
    TwoQubitState::from_evolution([C64::new(0.0, 0.0), C64::new(c, 0.0), C64::new(0.0, -s), C64::new(0.0, 0.0)])
}

/// Product of the two single-spin pulse unitaries (they act on different spins and commute).
pub fn pulse_unitary(p1: &PulseParams, p2: &PulseParams) -> Matrix4 {
    on_first(&p1.unitary()) * on_second(&p2.unitary())
}

/// Runs both steps of the protocol starting from `|↑↓⟩`.
pub fn prepare(plan: &PreparationPlan) -> TwoQubitState {
    let psi = state_after_step1(plan.coupling_a, plan.t1);
    psi.evolve(&pulse_unitary(&plan.pulse1, &plan.pulse2))
}

/// Generator `χ₁ σ¹·n¹ + χ₂ σ²·n²` of the pulse step (unitary at unit time).
pub fn pulse_generator(p1: &PulseParams, p2: &PulseParams) -> Matrix4 {
    on_first(&pauli_along(p1.theta, p1.phi)).scale_re(p1.chi)
        + on_second(&pauli_along(p2.theta, p2.phi)).scale_re(p2.chi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{expm_oracle, ZERO};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn random_pulse(rng: &mut impl Rng) -> PulseParams {
        PulseParams::new(rng.random_range(-PI..PI), rng.random_range(0.0..PI), rng.random_range(0.0..TAU))
    }

    #[test]
    fn hamiltonian_spectrum() {
        assert_eq!(hamiltonian_isotropic(0.0), Matrix4::zeros());
        let h = hamiltonian_isotropic(1.0);
        // triplet at +1/2, singlet at -1/2
        for s in [TwoQubitState::up_up(), TwoQubitState::down_down(), TwoQubitState::triplet_zero()] {
            let hs = s.evolve(&h);
            assert!(hs.max_abs_diff(&s.scaled(C64::new(0.5, 0.0))) < 1e-15);
        }
        let singlet = TwoQubitState::singlet();
        assert!(singlet.evolve(&h).max_abs_diff(&singlet.scaled(C64::new(-0.5, 0.0))) < 1e-15);
        assert!((h * h).max_abs_diff(&Matrix4::identity().scale_re(0.25)) < 1e-12);
    }

    #[test]
    fn propagator_limits() {
        assert_eq!(propagator_step1(0.0, 3.0), Matrix4::identity());
        assert!(propagator_step1(2.5, 0.0).max_abs_diff(&Matrix4::identity()) < 1e-15);
        let u = propagator_step1(1.0, 2.0 * PI);
        let oracle = expm_oracle(&hamiltonian_isotropic(1.0), 2.0 * PI).unwrap();
        assert!(u.max_abs_diff(&oracle) <= 1e-12);
    }

    #[test]
    fn propagator_creates_bell_pair_at_quarter_period() {
        // A = 1, t = π/2 = π/(2A)
        let psi = TwoQubitState::up_down().evolve(&propagator_step1(1.0, FRAC_PI_2));
        let h = FRAC_1_SQRT_2;
        let expected = [ZERO, C64::new(h, 0.0), C64::new(0.0, -h), ZERO];
        assert!(psi.max_abs_diff(&TwoQubitState::new(expected).unwrap()) < 1e-15);
        // at t = π only the swapped component survives
        let psi = TwoQubitState::up_down().evolve(&propagator_step1(1.0, PI));
        assert!((psi.amplitude(2) - C64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn state_after_step1_examples() {
        assert_eq!(state_after_step1(3.0, 0.0), TwoQubitState::up_down());
        let h = FRAC_1_SQRT_2;
        for (a, sign) in [(2.0, -1.0), (-2.0, 1.0)] {
            let psi = state_after_step1(a, PI / (2.0 * f64::abs(a)));
            let expected = [ZERO, C64::new(h, 0.0), C64::new(0.0, sign * h), ZERO];
            assert!(psi.max_abs_diff(&TwoQubitState::new(expected).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn state_after_step1_matches_propagator() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = rng.random_range(-10.0..10.0);
            let t = rng.random_range(0.0..5.0);
            let via_u = TwoQubitState::up_down().evolve(&propagator_step1(a, t));
            assert!(via_u.max_abs_diff(&state_after_step1(a, t)) < 1e-13);
        }
    }

    #[test]
    fn pulse_unitary_examples() {
        assert!(pulse_unitary(&PulseParams::zero(), &PulseParams::zero()).max_abs_diff(&Matrix4::identity()) < 1e-15);
        let u = pulse_unitary(&PulseParams::along_z(FRAC_PI_4), &PulseParams::zero());
        let m = C64::from_polar(1.0, -FRAC_PI_4);
        let p = C64::from_polar(1.0, FRAC_PI_4);
        assert!(u.max_abs_diff(&Matrix4::from_diagonal([m, m, p, p])) < 1e-15);
    }

    #[test]
    fn pulse_unitary_matches_oracle_and_commutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let (p1, p2) = (random_pulse(&mut rng), random_pulse(&mut rng));
            let u = pulse_unitary(&p1, &p2);
            assert!(u.is_unitary(1e-12));
            let oracle = expm_oracle(&pulse_generator(&p1, &p2), 1.0).unwrap();
            assert!(u.max_abs_diff(&oracle) <= 1e-12);
            let z = PulseParams::zero();
            let a = pulse_unitary(&p1, &z) * pulse_unitary(&z, &p2);
            let b = pulse_unitary(&z, &p2) * pulse_unitary(&p1, &z);
            assert!(u.max_abs_diff(&a) <= 1e-12 && u.max_abs_diff(&b) <= 1e-12);
        }
    }

    #[test]
    fn su2_angle_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let p = random_pulse(&mut rng);
            let q = PulseParams::from_su2(&p.unitary());
            assert!(q.unitary().max_abs_diff(&p.unitary()) < 1e-13);
            assert!((0.0..=PI).contains(&q.chi()));
        }
        let q = PulseParams::from_su2(&Matrix2::identity());
        assert_eq!((q.chi(), q.theta(), q.phi()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn canonicalization_preserves_unitary() {
        let raw = PulseParams { chi: 0.7, theta: -0.4, phi: 5.0 };
        let canon = PulseParams::new(0.7, -0.4, 5.0);
        assert!((0.0..=PI).contains(&canon.theta()));
        assert!((0.0..TAU).contains(&canon.phi()));
        assert!(raw.unitary().max_abs_diff(&canon.unitary()) < 1e-15);
        let canon = PulseParams::new(0.7, 4.0, -1.0);
        let raw = PulseParams { chi: 0.7, theta: 4.0, phi: -1.0 };
        assert!(raw.unitary().max_abs_diff(&canon.unitary()) < 1e-15);
    }

    #[test]
    fn plan_validation() {
        let z = PulseParams::zero();
        assert!(PreparationPlan::new(1.0, -1.0, z, z).is_err());
        assert!(PreparationPlan::new(f64::NAN, 1.0, z, z).is_err());
        assert!(PreparationPlan::new(0.0, 1.0, z, z).is_ok());
    }

    #[test]
    fn trivial_plan_leaves_initial_state() {
        let z = PulseParams::zero();
        let plan = PreparationPlan::new(1.0, 0.0, z, z).unwrap();
        assert_eq!(prepare(&plan), TwoQubitState::up_down());
    }
}
