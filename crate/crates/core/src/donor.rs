//! Electron–nuclear spin pair with contact hyperfine coupling in a uniform
//! magnetic field: `H = γₑB S·n − γₙB I·n + A S·I`.
//!
//! The electron is the first tensor slot, the nucleus the second.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{on_first, on_second, pauli, Axis, Matrix4, I, ONE, ZERO};
use crate::state::{SingleQubitState, TwoQubitState};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DonorParams {
    /// Electron gyromagnetic ratio, s⁻¹ T⁻¹.
    pub gamma_e: f64,
    /// Nuclear gyromagnetic ratio, s⁻¹ T⁻¹.
    pub gamma_n: f64,
    /// Hyperfine coupling, s⁻¹.
    pub hyperfine_a: f64,
}

impl DonorParams {
    pub fn new(gamma_e: f64, gamma_n: f64, hyperfine_a: f64) -> Result<Self> {
        if !(gamma_e.is_finite() && gamma_n.is_finite() && hyperfine_a.is_finite()) {
            return Err(Error::NonFinite("donor parameters"));
        }
        Ok(Self { gamma_e, gamma_n, hyperfine_a })
    }

    /// ³¹P donor in silicon from the built-in constants registry.
    pub fn phosphorus31() -> Self {
        crate::constants::Registry::builtin()
            .donor_preset("P31")
            .expect("built-in P31 preset")
    }

    pub fn gamma_sum(&self) -> f64 {
        self.gamma_e + self.gamma_n
    }

    pub fn gamma_diff(&self) -> f64 {
        self.gamma_e - self.gamma_n
    }
}

/// Field magnitude and direction `n = (sinθ cosφ, sinθ sinφ, cosθ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    b: f64,
    theta: f64,
    phi: f64,
}

impl FieldConfig {
    pub fn new(b: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(b.is_finite() && theta.is_finite() && phi.is_finite()) {
            return Err(Error::NonFinite("field"));
        }
        if b < 0.0 {
            return Err(Error::InvalidParameter(format!("field magnitude must be >= 0, got {b}")));
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!("theta must lie in [0, pi], got {theta}")));
        }
        Ok(Self { b, theta, phi: phi.rem_euclid(TAU) })
    }

    pub fn along_z(b: f64) -> Result<Self> {
        Self::new(b, 0.0, 0.0)
    }

    pub fn b(&self) -> f64 {
        self.b
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
}

/// Frequencies of the z-field problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedFrequencies {
    /// `(γₑ + γₙ)B_z / 2`
    pub omega_minus: f64,
    /// `(γₑ − γₙ)B_z / 2`
    pub omega_plus: f64,
    /// `√(ω₋² + (A/2)²)`
    pub omega: f64,
    /// Mixing angle, `tan η = A / ((γₑ + γₙ)B)`.
    pub eta: f64,
}

impl DerivedFrequencies {
    pub fn new(d: &DonorParams, bz: f64) -> Self {
        let omega_minus = 0.5 * d.gamma_sum() * bz;
        Self {
            omega_minus,
            omega_plus: 0.5 * d.gamma_diff() * bz,
            omega: omega_minus.hypot(0.5 * d.hyperfine_a),
            eta: mixing_angle(d, bz),
        }
    }
}

/// `η = atan2(A, (γₑ + γₙ)B)`, equal to `π/2` at zero field.
pub fn mixing_angle(d: &DonorParams, b: f64) -> f64 {
    d.hyperfine_a.atan2(d.gamma_sum() * b)
}

fn spin_op(axis: Axis) -> crate::qmath::Matrix2 {
    pauli(axis).scale_re(0.5)
}

/// `S·I` with `S = σ/2` on the electron and `I = σ/2` on the nucleus.
pub fn s_dot_i() -> Matrix4 {
    Axis::ALL
        .iter()
        .map(|&ax| on_first(&spin_op(ax)) * on_second(&spin_op(ax)))
        .fold(Matrix4::zeros(), |acc, m| acc + m)
}

fn spin_along(n: [f64; 3]) -> crate::qmath::Matrix2 {
    spin_op(Axis::X).scale_re(n[0]) + spin_op(Axis::Y).scale_re(n[1]) + spin_op(Axis::Z).scale_re(n[2])
}

/// Full hamiltonian `γₑB S·n − γₙB I·n + A S·I`.
pub fn hamiltonian_full(d: &DonorParams, f: &FieldConfig) -> Matrix4 {
    let sn = spin_along(f.direction());
    on_first(&sn).scale_re(d.gamma_e * f.b)
        - on_second(&sn).scale_re(d.gamma_n * f.b)
        + s_dot_i().scale_re(d.hyperfine_a)
}

/// Hamiltonian for a field along `z` with signed component `bz`.
pub fn hamiltonian_z(d: &DonorParams, bz: f64) -> Matrix4 {
    let sz = spin_op(Axis::Z);
    on_first(&sz).scale_re(d.gamma_e * bz) - on_second(&sz).scale_re(d.gamma_n * bz)
        + s_dot_i().scale_re(d.hyperfine_a)
}

/// Commuting pieces `(H_xy, H_zz, H_+)` of the z-field hamiltonian.
pub fn split_hamiltonian(d: &DonorParams, bz: f64) -> (Matrix4, Matrix4, Matrix4) {
    let freq = DerivedFrequencies::new(d, bz);
    let a = d.hyperfine_a;
    let sz = on_first(&spin_op(Axis::Z));
    let iz = on_second(&spin_op(Axis::Z));
    let flip_flop = on_first(&spin_op(Axis::X)) * on_second(&spin_op(Axis::X))
        + on_first(&spin_op(Axis::Y)) * on_second(&spin_op(Axis::Y));
    let h_xy = (sz - iz).scale_re(freq.omega_minus) + flip_flop.scale_re(a);
    let h_zz = (sz * iz).scale_re(a);
    let h_plus = (sz + iz).scale_re(freq.omega_plus);
    (h_xy, h_zz, h_plus)
}

/// Dressed single-spin basis along `n(θ, φ)`:
/// `|+⟩ = cos(θ/2)|↑⟩ + sin(θ/2)e^{iφ}|↓⟩`, `|−⟩ = −sin(θ/2)|↑⟩ + cos(θ/2)e^{iφ}|↓⟩`.
pub fn dressed_basis(theta: f64, phi: f64) -> (SingleQubitState, SingleQubitState) {
    let (s, c) = (0.5 * theta).sin_cos();
    let e = C64::from_polar(1.0, phi);
    (
        SingleQubitState::new(C64::new(c, 0.0), e * s),
        SingleQubitState::new(C64::new(-s, 0.0), e * c),
    )
}

/// Energies and eigenvectors in the fixed labeling
/// `|++⟩, cos(η/2)|+−⟩ + sin(η/2)|−+⟩, −sin(η/2)|+−⟩ + cos(η/2)|−+⟩, |−−⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spectrum {
    pub energies: [f64; 4],
    pub eigenvectors: [TwoQubitState; 4],
    pub eta: f64,
}

impl Spectrum {
    /// Largest `‖Hψₖ − Eₖψₖ‖_∞` against the given hamiltonian.
    pub fn eigen_residual(&self, h: &Matrix4) -> f64 {
        self.energies
            .iter()
            .zip(self.eigenvectors.iter())
            .map(|(e, v)| v.evolve(h).max_abs_diff(&v.scaled(C64::new(*e, 0.0))))
            .fold(0.0, f64::max)
    }

    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((self.eigenvectors[i].inner(&self.eigenvectors[j]) - target).norm());
            }
        }
        worst
    }

    /// `E₂ − E₃ = √((γₑB + γₙB)² + A²)`.
    pub fn splitting(&self) -> f64 {
        self.energies[1] - self.energies[2]
    }
}

/// Closed-form spectrum of [`hamiltonian_full`].
pub fn spectrum(d: &DonorParams, f: &FieldConfig) -> Spectrum {
    let (ge, gn, a, b) = (d.gamma_e, d.gamma_n, d.hyperfine_a, f.b);
    let root = 0.5 * (d.gamma_sum() * b).hypot(a);
    let energies = [
        0.5 * ge * b - 0.5 * gn * b + 0.25 * a,
        root - 0.25 * a,
        -root - 0.25 * a,
        -0.5 * ge * b + 0.5 * gn * b + 0.25 * a,
    ];
    let eta = mixing_angle(d, b);
    let (plus, minus) = dressed_basis(f.theta, f.phi);
    let pp = TwoQubitState::product(&plus, &plus);
    let pm = TwoQubitState::product(&plus, &minus);
    let mp = TwoQubitState::product(&minus, &plus);
    let mm = TwoQubitState::product(&minus, &minus);
    let (s, c) = (0.5 * eta).sin_cos();
    let mix = |x: f64, y: f64| {
        TwoQubitState::from_evolution(std::array::from_fn(|k| pm.amplitude(k) * x + mp.amplitude(k) * y))
    };
    Spectrum {
        energies,
        eigenvectors: [pp, mix(c, s), mix(-s, c), mm],
        eta,
    }
}

/// Strong-field energies of `|++⟩, |+−⟩, |−+⟩, |−−⟩` (mixing neglected).
pub fn strong_field_energies(d: &DonorParams, b: f64) -> [f64; 4] {
    let (ge, gn, a) = (d.gamma_e * b, d.gamma_n * b, d.hyperfine_a);
    [
        0.5 * ge - 0.5 * gn + 0.25 * a,
        0.5 * ge + 0.5 * gn - 0.25 * a,
        -0.5 * ge - 0.5 * gn - 0.25 * a,
        -0.5 * ge + 0.5 * gn + 0.25 * a,
    ]
}

/// `sin(w t) / w`, with the `w → 0` limit.
fn sin_over(w: f64, t: f64) -> f64 {
    if w == 0.0 {
        t
    } else {
        (w * t).sin() / w
    }
}

/// Diagonal factor `U₁` carrying the `|↑↑⟩`, `|↓↓⟩` phases.
pub fn propagator_u1(d: &DonorParams, bz: f64, t: f64) -> Matrix4 {
    let f = DerivedFrequencies::new(d, bz);
    let q = 0.25 * d.hyperfine_a;
    Matrix4::from_diagonal([
        C64::from_polar(1.0, -(f.omega_plus + q) * t),
        ONE,
        ONE,
        C64::from_polar(1.0, (f.omega_plus - q) * t),
    ])
}

/// Factor `U₂` acting on the `{|↑↓⟩, |↓↑⟩}` block.
pub fn propagator_u2(d: &DonorParams, bz: f64, t: f64) -> Matrix4 {
    let f = DerivedFrequencies::new(d, bz);
    let (s_over, c) = (sin_over(f.omega, t), (f.omega * t).cos());
    let phase = C64::from_polar(1.0, 0.25 * d.hyperfine_a * t);
    let off = -I * (0.5 * d.hyperfine_a * s_over) * phase;
    let mut u = Matrix4::identity();
    u.0[1][1] = C64::new(c, -f.omega_minus * s_over) * phase;
    u.0[1][2] = off;
    u.0[2][1] = off;
    u.0[2][2] = C64::new(c, f.omega_minus * s_over) * phase;
    u
}

/// `U(t) = U₁U₂` for a field along `z`.
pub fn split_propagator(d: &DonorParams, bz: f64, t: f64) -> Matrix4 {
    propagator_u1(d, bz, t) * propagator_u2(d, bz, t)
}

/// `U(t) = e^{−iH_xy t} e^{−iH_zz t} e^{−iH_+ t}` from the operator identities
/// `H_xy² = Ω²P`, `H_zz² = (A/4)²`, `H_+² = ω₊²Q` with `P = ½ − 2SzIz`, `Q = ½ + 2SzIz`.
pub fn split_propagator_factored(d: &DonorParams, bz: f64, t: f64) -> Matrix4 {
    let f = DerivedFrequencies::new(d, bz);
    let (h_xy, h_zz, h_plus) = split_hamiltonian(d, bz);
    let one = Matrix4::identity();
    let szi = on_first(&spin_op(Axis::Z)) * on_second(&spin_op(Axis::Z));
    let p = one.scale_re(0.5) - szi.scale_re(2.0);
    let q = one.scale_re(0.5) + szi.scale_re(2.0);

    let u_xy = one + p.scale_re((f.omega * t).cos() - 1.0) - h_xy.scale(I * sin_over(f.omega, t));
    let quarter = 0.25 * d.hyperfine_a;
    let u_zz = one.scale_re((quarter * t).cos()) - h_zz.scale(I * sin_over(quarter, t));
    let u_plus =
        one + q.scale_re((f.omega_plus * t).cos() - 1.0) - h_plus.scale(I * sin_over(f.omega_plus, t));
    u_xy * u_zz * u_plus
}

/// `U(t)|+−⟩` for dressed states along `(θ, φ)` evolved in a z field,
/// written out amplitude by amplitude.
pub fn evolve_from_plus_minus(d: &DonorParams, init_angles: (f64, f64), bz: f64, t: f64) -> TwoQubitState {
    let (theta, phi) = init_angles;
    let f = DerivedFrequencies::new(d, bz);
    let a = d.hyperfine_a;
    let (sh, ch) = (0.5 * theta).sin_cos();
    let (s2, c2) = (sh * sh, ch * ch);
    let (sin_wt, cos_wt) = (f.omega * t).sin_cos();
    let (ratio_a, ratio_m) = if f.omega == 0.0 {
        (0.0, 0.0)
    } else {
        (a / (2.0 * f.omega), f.omega_minus / f.omega)
    };
    let e = |x: f64| C64::from_polar(1.0, x);
    let e_i_pi = C64::new(-1.0, 0.0);

    let uu = e(-f.omega_plus * t) * e(-0.25 * a * t) * e_i_pi * (ch * sh);
    let ud = e(0.25 * a * t) * e(phi) * C64::new(cos_wt * c2, (ratio_a * s2 - ratio_m * c2) * sin_wt);
    let du = e(0.25 * a * t) * e(phi) * e_i_pi * C64::new(cos_wt * s2, (ratio_a * c2 + ratio_m * s2) * sin_wt);
    let dd = e(f.omega_plus * t) * e(-0.25 * a * t) * e(2.0 * phi) * (ch * sh);
    TwoQubitState::from_evolution([uu, ud, du, dd])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::expm_oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn unit_donor() -> DonorParams {
        DonorParams::new(2.0, 0.5, 1.0).unwrap()
    }

    #[test]
    fn zero_field_hamiltonian_is_pure_hyperfine() {
        let d = unit_donor();
        let h = hamiltonian_full(&d, &FieldConfig::new(0.0, 0.3, 1.0).unwrap());
        // A S·I: triplet at A/4, singlet at −3A/4
        for s in [TwoQubitState::up_up(), TwoQubitState::triplet_zero(), TwoQubitState::down_down()] {
            assert!(s.evolve(&h).max_abs_diff(&s.scaled(C64::new(0.25, 0.0))) < 1e-15);
        }
        let s = TwoQubitState::singlet();
        assert!(s.evolve(&h).max_abs_diff(&s.scaled(C64::new(-0.75, 0.0))) < 1e-15);
    }

    #[test]
    fn z_field_hamiltonian_splits() {
        let d = unit_donor();
        let (a, b, c) = split_hamiltonian(&d, 0.7);
        let h = hamiltonian_z(&d, 0.7);
        assert!((a + b + c).max_abs_diff(&h) < 1e-15);
        assert!(hamiltonian_full(&d, &FieldConfig::along_z(0.7).unwrap()).max_abs_diff(&h) < 1e-15);
        assert!(a.commutator(&b).max_abs() < 1e-15);
        assert!(a.commutator(&c).max_abs() < 1e-15);
        assert!(b.commutator(&c).max_abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let d = DonorParams::new(rng.random_range(0.0..5.0), rng.random_range(0.0..5.0), rng.random_range(-3.0..3.0)).unwrap();
            let f = FieldConfig::new(rng.random_range(0.0..2.0), rng.random_range(0.0..PI), rng.random_range(0.0..TAU)).unwrap();
            assert!(hamiltonian_full(&d, &f).hermiticity_residual() <= 1e-15);
        }
    }

    #[test]
    fn field_validation() {
        assert!(FieldConfig::new(-1.0, 0.0, 0.0).is_err());
        assert!(FieldConfig::new(1.0, 4.0, 0.0).is_err());
        let f = FieldConfig::new(1.0, 1.0, 7.0).unwrap();
        assert!((f.phi() - (7.0 - TAU)).abs() < 1e-15);
        let n = f.direction();
        assert!(((n[0] * n[0] + n[1] * n[1] + n[2] * n[2]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spectrum_examples() {
        let d = unit_donor();
        let f = FieldConfig::new(0.8, 0.4, 2.0).unwrap();
        let sp = spectrum(&d, &f);
        let expected = ((d.gamma_sum() * 0.8).powi(2) + 1.0).sqrt();
        assert!((sp.splitting() - expected).abs() < 1e-14);
        assert!(sp.eigen_residual(&hamiltonian_full(&d, &f)) < 1e-14);
        assert!(sp.orthonormality_residual() < 1e-14);

        let f0 = FieldConfig::new(0.0, 0.0, 0.0).unwrap();
        let sp = spectrum(&d, &f0);
        assert!((sp.eta - FRAC_PI_2).abs() < 1e-15);
        assert!(sp.eigenvectors[1].max_abs_diff(&TwoQubitState::triplet_zero()) < 1e-15);
    }

    #[test]
    fn strong_field_limit() {
        let d = DonorParams::phosphorus31();
        for b in [0.1, 1.0, 10.0] {
            let f = FieldConfig::along_z(b).unwrap();
            let exact = spectrum(&d, &f).energies;
            let approx = strong_field_energies(&d, b);
            let bound = d.hyperfine_a.powi(2) / (d.gamma_sum() * b);
            for k in 0..4 {
                assert!((exact[k] - approx[k]).abs() <= bound, "level {k} at B = {b}");
            }
        }
    }

    #[test]
    fn dressed_basis_examples() {
        let (p, m) = dressed_basis(0.0, 1.3);
        assert!((p.inner(&SingleQubitState::up()).norm() - 1.0).abs() < 1e-15);
        assert!((m.inner(&SingleQubitState::down()).norm() - 1.0).abs() < 1e-15);
        let (p, m) = dressed_basis(FRAC_PI_2, 0.0);
        let h = FRAC_1_SQRT_2;
        assert!((p.0[0] - C64::new(h, 0.0)).norm() < 1e-15 && (p.0[1] - C64::new(h, 0.0)).norm() < 1e-15);
        assert!((m.0[0] + C64::new(h, 0.0)).norm() < 1e-15 && (m.0[1] - C64::new(h, 0.0)).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..100 {
            let (p, m) = dressed_basis(rng.random_range(0.0..PI), rng.random_range(0.0..TAU));
            assert!(p.inner(&m).norm() < 1e-15);
        }
    }

    #[test]
    fn split_propagator_examples() {
        let d = unit_donor();
        assert!(split_propagator(&d, 0.3, 0.0).max_abs_diff(&Matrix4::identity()) < 1e-15);
        // zero field, A = 1: Ω = 1/2, the middle block swaps |↑↓⟩ ↔ |↓↑⟩ at Ωt = π/2
        let u = split_propagator(&d, 0.0, PI);
        let psi = TwoQubitState::up_down().evolve(&u);
        assert!(psi.amplitude(1).norm() < 1e-15);
        assert!((psi.amplitude(2).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn split_propagator_three_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..300 {
            let d = DonorParams::new(rng.random_range(0.1..5.0), rng.random_range(0.0..2.0), rng.random_range(-3.0..3.0)).unwrap();
            let bz = rng.random_range(-2.0..2.0);
            let t = rng.random_range(0.0..5.0);
            let matrix = split_propagator(&d, bz, t);
            let factored = split_propagator_factored(&d, bz, t);
            let oracle = expm_oracle(&hamiltonian_z(&d, bz), t).unwrap();
            assert!(matrix.max_abs_diff(&factored) <= 1e-12);
            assert!(matrix.max_abs_diff(&oracle) <= 1e-10);
            let (u1, u2) = (propagator_u1(&d, bz, t), propagator_u2(&d, bz, t));
            assert!(u1.commutator(&u2).max_abs() <= 1e-12);
        }
    }

    #[test]
    fn split_propagator_handles_zero_frequencies() {
        let d = DonorParams::new(1.0, 1.0, 0.0).unwrap();
        let oracle = expm_oracle(&hamiltonian_z(&d, 0.0), 2.0).unwrap();
        assert!(split_propagator(&d, 0.0, 2.0).max_abs_diff(&oracle) < 1e-15);
        assert!(split_propagator_factored(&d, 0.0, 2.0).max_abs_diff(&oracle) < 1e-15);
        let d = DonorParams::new(1.0, 1.0, 1.0).unwrap();
        let oracle = expm_oracle(&hamiltonian_z(&d, 0.0), 2.0).unwrap();
        assert!(split_propagator_factored(&d, 0.0, 2.0).max_abs_diff(&oracle) < 1e-13);
    }

    #[test]
    fn evolution_from_plus_minus() {
        let d = unit_donor();
        let (p, m) = dressed_basis(PI / 3.0, PI / 5.0);
        let start = TwoQubitState::product(&p, &m);
        assert!(evolve_from_plus_minus(&d, (PI / 3.0, PI / 5.0), 0.4, 0.0).max_abs_diff(&start) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..200 {
            let (th, ph) = (rng.random_range(0.0..PI), rng.random_range(0.0..TAU));
            let (bz, t) = (rng.random_range(-2.0..2.0), rng.random_range(0.0..10.0));
            let (p, m) = dressed_basis(th, ph);
            let via_matrix = TwoQubitState::product(&p, &m).evolve(&split_propagator(&d, bz, t));
            let closed = evolve_from_plus_minus(&d, (th, ph), bz, t);
            assert!(via_matrix.max_abs_diff(&closed) < 1e-12);
        }
    }

    #[test]
    fn conserved_quantities() {
        let d = DonorParams::phosphorus31();
        let bz = 3e-3;
        let h = hamiltonian_z(&d, bz);
        let (th, ph) = (0.7, 1.1);
        let e0 = evolve_from_plus_minus(&d, (th, ph), bz, 0.0);
        let energy0 = e0.expectation(&h);
        for k in 0..100 {
            let t = k as f64 * 1e-9;
            let psi = evolve_from_plus_minus(&d, (th, ph), bz, t);
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            assert!((psi.expectation(&h) - energy0).abs() <= 1e-10 * h.max_abs());
            assert!((psi.amplitude(0).norm() - e0.amplitude(0).norm()).abs() < 1e-15);
            assert!((psi.amplitude(3).norm() - e0.amplitude(3).norm()).abs() < 1e-15);
        }
    }
}
