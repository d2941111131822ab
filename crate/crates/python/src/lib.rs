//! Python bindings: `import pyspinprep`.

use num_complex::Complex64 as C64;
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spinprep::donor::{self, FieldConfig};
use spinprep::{entangler, gate_fidelity, schmidt, Error};

create_exception!(pyspinprep, SynthesisError, PyRuntimeError);

fn to_py(err: Error) -> PyErr {
    match err {
        Error::SynthesisFailed { residual_fidelity, .. } => {
            SynthesisError::new_err(format!("synthesis failed; best fidelity {residual_fidelity:e}"))
        }
        Error::Domain(_) | Error::NonFinite(_) | Error::NonHermitian { .. } | Error::NonUnitary { .. } => {
            PyArithmeticError::new_err(err.to_string())
        }
        Error::Io(_) => PyOSError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

#[pyclass(name = "TwoQubitState", module = "pyspinprep", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyState(spinprep::TwoQubitState);

#[pymethods]
impl PyState {
    /// Amplitudes in the order ↑↑, ↑↓, ↓↑, ↓↓; must have unit norm.
    #[new]
    fn new(amplitudes: [C64; 4]) -> PyResult<Self> {
        spinprep::TwoQubitState::new(amplitudes).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn normalized(amplitudes: [C64; 4]) -> PyResult<Self> {
        spinprep::TwoQubitState::normalized(amplitudes).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn up_down() -> Self {
        Self(spinprep::TwoQubitState::up_down())
    }

    #[staticmethod]
    fn triplet_zero() -> Self {
        Self(spinprep::TwoQubitState::triplet_zero())
    }

    #[staticmethod]
    fn singlet() -> Self {
        Self(spinprep::TwoQubitState::singlet())
    }

    /// Haar-random state from a seeded generator.
    #[staticmethod]
    fn random(seed: u64) -> Self {
        Self(spinprep::TwoQubitState::random(&mut ChaCha8Rng::seed_from_u64(seed)))
    }

    #[getter]
    fn amplitudes(&self) -> Vec<C64> {
        self.0.amplitudes().to_vec()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn inner(&self, other: &PyState) -> C64 {
        self.0.inner(&other.0)
    }

    /// `|⟨self|other⟩|²`.
    fn fidelity(&self, other: &PyState) -> f64 {
        schmidt::fidelity_states(&self.0, &other.0)
    }

    fn __repr__(&self) -> String {
        let a = self.0.amplitudes();
        format!("TwoQubitState([{}, {}, {}, {}])", a[0], a[1], a[2], a[3])
    }
}

#[pyclass(name = "PulseParams", module = "pyspinprep", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPulse(spinprep::PulseParams);

#[pymethods]
impl PyPulse {
    #[new]
    #[pyo3(signature = (chi, theta = 0.0, phi = 0.0))]
    fn new(chi: f64, theta: f64, phi: f64) -> Self {
        Self(spinprep::PulseParams::new(chi, theta, phi))
    }

    #[getter]
    fn chi(&self) -> f64 {
        self.0.chi()
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta()
    }

    #[getter]
    fn phi(&self) -> f64 {
        self.0.phi()
    }

    fn __repr__(&self) -> String {
        format!("PulseParams(chi={}, theta={}, phi={})", self.0.chi(), self.0.theta(), self.0.phi())
    }
}

#[pyclass(name = "PreparationPlan", module = "pyspinprep", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPlan(spinprep::PreparationPlan);

#[pymethods]
impl PyPlan {
    #[new]
    fn new(coupling_a: f64, t1: f64, pulse1: &PyPulse, pulse2: &PyPulse) -> PyResult<Self> {
        spinprep::PreparationPlan::new(coupling_a, t1, pulse1.0, pulse2.0)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn coupling_a(&self) -> f64 {
        self.0.coupling_a()
    }

    #[getter]
    fn t1(&self) -> f64 {
        self.0.t1()
    }

    #[getter]
    fn pulse1(&self) -> PyPulse {
        PyPulse(self.0.pulse1())
    }

    #[getter]
    fn pulse2(&self) -> PyPulse {
        PyPulse(self.0.pulse2())
    }

    fn __repr__(&self) -> String {
        format!("PreparationPlan(coupling_a={}, t1={}, ...)", self.0.coupling_a(), self.0.t1())
    }
}

#[pyclass(name = "SchmidtForm", module = "pyspinprep", frozen, get_all)]
struct PySchmidt {
    c1: f64,
    c2: f64,
    alpha: Vec<[C64; 2]>,
    beta: Vec<[C64; 2]>,
}

#[pyclass(name = "SynthesisResult", module = "pyspinprep", frozen, get_all)]
struct PySynthesis {
    plan: PyPlan,
    global_phase: f64,
    residual_fidelity: f64,
    used_fallback: bool,
}

#[pyclass(name = "DonorParams", module = "pyspinprep", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDonor(donor::DonorParams);

#[pymethods]
impl PyDonor {
    /// Rates in s⁻¹ T⁻¹ and s⁻¹.
    #[new]
    fn new(gamma_e: f64, gamma_n: f64, hyperfine_a: f64) -> PyResult<Self> {
        donor::DonorParams::new(gamma_e, gamma_n, hyperfine_a).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn phosphorus31() -> Self {
        Self(donor::DonorParams::phosphorus31())
    }

    #[getter]
    fn gamma_e(&self) -> f64 {
        self.0.gamma_e
    }

    #[getter]
    fn gamma_n(&self) -> f64 {
        self.0.gamma_n
    }

    #[getter]
    fn hyperfine_a(&self) -> f64 {
        self.0.hyperfine_a
    }

    fn __repr__(&self) -> String {
        format!(
            "DonorParams(gamma_e={}, gamma_n={}, hyperfine_a={})",
            self.0.gamma_e, self.0.gamma_n, self.0.hyperfine_a
        )
    }
}

#[pyclass(name = "EntanglerSpec", module = "pyspinprep", frozen, get_all)]
struct PyEntangler {
    chi: f64,
    bz: f64,
    t: f64,
    concurrence: f64,
    conditions_met: bool,
}

#[pyfunction]
fn prepare(plan: &PyPlan) -> PyState {
    PyState(spinprep::prepare(&plan.0))
}

#[pyfunction]
fn synthesize(target: &PyState, coupling_a: f64) -> PyResult<PySynthesis> {
    let r = spinprep::synthesize(&target.0, coupling_a).map_err(to_py)?;
    Ok(PySynthesis {
        plan: PyPlan(r.plan),
        global_phase: r.global_phase,
        residual_fidelity: r.residual_fidelity,
        used_fallback: r.used_fallback,
    })
}

#[pyfunction]
fn decompose(state: &PyState) -> PyResult<PySchmidt> {
    let f = spinprep::decompose(&state.0).map_err(to_py)?;
    Ok(PySchmidt {
        c1: f.c1,
        c2: f.c2,
        alpha: f.alpha.iter().map(|v| *v.amplitudes()).collect(),
        beta: f.beta.iter().map(|v| *v.amplitudes()).collect(),
    })
}

#[pyfunction]
fn concurrence(state: &PyState) -> f64 {
    entangler::concurrence(&state.0)
}

/// Field (T) and time (s) reaching `(|↑↓⟩ + e^{iχ}|↓↑⟩)/√2`.
#[pyfunction]
#[pyo3(signature = (donor, chi, branch = 0))]
fn solve_entangler(donor: &PyDonor, chi: f64, branch: u32) -> PyResult<PyEntangler> {
    let spec = entangler::solve_entangler_branch(&donor.0, chi, branch).map_err(to_py)?;
    let report = entangler::verify_entangling_conditions(&donor.0, &spec);
    Ok(PyEntangler {
        chi: spec.chi,
        bz: spec.bz,
        t: spec.t,
        concurrence: report.concurrence,
        conditions_met: report.conditions_met,
    })
}

#[pyfunction]
fn fidelity_analytic(donor: &PyDonor, t: f64) -> f64 {
    gate_fidelity::fidelity_analytic(&donor.0, t)
}

/// `[(t, F), ...]` on `[0, t_max]`, endpoints included.
#[pyfunction]
#[pyo3(signature = (donor, t_max = gate_fidelity::DEFAULT_T_MAX, n = gate_fidelity::DEFAULT_POINTS))]
fn fidelity_curve(donor: &PyDonor, t_max: f64, n: usize) -> PyResult<Vec<(f64, f64)>> {
    gate_fidelity::fidelity_curve(&donor.0, t_max, n)
        .map(|c| c.samples)
        .map_err(to_py)
}

#[pyfunction]
fn entangling_field(donor: &PyDonor) -> f64 {
    gate_fidelity::entangling_field(&donor.0)
}

#[pyfunction]
fn entangling_time(donor: &PyDonor) -> f64 {
    gate_fidelity::entangling_time(&donor.0)
}

/// The entangling gate as a 4×4 nested list.
#[pyfunction]
fn gate_w(donor: &PyDonor) -> Vec<[C64; 4]> {
    gate_fidelity::gate_w(&donor.0).0.to_vec()
}

/// `(energies, eta)` for field `b` (T) along `(theta, phi)`.
#[pyfunction]
#[pyo3(signature = (donor, b, theta = 0.0, phi = 0.0))]
fn spectrum(donor: &PyDonor, b: f64, theta: f64, phi: f64) -> PyResult<([f64; 4], f64)> {
    let f = FieldConfig::new(b, theta, phi).map_err(to_py)?;
    let s = donor::spectrum(&donor.0, &f);
    Ok((s.energies, s.eta))
}

#[pymodule]
fn pyspinprep(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyPulse>()?;
    m.add_class::<PyPlan>()?;
    m.add_class::<PySchmidt>()?;
    m.add_class::<PySynthesis>()?;
    m.add_class::<PyDonor>()?;
    m.add_class::<PyEntangler>()?;
    m.add("SynthesisError", m.py().get_type::<SynthesisError>())?;
    m.add_function(wrap_pyfunction!(prepare, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(solve_entangler, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_curve, m)?)?;
    m.add_function(wrap_pyfunction!(entangling_field, m)?)?;
    m.add_function(wrap_pyfunction!(entangling_time, m)?)?;
    m.add_function(wrap_pyfunction!(gate_w, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    Ok(())
}
