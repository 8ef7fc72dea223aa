//! Python bindings: particles, momentum amplitudes and their transformations,
//! position amplitudes, the covariant builders and the causality scan.

use nalgebra::{Vector2, Vector3};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyNotImplementedError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use relamp::amplitudes::{self, CovariantAmplitude, IntrinsicParity, MomentumAmplitude, ParticleSpec};
use relamp::causality::{self, EvaluationPath, ScaledPacket};
use relamp::covariant;
use relamp::fourier::GridSpec;
use relamp::kinematics::{self, FourVector, MassShellMomentum, RotationMatrix, Velocity3};
use relamp::poincare::{self, PoincareElement};
use relamp::position::{self, PositionAmplitude};
use relamp::spin::SpinValue;
use relamp::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::Superluminal(_) | Error::Domain(_) | Error::Usage(_) | Error::Data(_) | Error::PacketTooWide { .. } => {
            PyValueError::new_err(e.to_string())
        }
        Error::Unsupported(_) => PyNotImplementedError::new_err(e.to_string()),
        Error::Quadrature { .. } | Error::DivergingRatio(_) | Error::NotARotation { .. } => {
            PyArithmeticError::new_err(e.to_string())
        }
        Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
    }
}

fn vec3(v: [f64; 3]) -> Vector3<f64> {
    Vector3::from(v)
}

fn velocity(beta: [f64; 3]) -> PyResult<Velocity3> {
    Velocity3::new(vec3(beta)).map_err(err)
}

/// Particle of mass m0, spin two_s/2 and intrinsic parity ±1.
#[pyclass(name = "Particle", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyParticle(ParticleSpec);

#[pymethods]
impl PyParticle {
    #[new]
    #[pyo3(signature = (m0, two_s = 0, eta = 1))]
    fn new(m0: f64, two_s: u32, eta: i32) -> PyResult<Self> {
        let eta = IntrinsicParity::try_from(eta).map_err(err)?;
        Ok(Self(ParticleSpec::new(m0, SpinValue::new(two_s), eta).map_err(err)?))
    }

    #[getter]
    fn m0(&self) -> f64 {
        self.0.m0()
    }

    #[getter]
    fn two_s(&self) -> u32 {
        self.0.spin().two_s()
    }

    #[getter]
    fn eta(&self) -> i32 {
        self.0.eta().into()
    }

    fn __repr__(&self) -> String {
        format!("Particle(m0={}, two_s={}, eta={})", self.m0(), self.two_s(), self.eta())
    }
}

/// Momentum-space amplitude Ψ_m(p), analytic or sampled on a grid.
#[pyclass(name = "Amplitude", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyAmplitude(MomentumAmplitude);

#[pymethods]
impl PyAmplitude {
    /// Gaussian packet; weights default to (1, 0, …).
    #[staticmethod]
    #[pyo3(signature = (particle, p_bar, sigma_p, x_bar = [0.0; 3], weights = None))]
    fn gaussian(
        particle: &PyParticle,
        p_bar: [f64; 3],
        sigma_p: f64,
        x_bar: [f64; 3],
        weights: Option<Vec<Complex64>>,
    ) -> PyResult<Self> {
        let dim = particle.0.spin().dim();
        let w = weights.unwrap_or_else(|| {
            (0..dim).map(|i| Complex64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)).collect()
        });
        MomentumAmplitude::gaussian(particle.0, vec3(p_bar), sigma_p, vec3(x_bar), w).map(Self).map_err(err)
    }

    #[getter]
    fn particle(&self) -> PyParticle {
        PyParticle(*self.0.particle())
    }

    #[getter]
    fn is_grid(&self) -> bool {
        self.0.is_grid()
    }

    fn sample_to_grid(&self, n: usize, pmax: f64) -> PyResult<Self> {
        let spec = GridSpec::new(n, pmax).map_err(err)?;
        self.0.sample_to_grid(spec).map(Self).map_err(err)
    }

    /// Components at momentum p (grid carriers answer at grid points only).
    fn eval(&self, p: [f64; 3]) -> PyResult<Vec<Complex64>> {
        self.0.eval(&vec3(p)).map_err(err)
    }

    fn norm_squared(&self) -> PyResult<f64> {
        amplitudes::norm_squared(&self.0).map_err(err)
    }

    /// ⟨self|other⟩.
    fn scalar_product(&self, other: &PyAmplitude) -> PyResult<Complex64> {
        amplitudes::scalar_product(&self.0, &other.0).map_err(err)
    }

    /// ⟨P^μ⟩ as [E, px, py, pz].
    fn four_momentum(&self) -> PyResult<[f64; 4]> {
        Ok(amplitudes::expectation_four_momentum(&self.0).map_err(err)?.as_array())
    }

    fn scalar_density(&self, p: [f64; 3]) -> PyResult<f64> {
        amplitudes::scalar_density(&self.0).at(&vec3(p)).map_err(err)
    }

    fn translate(&self, a: [f64; 4]) -> PyResult<Self> {
        poincare::translate(&self.0, &FourVector::new(a[0], a[1], a[2], a[3])).map(Self).map_err(err)
    }

    fn rotate(&self, axis: [f64; 3], angle: f64) -> PyResult<Self> {
        let r = RotationMatrix::from_axis_angle(vec3(axis), angle).map_err(err)?;
        poincare::rotate(&self.0, &r).map(Self).map_err(err)
    }

    fn boost(&self, beta: [f64; 3]) -> PyResult<Self> {
        poincare::boost(&self.0, &velocity(beta)?).map(Self).map_err(err)
    }

    /// Boost, also returning the probability pushed out of a grid box.
    fn boost_with_report(&self, beta: [f64; 3]) -> PyResult<(Self, f64)> {
        let r = poincare::boost_with_report(&self.0, &velocity(beta)?).map_err(err)?;
        Ok((Self(r.amplitude), r.lost_mass))
    }

    fn parity(&self) -> PyResult<Self> {
        poincare::apply(&self.0, &PoincareElement::Parity).map(Self).map_err(err)
    }

    fn time_reverse(&self) -> PyResult<Self> {
        poincare::apply(&self.0, &PoincareElement::TimeReversal).map(Self).map_err(err)
    }

    /// Position amplitude ψ(t, x) on the carrier's grid (or the default one).
    fn to_position(&self, t: f64) -> PyResult<PyPosition> {
        position::to_position(&self.0, t).map(PyPosition).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

/// Position amplitude ψ(t, x) on a grid.
#[pyclass(name = "PositionAmplitude", frozen)]
struct PyPosition(PositionAmplitude);

#[pymethods]
impl PyPosition {
    #[getter]
    fn t(&self) -> f64 {
        self.0.t()
    }

    fn norm_squared(&self) -> f64 {
        self.0.norm_squared()
    }

    fn mean_position(&self) -> [f64; 3] {
        self.0.mean_position().into()
    }

    fn width_along(&self, direction: [f64; 3]) -> f64 {
        self.0.width_along(&vec3(direction))
    }

    /// Σ_m |ψ_m|² at every grid point, in [ix][iy][iz] order.
    fn density(&self) -> Vec<f64> {
        self.0.density()
    }

    fn evolve(&self, dt: f64) -> Self {
        Self(position::evolve(&self.0, dt))
    }

    fn boost(&self, beta: [f64; 3]) -> PyResult<(Self, f64)> {
        let (p, lost) = position::boost_position_amplitude(&self.0, &velocity(beta)?).map_err(err)?;
        Ok((Self(p), lost))
    }

    fn klein_gordon_residual(&self, h: f64) -> f64 {
        position::klein_gordon_residual(&self.0, h)
    }
}

/// Λ(β) as a 4×4 nested list.
#[pyfunction]
fn pure_boost(beta: [f64; 3]) -> PyResult<Vec<Vec<f64>>> {
    let l = kinematics::pure_boost(&velocity(beta)?);
    Ok(l.matrix().row_iter().map(|r| r.iter().copied().collect()).collect())
}

/// Wigner rotation W(Λ(β)p ← p) as a 3×3 nested list.
#[pyfunction]
fn wigner_rotation(beta: [f64; 3], m0: f64, p: [f64; 3]) -> PyResult<Vec<Vec<f64>>> {
    let l = kinematics::pure_boost(&velocity(beta)?);
    let p = MassShellMomentum::new(m0, vec3(p)).map_err(err)?;
    let w = kinematics::wigner_rotation(&l, &p).map_err(err)?;
    Ok(w.matrix().row_iter().map(|r| r.iter().copied().collect()).collect())
}

/// The three Newton–Wigner pairs (lhs, rhs), one per axis.
#[pyfunction]
fn nw_identity_check(a: &PyAmplitude, b: &PyAmplitude) -> PyResult<Vec<(Complex64, Complex64)>> {
    let (ca, cb) = (CovariantAmplitude::from_probability(&a.0), CovariantAmplitude::from_probability(&b.0));
    Ok(position::nw_identity_check(&ca, &cb).map_err(err)?.to_vec())
}

#[pyfunction]
fn average_event<'py>(py: Python<'py>, psi: &PyAmplitude, beta0: [f64; 3], t: f64) -> PyResult<Bound<'py, PyDict>> {
    let ev = position::average_event(&psi.0, &velocity(beta0)?, t).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("x", ev.x.as_array())?;
    d.set_item("x_primed", ev.x_primed.as_array())?;
    d.set_item("lambda_x", ev.lambda_x.as_array())?;
    d.set_item("epsilon_bound", ev.epsilon_bound)?;
    d.set_item("relative_deviation", ev.relative_deviation)?;
    Ok(d)
}

#[pyfunction]
fn dirac_spinor(m0: f64, p: [f64; 3], xi: [Complex64; 2]) -> PyResult<Vec<Complex64>> {
    let u = covariant::dirac_spinor(m0, &vec3(p), &Vector2::new(xi[0], xi[1])).map_err(err)?;
    Ok(u.iter().copied().collect())
}

#[pyfunction]
fn dirac_momentum_residual(m0: f64, p: [f64; 3], xi: [Complex64; 2]) -> PyResult<f64> {
    covariant::dirac_momentum_residual(m0, &vec3(p), &Vector2::new(xi[0], xi[1])).map_err(err)
}

#[pyfunction]
fn kg_scalar_residual(psi: &PyAmplitude, t: f64, h: f64) -> PyResult<f64> {
    covariant::kg_scalar_residual(&psi.0, t, h).map_err(err)
}

#[pyfunction]
fn dirac_position_residual(psi: &PyAmplitude, t: f64, h: f64) -> PyResult<f64> {
    covariant::dirac_position_residual(&psi.0, t, h).map_err(err)
}

fn path(name: &str) -> PyResult<EvaluationPath> {
    match name {
        "quadrature" => Ok(EvaluationPath::Quadrature),
        "closed-form" => Ok(EvaluationPath::ClosedForm),
        other => Err(PyValueError::new_err(format!("path must be 'quadrature' or 'closed-form', got {other:?}"))),
    }
}

/// ψ(τ, ρ) of the scaled packet.
#[pyfunction]
#[pyo3(signature = (tau, rho, path = "closed-form", mass_ratio = 0.0))]
fn spatial_wavefunction(tau: f64, rho: f64, path: &str, mass_ratio: f64) -> PyResult<Complex64> {
    let packet = ScaledPacket::new(mass_ratio).map_err(err)?;
    packet.spatial_wavefunction(tau, rho, self::path(path)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (tau, rho, mass_ratio = 0.0))]
fn causality_ratio(py: Python<'_>, tau: f64, rho: f64, mass_ratio: f64) -> PyResult<f64> {
    let packet = ScaledPacket::new(mass_ratio).map_err(err)?;
    py.detach(|| packet.causality_ratio(tau, rho)).map_err(err)
}

/// (ρ values, C values) over ρ_min, ρ_min + step, …, ρ_max.
#[pyfunction]
#[pyo3(signature = (tau, rho_min = 0.1, rho_max = 10.0, step = 0.1, mass_ratio = 0.0))]
fn causality_scan(
    py: Python<'_>,
    tau: f64,
    rho_min: f64,
    rho_max: f64,
    step: f64,
    mass_ratio: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let packet = ScaledPacket::new(mass_ratio).map_err(err)?;
    let grid = causality::rho_grid(rho_min, rho_max, step).map_err(err)?;
    let curve = py.detach(|| packet.causality_scan(tau, &grid)).map_err(err)?;
    Ok(curve.samples.into_iter().unzip())
}

#[pymodule]
fn pyrelamp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyParticle>()?;
    m.add_class::<PyAmplitude>()?;
    m.add_class::<PyPosition>()?;
    m.add_function(wrap_pyfunction!(pure_boost, m)?)?;
    m.add_function(wrap_pyfunction!(wigner_rotation, m)?)?;
    m.add_function(wrap_pyfunction!(nw_identity_check, m)?)?;
    m.add_function(wrap_pyfunction!(average_event, m)?)?;
    m.add_function(wrap_pyfunction!(dirac_spinor, m)?)?;
    m.add_function(wrap_pyfunction!(dirac_momentum_residual, m)?)?;
    m.add_function(wrap_pyfunction!(kg_scalar_residual, m)?)?;
    m.add_function(wrap_pyfunction!(dirac_position_residual, m)?)?;
    m.add_function(wrap_pyfunction!(spatial_wavefunction, m)?)?;
    m.add_function(wrap_pyfunction!(causality_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(causality_scan, m)?)?;
    Ok(())
}
