//! Locally transforming fields built from probability amplitudes: the
//! positive-energy Klein–Gordon scalar and the four-component Dirac field.
//!
//! Both use φ(t,x) = ∫ d³p/(2π)^{3/2} ω^{−1/2} e^{−iωt + ip·x} (…)Ψ(p), so that
//! for a narrow packet at rest φ ≈ ψ/√m0.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector3, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitudes::MomentumAmplitude;
use crate::error::{Error, Result};
use crate::fourier::{FourierEngine, GridSpec};
use crate::kinematics::energy;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Sign r in D^(r)[p].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoostSign {
    Plus,
    Minus,
}

impl BoostSign {
    pub fn value(self) -> f64 {
        match self {
            BoostSign::Plus => 1.0,
            BoostSign::Minus => -1.0,
        }
    }
}

/// D^(r)[p] = √((ω+m)/2m) + r√((ω−m)/2m) p̂·σ.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracBoostMatrix {
    r: BoostSign,
    entries: Matrix2<Complex64>,
}

impl DiracBoostMatrix {
    pub fn new(r: BoostSign, m0: f64, p: &Vector3<f64>) -> Result<Self> {
        if !(m0 > 0.0 && m0.is_finite()) {
            return Err(Error::domain(format!("the Dirac boost needs m0 > 0, got {m0}")));
        }
        let w = energy(m0, p);
        let a = ((w + m0) / (2.0 * m0)).sqrt();
        let pn = p.norm();
        // √((ω−m)/2m)·p̂ = p/√(2m(ω+m)), no cancellation near rest
        let n = p / (2.0 * m0 * (w + m0)).sqrt() * r.value();
        let entries = if pn == 0.0 {
            Matrix2::identity()
        } else {
            Matrix2::new(
                Complex64::new(a + n.z, 0.0),
                Complex64::new(n.x, -n.y),
                Complex64::new(n.x, n.y),
                Complex64::new(a - n.z, 0.0),
            )
        };
        Ok(Self { r, entries })
    }

    pub fn sign(&self) -> BoostSign {
        self.r
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.entries
    }

    pub fn determinant(&self) -> Complex64 {
        self.entries.determinant()
    }
}

/// Gamma-matrix representation carried by a [`DiracField`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaRepresentation {
    Weyl,
}

/// γ^0..γ^3 in the chiral representation: γ^0 = [[0, 1], [1, 0]],
/// γ^j = [[0, σ^j], [−σ^j, 0]].
pub fn gamma_weyl() -> [Matrix4<Complex64>; 4] {
    let sigma = pauli();
    let mut out = [Matrix4::zeros(); 4];
    for i in 0..2 {
        out[0][(i, i + 2)] = ONE;
        out[0][(i + 2, i)] = ONE;
    }
    for (j, s) in sigma.iter().enumerate() {
        for a in 0..2 {
            for b in 0..2 {
                out[j + 1][(a, b + 2)] = s[(a, b)];
                out[j + 1][(a + 2, b)] = -s[(a, b)];
            }
        }
    }
    out
}

fn pauli() -> [Matrix2<Complex64>; 3] {
    [
        Matrix2::new(ZERO, ONE, ONE, ZERO),
        Matrix2::new(ZERO, -I, I, ZERO),
        Matrix2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

/// Plane-wave coefficient (1/√2)(D^(−)ξ, D^(+)ξ) for spin vector ξ
/// (index 0 is m = +½).
pub fn dirac_spinor(m0: f64, p: &Vector3<f64>, xi: &Vector2<Complex64>) -> Result<Vector4<Complex64>> {
    let lo = DiracBoostMatrix::new(BoostSign::Minus, m0, p)?;
    let hi = DiracBoostMatrix::new(BoostSign::Plus, m0, p)?;
    let u = lo.matrix() * xi;
    let d = hi.matrix() * xi;
    Ok(Vector4::new(u[0], u[1], d[0], d[1]) * Complex64::from(std::f64::consts::FRAC_1_SQRT_2))
}

/// ‖(γ^μp_μ − m)u‖/‖m u‖ for the assembled coefficient at on-shell p.
pub fn dirac_momentum_residual(m0: f64, p: &Vector3<f64>, xi: &Vector2<Complex64>) -> Result<f64> {
    let u = dirac_spinor(m0, p, xi)?;
    let g = gamma_weyl();
    let w = energy(m0, p);
    let slash = g[0] * Complex64::from(w) - (g[1] * Complex64::from(p.x) + g[2] * Complex64::from(p.y) + g[3] * Complex64::from(p.z));
    let r = (slash - Matrix4::identity() * Complex64::from(m0)) * u;
    Ok(r.norm() / (u.norm() * m0))
}

/// Positive-energy Klein–Gordon field φ on a position grid. Its squared norm
/// is ⟨1/ω⟩, not 1: |φ|² is not a probability density.
#[derive(Clone, Debug)]
pub struct ScalarField {
    m0: f64,
    spec: GridSpec,
    t: f64,
    values: Vec<Complex64>,
}

impl ScalarField {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.spec.cell_volume_x()
    }
}

/// Four-component Dirac field on a position grid.
#[derive(Clone, Debug)]
pub struct DiracField {
    m0: f64,
    spec: GridSpec,
    t: f64,
    representation: GammaRepresentation,
    comps: [Vec<Complex64>; 4],
}

impl DiracField {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn representation(&self) -> GammaRepresentation {
        self.representation
    }

    pub fn components(&self) -> &[Vec<Complex64>; 4] {
        &self.comps
    }

    pub fn norm_squared(&self) -> f64 {
        self.comps.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>() * self.spec.cell_volume_x()
    }
}

fn momentum_samples(psi: &MomentumAmplitude) -> Result<(GridSpec, Vec<Vec<Complex64>>)> {
    let grid = if psi.is_grid() { psi.clone() } else { psi.sample_to_grid(psi.default_grid()?)? };
    let spec = grid.grid_spec().expect("grid carrier");
    Ok((spec, grid.grid_components().expect("grid carrier")))
}

// e^{−iωt}/√ω on every grid point
fn time_factor(spec: &GridSpec, m0: f64, t: f64) -> Vec<Complex64> {
    (0..spec.len())
        .into_par_iter()
        .map(|i| {
            let w = energy(m0, &spec.momentum(i));
            Complex64::from_polar(w.powf(-0.5), -w * t)
        })
        .collect()
}

/// φ(t, x) for a spin-0 amplitude.
pub fn kg_scalar(psi: &MomentumAmplitude, t: f64) -> Result<ScalarField> {
    if psi.spin().two_s() != 0 {
        return Err(Error::usage(format!("kg_scalar needs spin 0, got spin {}", psi.spin())));
    }
    let m0 = psi.particle().m0();
    let (spec, mut comps) = momentum_samples(psi)?;
    let f = time_factor(&spec, m0, t);
    let mut c = comps.remove(0);
    c.par_iter_mut().zip(&f).for_each(|(z, k)| *z *= k);
    let values = FourierEngine::new(spec).momentum_to_position(&c);
    Ok(ScalarField { m0, spec, t, values })
}

/// Ψ^Dirac(t, x) for a spin-½ amplitude, summed over m.
pub fn dirac_build(psi: &MomentumAmplitude, t: f64) -> Result<DiracField> {
    if psi.spin().two_s() != 1 {
        return Err(Error::usage(format!("dirac_build needs spin 1/2, got spin {}", psi.spin())));
    }
    let m0 = psi.particle().m0();
    let (spec, comps) = momentum_samples(psi)?;
    let f = time_factor(&spec, m0, t);
    let cols: Vec<Vector4<Complex64>> = (0..spec.len())
        .into_par_iter()
        .map(|i| {
            let xi = Vector2::new(comps[0][i], comps[1][i]);
            dirac_spinor(m0, &spec.momentum(i), &xi).expect("m0 validated by ParticleSpec") * f[i]
        })
        .collect();
    let eng = FourierEngine::new(spec);
    let comps: [Vec<Complex64>; 4] = std::array::from_fn(|a| {
        let c: Vec<Complex64> = cols.iter().map(|v| v[a]).collect();
        eng.momentum_to_position(&c)
    });
    Ok(DiracField { m0, spec, t, representation: GammaRepresentation::Weyl, comps })
}

const D1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
const D2: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

// 8th-order central differences of rebuilt fields in t
fn time_derivatives<F>(build: F, t: f64, h: f64) -> Result<(Vec<Vec<Complex64>>, Vec<Vec<Complex64>>)>
where
    F: Fn(f64) -> Result<Vec<Vec<Complex64>>>,
{
    let centre = build(t)?;
    let mut d1: Vec<Vec<Complex64>> = centre.iter().map(|c| vec![ZERO; c.len()]).collect();
    let mut d2: Vec<Vec<Complex64>> = centre.iter().map(|c| c.iter().map(|z| z * D2[0]).collect()).collect();
    for k in 1..=4 {
        let plus = build(t + k as f64 * h)?;
        let minus = build(t - k as f64 * h)?;
        for c in 0..centre.len() {
            for i in 0..centre[c].len() {
                d1[c][i] += (plus[c][i] - minus[c][i]) * D1[k - 1];
                d2[c][i] += (plus[c][i] + minus[c][i]) * D2[k];
            }
        }
    }
    for c in d1.iter_mut().flatten() {
        *c /= h;
    }
    for c in d2.iter_mut().flatten() {
        *c /= h * h;
    }
    Ok((d1, d2))
}

/// ‖(∂²_t − ∇² + m0²)φ‖/‖m0²φ‖ at the field's time, time step h.
pub fn kg_scalar_residual(psi: &MomentumAmplitude, t: f64, h: f64) -> Result<f64> {
    let phi = kg_scalar(psi, t)?;
    let (_, d2) = time_derivatives(|s| Ok(vec![kg_scalar(psi, s)?.values]), t, h)?;
    let eng = FourierEngine::new(phi.spec);
    let spec = phi.spec;
    let mut lap = eng.position_to_momentum(&phi.values);
    lap.par_iter_mut().enumerate().for_each(|(i, z)| *z *= -spec.momentum(i).norm_squared());
    let lap = eng.momentum_to_position(&lap);
    let m2 = phi.m0 * phi.m0;
    let (mut num, mut den) = (0.0, 0.0);
    for ((a, l), z) in d2[0].iter().zip(&lap).zip(&phi.values) {
        num += (a - l + z * m2).norm_sqr();
        den += (z * m2).norm_sqr();
    }
    Ok((num / den).sqrt())
}

/// ‖(iγ^μ∂_μ − m0)Ψ^Dirac‖/‖m0Ψ^Dirac‖ with spectral space derivatives.
pub fn dirac_position_residual(psi: &MomentumAmplitude, t: f64, h: f64) -> Result<f64> {
    let field = dirac_build(psi, t)?;
    let (dt, _) = time_derivatives(|s| Ok(dirac_build(psi, s)?.comps.to_vec()), t, h)?;
    let eng = FourierEngine::new(field.spec);
    let grads: Vec<[Vec<Complex64>; 3]> = field.comps.iter().map(|c| eng.position_gradient(c)).collect();
    let g = gamma_weyl();
    let m0 = field.m0;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..field.spec.len() {
        let psi_i = Vector4::from_fn(|a, _| field.comps[a][i]);
        let mut v = g[0] * Vector4::from_fn(|a, _| dt[a][i]);
        for j in 0..3 {
            v += g[j + 1] * Vector4::from_fn(|a, _| grads[a][j][i]);
        }
        let r = v * I - psi_i * Complex64::from(m0);
        num += r.norm_squared();
        den += psi_i.norm_squared() * m0 * m0;
    }
    Ok((num / den).sqrt())
}
