//! Special-relativistic kinematics in natural units with metric (+,−,−,−).
//!
//! All transformations are active. Boosts are built in closed form from the
//! velocity; the Wigner rotation goes through the SL(2,C) double cover, which
//! stays well conditioned at ultra-relativistic momenta where the naive 4×4
//! product loses most of its digits.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{Sl2c, Su2Matrix};

/// Default tolerance for the pure-rotation check in [`wigner_rotation`].
pub const WIGNER_TOLERANCE: f64 = 1e-10;

/// Minkowski metric diag(1, −1, −1, −1).
pub fn metric() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

/// A contravariant four-vector (t, x, y, z).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourVector(pub Vector4<f64>);

impl FourVector {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self(Vector4::new(t, x, y, z))
    }

    pub fn from_parts(t: f64, spatial: Vector3<f64>) -> Self {
        Self::new(t, spatial.x, spatial.y, spatial.z)
    }

    pub fn zero() -> Self {
        Self(Vector4::zeros())
    }

    pub fn t(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> Vector3<f64> {
        Vector3::new(self.0[1], self.0[2], self.0[3])
    }

    /// Minkowski product a·b = a⁰b⁰ − a⃗·b⃗.
    pub fn dot(&self, other: &FourVector) -> f64 {
        self.t() * other.t() - self.spatial().dot(&other.spatial())
    }

    pub fn minkowski_square(&self) -> f64 {
        self.dot(self)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.0[0], self.0[1], self.0[2], self.0[3]]
    }
}

/// A 3-velocity with |β| < 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Velocity3(Vector3<f64>);

impl Velocity3 {
    pub fn new(beta: Vector3<f64>) -> Result<Self> {
        let n = beta.norm();
        if !n.is_finite() || n >= 1.0 {
            return Err(Error::Superluminal(n));
        }
        Ok(Self(beta))
    }

    pub fn zero() -> Self {
        Self(Vector3::zeros())
    }

    pub fn vector(&self) -> Vector3<f64> {
        self.0
    }

    pub fn speed(&self) -> f64 {
        self.0.norm()
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.0.norm_squared()).sqrt()
    }

    /// Rapidity ζ = artanh|β|.
    pub fn rapidity(&self) -> f64 {
        self.speed().atanh()
    }
}

impl TryFrom<[f64; 3]> for Velocity3 {
    type Error = Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        Velocity3::new(Vector3::new(v[0], v[1], v[2]))
    }
}

impl From<Velocity3> for [f64; 3] {
    fn from(v: Velocity3) -> Self {
        [v.0.x, v.0.y, v.0.z]
    }
}

/// A proper rotation in SO(3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    /// Checked constructor; RᵀR = I and det R = 1 within `tol`.
    pub fn new(m: Matrix3<f64>, tol: f64) -> Result<Self> {
        let dev = (m.transpose() * m - Matrix3::identity()).amax();
        let det = m.determinant();
        if !(dev <= tol) || !((det - 1.0).abs() <= tol) {
            return Err(Error::NotARotation {
                deviation: dev.max((det - 1.0).abs()),
                tolerance: tol,
            });
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: Matrix3<f64>) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Active rotation by `angle` (right-handed) about `axis`.
    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64) -> Result<Self> {
        let n = axis.norm();
        if !(n > 0.0) || !n.is_finite() || !angle.is_finite() {
            return Err(Error::domain("rotation axis must be a finite nonzero vector"));
        }
        let u = axis / n;
        let (s, c) = angle.sin_cos();
        let k = Matrix3::new(0.0, -u.z, u.y, u.z, 0.0, -u.x, -u.y, u.x, 0.0);
        Ok(Self(Matrix3::identity() + k * s + k * k * (1.0 - c)))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    pub fn compose(&self, other: &RotationMatrix) -> Self {
        Self(self.0 * other.0)
    }

    /// Rotation angle in [0, π].
    pub fn angle(&self) -> f64 {
        ((self.0.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
    }

    /// max |RᵀR − I| combined with |det R − 1|.
    pub fn orthogonality_defect(&self) -> f64 {
        let dev = (self.0.transpose() * self.0 - Matrix3::identity()).amax();
        dev.max((self.0.determinant() - 1.0).abs())
    }
}

/// A Lorentz transformation. The checked constructor admits only proper
/// orthochronous ones; [`LorentzMatrix::spatial_reflection`] is the one
/// improper element, used for the action of P and T on momenta.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzMatrix(Matrix4<f64>);

impl LorentzMatrix {
    /// Checked constructor: metric preserved within `tol`, det > 0, Λ⁰₀ ≥ 1.
    pub fn new(m: Matrix4<f64>, tol: f64) -> Result<Self> {
        let g = metric();
        let dev = (m.transpose() * g * m - g).amax();
        if !(dev <= tol * m.amax().powi(2).max(1.0)) {
            return Err(Error::domain(format!(
                "matrix does not preserve the metric (deviation {dev:e})"
            )));
        }
        if m[(0, 0)] < 1.0 - tol || m.determinant() <= 0.0 {
            return Err(Error::domain(
                "Lorentz matrix must be proper and orthochronous",
            ));
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    /// diag(1, −1, −1, −1).
    pub fn spatial_reflection() -> Self {
        Self(Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0)))
    }

    pub fn from_rotation(r: &RotationMatrix) -> Self {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(r.matrix());
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn apply(&self, v: &FourVector) -> FourVector {
        FourVector(self.0 * v.0)
    }

    pub fn compose(&self, other: &LorentzMatrix) -> Self {
        Self(self.0 * other.0)
    }

    /// Λ⁻¹ = g Λᵀ g.
    pub fn inverse(&self) -> Self {
        let g = metric();
        Self(g * self.0.transpose() * g)
    }

    /// max |ΛᵀgΛ − g|.
    pub fn metric_defect(&self) -> f64 {
        let g = metric();
        (self.0.transpose() * g * self.0 - g).amax()
    }

    /// Polar decomposition Λ = B(β)·R.
    pub fn decompose(&self) -> (Velocity3, RotationMatrix) {
        let l00 = self.0[(0, 0)];
        let beta = Vector3::new(self.0[(1, 0)], self.0[(2, 0)], self.0[(3, 0)]) / l00;
        // |β| < 1 holds for any orthochronous Λ; guard against rounding.
        let n = beta.norm();
        let beta = if n >= 1.0 {
            beta * ((1.0 - f64::EPSILON) / n)
        } else {
            beta
        };
        let v = Velocity3(beta);
        let rest = pure_boost(&Velocity3(-beta)).0 * self.0;
        let r = rest.fixed_view::<3, 3>(1, 1).into_owned();
        (v, RotationMatrix(r))
    }

    /// Matrix-free application of the inverse transformation to a spatial
    /// momentum on the mass shell of `m0`.
    pub fn inverse_apply_momentum(&self, m0: f64, p: &Vector3<f64>) -> Vector3<f64> {
        let w = (p.norm_squared() + m0 * m0).sqrt();
        self.inverse().apply(&FourVector::from_parts(w, *p)).spatial()
    }
}

impl std::ops::Mul for LorentzMatrix {
    type Output = LorentzMatrix;
    fn mul(self, rhs: LorentzMatrix) -> LorentzMatrix {
        self.compose(&rhs)
    }
}

/// An on-shell momentum with rest mass m0 > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassShellMomentum {
    m0: f64,
    p: Vector3<f64>,
}

impl MassShellMomentum {
    pub fn new(m0: f64, p: Vector3<f64>) -> Result<Self> {
        if !(m0 > 0.0) || !m0.is_finite() {
            return Err(Error::domain(format!("rest mass must be positive, got {m0}")));
        }
        if !p.iter().all(|x| x.is_finite()) {
            return Err(Error::domain("momentum must be finite"));
        }
        Ok(Self { m0, p })
    }

    /// Build from a four-vector, checking the shell condition to relative `tol`.
    pub fn from_four_vector(m0: f64, p: &FourVector, tol: f64) -> Result<Self> {
        let s = Self::new(m0, p.spatial())?;
        let rel = (s.energy() - p.t()).abs() / s.energy();
        if rel > tol {
            return Err(Error::domain(format!(
                "four-momentum is off the mass shell (relative deviation {rel:e})"
            )));
        }
        Ok(s)
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn momentum(&self) -> Vector3<f64> {
        self.p
    }

    /// ω = +√(p² + m0²).
    pub fn energy(&self) -> f64 {
        energy(self.m0, &self.p)
    }

    pub fn four_vector(&self) -> FourVector {
        FourVector::from_parts(self.energy(), self.p)
    }

    pub fn velocity(&self) -> Velocity3 {
        Velocity3(self.p / self.energy())
    }
}

/// ω(p) = √(p² + m0²).
#[inline]
pub fn energy(m0: f64, p: &Vector3<f64>) -> f64 {
    (p.norm_squared() + m0 * m0).sqrt()
}

/// Pure boost with velocity β0.
pub fn pure_boost(beta: &Velocity3) -> LorentzMatrix {
    let b = beta.0;
    let b2 = b.norm_squared();
    let g = 1.0 / (1.0 - b2).sqrt();
    // γ²/(1+γ) written to avoid cancellation as β² → 0
    let k = g * g / (1.0 + g);
    let mut m = Matrix4::identity();
    m[(0, 0)] = g;
    for i in 0..3 {
        m[(0, i + 1)] = g * b[i];
        m[(i + 1, 0)] = g * b[i];
        for j in 0..3 {
            m[(i + 1, j + 1)] += k * b[i] * b[j];
        }
    }
    LorentzMatrix(m)
}

/// Checked variant of [`pure_boost`] taking a raw vector.
pub fn pure_boost_checked(beta: Vector3<f64>) -> Result<LorentzMatrix> {
    Ok(pure_boost(&Velocity3::new(beta)?))
}

/// The standard boost Λ[p] taking (m0, 0⃗) to (ω, p⃗).
pub fn standard_boost(p: &MassShellMomentum) -> LorentzMatrix {
    let m = p.m0;
    let w = p.energy();
    let q = p.p;
    let mut l = Matrix4::identity();
    l[(0, 0)] = w / m;
    for i in 0..3 {
        l[(0, i + 1)] = q[i] / m;
        l[(i + 1, 0)] = q[i] / m;
        for j in 0..3 {
            l[(i + 1, j + 1)] += q[i] * q[j] / (m * (w + m));
        }
    }
    LorentzMatrix(l)
}

/// SU(2) element of the Wigner rotation W(Λp ← p).
///
/// Computed as A(Λp)⁻¹·A(Λ)·A(p) in SL(2,C). The unitarity defect of the
/// product is checked against `tol`.
pub fn wigner_su2(lambda: &LorentzMatrix, p: &MassShellMomentum, tol: f64) -> Result<Su2Matrix> {
    let (v, r) = lambda.decompose();
    let a_lambda = Sl2c::boost(&v).mul(&Sl2c::rotation(&r));
    let lp = lambda.apply(&p.four_vector()).spatial();
    wigner_su2_between(&a_lambda, p.m0, &p.p, &lp, tol)
}

/// Like [`wigner_su2`] but with the SL(2,C) lift of Λ and the image momentum
/// supplied by the caller; used by the amplitude transformation code where
/// both are already known.
pub(crate) fn wigner_su2_between(
    a_lambda: &Sl2c,
    m0: f64,
    p: &Vector3<f64>,
    lp: &Vector3<f64>,
    tol: f64,
) -> Result<Su2Matrix> {
    let w = Sl2c::standard_boost_inverse(m0, lp)
        .mul(a_lambda)
        .mul(&Sl2c::standard_boost(m0, p));
    w.into_su2(tol)
}

/// W(Λp ← p) = Λ⁻¹[Λp]·Λ·Λ[p], spatial block, with the default tolerance.
pub fn wigner_rotation(lambda: &LorentzMatrix, p: &MassShellMomentum) -> Result<RotationMatrix> {
    wigner_rotation_with_tol(lambda, p, WIGNER_TOLERANCE)
}

pub fn wigner_rotation_with_tol(
    lambda: &LorentzMatrix,
    p: &MassShellMomentum,
    tol: f64,
) -> Result<RotationMatrix> {
    Ok(wigner_su2(lambda, p, tol)?.to_rotation())
}

/// Relativistic velocity addition: the velocity of a particle moving with β
/// after the whole system is boosted by β0.
pub fn velocity_compose(beta: &Velocity3, beta0: &Velocity3) -> Velocity3 {
    let b = beta.0;
    let b0 = beta0.0;
    let s0 = b0.norm();
    if s0 == 0.0 {
        return *beta;
    }
    let n = b0 / s0;
    let g0 = beta0.gamma();
    let par = n * n.dot(&b);
    let perp = b - par;
    let out = (perp + (par + b0) * g0) / (g0 * (1.0 + b0.dot(&b)));
    let norm = out.norm();
    if norm >= 1.0 {
        Velocity3(out * ((1.0 - f64::EPSILON) / norm))
    } else {
        Velocity3(out)
    }
}
