//! SU(2) lifts of rotations and the Wigner D-matrices D^(s).
//!
//! Spin components are ordered m = +s, s−1, …, −s, so row/column index i
//! corresponds to m = s − i. Phases follow Condon–Shortley.

use std::fmt;

use nalgebra::{DMatrix, Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{RotationMatrix, Velocity3};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Spin quantum number stored as 2s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinValue {
    two_s: u32,
}

impl SpinValue {
    pub const ZERO: SpinValue = SpinValue { two_s: 0 };
    pub const HALF: SpinValue = SpinValue { two_s: 1 };
    pub const ONE: SpinValue = SpinValue { two_s: 2 };

    pub const fn new(two_s: u32) -> Self {
        Self { two_s }
    }

    pub fn two_s(&self) -> u32 {
        self.two_s
    }

    pub fn s(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.two_s as usize + 1
    }

    /// m = s − i for component index i.
    pub fn m_of_index(&self, i: usize) -> f64 {
        self.s() - i as f64
    }

    pub fn is_half_integer(&self) -> bool {
        self.two_s % 2 == 1
    }
}

impl fmt::Display for SpinValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_s % 2 == 0 {
            write!(f, "{}", self.two_s / 2)
        } else {
            write!(f, "{}/2", self.two_s)
        }
    }
}

/// 2×2 unitary matrix with unit determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su2Matrix(Matrix2<Complex64>);

impl Su2Matrix {
    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    /// U = a·I − i v⃗·σ⃗ for a unit quaternion (a, v⃗); normalised here.
    pub fn from_quaternion(a: f64, v: Vector3<f64>) -> Self {
        let n = (a * a + v.norm_squared()).sqrt();
        let (a, v) = (a / n, v / n);
        Self(Matrix2::new(
            Complex64::new(a, -v.z),
            Complex64::new(-v.y, -v.x),
            Complex64::new(v.y, -v.x),
            Complex64::new(a, v.z),
        ))
    }

    /// Checked constructor: unitary with det 1 within `tol`.
    pub fn new(m: Matrix2<Complex64>, tol: f64) -> Result<Self> {
        let defect = unitarity_defect2(&m).max((m.determinant() - 1.0).norm());
        if !(defect <= tol) {
            return Err(Error::domain(format!(
                "matrix is not in SU(2) (defect {defect:e})"
            )));
        }
        Ok(Self(m))
    }

    /// Rotation by `angle` about `axis`: cos(θ/2) − i sin(θ/2) n̂·σ.
    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64) -> Result<Self> {
        let n = axis.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::domain("rotation axis must be a finite nonzero vector"));
        }
        let (s, c) = (angle / 2.0).sin_cos();
        Ok(Self::from_quaternion(c, axis / n * s))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    /// (a, v⃗) with U = a − i v⃗·σ⃗.
    pub fn quaternion(&self) -> (f64, Vector3<f64>) {
        let w = &self.0;
        let a = (w[(0, 0)] + w[(1, 1)]).re / 2.0;
        let vx = -(w[(0, 1)] + w[(1, 0)]).im / 2.0;
        let vy = (w[(1, 0)] - w[(0, 1)]).re / 2.0;
        let vz = (w[(1, 1)] - w[(0, 0)]).im / 2.0;
        (a, Vector3::new(vx, vy, vz))
    }

    /// Image in SO(3) under the adjoint action U(x⃗·σ⃗)U† = (Rx⃗)·σ⃗.
    pub fn to_rotation(&self) -> RotationMatrix {
        let (a, v) = self.quaternion();
        let n2 = a * a + v.norm_squared();
        let (a, x, y, z) = (a, v.x, v.y, v.z);
        let m = Matrix3::new(
            a * a + x * x - y * y - z * z,
            2.0 * (x * y - a * z),
            2.0 * (x * z + a * y),
            2.0 * (x * y + a * z),
            a * a - x * x + y * y - z * z,
            2.0 * (y * z - a * x),
            2.0 * (x * z - a * y),
            2.0 * (y * z + a * x),
            a * a - x * x - y * y + z * z,
        ) / n2;
        RotationMatrix::new_unchecked(m)
    }

    pub fn mul(&self, other: &Su2Matrix) -> Su2Matrix {
        Su2Matrix(self.0 * other.0)
    }

    pub fn adjoint(&self) -> Su2Matrix {
        Su2Matrix(self.0.adjoint())
    }

    pub fn neg(&self) -> Su2Matrix {
        Su2Matrix(-self.0)
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect2(&self.0).max((self.0.determinant() - 1.0).norm())
    }
}

fn unitarity_defect2(m: &Matrix2<Complex64>) -> f64 {
    (m * m.adjoint() - Matrix2::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// A general SL(2,C) element; the double cover of the Lorentz group acting
/// on Hermitian matrices X = x⁰ + x⃗·σ⃗ by X ↦ A X A†.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sl2c(Matrix2<Complex64>);

impl Sl2c {
    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    fn sigma_dot(v: &Vector3<f64>) -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(v.z, 0.0),
            Complex64::new(v.x, -v.y),
            Complex64::new(v.x, v.y),
            Complex64::new(-v.z, 0.0),
        )
    }

    /// Hermitian lift of the pure boost with velocity β.
    pub fn boost(beta: &Velocity3) -> Self {
        let g = beta.gamma();
        let c = ((g + 1.0) / 2.0).sqrt();
        let k = g / (2.0 * (g + 1.0)).sqrt();
        let id = Matrix2::identity() * Complex64::new(c, 0.0);
        Self(id + Self::sigma_dot(&(beta.vector() * k)))
    }

    /// Lift of the standard boost Λ[p]: (m + ω + p⃗·σ⃗)/√(2m(m+ω)).
    pub fn standard_boost(m0: f64, p: &Vector3<f64>) -> Self {
        Self::standard_boost_signed(m0, p, 1.0)
    }

    /// Inverse of [`Sl2c::standard_boost`], flipping the sign of p⃗·σ⃗.
    pub fn standard_boost_inverse(m0: f64, p: &Vector3<f64>) -> Self {
        Self::standard_boost_signed(m0, p, -1.0)
    }

    fn standard_boost_signed(m0: f64, p: &Vector3<f64>, sign: f64) -> Self {
        let w = (p.norm_squared() + m0 * m0).sqrt();
        let norm = 1.0 / (2.0 * m0 * (m0 + w)).sqrt();
        let id = Matrix2::identity() * Complex64::new((m0 + w) * norm, 0.0);
        Self(id + Self::sigma_dot(&(p * (sign * norm))))
    }

    pub fn rotation(r: &RotationMatrix) -> Self {
        Self(su2_from_rotation(r).0)
    }

    pub fn mul(&self, other: &Sl2c) -> Sl2c {
        Sl2c(self.0 * other.0)
    }

    /// Interpret a product that should be unitary as an SU(2) element.
    pub fn into_su2(self, tol: f64) -> Result<Su2Matrix> {
        let defect = unitarity_defect2(&self.0);
        if !(defect <= tol) {
            return Err(Error::NotARotation {
                deviation: defect,
                tolerance: tol,
            });
        }
        let (a, v) = Su2Matrix(self.0).quaternion();
        Ok(Su2Matrix::from_quaternion(a, v))
    }
}

/// (2s+1)-dimensional unitary representation matrix of an SU(2) element.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerDMatrix {
    spin: SpinValue,
    entries: DMatrix<Complex64>,
}

impl WignerDMatrix {
    pub fn spin(&self) -> SpinValue {
        self.spin
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Entry D_{m'm} addressed by component indices.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    /// out = D·v.
    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        let n = self.spin.dim();
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.entries[(i, j)] * v[j];
            }
            out[i] = acc;
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        self.apply_into(v, &mut out);
        out
    }

    pub fn unitarity_defect(&self) -> f64 {
        let n = self.spin.dim();
        (&self.entries * self.entries.adjoint() - DMatrix::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

// |a| below this is treated as an exact half-turn (a is cos(θ/2)).
const HALF_TURN_EPS: f64 = 1e-14;

/// SU(2) lift of a rotation with angle in [0, π].
///
/// The quaternion is extracted with the branch that maximises the pivot so
/// that small angles and half-turns are equally well conditioned. At
/// exactly π the two lifts coincide up to the axis sign, which is fixed by
/// making the first nonzero axis component positive.
pub fn su2_from_rotation(r: &RotationMatrix) -> Su2Matrix {
    let m = r.matrix();
    let tr = m.trace();
    let (mut a, mut v) = if tr >= m[(0, 0)] && tr >= m[(1, 1)] && tr >= m[(2, 2)] {
        let a = 0.5 * (1.0 + tr).sqrt();
        let k = 0.25 / a;
        (
            a,
            Vector3::new(
                (m[(2, 1)] - m[(1, 2)]) * k,
                (m[(0, 2)] - m[(2, 0)]) * k,
                (m[(1, 0)] - m[(0, 1)]) * k,
            ),
        )
    } else if m[(0, 0)] >= m[(1, 1)] && m[(0, 0)] >= m[(2, 2)] {
        let x = 0.5 * (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt();
        let k = 0.25 / x;
        (
            (m[(2, 1)] - m[(1, 2)]) * k,
            Vector3::new(x, (m[(0, 1)] + m[(1, 0)]) * k, (m[(0, 2)] + m[(2, 0)]) * k),
        )
    } else if m[(1, 1)] >= m[(2, 2)] {
        let y = 0.5 * (1.0 - m[(0, 0)] + m[(1, 1)] - m[(2, 2)]).sqrt();
        let k = 0.25 / y;
        (
            (m[(0, 2)] - m[(2, 0)]) * k,
            Vector3::new((m[(0, 1)] + m[(1, 0)]) * k, y, (m[(1, 2)] + m[(2, 1)]) * k),
        )
    } else {
        let z = 0.5 * (1.0 - m[(0, 0)] - m[(1, 1)] + m[(2, 2)]).sqrt();
        let k = 0.25 / z;
        (
            (m[(1, 0)] - m[(0, 1)]) * k,
            Vector3::new((m[(0, 2)] + m[(2, 0)]) * k, (m[(1, 2)] + m[(2, 1)]) * k, z),
        )
    };
    if a.abs() <= HALF_TURN_EPS {
        // half-turn: lexicographic axis sign
        let first = v.iter().copied().find(|c| c.abs() > HALF_TURN_EPS).unwrap_or(1.0);
        if first < 0.0 {
            a = -a;
            v = -v;
        }
    } else if a < 0.0 {
        a = -a;
        v = -v;
    }
    Su2Matrix::from_quaternion(a, v)
}

fn factorials(n: usize) -> Vec<f64> {
    let mut f = vec![1.0; n + 1];
    for k in 1..=n {
        f[k] = f[k - 1] * k as f64;
    }
    f
}

fn powers(z: Complex64, n: usize) -> Vec<Complex64> {
    let mut p = vec![Complex64::new(1.0, 0.0); n + 1];
    for k in 1..=n {
        p[k] = p[k - 1] * z;
    }
    p
}

/// D^(s)(U) from the symmetric tensor power of the defining representation.
///
/// With U = [[a, b], [c, d]], n = 2s and p = s + m, p' = s + m':
/// D_{m'm} = √(p'!(n−p')!/(p!(n−p)!)) Σ_k C(p,k) C(n−p,p'−k) a^k c^{p−k} b^{p'−k} d^{n−p−p'+k}.
pub fn wigner_d(spin: SpinValue, u: &Su2Matrix) -> WignerDMatrix {
    let n = spin.two_s() as usize;
    let dim = n + 1;
    let u = u.matrix();
    let (pa, pb, pc, pd) = (
        powers(u[(0, 0)], n),
        powers(u[(0, 1)], n),
        powers(u[(1, 0)], n),
        powers(u[(1, 1)], n),
    );
    let f = factorials(n);
    let binom = |a: usize, b: usize| f[a] / (f[b] * f[a - b]);
    let mut entries = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for row in 0..dim {
        let pp = n - row;
        for col in 0..dim {
            let p = n - col;
            let norm = (f[pp] * f[n - pp] / (f[p] * f[n - p])).sqrt();
            let kmin = (p + pp).saturating_sub(n);
            let kmax = p.min(pp);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in kmin..=kmax {
                acc += pa[k] * pc[p - k] * pb[pp - k] * pd[n + k - p - pp]
                    * (binom(p, k) * binom(n - p, pp - k));
            }
            entries[(row, col)] = acc * norm;
        }
    }
    WignerDMatrix { spin, entries }
}

/// Pauli matrices σx, σy, σz.
pub fn pauli() -> [Matrix2<Complex64>; 3] {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    [
        Matrix2::new(o, one, one, o),
        Matrix2::new(o, -I, I, o),
        Matrix2::new(one, o, o, -one),
    ]
}
