//! Momentum-space operators acting on amplitude jets (values plus gradients).
//!
//! Only what the position-operator algebra needs: real multipliers f(p)
//! (Ĥ, P̂, β̂ and friends), the position operator x̂ = i∂/∂p, symmetrised
//! products ½{f, x̂_j} = f·i∂_j + (i/2)(∂_j f), linear combinations and
//! composition.

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::dual::{self, Dual};
use crate::error::{Error, Result};
use crate::kinematics::Velocity3;

const I: Complex64 = Complex64::new(0.0, 1.0);

type MultFn = dyn Fn(&[Dual; 3]) -> Dual + Send + Sync;

/// A real scalar function of p⃗ applied diagonally in momentum space.
#[derive(Clone)]
pub struct Multiplier {
    name: String,
    f: Arc<MultFn>,
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multiplier({})", self.name)
    }
}

impl Multiplier {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[Dual; 3]) -> Dual + Send + Sync + 'static,
    {
        Self { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Value and gradient at p.
    pub fn eval(&self, p: &Vector3<f64>) -> Dual {
        (self.f)(&Dual::variables(p))
    }

    pub fn value(&self, p: &Vector3<f64>) -> f64 {
        self.eval(p).v
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| Dual::constant(c))
    }

    /// ω(p) = √(p² + m0²), the Hamiltonian.
    pub fn energy(m0: f64) -> Self {
        Self::new("omega", move |p| energy(p, m0))
    }

    /// p_j.
    pub fn momentum(j: usize) -> Self {
        Self::new(format!("p{j}"), move |p| p[j])
    }

    /// β_j = p_j/ω.
    pub fn velocity(m0: f64, j: usize) -> Self {
        Self::new(format!("beta{j}"), move |p| p[j] / energy(p, m0))
    }

    /// √ω, relating probability and covariant amplitudes.
    pub fn sqrt_energy(m0: f64) -> Self {
        Self::new("sqrt_omega", move |p| energy(p, m0).sqrt())
    }
}

pub(crate) fn energy(p: &[Dual; 3], m0: f64) -> Dual {
    (dual::dot(p, p) + m0 * m0).sqrt()
}

/// Linear operator on amplitudes, applied componentwise in spin.
#[derive(Clone, Debug)]
pub enum Operator {
    Multiply(Multiplier),
    /// x̂_j = i∂/∂p_j.
    Position(usize),
    /// Σ_j ½{g_j(p), x̂_j}.
    Symmetrized([Multiplier; 3]),
    Scale(Complex64, Box<Operator>),
    Sum(Vec<Operator>),
    /// Compose(A, B) = A·B (B acts first).
    Compose(Box<Operator>, Box<Operator>),
}

impl Operator {
    pub fn multiply(m: Multiplier) -> Self {
        Operator::Multiply(m)
    }

    pub fn scale(self, c: Complex64) -> Self {
        Operator::Scale(c, Box::new(self))
    }

    pub fn then(self, first: Operator) -> Self {
        Operator::Compose(Box::new(self), Box::new(first))
    }

    pub fn sum(ops: Vec<Operator>) -> Self {
        Operator::Sum(ops)
    }

    /// [A, B] = AB − BA.
    pub fn commutator(a: &Operator, b: &Operator) -> Self {
        Operator::Sum(vec![
            a.clone().then(b.clone()),
            b.clone().then(a.clone()).scale(Complex64::new(-1.0, 0.0)),
        ])
    }

    /// Whether the input gradient is consumed.
    pub fn needs_gradient(&self) -> bool {
        match self {
            Operator::Multiply(_) => false,
            Operator::Position(_) | Operator::Symmetrized(_) => true,
            Operator::Scale(_, a) => a.needs_gradient(),
            Operator::Sum(v) => v.iter().any(|o| o.needs_gradient()),
            Operator::Compose(a, b) => b.needs_gradient() || (a.needs_gradient()),
        }
    }

    /// Whether the output still carries an exact gradient (given one on input).
    pub fn propagates_gradient(&self) -> bool {
        match self {
            Operator::Multiply(_) => true,
            Operator::Position(_) | Operator::Symmetrized(_) => false,
            Operator::Scale(_, a) => a.propagates_gradient(),
            Operator::Sum(v) => v.iter().all(|o| o.propagates_gradient()),
            Operator::Compose(a, b) => a.propagates_gradient() && b.propagates_gradient(),
        }
    }

    /// Apply to sampled jets. `points` and the jet arrays are point-major
    /// with `dim` spin components per point.
    pub fn apply(&self, points: &[Vector3<f64>], jets: &Jets) -> Result<Jets> {
        let dim = jets.dim;
        match self {
            Operator::Multiply(m) => {
                let mut values = Vec::with_capacity(jets.values.len());
                let mut grads = jets.grads.as_ref().map(|g| Vec::with_capacity(g.len()));
                for (i, p) in points.iter().enumerate() {
                    let f = m.eval(p);
                    for c in 0..dim {
                        let k = i * dim + c;
                        let v = jets.values[k];
                        values.push(v * f.v);
                        if let (Some(out), Some(g)) = (grads.as_mut(), jets.grads.as_ref()) {
                            let gi = g[k];
                            out.push([
                                gi[0] * f.v + v * f.g.x,
                                gi[1] * f.v + v * f.g.y,
                                gi[2] * f.v + v * f.g.z,
                            ]);
                        }
                    }
                }
                Ok(Jets { dim, values, grads })
            }
            Operator::Position(j) => {
                let g = jets.require_grads()?;
                let values = g.iter().map(|d| I * d[*j]).collect();
                Ok(Jets { dim, values, grads: None })
            }
            Operator::Symmetrized(ms) => {
                let g = jets.require_grads()?;
                let mut values = Vec::with_capacity(jets.values.len());
                for (i, p) in points.iter().enumerate() {
                    let f = [ms[0].eval(p), ms[1].eval(p), ms[2].eval(p)];
                    let div = f[0].g.x + f[1].g.y + f[2].g.z;
                    for c in 0..dim {
                        let k = i * dim + c;
                        let d = g[k];
                        let mut acc = jets.values[k] * (0.5 * div);
                        for j in 0..3 {
                            acc += d[j] * f[j].v;
                        }
                        values.push(I * acc);
                    }
                }
                Ok(Jets { dim, values, grads: None })
            }
            Operator::Scale(s, a) => {
                let mut out = a.apply(points, jets)?;
                for v in out.values.iter_mut() {
                    *v *= s;
                }
                if let Some(g) = out.grads.as_mut() {
                    for d in g.iter_mut() {
                        for x in d.iter_mut() {
                            *x *= s;
                        }
                    }
                }
                Ok(out)
            }
            Operator::Sum(ops) => {
                let mut acc: Option<Jets> = None;
                for o in ops {
                    let r = o.apply(points, jets)?;
                    acc = Some(match acc {
                        None => r,
                        Some(mut a) => {
                            for (x, y) in a.values.iter_mut().zip(&r.values) {
                                *x += y;
                            }
                            a.grads = match (a.grads, r.grads) {
                                (Some(mut ga), Some(gb)) => {
                                    for (x, y) in ga.iter_mut().zip(&gb) {
                                        for k in 0..3 {
                                            x[k] += y[k];
                                        }
                                    }
                                    Some(ga)
                                }
                                _ => None,
                            };
                            a
                        }
                    });
                }
                acc.ok_or_else(|| Error::usage("empty operator sum"))
            }
            Operator::Compose(a, b) => {
                let mid = b.apply(points, jets)?;
                a.apply(points, &mid)
            }
        }
    }
}

/// Sampled amplitude values with optional gradients.
#[derive(Clone, Debug)]
pub struct Jets {
    pub dim: usize,
    pub values: Vec<Complex64>,
    pub grads: Option<Vec<[Complex64; 3]>>,
}

impl Jets {
    fn require_grads(&self) -> Result<&Vec<[Complex64; 3]>> {
        self.grads.as_ref().ok_or_else(|| {
            Error::Unsupported(
                "operator needs derivatives of an input that has none (a derivative \
                 operator was applied to the image of another derivative operator)"
                    .into(),
            )
        })
    }
}

/// Components of the boosted position operator x̂′ (spinless), in the
/// Hermitian form with every product of a multiplier and x̂ symmetrised.
///
/// x̂′ = x̂_⊥ − ½{β_⊥/(1+β0·β), β0·x̂} + ½{1/(γ0(1+β0·β)), x̂_∥} n̂, written
/// as Σ_j ½{G_kj(p), x̂_j} with
/// G_kj = δ_kj − n_k n_j − |β0| h_k n_j + f n_k n_j.
pub fn boosted_position(m0: f64, beta0: &Velocity3) -> [Operator; 3] {
    let b0 = beta0.vector();
    let speed = b0.norm();
    if speed == 0.0 {
        return [Operator::Position(0), Operator::Position(1), Operator::Position(2)];
    }
    let n = b0 / speed;
    let g0 = beta0.gamma();
    let make = |k: usize| -> Operator {
        let ms: [Multiplier; 3] = std::array::from_fn(|j| {
            let delta = if j == k { 1.0 } else { 0.0 };
            Multiplier::new(format!("G{k}{j}"), move |p: &[Dual; 3]| {
                let w = energy(p, m0);
                let beta = [p[0] / w, p[1] / w, p[2] / w];
                let denom = dual::dot_const(&beta, &b0) + 1.0;
                let bpar = dual::dot_const(&beta, &n);
                // h_k = β_⊥,k/(1+β0·β)
                let h = (beta[k] - bpar * n[k]) / denom;
                let f = denom.recip() / g0;
                Dual::constant(delta - n[k] * n[j]) - h * (speed * n[j]) + f * (n[k] * n[j])
            })
        });
        Operator::Symmetrized(ms)
    };
    [make(0), make(1), make(2)]
}

/// Ĥ′ = γ0(Ĥ + β0·P̂).
pub fn boosted_energy(m0: f64, beta0: &Velocity3) -> Multiplier {
    let b0 = beta0.vector();
    let g0 = beta0.gamma();
    Multiplier::new("H'", move |p| (energy(p, m0) + dual::dot_const(p, &b0)) * g0)
}

/// P̂′_j, the spatial part of the boosted four-momentum.
pub fn boosted_momentum(m0: f64, beta0: &Velocity3, j: usize) -> Multiplier {
    let b0 = beta0.vector();
    let g0 = beta0.gamma();
    let speed = b0.norm();
    let n = if speed > 0.0 { b0 / speed } else { Vector3::zeros() };
    Multiplier::new(format!("P'{j}"), move |p| {
        let par = dual::dot_const(p, &n);
        p[j] + par * ((g0 - 1.0) * n[j]) + energy(p, m0) * (g0 * b0[j])
    })
}

/// β̂′_j: velocity of each momentum mode after the boost.
pub fn boosted_velocity(m0: f64, beta0: &Velocity3, j: usize) -> Multiplier {
    let b0 = beta0.vector();
    let g0 = beta0.gamma();
    let speed = b0.norm();
    let n = if speed > 0.0 { b0 / speed } else { Vector3::zeros() };
    Multiplier::new(format!("beta'{j}"), move |p| {
        let w = energy(p, m0);
        let beta = [p[0] / w, p[1] / w, p[2] / w];
        let bpar = dual::dot_const(&beta, &n);
        let perp = beta[j] - bpar * n[j];
        let num = perp + (bpar * n[j] + b0[j]) * g0;
        num / ((dual::dot_const(&beta, &b0) + 1.0) * g0)
    })
}
