//! Gaussian base packets with a lazily composed chain of transformations.
//!
//! The chain is evaluated by pulling the momentum back through every step to
//! the base Gaussian, then pushing the spin vector forward through the
//! pointwise factors (phases, D-matrices, Jacobians).

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::Result;
use crate::kinematics::{energy, wigner_su2_between, LorentzMatrix, RotationMatrix, Velocity3, FourVector, WIGNER_TOLERANCE};
use crate::spin::{wigner_d, Sl2c, SpinValue, WignerDMatrix};

use super::GaussianPacket;

#[derive(Clone, Debug)]
pub(crate) enum ChainOp {
    Translation { a0: f64, a: Vector3<f64> },
    Rotation { r: RotationMatrix, d: WignerDMatrix },
    Boost { lambda: LorentzMatrix, inv: LorentzMatrix, lift: Sl2c, beta: Velocity3 },
    Parity { eta: f64 },
    TimeReversal,
}

impl ChainOp {
    pub(crate) fn rotation(r: &RotationMatrix, spin: SpinValue) -> Self {
        let d = wigner_d(spin, &crate::spin::su2_from_rotation(r));
        ChainOp::Rotation { r: *r, d }
    }

    pub(crate) fn boost(beta: &Velocity3) -> Self {
        let lambda = crate::kinematics::pure_boost(beta);
        ChainOp::Boost { inv: lambda.inverse(), lambda, lift: Sl2c::boost(beta), beta: *beta }
    }

    /// Argument at which the previous level is evaluated.
    fn pullback(&self, m0: f64, p: &Vector3<f64>) -> Vector3<f64> {
        match self {
            ChainOp::Translation { .. } => *p,
            ChainOp::Rotation { r, .. } => r.inverse().apply(p),
            ChainOp::Boost { inv, .. } => inv.apply(&FourVector::from_parts(energy(m0, p), *p)).spatial(),
            ChainOp::Parity { .. } | ChainOp::TimeReversal => -p,
        }
    }

    /// Forward kinematic map and |det| of its Jacobian.
    fn forward(&self, m0: f64, q: &Vector3<f64>) -> (Vector3<f64>, f64) {
        match self {
            ChainOp::Translation { .. } => (*q, 1.0),
            ChainOp::Rotation { r, .. } => (r.apply(q), 1.0),
            ChainOp::Boost { lambda, .. } => {
                let w = energy(m0, q);
                let l = lambda.matrix();
                let p = lambda.apply(&FourVector::from_parts(w, *q)).spatial();
                // ∂p_i/∂q_j = Λ^i_j + Λ^i_0 q_j/ω
                let jac = Matrix3::from_fn(|i, j| l[(i + 1, j + 1)] + l[(i + 1, 0)] * q[j] / w);
                (p, jac.determinant().abs())
            }
            ChainOp::Parity { .. } | ChainOp::TimeReversal => (-q, 1.0),
        }
    }

    /// Map the spin vector `v` of the previous level at q to this level at p.
    fn push(&self, spin: SpinValue, m0: f64, q: &Vector3<f64>, p: &Vector3<f64>, v: &mut Vec<Complex64>) -> Result<()> {
        match self {
            ChainOp::Translation { a0, a } => {
                let phase = Complex64::from_polar(1.0, energy(m0, p) * a0 - p.dot(a));
                for x in v.iter_mut() {
                    *x *= phase;
                }
            }
            ChainOp::Rotation { d, .. } => {
                if spin.two_s() > 0 {
                    *v = d.apply(v);
                }
            }
            ChainOp::Boost { lift, .. } => {
                let jac = (energy(m0, q) / energy(m0, p)).sqrt();
                if spin.two_s() > 0 {
                    let w = wigner_su2_between(lift, m0, q, p, WIGNER_TOLERANCE)?;
                    *v = wigner_d(spin, &w).apply(v);
                }
                for x in v.iter_mut() {
                    *x *= jac;
                }
            }
            ChainOp::Parity { eta } => {
                for x in v.iter_mut() {
                    *x *= *eta;
                }
            }
            ChainOp::TimeReversal => {
                *v = time_reverse_spin(v);
            }
        }
        Ok(())
    }

    /// Factor by which this step stretches momentum-space features.
    fn stretch(&self) -> f64 {
        match self {
            ChainOp::Boost { beta, .. } => beta.gamma() * (1.0 + beta.speed()),
            _ => 1.0,
        }
    }
}

/// out[i] = (−1)^{n−i} conj(v[n−i]) with n = 2s, i.e. (−)^{s+m} Ψ*_{−m}.
pub(crate) fn time_reverse_spin(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len() - 1;
    (0..=n)
        .map(|i| {
            let s = if (n - i) % 2 == 0 { 1.0 } else { -1.0 };
            v[n - i].conj() * s
        })
        .collect()
}

#[derive(Clone, Debug)]
pub(crate) struct AnalyticState {
    pub base: GaussianPacket,
    pub ops: Vec<ChainOp>,
}

impl AnalyticState {
    pub fn with_op(&self, op: ChainOp) -> Self {
        let mut ops = self.ops.clone();
        ops.push(op);
        Self { base: self.base.clone(), ops }
    }

    pub fn eval(&self, spin: SpinValue, m0: f64, p: &Vector3<f64>) -> Result<Vec<Complex64>> {
        let k = self.ops.len();
        let mut pts = Vec::with_capacity(k + 1);
        pts.push(*p);
        for op in self.ops.iter().rev() {
            let prev = op.pullback(m0, pts.last().unwrap());
            pts.push(prev);
        }
        pts.reverse();
        let mut v = self.base.eval(&pts[0]);
        for (i, op) in self.ops.iter().enumerate() {
            op.push(spin, m0, &pts[i], &pts[i + 1], &mut v)?;
        }
        Ok(v)
    }

    /// Value and ∂/∂p_a; exact for the bare Gaussian, fourth-order central
    /// differences otherwise.
    pub fn eval_jet(&self, spin: SpinValue, m0: f64, p: &Vector3<f64>) -> Result<(Vec<Complex64>, Vec<[Complex64; 3]>)> {
        if self.ops.is_empty() {
            return Ok(self.base.eval_jet(p));
        }
        let v = self.eval(spin, m0, p)?;
        let h = self.fd_step();
        let mut grads = vec![[Complex64::new(0.0, 0.0); 3]; v.len()];
        for a in 0..3 {
            let mut e = Vector3::zeros();
            e[a] = h;
            let fm2 = self.eval(spin, m0, &(p - e * 2.0))?;
            let fm1 = self.eval(spin, m0, &(p - e))?;
            let fp1 = self.eval(spin, m0, &(p + e))?;
            let fp2 = self.eval(spin, m0, &(p + e * 2.0))?;
            for c in 0..v.len() {
                grads[c][a] = (fm2[c] - fm1[c] * 8.0 + fp1[c] * 8.0 - fp2[c]) / (12.0 * h);
            }
        }
        Ok((v, grads))
    }

    fn fd_step(&self) -> f64 {
        let scale = self
            .base
            .sigma_p()
            .min(1.0 / (1.0 + self.base.x_bar().norm()));
        let stretch: f64 = self.ops.iter().map(|o| o.stretch()).product();
        1e-3 * scale / stretch
    }

    /// Forward map from base momentum q to the final momentum, with |det|.
    pub fn forward(&self, m0: f64, q: &Vector3<f64>) -> (Vector3<f64>, f64) {
        let mut p = *q;
        let mut det = 1.0;
        for op in &self.ops {
            let (np, d) = op.forward(m0, &p);
            p = np;
            det *= d;
        }
        (p, det)
    }

    /// Inverse of [`AnalyticState::forward`].
    pub fn pre_image(&self, m0: f64, p: &Vector3<f64>) -> Vector3<f64> {
        let mut q = *p;
        for op in self.ops.iter().rev() {
            q = op.pullback(m0, &q);
        }
        q
    }
}
