//! Poincaré transformations and the two inversions acting on momentum
//! amplitudes.
//!
//! Analytic carriers get the step appended to their lazy chain, so every
//! later evaluation is exact. Grid carriers are resampled once per call:
//! rotations by three trigonometric shears per Euler angle, boosts by
//! trigonometric resampling along the boost axis (oblique boosts are
//! rotated onto the z axis and back).

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::amplitudes::{time_reverse_spin, ChainOp, MomentumAmplitude};
use crate::error::{Error, Result};
use crate::fourier::{FourierEngine, GridSpec};
use crate::kinematics::{
    energy, pure_boost, wigner_su2_between, FourVector, LorentzMatrix, RotationMatrix, Velocity3, WIGNER_TOLERANCE,
};
use crate::spin::{su2_from_rotation, wigner_d, Sl2c, SpinValue, Su2Matrix};

/// Mass lost through the box boundary above which a grid boost warns.
pub const LOST_MASS_WARNING: f64 = 1e-10;

/// An element of the Poincaré group or one of the two inversions.
#[derive(Clone, Debug, PartialEq)]
pub enum PoincareElement {
    /// Spacetime translation by a = (a⁰, a⃗).
    Translation(FourVector),
    Rotation(RotationMatrix),
    Boost(Velocity3),
    Parity,
    TimeReversal,
}

impl PoincareElement {
    /// Homogeneous part acting on four-momenta.
    pub fn lorentz(&self) -> LorentzMatrix {
        match self {
            PoincareElement::Translation(_) => LorentzMatrix::identity(),
            PoincareElement::Rotation(r) => LorentzMatrix::from_rotation(r),
            PoincareElement::Boost(b) => pure_boost(b),
            PoincareElement::Parity | PoincareElement::TimeReversal => {
                // p⃗ → −p⃗ in both cases; energy unchanged
                LorentzMatrix::spatial_reflection()
            }
        }
    }

    /// Image of an on-shell momentum p⃗ under the element.
    pub fn momentum_map(&self, m0: f64, p: &Vector3<f64>) -> Vector3<f64> {
        self.lorentz().apply(&FourVector::from_parts(energy(m0, p), *p)).spatial()
    }

    pub fn name(&self) -> &'static str {
        match self {
            PoincareElement::Translation(_) => "translation",
            PoincareElement::Rotation(_) => "rotation",
            PoincareElement::Boost(_) => "boost",
            PoincareElement::Parity => "parity",
            PoincareElement::TimeReversal => "time_reversal",
        }
    }
}

/// Outcome of a boost: the amplitude and the probability that left the box
/// (always 0 for analytic carriers).
#[derive(Clone, Debug)]
pub struct BoostReport {
    pub amplitude: MomentumAmplitude,
    pub lost_mass: f64,
}

fn derived_unsupported(name: &str) -> Error {
    Error::Unsupported(format!("{name} of an operator image; transform the source amplitude instead"))
}

/// Ψ′_m(p) = Ψ_m(p) e^{i(ω a⁰ − p⃗·a⃗)}.
pub fn translate(psi: &MomentumAmplitude, a: &FourVector) -> Result<MomentumAmplitude> {
    let m0 = psi.particle().m0();
    if let Some((g, scale)) = psi.grid_data() {
        let comps = g
            .comps
            .iter()
            .map(|c| {
                c.iter()
                    .enumerate()
                    .map(|(i, z)| {
                        let p = g.spec.momentum(i);
                        z * Complex64::from_polar(1.0, energy(m0, &p) * a.t() - p.dot(&a.spatial()))
                    })
                    .collect()
            })
            .collect();
        return Ok(psi.with_grid(g.spec, comps, scale));
    }
    let st = psi.analytic_state().ok_or_else(|| derived_unsupported("translation"))?;
    Ok(psi.with_analytic(st.with_op(ChainOp::Translation { a0: a.t(), a: a.spatial() })))
}

/// Ψ′(p) = D^(s)(R) Ψ(R⁻¹p).
pub fn rotate(psi: &MomentumAmplitude, r: &RotationMatrix) -> Result<MomentumAmplitude> {
    if let Some((g, scale)) = psi.grid_data() {
        let eng = FourierEngine::new(g.spec);
        let u = su2_from_rotation(r);
        let comps = rotate_grid(&eng, &g.comps, r, &u, psi.spin());
        return Ok(psi.with_grid(g.spec, comps, scale));
    }
    let st = psi.analytic_state().ok_or_else(|| derived_unsupported("rotation"))?;
    Ok(psi.with_analytic(st.with_op(ChainOp::rotation(r, psi.spin()))))
}

/// Ψ′(p) = √(ω(Λ⁻¹p)/ω(p)) D^(s)(W(p←Λ⁻¹p)) Ψ(Λ⁻¹p).
pub fn boost(psi: &MomentumAmplitude, beta: &Velocity3) -> Result<MomentumAmplitude> {
    Ok(boost_with_report(psi, beta)?.amplitude)
}

/// [`boost`], also reporting the probability pushed out of a grid box.
pub fn boost_with_report(psi: &MomentumAmplitude, beta: &Velocity3) -> Result<BoostReport> {
    if let Some((g, scale)) = psi.grid_data() {
        let eng = FourierEngine::new(g.spec);
        let before = grid_norm(&g.spec, &g.comps);
        let comps = boost_grid(&eng, &g.comps, beta, psi.particle().m0(), psi.spin())?;
        let after = grid_norm(&g.spec, &comps);
        let lost_mass = ((before - after) * scale.norm_sqr()).max(0.0);
        if lost_mass > LOST_MASS_WARNING {
            log::warn!("grid boost pushed probability {lost_mass:e} out of the box; enlarge pmax");
        }
        return Ok(BoostReport { amplitude: psi.with_grid(g.spec, comps, scale), lost_mass });
    }
    let st = psi.analytic_state().ok_or_else(|| derived_unsupported("boost"))?;
    Ok(BoostReport { amplitude: psi.with_analytic(st.with_op(ChainOp::boost(beta))), lost_mass: 0.0 })
}

/// Ψ′_m(p) = η Ψ_m(−p).
pub fn parity(psi: &MomentumAmplitude) -> Result<MomentumAmplitude> {
    let eta = psi.particle().eta().value();
    if let Some((g, scale)) = psi.grid_data() {
        let comps = g
            .comps
            .iter()
            .map(|c| (0..g.spec.len()).map(|i| c[g.spec.mirror(i)] * eta).collect())
            .collect();
        return Ok(psi.with_grid(g.spec, comps, scale));
    }
    let st = psi.analytic_state().ok_or_else(|| derived_unsupported("parity"))?;
    Ok(psi.with_analytic(st.with_op(ChainOp::Parity { eta })))
}

/// Ψ′_m(p) = (−)^{s+m} Ψ*_{−m}(−p). Antiunitary: an overall scale c on the
/// input becomes c*.
pub fn time_reverse(psi: &MomentumAmplitude) -> Result<MomentumAmplitude> {
    if let Some((g, scale)) = psi.grid_data() {
        let dim = g.comps.len();
        let mut comps = vec![vec![Complex64::new(0.0, 0.0); g.spec.len()]; dim];
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        for i in 0..g.spec.len() {
            let j = g.spec.mirror(i);
            for (c, x) in v.iter_mut().enumerate() {
                *x = g.comps[c][j];
            }
            for (c, x) in time_reverse_spin(&v).into_iter().enumerate() {
                comps[c][i] = x;
            }
        }
        return Ok(psi.with_grid(g.spec, comps, scale.conj()));
    }
    let st = psi.analytic_state().ok_or_else(|| derived_unsupported("time reversal"))?;
    let out = psi.with_analytic(st.with_op(ChainOp::TimeReversal));
    Ok(out.with_scale(psi.scale_factor().conj()))
}

/// Apply one element.
pub fn apply(psi: &MomentumAmplitude, g: &PoincareElement) -> Result<MomentumAmplitude> {
    match g {
        PoincareElement::Translation(a) => translate(psi, a),
        PoincareElement::Rotation(r) => rotate(psi, r),
        PoincareElement::Boost(b) => boost(psi, b),
        PoincareElement::Parity => parity(psi),
        PoincareElement::TimeReversal => time_reverse(psi),
    }
}

/// Apply elements in order (first element acts first).
pub fn apply_all(psi: &MomentumAmplitude, seq: &[PoincareElement]) -> Result<MomentumAmplitude> {
    let mut out = psi.clone();
    for g in seq {
        out = apply(&out, g)?;
    }
    Ok(out)
}

fn grid_norm(spec: &GridSpec, comps: &[Vec<Complex64>]) -> f64 {
    comps.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>() * spec.cell_volume_p()
}

/// Position of `target` among the two indices (u, v) that label lines along
/// `axis`.
fn other_index(axis: usize, target: usize, u: usize, v: usize) -> usize {
    let first = if axis == 0 { 1 } else { 0 };
    if target == first {
        u
    } else {
        v
    }
}

/// f(p) → f(R_π p) for the half-turn about `axis`: exact index reversal in
/// the other two axes.
fn half_turn(spec: &GridSpec, data: &[Complex64], axis: usize) -> Vec<Complex64> {
    let n = spec.n();
    (0..spec.len())
        .map(|idx| {
            let mut ijk = spec.unravel(idx);
            for (a, x) in ijk.iter_mut().enumerate() {
                if a != axis {
                    *x = (n - *x) % n;
                }
            }
            data[spec.index(ijk[0], ijk[1], ijk[2])]
        })
        .collect()
}

/// f(p) → f(R_axis(angle)⁻¹ p) by three shears (plus an exact half turn when
/// the residual angle would exceed π/2).
fn rotate_about(eng: &FourierEngine, data: &mut Vec<Complex64>, axis: usize, angle: f64) {
    let spec = *eng.spec();
    // (axis, b, c) cyclic; in the (b, c) plane R_axis(θ) = Rot(θ)
    let (b, c) = ((axis + 1) % 3, (axis + 2) % 3);
    let mut phi = (-angle).rem_euclid(2.0 * std::f64::consts::PI);
    if phi > std::f64::consts::PI {
        phi -= 2.0 * std::f64::consts::PI;
    }
    if phi.abs() > std::f64::consts::FRAC_PI_2 {
        *data = half_turn(&spec, data, axis);
        phi -= std::f64::consts::PI * phi.signum();
    }
    if phi == 0.0 {
        return;
    }
    // Rot(φ) = Sx(−t) Sy(s) Sx(−t) in (b, c)
    let t = (phi / 2.0).tan();
    let s = phi.sin();
    let shear_b = |u: usize, v: usize| -t * spec.coord_p(other_index(b, c, u, v));
    eng.shift_lines(data, b, shear_b);
    eng.shift_lines(data, c, |u, v| s * spec.coord_p(other_index(c, b, u, v)));
    eng.shift_lines(data, b, shear_b);
}

/// Euler angles with R = Rz(α) Ry(β) Rz(γ).
fn euler_zyz(r: &Matrix3<f64>) -> (f64, f64, f64) {
    let cb = r[(2, 2)].clamp(-1.0, 1.0);
    let sb = (r[(0, 2)].powi(2) + r[(1, 2)].powi(2)).sqrt();
    if sb > 1e-12 {
        let beta = sb.atan2(cb);
        (r[(1, 2)].atan2(r[(0, 2)]), beta, r[(2, 1)].atan2(-r[(2, 0)]))
    } else if cb > 0.0 {
        (r[(1, 0)].atan2(r[(0, 0)]), 0.0, 0.0)
    } else {
        ((-r[(1, 0)]).atan2(r[(1, 1)]), std::f64::consts::PI, 0.0)
    }
}

fn rotate_grid(
    eng: &FourierEngine,
    comps: &[Vec<Complex64>],
    r: &RotationMatrix,
    u: &Su2Matrix,
    spin: SpinValue,
) -> Vec<Vec<Complex64>> {
    let (alpha, beta, gamma) = euler_zyz(r.matrix());
    let mut out: Vec<Vec<Complex64>> = comps
        .iter()
        .map(|c| {
            let mut d = c.clone();
            rotate_about(eng, &mut d, 2, gamma);
            rotate_about(eng, &mut d, 1, beta);
            rotate_about(eng, &mut d, 2, alpha);
            d
        })
        .collect();
    if spin.two_s() > 0 {
        let d = wigner_d(spin, u);
        mix(&mut out, |_, v| d.apply(v));
    }
    out
}

/// Replace the spin vector at every point by f(point, vector).
fn mix<F>(comps: &mut [Vec<Complex64>], mut f: F)
where
    F: FnMut(usize, &[Complex64]) -> Vec<Complex64>,
{
    let dim = comps.len();
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    for i in 0..comps[0].len() {
        for (c, x) in v.iter_mut().enumerate() {
            *x = comps[c][i];
        }
        for (c, x) in f(i, &v).into_iter().enumerate() {
            comps[c][i] = x;
        }
    }
}

/// Boost along a coordinate axis with signed speed `b`.
fn boost_axis(
    eng: &FourierEngine,
    comps: &[Vec<Complex64>],
    axis: usize,
    b: f64,
    m0: f64,
    spin: SpinValue,
) -> Result<Vec<Vec<Complex64>>> {
    let spec = *eng.spec();
    let mut bv = Vector3::zeros();
    bv[axis] = b;
    let beta = Velocity3::new(bv)?;
    let gamma = beta.gamma();
    let point = |axis_k: usize, u: usize, v: usize| -> Vector3<f64> {
        let mut p = Vector3::zeros();
        let mut others = (0..3).filter(|&a| a != axis);
        let (a1, a2) = (others.next().unwrap(), others.next().unwrap());
        p[axis] = spec.coord_p(axis_k);
        p[a1] = spec.coord_p(u);
        p[a2] = spec.coord_p(v);
        p
    };
    let pull = |p: &Vector3<f64>| -> Vector3<f64> {
        let mut q = *p;
        q[axis] = gamma * (p[axis] - b * energy(m0, p));
        q
    };
    let mut out: Vec<Vec<Complex64>> = comps
        .iter()
        .map(|c| {
            let mut d = c.clone();
            eng.resample_lines(&mut d, axis, |u, v, k| pull(&point(k, u, v))[axis]);
            d
        })
        .collect();
    let lift = Sl2c::boost(&beta);
    let mut err = None;
    mix(&mut out, |i, v| {
        let p = spec.momentum(i);
        let q = pull(&p);
        let jac = (energy(m0, &q) / energy(m0, &p)).sqrt();
        let mut w = if spin.two_s() > 0 {
            match wigner_su2_between(&lift, m0, &q, &p, WIGNER_TOLERANCE) {
                Ok(u) => wigner_d(spin, &u).apply(v),
                Err(e) => {
                    err.get_or_insert(e);
                    v.to_vec()
                }
            }
        } else {
            v.to_vec()
        };
        for x in w.iter_mut() {
            *x *= jac;
        }
        w
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn boost_grid(
    eng: &FourierEngine,
    comps: &[Vec<Complex64>],
    beta: &Velocity3,
    m0: f64,
    spin: SpinValue,
) -> Result<Vec<Vec<Complex64>>> {
    let bv = beta.vector();
    let speed = bv.norm();
    if speed == 0.0 {
        return Ok(comps.to_vec());
    }
    let nonzero: Vec<usize> = (0..3).filter(|&a| bv[a] != 0.0).collect();
    if nonzero.len() == 1 {
        let a = nonzero[0];
        return boost_axis(eng, comps, a, bv[a], m0, spin);
    }
    // Λ(β) = R Bz(|β|) R⁻¹ with R ẑ = β̂
    let n = bv / speed;
    let axis = Vector3::z().cross(&n);
    let angle = n.z.clamp(-1.0, 1.0).acos();
    let r = if axis.norm() > 1e-15 {
        RotationMatrix::from_axis_angle(axis, angle)?
    } else {
        RotationMatrix::from_axis_angle(Vector3::x(), angle)?
    };
    let u = su2_from_rotation(&r);
    let rinv = r.inverse();
    let back = rotate_grid(eng, comps, &rinv, &u.adjoint(), spin);
    let boosted = boost_axis(eng, &back, 2, speed, m0, spin)?;
    Ok(rotate_grid(eng, &boosted, &r, &u, spin))
}

#[cfg(test)]
mod tests;
