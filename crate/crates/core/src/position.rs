//! Newton–Wigner position amplitudes ψ_m(t, x⃗) and position operators.
//!
//! ψ_m(t, x⃗) = ∫d³p/(2π)^{3/2} Ψ_m(p) e^{i(p⃗·x⃗ − ωt)} on the conjugate
//! grid of the momentum grid. Evolution is the exact multiplier e^{−iωΔt}.

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::amplitudes::{
    expectation, scalar_product, CovariantAmplitude, MomentumAmplitude, ParticleSpec,
};
use crate::error::{Error, Result};
use crate::fourier::{FourierEngine, GridSpec};
use crate::kinematics::{energy, pure_boost, FourVector, Velocity3};
use crate::operators::{boosted_position, boosted_velocity, Multiplier, Operator};
use crate::poincare::{self, PoincareElement};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Edge-cell probability above which a position grid is flagged as aliased.
pub const ALIASING_THRESHOLD: f64 = 1e-8;

/// Samples of ψ_m(t, x⃗) on the position grid conjugate to `spec`.
#[derive(Clone, Debug)]
pub struct PositionAmplitude {
    particle: ParticleSpec,
    spec: GridSpec,
    t: f64,
    comps: Vec<Vec<Complex64>>,
}

impl PositionAmplitude {
    pub fn new(particle: ParticleSpec, spec: GridSpec, t: f64, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.len() != particle.spin().dim() || comps.iter().any(|c| c.len() != spec.len()) {
            return Err(Error::usage("component count or length does not match the particle and grid"));
        }
        Ok(Self { particle, spec, t, comps })
    }

    pub fn particle(&self) -> &ParticleSpec {
        &self.particle
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    /// ∫d³x Σ_m |ψ_m|².
    pub fn norm_squared(&self) -> f64 {
        self.comps.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>() * self.spec.cell_volume_x()
    }

    pub fn scalar_product(&self, other: &PositionAmplitude) -> Result<Complex64> {
        if self.spec != other.spec || self.comps.len() != other.comps.len() {
            return Err(Error::usage("position amplitudes on different grids or spins"));
        }
        let s: Complex64 = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>())
            .sum();
        Ok(s * self.spec.cell_volume_x())
    }

    /// Σ_m |ψ_m(x)|² at each grid point.
    pub fn density(&self) -> Vec<f64> {
        (0..self.spec.len()).map(|i| self.comps.iter().map(|c| c[i].norm_sqr()).sum()).collect()
    }

    /// Fraction of the probability in the outermost layer of cells.
    pub fn boundary_fraction(&self) -> f64 {
        self.spec.boundary_fraction(&self.comps)
    }

    pub fn is_aliased(&self) -> bool {
        self.boundary_fraction() > ALIASING_THRESHOLD
    }

    /// ∫d³x x⃗ Σ_m |ψ_m|² (grid moment).
    pub fn mean_position(&self) -> Vector3<f64> {
        let rho = self.density();
        let mut acc = Vector3::zeros();
        for (i, r) in rho.iter().enumerate() {
            acc += self.spec.position(i) * *r;
        }
        acc * self.spec.cell_volume_x()
    }

    /// Root-mean-square width of the density along `dir`.
    pub fn width_along(&self, dir: &Vector3<f64>) -> f64 {
        let n = dir.normalize();
        let rho = self.density();
        let total: f64 = rho.iter().sum();
        let mean: f64 = rho.iter().enumerate().map(|(i, r)| r * self.spec.position(i).dot(&n)).sum::<f64>() / total;
        let var: f64 = rho
            .iter()
            .enumerate()
            .map(|(i, r)| r * (self.spec.position(i).dot(&n) - mean).powi(2))
            .sum::<f64>()
            / total;
        var.sqrt()
    }

    /// Ψ_m(p) at t = 0: e^{+iωt} times the forward transform.
    pub fn to_momentum(&self) -> MomentumAmplitude {
        let eng = FourierEngine::new(self.spec);
        let m0 = self.particle.m0();
        let spec = self.spec;
        let t = self.t;
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let mut d = eng.position_to_momentum(c);
                if t != 0.0 {
                    d.par_iter_mut().enumerate().for_each(|(i, z)| {
                        *z *= Complex64::from_polar(1.0, energy(m0, &spec.momentum(i)) * t);
                    });
                }
                d
            })
            .collect();
        MomentumAmplitude::grid_unchecked(self.particle, spec, comps)
    }

    /// Ĥψ = F⁻¹[ω F ψ] at the same time.
    pub fn apply_hamiltonian(&self) -> PositionAmplitude {
        self.apply_multiplier(|p| energy(self.particle.m0(), p))
    }

    /// ∇²ψ, spectrally.
    pub fn laplacian(&self) -> PositionAmplitude {
        self.apply_multiplier(|p| -p.norm_squared())
    }

    fn apply_multiplier<F: Fn(&Vector3<f64>) -> f64 + Sync>(&self, f: F) -> PositionAmplitude {
        let eng = FourierEngine::new(self.spec);
        let spec = self.spec;
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let mut d = eng.position_to_momentum(c);
                d.par_iter_mut().enumerate().for_each(|(i, z)| *z *= f(&spec.momentum(i)));
                eng.momentum_to_position(&d)
            })
            .collect();
        PositionAmplitude { comps, ..self.clone() }
    }
}

/// Sample (if needed) and transform to position space at time t.
pub fn to_position(psi: &MomentumAmplitude, t: f64) -> Result<PositionAmplitude> {
    let grid = if psi.is_grid() { psi.clone() } else { psi.sample_to_grid(psi.default_grid()?)? };
    let spec = grid.grid_spec().expect("grid carrier");
    let m0 = psi.particle().m0();
    let eng = FourierEngine::new(spec);
    let comps = grid
        .grid_components()
        .expect("grid carrier")
        .into_iter()
        .map(|mut c| {
            if t != 0.0 {
                c.par_iter_mut().enumerate().for_each(|(i, z)| {
                    *z *= Complex64::from_polar(1.0, -energy(m0, &spec.momentum(i)) * t);
                });
            }
            eng.momentum_to_position(&c)
        })
        .collect();
    let out = PositionAmplitude { particle: *psi.particle(), spec, t, comps };
    if out.is_aliased() {
        log::warn!(
            "position grid edge carries probability fraction {:e}; the packet wraps around the box",
            out.boundary_fraction()
        );
    }
    Ok(out)
}

/// ψ(t) → ψ(t + Δt).
pub fn evolve(psi: &PositionAmplitude, dt: f64) -> PositionAmplitude {
    if dt == 0.0 {
        return psi.clone();
    }
    let eng = FourierEngine::new(psi.spec);
    let spec = psi.spec;
    let m0 = psi.particle.m0();
    let comps = psi
        .comps
        .iter()
        .map(|c| {
            let mut d = eng.position_to_momentum(c);
            d.par_iter_mut().enumerate().for_each(|(i, z)| {
                *z *= Complex64::from_polar(1.0, -energy(m0, &spec.momentum(i)) * dt);
            });
            eng.momentum_to_position(&d)
        })
        .collect();
    PositionAmplitude { comps, t: psi.t + dt, ..psi.clone() }
}

/// Relative Klein–Gordon residual ‖(∂²_t − ∇² + m0²)ψ‖ / ‖m0² ψ‖ with an
/// eighth-order central difference in time (step `h`) and exact spatial
/// derivatives.
pub fn klein_gordon_residual(psi: &PositionAmplitude, h: f64) -> f64 {
    const C: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
    let m2 = psi.particle.m0().powi(2);
    let lap = psi.laplacian();
    let mut acc: Vec<Vec<Complex64>> = psi.comps.iter().map(|c| c.iter().map(|z| z * C[0]).collect()).collect();
    for (k, ck) in C.iter().enumerate().skip(1) {
        for sgn in [-1.0, 1.0] {
            let s = evolve(psi, sgn * k as f64 * h);
            for (a, c) in acc.iter_mut().zip(&s.comps) {
                for (x, y) in a.iter_mut().zip(c) {
                    *x += y * *ck;
                }
            }
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for ((a, l), c) in acc.iter().zip(&lap.comps).zip(&psi.comps) {
        for ((d2t, lp), z) in a.iter().zip(l).zip(c) {
            num += (d2t / (h * h) - lp + z * m2).norm_sqr();
            den += (z * m2).norm_sqr();
        }
    }
    (num / den).sqrt()
}

/// i∂Ψ/∂p_j for j = 0, 1, 2.
pub fn position_operator_apply(psi: &MomentumAmplitude) -> [MomentumAmplitude; 3] {
    std::array::from_fn(|j| psi.apply_operator(Operator::Position(j)))
}

/// |⟨a|Ô b⟩ − ⟨Ô a|b⟩|.
pub fn hermiticity_defect(a: &MomentumAmplitude, b: &MomentumAmplitude, op: &Operator) -> Result<f64> {
    let lhs = scalar_product(a, &b.apply_operator(op.clone()))?;
    let rhs = scalar_product(&a.apply_operator(op.clone()), b)?;
    Ok((lhs - rhs).norm())
}

/// Both sides of the Newton–Wigner identity, per component j:
/// ∫(d³p/ω) Φ_a* (i∂_j − ip_j/2ω²) Φ_b and ∫d³p Ψ_a* i∂_j Ψ_b.
pub fn nw_identity_check(a: &CovariantAmplitude, b: &CovariantAmplitude) -> Result<[(Complex64, Complex64); 3]> {
    let m0 = a.probability().particle().m0();
    let mut out = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 3];
    for (j, o) in out.iter_mut().enumerate() {
        let corr = Multiplier::new(format!("p{j}/2w^2"), move |p| {
            let w2 = crate::dual::dot(p, p) + m0 * m0;
            p[j] / (w2 * 2.0)
        });
        let nw = Operator::sum(vec![Operator::Position(j), Operator::Multiply(corr).scale(-I)]);
        let measure = Operator::Multiply(Multiplier::new("1/w", move |p| {
            crate::operators::energy(p, m0).recip()
        }));
        let lhs = scalar_product(a.phi(), &b.phi().apply_operator(measure.then(nw)))?;
        let rhs = scalar_product(a.probability(), &b.probability().apply_operator(Operator::Position(j)))?;
        *o = (lhs, rhs);
    }
    Ok(out)
}

/// Transform a position amplitude by a Poincaré element (or inversion) via
/// momentum space. The time label is kept, except under time reversal
/// where the snapshot at t becomes the snapshot at −t.
pub fn position_transforms(psi: &PositionAmplitude, g: &PoincareElement) -> Result<PositionAmplitude> {
    let m = poincare::apply(&psi.to_momentum(), g)?;
    let t = match g {
        PoincareElement::TimeReversal => -psi.t,
        _ => psi.t,
    };
    to_position(&m, t)
}

/// Boost of a position amplitude: forward transform, momentum-space boost,
/// inverse transform. Returns the probability lost through the box.
pub fn boost_position_amplitude(psi: &PositionAmplitude, beta: &Velocity3) -> Result<(PositionAmplitude, f64)> {
    let rep = poincare::boost_with_report(&psi.to_momentum(), beta)?;
    Ok((to_position(&rep.amplitude, psi.t)?, rep.lost_mass))
}

fn require_spinless(psi: &MomentumAmplitude, what: &str) -> Result<()> {
    if psi.spin().two_s() != 0 {
        return Err(Error::Unsupported(format!(
            "{what} is only defined for spin 0, got spin {}",
            psi.spin()
        )));
    }
    Ok(())
}

/// x̂′Ψ componentwise, in the anticommutator form.
pub fn boosted_position_operator_apply(psi: &MomentumAmplitude, beta0: &Velocity3) -> Result<[MomentumAmplitude; 3]> {
    require_spinless(psi, "the boosted position operator")?;
    let ops = boosted_position(psi.particle().m0(), beta0);
    Ok(ops.map(|op| psi.apply_operator(op)))
}

/// Result of the average-event experiment.
#[derive(Clone, Debug)]
pub struct AverageEvent {
    /// (t, ⟨x̂(t)⟩).
    pub x: FourVector,
    /// (t′, ⟨x̂′(t′)⟩).
    pub x_primed: FourVector,
    /// Λx for comparison.
    pub lambda_x: FourVector,
    /// β̄²(σp/|p̄|)².
    pub epsilon_bound: f64,
    /// ‖x′ − Λx‖/‖Λx‖ (Euclidean norms of the components).
    pub relative_deviation: f64,
}

/// Largest ε bound accepted by [`average_event`].
pub const EPSILON_BOUND_LIMIT: f64 = 0.1;

/// Compare the transformed expectation event with the Lorentz image of the
/// original one for a narrow spinless Gaussian.
pub fn average_event(psi: &MomentumAmplitude, beta0: &Velocity3, t: f64) -> Result<AverageEvent> {
    require_spinless(psi, "the average-event construction")?;
    let packet = match (psi.base_packet(), psi.chain_len()) {
        (Some(p), 0) => p.clone(),
        _ => {
            return Err(Error::Unsupported(
                "average events are only available for untransformed Gaussian packets".into(),
            ))
        }
    };
    let m0 = psi.particle().m0();
    let pbar = packet.p_bar();
    let pn = pbar.norm();
    let bound = if pn > 0.0 {
        let beta_bar2 = pn * pn / (pn * pn + m0 * m0);
        beta_bar2 * (packet.sigma_p() / pn).powi(2)
    } else {
        f64::INFINITY
    };
    if !(bound < EPSILON_BOUND_LIMIT) {
        return Err(Error::PacketTooWide { bound, limit: EPSILON_BOUND_LIMIT });
    }
    // Heisenberg picture: x̂(t) = x̂ + β̂t, x̂′(t′) = x̂′ + β̂′t′
    let mut x = Vector3::zeros();
    for j in 0..3 {
        let op = Operator::sum(vec![
            Operator::Position(j),
            Operator::Multiply(Multiplier::velocity(m0, j)).scale(Complex64::new(t, 0.0)),
        ]);
        x[j] = expectation(psi, &op)?.re;
    }
    let tp = beta0.gamma() * (t + beta0.vector().dot(&x));
    let xps = boosted_position(m0, beta0);
    let mut xp = Vector3::zeros();
    for (j, xop) in xps.into_iter().enumerate() {
        let op = Operator::sum(vec![
            xop,
            Operator::Multiply(boosted_velocity(m0, beta0, j)).scale(Complex64::new(tp, 0.0)),
        ]);
        xp[j] = expectation(psi, &op)?.re;
    }
    let x4 = FourVector::from_parts(t, x);
    let xp4 = FourVector::from_parts(tp, xp);
    let lx = pure_boost(beta0).apply(&x4);
    let relative_deviation = (xp4.0 - lx.0).norm() / lx.0.norm();
    Ok(AverageEvent { x: x4, x_primed: xp4, lambda_x: lx, epsilon_bound: bound, relative_deviation })
}

#[cfg(test)]
mod tests;
