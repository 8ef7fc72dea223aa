//! Momentum/spin probability amplitudes Ψ_m(p) and their covariant partners.
//!
//! Three carriers share one public type:
//! - analytic: a Gaussian packet plus a lazily composed chain of Poincaré
//!   steps, evaluated exactly at any p;
//! - grid: samples on a centred Cartesian grid (see [`crate::fourier`]);
//! - operator image: the result of applying a momentum-space operator to
//!   another amplitude, evaluated on demand.
//!
//! Integrals over analytic carriers use tensor-product Gauss–Hermite rules
//! laid out in the pre-image frame of the transformation chain, refined
//! until two successive orders agree. Grid integrals are cell sums.

mod analytic;
pub mod io;
mod rule;

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{FourierEngine, GridSpec};
use crate::kinematics::{energy, FourVector};
use crate::operators::{Jets, Multiplier, Operator};
use crate::spin::SpinValue;

pub(crate) use analytic::{time_reverse_spin, AnalyticState, ChainOp};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Grid tail mass allowed at construction (fraction in the boundary layer).
pub const GRID_TAIL_TOLERANCE: f64 = 1e-12;

/// Intrinsic parity η = ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub enum IntrinsicParity {
    Even,
    Odd,
}

impl IntrinsicParity {
    pub fn value(&self) -> f64 {
        match self {
            IntrinsicParity::Even => 1.0,
            IntrinsicParity::Odd => -1.0,
        }
    }
}

impl TryFrom<i32> for IntrinsicParity {
    type Error = Error;
    fn try_from(v: i32) -> Result<Self> {
        match v {
            1 => Ok(IntrinsicParity::Even),
            -1 => Ok(IntrinsicParity::Odd),
            _ => Err(Error::domain(format!("intrinsic parity must be +1 or -1, got {v}"))),
        }
    }
}

impl From<IntrinsicParity> for i32 {
    fn from(p: IntrinsicParity) -> i32 {
        match p {
            IntrinsicParity::Even => 1,
            IntrinsicParity::Odd => -1,
        }
    }
}

/// Rest mass, spin and intrinsic parity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParticleSpec {
    m0: f64,
    spin: SpinValue,
    eta: IntrinsicParity,
}

impl ParticleSpec {
    pub fn new(m0: f64, spin: SpinValue, eta: IntrinsicParity) -> Result<Self> {
        if !(m0 > 0.0) || !m0.is_finite() {
            return Err(Error::domain(format!("rest mass must be positive, got {m0}")));
        }
        Ok(Self { m0, spin, eta })
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn spin(&self) -> SpinValue {
        self.spin
    }

    pub fn eta(&self) -> IntrinsicParity {
        self.eta
    }

    pub fn energy(&self, p: &Vector3<f64>) -> f64 {
        energy(self.m0, p)
    }
}

/// Ψ_m(p) = (2πσp²)^{−3/4} exp(−|p−p̄|²/4σp²) exp(−ip·x̄) c_m.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPacket {
    p_bar: Vector3<f64>,
    sigma_p: f64,
    x_bar: Vector3<f64>,
    weights: Vec<Complex64>,
}

impl GaussianPacket {
    /// The spin weights are normalised here.
    pub fn new(p_bar: Vector3<f64>, sigma_p: f64, x_bar: Vector3<f64>, weights: Vec<Complex64>) -> Result<Self> {
        if !(sigma_p > 0.0) || !sigma_p.is_finite() {
            return Err(Error::domain(format!("sigma_p must be positive, got {sigma_p}")));
        }
        if !p_bar.iter().chain(x_bar.iter()).all(|x| x.is_finite()) {
            return Err(Error::domain("packet centre must be finite"));
        }
        let n: f64 = weights.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
        if weights.is_empty() || !(n > 0.0) || !n.is_finite() {
            return Err(Error::domain("spin weights must be finite and not all zero"));
        }
        let weights = weights.into_iter().map(|w| w / n).collect();
        Ok(Self { p_bar, sigma_p, x_bar, weights })
    }

    pub fn p_bar(&self) -> Vector3<f64> {
        self.p_bar
    }

    pub fn sigma_p(&self) -> f64 {
        self.sigma_p
    }

    pub fn x_bar(&self) -> Vector3<f64> {
        self.x_bar
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    fn envelope(&self, p: &Vector3<f64>) -> Complex64 {
        let s2 = self.sigma_p * self.sigma_p;
        let norm = (2.0 * std::f64::consts::PI * s2).powf(-0.75);
        Complex64::from_polar(norm * (-(p - self.p_bar).norm_squared() / (4.0 * s2)).exp(), -p.dot(&self.x_bar))
    }

    pub fn eval(&self, p: &Vector3<f64>) -> Vec<Complex64> {
        let e = self.envelope(p);
        self.weights.iter().map(|w| w * e).collect()
    }

    /// Values and exact gradients: ∂Ψ = {−(p−p̄)/2σp² − ix̄}Ψ.
    pub fn eval_jet(&self, p: &Vector3<f64>) -> (Vec<Complex64>, Vec<[Complex64; 3]>) {
        let e = self.envelope(p);
        let s2 = self.sigma_p * self.sigma_p;
        let d: [Complex64; 3] = std::array::from_fn(|a| e * Complex64::new(-(p[a] - self.p_bar[a]) / (2.0 * s2), -self.x_bar[a]));
        let vals = self.weights.iter().map(|w| w * e).collect();
        let grads = self.weights.iter().map(|w| [d[0] * w, d[1] * w, d[2] * w]).collect();
        (vals, grads)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct GridData {
    pub spec: GridSpec,
    pub comps: Vec<Vec<Complex64>>,
}

#[derive(Clone, Debug)]
pub(crate) struct DerivedState {
    pub source: MomentumAmplitude,
    pub op: Operator,
}

#[derive(Clone, Debug)]
pub(crate) enum Carrier {
    Analytic(Arc<AnalyticState>),
    Grid(Arc<GridData>),
    Derived(Arc<DerivedState>),
}

/// Ψ_m(p) for a particle of given spec on one of the carriers.
#[derive(Clone)]
pub struct MomentumAmplitude {
    particle: ParticleSpec,
    pub(crate) carrier: Carrier,
    scale: Complex64,
}

impl fmt::Debug for MomentumAmplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.carrier {
            Carrier::Analytic(a) => format!("analytic, {} chained steps", a.ops.len()),
            Carrier::Grid(g) => format!("grid {}^3, pmax {}", g.spec.n(), g.spec.pmax()),
            Carrier::Derived(d) => format!("operator image {:?}", d.op),
        };
        f.debug_struct("MomentumAmplitude")
            .field("particle", &self.particle)
            .field("carrier", &kind)
            .field("scale", &self.scale)
            .finish()
    }
}

impl MomentumAmplitude {
    /// Analytic Gaussian packet.
    pub fn gaussian(
        particle: ParticleSpec,
        p_bar: Vector3<f64>,
        sigma_p: f64,
        x_bar: Vector3<f64>,
        weights: Vec<Complex64>,
    ) -> Result<Self> {
        let packet = GaussianPacket::new(p_bar, sigma_p, x_bar, weights)?;
        Self::from_packet(particle, packet)
    }

    pub fn from_packet(particle: ParticleSpec, packet: GaussianPacket) -> Result<Self> {
        if packet.weights.len() != particle.spin.dim() {
            return Err(Error::usage(format!(
                "spin {} needs {} weights, got {}",
                particle.spin,
                particle.spin.dim(),
                packet.weights.len()
            )));
        }
        Ok(Self {
            particle,
            carrier: Carrier::Analytic(Arc::new(AnalyticState { base: packet, ops: Vec::new() })),
            scale: Complex64::new(1.0, 0.0),
        })
    }

    /// Grid amplitude from samples (one array per spin component, z index
    /// fastest). Checks finiteness and tail mass, then normalises.
    pub fn from_grid(particle: ParticleSpec, spec: GridSpec, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.len() != particle.spin.dim() {
            return Err(Error::usage(format!(
                "spin {} needs {} components, got {}",
                particle.spin,
                particle.spin.dim(),
                comps.len()
            )));
        }
        if comps.iter().any(|c| c.len() != spec.len()) {
            return Err(Error::Data(format!("each component must have {} samples", spec.len())));
        }
        if comps.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Data("non-finite grid sample".into()));
        }
        let tail = spec.boundary_fraction(&comps);
        if tail >= GRID_TAIL_TOLERANCE {
            return Err(Error::Data(format!(
                "grid tail mass fraction {tail:e} at the box boundary exceeds {GRID_TAIL_TOLERANCE:e}; enlarge pmax"
            )));
        }
        let n2: f64 = comps.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>() * spec.cell_volume_p();
        if !(n2 > 0.0) {
            return Err(Error::Data("grid amplitude is identically zero".into()));
        }
        let k = 1.0 / n2.sqrt();
        let comps = comps.into_iter().map(|c| c.into_iter().map(|z| z * k).collect()).collect();
        Ok(Self::grid_unchecked(particle, spec, comps))
    }

    pub(crate) fn grid_unchecked(particle: ParticleSpec, spec: GridSpec, comps: Vec<Vec<Complex64>>) -> Self {
        Self {
            particle,
            carrier: Carrier::Grid(Arc::new(GridData { spec, comps })),
            scale: Complex64::new(1.0, 0.0),
        }
    }

    pub(crate) fn with_analytic(&self, state: AnalyticState) -> Self {
        Self { particle: self.particle, carrier: Carrier::Analytic(Arc::new(state)), scale: self.scale }
    }

    pub(crate) fn analytic_state(&self) -> Option<&AnalyticState> {
        match &self.carrier {
            Carrier::Analytic(a) => Some(a),
            _ => None,
        }
    }

    pub(crate) fn with_scale(&self, scale: Complex64) -> Self {
        Self { particle: self.particle, carrier: self.carrier.clone(), scale }
    }

    pub(crate) fn with_grid(&self, spec: GridSpec, comps: Vec<Vec<Complex64>>, scale: Complex64) -> Self {
        Self { particle: self.particle, carrier: Carrier::Grid(Arc::new(GridData { spec, comps })), scale }
    }

    /// The image Ô Ψ as a new (unnormalised) amplitude.
    pub fn apply_operator(&self, op: Operator) -> Self {
        Self {
            particle: self.particle,
            carrier: Carrier::Derived(Arc::new(DerivedState { source: self.clone(), op })),
            scale: Complex64::new(1.0, 0.0),
        }
    }

    /// Sample onto a grid; the boundary tail must be negligible.
    pub fn sample_to_grid(&self, spec: GridSpec) -> Result<Self> {
        let dim = self.particle.spin.dim();
        let pts: Vec<Vector3<f64>> = (0..spec.len()).map(|i| spec.momentum(i)).collect();
        let jets = self.jets_at(&pts, false)?;
        let mut comps = vec![vec![ZERO; spec.len()]; dim];
        for (i, _) in pts.iter().enumerate() {
            for (c, comp) in comps.iter_mut().enumerate() {
                comp[i] = jets.values[i * dim + c];
            }
        }
        Self::from_grid(self.particle, spec, comps)
    }

    /// Default sampling grid: N = 64 per axis and pmax = max|p̄_i| + 8σp
    /// (after the chain's kinematic map for transformed packets).
    pub fn default_grid(&self) -> Result<GridSpec> {
        match &self.carrier {
            Carrier::Analytic(a) => {
                let (c, _) = a.forward(self.particle.m0, &a.base.p_bar);
                let stretch: f64 = a
                    .ops
                    .iter()
                    .map(|o| match o {
                        ChainOp::Boost { beta, .. } => beta.gamma() * (1.0 + beta.speed()),
                        _ => 1.0,
                    })
                    .product();
                GridSpec::new(64, c.amax() + 8.0 * a.base.sigma_p * stretch)
            }
            Carrier::Grid(g) => Ok(g.spec),
            Carrier::Derived(d) => d.source.default_grid(),
        }
    }

    pub fn particle(&self) -> &ParticleSpec {
        &self.particle
    }

    pub fn spin(&self) -> SpinValue {
        self.particle.spin
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.root().carrier, Carrier::Analytic(_))
    }

    pub fn is_grid(&self) -> bool {
        matches!(self.carrier, Carrier::Grid(_))
    }

    pub fn grid_spec(&self) -> Option<GridSpec> {
        match &self.root().carrier {
            Carrier::Grid(g) => Some(g.spec),
            _ => None,
        }
    }

    /// Base packet of an analytic carrier (before any chained steps).
    pub fn base_packet(&self) -> Option<&GaussianPacket> {
        match &self.carrier {
            Carrier::Analytic(a) => Some(&a.base),
            _ => None,
        }
    }

    /// Number of chained transformation steps on an analytic carrier.
    pub fn chain_len(&self) -> usize {
        match &self.carrier {
            Carrier::Analytic(a) => a.ops.len(),
            _ => 0,
        }
    }

    /// Grid samples (including the overall scale), one array per component.
    pub fn grid_components(&self) -> Option<Vec<Vec<Complex64>>> {
        match &self.carrier {
            Carrier::Grid(g) => Some(
                g.comps
                    .iter()
                    .map(|c| c.iter().map(|z| z * self.scale).collect())
                    .collect(),
            ),
            _ => None,
        }
    }

    pub(crate) fn grid_data(&self) -> Option<(&GridData, Complex64)> {
        match &self.carrier {
            Carrier::Grid(g) => Some((g, self.scale)),
            _ => None,
        }
    }

    pub fn scale_factor(&self) -> Complex64 {
        self.scale
    }

    /// c·Ψ.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self { particle: self.particle, carrier: self.carrier.clone(), scale: self.scale * c }
    }

    pub(crate) fn root(&self) -> &MomentumAmplitude {
        match &self.carrier {
            Carrier::Derived(d) => d.source.root(),
            _ => self,
        }
    }

    /// Ψ_m(p) at an arbitrary momentum. Grid carriers only answer at grid
    /// points.
    pub fn eval(&self, p: &Vector3<f64>) -> Result<Vec<Complex64>> {
        if let Carrier::Grid(g) = &self.carrier {
            let spec = g.spec;
            let mut idx = [0usize; 3];
            for a in 0..3 {
                let u = p[a] / spec.dp() + (spec.n() / 2) as f64;
                let r = u.round();
                if (u - r).abs() > 1e-9 || r < 0.0 || r >= spec.n() as f64 {
                    return Err(Error::Unsupported(
                        "grid amplitudes can only be evaluated at grid points".into(),
                    ));
                }
                idx[a] = r as usize;
            }
            let k = spec.index(idx[0], idx[1], idx[2]);
            return Ok(g.comps.iter().map(|c| c[k] * self.scale).collect());
        }
        Ok(self.jets_at(&[*p], false)?.values)
    }

    /// Values (and gradients if requested) at arbitrary points.
    pub(crate) fn jets_at(&self, points: &[Vector3<f64>], need_grad: bool) -> Result<Jets> {
        let dim = self.particle.spin.dim();
        let m0 = self.particle.m0;
        let spin = self.particle.spin;
        let mut jets = match &self.carrier {
            Carrier::Analytic(a) => {
                if need_grad {
                    let res: Result<Vec<_>> = points.par_iter().map(|p| a.eval_jet(spin, m0, p)).collect();
                    let res = res?;
                    let mut values = Vec::with_capacity(points.len() * dim);
                    let mut grads = Vec::with_capacity(points.len() * dim);
                    for (v, g) in res {
                        values.extend(v);
                        grads.extend(g);
                    }
                    Jets { dim, values, grads: Some(grads) }
                } else {
                    let res: Result<Vec<_>> = points.par_iter().map(|p| a.eval(spin, m0, p)).collect();
                    Jets { dim, values: res?.into_iter().flatten().collect(), grads: None }
                }
            }
            Carrier::Grid(g) => {
                // only valid when `points` is the full grid in storage order
                if points.len() != g.spec.len() {
                    return Err(Error::Unsupported(
                        "grid amplitudes can only be sampled on their own grid".into(),
                    ));
                }
                let n = g.spec.len();
                let mut values = vec![ZERO; n * dim];
                for (c, comp) in g.comps.iter().enumerate() {
                    for (i, z) in comp.iter().enumerate() {
                        values[i * dim + c] = *z;
                    }
                }
                let grads = if need_grad {
                    let eng = FourierEngine::new(g.spec);
                    let mut grads = vec![[ZERO; 3]; n * dim];
                    for (c, comp) in g.comps.iter().enumerate() {
                        let d = eng.momentum_gradient(comp);
                        for i in 0..n {
                            grads[i * dim + c] = [d[0][i], d[1][i], d[2][i]];
                        }
                    }
                    Some(grads)
                } else {
                    None
                };
                Jets { dim, values, grads }
            }
            Carrier::Derived(d) => {
                let src = d.source.jets_at(points, need_grad || d.op.needs_gradient())?;
                let out = d.op.apply(points, &src)?;
                if need_grad && out.grads.is_none() {
                    return Err(Error::Unsupported(
                        "derivative of an operator image that contains a derivative".into(),
                    ));
                }
                out
            }
        };
        if self.scale != Complex64::new(1.0, 0.0) {
            for v in jets.values.iter_mut() {
                *v *= self.scale;
            }
            if let Some(g) = jets.grads.as_mut() {
                for d in g.iter_mut() {
                    for x in d.iter_mut() {
                        *x *= self.scale;
                    }
                }
            }
        }
        Ok(jets)
    }
}

fn check_compatible(a: &MomentumAmplitude, b: &MomentumAmplitude) -> Result<()> {
    if a.particle.spin != b.particle.spin {
        return Err(Error::usage(format!(
            "mismatched spins {} and {}",
            a.particle.spin, b.particle.spin
        )));
    }
    if a.particle.m0 != b.particle.m0 {
        return Err(Error::usage("amplitudes belong to particles of different mass"));
    }
    Ok(())
}

fn inner(dim: usize, w: &[f64], a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut acc = ZERO;
    for (i, wi) in w.iter().enumerate() {
        let mut s = ZERO;
        for c in 0..dim {
            s += a[i * dim + c].conj() * b[i * dim + c];
        }
        acc += s * wi;
    }
    acc
}

/// ∫d³p Σ_m |Ψ_m(p)|².
pub fn norm_squared(psi: &MomentumAmplitude) -> Result<f64> {
    let dim = psi.spin().dim();
    let v = rule::integrate(&[psi, psi], |r| {
        let j = psi.jets_at(&r.points, false)?;
        check_finite(&j.values)?;
        Ok(inner(dim, &r.weights, &j.values, &j.values))
    })?;
    Ok(v.re)
}

fn check_finite(v: &[Complex64]) -> Result<()> {
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Data("non-finite amplitude sample".into()));
    }
    Ok(())
}

/// ⟨a|b⟩ = ∫d³p Σ_m Ψ^a_m(p)* Ψ^b_m(p).
pub fn scalar_product(a: &MomentumAmplitude, b: &MomentumAmplitude) -> Result<Complex64> {
    check_compatible(a, b)?;
    let dim = a.spin().dim();
    rule::integrate(&[a, b], |r| {
        let ja = a.jets_at(&r.points, false)?;
        let jb = b.jets_at(&r.points, false)?;
        check_finite(&ja.values)?;
        check_finite(&jb.values)?;
        Ok(inner(dim, &r.weights, &ja.values, &jb.values))
    })
}

/// ⟨a|Ô|b⟩.
pub fn matrix_element(a: &MomentumAmplitude, op: &Operator, b: &MomentumAmplitude) -> Result<Complex64> {
    scalar_product(a, &b.apply_operator(op.clone()))
}

/// ⟨ψ|Ô|ψ⟩.
pub fn expectation(psi: &MomentumAmplitude, op: &Operator) -> Result<Complex64> {
    matrix_element(psi, op, psi)
}

/// ⟨P^μ⟩ = ∫d³p p^μ Σ_m |Ψ_m|².
pub fn expectation_four_momentum(psi: &MomentumAmplitude) -> Result<FourVector> {
    let dim = psi.spin().dim();
    let m0 = psi.particle.m0;
    let mut out = [0.0; 4];
    for (mu, o) in out.iter_mut().enumerate() {
        let v = rule::integrate(&[psi, psi], |r| {
            let j = psi.jets_at(&r.points, false)?;
            check_finite(&j.values)?;
            let w: Vec<f64> = r
                .points
                .iter()
                .zip(&r.weights)
                .map(|(p, w)| w * if mu == 0 { energy(m0, p) } else { p[mu - 1] })
                .collect();
            Ok(inner(dim, &w, &j.values, &j.values))
        })?;
        *o = v.re;
    }
    Ok(FourVector::new(out[0], out[1], out[2], out[3]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityKind {
    /// ρ(p) = Σ_m |Ψ_m(p)|², a probability density in d³p.
    Probability,
    /// S(p) = Σ_m |Φ_m(p)|² = ω ρ(p), a Lorentz scalar.
    Scalar,
}

/// ρ(p) or S(p) of an amplitude.
#[derive(Clone, Debug)]
pub struct DensityField {
    amp: MomentumAmplitude,
    kind: DensityKind,
}

impl DensityField {
    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    fn weight(&self, p: &Vector3<f64>) -> f64 {
        match self.kind {
            DensityKind::Probability => 1.0,
            DensityKind::Scalar => self.amp.particle.energy(p),
        }
    }

    pub fn at(&self, p: &Vector3<f64>) -> Result<f64> {
        let v = self.amp.eval(p)?;
        Ok(v.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.weight(p))
    }

    /// Values on the amplitude's own grid (grid carriers only).
    pub fn grid_values(&self) -> Option<Vec<f64>> {
        let (g, s) = self.amp.grid_data()?;
        let s2 = s.norm_sqr();
        Some(
            (0..g.spec.len())
                .map(|i| {
                    let p = g.spec.momentum(i);
                    g.comps.iter().map(|c| c[i].norm_sqr()).sum::<f64>() * s2 * self.weight(&p)
                })
                .collect(),
        )
    }

    /// ∫ρ d³p, or ∫S d³p/ω; both equal the norm.
    pub fn integral(&self) -> Result<f64> {
        norm_squared(&self.amp)
    }
}

pub fn momentum_density(psi: &MomentumAmplitude) -> DensityField {
    DensityField { amp: psi.clone(), kind: DensityKind::Probability }
}

pub fn scalar_density(psi: &MomentumAmplitude) -> DensityField {
    DensityField { amp: psi.clone(), kind: DensityKind::Scalar }
}

/// Φ_m(p) = √ω Ψ_m(p), stored on the same kind of carrier as Ψ.
#[derive(Clone, Debug)]
pub struct CovariantAmplitude {
    psi: MomentumAmplitude,
    phi: MomentumAmplitude,
}

impl CovariantAmplitude {
    pub fn from_probability(psi: &MomentumAmplitude) -> Self {
        let m0 = psi.particle.m0;
        let phi = match psi.grid_data() {
            Some((g, scale)) => {
                let comps = g
                    .comps
                    .iter()
                    .map(|c| {
                        c.iter()
                            .enumerate()
                            .map(|(i, z)| z * energy(m0, &g.spec.momentum(i)).sqrt())
                            .collect()
                    })
                    .collect();
                psi.with_grid(g.spec, comps, scale)
            }
            None => psi.apply_operator(Operator::Multiply(Multiplier::sqrt_energy(m0))),
        };
        Self { psi: psi.clone(), phi }
    }

    /// Recover Ψ = Φ/√ω from the stored Φ.
    pub fn to_probability(&self) -> MomentumAmplitude {
        let m0 = self.psi.particle.m0;
        match self.phi.grid_data() {
            Some((g, scale)) => {
                let comps = g
                    .comps
                    .iter()
                    .map(|c| {
                        c.iter()
                            .enumerate()
                            .map(|(i, z)| z / energy(m0, &g.spec.momentum(i)).sqrt())
                            .collect()
                    })
                    .collect();
                self.phi.with_grid(g.spec, comps, scale)
            }
            None => self.psi.clone(),
        }
    }

    pub fn probability(&self) -> &MomentumAmplitude {
        &self.psi
    }

    /// Φ as an amplitude-like object (not normalised).
    pub fn phi(&self) -> &MomentumAmplitude {
        &self.phi
    }

    pub fn eval(&self, p: &Vector3<f64>) -> Result<Vec<Complex64>> {
        self.phi.eval(p)
    }

    /// ∫(d³p/ω) Σ_m |Φ_m|².
    pub fn norm_squared(&self) -> Result<f64> {
        let dim = self.psi.spin().dim();
        let m0 = self.psi.particle.m0;
        let phi = &self.phi;
        let v = rule::integrate(&[phi, phi], |r| {
            let j = phi.jets_at(&r.points, false)?;
            let w: Vec<f64> = r.points.iter().zip(&r.weights).map(|(p, w)| w / energy(m0, p)).collect();
            Ok(inner(dim, &w, &j.values, &j.values))
        })?;
        Ok(v.re)
    }
}
