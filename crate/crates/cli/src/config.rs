//! JSON experiment configurations. Unknown keys are rejected; every
//! command has a default so it can run without a file.

use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use num_complex::Complex64;
use relamp::amplitudes::{GaussianPacket, IntrinsicParity, MomentumAmplitude, ParticleSpec};
use relamp::fourier::GridSpec;
use relamp::kinematics::{FourVector, RotationMatrix, Velocity3};
use relamp::poincare::PoincareElement;
use relamp::spin::SpinValue;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

fn bad(path: impl Into<String>, msg: impl Into<String>) -> CliError {
    CliError::Config { path: path.into(), message: msg.into() }
}

fn positive(path: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(path, format!("must be positive and finite, got {v}")))
    }
}

fn finite(path: &str, v: &[f64]) -> Result<(), CliError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(bad(path, "entries must be finite"))
    }
}

pub fn velocity(path: &str, beta: [f64; 3]) -> Result<Velocity3, CliError> {
    finite(path, &beta)?;
    let speed = Vector3::from(beta).norm();
    Velocity3::new(Vector3::from(beta))
        .map_err(|_| bad(path, format!("|beta| = {speed} violates the velocity bound |beta| < 1")))
}

/// Parse a config document, reporting the JSON path of the first problem.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        bad(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleConfig {
    pub m0: f64,
    #[serde(default)]
    pub two_s: u32,
    #[serde(default = "even")]
    pub eta: i32,
}

fn even() -> i32 {
    1
}

impl Default for ParticleConfig {
    fn default() -> Self {
        Self { m0: 1.0, two_s: 0, eta: 1 }
    }
}

impl ParticleConfig {
    pub fn build(&self, path: &str) -> Result<ParticleSpec, CliError> {
        positive(&format!("{path}.m0"), self.m0)?;
        if self.two_s > 12 {
            return Err(bad(format!("{path}.two_s"), format!("spin up to 6 (two_s ≤ 12), got {}", self.two_s)));
        }
        let eta = IntrinsicParity::try_from(self.eta).map_err(|e| bad(format!("{path}.eta"), e.to_string()))?;
        ParticleSpec::new(self.m0, SpinValue::new(self.two_s), eta).map_err(|e| bad(path, e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub pmax: f64,
}

impl GridConfig {
    pub fn build(&self, path: &str) -> Result<GridSpec, CliError> {
        GridSpec::new(self.n, self.pmax).map_err(|e| bad(path, e.to_string()))
    }
}

/// A Gaussian packet; weights are [re, im] pairs, defaulting to (1, 0, …).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub p_bar: [f64; 3],
    pub sigma_p: f64,
    #[serde(default)]
    pub x_bar: [f64; 3],
    #[serde(default)]
    pub weights: Option<Vec<[f64; 2]>>,
}

impl PacketConfig {
    pub fn build(&self, particle: &ParticleSpec, path: &str) -> Result<MomentumAmplitude, CliError> {
        finite(&format!("{path}.p_bar"), &self.p_bar)?;
        finite(&format!("{path}.x_bar"), &self.x_bar)?;
        positive(&format!("{path}.sigma_p"), self.sigma_p)?;
        let dim = particle.spin().dim();
        let weights: Vec<Complex64> = match &self.weights {
            Some(w) => {
                if w.len() != dim {
                    return Err(bad(
                        format!("{path}.weights"),
                        format!("spin {} needs {dim} weights, got {}", particle.spin(), w.len()),
                    ));
                }
                w.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
            }
            None => (0..dim).map(|i| Complex64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)).collect(),
        };
        let packet = GaussianPacket::new(Vector3::from(self.p_bar), self.sigma_p, Vector3::from(self.x_bar), weights)
            .map_err(|e| bad(path, e.to_string()))?;
        MomentumAmplitude::from_packet(*particle, packet).map_err(|e| bad(path, e.to_string()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CarrierConfig {
    Gaussian {
        packet: PacketConfig,
        /// Sample onto this grid before transforming.
        #[serde(default)]
        grid: Option<GridConfig>,
    },
    /// A binary grid file; the particle comes from its header.
    GridFile { path: PathBuf },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementConfig {
    Translation { a: [f64; 4] },
    Rotation { axis: [f64; 3], angle: f64 },
    Boost { beta: [f64; 3] },
    Parity,
    TimeReversal,
}

impl ElementConfig {
    pub fn build(&self, path: &str) -> Result<PoincareElement, CliError> {
        Ok(match self {
            ElementConfig::Translation { a } => {
                finite(&format!("{path}.translation.a"), a)?;
                PoincareElement::Translation(FourVector::new(a[0], a[1], a[2], a[3]))
            }
            ElementConfig::Rotation { axis, angle } => {
                finite(&format!("{path}.rotation.axis"), axis)?;
                finite(&format!("{path}.rotation.angle"), &[*angle])?;
                let r = RotationMatrix::from_axis_angle(Vector3::from(*axis), *angle)
                    .map_err(|e| bad(format!("{path}.rotation.axis"), e.to_string()))?;
                PoincareElement::Rotation(r)
            }
            ElementConfig::Boost { beta } => PoincareElement::Boost(velocity(&format!("{path}.boost.beta"), *beta)?),
            ElementConfig::Parity => PoincareElement::Parity,
            ElementConfig::TimeReversal => PoincareElement::TimeReversal,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransformTolerances {
    pub norm: f64,
    pub grid_norm: f64,
    pub four_momentum: f64,
    pub lost_mass: f64,
}

impl Default for TransformTolerances {
    fn default() -> Self {
        Self { norm: 1e-8, grid_norm: 1e-6, four_momentum: 1e-6, lost_mass: 1e-8 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformConfig {
    #[serde(default)]
    pub particle: Option<ParticleConfig>,
    pub carrier: CarrierConfig,
    #[serde(default)]
    pub transformations: Vec<ElementConfig>,
    /// Momenta at which analytic amplitudes are sampled; defaults to a
    /// line through p̄ along x.
    #[serde(default)]
    pub samples: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    pub tolerances: TransformTolerances,
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self {
            particle: Some(ParticleConfig { m0: 1.0, two_s: 1, eta: 1 }),
            carrier: CarrierConfig::Gaussian {
                packet: PacketConfig {
                    p_bar: [0.0; 3],
                    sigma_p: 0.3,
                    x_bar: [0.0; 3],
                    weights: Some(vec![[1.0, 0.0], [0.0, 0.0]]),
                },
                grid: None,
            },
            transformations: Vec::new(),
            samples: None,
            tolerances: TransformTolerances::default(),
        }
    }
}

impl TransformConfig {
    pub fn elements(&self) -> Result<Vec<PoincareElement>, CliError> {
        self.transformations.iter().enumerate().map(|(i, t)| t.build(&format!("transformations[{i}]"))).collect()
    }

    /// Resolve relative grid paths against the config file's directory.
    pub fn rebase(&mut self, dir: &Path) {
        if let CarrierConfig::GridFile { path } = &mut self.carrier {
            if path.is_relative() {
                *path = dir.join(&*path);
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    pub tau: f64,
    pub rho: f64,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CausalityConfig {
    pub tau: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub step: f64,
    pub mass_ratio: f64,
    pub both_paths: bool,
    /// A single value checked against a known result; null disables it.
    pub reference: Option<Reference>,
    pub unitarity_tolerance: Option<f64>,
    pub paths_tolerance: f64,
}

impl Default for CausalityConfig {
    fn default() -> Self {
        Self {
            tau: 5.0,
            rho_min: 0.1,
            rho_max: 10.0,
            step: 0.1,
            mass_ratio: 0.0,
            both_paths: false,
            reference: Some(Reference { tau: 5.0, rho: 5.0, value: 0.996958, tolerance: 2e-4 }),
            unitarity_tolerance: Some(1e-7),
            paths_tolerance: 1e-9,
        }
    }
}

impl CausalityConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("tau", self.tau)?;
        positive("rho_min", self.rho_min)?;
        positive("step", self.step)?;
        positive("rho_max", self.rho_max)?;
        if self.rho_max < self.rho_min {
            return Err(bad("rho_max", format!("must be ≥ rho_min = {}", self.rho_min)));
        }
        if (self.rho_max - self.rho_min) / self.step > 1e6 {
            return Err(bad("step", "more than 10^6 grid points"));
        }
        if !(self.mass_ratio >= 0.0 && self.mass_ratio.is_finite()) {
            return Err(bad("mass_ratio", format!("must be finite and ≥ 0, got {}", self.mass_ratio)));
        }
        if self.both_paths && self.mass_ratio != 0.0 {
            return Err(bad("both_paths", "the closed form exists only for mass_ratio = 0"));
        }
        if let Some(r) = &self.reference {
            positive("reference.tau", r.tau)?;
            positive("reference.rho", r.rho)?;
            positive("reference.tolerance", r.tolerance)?;
        }
        if let Some(t) = self.unitarity_tolerance {
            positive("unitarity_tolerance", t)?;
        }
        positive("paths_tolerance", self.paths_tolerance)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPairs {
    pub count: usize,
    pub seed: u64,
    pub p_range: f64,
    pub x_range: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NwTolerances {
    pub identity: f64,
    pub hermiticity: f64,
}

impl Default for NwTolerances {
    fn default() -> Self {
        Self { identity: 1e-8, hermiticity: 1e-10 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NwCheckConfig {
    pub particle: ParticleConfig,
    pub pairs: Vec<[PacketConfig; 2]>,
    pub random: Option<RandomPairs>,
    /// Observer velocity for the boosted position operator (spin 0 only).
    pub beta0: Option<[f64; 3]>,
    pub tolerances: NwTolerances,
}

impl Default for NwCheckConfig {
    fn default() -> Self {
        Self {
            particle: ParticleConfig::default(),
            pairs: Vec::new(),
            random: Some(RandomPairs { count: 20, seed: 7, p_range: 0.6, x_range: 1.0, sigma_min: 0.2, sigma_max: 0.4 }),
            beta0: Some([0.3, -0.2, 0.4]),
            tolerances: NwTolerances::default(),
        }
    }
}

impl NwCheckConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let particle = self.particle.build("particle")?;
        for (i, pair) in self.pairs.iter().enumerate() {
            for (k, p) in pair.iter().enumerate() {
                p.build(&particle, &format!("pairs[{i}][{k}]"))?;
            }
        }
        if let Some(r) = &self.random {
            positive("random.p_range", r.p_range)?;
            positive("random.x_range", r.x_range)?;
            positive("random.sigma_min", r.sigma_min)?;
            if !(r.sigma_max > r.sigma_min && r.sigma_max.is_finite()) {
                return Err(bad("random.sigma_max", "must exceed sigma_min"));
            }
        }
        if self.pairs.is_empty() && self.random.as_ref().is_none_or(|r| r.count == 0) {
            return Err(bad("pairs", "no pairs configured"));
        }
        if let Some(b) = self.beta0 {
            velocity("beta0", b)?;
            if particle.spin().two_s() != 0 {
                return Err(bad("beta0", "the boosted position operator is defined for spin 0 only"));
            }
        }
        positive("tolerances.identity", self.tolerances.identity)?;
        positive("tolerances.hermiticity", self.tolerances.hermiticity)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AverageEventConfig {
    /// A narrow moving packet; defaults to p̄ = 5m0 x̂, σp = 0.1m0.
    #[serde(default = "narrow_packet")]
    pub packet: PacketConfig,
    pub beta0: [f64; 3],
    #[serde(default)]
    pub t: f64,
}

fn narrow_packet() -> PacketConfig {
    PacketConfig { p_bar: [5.0, 0.0, 0.0], sigma_p: 0.1, x_bar: [0.0; 3], weights: None }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoostTolerances {
    pub lost_mass: f64,
    pub norm: f64,
    /// Allowed relative error of the width ratio against 1/γ.
    pub contraction: f64,
    /// ⟨i[Ĥ′, x̂′]⟩ against ⟨v̂′⟩ and the canonical commutator.
    pub velocity_law: f64,
}

impl Default for BoostTolerances {
    fn default() -> Self {
        Self { lost_mass: 1e-8, norm: 1e-6, contraction: 0.05, velocity_law: 1e-6 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoostPositionConfig {
    pub particle: ParticleConfig,
    pub packet: PacketConfig,
    pub grid: GridConfig,
    pub beta: [f64; 3],
    pub t: f64,
    /// Compare the width along β with 1/γ; meaningful for packets at rest.
    pub check_contraction: bool,
    pub average_event: Option<AverageEventConfig>,
    pub tolerances: BoostTolerances,
}

impl Default for BoostPositionConfig {
    fn default() -> Self {
        Self {
            particle: ParticleConfig::default(),
            packet: PacketConfig { p_bar: [0.0; 3], sigma_p: 0.1, x_bar: [0.0; 3], weights: None },
            grid: GridConfig { n: 48, pmax: 2.0 },
            beta: [0.0, 0.0, 0.6],
            t: 0.0,
            check_contraction: true,
            average_event: Some(AverageEventConfig { packet: narrow_packet(), beta0: [0.0, 0.5, 0.0], t: 1.5 }),
            tolerances: BoostTolerances::default(),
        }
    }
}

impl BoostPositionConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let particle = self.particle.build("particle")?;
        self.packet.build(&particle, "packet")?;
        self.grid.build("grid")?;
        velocity("beta", self.beta)?;
        finite("t", &[self.t])?;
        if let Some(a) = &self.average_event {
            a.packet.build(&particle, "average_event.packet")?;
            velocity("average_event.beta0", a.beta0)?;
            finite("average_event.t", &[a.t])?;
            if particle.spin().two_s() != 0 {
                return Err(bad("average_event", "the average event is defined for spin 0 only"));
            }
        }
        positive("tolerances.lost_mass", self.tolerances.lost_mass)?;
        positive("tolerances.norm", self.tolerances.norm)?;
        positive("tolerances.contraction", self.tolerances.contraction)?;
        positive("tolerances.velocity_law", self.tolerances.velocity_law)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomMomenta {
    pub count: usize,
    pub seed: u64,
    pub range: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiracTolerances {
    pub momentum: f64,
    pub position: f64,
}

impl Default for DiracTolerances {
    fn default() -> Self {
        Self { momentum: 1e-10, position: 1e-8 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiracConfig {
    pub m0: f64,
    pub packet: PacketConfig,
    pub grid: GridConfig,
    pub t: f64,
    /// Time step of the finite-difference time derivative.
    pub h: f64,
    pub random_momenta: RandomMomenta,
    pub tolerances: DiracTolerances,
}

impl Default for DiracConfig {
    fn default() -> Self {
        Self {
            m0: 1.0,
            packet: PacketConfig {
                p_bar: [0.2, -0.1, 0.3],
                sigma_p: 0.3,
                x_bar: [0.0; 3],
                weights: Some(vec![[0.6, 0.0], [0.0, 0.8]]),
            },
            grid: GridConfig { n: 24, pmax: 3.2 },
            t: 0.3,
            h: 0.05,
            random_momenta: RandomMomenta { count: 20, seed: 31, range: 4.0 },
            tolerances: DiracTolerances::default(),
        }
    }
}

impl DiracConfig {
    pub fn particle(&self) -> Result<ParticleSpec, CliError> {
        ParticleConfig { m0: self.m0, two_s: 1, eta: 1 }.build("<root>")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let particle = self.particle()?;
        self.packet.build(&particle, "packet")?;
        self.grid.build("grid")?;
        finite("t", &[self.t])?;
        positive("h", self.h)?;
        positive("random_momenta.range", self.random_momenta.range)?;
        positive("tolerances.momentum", self.tolerances.momentum)?;
        positive("tolerances.position", self.tolerances.position)
    }
}
