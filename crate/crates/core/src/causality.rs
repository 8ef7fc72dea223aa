//! The scaled ultra-relativistic Gaussian packet and its light-cone leakage.
//!
//! Scaled variables: κ = p/σp, ρ = r/σx, τ = t/σx with σx = 1/(2σp). The
//! momentum amplitude is Ψ(κ) = e^{−κ²/4}/(2π)^{3/4}; the spherically
//! symmetric position wavefunction is
//!
//!   ψ(τ,ρ) = (2π)^{−3/4} π^{−1/2} ρ^{−1} ∫₀^∞ dκ κ sin(κρ/2) e^{−κ²/4} e^{−iω(κ)τ/2}
//!
//! with ω(κ) = √(κ² + μ²), μ = m0/σp. For μ = 0 the integral has a closed
//! form in parabolic cylinder functions D_{−2}, evaluated here through the
//! Faddeeva function.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_complex_with_breaks, integrate_with_breaks, Tolerance};
use crate::special::faddeeva;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative tolerance of the radial probability integrals.
pub const RATIO_TOLERANCE: f64 = 1e-7;
/// Relative tolerance of the κ integral in the quadrature path.
pub const WAVEFUNCTION_TOLERANCE: f64 = 1e-11;

// e^{−κ²/4}κ² < 1e−25 beyond this
const KAPPA_MAX: f64 = 16.0;
// below this the difference form of the closed expression loses digits
const SMALL_RHO: f64 = 1e-5;
const DENOMINATOR_FLOOR: f64 = 1e-300;

fn prefactor() -> f64 {
    (2.0 * PI).powf(-0.75) / PI.sqrt()
}

/// Which evaluation of ψ(τ,ρ) to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvaluationPath {
    Quadrature,
    ClosedForm,
}

/// The packet Ψ(κ) with mass ratio μ = m0/σp (0 is the massless limit).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledPacket {
    mass_ratio: f64,
}

impl Default for ScaledPacket {
    fn default() -> Self {
        Self { mass_ratio: 0.0 }
    }
}

impl ScaledPacket {
    pub fn new(mass_ratio: f64) -> Result<Self> {
        if !(mass_ratio >= 0.0 && mass_ratio.is_finite()) {
            return Err(Error::domain(format!("mass ratio must be finite and ≥ 0, got {mass_ratio}")));
        }
        Ok(Self { mass_ratio })
    }

    pub fn mass_ratio(&self) -> f64 {
        self.mass_ratio
    }

    /// Ψ(κ) at |κ| = kappa.
    pub fn amplitude(&self, kappa: f64) -> f64 {
        (-kappa * kappa / 4.0).exp() * (2.0 * PI).powf(-0.75)
    }

    /// ∫d³κ |Ψ|² by radial quadrature.
    pub fn norm_squared(&self) -> Result<f64> {
        let r = integrate_with_breaks(
            |k| 4.0 * PI * k * k * self.amplitude(k).powi(2),
            0.0,
            KAPPA_MAX,
            &[2.0, 4.0, 8.0],
            Tolerance::new(1e-300, 1e-13),
        )?;
        Ok(r.value)
    }

    fn omega(&self, kappa: f64) -> f64 {
        kappa.hypot(self.mass_ratio)
    }

    /// ψ(τ,ρ) by the chosen path. The closed form needs μ = 0.
    pub fn spatial_wavefunction(&self, tau: f64, rho: f64, path: EvaluationPath) -> Result<Complex64> {
        if !(tau >= 0.0 && rho >= 0.0 && tau.is_finite() && rho.is_finite()) {
            return Err(Error::domain(format!("need τ ≥ 0 and ρ ≥ 0, got τ = {tau}, ρ = {rho}")));
        }
        match path {
            EvaluationPath::Quadrature => self.wavefunction_quadrature(tau, rho),
            EvaluationPath::ClosedForm if self.mass_ratio == 0.0 => Ok(wavefunction_closed(tau, rho)),
            EvaluationPath::ClosedForm => Err(Error::Unsupported(format!(
                "the closed form is massless only; mass ratio is {}",
                self.mass_ratio
            ))),
        }
    }

    fn wavefunction_quadrature(&self, tau: f64, rho: f64) -> Result<Complex64> {
        // κ sin(κρ/2)/ρ = (κ²/2)·sinc(κρ/2), finite at ρ = 0
        let f = |k: f64| {
            let amp = 0.5 * k * k * sinc(0.5 * k * rho) * (-k * k / 4.0).exp();
            Complex64::from_polar(amp, -0.5 * self.omega(k) * tau)
        };
        let r = integrate_complex_with_breaks(
            f,
            0.0,
            KAPPA_MAX,
            &[2.0, 4.0, 6.0, 8.0, 12.0],
            Tolerance::new(1e-15, WAVEFUNCTION_TOLERANCE),
        )?;
        Ok(r.value * prefactor())
    }

    fn wavefunction(&self, tau: f64, rho: f64) -> Result<Complex64> {
        let path = if self.mass_ratio == 0.0 { EvaluationPath::ClosedForm } else { EvaluationPath::Quadrature };
        self.spatial_wavefunction(tau, rho, path)
    }

    /// ∫₀^R 4πρ²|ψ(τ,ρ)|² dρ.
    pub fn probability_within(&self, tau: f64, radius: f64) -> Result<f64> {
        if radius <= 0.0 {
            return Ok(0.0);
        }
        let mut breaks: Vec<f64> = [tau, tau + 2.0, tau + 6.0, 2.0 * tau + 10.0, 50.0, 100.0, 200.0]
            .into_iter()
            .filter(|b| *b > 0.0 && *b < radius)
            .collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut err = None;
        let r = integrate_with_breaks(
            |rho| match self.wavefunction(tau, rho) {
                Ok(v) => 4.0 * PI * rho * rho * v.norm_sqr(),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            0.0,
            radius,
            &breaks,
            Tolerance::new(1e-300, RATIO_TOLERANCE * 1e-2),
        )?;
        match err {
            Some(e) => Err(e),
            None => Ok(r.value),
        }
    }

    /// Total probability at τ; the tail beyond the cone falls off as ρ^{−8}
    /// in density, so the range runs out to a few hundred.
    pub fn total_probability(&self, tau: f64) -> Result<f64> {
        self.probability_within(tau, 400.0 + tau)
    }

    /// C(τ,ρ): probability inside ρ+τ at τ over probability inside ρ at 0.
    pub fn causality_ratio(&self, tau: f64, rho: f64) -> Result<f64> {
        if !(tau > 0.0 && rho > 0.0 && tau.is_finite() && rho.is_finite()) {
            return Err(Error::domain(format!("need τ > 0 and ρ > 0, got τ = {tau}, ρ = {rho}")));
        }
        let den = self.probability_within(0.0, rho)?;
        if den < DENOMINATOR_FLOOR {
            return Err(Error::DivergingRatio(den));
        }
        Ok(self.probability_within(tau, rho + tau)? / den)
    }

    /// C(τ,ρ) over a monotone ρ grid; points are evaluated in parallel.
    pub fn causality_scan(&self, tau: f64, rho_grid: &[f64]) -> Result<CausalityCurve> {
        if rho_grid.is_empty() {
            return Err(Error::usage("empty ρ grid"));
        }
        if rho_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::usage("ρ grid must be strictly increasing"));
        }
        let values: Vec<f64> =
            rho_grid.par_iter().map(|&r| self.causality_ratio(tau, r)).collect::<Result<Vec<_>>>()?;
        Ok(CausalityCurve::new(tau, rho_grid.iter().copied().zip(values).collect(), RATIO_TOLERANCE))
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

// e^{−a²/8} D_{−2}(ia/√2) = 1 − i(√π/2)·a·w(−a/2)
fn damped_d_minus2(a: f64) -> Complex64 {
    1.0 - I * (0.5 * PI.sqrt() * a) * faddeeva(Complex64::new(-0.5 * a, 0.0))
}

// d/da of the above, using w′(z) = −2z w(z) + 2i/√π
fn damped_d_minus2_slope(a: f64) -> Complex64 {
    let w = faddeeva(Complex64::new(-0.5 * a, 0.0));
    -I * (0.5 * PI.sqrt()) * ((1.0 - 0.5 * a * a) * w - I * (a / PI.sqrt()))
}

fn wavefunction_closed(tau: f64, rho: f64) -> Complex64 {
    let c = prefactor();
    if rho < SMALL_RHO {
        // the 1/ρ pole cancels: difference → −2ρ·slope
        return 2.0 * I * c * damped_d_minus2_slope(tau);
    }
    -I * c / rho * (damped_d_minus2(tau - rho) - damped_d_minus2(tau + rho))
}

/// ψ(τ,ρ) of the massless packet.
pub fn spatial_wavefunction(tau: f64, rho: f64, path: EvaluationPath) -> Result<Complex64> {
    ScaledPacket::default().spatial_wavefunction(tau, rho, path)
}

/// C(τ,ρ) of the massless packet.
pub fn causality_ratio(tau: f64, rho: f64) -> Result<f64> {
    ScaledPacket::default().causality_ratio(tau, rho)
}

/// C(τ,·) of the massless packet over a ρ grid.
pub fn causality_scan(tau: f64, rho_grid: &[f64]) -> Result<CausalityCurve> {
    ScaledPacket::default().causality_scan(tau, rho_grid)
}

/// Samples of C(τ,ρ) with the minimum located.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CausalityCurve {
    pub tau: f64,
    pub samples: Vec<(f64, f64)>,
    pub tolerance: f64,
    pub min: f64,
    pub argmin: f64,
}

impl CausalityCurve {
    fn new(tau: f64, samples: Vec<(f64, f64)>, tolerance: f64) -> Self {
        let (argmin, min) = samples
            .iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty grid");
        Self { tau, samples, tolerance, min, argmin }
    }

    /// ρ values where C < 1.
    pub fn violations(&self) -> impl Iterator<Item = &(f64, f64)> {
        self.samples.iter().filter(|(_, c)| *c < 1.0)
    }
}

/// ρ_min, ρ_min + step, … up to ρ_max inclusive (within half a step).
pub fn rho_grid(rho_min: f64, rho_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && rho_min > 0.0 && rho_max >= rho_min) {
        return Err(Error::usage(format!(
            "need 0 < ρ_min ≤ ρ_max and step > 0, got {rho_min}, {rho_max}, {step}"
        )));
    }
    let n = ((rho_max - rho_min) / step + 0.5).floor() as usize;
    // index-based so the values do not accumulate rounding; when ρ_min is a
    // whole number of steps, k·step lands on round values such as 5.0
    let k0 = rho_min / step;
    if (k0 - k0.round()).abs() < 1e-9 {
        Ok((0..=n).map(|i| (k0.round() + i as f64) * step).collect())
    } else {
        Ok((0..=n).map(|i| rho_min + i as f64 * step).collect())
    }
}
