//! Uniform Cartesian grids and the discrete Fourier machinery on them.
//!
//! Momentum samples sit at p_j = (j − N/2)·dp with dp = 2·pmax/N, the
//! conjugate position grid at x_j = (j − N/2)·dx with dx = π/pmax. The
//! transforms use the symmetric (2π)^{−3/2} convention
//!
//!   ψ(x) = ∫ d³p/(2π)^{3/2} Ψ(p) e^{+ip·x},   Ψ(p) = ∫ d³x/(2π)^{3/2} ψ(x) e^{−ip·x},
//!
//! discretised so that the pair is exactly unitary (discrete Parseval).
//! Samples are stored row-major with the z index fastest.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Grid geometry shared by momentum and position samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    pmax: f64,
}

impl GridSpec {
    pub fn new(n: usize, pmax: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::domain(format!("grid size must be even and at least 4, got {n}")));
        }
        if !(pmax > 0.0) || !pmax.is_finite() {
            return Err(Error::domain(format!("pmax must be positive, got {pmax}")));
        }
        Ok(Self { n, pmax })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pmax(&self) -> f64 {
        self.pmax
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dp(&self) -> f64 {
        2.0 * self.pmax / self.n as f64
    }

    pub fn dx(&self) -> f64 {
        PI / self.pmax
    }

    pub fn cell_volume_p(&self) -> f64 {
        self.dp().powi(3)
    }

    pub fn cell_volume_x(&self) -> f64 {
        self.dx().powi(3)
    }

    pub fn coord_p(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.dp()
    }

    pub fn coord_x(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.dx()
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.n + iy) * self.n + iz
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn momentum(&self, idx: usize) -> Vector3<f64> {
        let [i, j, k] = self.unravel(idx);
        Vector3::new(self.coord_p(i), self.coord_p(j), self.coord_p(k))
    }

    pub fn position(&self, idx: usize) -> Vector3<f64> {
        let [i, j, k] = self.unravel(idx);
        Vector3::new(self.coord_x(i), self.coord_x(j), self.coord_x(k))
    }

    /// Index of the point −p (the unpaired Nyquist index maps to itself).
    pub fn mirror(&self, idx: usize) -> usize {
        let n = self.n;
        let [i, j, k] = self.unravel(idx);
        self.index((n - i) % n, (n - j) % n, (n - k) % n)
    }

    /// Fraction of Σ|f|² carried by the outermost layer of cells.
    pub fn boundary_fraction(&self, comps: &[Vec<Complex64>]) -> f64 {
        let n = self.n;
        let mut edge = 0.0;
        let mut total = 0.0;
        for c in comps {
            for (idx, v) in c.iter().enumerate() {
                let m = v.norm_sqr();
                total += m;
                let [i, j, k] = self.unravel(idx);
                if [i, j, k].iter().any(|&q| q == 0 || q == n - 1) {
                    edge += m;
                }
            }
        }
        if total > 0.0 {
            edge / total
        } else {
            0.0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

/// FFT plans for one grid size. Immutable after construction and safe to
/// share between threads.
#[derive(Clone)]
pub struct FourierEngine {
    spec: GridSpec,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FourierEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierEngine").field("spec", &self.spec).finish()
    }
}

#[inline]
fn line_index(n: usize, axis: usize, u: usize, v: usize, k: usize) -> usize {
    match axis {
        0 => (k * n + u) * n + v,
        1 => (u * n + k) * n + v,
        _ => (u * n + v) * n + k,
    }
}

#[inline]
fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Signed frequency for FFT bin k (Nyquist reported as +N/2).
#[inline]
fn freq(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

impl FourierEngine {
    pub fn new(spec: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(spec.n);
        let inv = planner.plan_fft_inverse(spec.n);
        Self { spec, fwd, inv }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Apply `f(u, v, line)` to every line along `axis`; (u, v) are the
    /// other two indices in increasing axis order.
    fn map_lines<F>(&self, data: &mut [Complex64], axis: usize, f: F)
    where
        F: Fn(usize, usize, &mut [Complex64]) + Sync,
    {
        let n = self.spec.n;
        if axis == 2 {
            data.par_chunks_mut(n).enumerate().for_each(|(l, line)| f(l / n, l % n, line));
            return;
        }
        let mut buf = vec![ZERO; data.len()];
        buf.par_chunks_mut(n).enumerate().for_each(|(l, line)| {
            let (u, v) = (l / n, l % n);
            for (k, x) in line.iter_mut().enumerate() {
                *x = data[line_index(n, axis, u, v, k)];
            }
            f(u, v, line);
        });
        // scatter back; each destination written exactly once
        for (l, line) in buf.chunks(n).enumerate() {
            let (u, v) = (l / n, l % n);
            for (k, x) in line.iter().enumerate() {
                data[line_index(n, axis, u, v, k)] = *x;
            }
        }
    }

    fn fft3(&self, data: &mut [Complex64], dir: Direction) {
        let plan = match dir {
            Direction::Forward => &self.fwd,
            Direction::Inverse => &self.inv,
        };
        for axis in 0..3 {
            self.map_lines(data, axis, |_, _, line| plan.process(line));
        }
    }

    fn checkerboard(&self, data: &mut [Complex64], factor: f64) {
        let spec = self.spec;
        data.par_iter_mut().enumerate().for_each(|(idx, v)| {
            let [i, j, k] = spec.unravel(idx);
            *v *= factor * sign(i + j + k);
        });
    }

    // (i^N)³ = (−1)^{N/2} for even N
    fn global_sign(&self) -> f64 {
        sign(self.spec.n / 2)
    }

    /// Momentum samples Ψ(p_k) → position samples ψ(x_j) (no time phase).
    pub fn momentum_to_position(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut d = psi.to_vec();
        self.checkerboard(&mut d, 1.0);
        self.fft3(&mut d, Direction::Inverse);
        let c = (self.spec.dp() / (2.0 * PI).sqrt()).powi(3) * self.global_sign();
        self.checkerboard(&mut d, c);
        d
    }

    /// Position samples ψ(x_j) → momentum samples Ψ(p_k).
    pub fn position_to_momentum(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut d = psi.to_vec();
        self.checkerboard(&mut d, 1.0);
        self.fft3(&mut d, Direction::Forward);
        let c = (self.spec.dx() / (2.0 * PI).sqrt()).powi(3) * self.global_sign();
        self.checkerboard(&mut d, c);
        d
    }

    /// Spectral gradient ∂Ψ/∂p_a for a = 0, 1, 2, i.e. the momentum image of
    /// −i x_a ψ(x).
    pub fn momentum_gradient(&self, psi: &[Complex64]) -> [Vec<Complex64>; 3] {
        let x = self.momentum_to_position(psi);
        let spec = self.spec;
        let grad = |a: usize| {
            let scaled: Vec<Complex64> = x
                .par_iter()
                .enumerate()
                .map(|(idx, v)| *v * Complex64::new(0.0, -spec.position(idx)[a]))
                .collect();
            self.position_to_momentum(&scaled)
        };
        [grad(0), grad(1), grad(2)]
    }

    /// Spectral gradient of a position-space field: ∂ψ/∂x_a.
    pub fn position_gradient(&self, psi: &[Complex64]) -> [Vec<Complex64>; 3] {
        let p = self.position_to_momentum(psi);
        let spec = self.spec;
        let grad = |a: usize| {
            let scaled: Vec<Complex64> = p
                .par_iter()
                .enumerate()
                .map(|(idx, v)| *v * Complex64::new(0.0, spec.momentum(idx)[a]))
                .collect();
            self.momentum_to_position(&scaled)
        };
        [grad(0), grad(1), grad(2)]
    }

    /// Replace each line along `axis` by f(p + δ) where δ = shift(u, v),
    /// using exact trigonometric interpolation.
    pub fn shift_lines<S>(&self, data: &mut [Complex64], axis: usize, shift: S)
    where
        S: Fn(usize, usize) -> f64 + Sync,
    {
        let n = self.spec.n;
        let dp = self.spec.dp();
        self.map_lines(data, axis, |u, v, line| {
            let s = shift(u, v) / dp;
            if s == 0.0 {
                return;
            }
            self.fwd.process(line);
            for (k, c) in line.iter_mut().enumerate() {
                if k == n / 2 {
                    *c *= (PI * s).cos();
                } else {
                    *c *= Complex64::from_polar(1.0, 2.0 * PI * freq(k, n) * s / n as f64);
                }
            }
            self.inv.process(line);
            let inv_n = 1.0 / n as f64;
            for c in line.iter_mut() {
                *c *= inv_n;
            }
        });
    }

    /// Resample each line along `axis` at new coordinates: out(u, v, k) =
    /// f(target(u, v, k)) by trigonometric interpolation, 0 outside the box.
    pub fn resample_lines<T>(&self, data: &mut [Complex64], axis: usize, target: T)
    where
        T: Fn(usize, usize, usize) -> f64 + Sync,
    {
        let n = self.spec.n;
        let dp = self.spec.dp();
        let p0 = self.spec.coord_p(0);
        self.map_lines(data, axis, |u, v, line| {
            let mut coef = line.to_vec();
            self.fwd.process(&mut coef);
            let inv_n = 1.0 / n as f64;
            for (k, out) in line.iter_mut().enumerate() {
                let q = (target(u, v, k) - p0) / dp;
                if !(q >= -0.5 && q <= (n - 1) as f64 + 0.5) {
                    *out = ZERO;
                    continue;
                }
                let z = Complex64::from_polar(1.0, 2.0 * PI * q / n as f64);
                let mut acc = coef[n / 2] * (PI * q).cos();
                // positive frequencies 0..N/2−1
                let mut zk = Complex64::new(1.0, 0.0);
                for c in coef.iter().take(n / 2) {
                    acc += c * zk;
                    zk *= z;
                }
                // negative frequencies −1..−(N/2−1)
                let zc = z.conj();
                let mut zk = zc;
                for k2 in (n / 2 + 1..n).rev() {
                    acc += coef[k2] * zk;
                    zk *= zc;
                }
                *out = acc * inv_n;
            }
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian_grid(spec: &GridSpec, center: Vector3<f64>, sigma: f64, x0: Vector3<f64>) -> Vec<Complex64> {
        (0..spec.len())
            .map(|i| {
                let p = spec.momentum(i);
                let norm = (2.0 * PI * sigma * sigma).powf(-0.75);
                Complex64::from_polar(
                    norm * (-(p - center).norm_squared() / (4.0 * sigma * sigma)).exp(),
                    -p.dot(&x0),
                )
            })
            .collect()
    }

    fn norm2(v: &[Complex64], cell: f64) -> f64 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>() * cell
    }

    #[test]
    fn grid_geometry() {
        let g = GridSpec::new(8, 2.0).unwrap();
        assert_eq!(g.coord_p(4), 0.0);
        assert_relative_eq!(g.coord_p(0), -2.0);
        assert_relative_eq!(g.dp() * g.dx() * 8.0, 2.0 * PI, max_relative = 1e-15);
        let idx = g.index(1, 5, 7);
        assert_eq!(g.unravel(idx), [1, 5, 7]);
        let m = g.mirror(idx);
        assert!((g.momentum(m) + g.momentum(idx)).norm() < 1e-15);
        assert!(GridSpec::new(7, 1.0).is_err());
        assert!(GridSpec::new(8, 0.0).is_err());
    }

    #[test]
    fn parseval_and_roundtrip() {
        let spec = GridSpec::new(32, 2.0).unwrap();
        let e = FourierEngine::new(spec);
        let psi = gaussian_grid(&spec, Vector3::new(0.1, -0.2, 0.0), 0.25, Vector3::new(1.0, 0.5, -2.0));
        let x = e.momentum_to_position(&psi);
        let np = norm2(&psi, spec.cell_volume_p());
        let nx = norm2(&x, spec.cell_volume_x());
        assert_relative_eq!(np, nx, max_relative = 1e-12);
        let back = e.position_to_momentum(&x);
        let err = psi.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn position_space_gaussian_is_analytic() {
        // Fourier transform of the momentum Gaussian centred at 0 with offset x0
        let spec = GridSpec::new(48, 3.0).unwrap();
        let e = FourierEngine::new(spec);
        let sigma = 0.25;
        let x0 = Vector3::new(1.0, 0.0, -0.5);
        let psi = gaussian_grid(&spec, Vector3::zeros(), sigma, x0);
        let x = e.momentum_to_position(&psi);
        let sx = 1.0 / (2.0 * sigma);
        for idx in [spec.index(24, 24, 24), spec.index(26, 23, 22), spec.index(28, 24, 20)] {
            let r = spec.position(idx) - x0;
            let expect = (2.0 * PI * sx * sx).powf(-0.75) * (-r.norm_squared() / (4.0 * sx * sx)).exp();
            assert!((x[idx] - Complex64::from(expect)).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_gradient_matches_analytic() {
        let spec = GridSpec::new(64, 4.5).unwrap();
        let e = FourierEngine::new(spec);
        let s = 0.3;
        let c = Vector3::new(0.2, 0.0, -0.1);
        let x0 = Vector3::new(0.5, -1.0, 0.0);
        let psi = gaussian_grid(&spec, c, s, x0);
        let g = e.momentum_gradient(&psi);
        let mut err: f64 = 0.0;
        for idx in 0..spec.len() {
            let p = spec.momentum(idx);
            for a in 0..3 {
                let expect = psi[idx] * Complex64::new(-(p[a] - c[a]) / (2.0 * s * s), -x0[a]);
                err = err.max((g[a][idx] - expect).norm());
            }
        }
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn shifts_and_resampling() {
        let spec = GridSpec::new(64, 4.5).unwrap();
        let e = FourierEngine::new(spec);
        let s = 0.3;
        let psi = gaussian_grid(&spec, Vector3::zeros(), s, Vector3::new(0.3, 0.0, 0.0));
        // shift along x by δ depending on the z index
        let mut shifted = psi.clone();
        e.shift_lines(&mut shifted, 0, |_, k| 0.05 * spec.coord_p(k));
        let mut resampled = psi.clone();
        e.resample_lines(&mut resampled, 0, |_, k, i| spec.coord_p(i) + 0.05 * spec.coord_p(k));
        let mut err: f64 = 0.0;
        let mut err2: f64 = 0.0;
        for idx in 0..spec.len() {
            let [i, j, k] = spec.unravel(idx);
            let p = Vector3::new(spec.coord_p(i) + 0.05 * spec.coord_p(k), spec.coord_p(j), spec.coord_p(k));
            let expect = (2.0 * PI * s * s).powf(-0.75)
                * Complex64::from_polar((-p.norm_squared() / (4.0 * s * s)).exp(), -0.3 * p.x);
            err = err.max((shifted[idx] - expect).norm());
            err2 = err2.max((resampled[idx] - expect).norm());
        }
        assert!(err < 1e-10, "{err}");
        assert!(err2 < 1e-10, "{err2}");
    }
}
