//! Three-dimensional integration rules shared by sets of amplitudes.

use nalgebra::Vector3;
use num_complex::Complex64;

use super::{Carrier, MomentumAmplitude};
use crate::error::{Error, Result};
use crate::fourier::GridSpec;
use crate::quadrature::GaussHermite;

/// Gauss–Hermite orders tried in turn for analytic carriers.
const ORDERS: [usize; 5] = [20, 28, 40, 56, 80];
const REL_TOL: f64 = 1e-11;
const ABS_TOL: f64 = 1e-13;
/// Accept the last estimate with a warning below this mismatch.
const SOFT_TOL: f64 = 1e-8;

/// Points (final-frame momenta) and weights such that
/// ∫d³p f(p) ≈ Σ_i w_i f(p_i).
pub(crate) struct Rule {
    pub points: Vec<Vector3<f64>>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn grid(spec: &GridSpec) -> Self {
        let w = spec.cell_volume_p();
        Rule { points: (0..spec.len()).map(|i| spec.momentum(i)).collect(), weights: vec![w; spec.len()] }
    }
}

fn grid_spec_of(amps: &[&MomentumAmplitude]) -> Result<Option<GridSpec>> {
    let mut spec: Option<GridSpec> = None;
    for a in amps {
        if let Carrier::Grid(g) = &a.root().carrier {
            match spec {
                None => spec = Some(g.spec),
                Some(s) if s != g.spec => {
                    return Err(Error::usage("grid amplitudes live on different grids"));
                }
                _ => {}
            }
        }
    }
    Ok(spec)
}

/// Gaussian that bounds the integrand in the base frame of the first
/// amplitude: centre and width from the product of all envelopes.
fn envelope(amps: &[&MomentumAmplitude]) -> (Vector3<f64>, f64) {
    let primary = match &amps[0].root().carrier {
        Carrier::Analytic(a) => a.clone(),
        _ => unreachable!("analytic rule on a non-analytic carrier"),
    };
    let m0 = amps[0].particle().m0();
    let mut num = Vector3::zeros();
    let mut den = 0.0;
    for a in amps {
        if let Carrier::Analytic(st) = &a.root().carrier {
            let (pf, _) = st.forward(m0, &st.base.p_bar());
            let c = primary.pre_image(m0, &pf);
            let s2 = st.base.sigma_p().powi(2);
            num += c / s2;
            den += 1.0 / s2;
        }
    }
    let c = num / den;
    // Σ 1/(4σ_r²) = 1/(2s²)
    let s = (den / 2.0).sqrt().recip();
    (c, s)
}

fn hermite_rule(amps: &[&MomentumAmplitude], order: usize) -> Rule {
    let st = match &amps[0].root().carrier {
        Carrier::Analytic(a) => a.clone(),
        _ => unreachable!(),
    };
    let m0 = amps[0].particle().m0();
    let (c, s) = envelope(amps);
    let gh = GaussHermite::new(order);
    let h = std::f64::consts::SQRT_2 * s;
    let n = order;
    let mut points = Vec::with_capacity(n * n * n);
    let mut weights = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let q = c + Vector3::new(gh.nodes[i], gh.nodes[j], gh.nodes[k]) * h;
                let (p, det) = st.forward(m0, &q);
                points.push(p);
                weights.push(h * h * h * gh.scaled_weights[i] * gh.scaled_weights[j] * gh.scaled_weights[k] * det);
            }
        }
    }
    Rule { points, weights }
}

/// Evaluate `f` on a rule suited to `amps`: the common grid if any of them
/// lives on one, otherwise Gauss–Hermite rules of increasing order until two
/// successive estimates agree.
pub(crate) fn integrate<F>(amps: &[&MomentumAmplitude], f: F) -> Result<Complex64>
where
    F: Fn(&Rule) -> Result<Complex64>,
{
    if let Some(spec) = grid_spec_of(amps)? {
        return f(&Rule::grid(&spec));
    }
    let mut prev: Option<Complex64> = None;
    let mut evaluations = 0;
    let mut last_err = f64::INFINITY;
    for &n in ORDERS.iter() {
        let rule = hermite_rule(amps, n);
        evaluations += rule.points.len();
        let v = f(&rule)?;
        if let Some(p) = prev {
            last_err = (v - p).norm();
            if last_err <= REL_TOL * v.norm() + ABS_TOL {
                return Ok(v);
            }
        }
        prev = Some(v);
    }
    let v = prev.unwrap();
    if last_err <= SOFT_TOL * v.norm().max(1.0) {
        log::warn!("Gauss–Hermite estimate only settled to {last_err:e}");
        return Ok(v);
    }
    Err(Error::Quadrature { estimate: v.norm(), error: last_err, evaluations })
}
