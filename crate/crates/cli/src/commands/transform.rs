use std::fs::File;
use std::io::BufReader;

use nalgebra::Vector3;
use num_complex::Complex64;
use relamp::amplitudes::io::{read_grid, write_grid};
use relamp::amplitudes::{
    expectation_four_momentum, norm_squared, scalar_product, GaussianPacket, MomentumAmplitude, ParticleSpec,
};
use relamp::kinematics::{FourVector, LorentzMatrix};
use relamp::poincare::{apply, boost_with_report, PoincareElement};

use crate::config::{CarrierConfig, TransformConfig};
use crate::error::CliError;
use crate::run::{num, Run};

fn load(cfg: &TransformConfig) -> Result<MomentumAmplitude, CliError> {
    match &cfg.carrier {
        CarrierConfig::Gaussian { packet, grid } => {
            let particle = cfg
                .particle
                .as_ref()
                .ok_or_else(|| CliError::Config {
                    path: "particle".into(),
                    message: "a gaussian carrier needs a particle".into(),
                })?
                .build("particle")?;
            let psi = packet.build(&particle, "carrier.gaussian.packet")?;
            match grid {
                Some(g) => Ok(psi.sample_to_grid(g.build("carrier.gaussian.grid")?)?),
                None => Ok(psi),
            }
        }
        CarrierConfig::GridFile { path } => {
            if cfg.particle.is_some() {
                return Err(CliError::Config {
                    path: "particle".into(),
                    message: "grid files carry their own particle; remove this key".into(),
                });
            }
            let f = File::open(path).map_err(|e| CliError::Config {
                path: "carrier.grid_file.path".into(),
                message: format!("{}: {e}", path.display()),
            })?;
            Ok(read_grid(BufReader::new(f))?)
        }
    }
}

/// A second packet near the first, for the scalar-product invariant.
fn probe(psi: &MomentumAmplitude) -> Result<MomentumAmplitude, CliError> {
    let particle: ParticleSpec = *psi.particle();
    let dim = particle.spin().dim();
    let (p_bar, sigma, x_bar) = match psi.base_packet() {
        Some(g) => (
            g.p_bar() + g.sigma_p() * Vector3::new(0.5, -0.3, 0.2),
            g.sigma_p() * 1.2,
            g.x_bar() + Vector3::new(0.4 / g.sigma_p(), 0.0, -0.2 / g.sigma_p()),
        ),
        None => {
            let spec = psi.grid_spec().expect("grid or analytic");
            let s = spec.pmax() / 10.0;
            (Vector3::new(0.3 * s, -0.2 * s, 0.1 * s), s, Vector3::new(0.5 / s, 0.0, 0.0))
        }
    };
    let weights: Vec<Complex64> =
        (0..dim).map(|i| Complex64::new(1.0 / (1.0 + i as f64), 0.3 * i as f64)).collect();
    let g = MomentumAmplitude::from_packet(particle, GaussianPacket::new(p_bar, sigma, x_bar, weights)?)?;
    match psi.grid_spec() {
        Some(spec) => Ok(g.sample_to_grid(spec)?),
        None => Ok(g),
    }
}

/// Apply the list left to right, totalling probability lost by grid boosts.
fn apply_seq(psi: &MomentumAmplitude, seq: &[PoincareElement]) -> Result<(MomentumAmplitude, f64), CliError> {
    let mut cur = psi.clone();
    let mut lost = 0.0;
    for g in seq {
        cur = match g {
            PoincareElement::Boost(b) => {
                let rep = boost_with_report(&cur, b)?;
                lost += rep.lost_mass;
                rep.amplitude
            }
            other => apply(&cur, other)?,
        };
    }
    Ok((cur, lost))
}

fn sample_points(cfg: &TransformConfig, psi: &MomentumAmplitude) -> Vec<Vector3<f64>> {
    if let Some(s) = &cfg.samples {
        return s.iter().map(|p| Vector3::from(*p)).collect();
    }
    match (psi.grid_spec(), psi.base_packet()) {
        // x-axis nodes through the grid centre
        (Some(spec), _) => (0..spec.n()).map(|i| Vector3::new(spec.coord_p(i), 0.0, 0.0)).collect(),
        (None, Some(g)) => (0..41)
            .map(|k| g.p_bar() + Vector3::new(g.sigma_p() * (-4.0 + 0.2 * k as f64), 0.0, 0.0))
            .collect(),
        (None, None) => Vec::new(),
    }
}

fn rel(a: &FourVector, b: &FourVector) -> f64 {
    (a.0 - b.0).norm() / b.0.norm().max(f64::MIN_POSITIVE)
}

pub fn run(cfg: &TransformConfig, run: &mut Run) -> Result<(), CliError> {
    let seq = cfg.elements()?;
    let psi = load(cfg)?;
    let grid = psi.is_grid();
    let (out, lost) = apply_seq(&psi, &seq)?;

    let points = sample_points(cfg, &psi);
    let mut w = run.csv("transform.csv")?;
    w.write_record(["px", "py", "pz", "component", "in_re", "in_im", "out_re", "out_im", "in_abs", "out_abs"])?;
    for p in &points {
        let a = psi.eval(p)?;
        let b = out.eval(p)?;
        for (i, (x, y)) in a.iter().zip(&b).enumerate() {
            w.write_record([
                num(p.x),
                num(p.y),
                num(p.z),
                i.to_string(),
                num(x.re),
                num(x.im),
                num(y.re),
                num(y.im),
                num(x.norm()),
                num(y.norm()),
            ])?;
        }
    }
    w.flush()?;
    if grid {
        let f = run.file("transformed.grid")?;
        write_grid(&out, f)?;
    }

    let n_in = norm_squared(&psi)?;
    let n_out = norm_squared(&out)?;
    let norm_tol = if grid { cfg.tolerances.grid_norm } else { cfg.tolerances.norm };
    run.check_le("norm_preserved", (n_out + lost - n_in).abs(), norm_tol);
    if grid {
        run.check_le("lost_mass", lost, cfg.tolerances.lost_mass);
    }

    let lambda = seq.iter().fold(LorentzMatrix::identity(), |acc, g| g.lorentz().compose(&acc));
    let p_in = expectation_four_momentum(&psi)?;
    let p_out = expectation_four_momentum(&out)?;
    let want = lambda.apply(&p_in);
    run.check_le("four_momentum_covariance", rel(&p_out, &want), cfg.tolerances.four_momentum);

    let probe_in = probe(&psi)?;
    let (probe_out, _) = apply_seq(&probe_in, &seq)?;
    let before = scalar_product(&probe_in, &psi)?.norm_sqr();
    let after = scalar_product(&probe_out, &out)?.norm_sqr();
    run.check_le("scalar_product_modulus", (after - before).abs(), norm_tol);

    let mut w = run.csv("invariants.csv")?;
    w.write_record(["quantity", "before", "after", "expected"])?;
    w.write_record(["norm".to_string(), num(n_in), num(n_out), num(n_in - lost)])?;
    for mu in 0..4 {
        w.write_record([format!("P{mu}"), num(p_in.0[mu]), num(p_out.0[mu]), num(want.0[mu])])?;
    }
    w.write_record(["probe_overlap".to_string(), num(before), num(after), num(before)])?;
    w.flush()?;

    let names: Vec<&str> = seq.iter().map(|g| g.name()).collect();
    run.say(format!(
        "applied [{}] to a {} carrier; norm {n_in:.12} -> {n_out:.12}",
        names.join(", "),
        if grid { "grid" } else { "gaussian" }
    ));
    Ok(())
}
