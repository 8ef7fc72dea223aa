use nalgebra::{Matrix2, Vector2, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relamp::covariant::{dirac_build, dirac_momentum_residual, dirac_position_residual, BoostSign, DiracBoostMatrix};

use crate::config::DiracConfig;
use crate::error::CliError;
use crate::run::{num, Run};

pub fn run(cfg: &DiracConfig, run: &mut Run) -> Result<(), CliError> {
    let particle = cfg.particle()?;
    let spec = cfg.grid.build("grid")?;
    let psi = cfg.packet.build(&particle, "packet")?.sample_to_grid(spec)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.random_momenta.seed);
    let r = cfg.random_momenta.range;
    let mut w = run.csv("dirac_residuals.csv")?;
    w.write_record(["kind", "px", "py", "pz", "residual"])?;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.random_momenta.count {
        let p = Vector3::from([0; 3].map(|_| rng.random_range(-r..r)));
        let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let xi = Vector2::new(c(), c());
        let res = dirac_momentum_residual(cfg.m0, &p, &xi)?;
        worst = worst.max(res);
        w.write_record(["momentum".to_string(), num(p.x), num(p.y), num(p.z), num(res)])?;
    }
    let position = dirac_position_residual(&psi, cfg.t, cfg.h)?;
    w.write_record(["position".to_string(), String::new(), String::new(), String::new(), num(position)])?;
    w.flush()?;

    run.check_le("momentum_residual", worst, cfg.tolerances.momentum);
    run.check_le("position_residual", position, cfg.tolerances.position);
    let mut rest: f64 = 0.0;
    for s in [BoostSign::Plus, BoostSign::Minus] {
        let d = DiracBoostMatrix::new(s, cfg.m0, &Vector3::zeros())?;
        rest = rest.max((d.matrix() - Matrix2::identity()).camax());
    }
    run.check_flag("boost_identity_at_rest", rest == 0.0, rest, "D(+)[0] and D(-)[0] must equal the identity exactly");

    let field = dirac_build(&psi, cfg.t)?;
    let comps = field.components();
    let c = spec.n() / 2;
    let mut w = run.csv("dirac_components.csv")?;
    let mut header = vec!["x".to_string()];
    for k in 0..4 {
        header.push(format!("c{k}_re"));
        header.push(format!("c{k}_im"));
    }
    w.write_record(&header)?;
    for i in 0..spec.n() {
        let idx = spec.index(i, c, c);
        let mut row = vec![num(spec.coord_x(i))];
        for comp in comps.iter() {
            row.push(num(comp[idx].re));
            row.push(num(comp[idx].im));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    run.say(format!(
        "Dirac residuals: momentum {worst:.3e} over {} momenta, position {position:.3e}; field norm {:.12}",
        cfg.random_momenta.count,
        field.norm_squared()
    ));
    Ok(())
}
