use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relamp::amplitudes::{CovariantAmplitude, MomentumAmplitude};
use relamp::operators::{boosted_position, Operator};
use relamp::position::{hermiticity_defect, nw_identity_check};

use crate::config::{velocity, NwCheckConfig, PacketConfig, RandomPairs};
use crate::error::CliError;
use crate::run::{num, Run};

fn random_packet(rng: &mut ChaCha8Rng, r: &RandomPairs, dim: usize) -> PacketConfig {
    let mut v = |range: f64| [0; 3].map(|_| rng.random_range(-range..range));
    let p_bar = v(r.p_range);
    let x_bar = v(r.x_range);
    let sigma_p = rng.random_range(r.sigma_min..r.sigma_max);
    let weights = (0..dim).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
    PacketConfig { p_bar, sigma_p, x_bar, weights: Some(weights) }
}

pub fn run(cfg: &NwCheckConfig, run: &mut Run) -> Result<(), CliError> {
    let particle = cfg.particle.build("particle")?;
    let mut pairs: Vec<(MomentumAmplitude, MomentumAmplitude)> = Vec::new();
    for (i, [a, b]) in cfg.pairs.iter().enumerate() {
        pairs.push((a.build(&particle, &format!("pairs[{i}][0]"))?, b.build(&particle, &format!("pairs[{i}][1]"))?));
    }
    if let Some(r) = &cfg.random {
        let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
        let dim = particle.spin().dim();
        for _ in 0..r.count {
            let a = random_packet(&mut rng, r, dim).build(&particle, "random")?;
            let b = random_packet(&mut rng, r, dim).build(&particle, "random")?;
            pairs.push((a, b));
        }
    }
    let xs_boosted = match cfg.beta0 {
        Some(b) => Some(boosted_position(particle.m0(), &velocity("beta0", b)?)),
        None => None,
    };

    let mut ident = run.csv("nw_identity.csv")?;
    ident.write_record(["pair", "component", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "gap"])?;
    let mut herm = run.csv("hermiticity.csv")?;
    herm.write_record(["pair", "operator", "defect"])?;
    let (mut gap, mut defect): (f64, f64) = (0.0, 0.0);
    for (k, (a, b)) in pairs.iter().enumerate() {
        let (ca, cb) = (CovariantAmplitude::from_probability(a), CovariantAmplitude::from_probability(b));
        for (j, (l, r)) in nw_identity_check(&ca, &cb)?.into_iter().enumerate() {
            let g = (l - r).norm();
            gap = gap.max(g);
            ident.write_record([k.to_string(), j.to_string(), num(l.re), num(l.im), num(r.re), num(r.im), num(g)])?;
        }
        for j in 0..3 {
            let d = hermiticity_defect(a, b, &Operator::Position(j))?;
            defect = defect.max(d);
            herm.write_record([k.to_string(), format!("x{j}"), num(d)])?;
            if let Some(xs) = &xs_boosted {
                let d = hermiticity_defect(a, b, &xs[j])?;
                defect = defect.max(d);
                herm.write_record([k.to_string(), format!("x'{j}"), num(d)])?;
            }
        }
    }
    ident.flush()?;
    herm.flush()?;

    run.check_le("nw_identity", gap, cfg.tolerances.identity);
    run.check_le("position_hermiticity", defect, cfg.tolerances.hermiticity);
    run.say(format!("{} pairs: identity gap {gap:.3e}, hermiticity defect {defect:.3e}", pairs.len()));
    Ok(())
}
