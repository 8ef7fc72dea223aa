use nalgebra::Vector3;
use num_complex::Complex64;
use relamp::amplitudes::{expectation, norm_squared, MomentumAmplitude};
use relamp::operators::{boosted_energy, boosted_momentum, boosted_position, boosted_velocity, Multiplier, Operator};
use relamp::position::{average_event, boost_position_amplitude, to_position, PositionAmplitude};
use relamp::Error;

use crate::config::{velocity, AverageEventConfig, BoostPositionConfig};
use crate::error::CliError;
use crate::run::{num, Run};

const I: Complex64 = Complex64::new(0.0, 1.0);

// density along each axis through the box centre
fn write_lines(run: &mut Run, before: &PositionAmplitude, after: &PositionAmplitude) -> Result<(), CliError> {
    let spec = *before.spec();
    let (rb, ra) = (before.density(), after.density());
    let c = spec.n() / 2;
    let mut w = run.csv("position_density.csv")?;
    w.write_record(["axis", "x", "density_before", "density_after"])?;
    for (axis, name) in ["x", "y", "z"].iter().enumerate() {
        for k in 0..spec.n() {
            let mut ix = [c; 3];
            ix[axis] = k;
            let idx = spec.index(ix[0], ix[1], ix[2]);
            w.write_record([name.to_string(), num(spec.coord_x(k)), num(rb[idx]), num(ra[idx])])?;
        }
    }
    w.flush()?;
    Ok(())
}

// ⟨i[Ĥ′, x̂′_j]⟩ − ⟨v̂′_j⟩ and ‖([x̂′_j, p̂′_k] − iδ_jk)ψ‖
fn velocity_law(psi: &MomentumAmplitude, beta0: &relamp::kinematics::Velocity3) -> Result<(f64, f64), CliError> {
    let m0 = psi.particle().m0();
    let h = Operator::Multiply(boosted_energy(m0, beta0));
    let xs = boosted_position(m0, beta0);
    let (mut vel, mut comm): (f64, f64) = (0.0, 0.0);
    for (j, x) in xs.iter().enumerate() {
        let lhs = expectation(psi, &Operator::commutator(&h, x).scale(I))?;
        let rhs = expectation(psi, &Operator::Multiply(boosted_velocity(m0, beta0, j)))?;
        vel = vel.max((lhs - rhs).norm());
        for k in 0..3 {
            let pk = Operator::Multiply(boosted_momentum(m0, beta0, k));
            let delta = if j == k { 1.0 } else { 0.0 };
            let op = Operator::sum(vec![
                Operator::commutator(x, &pk),
                Operator::Multiply(Multiplier::constant(delta)).scale(-I),
            ]);
            comm = comm.max(norm_squared(&psi.apply_operator(op))?.sqrt());
        }
    }
    Ok((vel, comm))
}

fn run_average_event(cfg: &BoostPositionConfig, a: &AverageEventConfig, run: &mut Run) -> Result<(), CliError> {
    let particle = cfg.particle.build("particle")?;
    let psi = a.packet.build(&particle, "average_event.packet")?;
    let beta0 = velocity("average_event.beta0", a.beta0)?;

    let (vel, comm) = velocity_law(&psi, &beta0)?;
    run.check_le("velocity_law", vel, cfg.tolerances.velocity_law);
    run.check_le("commutator_invariance", comm, cfg.tolerances.velocity_law);

    let ev = match average_event(&psi, &beta0, a.t) {
        Ok(ev) => ev,
        Err(Error::PacketTooWide { bound, limit }) => {
            run.check_flag("average_event", false, bound, format!("refused: bound {bound:e} is not below {limit}"));
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let mut w = run.csv("average_event.csv")?;
    w.write_record(["mu", "x", "x_primed", "lambda_x"])?;
    for mu in 0..4 {
        w.write_record([mu.to_string(), num(ev.x.0[mu]), num(ev.x_primed.0[mu]), num(ev.lambda_x.0[mu])])?;
    }
    w.flush()?;
    let mut w = run.csv("average_event_bound.csv")?;
    w.write_record(["relative_deviation", "epsilon_bound"])?;
    w.write_record([num(ev.relative_deviation), num(ev.epsilon_bound)])?;
    w.flush()?;
    let passed = ev.relative_deviation <= ev.epsilon_bound * run.tol_scale;
    run.check_flag(
        "average_event",
        passed,
        ev.relative_deviation,
        format!("deviation must not exceed the bound {:e}", ev.epsilon_bound),
    );
    run.say(format!("average event: deviation {:.3e}, bound {:.3e}", ev.relative_deviation, ev.epsilon_bound));
    Ok(())
}

pub fn run(cfg: &BoostPositionConfig, run: &mut Run) -> Result<(), CliError> {
    let particle = cfg.particle.build("particle")?;
    let spec = cfg.grid.build("grid")?;
    let beta = velocity("beta", cfg.beta)?;
    let psi = cfg.packet.build(&particle, "packet")?.sample_to_grid(spec)?;
    let before = to_position(&psi, cfg.t)?;
    let (after, lost) = boost_position_amplitude(&before, &beta)?;
    write_lines(run, &before, &after)?;

    let (nb, na) = (before.norm_squared(), after.norm_squared());
    run.check_le("lost_mass", lost, cfg.tolerances.lost_mass);
    run.check_le("norm_preserved", (na + lost - nb).abs(), cfg.tolerances.norm);

    let dirs = [Vector3::x(), Vector3::y(), Vector3::z()];
    let mut w = run.csv("position_moments.csv")?;
    w.write_record(["quantity", "before", "after"])?;
    w.write_record(["norm".to_string(), num(nb), num(na)])?;
    let (mb, ma) = (before.mean_position(), after.mean_position());
    for (j, d) in dirs.iter().enumerate() {
        w.write_record([format!("mean_x{j}"), num(mb[j]), num(ma[j])])?;
        w.write_record([format!("width_x{j}"), num(before.width_along(d)), num(after.width_along(d))])?;
    }
    let speed = beta.speed();
    if speed > 0.0 {
        let n = beta.vector() / speed;
        let ratio = after.width_along(&n) / before.width_along(&n);
        w.write_record(["width_ratio_along_beta".to_string(), num(1.0), num(ratio)])?;
        if cfg.check_contraction {
            let want = 1.0 / beta.gamma();
            run.check_le("length_contraction", (ratio / want - 1.0).abs(), cfg.tolerances.contraction);
        }
        run.say(format!("width along beta scaled by {ratio:.6} (1/gamma = {:.6})", 1.0 / beta.gamma()));
    }
    w.flush()?;

    if let Some(a) = &cfg.average_event {
        run_average_event(cfg, a, run)?;
    }
    Ok(())
}
