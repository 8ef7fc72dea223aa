use relamp::causality::{rho_grid, EvaluationPath, ScaledPacket};

use crate::config::CausalityConfig;
use crate::error::CliError;
use crate::run::{num, Run};

pub fn run(cfg: &CausalityConfig, run: &mut Run) -> Result<(), CliError> {
    let packet = ScaledPacket::new(cfg.mass_ratio)?;
    let grid = rho_grid(cfg.rho_min, cfg.rho_max, cfg.step)?;
    let curve = packet.causality_scan(cfg.tau, &grid)?;

    let mut w = run.csv("causality.csv")?;
    w.write_record(["rho", "C"])?;
    for (rho, c) in &curve.samples {
        w.write_record([num(*rho), num(*c)])?;
    }
    w.flush()?;

    let at_tau = packet.causality_ratio(cfg.tau, cfg.tau)?;
    let violations = curve.violations().count();
    run.say(format!(
        "C({tau}, {tau}) = {at_tau:.7}; min C = {min:.9} at rho = {argmin}; {violations} of {n} points below 1",
        tau = cfg.tau,
        min = curve.min,
        argmin = curve.argmin,
        n = curve.samples.len()
    ));

    run.check_flag("ratio_positive", curve.min > 0.0, curve.min, "min C over the grid must be positive");

    if let Some(r) = &cfg.reference {
        let value = packet.causality_ratio(r.tau, r.rho)?;
        run.check_le(format!("reference_C({}, {})", r.tau, r.rho), (value - r.value).abs(), r.tolerance);
    }

    if let Some(tol) = cfg.unitarity_tolerance {
        let total = packet.total_probability(cfg.tau)?;
        run.check_le("unitarity", (total - 1.0).abs(), tol);
    }

    if cfg.both_paths {
        let mut w = run.csv("wavefunction.csv")?;
        w.write_record(["rho", "quad_re", "quad_im", "closed_re", "closed_im"])?;
        let mut worst: f64 = 0.0;
        for &rho in &grid {
            let a = packet.spatial_wavefunction(cfg.tau, rho, EvaluationPath::Quadrature)?;
            let b = packet.spatial_wavefunction(cfg.tau, rho, EvaluationPath::ClosedForm)?;
            worst = worst.max((a - b).norm());
            w.write_record([num(rho), num(a.re), num(a.im), num(b.re), num(b.im)])?;
        }
        w.flush()?;
        run.check_le("paths_agree", worst, cfg.paths_tolerance);
    }
    Ok(())
}
