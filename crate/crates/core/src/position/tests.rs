use super::*;
use crate::amplitudes::{norm_squared, IntrinsicParity};
use crate::kinematics::RotationMatrix;
use crate::operators::boosted_energy;
use crate::spin::SpinValue;
use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn scalar(m0: f64) -> ParticleSpec {
    ParticleSpec::new(m0, SpinValue::ZERO, IntrinsicParity::Even).unwrap()
}

fn packet(m0: f64, p: [f64; 3], sigma: f64, x: [f64; 3]) -> MomentumAmplitude {
    MomentumAmplitude::gaussian(scalar(m0), Vector3::from(p), sigma, Vector3::from(x), vec![c(1.0, 0.0)]).unwrap()
}

fn on_grid(psi: &MomentumAmplitude, n: usize, pmax: f64) -> MomentumAmplitude {
    psi.sample_to_grid(GridSpec::new(n, pmax).unwrap()).unwrap()
}

fn rvec(rng: &mut ChaCha8Rng, r: f64) -> Vector3<f64> {
    Vector3::new(rng.random_range(-r..r), rng.random_range(-r..r), rng.random_range(-r..r))
}

#[test]
fn gaussian_position_density() {
    // |ψ(0,x)|² is Gaussian with σx = 1/(2σp) about x̄
    let sigma = 0.3;
    let xbar = Vector3::new(0.5, -1.0, 0.25);
    let g = on_grid(&packet(1.0, [0.2, 0.0, -0.1], sigma, xbar.into()), 40, 3.2);
    let x = to_position(&g, 0.0).unwrap();
    assert!(!x.is_aliased());
    assert_relative_eq!(x.norm_squared(), norm_squared(&g).unwrap(), epsilon = 1e-12);
    let sx = 1.0 / (2.0 * sigma);
    let rho = x.density();
    let mut worst: f64 = 0.0;
    for i in (0..x.spec().len()).step_by(97) {
        let r = x.spec().position(i) - xbar;
        let expect = (2.0 * std::f64::consts::PI * sx * sx).powf(-1.5) * (-r.norm_squared() / (2.0 * sx * sx)).exp();
        worst = worst.max((rho[i] - expect).abs());
    }
    assert!(worst < 1e-12, "{worst}");
    assert!((x.mean_position() - xbar).norm() < 1e-10);

    // round trip
    let back = x.to_momentum();
    let (a, b) = (g.grid_components().unwrap(), back.grid_components().unwrap());
    let err = a[0].iter().zip(&b[0]).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    assert!(err < 1e-12);
}

#[test]
fn evolution_composes_and_is_unitary() {
    let g = on_grid(&packet(1.0, [0.3, 0.0, 0.0], 0.3, [0.0; 3]), 24, 3.0);
    let x0 = to_position(&g, 0.0).unwrap();
    let a = evolve(&evolve(&x0, 0.7), 1.1);
    let b = evolve(&x0, 1.8);
    let direct = to_position(&g, 1.8).unwrap();
    for (u, v) in [(&a, &b), (&b, &direct)] {
        let err = u.components()[0].iter().zip(&v.components()[0]).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }
    assert_relative_eq!(a.t(), 1.8);
    let mut s = x0.clone();
    let n0 = s.norm_squared();
    for _ in 0..1000 {
        s = evolve(&s, 0.01);
    }
    assert!((s.norm_squared() - n0).abs() < 1e-12);
}

#[test]
fn evolution_derivative_is_hamiltonian() {
    let g = on_grid(&packet(1.0, [0.2, 0.1, 0.0], 0.3, [0.0; 3]), 24, 3.0);
    let x0 = to_position(&g, 0.4).unwrap();
    let hpsi = x0.apply_hamiltonian();
    let err = |h: f64| {
        let (p, m) = (evolve(&x0, h), evolve(&x0, -h));
        let mut e = 0.0;
        let mut n = 0.0;
        for ((a, b), hp) in p.components()[0].iter().zip(&m.components()[0]).zip(&hpsi.components()[0]) {
            let d = (a - b) / (2.0 * h);
            e += (d + I * hp).norm_sqr();
            n += hp.norm_sqr();
        }
        (e / n).sqrt()
    };
    let (e1, e2) = (err(0.02), err(0.01));
    assert!(e1 < 1e-3);
    // second order: halving h quarters the error
    assert_relative_eq!(e1 / e2, 4.0, max_relative = 0.05);
}

#[test]
fn nonrelativistic_phase() {
    // e^{−iωΔt} ≈ e^{−im0Δt} e^{−ip²Δt/2m0} for σp ≪ m0
    let m0 = 20.0;
    let g = on_grid(&packet(m0, [0.0; 3], 0.3, [0.0; 3]), 24, 3.0);
    let dt = 2.0;
    let x = to_position(&g, dt).unwrap();
    let spec = *x.spec();
    let eng = FourierEngine::new(spec);
    let mut nr = g.grid_components().unwrap().remove(0);
    for (i, z) in nr.iter_mut().enumerate() {
        let p2 = spec.momentum(i).norm_squared();
        *z *= Complex64::from_polar(1.0, -(m0 + p2 / (2.0 * m0)) * dt);
    }
    let nr = eng.momentum_to_position(&nr);
    let ov: Complex64 = x.components()[0].iter().zip(&nr).map(|(a, b)| a.conj() * b).sum::<Complex64>() * spec.cell_volume_x();
    // p⁴Δt/8m0³ ≈ 1e-6 for these momenta
    assert!((ov - c(1.0, 0.0)).norm() < 1e-5, "{ov}");
}

#[test]
fn heisenberg_drift() {
    let psi = packet(1.0, [0.4, -0.3, 0.2], 0.3, [0.5, 0.0, -0.5]);
    let g = on_grid(&psi, 40, 3.6);
    let t = 3.0;
    let x = to_position(&g, t).unwrap();
    let mut expect = Vector3::new(0.5, 0.0, -0.5);
    for j in 0..3 {
        expect[j] += t * expectation(&psi, &Operator::Multiply(Multiplier::velocity(1.0, j))).unwrap().re;
    }
    assert!((x.mean_position() - expect).norm() < 1e-9);
}

#[test]
fn canonical_commutator() {
    let psi = packet(1.0, [0.4, -0.3, 0.2], 0.3, [0.5, 0.0, -0.5]);
    for i in 0..3 {
        for j in 0..3 {
            let comm = Operator::commutator(&Operator::Position(i), &Operator::Multiply(Multiplier::momentum(j)));
            let v = expectation(&psi, &comm).unwrap();
            let target = if i == j { c(0.0, 1.0) } else { c(0.0, 0.0) };
            assert!((v - target).norm() < 1e-10);
        }
    }
}

#[test]
fn newton_wigner_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let xbar = Vector3::new(0.3, -0.7, 1.1);
    let a = packet(1.0, [0.5, 0.2, -0.4], 0.3, xbar.into());
    let ca = CovariantAmplitude::from_probability(&a);
    for (j, (l, r)) in nw_identity_check(&ca, &ca).unwrap().iter().enumerate() {
        assert!((l - r).norm() < 1e-9);
        assert_relative_eq!(r.re, xbar[j], epsilon = 1e-9);
    }
    let z = CovariantAmplitude::from_probability(&packet(1.0, [0.0; 3], 0.3, [0.0; 3]));
    for (l, r) in nw_identity_check(&z, &z).unwrap() {
        assert!(l.norm() < 1e-12 && r.norm() < 1e-12);
    }
    for _ in 0..3 {
        let pa = packet(1.0, rvec(&mut rng, 0.5).into(), 0.3, rvec(&mut rng, 1.0).into());
        let pb = packet(1.0, rvec(&mut rng, 0.5).into(), 0.35, rvec(&mut rng, 1.0).into());
        let (ca, cb) = (CovariantAmplitude::from_probability(&pa), CovariantAmplitude::from_probability(&pb));
        for (l, r) in nw_identity_check(&ca, &cb).unwrap() {
            assert!((l - r).norm() < 1e-9, "{l} {r}");
        }
    }
    // and on grids, with spectral derivatives
    let ga = CovariantAmplitude::from_probability(&on_grid(&a, 40, 3.2));
    for (l, r) in nw_identity_check(&ga, &ga).unwrap() {
        assert!((l - r).norm() < 1e-8, "{l} {r}");
    }
}

#[test]
fn position_operators_are_hermitian() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let a = packet(1.0, rvec(&mut rng, 0.5).into(), 0.3, rvec(&mut rng, 1.0).into());
    let b = packet(1.0, rvec(&mut rng, 0.5).into(), 0.25, rvec(&mut rng, 1.0).into());
    let beta0 = Velocity3::new(Vector3::new(0.3, -0.5, 0.4)).unwrap();
    for j in 0..3 {
        assert!(hermiticity_defect(&a, &b, &Operator::Position(j)).unwrap() < 1e-10);
        let xp = boosted_position(1.0, &beta0)[j].clone();
        assert!(hermiticity_defect(&a, &b, &xp).unwrap() < 1e-10);
    }
}

#[test]
fn boosted_position_operator() {
    let psi = packet(1.0, [0.5, 0.1, -0.2], 0.05, [0.3, 0.2, 0.1]);
    let zero = boosted_position_operator_apply(&psi, &Velocity3::zero()).unwrap();
    let plain = position_operator_apply(&psi);
    for j in 0..3 {
        let a = scalar_product(&psi, &zero[j]).unwrap();
        let b = scalar_product(&psi, &plain[j]).unwrap();
        assert!((a - b).norm() < 1e-14);
    }
    let beta0 = Velocity3::new(Vector3::new(0.2, 0.5, -0.3)).unwrap();
    let h = Operator::Multiply(boosted_energy(1.0, &beta0));
    let xs = boosted_position(1.0, &beta0);
    for j in 0..3 {
        // ⟨i[Ĥ′, x̂′]⟩ = ⟨β̂′⟩
        let comm = Operator::commutator(&h, &xs[j]).scale(I);
        let lhs = expectation(&psi, &comm).unwrap();
        let rhs = expectation(&psi, &Operator::Multiply(boosted_velocity(1.0, &beta0, j))).unwrap();
        assert!((lhs - rhs).norm() < 1e-8, "{lhs} {rhs}");
        // ([x̂′_i, P̂′_j] − iδ)ψ = 0
        for k in 0..3 {
            let pk = Operator::Multiply(crate::operators::boosted_momentum(1.0, &beta0, k));
            let delta = if j == k { 1.0 } else { 0.0 };
            let op = Operator::sum(vec![
                Operator::commutator(&xs[j], &pk),
                Operator::Multiply(Multiplier::constant(delta)).scale(-I),
            ]);
            let res = norm_squared(&psi.apply_operator(op)).unwrap().sqrt();
            assert!(res < 1e-8, "{j}{k}: {res}");
        }
    }
    let spinor = MomentumAmplitude::gaussian(
        ParticleSpec::new(1.0, SpinValue::HALF, IntrinsicParity::Even).unwrap(),
        Vector3::zeros(),
        0.3,
        Vector3::zeros(),
        vec![c(1.0, 0.0), c(0.0, 0.0)],
    )
    .unwrap();
    assert!(matches!(boosted_position_operator_apply(&spinor, &beta0), Err(Error::Unsupported(_))));
}

#[test]
fn average_event_cases() {
    let psi = packet(1.0, [5.0, 0.0, 0.0], 0.1, [1.0, -2.0, 0.5]);
    let ev = average_event(&psi, &Velocity3::zero(), 1.3).unwrap();
    assert!((ev.x.0 - ev.x_primed.0).norm() < 1e-12);

    let beta0 = Velocity3::new(Vector3::new(0.0, 0.5, 0.0)).unwrap();
    let ev = average_event(&psi, &beta0, 1.3).unwrap();
    assert_relative_eq!(ev.epsilon_bound, 25.0 / 26.0 * 4e-4, max_relative = 1e-12);
    assert!(ev.relative_deviation <= ev.epsilon_bound, "{} > {}", ev.relative_deviation, ev.epsilon_bound);

    let wide = packet(1.0, [0.5, 0.0, 0.0], 0.5, [0.0; 3]);
    assert!(matches!(average_event(&wide, &beta0, 0.0), Err(Error::PacketTooWide { .. })));

    // ⟨½{f, x̂_∥}⟩ = x̄_∥ ∫|Ψ|² f
    let n = beta0.vector().normalize();
    let g0 = beta0.gamma();
    let b0 = beta0.vector();
    let f = move |p: &[crate::dual::Dual; 3]| {
        let w = crate::operators::energy(p, 1.0);
        ((crate::dual::dot_const(p, &b0) / w + 1.0) * g0).recip()
    };
    let sym: [Multiplier; 3] = std::array::from_fn(|j| Multiplier::new("f n", move |p| f(p) * n[j]));
    let lhs = expectation(&psi, &Operator::Symmetrized(sym)).unwrap();
    let rhs = expectation(&psi, &Operator::Multiply(Multiplier::new("f", f))).unwrap() * (-2.0);
    assert!((lhs - rhs).norm() < 1e-8, "{lhs} {rhs}");
}

#[test]
fn position_boosts() {
    let psi = packet(1.0, [0.0; 3], 0.1, [0.0; 3]);
    let g = on_grid(&psi, 48, 2.0);
    let x = to_position(&g, 0.0).unwrap();
    let (same, lost) = boost_position_amplitude(&x, &Velocity3::zero()).unwrap();
    assert_eq!(lost, 0.0);
    assert!((x.scalar_product(&same).unwrap() - c(1.0, 0.0)).norm() < 1e-12);

    let beta = Velocity3::new(Vector3::new(0.0, 0.0, 0.6)).unwrap();
    let (b, lost) = boost_position_amplitude(&x, &beta).unwrap();
    assert!(lost < 1e-8);
    let ratio = b.width_along(&Vector3::z()) / x.width_along(&Vector3::z());
    assert!((ratio * beta.gamma() - 1.0).abs() < 0.05, "{ratio}");

    let other = to_position(&on_grid(&packet(1.0, [0.05, 0.0, 0.0], 0.1, [2.0, 0.0, 1.0]), 48, 2.0), 0.0).unwrap();
    let (bo, _) = boost_position_amplitude(&other, &beta).unwrap();
    let before = x.scalar_product(&other).unwrap().norm_sqr();
    let after = b.scalar_product(&bo).unwrap().norm_sqr();
    assert!((before - after).abs() < 1e-6);
}

#[test]
fn position_space_transformations() {
    let psi = packet(1.0, [0.1, 0.0, 0.0], 0.3, [0.0; 3]);
    let x = to_position(&on_grid(&psi, 32, 3.0), 0.5).unwrap();
    let a = FourVector::new(0.0, 2.0, -1.0, 3.0);
    let moved = position_transforms(&x, &PoincareElement::Translation(a)).unwrap();
    assert!((moved.mean_position() - x.mean_position() - a.spatial()).norm() < 1e-9);

    let pp = position_transforms(&position_transforms(&x, &PoincareElement::Parity).unwrap(), &PoincareElement::Parity)
        .unwrap();
    assert!((x.scalar_product(&pp).unwrap() - c(1.0, 0.0)).norm() < 1e-12);

    // T then evolve(Δt) = evolve(−Δt) then T
    let dt = 0.8;
    let lhs = evolve(&position_transforms(&x, &PoincareElement::TimeReversal).unwrap(), dt);
    let rhs = position_transforms(&evolve(&x, -dt), &PoincareElement::TimeReversal).unwrap();
    let err = lhs.components()[0].iter().zip(&rhs.components()[0]).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    assert!(err < 1e-8, "{err}");

    let r = RotationMatrix::from_axis_angle(Vector3::new(1.0, 1.0, 0.0), 0.9).unwrap();
    let rot = position_transforms(&x, &PoincareElement::Rotation(r)).unwrap();
    assert_relative_eq!(rot.norm_squared(), 1.0, epsilon = 1e-8);
}

#[test]
fn klein_gordon_holds() {
    let g = on_grid(&packet(1.0, [0.3, 0.0, 0.0], 0.3, [0.0; 3]), 24, 3.0);
    let x = to_position(&g, 0.2).unwrap();
    let r = klein_gordon_residual(&x, 0.05);
    assert!(r < 1e-8, "{r}");
}
