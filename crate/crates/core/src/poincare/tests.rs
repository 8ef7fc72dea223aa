use super::*;
use crate::amplitudes::{
    expectation_four_momentum, norm_squared, scalar_density, scalar_product, IntrinsicParity, ParticleSpec,
};
use approx::assert_relative_eq;
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn particle(two_s: u32, eta: IntrinsicParity) -> ParticleSpec {
    ParticleSpec::new(1.0, SpinValue::new(two_s), eta).unwrap()
}

fn random_weights(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    (0..dim).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

fn random_packet(rng: &mut ChaCha8Rng, two_s: u32) -> MomentumAmplitude {
    let p = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let x = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let sigma = rng.random_range(0.15..0.4);
    MomentumAmplitude::gaussian(particle(two_s, IntrinsicParity::Even), p, sigma, x, random_weights(rng, two_s as usize + 1))
        .unwrap()
}

fn random_velocity(rng: &mut ChaCha8Rng, max: f64) -> Velocity3 {
    loop {
        let v = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if v.norm() < 1.0 {
            return Velocity3::new(v * max).unwrap();
        }
    }
}

fn random_rotation(rng: &mut ChaCha8Rng) -> RotationMatrix {
    let axis = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    RotationMatrix::from_axis_angle(axis, rng.random_range(-3.1..3.1)).unwrap()
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

#[test]
fn identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let psi = random_packet(&mut rng, 1);
    let p = Vector3::new(0.2, -0.3, 0.4);
    let id = [
        translate(&psi, &FourVector::zero()).unwrap(),
        boost(&psi, &Velocity3::zero()).unwrap(),
        rotate(&psi, &RotationMatrix::identity()).unwrap(),
    ];
    let base = psi.eval(&p).unwrap();
    for t in &id {
        for (x, y) in t.eval(&p).unwrap().iter().zip(&base) {
            assert!((x - y).norm() < 1e-14);
        }
    }
}

#[test]
fn translation_is_a_phase() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let psi = random_packet(&mut rng, 2);
    let a = FourVector::new(1.5, 0.3, -2.0, 0.7);
    let t = translate(&psi, &a).unwrap();
    let p = Vector3::new(0.1, 0.5, -0.2);
    let phase = Complex64::from_polar(1.0, energy(1.0, &p) * 1.5 - p.dot(&a.spatial()));
    for (x, y) in t.eval(&p).unwrap().iter().zip(psi.eval(&p).unwrap()) {
        assert!(close(*x, y * phase, 1e-14));
    }
}

#[test]
fn symmetric_packet_is_rotation_invariant() {
    let psi = MomentumAmplitude::gaussian(
        particle(0, IntrinsicParity::Even),
        Vector3::zeros(),
        0.3,
        Vector3::zeros(),
        vec![c(1.0, 0.0)],
    )
    .unwrap();
    let r = RotationMatrix::from_axis_angle(Vector3::z(), 0.7).unwrap();
    let t = rotate(&psi, &r).unwrap();
    let p = Vector3::new(0.2, 0.1, -0.4);
    assert!((t.eval(&p).unwrap()[0] - psi.eval(&p).unwrap()[0]).norm() < 1e-15);
}

#[test]
fn rotation_covariance_and_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for two_s in [0, 1, 2, 3] {
        let psi = random_packet(&mut rng, two_s);
        let probe = random_packet(&mut rng, two_s);
        let (r1, r2) = (random_rotation(&mut rng), random_rotation(&mut rng));
        let before = expectation_four_momentum(&psi).unwrap();
        let after = expectation_four_momentum(&rotate(&psi, &r1).unwrap()).unwrap();
        assert!((after.spatial() - r1.apply(&before.spatial())).norm() < 1e-9);
        assert_relative_eq!(after.t(), before.t(), max_relative = 1e-11);

        let twice = rotate(&rotate(&psi, &r1).unwrap(), &r2).unwrap();
        let once = rotate(&psi, &r2.compose(&r1)).unwrap();
        let a = scalar_product(&probe, &twice).unwrap();
        let b = scalar_product(&probe, &once).unwrap();
        // equal up to a global sign for half-integer spin
        assert!((a.norm() - b.norm()).abs() < 1e-10);
        assert!(close(a, b, 1e-9) || close(a, -b, 1e-9));
    }
}

#[test]
fn scalar_boost_prefactor() {
    // Ψ′(p) = √(ω(Λ⁻¹p)/ω(p)) Ψ(Λ⁻¹p) for s = 0
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let psi = random_packet(&mut rng, 0);
    let beta = Velocity3::new(Vector3::new(0.3, -0.6, 0.2)).unwrap();
    let b = boost(&psi, &beta).unwrap();
    let inv = pure_boost(&beta).inverse();
    for _ in 0..5 {
        let p = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let q = inv.apply(&FourVector::from_parts(energy(1.0, &p), p)).spatial();
        let expect = psi.eval(&q).unwrap()[0] * (energy(1.0, &q) / energy(1.0, &p)).sqrt();
        assert!(close(b.eval(&p).unwrap()[0], expect, 1e-14));
    }
}

#[test]
fn boosts_preserve_norm_and_overlaps() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for two_s in [0, 1, 2, 3] {
        let a = random_packet(&mut rng, two_s);
        let b = random_packet(&mut rng, two_s);
        let beta = random_velocity(&mut rng, 0.9);
        let (ba, bb) = (boost(&a, &beta).unwrap(), boost(&b, &beta).unwrap());
        assert_relative_eq!(norm_squared(&ba).unwrap(), 1.0, epsilon = 1e-10);
        let before = scalar_product(&a, &b).unwrap().norm_sqr();
        let after = scalar_product(&ba, &bb).unwrap().norm_sqr();
        assert!((before - after).abs() < 1e-10, "s={two_s}: {before} vs {after}");
    }
}

#[test]
fn four_momentum_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..4 {
        let psi = random_packet(&mut rng, 1);
        let beta = random_velocity(&mut rng, 0.8);
        let before = expectation_four_momentum(&psi).unwrap();
        let after = expectation_four_momentum(&boost(&psi, &beta).unwrap()).unwrap();
        let expect = pure_boost(&beta).apply(&before);
        assert!((after.0 - expect.0).norm() <= 1e-8 * expect.0.norm());
    }
}

#[test]
fn scalar_density_transforms_as_a_scalar() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let psi = random_packet(&mut rng, 1);
    let beta = random_velocity(&mut rng, 0.7);
    let s = scalar_density(&psi);
    let s2 = scalar_density(&boost(&psi, &beta).unwrap());
    let inv = pure_boost(&beta).inverse();
    for _ in 0..10 {
        let p = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let q = inv.apply(&FourVector::from_parts(energy(1.0, &p), p)).spatial();
        let (x, y) = (s2.at(&p).unwrap(), s.at(&q).unwrap());
        assert!((x - y).abs() <= 1e-8 * y.max(1e-300) + 1e-300, "{x} {y}");
    }
}

#[test]
fn composed_boosts_are_boost_times_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let psi = random_packet(&mut rng, 1);
    let probes: Vec<_> = (0..3).map(|_| random_packet(&mut rng, 1)).collect();
    let b1 = Velocity3::new(Vector3::new(0.6, 0.0, 0.0)).unwrap();
    let b2 = Velocity3::new(Vector3::new(0.0, 0.7, 0.1)).unwrap();
    let lhs = boost(&boost(&psi, &b1).unwrap(), &b2).unwrap();
    let (b12, w) = (pure_boost(&b2) * pure_boost(&b1)).decompose();
    let rhs = boost(&rotate(&psi, &w).unwrap(), &b12).unwrap();
    assert!(w.angle() > 0.01);
    for pr in &probes {
        let a = scalar_product(pr, &lhs).unwrap();
        let b = scalar_product(pr, &rhs).unwrap();
        assert!((a.norm() - b.norm()).abs() < 1e-8);
    }
}

#[test]
fn parity_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let psi = random_packet(&mut rng, 2);
    let pp = parity(&parity(&psi).unwrap()).unwrap();
    assert!(close(scalar_product(&psi, &pp).unwrap(), c(1.0, 0.0), 1e-12));
    let before = expectation_four_momentum(&psi).unwrap();
    let after = expectation_four_momentum(&parity(&psi).unwrap()).unwrap();
    assert!((after.spatial() + before.spatial()).norm() < 1e-10);
    assert_relative_eq!(after.t(), before.t(), max_relative = 1e-12);

    // η = −1 flips the overlap with the unreflected packet
    let mk = |eta| {
        MomentumAmplitude::gaussian(
            particle(0, eta),
            Vector3::new(0.1, 0.0, 0.0),
            0.3,
            Vector3::zeros(),
            vec![c(1.0, 0.0)],
        )
        .unwrap()
    };
    let even = mk(IntrinsicParity::Even);
    let odd = mk(IntrinsicParity::Odd);
    let e = scalar_product(&even, &parity(&even).unwrap()).unwrap();
    let o = scalar_product(&odd, &parity(&odd).unwrap()).unwrap();
    assert!(e.re > 0.1);
    assert!(close(e, -o, 1e-12));
}

#[test]
fn time_reversal_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for two_s in [0, 1, 2, 3] {
        let a = random_packet(&mut rng, two_s).scaled(c(0.6, 0.8));
        let b = random_packet(&mut rng, two_s);
        let tt = time_reverse(&time_reverse(&a).unwrap()).unwrap();
        let sign = if two_s % 2 == 0 { 1.0 } else { -1.0 };
        let ov = scalar_product(&a, &tt).unwrap();
        assert!(close(ov, c(sign, 0.0), 1e-12), "s={two_s}: {ov}");
        // ⟨Ta|Tb⟩ = ⟨a|b⟩*
        let lhs = scalar_product(&time_reverse(&a).unwrap(), &time_reverse(&b).unwrap()).unwrap();
        let rhs = scalar_product(&a, &b).unwrap().conj();
        assert!(close(lhs, rhs, 1e-12));
        let pa = expectation_four_momentum(&a).unwrap();
        let pt = expectation_four_momentum(&time_reverse(&a).unwrap()).unwrap();
        assert!((pa.spatial() + pt.spatial()).norm() < 1e-10);
    }
}

#[test]
fn euler_angles_reconstruct() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rz = |a: f64| RotationMatrix::from_axis_angle(Vector3::z(), a).unwrap();
    let ry = |a: f64| RotationMatrix::from_axis_angle(Vector3::y(), a).unwrap();
    let mut rs: Vec<_> = (0..10).map(|_| random_rotation(&mut rng)).collect();
    rs.push(rz(0.4));
    rs.push(ry(std::f64::consts::PI).compose(&rz(0.3)));
    for r in rs {
        let (a, b, g) = euler_zyz(r.matrix());
        let back = rz(a).compose(&ry(b)).compose(&rz(g));
        assert!((back.matrix() - r.matrix()).norm() < 1e-12);
    }
}

mod grid {
    use super::*;

    fn sampled(psi: &MomentumAmplitude, n: usize, pmax: f64) -> MomentumAmplitude {
        psi.sample_to_grid(GridSpec::new(n, pmax).unwrap()).unwrap()
    }

    fn packet(two_s: u32, p: [f64; 3], x: [f64; 3], sigma: f64) -> MomentumAmplitude {
        let w = (0..=two_s).map(|i| c(1.0 + i as f64, 0.5 - i as f64)).collect();
        MomentumAmplitude::gaussian(particle(two_s, IntrinsicParity::Odd), Vector3::from(p), sigma, Vector3::from(x), w)
            .unwrap()
    }

    #[test]
    fn discrete_and_translation_match_analytic() {
        let psi = packet(1, [0.2, -0.1, 0.3], [0.5, 0.2, 0.0], 0.25);
        let g = sampled(&psi, 40, 2.6);
        let a = FourVector::new(0.7, 0.1, 0.2, -0.3);
        for (ga, aa) in [
            (translate(&g, &a).unwrap(), translate(&psi, &a).unwrap()),
            (parity(&g).unwrap(), parity(&psi).unwrap()),
            (time_reverse(&g).unwrap(), time_reverse(&psi).unwrap()),
        ] {
            let ov = scalar_product(&ga, &aa).unwrap();
            assert!(close(ov, c(1.0, 0.0), 1e-10), "{ov}");
        }
        let tt = time_reverse(&time_reverse(&g).unwrap()).unwrap();
        assert!(close(scalar_product(&g, &tt).unwrap(), c(-1.0, 0.0), 1e-12));
    }

    #[test]
    fn rotation_matches_analytic() {
        let psi = packet(1, [0.3, -0.2, 0.1], [0.3, 0.0, -0.4], 0.25);
        let g = sampled(&psi, 40, 2.6);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..2 {
            let r = random_rotation(&mut rng);
            let gr = rotate(&g, &r).unwrap();
            let ar = rotate(&psi, &r).unwrap();
            assert_relative_eq!(norm_squared(&gr).unwrap(), 1.0, epsilon = 1e-8);
            let ov = scalar_product(&gr, &ar).unwrap();
            assert!(close(ov, c(1.0, 0.0), 1e-7), "{ov}");
        }
    }

    #[test]
    fn boost_matches_analytic() {
        let psi = packet(1, [0.1, 0.0, -0.1], [0.2, -0.3, 0.1], 0.25);
        let g = sampled(&psi, 48, 3.6);
        for beta in [Vector3::new(0.0, 0.0, 0.5), Vector3::new(-0.4, 0.0, 0.0), Vector3::new(0.3, 0.2, -0.3)] {
            let beta = Velocity3::new(beta).unwrap();
            let rep = boost_with_report(&g, &beta).unwrap();
            assert!(rep.lost_mass < 1e-8);
            let ar = boost(&psi, &beta).unwrap();
            assert_relative_eq!(norm_squared(&rep.amplitude).unwrap(), 1.0, epsilon = 1e-7);
            let ov = scalar_product(&rep.amplitude, &ar).unwrap();
            assert!(close(ov, c(1.0, 0.0), 1e-6), "{beta:?}: {ov}");
        }
    }

    #[test]
    fn boost_out_of_box_reports_loss() {
        let psi = packet(0, [0.0, 0.0, 0.0], [0.0; 3], 0.25);
        let g = sampled(&psi, 24, 2.2);
        let rep = boost_with_report(&g, &Velocity3::new(Vector3::new(0.0, 0.0, 0.9)).unwrap()).unwrap();
        assert!(rep.lost_mass > 1e-3);
    }
}

#[test]
fn inversions_reflect_momenta() {
    let p = Vector3::new(0.3, -0.4, 1.2);
    for g in [PoincareElement::Parity, PoincareElement::TimeReversal] {
        let l = g.lorentz();
        assert_eq!(g.momentum_map(1.0, &p), -p);
        assert_eq!(l.metric_defect(), 0.0);
        assert_eq!(l.compose(&l), LorentzMatrix::identity());
    }
}
