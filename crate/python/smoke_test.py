"""Smoke test for the pyrelamp extension.

Build and install first:  pip install --no-build-isolation -e crates/python
Then:                     python python/smoke_test.py
"""

import cmath
import math

import pyrelamp as rl


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    electron = rl.Particle(1.0, two_s=1)
    psi = rl.Amplitude.gaussian(electron, [0.2, -0.1, 0.3], 0.3, weights=[0.6, 0.8j])
    chi = rl.Amplitude.gaussian(electron, [0.0, 0.2, 0.1], 0.35, x_bar=[0.5, 0.0, -0.3], weights=[1.0, 0.0])
    close(psi.norm_squared(), 1.0, 1e-10)

    # transition probabilities survive a mixed sequence
    before = abs(chi.scalar_product(psi)) ** 2
    seq = lambda a: a.boost([0.3, 0.2, -0.1]).rotate([1, 1, 0], 0.8).translate([0.4, 0.1, 0, 0.2]).parity()
    after = abs(seq(chi).scalar_product(seq(psi))) ** 2
    close(after, before, 1e-8)

    # four-momentum transforms as a four-vector
    beta = [0.0, 0.0, 0.6]
    p_in = psi.four_momentum()
    p_out = psi.boost(beta).four_momentum()
    lam = rl.pure_boost(beta)
    want = [sum(lam[i][j] * p_in[j] for j in range(4)) for i in range(4)]
    for a, b in zip(p_out, want):
        close(a, b, 1e-8)

    # T² = (−1)^{2s}
    tt = psi.time_reverse().time_reverse()
    close(psi.scalar_product(tt), -1.0, 1e-10)

    w = rl.wigner_rotation([0.0, 0.9, 0.0], 1.0, [2.0, 0.0, 0.0])
    det = (w[0][0] * (w[1][1] * w[2][2] - w[1][2] * w[2][1])
           - w[0][1] * (w[1][0] * w[2][2] - w[1][2] * w[2][0])
           + w[0][2] * (w[1][0] * w[2][1] - w[1][1] * w[2][0]))
    close(det, 1.0, 1e-10)

    scalar = rl.Amplitude.gaussian(rl.Particle(1.0), [0.3, -0.1, 0.0], 0.3).sample_to_grid(24, 3.0)
    x = scalar.to_position(0.7)
    close(x.norm_squared(), 1.0, 1e-10)
    assert x.klein_gordon_residual(0.05) < 1e-8
    assert x.evolve(-0.7).t == 0.0

    a = rl.Amplitude.gaussian(rl.Particle(1.0), [0.1, 0.2, 0.0], 0.3)
    b = rl.Amplitude.gaussian(rl.Particle(1.0), [0.0, -0.1, 0.2], 0.25, x_bar=[0.4, 0, 0])
    for lhs, rhs in rl.nw_identity_check(a, b):
        close(lhs, rhs, 1e-8)

    narrow = rl.Amplitude.gaussian(rl.Particle(1.0), [5.0, 0.0, 0.0], 0.1)
    ev = rl.average_event(narrow, [0.0, 0.5, 0.0], 1.5)
    assert ev["relative_deviation"] <= ev["epsilon_bound"]
    try:
        rl.Amplitude.gaussian(rl.Particle(1.0), [0.0, 0.0, 0.0], 0.2).boost([1.2, 0.0, 0.0])
    except ValueError as e:
        assert "strictly less than 1" in str(e)
    else:
        raise AssertionError("superluminal boost accepted")

    u_res = rl.dirac_momentum_residual(1.0, [0.3, -2.0, 1.0], [0.6, 0.8j])
    assert u_res < 1e-10

    c55 = rl.causality_ratio(5.0, 5.0)
    close(c55, 0.996958, 2e-4)
    rhos, cs = rl.causality_scan(5.0, 0.1, 10.0, 0.1)
    assert len(rhos) == 100 and min(cs) < 1.0
    q = rl.spatial_wavefunction(3.0, 2.0, path="quadrature")
    cf = rl.spatial_wavefunction(3.0, 2.0)
    assert abs(q - cf) < 1e-9 and isinstance(cf, complex)
    close(abs(rl.spatial_wavefunction(0.0, 1.0)), (2 * math.pi) ** -0.75 * math.exp(-0.25), 1e-12)
    assert cmath.isfinite(rl.spatial_wavefunction(5.0, 0.0))

    print(f"pyrelamp {rl.__version__}: C(5,5) = {c55:.7f}, min C = {min(cs):.6f}; all smoke checks passed")


if __name__ == "__main__":
    main()
