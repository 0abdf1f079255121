import math

import numpy as np
import pytest

from shrinkshoot.integrator import IntegratorConfig, OdeSystem, integrate
from shrinkshoot.models import (
    ProfilePath,
    ShrinkerFamily,
    SingularStateError,
    log_entropy_density,
    rhs,
    shrinker_residual,
    signed_curvature,
)

# ln(4 pi^2 / (2 pi)^{3/2}) = ln sqrt(2 pi), frozen from the closed form.
DOUBLY_LP_M2 = 0.9189385332046727


def test_rotational_prefactor_low_dims():
    assert ShrinkerFamily.rotational(2).log_prefactor == pytest.approx(0.0, abs=1e-15)
    # n=4: (1-2) ln 2 - ln Gamma(2) = -ln 2
    assert ShrinkerFamily.rotational(4).log_prefactor == pytest.approx(-math.log(2), abs=1e-14)


@pytest.mark.parametrize("m", [2, 3, 4, 5, 7, 10, 100, 1000, 10**6, 10**7])
def test_doubly_prefactor_two_closed_forms_agree(m):
    lp = ShrinkerFamily.doubly_rotational(m).log_prefactor
    alt = (
        0.5 * math.log(math.pi)
        - (m - 2.5) * math.log(2.0)
        - 2.0 * math.lgamma(m / 2.0)
    )
    assert lp == pytest.approx(alt, rel=1e-12, abs=1e-12)


def test_family_validation():
    with pytest.raises(ValueError):
        ShrinkerFamily.rotational(1)
    with pytest.raises(ValueError):
        ShrinkerFamily.doubly_rotational(1)


def test_rhs_rotational_balances_at_cylinder_radius():
    fam = ShrinkerFamily.rotational(2)
    d = rhs(fam, 0.0, [0.0, 1.0, 0.0, 0.0])
    assert d[0] == pytest.approx(1.0)
    assert d[1] == pytest.approx(0.0, abs=1e-15)
    assert d[2] == pytest.approx(0.0, abs=1e-15)


def test_rhs_rotational_vertical_tangent():
    fam = ShrinkerFamily.rotational(2)
    d = rhs(fam, 0.0, [0.0, math.sqrt(2.0), 0.5 * math.pi, 0.0])
    assert d[2] == pytest.approx(0.0, abs=1e-15)
    assert d[3] == pytest.approx(math.sqrt(2.0) / math.e, rel=1e-14)


def test_rhs_doubly_balances_on_unit_diagonal():
    fam = ShrinkerFamily.doubly_rotational(2)
    d = rhs(fam, 0.0, [1.0, 1.0, 1.75 * math.pi, 0.0])
    assert d[2] == pytest.approx(0.0, abs=1e-14)


def test_rhs_singularities():
    fam = ShrinkerFamily.rotational(2)
    with pytest.raises(SingularStateError):
        rhs(fam, 0.0, [0.0, -0.1, 0.0, 0.0])
    fam2 = ShrinkerFamily.doubly_rotational(2)
    with pytest.raises(SingularStateError):
        rhs(fam2, 0.0, [-0.1, 1.0, 0.0, 0.0])


def test_log_density_rotational_hand_value():
    fam = ShrinkerFamily.rotational(2)
    assert log_entropy_density(fam, 0.0, math.sqrt(2.0)) == pytest.approx(
        0.5 * math.log(2.0) - 1.0, abs=1e-14
    )


def test_log_density_doubly_hand_value():
    fam = ShrinkerFamily.doubly_rotational(2)
    assert log_entropy_density(fam, 1.0, 1.0) == pytest.approx(
        DOUBLY_LP_M2 - 1.0, abs=1e-13
    )


@pytest.mark.parametrize("n", [1000, 10**6])
def test_centered_density_matches_multiprecision_direct(n):
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 40
    fam = ShrinkerFamily.rotational(n)
    assert fam.centered
    rc = math.sqrt(n - 1.0)
    for x, r in [(0.0, rc), (0.3, rc + 0.5), (-0.8, rc - 0.9)]:
        direct = (
            (1 - mp.mpf(n) / 2) * mp.log(2)
            - mp.loggamma(mp.mpf(n) / 2)
            + (n - 1) * mp.log(mp.mpf(r))
            - (mp.mpf(x) ** 2 + mp.mpf(r) ** 2) / 2
        )
        assert log_entropy_density(fam, x, r) == pytest.approx(float(direct), abs=1e-10)


@pytest.mark.parametrize("m", [1000, 10**6])
def test_centered_density_doubly_matches_multiprecision(m):
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 40
    fam = ShrinkerFamily.doubly_rotational(m)
    rc = math.sqrt(m - 1.0)
    for x, r in [(rc, rc), (rc + 0.4, rc - 0.7)]:
        direct = (
            mp.log(4)
            + m * mp.log(mp.pi)
            - mp.mpf(2 * m - 1) / 2 * mp.log(2 * mp.pi)
            - 2 * mp.loggamma(mp.mpf(m) / 2)
            + (m - 1) * (mp.log(mp.mpf(x)) + mp.log(mp.mpf(r)))
            - (mp.mpf(x) ** 2 + mp.mpf(r) ** 2) / 2
        )
        assert log_entropy_density(fam, x, r) == pytest.approx(float(direct), abs=1e-10)


def test_direct_and_centered_agree_at_switch_boundary():
    # n=999 uses the direct form, n=1000 the centered one; both must sit on
    # the same smooth curve of values at the cylinder radius.
    lo = ShrinkerFamily.rotational(999)
    hi = ShrinkerFamily.rotational(1000)
    v_lo = log_entropy_density(lo, 0.0, math.sqrt(998.0))
    v_hi = log_entropy_density(hi, 0.0, math.sqrt(999.0))
    assert not lo.centered and hi.centered
    assert abs(v_hi - v_lo) < 5e-7  # adjacent-dimension drift, not a jump


def test_density_positive_and_finite_on_converged_profiles(angenent2, mcgrath2, chengwei2):
    for rep in (angenent2, mcgrath2, chengwei2):
        _, states = rep.trajectory.sample(300)
        for x, r in zip(states[0], states[1]):
            val = math.exp(log_entropy_density(rep.family, float(x), float(r)))
            assert math.isfinite(val) and val > 0.0


def test_density_positive_at_huge_dimension():
    fam = ShrinkerFamily.rotational(5 * 10**7)
    rc = fam.cylinder_radius
    for x, r in [(0.0, rc), (0.9, rc - 1.1), (-0.9, rc + 1.3)]:
        val = math.exp(log_entropy_density(fam, x, r))
        assert math.isfinite(val) and val > 0.0


def test_signed_curvature_examples():
    fam = ShrinkerFamily.rotational(2)
    assert signed_curvature(fam, [0.0, 1.0, 0.0, 0.0]) == pytest.approx(0.0, abs=1e-15)
    assert signed_curvature(fam, [0.0, 2.0, 0.0, 0.0]) == pytest.approx(-1.5, abs=1e-14)
    state = [0.4, 1.3, 0.7, 0.0]
    assert signed_curvature(fam, state) == rhs(fam, 0.0, state)[2]


def test_reflection_symmetry_of_rotational_flow():
    # A shot from (0, r0, 0) and its mirror (0, r0, pi) trace mirror-image
    # curves: same r(s), opposite x(s).
    fam = ShrinkerFamily.rotational(2)
    system = OdeSystem(4, lambda s, y: rhs(fam, s, y))
    cfg = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13, max_arc_length=2.0)
    fwd = integrate(system, [0.0, 0.8, 0.0, 0.0], cfg)
    bwd = integrate(system, [0.0, 0.8, math.pi, 0.0], cfg)
    for s in np.linspace(0.0, 2.0, 40):
        a = fwd.dense_eval(float(s))
        b = bwd.dense_eval(float(s))
        assert float(b[1]) == pytest.approx(float(a[1]), abs=1e-9)
        assert float(b[0]) == pytest.approx(-float(a[0]), abs=1e-9)


def test_total_turning_of_closed_torus_profile(angenent2):
    # The closed profile turns through exactly 2 pi; integrate kappa = theta'
    # over the loop by quadrature on resampled states.
    path = angenent2.trajectory
    s, states = path.sample(4001)
    kappa = [
        signed_curvature(angenent2.family, states[:, i]) for i in range(states.shape[1])
    ]
    total = np.trapezoid(kappa, s)
    assert total == pytest.approx(2.0 * math.pi, abs=1e-6)


def _cylinder_path(n=2, length=6.0):
    fam = ShrinkerFamily.rotational(n)
    system = OdeSystem(4, lambda s, y: rhs(fam, s, y))
    cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-13, max_arc_length=length)
    start = [-length / 2.0, math.sqrt(n - 1.0), 0.0, 0.0]
    return fam, ProfilePath.direct(integrate(system, start, cfg))


def test_residual_vanishes_on_exact_cylinder():
    fam, path = _cylinder_path()
    assert shrinker_residual(path, fam, samples=200) <= 1e-10


def test_residual_small_on_converged_profile(angenent2):
    res = shrinker_residual(angenent2.trajectory, angenent2.family, samples=1000)
    assert res <= 1e-5


def test_entropy_accumulator_is_nondecreasing(angenent2, mcgrath2, chengwei2):
    for rep in (angenent2, mcgrath2, chengwei2):
        _, states = rep.trajectory.sample(800)
        lam = states[3]
        assert np.all(np.diff(lam) >= -1e-14)


def test_residual_detects_perturbed_curve(angenent2):
    path = angenent2.trajectory

    class Warped:
        length = path.length
        symmetry_factor = 1.0

        @staticmethod
        def state(s):
            st = path.state(s).copy()
            st[0] += 0.1 * math.sin(math.pi * s / path.length)
            return st

    res = shrinker_residual(Warped(), angenent2.family, samples=300)
    assert res > 1e-2
