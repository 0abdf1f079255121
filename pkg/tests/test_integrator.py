import math

import numpy as np
import pytest

from shrinkshoot.integrator import (
    EventSpec,
    IntegratorConfig,
    OdeSystem,
    dense_eval,
    integrate,
    resample,
)
from shrinkshoot.models import ShrinkerFamily, rhs

EXP = OdeSystem(1, lambda s, y: [y[0]])
OSC = OdeSystem(2, lambda s, y: [y[1], -y[0]])


def _cfg(**kw):
    base = dict(rel_tol=1e-10, abs_tol=1e-12, max_arc_length=1.0)
    base.update(kw)
    return IntegratorConfig(**base)


def test_exponential_growth():
    res = integrate(EXP, [1.0], _cfg())
    assert res.termination == "arc_length_exhausted"
    assert float(res.final_state[0]) == pytest.approx(math.e, rel=1e-10)


def test_cosine_root_event():
    ev = EventSpec("zero", lambda s, y: y[0], "falling", terminal=True)
    res = integrate(OSC, [1.0, 0.0], _cfg(max_arc_length=3.0), [ev])
    assert res.termination == "event:zero"
    assert res.final_s == pytest.approx(math.pi / 2.0, abs=1e-9)


def test_non_terminal_events_recorded_in_order():
    ev = EventSpec("zero", lambda s, y: y[0], "any")
    res = integrate(OSC, [1.0, 0.0], _cfg(max_arc_length=10.0), [ev])
    assert res.termination == "arc_length_exhausted"
    crossings = [e.s for e in res.events]
    assert crossings == sorted(crossings)
    expected = [math.pi / 2.0, 3.0 * math.pi / 2.0, 5.0 * math.pi / 2.0]
    assert crossings == pytest.approx(expected, abs=1e-8)


def test_dense_eval_at_nodes_matches_stored_states():
    res = integrate(OSC, [1.0, 0.0], _cfg(max_arc_length=3.0))
    for i, s in enumerate(res.s_nodes):
        assert dense_eval(res, float(s)) == pytest.approx(res.states[:, i], abs=1e-12)


def test_dense_eval_interior():
    res = integrate(EXP, [1.0], _cfg())
    assert float(dense_eval(res, 0.5)[0]) == pytest.approx(math.exp(0.5), abs=1e-9)


def test_dense_eval_at_event_satisfies_guard():
    ev = EventSpec("zero", lambda s, y: y[0], "falling", terminal=True)
    res = integrate(OSC, [1.0, 0.0], _cfg(max_arc_length=3.0), [ev])
    state = dense_eval(res, res.final_s)
    assert abs(float(state[0])) <= 1e-10


def test_dense_eval_range_error():
    res = integrate(EXP, [1.0], _cfg())
    with pytest.raises(ValueError):
        dense_eval(res, 1.5)
    with pytest.raises(ValueError):
        dense_eval(res, -0.5)


def _forced_step_error(h):
    # Huge tolerances plus first_step == max_step == h force every step to h.
    cfg = IntegratorConfig(rel_tol=1.0, abs_tol=1e6, max_arc_length=1.0,
                           initial_step=h, max_step=h)
    res = integrate(EXP, [1.0], cfg)
    assert np.allclose(np.diff(res.s_nodes), h)
    return abs(float(res.final_state[0]) - math.e)


def test_order_sanity_ratio():
    ratio = _forced_step_error(0.25) / _forced_step_error(0.125)
    assert ratio >= 2.0**7


def test_event_error_decreases_with_tolerance():
    ev = EventSpec("zero", lambda s, y: y[0], "falling", terminal=True)
    errors = []
    for rtol in (1e-6, 5e-7, 2.5e-7):
        res = integrate(OSC, [1.0, 0.0], _cfg(rel_tol=rtol, max_arc_length=3.0), [ev])
        errors.append(abs(res.final_s - math.pi / 2.0))
    for worse, better in zip(errors, errors[1:]):
        assert better <= worse + 2.0 * 1e-12


def test_arc_length_parametrization_of_profile_system():
    fam = ShrinkerFamily.rotational(3)
    system = OdeSystem(4, lambda s, y: rhs(fam, s, y))
    res = integrate(system, [0.0, 1.0, 0.0, 0.0], _cfg(max_arc_length=3.0))
    s, states = resample(res, 400)
    dpos = np.hypot(np.diff(states[0]), np.diff(states[1]))
    assert np.all(dpos <= (1.0 + 1e-8) * np.diff(s))


def test_step_failure_on_singular_rhs():
    # y' = -1/(2y) drives y to 0 at s = 1 with unbounded slope.
    def f(s, y):
        if y[0] <= 0:
            raise ValueError("left the domain")
        return [-0.5 / y[0]]

    res = integrate(OdeSystem(1, f), [1.0], _cfg(max_arc_length=2.0))
    assert res.termination == "step_failure"
    assert res.final_s < 2.0
    assert np.all(np.isfinite(res.final_state))


def test_step_failure_on_nan_rhs():
    res = integrate(OdeSystem(1, lambda s, y: [math.nan]), [1.0], _cfg())
    assert res.termination == "step_failure"


def test_initial_state_validation():
    with pytest.raises(ValueError):
        integrate(EXP, [1.0, 2.0], _cfg())
    with pytest.raises(ValueError):
        integrate(EXP, [math.nan], _cfg())
    with pytest.raises(ValueError):
        integrate(EXP, [1.0], _cfg(rel_tol=-1.0))


def test_final_s_respects_arc_budget():
    res = integrate(EXP, [1.0], _cfg(max_arc_length=0.7))
    assert res.final_s <= 0.7 + 1e-12
