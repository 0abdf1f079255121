"""Bisection shooting drivers for the closed-shrinker families.

Each driver integrates the profile ODE from a one- (or two-) parameter family
of initial states and bisects on a discriminator until the profile closes:

* ``solve_angenent``:  start (0, r0, 0); r0 in [1e-5, sqrt(n-1)]; a shot whose
  radius ever dips below r0 moves the upper bracket end down.
* ``solve_mcgrath``:   start (r0, r0, 7pi/4) on the diagonal; a shot with
  x + r ever below 2 r0 moves the upper end down. The full loop is
  integrated; closure is the return crossing of the diagonal x = r in the
  rising direction of x - r (the loop's far crossing is a falling one and
  must not terminate the shot, or the discriminator never sees its dip).
* ``solve_cheng_wei``: two-level bisection; the inner level tunes the start
  radius r0 > sqrt(n-1) until the first return to the symmetry plane x = 0
  lands back at radius r0, the outer level tunes the start angle a0 until the
  angle of the second return matches a0 modulo -pi.
* ``solve_sphere``:    no bisection; integrates the round-sphere profile from
  a regularized point next to the axis as an end-to-end validation run.

The event rules (closure detection, failure guards) are design choices of
this implementation; the shooting criteria themselves only prescribe the
discriminators above.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .integrator import EventSpec, IntegratorConfig, OdeSystem, ShotResult, integrate
from .models import ProfilePath, ShrinkerFamily, rhs

logger = logging.getLogger("shrinkshoot.shooting")

__all__ = [
    "NoSolutionError",
    "IntegrationFailure",
    "BisectionBracket",
    "SolveReport",
    "solve_angenent",
    "solve_mcgrath",
    "solve_cheng_wei",
    "solve_sphere",
]

TWO_PI = 2.0 * math.pi

# Arc length below which closure guards are masked out, so the terminal event
# cannot re-trigger on the start point itself.
_CLOSURE_MASK_S = 0.1

# Factor of the start scale at which a shot is abandoned as failed.
_ABORT_FACTOR = 0.9

# Step cap for the final reporting shot only. Bisection shots run fully
# adaptive; the reported trajectory is re-integrated with denser nodes so its
# interpolant supports tight diagnostics (equation residual, quadrature,
# curve export) without slowing the search.
_REPORT_MAX_STEP = 0.05


def _densified(cfg: IntegratorConfig) -> IntegratorConfig:
    step = _REPORT_MAX_STEP if cfg.max_step is None else min(cfg.max_step, _REPORT_MAX_STEP)
    return replace(cfg, max_step=step)


class NoSolutionError(RuntimeError):
    """The discriminator never changed sign across the bracket, or the final
    shot failed to reach its closure event."""


class IntegrationFailure(RuntimeError):
    """An individual shot ended in a step failure; propagated per contract."""


@dataclass
class BisectionBracket:
    """Closed search interval for one shooting parameter."""

    lo: float
    hi: float
    tol: float

    def __post_init__(self):
        if not (self.lo < self.hi and self.tol > 0.0):
            raise ValueError(f"invalid bracket [{self.lo}, {self.hi}] tol={self.tol}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)


@dataclass
class SolveReport:
    """Converged shooting parameters plus the assembled profile curve."""

    family: ShrinkerFamily
    shoot_params: dict[str, float]
    perimeter: float
    entropy: float
    bisection_iterations: int
    closure_residual: float
    closure_components: tuple[float, float, float]
    trajectory: ProfilePath
    inner_iterations: int = 0
    wall_time_s: float = 0.0


def _system(family: ShrinkerFamily) -> OdeSystem:
    return OdeSystem(4, lambda s, y: rhs(family, s, y))


def _default_config(family: ShrinkerFamily, l_max: float) -> IntegratorConfig:
    return IntegratorConfig(
        rel_tol=1e-10,
        abs_tol=1e-12,
        max_arc_length=l_max,
        initial_step=min(0.05, 1.0 / (10.0 * family.curvature_scale)),
        event_tol=1e-12,
    )


def _angle_distance(a: float, b: float) -> float:
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


def _shot_summary(res: ShotResult) -> str:
    x, r, th, lam = res.final_state
    return (
        f"termination={res.termination} s={res.final_s:.6f} "
        f"state=(x={x:.6g}, r={r:.6g}, theta={th:.6g}, entropy={lam:.6g}) "
        f"events={[e.id for e in res.events]}"
    )


def _check_integrable(res: ShotResult, context: str) -> ShotResult:
    if res.termination == "step_failure":
        raise IntegrationFailure(f"{context}: {res.message} [{_shot_summary(res)}]")
    return res


def _bisect(bracket: BisectionBracket, classify, context: str):
    """Deterministic midpoint bisection. ``classify(r0)`` returns
    (moves_hi_down: bool, shot). Raises NoSolutionError if only one class is
    ever observed. Returns (lo, hi, iterations, last shot)."""
    lo, hi, tol = bracket.lo, bracket.hi, bracket.tol
    seen = set()
    first_shot = None
    last = None
    iterations = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        branch, last = classify(mid)
        if first_shot is None:
            first_shot = last
        seen.add(branch)
        if branch:
            hi = mid
        else:
            lo = mid
        iterations += 1
    if len(seen) < 2:
        raise NoSolutionError(
            f"{context}: discriminator never changed sign over the bracket; "
            f"first shot: {_shot_summary(first_shot) if first_shot else 'n/a'}; "
            f"last shot: {_shot_summary(last) if last else 'n/a'}"
        )
    return lo, hi, iterations, last


def _masked_guard(fn, mask_below: float, mask_value: float):
    def guard(s, y):
        if s <= mask_below:
            return mask_value
        return fn(s, y)

    return guard


def solve_angenent(
    n: int, config: IntegratorConfig | None = None, bracket_tol: float = 1e-10
) -> SolveReport:
    """Shoot the rotational torus profile in R^{n+1}.

    Returns the converged start radius (the profile's minimum radius), the
    loop perimeter and its Gaussian entropy.
    """
    t0 = time.perf_counter()
    family = ShrinkerFamily.rotational(n)
    cfg = config or _default_config(family, 6.0)
    system = _system(family)

    def events_for(r0: float) -> list[EventSpec]:
        return [
            EventSpec(
                "closure",
                _masked_guard(lambda s, y: y[0], _CLOSURE_MASK_S, 1.0),
                "rising",
                terminal=True,
            ),
            EventSpec("x_cross", lambda s, y: y[0], "falling"),
            EventSpec("dip", lambda s, y: y[1] - r0, "falling"),
            EventSpec(
                "abort", lambda s, y, _r=r0: y[1] - _ABORT_FACTOR * _r, "falling", terminal=True
            ),
        ]

    def shoot(r0: float, config: IntegratorConfig = cfg) -> ShotResult:
        res = integrate(system, [0.0, r0, 0.0, 0.0], config, events_for(r0))
        return _check_integrable(res, f"angenent n={n} r0={r0}")

    def dips(res: ShotResult, r0: float) -> bool:
        if any(e.id == "dip" for e in res.events):
            return True
        return bool(np.min(res.states[1]) < r0)

    def classify(r0: float):
        res = shoot(r0)
        d = dips(res, r0)
        logger.debug("angenent n=%d r0=%.15g dips=%s %s", n, r0, d, res.termination)
        return d, res

    lo, hi, iterations, _ = _bisect(
        BisectionBracket(1e-5, family.cylinder_radius, bracket_tol),
        classify,
        f"angenent n={n}",
    )

    # Report from the non-dipping side: its minimum radius is the start radius
    # by construction, and it still reaches the closure event.
    r0 = lo
    final = shoot(r0, _densified(cfg))
    if final.termination != "event:closure":
        raise NoSolutionError(
            f"angenent n={n}: converged shot did not close: {_shot_summary(final)}"
        )
    x_e, r_e, th_e, lam = final.final_state
    comps = (abs(x_e), abs(r_e - r0), _angle_distance(th_e, 0.0))
    report = SolveReport(
        family=family,
        shoot_params={"r0": r0},
        perimeter=final.final_s,
        entropy=float(lam),
        bisection_iterations=iterations,
        closure_residual=max(comps),
        closure_components=comps,
        trajectory=ProfilePath.direct(final),
        wall_time_s=time.perf_counter() - t0,
    )
    logger.info(
        "angenent n=%d: r0=%.12g L=%.10f entropy=%.10f (%d iterations)",
        n, r0, report.perimeter, report.entropy, iterations,
    )
    return report


def solve_mcgrath(
    m: int, config: IntegratorConfig | None = None, bracket_tol: float = 1e-10
) -> SolveReport:
    """Shoot the doubly rotational profile in R^{2m} (hypersurface dimension
    2m-1). The loop starts on the diagonal x = r heading perpendicular to it
    and closes at its return crossing of the diagonal.
    """
    t0 = time.perf_counter()
    family = ShrinkerFamily.doubly_rotational(m)
    cfg = config or _default_config(family, 6.0)
    system = _system(family)
    theta0 = 1.75 * math.pi

    def events_for(r0: float) -> list[EventSpec]:
        return [
            EventSpec(
                "closure",
                _masked_guard(lambda s, y: y[0] - y[1], _CLOSURE_MASK_S, 1.0),
                "rising",
                terminal=True,
            ),
            EventSpec("dip", lambda s, y, _r=r0: y[0] + y[1] - 2.0 * _r, "falling"),
            EventSpec(
                "abort",
                lambda s, y, _r=r0: y[0] + y[1] - 2.0 * _ABORT_FACTOR * _r,
                "falling",
                terminal=True,
            ),
        ]

    def shoot(r0: float, config: IntegratorConfig = cfg) -> ShotResult:
        res = integrate(system, [r0, r0, theta0, 0.0], config, events_for(r0))
        return _check_integrable(res, f"mcgrath m={m} r0={r0}")

    def classify(r0: float):
        res = shoot(r0)
        d = any(e.id == "dip" for e in res.events) or bool(
            np.min(res.states[0] + res.states[1]) < 2.0 * r0
        )
        logger.debug("mcgrath m=%d r0=%.15g dips=%s %s", m, r0, d, res.termination)
        return d, res

    lo, hi, iterations, _ = _bisect(
        BisectionBracket(1e-5, family.cylinder_radius, bracket_tol),
        classify,
        f"mcgrath m={m}",
    )

    r0 = lo
    final = shoot(r0, _densified(cfg))
    if final.termination != "event:closure":
        raise NoSolutionError(
            f"mcgrath m={m}: converged shot did not close on the diagonal: "
            f"{_shot_summary(final)}"
        )
    x_e, r_e, th_e, _ = final.final_state
    comps = (abs(x_e - r0), abs(r_e - r0), _angle_distance(th_e, theta0))
    path = ProfilePath.direct(final)
    report = SolveReport(
        family=family,
        shoot_params={"r0": r0},
        perimeter=path.length,
        entropy=path.entropy,
        bisection_iterations=iterations,
        closure_residual=max(comps),
        closure_components=comps,
        trajectory=path,
        wall_time_s=time.perf_counter() - t0,
    )
    logger.info(
        "mcgrath m=%d: r0=%.12g L=%.10f entropy=%.10f (%d iterations)",
        m, r0, report.perimeter, report.entropy, iterations,
    )
    return report


def solve_cheng_wei(
    n: int,
    config: IntegratorConfig | None = None,
    outer_tol: float = 1e-12,
    inner_tol: float = 1e-10,
) -> SolveReport:
    """Two-level shooting for the immersed non-perpendicular profiles.

    Outer bisection over the start angle a0 in [-pi/3, 0]; inner bisection
    over the start radius r0 in [sqrt(n-1)+1e-8, sqrt(n-1)+min(5, n)]. A shot
    starts at (0, r0, a0), runs to its first return to x = 0 (restart state),
    then continues to the second return, whose angle closes the curve when it
    equals a0 modulo -pi.
    """
    t0 = time.perf_counter()
    family = ShrinkerFamily.cheng_wei(n)
    cfg = config or _default_config(family, 12.0)
    system = _system(family)
    rc = family.cylinder_radius
    deadband = 1e-10

    return_guard_pos = EventSpec(
        "x_return", _masked_guard(lambda s, y: y[0], _CLOSURE_MASK_S, 1.0), "any", terminal=True
    )

    def shoot_leg1(r0: float, a0: float, config: IntegratorConfig = cfg) -> ShotResult:
        res = integrate(system, [0.0, r0, a0, 0.0], config, [return_guard_pos])
        return _check_integrable(res, f"cheng-wei n={n} a0={a0} r0={r0} leg1")

    def shoot_leg2(ev, config: IntegratorConfig = cfg) -> ShotResult:
        guard2 = EventSpec(
            "x_return2",
            _masked_guard(lambda s, y: y[0], ev.s + _CLOSURE_MASK_S, -1.0),
            "any",
            terminal=True,
        )
        res = integrate(system, ev.state, config, [guard2], start_s=ev.s)
        return _check_integrable(res, f"cheng-wei n={n} leg2 from s={ev.s}")

    def leg1_return(res: ShotResult):
        for e in res.events:
            if e.id == "x_return":
                return e
        return None

    def hugs(res: ShotResult, r0: float) -> bool:
        # Whole first leg stays within 0.2 above the start radius: the shot
        # clings to the cylinder instead of looping out.
        return bool(np.max(res.states[1]) - r0 < 0.2)

    outer_iters = 0
    inner_total = 0
    a_lo, a_hi = -math.pi / 3.0, 0.0
    a0 = 0.5 * (a_lo + a_hi)
    r0 = rc  # overwritten on the first pass
    leg1 = leg2 = None

    while a_hi - a_lo > outer_tol:
        a0 = 0.5 * (a_lo + a_hi)

        r_lo = rc + 1e-8
        r_hi = rc + min(5.0, float(n))
        leg1 = None
        while r_hi - r_lo > inner_tol:
            r0 = 0.5 * (r_lo + r_hi)
            leg1 = shoot_leg1(r0, a0)
            inner_total += 1
            if hugs(leg1, r0):
                # Never swings 0.2 above its start radius: clings to the
                # cylinder or loops too tightly. This prunes the spurious
                # tight-loop roots of the return-radius map, keeping the
                # branch where the profile loops well above its start.
                r_hi = r0
                continue
            ev = leg1_return(leg1)
            if ev is None:
                # Escaped upward but never looped back within the arc budget.
                logger.debug(
                    "cheng-wei n=%d a0=%.12g r0=%.12g: no return event (%s)",
                    n, a0, r0, leg1.termination,
                )
                r_lo = r0
                continue
            xe_r = float(ev.state[1])
            if xe_r - r0 > deadband:
                r_lo = r0
            elif r0 - xe_r > deadband:
                r_hi = r0
            else:
                break  # inner deadband: first return lands on the start radius

        if leg1 is None:
            raise NoSolutionError(f"cheng-wei n={n}: empty inner bracket")
        ev = leg1_return(leg1)
        if ev is None:
            raise NoSolutionError(
                f"cheng-wei n={n} a0={a0}: inner bisection ended on a shot with no "
                f"return to x=0: {_shot_summary(leg1)}"
            )

        leg2 = shoot_leg2(ev)
        outer_iters += 1
        if leg2.termination != "event:x_return2":
            raise NoSolutionError(
                f"cheng-wei n={n} a0={a0}: second leg did not return to x=0: "
                f"{_shot_summary(leg2)}"
            )
        th_e2 = float(leg2.final_state[2])
        reduced = th_e2 % (-math.pi)
        if a0 - reduced > deadband:
            a_hi = a0
        elif reduced - a0 > deadband:
            a_lo = a0
        else:
            break  # outer deadband: arrival angle matches the start angle

    if leg2 is None:
        raise NoSolutionError(f"cheng-wei n={n}: outer bracket too narrow to iterate")

    # Re-integrate the converged pair of legs with denser nodes for reporting.
    dense_cfg = _densified(cfg)
    leg1 = shoot_leg1(r0, a0, dense_cfg)
    ev = leg1_return(leg1)
    if ev is None:
        raise NoSolutionError(
            f"cheng-wei n={n}: converged leg lost its return event on the dense "
            f"re-run: {_shot_summary(leg1)}"
        )
    leg2 = shoot_leg2(ev, dense_cfg)
    if leg2.termination != "event:x_return2":
        raise NoSolutionError(
            f"cheng-wei n={n}: dense re-run did not return to x=0: {_shot_summary(leg2)}"
        )

    x_e2, r_e2, th_e2, lam = leg2.final_state
    comps = (
        abs(float(x_e2)),
        abs(float(r_e2) - r0),
        abs(float(th_e2) % (-math.pi) - a0),
    )
    path = ProfilePath.two_legs(leg1, leg2)
    report = SolveReport(
        family=family,
        shoot_params={"r0": r0, "a0": a0},
        perimeter=leg2.final_s,
        entropy=float(lam),
        bisection_iterations=outer_iters,
        inner_iterations=inner_total,
        closure_residual=max(comps),
        closure_components=comps,
        trajectory=path,
        wall_time_s=time.perf_counter() - t0,
    )
    logger.info(
        "cheng-wei n=%d: a0=%.12g r0=%.12g L=%.10f entropy=%.10f "
        "(%d outer, %d inner iterations)",
        n, a0, r0, report.perimeter, report.entropy, outer_iters, inner_total,
    )
    return report


def solve_sphere(n: int, config: IntegratorConfig | None = None) -> SolveReport:
    """Integrate the round-sphere profile r^2 + x^2 = n from a regularized
    start next to the axis; validation run, no bisection.

    Near the axis the regular solution satisfies theta ~ pi/2 + (x0/n) r, so
    the shot starts at (x0, eps, pi/2 + (x0/n) eps) with x0 = -sqrt(n - eps^2).
    Leaving a pole is numerically stable but arriving at one is not (the shot
    family is a separatrix and the pole is a near-singular kink), so the run
    stops at the equator crossing x = 0 and doubles entropy and arc length by
    the x -> -x mirror symmetry. The truncated polar caps contribute
    O(eps^2) to the entropy, far below the integration tolerance.
    """
    t0 = time.perf_counter()
    family = ShrinkerFamily.rotational(n)
    eps = 1e-8
    if config is None:
        cfg = IntegratorConfig(
            rel_tol=1e-10,
            abs_tol=1e-12,
            max_arc_length=0.5 * math.pi * math.sqrt(n) + 1.0,
            initial_step=eps / 10.0,
            max_step=_REPORT_MAX_STEP,
            event_tol=1e-12,
        )
    else:
        cfg = config
    system = _system(family)
    x0 = -math.sqrt(n - eps * eps)
    th0 = 0.5 * math.pi + (x0 / n) * eps

    equator = EventSpec("equator", lambda s, y: y[0], "rising", terminal=True)
    res = _check_integrable(
        integrate(system, [x0, eps, th0, 0.0], cfg, [equator]), f"sphere n={n}"
    )
    if res.termination != "event:equator":
        raise NoSolutionError(f"sphere n={n}: shot did not reach the equator: "
                              f"{_shot_summary(res)}")
    x_e, r_e, th_e, _ = res.final_state
    comps = (abs(float(x_e)), abs(float(r_e) - math.sqrt(n)), _angle_distance(float(th_e), 0.0))
    path = ProfilePath.direct(res, symmetry_factor=2.0)
    report = SolveReport(
        family=family,
        shoot_params={"r0": eps, "x0": x0},
        perimeter=2.0 * res.final_s,
        entropy=path.entropy,
        bisection_iterations=0,
        closure_residual=max(comps),
        closure_components=comps,
        trajectory=path,
        wall_time_s=time.perf_counter() - t0,
    )
    logger.info("sphere n=%d: L=%.10f entropy=%.10f", n, report.perimeter, report.entropy)
    return report
