"""Profile-curve ODE systems and Gaussian entropy densities.

A profile state is the 4-vector (x, r, theta, Lambda): position in the upper
half plane, tangent angle (x' = cos theta, r' = sin theta, arc-length
parametrization), and the running Gaussian-weighted area Lambda(s). Three
families share this state:

* ``rotational(n)`` — profile of a rotational hypersurface in R^{n+1};
      theta' = x sin(theta) + ((n-1)/r - r) cos(theta)
      Lambda' = exp(lp + (n-1) ln r - (x^2+r^2)/2),  lp = (1-n/2) ln 2 - ln Gamma(n/2)
* ``doubly_rotational(m)`` — SO(m) x SO(m)-invariant hypersurface in R^{2m};
      theta' = (x - (m-1)/x) sin(theta) + ((m-1)/r - r) cos(theta)
      Lambda' = exp(lp + (m-1)(ln x + ln r) - (x^2+r^2)/2),
      lp = ln 4 + m ln pi - ((2m-1)/2) ln(2 pi) - 2 ln Gamma(m/2)
* ``cheng_wei(n)`` — same equations as rotational(n); only the shooting
  driver differs.

For dimension parameters >= 1000 the density exponent is evaluated in a
centered form around the cylinder radius sqrt(dim-1); the naive form loses
~9 significant digits at dim ~ 1e6 to cancellation between the O(dim) terms
(dim-1) ln r and r^2/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .specfun import log_gamma, stirling_log_gamma_tail

if TYPE_CHECKING:
    from .integrator import ShotResult

__all__ = [
    "SingularStateError",
    "ShrinkerFamily",
    "rhs",
    "log_entropy_density",
    "signed_curvature",
    "shrinker_residual",
    "ProfilePath",
    "CENTERED_SWITCH_DIM",
]

# Dimension at which the density exponent switches to the centered form.
CENTERED_SWITCH_DIM = 1000

_LOG_2PI = math.log(2.0 * math.pi)


class SingularStateError(ValueError):
    """Raised when a profile state leaves the family's open domain."""


@dataclass(frozen=True)
class ShrinkerFamily:
    """Immutable bundle: which equations govern a shot, plus the log-domain
    constants of its entropy density (computed once via specfun)."""

    kind: str  # "rotational" | "doubly_rotational" | "cheng_wei"
    dim: int
    log_prefactor: float
    centered: bool
    centered_const: float
    cylinder_radius: float  # sqrt(dim - 1); 0 when dim == 1

    @classmethod
    def rotational(cls, n: int) -> "ShrinkerFamily":
        return cls._singly("rotational", n)

    @classmethod
    def cheng_wei(cls, n: int) -> "ShrinkerFamily":
        return cls._singly("cheng_wei", n)

    @classmethod
    def _singly(cls, kind: str, n: int) -> "ShrinkerFamily":
        if n < 2:
            raise ValueError(f"{kind} family requires dimension n >= 2, got {n}")
        lp = (1.0 - n / 2.0) * math.log(2.0) - log_gamma(n / 2.0)
        centered = n >= CENTERED_SWITCH_DIM
        # c_n = lp + ((n-1)/2) ln(n-1) - (n-1)/2, assembled from O(1) pieces:
        # the (n/2) ln n growth of ln Gamma(n/2) cancels against the
        # ((n-1)/2) ln(n-1) term analytically, leaving the Stirling tail.
        c = 0.0
        if centered:
            z = n / 2.0
            c = (
                0.5 * math.log(2.0)
                + 0.5
                - 0.5 * _LOG_2PI
                - stirling_log_gamma_tail(z)
                + (z - 0.5) * math.log1p(-1.0 / (2.0 * z))
            )
        return cls(kind, n, lp, centered, c, math.sqrt(n - 1.0))

    @classmethod
    def doubly_rotational(cls, m: int) -> "ShrinkerFamily":
        if m < 2:
            raise ValueError(f"doubly rotational family requires m >= 2, got {m}")
        lp = (
            math.log(4.0)
            + m * math.log(math.pi)
            - (2.0 * m - 1.0) / 2.0 * _LOG_2PI
            - 2.0 * log_gamma(m / 2.0)
        )
        centered = m >= CENTERED_SWITCH_DIM
        # c2_m = lp + (m-1) ln(m-1) - (m-1), same analytic cancellation.
        c = 0.0
        if centered:
            z = m / 2.0
            c = (
                1.0
                + 0.5 * math.log(2.0 / math.pi)
                - 2.0 * stirling_log_gamma_tail(z)
                + (2.0 * z - 1.0) * math.log1p(-1.0 / (2.0 * z))
            )
        return cls("doubly_rotational", m, lp, centered, c, math.sqrt(m - 1.0))

    @property
    def is_doubly(self) -> bool:
        return self.kind == "doubly_rotational"

    @property
    def curvature_scale(self) -> float:
        """Scale of the largest tangent-angle rate met by well-posed shots;
        used for the initial-step cap 1/(10 sqrt(dim))."""
        return math.sqrt(self.dim)


def rhs(family: ShrinkerFamily, s: float, state) -> list[float]:
    """Derivative 4-vector (cos theta, sin theta, theta', entropy density).

    Raises SingularStateError off the open domain (r <= 0, and x <= 0 for the
    doubly rotational family); the integrator converts that into a failed
    trial step.
    """
    x = state[0]
    r = state[1]
    th = state[2]
    if r <= 0.0:
        raise SingularStateError(f"radius must stay positive, got r={r}")
    c = math.cos(th)
    si = math.sin(th)
    k = family.dim - 1.0
    if family.is_doubly:
        if x <= 0.0:
            raise SingularStateError(f"axial coordinate must stay positive, got x={x}")
        tp = (x - k / x) * si + (k / r - r) * c
    else:
        tp = x * si + (k / r - r) * c
    return [c, si, tp, math.exp(log_entropy_density(family, x, r))]


def log_entropy_density(family: ShrinkerFamily, x: float, r: float) -> float:
    """Log of the Gaussian-weighted area density along the profile curve.

    Direct form below the centered switch; above it, the (dim-1) ln r and
    r^2/2 terms are grouped around the cylinder radius so no O(dim)
    cancellation happens in doubles.
    """
    if r <= 0.0:
        raise SingularStateError(f"radius must stay positive, got r={r}")
    k = family.dim - 1.0
    if family.is_doubly:
        if x <= 0.0:
            raise SingularStateError(f"axial coordinate must stay positive, got x={x}")
        if not family.centered:
            return family.log_prefactor + k * (math.log(x) + math.log(r)) - 0.5 * (x * x + r * r)
        rc = family.cylinder_radius
        u = x - rc
        v = r - rc
        return (
            family.centered_const
            + k * (math.log1p(u / rc) + math.log1p(v / rc))
            - 0.5 * (u * (x + rc) + v * (r + rc))
        )
    if not family.centered:
        return family.log_prefactor + k * math.log(r) - 0.5 * (x * x + r * r)
    rc = family.cylinder_radius
    v = r - rc
    # (dim-1) ln(r/rc) - (r^2 - (dim-1))/2 - x^2/2 + c_n
    return family.centered_const + k * math.log1p(v / rc) - 0.5 * (v * (r + rc) + x * x)


def signed_curvature(family: ShrinkerFamily, state) -> float:
    """kappa(s) = theta'(s) of the profile curve (equivalently -x''/r')."""
    return rhs(family, 0.0, state)[2]


class ProfilePath:
    """A full profile curve assembled from one or more integration pieces,
    exposing a single dense map s -> (x, r, theta, Lambda) on [0, length].

    Covers the two cases the drivers produce: a single closed shot used
    as-is, and two consecutive legs glued at their shared event state.
    """

    def __init__(self, pieces, length: float, entropy: float, symmetry_factor: float = 1.0):
        self.pieces = list(pieces)
        self.length = float(length)
        self.entropy = float(entropy)
        # The stored pieces cover 1/symmetry_factor of the closed profile;
        # integral quantities over the full profile scale by this factor.
        self.symmetry_factor = float(symmetry_factor)

    @classmethod
    def direct(cls, shot: "ShotResult", symmetry_factor: float = 1.0) -> "ProfilePath":
        lam = float(shot.final_state[3])
        return cls([shot], shot.final_s - shot.start_s, symmetry_factor * lam, symmetry_factor)

    @classmethod
    def two_legs(cls, first: "ShotResult", second: "ShotResult") -> "ProfilePath":
        return cls([first, second], second.final_s, float(second.final_state[3]))

    def state(self, s: float) -> np.ndarray:
        """State on the assembled curve at arc length s in [0, length]."""
        if s < -1e-9 or s > self.length + 1e-9:
            raise ValueError(f"arc length {s} outside [0, {self.length}]")
        s = min(max(s, 0.0), self.length)
        for piece in self.pieces[:-1]:
            if s <= piece.final_s:
                return np.asarray(piece.dense_eval(s), dtype=float)
        return np.asarray(self.pieces[-1].dense_eval(s), dtype=float)

    def sample(self, samples: int) -> tuple[np.ndarray, np.ndarray]:
        """(s grid, states of shape (4, samples)) uniformly over the curve."""
        if samples < 2:
            raise ValueError("need at least 2 samples")
        grid = np.linspace(0.0, self.length, samples)
        states = np.empty((4, samples))
        for i, s in enumerate(grid):
            states[:, i] = self.state(float(s))
        return grid, states

    def segment_nodes(self) -> np.ndarray:
        """Accepted-step arc lengths of the assembled curve, seams included;
        quadrature panels follow these so they match the dense output's
        accuracy structure."""
        parts = [self.pieces[0].s_nodes]
        for piece in self.pieces[1:]:
            parts.append(piece.s_nodes[1:])
        return np.clip(np.concatenate(parts), 0.0, self.length)


def shrinker_residual(path: ProfilePath, family: ShrinkerFamily, samples: int = 1000,
                      fd_step: float = 3e-3) -> float:
    """Max-abs residual of the second-order shrinker equation along the curve,
    with x', r', x'', r'' taken from five-point central differences of the
    dense output. A convergence diagnostic, not a pass/fail gate by itself;
    the FD step and the dense-output accuracy set its floor.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    k = family.dim - 1.0
    h = fd_step
    lo, hi = 2.0 * h, path.length - 2.0 * h
    if hi <= lo:
        raise ValueError("curve too short for the finite-difference step")
    worst = 0.0
    for s in np.linspace(lo, hi, samples):
        m2 = path.state(s - 2.0 * h)
        m1 = path.state(s - h)
        s0 = path.state(s)
        p1 = path.state(s + h)
        p2 = path.state(s + 2.0 * h)
        xp = (-p2[0] + 8.0 * p1[0] - 8.0 * m1[0] + m2[0]) / (12.0 * h)
        rp = (-p2[1] + 8.0 * p1[1] - 8.0 * m1[1] + m2[1]) / (12.0 * h)
        xpp = (-p2[0] + 16.0 * p1[0] - 30.0 * s0[0] + 16.0 * m1[0] - m2[0]) / (12.0 * h * h)
        rpp = (-p2[1] + 16.0 * p1[1] - 30.0 * s0[1] + 16.0 * m1[1] - m2[1]) / (12.0 * h * h)
        x, r = s0[0], s0[1]
        if family.is_doubly:
            res = -xpp * rp + xp * rpp - (x - k / x) * rp - (k / r - r) * xp
        else:
            res = -xpp * rp + xp * rpp - k / r * xp - x * rp + r * xp
        worst = max(worst, abs(res))
    return worst
