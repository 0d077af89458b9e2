"""Closed-form altitude and 3D distance laws of an interferer, by mobility phase.

An interferer sits at horizontal offset Z (norm of a uniform point on the
disk of radius R, so f_Z(z) = 2z/R^2) and altitude h.  While parked at a
waypoint ("static" phase) the altitude is uniform on [0, H]; mid-leg
("moving" phase) it follows the parabolic steady-state law
f(x) = 6x/H^2 - 6x^2/H^3.  The user-to-interferer distance is
W = sqrt(h^2 + Z^2), whose cdf/pdf take a three-segment piecewise form with
breakpoints at w = H and w = R (the case ordering requires H < R).

Sampling counterparts draw by inverse transform so that empirical and
closed-form laws can be cross-validated at scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError, UnsupportedGeometryError

__all__ = [
    "PHASES",
    "AltitudeDistribution",
    "DistanceDistribution",
    "smoothstep_inverse",
]

PHASES = ("static", "moving")

# Round-off smaller than this is clamped at the [0, 1] probability boundary;
# anything larger is a genuine bug and raises instead.
_CLAMP_EPS = 1e-14


def _check_phase(phase: str):
    if phase not in PHASES:
        raise DomainError(f"phase must be one of {PHASES}, got {phase!r}")


def _clamp_unit(p: np.ndarray) -> np.ndarray:
    low = p.min() if p.size else 0.0
    high = p.max() if p.size else 0.0
    if low < -_CLAMP_EPS or high > 1.0 + _CLAMP_EPS:
        raise ConsistencyError(
            f"probability outside [0,1] by more than round-off: range [{low}, {high}]"
        )
    return np.clip(p, 0.0, 1.0)


def smoothstep_inverse(p, tol: float = 1e-12) -> np.ndarray:
    """Solve 3u^2 - 2u^3 = p for u in [0, 1] by bisection (vectorized).

    The left side is strictly increasing on [0, 1], so the root is unique;
    bisection is branch-free and exact to the requested tolerance.
    """
    p = np.asarray(p, dtype=float)
    if p.size and (p.min() < 0 or p.max() > 1):
        raise DomainError("smoothstep_inverse expects probabilities in [0, 1]")
    lo = np.zeros_like(p)
    hi = np.ones_like(p)
    # |hi - lo| halves per iteration; 43 iterations reach 1e-13 < tol.
    for _ in range(int(math.ceil(math.log2(1.0 / tol))) + 3):
        mid = 0.5 * (lo + hi)
        below = mid * mid * (3.0 - 2.0 * mid) < p
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class AltitudeDistribution:
    """Altitude law of an interferer conditioned on its mobility phase."""

    phase: str
    height: float

    def __post_init__(self):
        _check_phase(self.phase)
        if not self.height > 0:
            raise DomainError(f"height must be > 0, got {self.height}")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        H = self.height
        inside = (x >= 0) & (x <= H)
        if self.phase == "static":
            out = np.where(inside, 1.0 / H, 0.0)
        else:
            out = np.where(inside, 6.0 * x / H**2 - 6.0 * x**2 / H**3, 0.0)
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        u = np.clip(x / self.height, 0.0, 1.0)
        if self.phase == "static":
            out = u
        else:
            out = u * u * (3.0 - 2.0 * u)
        return out if out.ndim else float(out)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(n)
        if self.phase == "static":
            return self.height * u
        return self.height * smoothstep_inverse(u)


@dataclass(frozen=True)
class DistanceDistribution:
    """User-to-interferer 3D distance law, conditioned on mobility phase.

    Support is [0, sqrt(R^2 + H^2)]; the cdf is continuous across the
    segment breakpoints w = H and w = R.
    """

    phase: str
    radius: float
    height: float

    def __post_init__(self):
        _check_phase(self.phase)
        if not (self.radius > 0 and self.height > 0):
            raise DomainError("radius and height must be > 0")
        if not self.height < self.radius:
            raise UnsupportedGeometryError(
                f"piecewise distance law requires height < radius, got "
                f"H={self.height}, R={self.radius}"
            )

    @property
    def support_max(self) -> float:
        return math.hypot(self.radius, self.height)

    def _checked(self, w) -> tuple[np.ndarray, bool]:
        scalar = np.ndim(w) == 0
        w = np.atleast_1d(np.asarray(w, dtype=float))
        wmax = self.support_max
        if w.size and (w.min() < 0 or w.max() > wmax * (1 + 1e-12)):
            raise DomainError(
                f"distance outside support [0, {wmax}]: range [{w.min()}, {w.max()}]"
            )
        return np.minimum(w, wmax), scalar

    def cdf(self, w):
        w, scalar = self._checked(w)
        R, H = self.radius, self.height
        R2 = R * R
        out = np.empty_like(w)

        low = w < H
        mid = (w >= H) & (w < R)
        top = w >= R
        if self.phase == "static":
            out[low] = (2.0 / 3.0) * w[low] ** 3 / (R2 * H)
            out[mid] = w[mid] ** 2 / R2 - H * H / (3.0 * R2)
            shell = w[top] ** 2 - R2
            out[top] = (
                w[top] ** 2 / R2
                - H * H / (3.0 * R2)
                - (2.0 / 3.0) * shell**1.5 / (R2 * H)
            )
        else:
            out[low] = (
                -(4.0 / 5.0) * w[low] ** 5 / (R2 * H**3)
                + (3.0 / 2.0) * w[low] ** 4 / (R2 * H * H)
            )
            out[mid] = w[mid] ** 2 / R2 - 0.3 * H * H / R2
            shell = w[top] ** 2 - R2
            out[top] = (
                w[top] ** 2 / R2
                - 0.3 * H * H / R2
                - 1.5 * shell**2 / (R2 * H * H)
                + 0.8 * shell**2.5 / (R2 * H**3)
            )
        out = _clamp_unit(out)
        return float(out[0]) if scalar else out

    def pdf(self, w):
        w, scalar = self._checked(w)
        R, H = self.radius, self.height
        R2 = R * R
        out = np.empty_like(w)

        low = w < H
        mid = (w >= H) & (w < R)
        top = w >= R
        if self.phase == "static":
            out[low] = 2.0 * w[low] ** 2 / (R2 * H)
            out[mid] = 2.0 * w[mid] / R2
            shell = np.sqrt(np.maximum(w[top] ** 2 - R2, 0.0))
            out[top] = 2.0 * w[top] / R2 - 2.0 * w[top] * shell / (R2 * H)
        else:
            out[low] = -4.0 * w[low] ** 4 / (R2 * H**3) + 6.0 * w[low] ** 3 / (R2 * H * H)
            out[mid] = 2.0 * w[mid] / R2
            shell = np.maximum(w[top] ** 2 - R2, 0.0)
            out[top] = (
                2.0 * w[top] / R2
                - 6.0 * w[top] * shell / (R2 * H * H)
                + 4.0 * w[top] * shell**1.5 / (R2 * H**3)
            )
        out = np.maximum(out, 0.0)
        return float(out[0]) if scalar else out

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw distances as sqrt(h^2 + z^2) with z = R sqrt(U) on the disk."""
        z = self.radius * np.sqrt(rng.random(n))
        h = AltitudeDistribution(self.phase, self.height).sample(n, rng)
        return np.hypot(h, z)
