"""Hyperbolic-metric toolkit on disks: density, distance, Koebe bounds, the
omitted-point lower bound, and Schwarz contraction checks.

Everything is closed-form.  General simply connected domains appear only
through disks and Mobius images; the distance uses the unit-disk normalization
with density 2/(1-|z|^2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

TWO_LOG3 = 2.0 * math.log(3.0)


class PointOutsideDomain(ValueError):
    """A point fell outside the open disk it was asserted to be in."""


@dataclass(frozen=True)
class DiskSpec:
    """Open disk of radius r around center c."""

    c: complex
    r: float

    def __post_init__(self):
        if not (self.r > 0.0 and math.isfinite(self.r)):
            raise ValueError("disk radius must be positive and finite")

    def contains(self, z: complex) -> bool:
        return abs(z - self.c) < self.r


UNIT_DISK = DiskSpec(0j, 1.0)


@dataclass(frozen=True)
class OmittedPointBound:
    """Lower bound for the hyperbolic distance of a, b in any simply connected
    domain that contains both and omits c."""

    a: complex
    b: complex
    c: complex
    bound: float


def _normalize(z: complex, d: DiskSpec) -> complex:
    w = (z - d.c) / d.r
    if abs(w) >= 1.0:
        raise PointOutsideDomain(f"{z} not inside {d}")
    return w


def disk_density(z: complex, d: DiskSpec) -> float:
    """Density of the hyperbolic metric of d at z (2/(1-|z|^2) scaled)."""
    w = _normalize(z, d)
    t2 = w.real * w.real + w.imag * w.imag
    return (2.0 / d.r) / (1.0 - t2)


def disk_distance(a: complex, b: complex, d: DiskSpec = UNIT_DISK) -> float:
    """Hyperbolic distance between a and b in the disk d."""
    u = _normalize(a, d)
    v = _normalize(b, d)
    t = abs(u - v) / abs(1.0 - u * v.conjugate())
    # log((1+t)/(1-t)) in a cancellation-free form
    return 2.0 * math.atanh(t)


def koebe_density_bounds(dist_to_boundary: float) -> tuple[float, float]:
    """Two-sided density estimate (1/(2d), 2/d) from the boundary distance."""
    if not (dist_to_boundary > 0.0):
        raise ValueError("distance to boundary must be positive")
    return 0.5 / dist_to_boundary, 2.0 / dist_to_boundary


def lemma1_lower_bound(a: complex, b: complex, c: complex) -> OmittedPointBound:
    """Omitted-point bound: half the absolute log-ratio of distances to c."""
    da = abs(a - c)
    db = abs(b - c)
    if da == 0.0 or db == 0.0:
        raise ValueError("a and b must differ from the omitted point c")
    bound = 0.5 * abs(math.log(db) - math.log(da))
    return OmittedPointBound(a=a, b=b, c=c, bound=bound)


_MOBIUS_W = 0.3 + 0.4j


def _mobius(z: complex) -> complex:
    return (z + _MOBIUS_W) / (1.0 + _MOBIUS_W.conjugate() * z)


MAP_CATALOG = {
    "square": lambda z: z * z,
    "half": lambda z: 0.5 * z,
    "rotate": lambda z: cmath.exp(0.6j) * z,
    "identity": lambda z: z,
    "mobius": _mobius,
}


def schwarz_check(map_id: str, a: complex, b: complex) -> tuple[float, float, bool]:
    """Contraction check for a built-in holomorphic self-map of the unit disk.

    Returns (distance after mapping, distance before, ok); automorphisms in
    the catalog realize equality.
    """
    try:
        f = MAP_CATALOG[map_id]
    except KeyError:
        raise ValueError(f"unknown map {map_id!r}; catalog: "
                         f"{sorted(MAP_CATALOG)}") from None
    rhs = disk_distance(a, b)
    lhs = disk_distance(f(a), f(b))
    return lhs, rhs, lhs <= rhs + 1e-12
