"""Numeric verification of the growth estimates on the product rings and the
replay of the obstruction inequality chain at a chosen ring index.

Sampling routines batch through the `_kernels` backends; reports carry raw
numbers and per-inequality flags rather than asserting, since several
estimates are asymptotic in k and a desk-scale profile may sit outside the
regime where they kick in.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .hfun import eval_f, probe_point
from .hyperbolic import TWO_LOG3, DiskSpec, disk_distance
from .logc import LogComplex
from .params import ParamSeq, derive

E = math.e
TWO_PI = 2.0 * math.pi

_SPLITTER = 134217729.0


@dataclass(frozen=True)
class GrowthReport:
    k: int
    samples: int
    max_log_abs_h: float
    bound_log: float  # ln 4 + m_k ln r_k
    margin: float
    passed: bool


@dataclass(frozen=True)
class AsymptoticReport:
    k: int
    samples: int
    max_rel_err: float


class ProbeRatio(NamedTuple):
    nu: int
    re_h: float
    logT: float
    ratio: float


@dataclass(frozen=True)
class ObstructionReport:
    k: int
    t_k: float
    nu: int
    delta: float
    z_k: complex
    a_k: complex
    b_k: complex
    dist_a: float
    dist_b: float
    radius_10: float
    in_disk_a: bool
    in_disk_b: bool
    rho_ab: float
    rho_upper: float  # the Lemma-2 style cap 2 log 3
    log_f_a: float
    log_f_b: float
    bound_3c_ok: bool
    rho_lower_3d: Optional[float]
    pinch_lower: float  # 1/2 log(r_k - 1)
    K_bound: float
    link_flags: dict = field(default_factory=dict)


def _require_ring_index(p: ParamSeq, k: int) -> None:
    if not 2 <= k <= p.K:
        raise ValueError(f"k must be in [2, {p.K}] (ring index with m_k defined)")


def _require_doubling_radii(p: ParamSeq) -> None:
    # the growth estimate needs r_1 >= 2 and doubling radii, not full validity
    if p.r[0] < 2.0 or any(p.r[j] < 2.0 * p.r[j - 1] for j in range(1, p.K)):
        raise ValueError("growth check requires r_1 >= 2 and r_k >= 2 r_(k-1)")


def ring_field(radius: float, samples: int, p: ParamSeq):
    """(angles, logmod, arg) of the product on |z| = radius at equispaced
    angles."""
    t = TWO_PI * np.arange(samples) / samples
    zx = radius * np.cos(t)
    zy = radius * np.sin(t)
    code, lm, ag = _kernels.h_field(zx, zy, p)
    return t, lm, ag


def verify_2a(p: ParamSeq, k: int, samples: int = 4096) -> GrowthReport:
    """Max of log|h| on the ring |z| = r_k against ln 4 + m_k ln r_k."""
    _require_ring_index(p, k)
    _require_doubling_radii(p)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    d = derive(p)
    r_k = p.r[k - 1]
    _, lm, _ = ring_field(r_k, samples, p)
    max_lm = float(np.max(lm))  # zeros on the ring give -inf; max ignores them
    bound = math.log(4.0) + d.m[k - 1] * math.log(r_k)
    return GrowthReport(k=k, samples=samples, max_log_abs_h=max_lm,
                        bound_log=bound, margin=bound - max_lm,
                        passed=max_lm <= bound)


def asymptotic_deviation(p: ParamSeq, k: int, samples: int):
    """Per-angle relative deviation of h on |z| = s_k from the dominant-ring
    model T_k e^{i m_k t}(1 + e * e^{i n_k t}), scaled by the model's minimum
    modulus T_k (e-1).  Returns (angles, deviations)."""
    _require_ring_index(p, k)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    d = derive(p)
    s_k = d.s[k - 1]
    m_k = d.m[k - 1]
    n_k = p.n[k - 1]
    logT = d.logT[k - 1]
    t, lm, ag = ring_field(s_k, samples, p)
    scaled = np.exp(lm - logT + 1j * ag)  # h / T_k
    model = np.exp(1j * m_k * t) * (1.0 + E * np.exp(1j * n_k * t))
    rel = np.abs(scaled - model) / (E - 1.0)
    return t, rel


def verify_2b(p: ParamSeq, k: int, samples: int = 8192) -> AsymptoticReport:
    """Max relative deviation of h on |z| = s_k from its dominant-ring model.

    Report-only: smallness is an asymptotic claim and small k need not
    comply; it should shrink as the degree ratio n_k/m_k grows.
    """
    _, rel = asymptotic_deviation(p, k, samples)
    return AsymptoticReport(k=k, samples=samples, max_rel_err=float(np.max(rel)))


def verify_2c(p: ParamSeq, k: int, max_probes: int = 4096) -> list[ProbeRatio]:
    """Re h at the probe points b_(k,nu) against T_k, per sampled nu.

    Ratios >= 1 realize the probe estimate; advisory for small k.  When n_k
    exceeds max_probes the nu range is subsampled evenly (always including 0).
    """
    _require_ring_index(p, k)
    d = derive(p)
    n_k = p.n[k - 1]
    logT = d.logT[k - 1]
    if n_k <= max_probes:
        nus = np.arange(n_k, dtype=np.int64)
    else:
        nus = np.unique(np.linspace(0, n_k - 1, max_probes).astype(np.int64))
    probes = [probe_point(k, int(nu), p) for nu in nus]
    bx = np.array([pp.b.real for pp in probes])
    by = np.array([pp.b.imag for pp in probes])
    _, lm, ag = _kernels.h_field(bx, by, p)
    with np.errstate(over="ignore"):
        re_h = np.exp(lm) * np.cos(ag)
    ratio = np.exp(lm - logT) * np.cos(ag)
    return [ProbeRatio(int(nu), float(rh), logT, float(ra))
            for nu, rh, ra in zip(nus, re_h, ratio)]


def _two_prod(a: float, b: float) -> tuple[float, float]:
    hi = a * b
    ah = _SPLITTER * a
    ah = ah - (ah - a)
    al = a - ah
    bh = _SPLITTER * b
    bh = bh - (bh - b)
    bl = b - bh
    lo = ((ah * bh - hi) + ah * bl + al * bh) + al * bl
    return hi, lo


def split_sector(n_k: int, t_k: float) -> tuple[int, float]:
    """nu and delta with n_k t_k = nu + delta, delta in [0,1), computed with a
    compensated product so large n_k does not wash out delta."""
    hi, lo = _two_prod(float(n_k), t_k)
    fl = math.floor(hi)
    frac = (hi - fl) + lo
    if frac >= 1.0:
        fl += 1.0
        frac -= 1.0
    elif frac < 0.0:
        fl -= 1.0
        frac += 1.0
    nu = int(fl)
    if nu >= n_k:  # t_k -> 1 edge
        nu = n_k - 1
        frac = 1.0 - 2 ** -52
    return nu, frac


def obstruction_chain(p: ParamSeq, k: int, t_k: float, c: complex,
                      K_bound: float) -> ObstructionReport:
    """Replay of the inequality chain at ring k for target angle t_k.

    c plays a hypothetical boundary point and K_bound the orbit-distance cap;
    every inequality is evaluated numerically and reported as an independent
    flag, so the report quantifies the squeeze rather than asserting it.
    """
    _require_ring_index(p, k)
    if not 0.0 <= t_k < 1.0:
        raise ValueError("t_k must lie in [0, 1)")
    if not K_bound > 0.0:
        raise ValueError("K_bound must be positive")
    d = derive(p)
    r_k = p.r[k - 1]
    s_k = d.s[k - 1]
    n_k = p.n[k - 1]
    logT = d.logT[k - 1]

    nu, delta = split_sector(n_k, t_k)
    z_k = cmath.rect(r_k, TWO_PI * t_k)
    pp = probe_point(k, nu, p)
    a_k, b_k = pp.a, pp.b

    # chord lengths from exact angle differences (the cartesian difference
    # cancels catastrophically when n_k ~ 10^9)
    dist_a = 2.0 * r_k * abs(math.sin((1.0 - 2.0 * delta) * math.pi / (2 * n_k)))
    phi_d = TWO_PI * (pp.theta - delta) / n_k
    dist_b = math.sqrt((s_k - r_k) ** 2
                       + 4.0 * s_k * r_k * math.sin(0.5 * phi_d) ** 2)
    radius_10 = 10.0 * r_k / n_k
    in_a = dist_a <= radius_10
    in_b = dist_b <= radius_10

    rho_ab = disk_distance(a_k, b_k, DiskSpec(z_k, 2.0 * radius_10))

    log_f_a = math.log(abs(a_k + 1.0))  # f(a_k) = a_k + 1 exactly
    fres = eval_f(b_k, p)
    if isinstance(fres.value, LogComplex):
        log_f_b = fres.value.logmod
    else:
        log_f_b = math.log(abs(fres.value))

    bound_3c_ok = logT >= 2.0 * math.log(s_k) + math.log(2.0)
    mc = abs(c)
    if r_k * r_k > mc:
        rho_3d: Optional[float] = 0.5 * math.log((r_k * r_k - mc)
                                                 / (r_k + 1.0 + mc))
    else:
        rho_3d = None
    pinch = 0.5 * math.log(r_k - 1.0)

    links = {
        "in_disk_a": in_a,
        "in_disk_b": in_b,
        "rho_3b": rho_ab <= TWO_LOG3 + 1e-12,
        "f_a_bounded": abs(a_k + 1.0) <= r_k + 1.0 + 1e-9,
        "bound_3c": bound_3c_ok,
        "f_b_large": log_f_b >= 2.0 * math.log(s_k),
        "bound_3d_defined": rho_3d is not None,
        "pinch_exceeds_K": pinch > K_bound,
    }
    return ObstructionReport(
        k=k, t_k=t_k, nu=nu, delta=delta, z_k=z_k, a_k=a_k, b_k=b_k,
        dist_a=dist_a, dist_b=dist_b, radius_10=radius_10,
        in_disk_a=in_a, in_disk_b=in_b, rho_ab=rho_ab, rho_upper=TWO_LOG3,
        log_f_a=log_f_a, log_f_b=log_f_b, bound_3c_ok=bound_3c_ok,
        rho_lower_3d=rho_3d, pinch_lower=pinch, K_bound=K_bound,
        link_flags=links,
    )
