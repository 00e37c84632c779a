"""Evaluation of the truncated product h, the map f = z + e^h, its zeros and
probe points, the angle function theta, and the Newton companion g.

Scalar evaluation goes through `logc` so that powers with degrees up to ~10^9
and values like e^{h} with Re h ~ 10^16 stay representable.  The quadrature
behind g batches integrand evaluations through the `_kernels` backends.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernels
from .logc import (
    ZERO,
    LogComplex,
    MaybeZeroLC,
    Zero,
    lc_add_one,
    lc_from_cartesian,
    lc_mul,
    lc_pow_int,
    ONE,
    reduce_angle,
)
from .params import ParamSeq, derive

E = math.e
TWO_PI = 2.0 * math.pi

# a value whose log-modulus stays within this band is returned in cartesian form
CARTESIAN_BAND = 700.0


class NonConvergence(ArithmeticError):
    """Adaptive quadrature exceeded its subdivision depth limit."""


@dataclass(frozen=True)
class EvalResult:
    """Value of h or f with truncation-error and overflow classification.

    value is a cartesian complex when representable, the Zero marker at exact
    zeros, or a LogComplex once the magnitude leaves cartesian range (regime
    "escaped").  trunc_bound is a rigorous relative bound for the omitted
    product tail; it is +inf (and unbounded_tail set) when the stored radii
    cannot control the tail at this z.  perturbation records the size of an
    additive term that was dropped relative to an escaped magnitude.
    """

    value: Union[complex, Zero, LogComplex]
    trunc_bound: float
    regime: str  # "exact-ish" | "escaped"
    unbounded_tail: bool = False
    perturbation: float = 0.0

    def __post_init__(self):
        if not (self.trunc_bound >= 0.0):
            raise ValueError("trunc_bound must be >= 0")
        if self.regime not in ("exact-ish", "escaped"):
            raise ValueError(f"unknown regime {self.regime!r}")


@dataclass(frozen=True)
class ProbePoint:
    """The zero a and probe point b on ring k at sector nu, with theta and p."""

    k: int
    nu: int
    theta: float
    a: complex
    b: complex
    p: float
    logT: float


def _trunc_bound(z: complex, p: ParamSeq) -> tuple[float, bool]:
    # geometric tail estimate: valid once the last stored radius dominates 2|z|
    if p.r[-1] >= 2.0 * abs(z):
        return math.expm1(2.0 ** (1 - p.K)), False
    return math.inf, True


def eval_h(z: complex, p: ParamSeq) -> EvalResult:
    """Truncated product over the stored factors, with tail bound.

    Factors whose power lands within the snap tolerance of -1 yield the exact
    Zero; this is what makes the downstream identity f(a) = a + 1 bitwise.
    """
    z = complex(z)
    bound, unbounded = _trunc_bound(z, p)
    zl = lc_from_cartesian(z.real, z.imag)
    if isinstance(zl, Zero):
        return EvalResult(complex(1.0, 0.0), bound, "exact-ish", unbounded)
    acc: MaybeZeroLC = ONE
    for r_k, n_k in zip(p.r, p.n):
        base = lc_mul(zl, LogComplex(-math.log(r_k), 0.0))
        w = lc_pow_int(base, n_k)
        if not isinstance(w, Zero):
            eps = _kernels.factor_snap_eps(n_k)
            if abs(w.logmod) <= eps and (math.pi - abs(w.arg)) <= eps:
                return EvalResult(ZERO, bound, "exact-ish", unbounded)
        factor = lc_add_one(w)
        acc = lc_mul(acc, factor)
        if isinstance(acc, Zero):
            return EvalResult(ZERO, bound, "exact-ish", unbounded)
    if abs(acc.logmod) <= CARTESIAN_BAND:
        mod = math.exp(acc.logmod)
        value = complex(mod * math.cos(acc.arg), mod * math.sin(acc.arg))
        return EvalResult(value, bound, "exact-ish", unbounded)
    return EvalResult(acc, bound, "escaped", unbounded)


def eval_f(z: complex, p: ParamSeq,
           hres: "EvalResult | None" = None) -> EvalResult:
    """z + e^{h(z)}, escaping to log form when e^h leaves cartesian range.

    hres may pass in a precomputed eval_h(z, p) result to avoid recomputing.
    """
    z = complex(z)
    if hres is None:
        hres = eval_h(z, p)
    if isinstance(hres.value, Zero):
        # e^0 = 1: exact unit translation
        return EvalResult(z + 1.0, hres.trunc_bound, "exact-ish",
                          hres.unbounded_tail)
    if isinstance(hres.value, LogComplex):
        # |h| itself beyond cartesian range: e^h is 0 or an over-overflow
        if math.cos(hres.value.arg) >= 0.0:
            value = LogComplex(math.inf, 0.0)
            return EvalResult(value, hres.trunc_bound, "escaped",
                              hres.unbounded_tail, perturbation=abs(z))
        return EvalResult(z, hres.trunc_bound, "exact-ish", hres.unbounded_tail)
    hc = hres.value
    if hc.real > CARTESIAN_BAND:
        value = LogComplex(hc.real, reduce_angle(hc.imag))
        return EvalResult(value, hres.trunc_bound, "escaped",
                          hres.unbounded_tail, perturbation=abs(z))
    value = z + cmath.exp(hc)  # exp may underflow to 0, leaving f = z
    return EvalResult(value, hres.trunc_bound, "exact-ish", hres.unbounded_tail)


def stored_zeros(p: ParamSeq) -> list[tuple[int, int, complex]]:
    """All zeros of the stored factors: (k, nu, r_k e^{(2nu+1) pi i / n_k})."""
    out = []
    for k, (r_k, n_k) in enumerate(zip(p.r, p.n), start=1):
        for nu in range(n_k):
            a = cmath.rect(r_k, (2 * nu + 1) * math.pi / n_k)
            out.append((k, nu, a))
    return out


def _circle_arg(t: float) -> float:
    # argument of 1 + e*exp(2*pi*i*t) lifted to [0, 2*pi); continuous and
    # strictly increasing in t because the origin lies inside the circle
    a = math.atan2(E * math.sin(TWO_PI * t), 1.0 + E * math.cos(TWO_PI * t))
    return a if a >= 0.0 else a + TWO_PI


def theta(phi: float) -> float:
    """Angle theta in [0,1) making e^{2 pi i phi} (1 + e * e^{2 pi i theta})
    real and positive.

    The circle t -> 1 + e*e^{2 pi i t} winds once around 0, so its argument is
    a strictly increasing bijection onto [0, 2 pi) and bisection on it finds
    the unique solution; a target at the wrap point resolves to theta = 0.
    """
    if not math.isfinite(phi):
        raise ValueError("phi must be finite")
    frac = phi - math.floor(phi)
    if frac == 0.0:
        return 0.0
    target = TWO_PI * (1.0 - frac)
    if target >= TWO_PI:
        return 0.0
    lo, hi = 0.0, 1.0  # arg(lo) = 0 <= target < 2*pi = arg(hi-)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _circle_arg(mid) <= target:
            lo = mid
        else:
            hi = mid
    return lo


def probe_point(k: int, nu: int, p: ParamSeq) -> ProbePoint:
    """Zero a and probe b on ring k (1-indexed, k >= 2) at sector nu."""
    if not 2 <= k <= p.K:
        raise IndexError(f"k must be in [2, {p.K}]")
    n_k = p.n[k - 1]
    if not 0 <= nu < n_k:
        raise IndexError(f"nu must be in [0, {n_k})")
    d = derive(p)
    r_k = p.r[k - 1]
    s_k = d.s[k - 1]
    m_k = d.m[k - 1]
    # phi = nu*m_k/n_k mod 1, reduced in exact integer arithmetic
    phi_num = (nu * m_k) % n_k
    phi = phi_num / n_k
    th = theta(phi)
    a = cmath.rect(r_k, (2 * nu + 1) * math.pi / n_k)
    b = cmath.rect(s_k, TWO_PI * ((nu + th) / n_k))
    p_c = cmath.exp(complex(0.0, TWO_PI * phi)) * (
        1.0 + E * cmath.exp(complex(0.0, TWO_PI * th))
    )
    if abs(p_c.imag) > 1e-10 * abs(p_c):
        raise AssertionError(
            f"probe value not real: k={k} nu={nu} p={p_c!r}")
    return ProbePoint(k=k, nu=nu, theta=th, a=a, b=b, p=abs(p_c),
                      logT=d.logT[k - 1])


# ---------------------------------------------------------------------------
# Newton companion g via adaptive Gauss-Kronrod quadrature
# ---------------------------------------------------------------------------

# 15-point Kronrod extension of 7-point Gauss on [-1, 1] (positive half)
_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])
_NODES = np.concatenate((-_XGK[:-1], _XGK[::-1]))  # 15 ascending nodes
_KW = np.concatenate((_WGK[:-1], _WGK[::-1]))
_GW = np.zeros(15)
_GW[1:14:2] = np.concatenate((_WG[:-1], _WG[::-1]))

_MAX_DEPTH = 30


def _integrand_exp_neg_h(ts: np.ndarray, p: ParamSeq) -> np.ndarray:
    # e^{-h} at a batch of points; exact zeros of h give exactly 1
    code, lm, ag = _kernels.h_field(ts.real, ts.imag, p)
    if np.any((lm > CARTESIAN_BAND) & (np.cos(ag) < 0.0)):
        raise NonConvergence("integrand overflow: Re h below -exp range")
    big = lm > CARTESIAN_BAND
    mod = np.exp(np.where(big, 0.0, lm))
    h = mod * np.cos(ag) + 1j * mod * np.sin(ag)
    h = np.where(code == 1, 0.0, h)
    out = np.exp(-h)
    return np.where(big, 0.0, out)


def _gk_panel(z0: complex, dz: complex, ua: float, ub: float,
              p: ParamSeq) -> tuple[complex, float]:
    half = 0.5 * (ub - ua)
    mid = 0.5 * (ua + ub)
    us = mid + half * _NODES
    ts = z0 + us * dz
    vals = _integrand_exp_neg_h(ts, p)
    scale = half * dz
    kron = scale * np.sum(_KW * vals)
    gauss = scale * np.sum(_GW * vals)
    return complex(kron), abs(kron - gauss)


def integrate_exp_neg_h(z0: complex, z1: complex, p: ParamSeq,
                        tol: float = 1e-10) -> complex:
    """Integral of e^{-h} along the straight segment from z0 to z1."""
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    z0 = complex(z0)
    z1 = complex(z1)
    dz = z1 - z0
    if dz == 0:
        return 0j
    total = 0j

    def rec(ua, ub, tol_loc, depth):
        nonlocal total
        if depth > _MAX_DEPTH:
            raise NonConvergence(
                f"quadrature depth limit at u in [{ua}, {ub}]")
        val, err = _gk_panel(z0, dz, ua, ub, p)
        if err <= tol_loc:
            total += val
            return
        um = 0.5 * (ua + ub)
        rec(ua, um, 0.5 * tol_loc, depth + 1)
        rec(um, ub, 0.5 * tol_loc, depth + 1)

    rec(0.0, 1.0, tol, 0)
    return total


def eval_g(z: complex, p: ParamSeq, tol: float = 1e-10) -> complex:
    """exp(-integral of e^{-h} from 0 to z along the straight segment)."""
    if z == 0:
        return complex(1.0)
    return cmath.exp(-integrate_exp_neg_h(0.0, z, p, tol))


def newton_residual(z: complex, p: ParamSeq, step: float = 1e-5,
                    tol: float = 1e-10) -> float:
    """|f(z) - (z - g(z)/g'(z))| with g' by central differences.

    The three g evaluations share the base integral to z - step so the
    quadrature error cancels in the difference quotient instead of being
    amplified by 1/(2 step).
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    z = complex(z)
    base = integrate_exp_neg_h(0.0, z - step, p, tol)
    d_mid = integrate_exp_neg_h(z - step, z, p, tol * 1e-2)
    d_full = integrate_exp_neg_h(z - step, z + step, p, tol * 1e-2)
    g_minus = cmath.exp(-base)
    g_mid = cmath.exp(-(base + d_mid))
    g_plus = cmath.exp(-(base + d_full))
    dg = (g_plus - g_minus) / (2.0 * step)
    if abs(dg) < 1e-300:
        raise ZeroDivisionError("g' vanishes to working precision at z")
    newton = z - g_mid / dg
    fres = eval_f(z, p)
    if not isinstance(fres.value, complex):
        raise ValueError("f(z) not representable in cartesian form at z")
    return abs(fres.value - newton)
