"""Hot numeric kernels: batch product-function evaluation and orbit classification.

Two interchangeable backends compute the same thing:

* a numba ``@njit(nogil=True)`` scalar-loop path (default when numba imports),
* a vectorized pure-numpy path.

Set ``BAKERLAB_DISABLE_NUMBA=1`` to force the numpy path; it is also selected
automatically when numba is unavailable.  Per-pixel results are independent of
how the input is batched, which is what makes row-parallel callers
deterministic across thread counts.

The scalar reference implementation of the same arithmetic lives in `hfun`
(built on `logc`); tests cross-check the two.  The kernel path requires all
degrees ``n_k < 2**53`` so that the compensated angle multiplication stays
exact; the scalar path has no such limit.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .params import ParamSeq

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAVE_NUMBA = False

NUMBA_ENABLED = HAVE_NUMBA and os.environ.get(
    "BAKERLAB_DISABLE_NUMBA", ""
).strip().lower() not in {"1", "true", "yes"}

_TWO_PI_HI = 6.283185307179586
_TWO_PI_LO = 2.4492935982947064e-16
_SPLITTER = 134217729.0  # 2**27 + 1, Veltkamp split
_EPS = 2.220446049250313e-16

# |h| < ln 2 marks the near-zero-translation regime (e^h has modulus in [1/2, 2])
LOG_LN2 = math.log(math.log(2.0))
# beyond this log-modulus a value no longer fits a cartesian double comfortably
CARTESIAN_CUTOFF = 700.0


def factor_snap_eps(n: int) -> float:
    """Tolerance for snapping a factor value to its exact zero.

    Rounding in ``(z/r)^n`` scales with n; anything this close to -1 is
    below the resolution of the cartesian input z.
    """
    return max(1e-13, 64.0 * _EPS * n)


def prepared(p: ParamSeq) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-profile constant arrays (radii, degrees, log radii, snap tolerances)."""
    if any(n >= (1 << 53) for n in p.n):
        raise ValueError("kernel path requires all degrees n_k < 2**53")
    r = np.array(p.r, dtype=np.float64)
    nf = np.array(p.n, dtype=np.float64)
    logr = np.log(r)
    eps = np.array([factor_snap_eps(n) for n in p.n], dtype=np.float64)
    return r, nf, logr, eps


# ---------------------------------------------------------------------------
# scalar implementations (compiled with numba when enabled)
# ---------------------------------------------------------------------------

if NUMBA_ENABLED:
    def _jit(**kw):
        return numba.njit(**kw)
else:
    def _jit(**kw):  # decoration becomes a no-op
        def deco(f):
            return f
        return deco


@_jit(cache=True)
def _reduce_dd(hi: float, lo: float) -> float:
    # reduce hi+lo mod 2*pi into (-pi, pi]; valid while |hi| < 2**53 * 2*pi
    q = round(hi / _TWO_PI_HI)
    ph = q * _TWO_PI_HI
    ah = _SPLITTER * q
    ah = ah - (ah - q)
    al = q - ah
    bh = _SPLITTER * _TWO_PI_HI
    bh = bh - (bh - _TWO_PI_HI)
    bl = _TWO_PI_HI - bh
    pl = ((ah * bh - ph) + ah * bl + al * bh) + al * bl
    r = ((hi - ph) + lo) - pl - q * _TWO_PI_LO
    if r > math.pi:
        r -= _TWO_PI_HI
    elif r <= -math.pi:
        r += _TWO_PI_HI
    return r


@_jit(cache=True)
def _h_point(zx, zy, r, nf, logr, eps):
    # returns (is_zero, logmod, arg) of the truncated product at zx+i*zy
    if zx == 0.0 and zy == 0.0:
        return False, 0.0, 0.0
    lmz = math.log(math.hypot(zx, zy))
    agz = math.atan2(zy, zx)
    acc_lm = 0.0
    acc_ag = 0.0
    for k in range(r.shape[0]):
        n = nf[k]
        wlm = n * (lmz - logr[k])
        # compensated n*arg, then mod 2*pi
        hi = n * agz
        ah = _SPLITTER * n
        ah = ah - (ah - n)
        al = n - ah
        bh = _SPLITTER * agz
        bh = bh - (bh - agz)
        bl = agz - bh
        lo = ((ah * bh - hi) + ah * bl + al * bh) + al * bl
        wag = _reduce_dd(hi, lo)
        if abs(wlm) <= eps[k] and (math.pi - abs(wag)) <= eps[k]:
            return True, -math.inf, 0.0
        if wlm <= -50.0:
            t = math.exp(wlm)
            flm = 0.5 * math.log1p(t * (2.0 * math.cos(wag) + t))
            fag = math.atan2(t * math.sin(wag), 1.0 + t * math.cos(wag))
        elif wlm >= 50.0:
            u = math.exp(-wlm)
            flm = wlm + 0.5 * math.log1p(u * (2.0 * math.cos(wag) + u))
            fag = wag + math.atan2(-u * math.sin(wag), 1.0 + u * math.cos(wag))
            if fag > math.pi:
                fag -= _TWO_PI_HI
            elif fag <= -math.pi:
                fag += _TWO_PI_HI
        else:
            m = math.exp(wlm)
            x = 1.0 + m * math.cos(wag)
            y = m * math.sin(wag)
            if x == 0.0 and y == 0.0:
                return True, -math.inf, 0.0
            flm = math.log(math.hypot(x, y))
            fag = math.atan2(y, x)
        acc_lm += flm
        acc_ag += fag
        if acc_ag > math.pi:
            acc_ag -= _TWO_PI_HI
        elif acc_ag <= -math.pi:
            acc_ag += _TWO_PI_HI
    return False, acc_lm, acc_ag


@_jit(cache=True, nogil=True)
def _h_field_loop(zx, zy, r, nf, logr, eps, code, lm, ag):
    for i in range(zx.shape[0]):
        is0, l, a = _h_point(zx[i], zy[i], r, nf, logr, eps)
        if is0:
            code[i] = 1
            lm[i] = -math.inf
            ag[i] = 0.0
        else:
            code[i] = 0
            lm[i] = l
            ag[i] = a


@_jit(cache=True, nogil=True)
def _classify_loop(zx, zy, r, nf, logr, eps, max_steps, escape_radius,
                   status, step):
    esc2 = escape_radius * escape_radius
    for i in range(zx.shape[0]):
        x = zx[i]
        y = zy[i]
        nzt = False
        nzt_step = 0
        st = 0
        sp = 0
        for s in range(max_steps):
            is0, hlm, hag = _h_point(x, y, r, nf, logr, eps)
            if hlm < LOG_LN2 and not nzt:
                nzt = True
                nzt_step = s
            if is0:
                x = x + 1.0
            else:
                if hlm <= CARTESIAN_CUTOFF:
                    mod = math.exp(hlm)
                    re_h = mod * math.cos(hag)
                    im_h = mod * math.sin(hag)
                else:
                    # phase of e^h unresolvable; only the sign of Re h matters
                    re_h = math.inf if math.cos(hag) >= 0.0 else -math.inf
                    im_h = 0.0
                if re_h > CARTESIAN_CUTOFF:
                    st = 3 if nzt else 1
                    sp = s + 1
                    break
                emod = math.exp(re_h)  # may underflow to exactly 0
                ia = _reduce_dd(im_h, 0.0)
                x = x + emod * math.cos(ia)
                y = y + emod * math.sin(ia)
            if x * x + y * y > esc2:
                st = 3 if nzt else 1
                sp = s + 1
                break
        else:
            if nzt:
                st = 2
                sp = nzt_step
        status[i] = st
        step[i] = sp


# ---------------------------------------------------------------------------
# vectorized numpy implementations
# ---------------------------------------------------------------------------


def _reduce_np(x, lo=0.0):
    q = np.rint(x / _TWO_PI_HI)
    ah = _SPLITTER * q
    ah = ah - (ah - q)
    al = q - ah
    bh = _SPLITTER * _TWO_PI_HI
    bh = bh - (bh - _TWO_PI_HI)
    bl = _TWO_PI_HI - bh
    ph = q * _TWO_PI_HI
    pl = ((ah * bh - ph) + ah * bl + al * bh) + al * bl
    r = ((x - ph) + lo) - pl - q * _TWO_PI_LO
    r = np.where(r > math.pi, r - _TWO_PI_HI, r)
    r = np.where(r <= -math.pi, r + _TWO_PI_HI, r)
    return r


def _h_field_numpy(zx, zy, r, nf, logr, eps):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lmz = np.log(np.hypot(zx, zy))  # -inf at the origin, handled below
        agz = np.arctan2(zy, zx)
        acc_lm = np.zeros_like(zx)
        acc_ag = np.zeros_like(zx)
        zero = np.zeros(zx.shape, dtype=bool)
        for k in range(len(r)):
            n = nf[k]
            wlm = n * (lmz - logr[k])
            hi = n * agz
            ah = _SPLITTER * n
            ah = ah - (ah - n)
            al = n - ah
            bh = _SPLITTER * agz
            bh = bh - (bh - agz)
            bl = agz - bh
            lo = ((ah * bh - hi) + ah * bl + al * bh) + al * bl
            wag = _reduce_np(hi, lo)
            zero |= (np.abs(wlm) <= eps[k]) & ((math.pi - np.abs(wag)) <= eps[k])

            small = wlm <= -50.0
            big = wlm >= 50.0
            mid = ~(small | big)
            t = np.exp(np.where(small, wlm, -np.inf))
            flm = 0.5 * np.log1p(t * (2.0 * np.cos(wag) + t))
            fag = np.arctan2(t * np.sin(wag), 1.0 + t * np.cos(wag))
            u = np.exp(np.where(big, -wlm, 0.0))
            blm = wlm + 0.5 * np.log1p(u * (2.0 * np.cos(wag) + u))
            bag = wag + np.arctan2(-u * np.sin(wag), 1.0 + u * np.cos(wag))
            bag = np.where(bag > math.pi, bag - _TWO_PI_HI, bag)
            bag = np.where(bag <= -math.pi, bag + _TWO_PI_HI, bag)
            m = np.exp(np.where(mid, wlm, 0.0))
            x = 1.0 + m * np.cos(wag)
            y = m * np.sin(wag)
            zero |= mid & (x == 0.0) & (y == 0.0)
            with np.errstate(divide="ignore"):
                mlm = np.log(np.hypot(x, y))
            mag = np.arctan2(y, x)
            flm = np.where(big, blm, np.where(mid, mlm, flm))
            fag = np.where(big, bag, np.where(mid, mag, fag))

            acc_lm = acc_lm + flm
            acc_ag = acc_ag + fag
            acc_ag = np.where(acc_ag > math.pi, acc_ag - _TWO_PI_HI, acc_ag)
            acc_ag = np.where(acc_ag <= -math.pi, acc_ag + _TWO_PI_HI, acc_ag)

    origin = (zx == 0.0) & (zy == 0.0)
    acc_lm = np.where(origin, 0.0, acc_lm)
    acc_ag = np.where(origin, 0.0, acc_ag)
    code = zero.astype(np.uint8)
    acc_lm = np.where(zero, -np.inf, acc_lm)
    acc_ag = np.where(zero, 0.0, acc_ag)
    return code, acc_lm, acc_ag


def _classify_numpy(zx, zy, r, nf, logr, eps, max_steps, escape_radius):
    npts = zx.shape[0]
    x = zx.astype(np.float64).copy()
    y = zy.astype(np.float64).copy()
    status = np.zeros(npts, dtype=np.uint8)
    step = np.zeros(npts, dtype=np.uint32)
    nzt = np.zeros(npts, dtype=bool)
    nzt_step = np.zeros(npts, dtype=np.uint32)
    active = np.ones(npts, dtype=bool)
    esc2 = escape_radius * escape_radius
    for s in range(max_steps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        ax = x[idx]
        ay = y[idx]
        code, hlm, hag = _h_field_numpy(ax, ay, r, nf, logr, eps)
        is0 = code == 1
        fresh = (hlm < LOG_LN2) & ~nzt[idx]
        nzt[idx[fresh]] = True
        nzt_step[idx[fresh]] = s
        with np.errstate(over="ignore", invalid="ignore"):
            big = hlm > CARTESIAN_CUTOFF
            mod = np.exp(np.where(big | is0, 0.0, hlm))
            re_h = np.where(
                big,
                np.where(np.cos(hag) >= 0.0, np.inf, -np.inf),
                mod * np.cos(hag),
            )
            im_h = np.where(big, 0.0, mod * np.sin(hag))
            re_h = np.where(is0, 0.0, re_h)
            im_h = np.where(is0, 0.0, im_h)
            esc_log = re_h > CARTESIAN_CUTOFF
            emod = np.exp(np.where(esc_log, 0.0, re_h))
            ia = _reduce_np(np.where(esc_log, 0.0, im_h))
            nx = np.where(is0, ax + 1.0, ax + emod * np.cos(ia))
            ny = np.where(is0, ay, ay + emod * np.sin(ia))
            out = esc_log | (nx * nx + ny * ny > esc2)
        esc_idx = idx[out]
        status[esc_idx] = np.where(nzt[esc_idx], 3, 1).astype(np.uint8)
        step[esc_idx] = s + 1
        active[esc_idx] = False
        x[idx] = nx
        y[idx] = ny
    rem = np.flatnonzero(active)
    status[rem] = np.where(nzt[rem], 2, 0).astype(np.uint8)
    step[rem] = np.where(nzt[rem], nzt_step[rem], 0)
    return status, step


# ---------------------------------------------------------------------------
# public dispatch
# ---------------------------------------------------------------------------


def active_backend() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"


def _resolve(backend: str | None) -> str:
    if backend is None:
        return active_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not NUMBA_ENABLED:
        raise RuntimeError("numba backend requested but not enabled")
    return backend


def h_field(zx, zy, p: ParamSeq, backend: str | None = None):
    """Evaluate the truncated product at each point ``zx[i] + i*zy[i]``.

    Returns ``(code, logmod, arg)``: code 1 flags exact (snapped) zeros,
    where logmod is -inf and arg 0.
    """
    zx = np.ascontiguousarray(zx, dtype=np.float64)
    zy = np.ascontiguousarray(zy, dtype=np.float64)
    r, nf, logr, eps = prepared(p)
    if _resolve(backend) == "numpy":
        return _h_field_numpy(zx, zy, r, nf, logr, eps)
    code = np.empty(zx.shape[0], dtype=np.uint8)
    lm = np.empty(zx.shape[0], dtype=np.float64)
    ag = np.empty(zx.shape[0], dtype=np.float64)
    _h_field_loop(zx, zy, r, nf, logr, eps, code, lm, ag)
    return code, lm, ag


def classify_field(zx, zy, p: ParamSeq, max_steps: int, escape_radius: float,
                   backend: str | None = None):
    """Orbit classification for each start point.

    Status codes: 0 bounded-so-far, 1 escaped, 2 near-zero-translation seen
    (still bounded), 3 escaped after a near-zero-translation phase.  ``step``
    is the first escape index for 1/3, the first flag index for 2, else 0.
    """
    zx = np.ascontiguousarray(zx, dtype=np.float64)
    zy = np.ascontiguousarray(zy, dtype=np.float64)
    r, nf, logr, eps = prepared(p)
    if _resolve(backend) == "numpy":
        return _classify_numpy(zx, zy, r, nf, logr, eps, max_steps, escape_radius)
    status = np.empty(zx.shape[0], dtype=np.uint8)
    step = np.empty(zx.shape[0], dtype=np.uint32)
    _classify_loop(zx, zy, r, nf, logr, eps, max_steps, escape_radius, status, step)
    return status, step


def warmup() -> None:
    """Trigger JIT compilation on tiny inputs (no-op for the numpy backend)."""
    from .params import make_toy

    p = make_toy("doubling")
    z = np.array([0.25])
    h_field(z, z, p)
    classify_field(z, z, p, 2, 64.0)
