"""Command line front end.

Subcommands emit JSON Lines on stdout (one object per result row) and
diagnostics on stderr.  Exit status: 0 on success, 1 when a requested
check fails, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, is_dataclass
from typing import Any, Optional

from . import __version__
from .logc import LogComplex, Zero
from .params import ParamSeq, load_params, make_toy, params_to_json, validate_1b


def _complex_arg(text: str) -> complex:
    """Parse 'RE,IM' (or a bare real) into a complex number."""
    try:
        parts = text.split(",")
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected RE,IM got {text!r}")


def _rect_arg(text: str) -> tuple[complex, complex]:
    """Parse 'X0,Y0,X1,Y1' into rectangle corners."""
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        vals = []
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(f"expected X0,Y0,X1,Y1 got {text!r}")
    (x0, y0, x1, y1) = vals
    if not (x0 < x1 and y0 < y1):
        raise argparse.ArgumentTypeError("rectangle corners must increase")
    return complex(x0, y0), complex(x1, y1)


def _num(x: Any) -> Any:
    """Floats that JSON cannot carry become strings."""
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def _encode(obj: Any) -> Any:
    if isinstance(obj, Zero):
        return {"zero": True}
    if isinstance(obj, LogComplex):
        return {"logmod": _num(obj.logmod), "arg": _num(obj.arg)}
    if isinstance(obj, complex):
        return {"re": _num(obj.real), "im": _num(obj.imag)}
    if is_dataclass(obj) and not isinstance(obj, type):
        return _encode(asdict(obj))
    if hasattr(obj, "_asdict"):
        return _encode(obj._asdict())
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _encode(obj.tolist())
    return _num(obj)


def _emit(obj: Any) -> None:
    print(json.dumps(_encode(obj), sort_keys=True), flush=True)


def _add_params_source(sub: argparse.ArgumentParser) -> None:
    grp = sub.add_mutually_exclusive_group(required=True)
    grp.add_argument("--profile", choices=("doubling", "steep", "paper2"),
                     help="built-in parameter profile")
    grp.add_argument("--params", metavar="FILE",
                     help="JSON file with keys r and n")


def _resolve_params(args: argparse.Namespace) -> ParamSeq:
    if args.profile is not None:
        return make_toy(args.profile)
    return load_params(args.params)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bakerlab",
        description="ring-product entire maps: evaluation, verification, "
        "dynamics, rendering")
    ap.add_argument("--version", action="version", version=__version__)
    sp = ap.add_subparsers(dest="command", required=True)

    q = sp.add_parser("params", help="show or validate a parameter sequence")
    _add_params_source(q)
    q.add_argument("--validate", action="store_true",
                   help="run the admissibility checks (exit 1 on reject)")

    q = sp.add_parser("eval", help="evaluate the product or the map")
    _add_params_source(q)
    q.add_argument("--z", type=_complex_arg, required=True, metavar="RE,IM")
    q.add_argument("--what", choices=("h", "f", "g"), default="h")
    q.add_argument("--tol", type=float, default=1e-10,
                   help="quadrature tolerance for --what g")

    q = sp.add_parser("hyp", help="randomized hyperbolic-geometry checks")
    q.add_argument("--check", required=True,
                   choices=("metric", "lemma1", "lemma2", "schwarz",
                            "monotone"))
    q.add_argument("--samples", type=int, default=1000)
    q.add_argument("--seed", type=int, required=True,
                   help="RNG seed (required so runs are reproducible)")

    q = sp.add_parser("verify", help="ring growth / asymptotic / probe checks")
    _add_params_source(q)
    q.add_argument("--check", required=True, choices=("2a", "2b", "2c"))
    q.add_argument("--k", type=int, required=True, metavar="RING")
    q.add_argument("--samples", type=int, default=4096)
    q.add_argument("--csv", metavar="FILE",
                   help="also write per-sample rows as CSV")

    q = sp.add_parser("obstruct", help="contraction-obstruction chain report")
    _add_params_source(q)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--t", type=float, required=True,
                   help="angle parameter in [0,1)")
    q.add_argument("--c", type=_complex_arg, default=complex(5.0),
                   metavar="RE,IM", help="omitted-value witness")
    q.add_argument("--K-bound", type=float, default=5.0, dest="K_bound",
                   help="contraction bound to compare the pinch against")

    q = sp.add_parser("orbit", help="iterate the map from a starting point")
    _add_params_source(q)
    q.add_argument("--z", type=_complex_arg, required=True, metavar="RE,IM")
    q.add_argument("--steps", type=int, default=64)
    q.add_argument("--escape-radius", type=float, default=None)

    q = sp.add_parser("grid", help="classify a pixel grid and write it")
    _add_params_source(q)
    q.add_argument("--rect", type=_rect_arg, required=True,
                   metavar="X0,Y0,X1,Y1")
    q.add_argument("--nx", type=int, required=True)
    q.add_argument("--ny", type=int, required=True)
    q.add_argument("--steps", type=int, default=64)
    q.add_argument("--escape-radius", type=float, default=None)
    q.add_argument("--out", required=True, metavar="FILE")
    q.add_argument("--threads", type=int, default=None)

    q = sp.add_parser("render", help="write a PPM image")
    rsp = q.add_subparsers(dest="mode", required=True)

    re_ = rsp.add_parser("escape", help="palette image from a stored grid")
    re_.add_argument("--grid", required=True, metavar="FILE")
    re_.add_argument("--out", required=True, metavar="FILE")
    re_.add_argument("--palette", choices=("ember", "gray"), default="ember")

    rp = rsp.add_parser("phase", help="phase portrait of the product")
    _add_params_source(rp)
    rp.add_argument("--rect", type=_rect_arg, required=True,
                    metavar="X0,Y0,X1,Y1")
    rp.add_argument("--nx", type=int, required=True)
    rp.add_argument("--ny", type=int, required=True)
    rp.add_argument("--out", required=True, metavar="FILE")
    rp.add_argument("--threads", type=int, default=None)

    q = sp.add_parser("selftest", help="run the acceptance suite")
    q.add_argument("--only", type=int, default=None, metavar="N",
                   help="run a single criterion (1..11)")
    return ap


def _cmd_params(args) -> int:
    p = _resolve_params(args)
    if not args.validate:
        _emit({"kind": "params", "r": list(p.r), "n": list(p.n), "K": p.K,
               "canon": params_to_json(p)})
        return 0
    rep = validate_1b(p)
    for c in rep.clauses:
        _emit({"kind": "clause", "k": c.k, "name": c.name, "ok": c.ok,
               "lhs": c.lhs, "rhs": c.rhs,
               "unrepresentable": c.unrepresentable})
    _emit({"kind": "verdict", "ok": rep.overall})
    return 0 if rep.overall else 1


def _cmd_eval(args) -> int:
    from .hfun import eval_f, eval_g, eval_h

    p = _resolve_params(args)
    z = args.z
    if args.what == "g":
        val = eval_g(z, p, args.tol)
        _emit({"kind": "eval", "what": "g", "z": z, "value": val})
        return 0
    res = eval_h(z, p) if args.what == "h" else eval_f(z, p)
    _emit({"kind": "eval", "what": args.what, "z": z, "value": res.value,
           "regime": res.regime, "trunc_bound": res.trunc_bound,
           "unbounded_tail": res.unbounded_tail})
    return 0


def _cmd_hyp(args) -> int:
    import numpy as np

    from .hyperbolic import (
        MAP_CATALOG,
        TWO_LOG3,
        DiskSpec,
        disk_distance,
        lemma1_lower_bound,
        schwarz_check,
    )

    rng = np.random.default_rng(args.seed)
    n = args.samples

    def draw(count, radius=1.0):
        rr = radius * np.sqrt(rng.uniform(0.0, 1.0, count))
        tt = rng.uniform(0.0, 2.0 * math.pi, count)
        return rr * np.exp(1j * tt)

    failures = 0
    worst = -math.inf  # most positive violation margin seen (<= 0 is clean)
    if args.check == "metric":
        # symmetry and triangle inequality on random triples
        a, b, c = draw(n), draw(n), draw(n)
        for ai, bi, ci in zip(a, b, c):
            sym = abs(disk_distance(ai, bi) - disk_distance(bi, ai))
            tri = (disk_distance(ai, ci)
                   - disk_distance(ai, bi) - disk_distance(bi, ci))
            worst = max(worst, sym, tri)
            if sym > 1e-12 or tri > 1e-12:
                failures += 1
    elif args.check == "lemma1":
        a, b = draw(n), draw(n)
        c = np.exp(2j * math.pi * rng.uniform(0.0, 1.0, n))
        for ai, bi, ci in zip(a, b, c):
            gap = (lemma1_lower_bound(ai, bi, ci).bound
                   - disk_distance(ai, bi))
            worst = max(worst, gap)
            if gap > 1e-12:
                failures += 1
    elif args.check == "lemma2":
        centre, r = 1.0 + 2.0j, 3.0
        big = DiskSpec(centre, r)
        a = centre + draw(n, r / 2.0)
        b = centre + draw(n, r / 2.0)
        for ai, bi in zip(a, b):
            gap = disk_distance(ai, bi, big) - TWO_LOG3
            worst = max(worst, gap)
            if gap > 1e-12:
                failures += 1
    elif args.check == "schwarz":
        a, b = 0.97 * draw(n), 0.97 * draw(n)
        for name in MAP_CATALOG:
            for ai, bi in zip(a, b):
                lhs, rhs, ok = schwarz_check(name, ai, bi)
                worst = max(worst, lhs - rhs)
                if not ok:
                    failures += 1
    elif args.check == "monotone":
        small = DiskSpec(0j, 1.0)
        large = DiskSpec(0j, 1.0 + 3.0 * rng.uniform(0.0, 1.0))
        a, b = draw(n, 0.999), draw(n, 0.999)
        for ai, bi in zip(a, b):
            gap = disk_distance(ai, bi, large) - disk_distance(ai, bi, small)
            worst = max(worst, gap)
            if gap > 1e-12:
                failures += 1
    _emit({"kind": "hyp", "check": args.check, "samples": n,
           "seed": args.seed, "failures": failures, "worst_gap": worst})
    return 0 if failures == 0 else 1


def _cmd_verify(args) -> int:
    import csv

    from .verify import (
        asymptotic_deviation,
        ring_field,
        verify_2a,
        verify_2b,
        verify_2c,
    )

    p = _resolve_params(args)
    if args.check == "2a":
        rep = verify_2a(p, args.k, args.samples)
        _emit({"kind": "verify", "check": "2a", **asdict(rep)})
        if args.csv:
            ang, lm, ag = ring_field(p.r[args.k - 1], args.samples, p)
            with open(args.csv, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["angle", "log_abs_h", "arg_h"])
                w.writerows(zip(ang, lm, ag))
        return 0 if rep.passed else 1
    if args.check == "2b":
        rep = verify_2b(p, args.k, args.samples)
        _emit({"kind": "verify", "check": "2b", **asdict(rep)})
        if args.csv:
            t, rel = asymptotic_deviation(p, args.k, args.samples)
            with open(args.csv, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["t", "rel_err"])
                w.writerows(zip(t, rel))
        return 0
    rows = verify_2c(p, args.k, args.samples)
    min_ratio = min(r.ratio for r in rows)
    _emit({"kind": "verify", "check": "2c", "k": args.k,
           "probes": len(rows), "min_ratio": min_ratio})
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["nu", "re_h", "logT", "ratio"])
            w.writerows(rows)
    return 0


def _cmd_obstruct(args) -> int:
    from .verify import obstruction_chain

    p = _resolve_params(args)
    rep = obstruction_chain(p, args.k, args.t, args.c, args.K_bound)
    _emit({"kind": "obstruct", **asdict(rep)})
    return 0


def _cmd_orbit(args) -> int:
    from .dynamics import iterate

    p = _resolve_params(args)
    rec = iterate(args.z, p, args.steps, args.escape_radius)
    for i, z in enumerate(rec.points):
        _emit({"kind": "orbit-point", "index": i, "z": z})
    _emit({"kind": "orbit", "status": rec.status, "step": rec.step,
           "nzt_step": rec.nzt_step, "tail": rec.tail,
           "max_steps": rec.max_steps})
    return 0


def _cmd_grid(args) -> int:
    from .dynamics import classify_grid, write_grid

    p = _resolve_params(args)
    g = classify_grid(args.rect, args.nx, args.ny, p, args.steps,
                      args.escape_radius, threads=args.threads)
    write_grid(args.out, g)
    _emit({"kind": "grid", "out": args.out, "nx": g.nx, "ny": g.ny,
           "counts": g.counts()})
    return 0


def _cmd_render(args) -> int:
    from .render import render_escape, render_phase

    if args.mode == "escape":
        from .dynamics import read_grid

        g = read_grid(args.grid)
        ppm = render_escape(g, args.palette)
    else:
        p = _resolve_params(args)
        ppm = render_phase(args.rect, args.nx, args.ny, p,
                           threads=args.threads)
    with open(args.out, "wb") as fh:
        fh.write(ppm)
    _emit({"kind": "render", "mode": args.mode, "out": args.out,
           "bytes": len(ppm)})
    return 0


def _cmd_selftest(args) -> int:
    from . import _kernels, acceptance

    if args.only is not None:
        _kernels.warmup()
        results = [acceptance.run_criterion(args.only)]
    else:
        results = acceptance.run_all()
    for r in results:
        _emit({"kind": "criterion", "index": r.index, "name": r.name,
               "passed": r.passed, "detail": r.detail,
               "seconds": round(r.seconds, 3), "limit": r.limit})
    ok = all(r.passed for r in results)
    _emit({"kind": "selftest", "passed": sum(r.passed for r in results),
           "total": len(results), "ok": ok})
    return 0 if ok else 1


_DISPATCH = {
    "params": _cmd_params,
    "eval": _cmd_eval,
    "hyp": _cmd_hyp,
    "verify": _cmd_verify,
    "obstruct": _cmd_obstruct,
    "orbit": _cmd_orbit,
    "grid": _cmd_grid,
    "render": _cmd_render,
    "selftest": _cmd_selftest,
}


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
