"""Command line front end: ``compute``, ``sweep``, ``verify`` and ``simulate``.

Exit status is 0 on success, 1 when a certificate fails to close and 2 on
bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict

import numpy as np

from . import analytic, jointnoise, oracle, sdp
from .errors import UdrandError
from .quantum import BlochQubit, noisy_state

QUANTITIES = ("qubit-ud", "qubit-frio", "qubit-terr", "noisy-ud", "noisy-frio", "noisy-terr", "joint-bound")
SWEEPS = ("qubit_ud", "qubit_frio", "qubit_terr", "noisy_frio", "noisy_terr", "joint_vs_single")
VERIFY = ("qubit-ud", "qubit-frio", "noisy-frio", "noisy-ud", "qutrit")
SIMULATE = ("ud", "frio", "terr", "noisy-frio", "noisy-terr", "joint")


class UsageError(UdrandError):
    pass


def fmt(x) -> str:
    return "%.12g" % x


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n for n in missing))


def _qubit(args) -> BlochQubit:
    _need(args, "m", "p")
    return BlochQubit(args.m, args.p)


def _noise(args) -> float:
    """eps from --eps, or from --delta through the Born-preserving relation."""
    if args.eps is not None:
        return args.eps
    if args.delta is not None:
        if not 0.0 < args.delta < 1.0:
            raise UsageError(f"--delta={args.delta} outside the valid interval (0, 1)")
        return jointnoise.eps_of_delta(args.delta)
    raise UsageError("missing required option: --eps (or --delta)")


def _emit(record: dict, as_json: bool, out=None):
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(record, default=_jsonable) + "\n")
        return
    for k, v in record.items():
        if isinstance(v, dict):
            for kk, vv in v.items():
                out.write(f"{k}.{kk}={_text(vv)}\n")
        else:
            out.write(f"{k}={_text(v)}\n")


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return str(v)


def _text(v) -> str:
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


# ---------------------------------------------------------------- compute


def _compute_record(args) -> dict:
    q = args.quantity
    rec: dict = {"quantity": q}
    if q in ("qubit-ud", "qubit-frio", "qubit-terr"):
        b = _qubit(args)
        rec["inputs"] = {"m": b.m, "p": b.p}
        th = analytic.qubit_thresholds(b)
        if q == "qubit-ud":
            res = analytic.qubit_unambiguous(b)
            inst = sdp.QubitUd(b)
        elif q == "qubit-frio":
            _need(args, "q")
            rec["inputs"]["q"] = args.q
            res = analytic.qubit_frio(b, args.q)
            inst = sdp.QubitFrio(b, args.q)
        else:
            _need(args, "t")
            rec["inputs"]["t"] = args.t
            res = analytic.qubit_fixed_error(b, args.t)
            inst = sdp.QubitFrio(b, res.inconclusive)
        rec["value"] = res.value
        rec["branch"] = str(res.branch)
        rec["inconclusive"] = res.inconclusive
        rec["thresholds"] = {k: float(v) for k, v in asdict(th).items()}
        rec["certificate_gap"] = sdp.certify_instance(inst, args.tol).gap
        return rec
    if q in ("noisy-ud", "noisy-frio", "noisy-terr"):
        _need(args, "d", "eps")
        d, eps = args.d, args.eps
        rec["inputs"] = {"d": d, "eps": eps}
        if q == "noisy-ud":
            res = analytic.max_unambiguous(noisy_state(d, eps))
            inst = sdp.NoisyFrio(d, eps, 1.0 - eps)
        elif q == "noisy-frio":
            _need(args, "q")
            rec["inputs"]["q"] = args.q
            res = analytic.noisy_frio(d, eps, args.q)
            inst = sdp.NoisyFrio(d, eps, args.q)
        else:
            _need(args, "t")
            rec["inputs"]["t"] = args.t
            res = analytic.noisy_fixed_error(d, eps, args.t)
            inst = sdp.NoisyFrio(d, eps, res.inconclusive)
        rec["value"] = res.value
        rec["branch"] = str(res.branch)
        rec["inconclusive"] = res.inconclusive
        rec["thresholds"] = {"q_max": 1.0 - eps, "t_max": analytic.noisy_t_max(d, eps)}
        rec["certificate_gap"] = sdp.certify_instance(inst, args.tol).gap
        return rec
    # joint-bound
    _need(args, "d", "t")
    eps = _noise(args)
    d = args.d
    delta = jointnoise.delta_of_eps(eps) if args.delta is None else args.delta
    th = jointnoise.thresholds(d, eps)
    rec["inputs"] = {"d": d, "eps": eps, "delta": delta, "t": args.t}
    rec["value"] = jointnoise.joint_lower_bound(d, eps, args.t)
    ec = th.eps_crit
    rec["branch"] = "perfect" if eps >= ec - jointnoise.CRIT_SLACK else ("shared" if args.t >= th.t1 else "inconclusive")
    rec["single"] = jointnoise.single_noise_optimum(d, delta, args.t)
    rec["separation"] = rec["value"] - rec["single"]
    rec["thresholds"] = {k: float(v) for k, v in asdict(th).items()}
    return rec


def cmd_compute(args) -> int:
    _emit(_compute_record(args), args.json)
    return 0


# ---------------------------------------------------------------- sweep


def _sweep_point(quantity: str, args, x: float):
    """Return ``(value, branch)`` or ``(single, joint, separation)`` at one grid point."""
    name = args.param
    vals = {k: getattr(args, k) for k in ("m", "p", "q", "t", "d", "eps", "delta")}
    vals[name] = x
    if quantity.startswith("qubit"):
        if vals["m"] is None or vals["p"] is None:
            raise UsageError("qubit sweeps need --m and --p (one may be the swept parameter)")
        b = BlochQubit(vals["m"], vals["p"])
        if quantity == "qubit_ud":
            res = analytic.qubit_unambiguous(b)
        elif quantity == "qubit_frio":
            if vals["q"] is None:
                raise UsageError("qubit_frio needs --q or --param q")
            res = analytic.qubit_frio(b, vals["q"])
        else:
            if vals["t"] is None:
                raise UsageError("qubit_terr needs --t or --param t")
            res = analytic.qubit_fixed_error(b, vals["t"])
        return res.value, str(res.branch)
    if quantity in ("noisy_frio", "noisy_terr"):
        if vals["d"] is None or vals["eps"] is None:
            raise UsageError("noisy sweeps need --d and --eps")
        d = int(vals["d"])
        if quantity == "noisy_frio":
            if vals["q"] is None:
                raise UsageError("noisy_frio needs --q or --param q")
            res = analytic.noisy_frio(d, vals["eps"], vals["q"])
        else:
            if vals["t"] is None:
                raise UsageError("noisy_terr needs --t or --param t")
            res = analytic.noisy_fixed_error(d, vals["eps"], vals["t"])
        return res.value, str(res.branch)
    # joint_vs_single, swept over delta
    d = int(vals["d"]) if vals["d"] is not None else 2
    delta = vals["delta"]
    if delta is None:
        raise UsageError("joint_vs_single sweeps --param delta")
    t_max = jointnoise.single_t_max(d, delta)
    mode = args.t_mode
    if mode == "tmax":
        T = t_max
    elif mode == "zero":
        T = 0.0
    elif mode == "frac":
        T = args.t_frac * t_max
    else:
        if vals["t"] is None:
            raise UsageError("--t-mode fixed needs --t")
        T = vals["t"]
    single = jointnoise.single_noise_optimum(d, delta, T)
    joint = jointnoise.joint_lower_bound(d, jointnoise.eps_of_delta(delta), T)
    return single, joint, joint - single


def sweep_rows(quantity: str, args) -> tuple[list, list]:
    quantity = quantity.replace("-", "_")
    if quantity not in SWEEPS:
        raise UsageError(f"unknown sweep quantity {quantity!r}; choose from {', '.join(SWEEPS)}")
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    _need(args, "param", "start", "stop")
    if quantity == "joint_vs_single" and args.param != "delta":
        raise UsageError("joint_vs_single sweeps --param delta")
    # range check at both ends before any output
    _sweep_point(quantity, args, args.start)
    _sweep_point(quantity, args, args.stop)
    grid = np.linspace(args.start, args.stop, args.points)
    header = ["param", "single", "joint", "separation"] if quantity == "joint_vs_single" else ["param", "value", "branch"]
    rows = []
    for x in grid:
        out = _sweep_point(quantity, args, float(x))
        rows.append([fmt(x)] + [fmt(v) if not isinstance(v, str) else v for v in out])
    return header, rows


def cmd_sweep(args) -> int:
    header, rows = sweep_rows(args.quantity, args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if args.out:
        try:
            with open(args.out, "w", newline="") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from None
    else:
        sys.stdout.write(buf.getvalue())
    return 0


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    fam = args.family
    if fam == "qubit-ud":
        inst = sdp.QubitUd(_qubit(args))
    elif fam == "qubit-frio":
        _need(args, "q")
        inst = sdp.QubitFrio(_qubit(args), args.q)
    elif fam == "noisy-frio":
        _need(args, "d", "eps", "q")
        inst = sdp.NoisyFrio(args.d, args.eps, args.q)
    elif fam == "noisy-ud":
        _need(args, "d", "eps")
        inst = sdp.UnbiasedUd(noisy_state(args.d, args.eps))
    else:
        inst = sdp.QutritDegenerate()
    cv = sdp.certify_instance(inst, args.tol)
    rec = {
        "family": fam,
        "primal": cv.primal_value,
        "dual": cv.dual_value,
        "gap": cv.gap,
        "tol": args.tol,
        "certified": cv.certified,
    }
    _emit(rec, args.json)
    if not cv.certified:
        sys.stderr.write(f"not certified: |gap| = {abs(cv.gap):.3e} > tol = {args.tol:.3e}\n")
        return 1
    return 0


# ---------------------------------------------------------------- simulate


def cmd_simulate(args) -> int:
    if args.seed is None:
        raise UsageError("simulate requires --seed")
    kind = args.kind
    if kind == "joint":
        _need(args, "d")
        eps = _noise(args)
        T = args.t if args.t is not None else 0.0
        JD = jointnoise.build_joint_decomposition(args.d, eps, T)
        stats = oracle.simulate_joint_rounds(JD, args.rounds, args.seed)
        expected = dict(zip(("guess", "error", "inconclusive"), JD.rates()))
    else:
        if kind == "ud":
            res = analytic.qubit_unambiguous(_qubit(args))
        elif kind == "frio":
            _need(args, "q")
            res = analytic.qubit_frio(_qubit(args), args.q)
        elif kind == "terr":
            _need(args, "t")
            res = analytic.qubit_fixed_error(_qubit(args), args.t)
        elif kind == "noisy-frio":
            _need(args, "d", "eps", "q")
            res = analytic.noisy_frio(args.d, args.eps, args.q)
        else:
            _need(args, "d", "eps", "t")
            res = analytic.noisy_fixed_error(args.d, args.eps, args.t)
        stats = oracle.simulate_rounds(res.decomposition, res.measurement, rounds=args.rounds, seed=args.seed)
        expected = {"guess": res.value, "error": res.error, "inconclusive": res.inconclusive}
    rec = stats.as_dict()
    rec["expected"] = expected
    _emit(rec, args.json)
    return 0


# ---------------------------------------------------------------- parser


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--d", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--rounds", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--resolution", type=float, default=1e-3)
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="udrand", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="evaluate one closed form with thresholds and certificate gap")
    p.add_argument("quantity", choices=QUANTITIES)
    _add_common(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("sweep", help="tabulate a quantity over a parameter range as CSV")
    p.add_argument("quantity", type=lambda s: s.replace("-", "_"), choices=SWEEPS)
    p.add_argument("--param", help="swept parameter name (m, p, q, t, eps, delta)")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--t-mode", choices=("tmax", "zero", "frac", "fixed"), default="tmax")
    p.add_argument("--t-frac", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="close the duality gap for a solved instance")
    p.add_argument("family", choices=VERIFY)
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte-Carlo rounds against an optimal strategy")
    p.add_argument("kind", choices=SIMULATE)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UdrandError as exc:
        sys.stderr.write(f"udrand {args.command}: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
