"""Command-line front end.

Exit codes: 0 success (and a true verdict where one applies), 1 assumption
failure, module error or false verdict, 2 unreadable or invalid input.
Reports are canonical JSON (see :mod:`gaugekit.io`) written to ``--out``
or stdout.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import io
from .certify import CERT_TOL, check_optimality
from .errors import GaugekitError, SchemaError
from .gauges import GaugeSpec
from .model import primal_objective
from .perspective import build_perspective_dual, build_perspective_problem
from .recover import DualKKTPoint, recover_primal

EXIT_OK, EXIT_FAIL, EXIT_SCHEMA = 0, 1, 2


def _seed(args) -> int:
    env = os.environ.get("GAUGEKIT_SEED")
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise SchemaError(f"GAUGEKIT_SEED must be an integer, got {env!r}") from None
    return int(args.seed)


def _emit(doc, out) -> None:
    if out:
        io.write(out, doc)
    else:
        sys.stdout.write(io.dumps(doc))


def _finite(v):
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


# ------------------------------------------------------------ commands

def cmd_validate(args) -> int:
    prob = io.load_problem(args.problem)
    failures = []
    d_neg = [f"d[{i + 1}] = {prob.d[i]:g}" for i in np.flatnonzero(prob.d < 0)]
    k_neg = [f"K[{r + 1},{c + 1}] = {prob.K[r, c]:g}" for r, c in zip(*np.nonzero(prob.K < 0))]
    a3 = "satisfied" if not (d_neg or k_neg) else f"violated ({', '.join(d_neg + k_neg)})"
    if d_neg or k_neg:
        failures.append("assumption3")

    blocks = []
    for i, spec in enumerate(prob.specs):
        entry = {"block": i + 1, "family": spec.to_dict()["family"]}
        if isinstance(spec, GaugeSpec):
            # every catalogue gauge is closed, hence lower semicontinuous
            entry["assumption4"] = "satisfied"
            ok5 = bool(spec.satisfies_assumption5)
            entry["assumption5"] = "satisfied" if ok5 else "violated (unit ball unbounded)"
            if not ok5:
                failures.append(f"assumption5[block {i + 1}]")
        else:
            entry["assumption4"] = "not applicable (convex block)"
            entry["assumption5"] = "not applicable (convex block)"
        blocks.append(entry)

    slater = {"status": "skipped"}
    if not np.any(prob.B):
        from .solve.oracle import slater_probe
        try:
            x, s, ok = slater_probe(prob, box=args.box)
            slater = {"status": "verified" if ok else "not found",
                      "min_slack": _finite(float(s))}
            if x is not None:
                slater["point"] = x
        except GaugekitError as exc:
            slater = {"status": "skipped", "reason": str(exc)}
    report = {
        "command": "validate", "input": io.file_hash(args.problem),
        "kind": prob.kind, "n": prob.n, "dims": {"k": prob.k, "l": prob.l, "m": prob.m},
        "assumption3": a3, "blocks": blocks, "slater": slater,
        "failures": failures, "valid": not failures,
    }
    _emit(report, args.out)
    for line in ["assumption3: " + a3] + [f"block {b['block']}: assumption5: {b['assumption5']}" for b in blocks]:
        print(line, file=sys.stderr)
    return EXIT_FAIL if failures else EXIT_OK


def cmd_dualize(args) -> int:
    doc = io.read(args.problem)
    src = io.file_hash(args.problem)
    if doc.get("kind") == "dual":
        prob = io.dual_from_dict(doc)
        out = io.epigraph_to_dict(prob, {"dual_of": src, "double_dual": True})
    else:
        prob = io.problem_from_dict(doc)
        out = io.dual_to_dict(prob, {"dual_of": src})
    _emit(out, args.out)
    return EXIT_OK


def _load_pair(args, prob):
    pt = io.load_point(args.point, prob)
    if args.dual:
        pt.update({k: v for k, v in io.load_point(args.dual, prob).items() if k != "x"})
    if "x" not in pt or "dual" not in pt:
        raise SchemaError("certify needs x and u, v (one file or --dual)")
    return pt


def cmd_certify(args) -> int:
    prob = io.load_problem(args.problem)
    pt = _load_pair(args, prob)
    rep = check_optimality(prob, pt["x"], pt["dual"], args.tol)
    report = {"command": "certify", "input": io.file_hash(args.problem), **rep.to_dict()}
    _emit(_clean(report), args.out)
    return EXIT_OK if rep.verdict else EXIT_FAIL


def cmd_recover(args) -> int:
    prob = io.load_problem(args.problem)
    pt = io.load_point(args.kkt, prob)
    if "lambda" not in pt:
        raise SchemaError("recover needs u, v, lambda and mu")
    kkt = DualKKTPoint(pt["dual"].u, pt["dual"].v, pt["lambda"], pt["mu"], pt.get("x_bar_blocks"))
    rec = recover_primal(prob, kkt, args.tol)
    report = {"command": "recover", "input": io.file_hash(args.problem), "x": rec.x_star.x,
              "gauge_values": rec.x_star.gvals, "objective": primal_objective(prob, rec.x_star),
              "kkt_residual": rec.residual.to_dict(), "certificate": rec.report.to_dict(),
              "verdict": rec.report.verdict}
    _emit(_clean(report), args.out)
    if args.point_out:
        io.write(args.point_out, io.point_to_dict(x=rec.x_star.x, dp=kkt.dual))
    return EXIT_OK if rec.report.verdict else EXIT_FAIL


def cmd_solve(args) -> int:
    from .solve import extract_kkt, oracle_solve_primal, solve_dual_subgradient
    prob = io.load_problem(args.problem)
    seed = _seed(args)
    report = {"command": "solve", "input": io.file_hash(args.problem), "method": args.method}
    if args.method == "oracle":
        res = oracle_solve_primal(prob, box=args.box, grid_points_per_dim=args.grid)
        report.update(status=res.status, objective=_finite(res.objective), iterations=res.iterations,
                      accuracy=res.info.get("accuracy"))
        if res.status != "Infeasible":
            report["x"] = res.point
            if args.point_out:
                io.write(args.point_out, io.point_to_dict(x=res.point))
    else:
        res = solve_dual_subgradient(prob, rho=args.rho, iters=args.iters, seed=seed)
        dp = res.point
        report.update(status=res.status, objective=_finite(res.objective), iterations=res.iterations,
                      seed=seed, rho=res.info["rho"], u=dp.u, v=dp.v,
                      min_slack=_finite(float(res.info["min_slack"])))
        point = io.point_to_dict(dp=dp)
        if all(s.satisfies_assumption5 for s in prob.specs if isinstance(s, GaugeSpec)) \
                and all(isinstance(s, GaugeSpec) for s in prob.specs):
            ext = extract_kkt(prob, dp)
            kp = ext.kkt
            report.update(kkt_residual=ext.residual.to_dict(), polished=ext.polished,
                          objective=float(prob.b @ kp.u - prob.p @ kp.v), u=kp.u, v=kp.v,
                          **{"lambda": kp.lam, "mu": kp.mu})
            point = io.point_to_dict(dp=kp.dual, lam=kp.lam, mu=kp.mu, x_bar_blocks=kp.x_bar_blocks)
        if args.point_out:
            io.write(args.point_out, point)
    _emit(_clean(report), args.out)
    return EXIT_FAIL if res.status in ("Infeasible", "Unbounded") else EXIT_OK


def cmd_perspective(args) -> int:
    prob = io.load_problem(args.problem)
    anchors = None
    if args.anchors:
        doc = io.read(args.anchors)
        raw = doc.get("anchors")
        if not isinstance(raw, list) or len(raw) != prob.m:
            raise SchemaError(f"anchors file needs {prob.m} anchor vectors")
        anchors = [io._list({"a": a}, "a", s) for a, s in zip(raw, prob.partition.sizes)]
    pp = build_perspective_problem(prob, anchors)
    src = io.file_hash(args.problem)
    rows = [[kind, i + 1] for kind, i in pp.row_kinds]
    prov = {"perspective_of": src, "row_order": rows, "offset": pp.offset,
            "x_index": [int(j) + 1 for j in pp.x_index],
            "zeta_index": [int(j) + 1 for j in pp.zeta_index]}
    primal_text = io.dumps(io.problem_to_dict(pp.lifted, prov))
    build_perspective_dual(pp)
    dual_doc = io.dual_to_dict(pp.lifted, {"dual_of": io.text_hash(primal_text),
                                           "perspective_of": src, "row_order": rows})
    with open(args.out_primal, "w") as fh:
        fh.write(primal_text)
    io.write(args.out_dual, dual_doc)
    report = {"command": "perspective", "input": src, "lifted_n": pp.lifted.n,
              "lifted_k": pp.lifted.k, "row_order": rows, "offset": pp.offset,
              "primal": io.text_hash(primal_text), "dual": io.text_hash(io.dumps(dual_doc))}
    _emit(report, args.out)
    return EXIT_OK


def _clean(obj):
    """Replace non-finite floats by strings so reports stay valid JSON."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (float, np.floating)):
        return _finite(float(obj))
    return obj


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gaugekit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a problem file and its assumptions")
    p.add_argument("problem")
    p.add_argument("--box", type=float, default=4.0, help="half-width of the Slater probe window")
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dualize", help="emit the dual (or, for a dual file, the epigraph form)")
    p.add_argument("problem")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dualize)

    p = sub.add_parser("certify", help="check the optimality conditions at a primal/dual pair")
    p.add_argument("problem")
    p.add_argument("point", help="point file with x (and u, v unless --dual is given)")
    p.add_argument("--dual", help="point file with u, v")
    p.add_argument("--tol", type=float, default=CERT_TOL)
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("recover", help="primal point from dual KKT multipliers")
    p.add_argument("problem")
    p.add_argument("kkt", help="point file with u, v, lambda, mu and optional x_bar_blocks")
    p.add_argument("--tol", type=float, default=CERT_TOL)
    p.add_argument("--out")
    p.add_argument("--point-out")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("solve", help="grid oracle (primal) or subgradient method (dual)")
    p.add_argument("problem")
    p.add_argument("--method", choices=("oracle", "subgradient"), default="subgradient")
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", type=float, default=4.0)
    p.add_argument("--grid", type=int, default=201)
    p.add_argument("--out")
    p.add_argument("--point-out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("perspective", help="lift a convex problem to its perspective gauge form")
    p.add_argument("problem")
    p.add_argument("--anchors", help="JSON file {anchors: [[...], ...]} for the decomposition")
    p.add_argument("--out-primal", required=True)
    p.add_argument("--out-dual", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_perspective)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except GaugekitError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
