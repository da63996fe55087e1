"""Command-line entry point.

Exit codes: 0 when every check passes, 1 when a check fails (the failing
checks are named on stderr), 2 for usage or input errors.  JSON reports are
written with sorted keys so identical inputs give identical bytes; wall-clock
data goes to a sibling ``<out>.meta.json`` file.
"""

from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import classifier as C
from . import gadgets as G
from .interactions import (
    WeightedTermList,
    assemble,
    classical_max_cut_penalty,
    load_interaction_set,
    quantum_max_cut_energy,
)
from .operators import DENSE_LIMIT, DimensionError, HermiticityError, _as_dense, operator_from_json
from .schrieffer_wolff import DEFAULT_SWEEP, convergence_sweep, parse_delta_sweep
from .simcert import certify_simulation

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (tuple, set)):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n"


def _read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _write_outputs(args, payload: dict, meta: dict) -> None:
    text = dumps(payload)
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        meta = {
            **meta,
            "argv": list(args.argv),
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
        }
        Path(str(out) + ".meta.json").write_text(dumps(meta), encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc.strerror or exc}") from exc


def _plot_path(args, suffix: str = ".png") -> Path | None:
    if args.out is None:
        return None
    out = Path(args.out)
    return out.with_name(out.stem + suffix)


def _fail(names: list[str], what: str) -> int:
    for n in names:
        print(f"FAILED {what}: {n}", file=sys.stderr)
    return EXIT_FAIL if names else EXIT_OK


# ------------------------------------------------------------------ classify


def _site_count(terms: list[dict]) -> int:
    sites = [int(s) for t in terms for s in t["i"]]
    return max(sites) + 1 if sites else 0


def cmd_classify(args) -> int:
    payload = _read_json(args.input)
    try:
        d, table, terms = load_interaction_set(payload)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed interaction set: {exc}") from exc
    if not table:
        raise UsageError("interaction set is empty")
    names = sorted(table)
    verdict = C.classify_interaction_set([table[k].matrix for k in names], d, tol=args.tol_rank)
    report = {"d": d, "interactions": names, "verdict": verdict.to_json()}
    # per-interaction 2-local ranks give context for the set verdict
    report["two_local_rank"] = {
        k: C.two_local_rank(table[k].matrix, d, args.tol_rank) for k in names if table[k].arity == 2
    }
    failed = []
    if verdict.cls == C.LA_STOQUASTIC_UNIVERSAL and terms:
        n = _site_count(terms)
        if d**n > args.dense_limit:
            report["witness_check"] = {"skipped": f"register dimension {d**n} above dense limit"}
        else:
            wl = WeightedTermList(n, d)
            for t in terms:
                wl.add(table[t["ref"]], t["i"], float(t.get("w", 1.0)))
            H = _as_dense(assemble(wl, dense_limit=args.dense_limit))
            _, wit = C.stoquastify(H, verdict.witness.psi, d, n)
            worst = max(wit.max_positive_offdiag, wit.max_imag_offdiag)
            report["witness_check"] = {"n_sites": n, "max_offdiag_violation": worst, "tol": 1e-10}
            if worst > 1e-10:
                failed.append("stoquastic witness leaves a positive off-diagonal entry")
    print(f"{verdict.cls}: {verdict.label}" + (" (borderline)" if verdict.borderline else ""))
    _write_outputs(args, report, {"command": "classify"})
    return _fail(failed, "classify")


# ------------------------------------------------------------------ gadget


def _deltas(args):
    if args.delta_sweep is None:
        return None
    try:
        return parse_delta_sweep(args.delta_sweep)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_gadget_list(args) -> int:
    for name in sorted(G.REGISTRY):
        print(name)
    return EXIT_OK


def cmd_gadget_run(args) -> int:
    if args.name not in G.REGISTRY:
        raise UsageError(f"unknown gadget {args.name!r}; known: {', '.join(sorted(G.REGISTRY))}")
    deltas = _deltas(args)
    kw = {"d": args.d, "theta": args.theta, "alpha": args.alpha, "beta": args.beta, "mu": args.mu, "seed": args.seed}
    if args.tol is not None:
        kw["tol"] = args.tol
    rep = G.run_gadget(args.name, **kw)
    payload = rep.to_json(matrices=args.matrices)
    failed = [f"{c.name} [{c.label}] residual {c.residual:.3e} > tol {c.tol:.1e}" for c in rep.checks if not c.passed]
    print(rep.table())
    if deltas is not None:
        if rep.instance is None:
            raise UsageError(f"gadget {args.name} has no perturbative instance to sweep")
        res = convergence_sweep(rep.instance, deltas, args.threads)
        payload["sweep"] = res.to_json()
        print(res.table())
        plot = _plot_path(args)
        if plot is not None:
            from .plotting import save_sweep_plot

            save_sweep_plot([res], plot, title=args.name)
        if not res.monotone:
            failed.append("convergence sweep is not monotone")
    _write_outputs(args, payload, {"command": "gadget run", "gadget": args.name})
    return _fail(failed, f"gadget {args.name}")


# ------------------------------------------------------------------ sweep


def cmd_sweep(args) -> int:
    from .suite import SLOPE_LIMITS

    deltas = _deltas(args) or DEFAULT_SWEEP
    reps = G.representative_gadgets()
    orders = sorted(reps) if args.order is None else [args.order]
    results, failed = [], []
    for order in orders:
        res = convergence_sweep(reps[order], deltas, args.threads)
        results.append(res)
        print(f"order {order}: {res.gadget}")
        print(res.table())
        if not res.monotone:
            failed.append(f"order {order} sweep is not monotone")
        if res.slope is None or res.slope > SLOPE_LIMITS[order]:
            failed.append(f"order {order} slope {res.slope} above {SLOPE_LIMITS[order]}")
    payload = {"deltas": list(deltas), "sweeps": [r.to_json() for r in results], "slope_limits": SLOPE_LIMITS}
    plot = _plot_path(args)
    if plot is not None:
        from .plotting import save_sweep_plot

        save_sweep_plot(results, plot, title="exact Schrieffer-Wolff deviation")
    _write_outputs(args, payload, {"command": "sweep"})
    return _fail(failed, "sweep")


# ------------------------------------------------------------------ simcheck


def load_isometry(payload: dict) -> np.ndarray:
    """``{"rows", "cols", "matrix": [[re, im], ...]}`` row-major, or square operator JSON."""
    if "rows" in payload and "cols" in payload:
        rows, cols = int(payload["rows"]), int(payload["cols"])
        flat = np.array(payload["matrix"], dtype=float)
        if flat.shape != (rows * cols, 2):
            raise DimensionError(f"isometry has {flat.shape[0]} entries, expected {rows * cols}")
        return (flat[:, 0] + 1j * flat[:, 1]).reshape(rows, cols)
    M, _, _ = operator_from_json(payload, dense_limit=math.inf)
    return _as_dense(M)


def cmd_simcheck(args) -> int:
    Hs, _, _ = operator_from_json(_read_json(args.hsim), dense_limit=args.dense_limit)
    Ht, _, _ = operator_from_json(_read_json(args.htarget), dense_limit=args.dense_limit)
    V = load_isometry(_read_json(args.isometry))
    if not isinstance(Hs, np.ndarray):
        raise UsageError("simulator above the dense limit; raise --dense-limit to certify it")
    rep = certify_simulation(Hs, _as_dense(Ht), V, args.delta, modulo_identity=args.modulo_identity)
    payload = rep.to_json()
    failed = []
    if not rep.rank_match:
        failed.append(f"low-energy rank {rep.low_space_dim} differs from isometry rank {V.shape[1]}")
    else:
        if args.eta_max is not None and rep.eta > args.eta_max:
            failed.append(f"eta {rep.eta:.3e} > {args.eta_max:.1e}")
        if args.eps_max is not None and rep.eps > args.eps_max:
            failed.append(f"eps {rep.eps:.3e} > {args.eps_max:.1e}")
    print(f"rank_match={rep.rank_match} eta={rep.eta} eps={rep.eps}")
    _write_outputs(args, payload, {"command": "simcheck"})
    return _fail(failed, "simcheck")


# ------------------------------------------------------------------ maxdcut


def cmd_maxdcut(args) -> int:
    g = _read_json(args.graph)
    try:
        edges = [tuple(e) for e in g["edges"]]
        n = int(g.get("n", 1 + max(max(int(e[0]), int(e[1])) for e in edges)))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed graph: {exc}") from exc
    if args.d**n > max(args.dense_limit, 1 << 22):
        raise UsageError(f"register dimension {args.d**n} too large for brute force")
    energy = quantum_max_cut_energy(n, args.d, edges, dense_limit=args.dense_limit)
    pen, colouring = classical_max_cut_penalty(n, args.d, edges)
    total = sum(float(e[2]) if len(e) > 2 else 1.0 for e in edges)
    payload = {
        "n": n,
        "d": args.d,
        "edges": [list(e) for e in edges],
        "quantum_ground_energy": energy,
        "classical_penalty": float(pen),
        "classical_colouring": list(colouring),
        "classical_cut_weight": total - pen,
        "quantum_exceeds_classical": energy > pen + 1e-12,
    }
    print(f"quantum ground energy {energy:.12g}; classical penalty {pen:g} (colouring {list(colouring)})")
    _write_outputs(args, payload, {"command": "maxdcut"})
    return EXIT_OK


# ------------------------------------------------------------------ paper-suite


def _parse_only(text: str | None):
    if not text:
        return None
    try:
        return sorted({int(x) for x in text.split(",")})
    except ValueError as exc:
        raise UsageError(f"--only expects comma-separated criterion numbers, got {text!r}") from exc


def cmd_paper_suite(args) -> int:
    from .suite import CRITERIA, run_suite

    only = _parse_only(args.only)
    if only and any(n not in CRITERIA for n in only):
        raise UsageError(f"criteria are numbered 1..{len(CRITERIA)}")
    start = time.perf_counter()
    results = run_suite(only, _deltas(args), args.threads, args.seed)
    for r in results:
        print(r.line())
    payload = {
        "criteria": [r.to_json() for r in results],
        "passed": sum(r.passed for r in results),
        "total": len(results),
    }
    plot = _plot_path(args, ".sweep.png")
    if plot is not None and (only is None or 6 in only):
        from .plotting import save_sweep_plot

        sweeps = [convergence_sweep(g, _deltas(args), args.threads) for g in G.representative_gadgets().values()]
        save_sweep_plot(sweeps, plot, title="representative gadgets, orders 1-4")
    meta = {
        "command": "paper-suite",
        "seconds": time.perf_counter() - start,
        "criteria": {str(r.number): {"seconds": r.seconds, **r.timing} for r in results},
    }
    _write_outputs(args, payload, meta)
    failed = [f"criterion {r.number} ({r.title}): {', '.join(r.failures())}" for r in results if not r.passed]
    return _fail(failed, "acceptance")


# ------------------------------------------------------------------ parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=None, help="closed-form tolerance (gadget default 1e-9)")
    p.add_argument("--tol-rank", type=float, default=C.RANK_TOL, help="rank tolerance (default 1e-8)")
    p.add_argument("--dense-limit", type=int, default=DENSE_LIMIT)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta-sweep", default=None, metavar="LO:HI:N", help="log-spaced delta values (default 1e2:1e10:9)")
    p.add_argument("--threads", type=int, default=None, help="worker cap; GADGETFORGE_THREADS also applies")
    p.add_argument("--out", default=None, help="JSON report path (stdout when omitted)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="gadgetforge", description="Perturbative gadget verification toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify an interaction set")
    p.add_argument("--in", dest="input", required=True, help="interaction-set JSON")
    p.set_defaults(func=cmd_classify)

    g = sub.add_parser("gadget", help="build and verify a gadget")
    gsub = g.add_subparsers(dest="gadget_command", required=True)
    p = gsub.add_parser("run", parents=[common], help="run one gadget")
    p.add_argument("name")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--matrices", action="store_true", help="include effective and expected matrices in the report")
    p.set_defaults(func=cmd_gadget_run)
    p = gsub.add_parser("list", help="list gadget names")
    p.set_defaults(func=cmd_gadget_list)

    p = sub.add_parser("sweep", parents=[common], help="convergence sweeps of the representative gadgets")
    p.add_argument("--order", type=int, choices=(1, 2, 3, 4), default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simcheck", parents=[common], help="certify a (delta, eta, eps)-simulation")
    p.add_argument("--hsim", required=True)
    p.add_argument("--htarget", required=True)
    p.add_argument("--isometry", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--modulo-identity", action="store_true")
    p.add_argument("--eta-max", type=float, default=None)
    p.add_argument("--eps-max", type=float, default=None)
    p.set_defaults(func=cmd_simcheck)

    p = sub.add_parser("maxdcut", parents=[common], help="quantum vs classical Max-d-Cut by brute force")
    p.add_argument("--graph", required=True, help='JSON {"n": int, "edges": [[i, j, w?], ...]}')
    p.add_argument("--d", type=int, default=2)
    p.set_defaults(func=cmd_maxdcut)

    p = sub.add_parser("paper-suite", parents=[common], help="run every acceptance criterion")
    p.add_argument("--only", default=None, help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_paper_suite)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    args.argv = argv
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DimensionError, HermiticityError, KeyError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
