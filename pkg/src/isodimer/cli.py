"""Command-line interface: structured reports over the library surface.

Every subcommand prints one machine-readable report (JSON by default, CSV
for tabular payloads with --format csv) with a fixed field order: command,
input, params, results, residuals, tolerances, wall_time_s.  Exit codes:
0 success, 1 identity violation, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import time

import numpy as np

from .elliptic import complete_elliptic_k, coupling, dual_parameter
from .errors import IdentityViolationError
from .fisher import fisher_graph
from .gibbs import GibbsCorrelator
from .graphs import load_graph, quotient, standard_lattice
from .kasteleyn import KasteleynSystem, kasteleyn_symbol
from .laplacian import identity_suite, laplacian_char_poly
from .laurent import newton_polygon
from .oracle import (
    DEFAULT_BUDGET,
    enumerate_crsf,
    toroidal_even_subgraph_sum,
    toroidal_ising_partition,
    toroidal_matchings,
)
from .spectral import (
    amoeba_samples,
    characteristic_polynomial,
    free_energy,
    unique_torus_zero_certificate,
    zero_at_one_one,
)

_LATTICES = ("square", "triangular", "honeycomb")


def _resolve_graph(spec: str):
    if spec in _LATTICES:
        return standard_lattice(spec), {"lattice": spec}
    with open(spec, "r", encoding="utf-8") as fh:
        text = fh.read()
    g = load_graph(text)
    digest = hashlib.sha256(text.encode()).hexdigest()[:16]
    return g, {"file": spec, "sha256_16": digest}


def _emit(report: dict, fmt: str, tables: dict | None = None) -> None:
    if fmt == "json":
        print(json.dumps(report, indent=2, default=_jsonable))
        return
    # csv: flat key/value block, then each table
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["key", "value"])
    for section in ("command", "input", "params", "results", "residuals",
                    "tolerances", "wall_time_s"):
        val = report.get(section)
        if isinstance(val, dict):
            for k, v in val.items():
                if not isinstance(v, (list, dict)):
                    writer.writerow([f"{section}.{k}", v])
        elif val is not None:
            writer.writerow([section, val])
    for name, (header, rows) in (tables or {}).items():
        writer.writerow([])
        writer.writerow([f"table.{name}"] + header)
        for row in rows:
            writer.writerow([""] + list(row))
    sys.stdout.write(out.getvalue())


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x)}")


def _report(command: str, input_info: dict, params: dict, started: float,
            results: dict, residuals: dict | None = None,
            tolerances: dict | None = None) -> dict:
    return {
        "command": command,
        "input": input_info,
        "params": params,
        "results": results,
        "residuals": residuals or {},
        "tolerances": tolerances or {},
        "wall_time_s": round(time.time() - started, 6),
    }


def _parse_edges(fg, text: str):
    """Edge selectors: 'long<k>' / 'deco<k>' / raw decorated-edge index."""
    picks = []
    longs = fg.long_edges()
    decos = fg.decoration_edges()
    for tok in text.split(","):
        tok = tok.strip()
        if tok.startswith("long"):
            picks.append(longs[int(tok[4:] or 0)])
        elif tok.startswith("deco"):
            picks.append(decos[int(tok[4:] or 0)])
        else:
            picks.append(int(tok))
    return picks


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_lattice(args) -> int:
    t0 = time.time()
    g, info = _resolve_graph(args.graph)
    results = {
        "vertices": g.num_vertices,
        "edges": g.num_edges,
        "theta": [round(float(t), 12) for t in g.theta],
        "basis": g.basis.tolist(),
        "spec": g.to_spec(),
    }
    _emit(_report("lattice", info, {}, t0, results), args.format)
    return 0


def cmd_coupling(args) -> int:
    t0 = time.time()
    j = coupling(args.theta, args.k)
    results = {
        "J": j,
        "sinh_2J": math.sinh(2 * j),
        "complete_elliptic_K": complete_elliptic_k(args.k),
        "dual_parameter_squared": (dual_parameter(args.k) ** 2).real,
    }
    _emit(_report("coupling", {}, {"theta": args.theta, "k": args.k}, t0, results),
          args.format)
    return 0


def cmd_partition(args) -> int:
    t0 = time.time()
    g, info = _resolve_graph(args.graph)
    fg = fisher_graph(g)
    system = KasteleynSystem(fg)
    rep = system.partition_function(args.n)
    results = rep.as_report()
    _emit(_report("partition", info, {"n": args.n}, t0, results), args.format)
    return 0


def cmd_prob(args) -> int:
    t0 = time.time()
    g, info = _resolve_graph(args.graph)
    fg = fisher_graph(g)
    system = KasteleynSystem(fg)
    picks = _parse_edges(fg, args.edges)
    n = args.n
    idx = [(0 * n + 0) * fg.num_edges + e for e in picks]  # cell (0, 0) copies
    p = system.boltzmann_probability(n, idx)
    results = {"edges": picks, "P_n": p, "Z_n": system.partition_function(n).value}
    _emit(_report("prob", info, {"n": n, "edges": args.edges}, t0, results),
          args.format)
    return 0


def cmd_spectral(args) -> int:
    t0 = time.time()
    g, info = _resolve_graph(args.graph)
    fg = fisher_graph(g)
    system = KasteleynSystem(fg)
    p = characteristic_polynomial(kasteleyn_symbol(fg, system.orientation))
    zr = zero_at_one_one(p)
    ok, margin = unique_torus_zero_certificate(p)
    coeff_rows = [(x, y, p.coefficient(x, y).real, p.coefficient(x, y).imag)
                  for x, y in sorted(p.support())]
    results = {
        "coefficients": [list(r) for r in coeff_rows],
        "newton_polygon": [list(v) for v in newton_polygon(p)],
        "zero_report": {
            "value_abs": abs(zr.value), "grad_abs": [abs(zr.grad_z), abs(zr.grad_w)],
            "alpha": zr.alpha, "beta": zr.beta, "gamma": zr.gamma,
            "definite": zr.definite, "multiplicity_two": zr.multiplicity_two,
        },
        "grid_minimum_next_to_11": ok,
        "grid_margin": margin,
    }
    fe, fe_err = free_energy(p, tol=args.tol, threads=args.threads)
    results["free_energy"] = fe
    results["free_energy_error"] = fe_err
    tables = {"coefficients": (["x", "y", "re", "im"], coeff_rows)}
    _emit(_report("spectral", info, {"tol": args.tol}, t0, results,
                  tolerances={"free_energy": args.tol}), args.format, tables)
    return 0


def cmd_amoeba(args) -> int:
    t0 = time.time()
    g, info = _resolve_graph(args.graph)
    fg = fisher_graph(g)
    system = KasteleynSystem(fg)
    p = characteristic_polynomial(kasteleyn_symbol(fg, system.orientation))
    pts = amoeba_samples(p, samples=args.samples)
    results = {"num_samples": int(len(pts))}
    tables = {"amoeba": (["log_abs_z", "log_abs_w"],
                         [(round(a, 9), round(b, 9)) for a, b in pts])}
    _emit(_report("amoeba", info, {"samples": args.samples}, t0, results),
          args.format, tables)
    return 0


def cmd_free_energy(args) -> int:
    t0 = time.time()
    g, info = _resolve_graph(args.graph)
    fg = fisher_graph(g)
    system = KasteleynSystem(fg)
    p = characteristic_polynomial(kasteleyn_symbol(fg, system.orientation))
    fe, fe_err = free_energy(p, tol=args.tol, threads=args.threads)
    results = {"free_energy": fe, "error_estimate": fe_err}
    rows = []
    for n in (2, 3, 4):
        z = system.partition_function(n).value
        rows.append((n, -math.log(z) / n ** 2, abs(-math.log(z) / n ** 2 - fe)))
    tables = {"finite_n": (["n", "minus_log_Z_over_n2", "gap"], rows)}
    results["finite_n"] = [list(r) for r in rows]
    _emit(_report("free-energy", info, {"tol": args.tol}, t0, results,
                  tolerances={"ladder": args.tol}), args.format, tables)
    return 0


def cmd_correlate(args) -> int:
    t0 = time.time()
    g, info = _resolve_graph(args.graph)
    fg = fisher_graph(g)
    system = KasteleynSystem(fg)
    corr = GibbsCorrelator(system, tol=args.tol, threads=args.threads)
    picks = _parse_edges(fg, args.edges)
    n_list = [int(s) for s in args.n_list.split(",")] if args.n_list else [2, 4, 8]
    edges = [(e, (0, 0)) for e in picks]
    rows = corr.convergence_report(edges, n_list)
    table = [(r["n"], r["P_n"], r["P_inf"], r["gap"]) for r in rows]
    results = {
        "edges": picks,
        "P_infinity": rows[0]["P_inf"] if rows else corr.edge_probability(edges),
        "convergence": [list(r) for r in table],
    }
    _emit(_report("correlate", info, {"edges": args.edges, "n_list": n_list},
                  t0, results, tolerances={"coefficients": args.tol}),
          args.format, {"convergence": (["n", "P_n", "P_inf", "gap"], table)})
    return 0


def cmd_verify(args) -> int:
    t0 = time.time()
    g, info = _resolve_graph(args.graph)
    wanted = args.suite
    try:
        rep = identity_suite(g, bound=args.tol)
    except IdentityViolationError as exc:
        _emit(_report("verify", info, {"suite": wanted}, t0,
                      {"passed": False, "failed": exc.which},
                      residuals={exc.which: exc.residual},
                      tolerances={"bound": args.tol}), args.format)
        return 1
    keys = list(rep.residuals) if wanted == "all" else [wanted]
    results = {
        "passed": True,
        "constants": {
            "dimer_to_laplacian_ratio":
                rep.constants["dimer_to_laplacian_ratio"].real,
            "tan_product": rep.constants["tan_product"],
            "zeta_modulus": rep.constants["zeta_modulus"],
        },
    }
    _emit(_report("verify", info, {"suite": wanted}, t0, results,
                  residuals={k: rep.residuals[k] for k in keys},
                  tolerances={"bound": args.tol}), args.format)
    return 0


def cmd_oracle(args) -> int:
    t0 = time.time()
    g, info = _resolve_graph(args.graph)
    tg = quotient(g, args.n)
    what = args.what
    if what == "matchings":
        fg = fisher_graph(g)
        tgf = quotient(fg, args.n)
        count, total = toroidal_matchings(tgf, fg.weights)
        results = {"what": what, "count": count, "weighted_sum": total}
    elif what == "spins":
        j = [coupling(t, args.k) for t in g.theta]
        results = {"what": what, "Z_ising": toroidal_ising_partition(tg, j),
                   "couplings": [round(x, 12) for x in j]}
    elif what == "contours":
        j = [coupling(t, args.k) for t in g.theta]
        x = [math.tanh(v) for v in j]
        results = {"what": what,
                   "high_temperature_sum": toroidal_even_subgraph_sum(tg, x)}
    elif what == "crsf":
        forests = enumerate_crsf(tg)
        results = {"what": what, "count": len(forests),
                   "homologies": sorted({h for f in forests for h in f.homologies})}
    else:
        raise ValueError(f"unknown oracle target {what!r}")
    _emit(_report("oracle", info, {"what": what, "n": args.n}, t0, results),
          args.format)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="isodimer",
        description="Critical isoradial Ising/dimer computations with "
                    "machine-readable reports.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, graph=True):
        if graph:
            p.add_argument("--graph", default="square",
                           help="square|triangular|honeycomb or a graph-spec JSON file")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("lattice", help="construct and validate a graph")
    common(p)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("coupling", help="coupling constant J(theta, k)")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--k", type=float, default=0.0)
    common(p, graph=False)
    p.set_defaults(func=cmd_coupling)

    p = sub.add_parser("partition", help="torus partition function Z_n")
    common(p)
    p.add_argument("--n", type=int, default=1)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("prob", help="Boltzmann probability of edges")
    common(p)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--edges", required=True,
                   help="comma list: long<k>, deco<k>, or raw edge index")
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("spectral", help="characteristic polynomial report")
    common(p)
    p.set_defaults(func=cmd_spectral, tol=1e-6)

    p = sub.add_parser("amoeba", help="amoeba samples of the spectral curve")
    common(p)
    p.add_argument("--samples", type=int, default=40)
    p.set_defaults(func=cmd_amoeba)

    p = sub.add_parser("free-energy", help="free energy and finite-n gaps")
    common(p)
    p.set_defaults(func=cmd_free_energy, tol=1e-6)

    p = sub.add_parser("correlate", help="Gibbs edge probabilities vs finite n")
    common(p)
    p.add_argument("--edges", required=True)
    p.add_argument("--n-list", default="2,4,8")
    p.set_defaults(func=cmd_correlate, tol=1e-6)

    p = sub.add_parser("verify", help="identity suite certification")
    common(p)
    p.add_argument("--suite", default="all",
                   help="all or one of i,ii,iii,iv,v,vi,vii")
    p.set_defaults(func=cmd_verify, tol=1e-7)

    p = sub.add_parser("oracle", help="brute-force enumeration")
    common(p)
    p.add_argument("--what", required=True,
                   choices=("matchings", "spins", "contours", "crsf"))
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--k", type=float, default=0.0)
    p.set_defaults(func=cmd_oracle)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "tol", None) is None:
        args.tol = 1e-6
    try:
        return args.func(args)
    except IdentityViolationError as exc:
        print(json.dumps({"command": args.command, "error": str(exc)}))
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
