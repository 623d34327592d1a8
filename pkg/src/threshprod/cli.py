"""Command-line front end: ``python -m threshprod <command> ...``.

Exit codes: 0 pass, 1 check failure, 2 usage or config error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import SUITES, ConfigError, RunConfig, build_config, read_config_file
from .eigen import DEFAULT_CAP, eigenvalues
from .errors import BudgetExceeded, GraphError, InfeasibleDegree, ValidationError
from .graphs import BipartiteRegularGraph, format_edgelist, random_bipartite_regular, random_regular, read_edgelist
from .product import KINDS, Template, build
from .spectral import (
    BIPARTITE,
    NONBIPARTITE,
    GpEigenBasis,
    alpha,
    gp_spectrum,
    lambda_bgp,
    lambda_bounds,
    lambda_gp,
)
from . import verify as verify_mod

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _json(obj) -> str:
    return verify_mod.render(obj)


def _load_base(args):
    """Base graph from a file, or from -n/-d/--seed generator flags."""
    if getattr(args, "base", None):
        return read_edgelist(args.base)
    if args.n is None or args.d is None:
        raise ConfigError("give a base edge-list file or -n and -d")
    if args.bipartite:
        return random_bipartite_regular(args.n, args.d, seed=args.seed, connected=args.connected)
    return random_regular(args.n, args.d, seed=args.seed, connected=args.connected)


def _add_source(p: argparse.ArgumentParser, required_file: bool = False) -> None:
    if required_file:
        p.add_argument("base", help="base graph edge-list file")
    else:
        p.add_argument("base", nargs="?", help="base graph edge-list file (or use -n/-d)")
        p.add_argument("-n", type=int, help="vertices of a generated base")
        p.add_argument("-d", type=int, help="degree of a generated base")
        p.add_argument("--bipartite", action="store_true", help="generate a bipartite base")
        p.add_argument("--connected", action="store_true", help="resample until connected")
        p.add_argument("--seed", type=int, default=0)


def _product_args(p: argparse.ArgumentParser, required: bool) -> None:
    p.add_argument("--kind", choices=KINDS, required=required)
    p.add_argument("-k", type=int, required=required)
    p.add_argument("-t", type=int, required=required)
    p.add_argument("--template", help="side template such as XYX (bgp_template only)")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="maximum product vertex count")


def _need_regular(g) -> None:
    if g.d is None:
        raise ConfigError("closed-form spectra need a regular base graph")


def _check_kt(k, t) -> None:
    if k is None or t is None:
        raise ConfigError("need both -k and -t")
    if k < 1 or not 1 <= t <= k:
        raise ConfigError(f"need k >= 1 and 1 <= t <= k, got k={k}, t={t}")


def cmd_gen(args) -> int:
    if args.bipartite:
        g = random_bipartite_regular(args.n, args.d, seed=args.seed, connected=args.connected)
    else:
        g = random_regular(args.n, args.d, seed=args.seed, connected=args.connected)
    kind = "bipartite regular" if args.bipartite else "regular"
    _emit(format_edgelist(g, [f"random {kind} graph n={args.n} d={args.d}", f"seed {args.seed}"]), args.output)
    return EXIT_OK


def cmd_product(args) -> int:
    _check_kt(args.k, args.t)
    g = read_edgelist(args.base)
    tau = Template.parse(args.template) if args.template else None
    if args.kind == "bgp_template" and tau is None:
        raise ConfigError("bgp_template needs --template")
    p = build(g, args.kind, args.k, args.t, tau, args.cap)
    formula = p.formula_degree()
    deg = p.degrees()
    report = {
        "version": __version__,
        "product": p.header(),
        "seed": g.seed,
        "vertices": p.N,
        "formula_degree": formula,
        "audited_degree": p.d,
        "degree_range": [int(deg.min()), int(deg.max())] if p.N else [0, 0],
    }
    # an irregular base has no degree formula; the audit is then informational
    ok = formula is None or p.d == formula
    report["match"] = None if formula is None else ok
    seed = "-" if g.seed is None else g.seed
    _emit(format_edgelist(p, [p.header(), f"seed {seed}"]), args.output)
    stream = sys.stderr if args.output in (None, "-") else sys.stdout
    stream.write(json.dumps(report) + "\n")
    if not ok:
        sys.stderr.write(f"degree mismatch: formula {formula}, audited {report['degree_range']}\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_spectrum(args) -> int:
    g = _load_base(args)
    out = {"version": __version__, "seed": g.seed, "base": {"n": g.n, "d": g.d, "bipartite": g.bipartite}}
    if args.kind is None:
        out["oracle"] = eigenvalues(g.adj, cap=args.cap).values.tolist()
        _emit(_json(out), args.output)
        return EXIT_OK
    _check_kt(args.k, args.t)
    _need_regular(g)
    if args.kind not in ("gp", "sgp"):
        raise ConfigError("closed-form spectra exist for gp and sgp; use analyze for bgp")
    tau = Template.parse(args.template) if args.template else None
    p = build(g, args.kind, args.k, args.t, tau, args.cap)
    mode = NONBIPARTITE if args.kind == "gp" else BIPARTITE
    formula = np.sort(gp_spectrum(GpEigenBasis.from_graph(g, mode), args.k, args.t))[::-1]
    oracle = eigenvalues(p.adj, cap=args.cap)
    dev = oracle.max_deviation(formula)
    out.update({
        "product": p.header(),
        "N": p.N,
        "formula": formula.tolist(),
        "oracle": oracle.values.tolist(),
        "max_deviation": dev,
        "match": dev <= args.tolerance,
    })
    _emit(_json(out), args.output)
    return EXIT_OK if dev <= args.tolerance else EXIT_FAIL


def cmd_analyze(args) -> int:
    _check_kt(args.k, args.t)
    g = _load_base(args)
    _need_regular(g)
    mode = args.mode or ("bgp" if isinstance(g, BipartiteRegularGraph) else "gp")
    if mode == "bgp" and not isinstance(g, BipartiteRegularGraph):
        raise ConfigError("bgp analysis needs a bipartite base")
    k, t = args.k, args.t
    basis = GpEigenBasis.from_graph(g, NONBIPARTITE if mode == "gp" else BIPARTITE)
    bounds = lambda_bounds(basis, k, t, mode)
    formula = lambda_gp(basis, k, t) if mode == "gp" else lambda_bgp(basis, k, t)
    p = build(g, mode, k, t, cap=args.cap)
    spec = eigenvalues(p.adj, cap=args.cap)
    oracle = spec.nontrivial_lambda() if mode == "gp" else spec.kth_largest_abs(3)
    report = {
        "version": __version__,
        "seed": g.seed,
        "mode": mode,
        "n": g.n,
        "d": g.d,
        "k": k,
        "t": t,
        "degree_formula": bounds.degree,
        "degree_audited": p.degree(),
        "alpha": str(alpha(k, t)),
        "lambda_G": basis.lambda_g(),
        "Lambda_formula": formula,
        "Lambda_oracle": oracle,
        "bounds": {"lower": bounds.lower, "upper": bounds.upper, "condition_met": bounds.condition_met},
        "flags": {
            "formula_matches_oracle": abs(float(formula) - oracle) <= args.tolerance,
            "formula_in_bounds": bounds.contains(formula),
            "oracle_in_bounds": bounds.contains(oracle),
        },
    }
    _emit(_json(report), args.output)
    ok = report["flags"]["formula_matches_oracle"] and report["degree_formula"] == report["degree_audited"]
    if bounds.condition_met:
        ok = ok and report["flags"]["formula_in_bounds"] and report["flags"]["oracle_in_bounds"]
    return EXIT_OK if ok else EXIT_FAIL


def _verify_config(args) -> RunConfig:
    file_values = read_config_file(args.config) if args.config else {}
    flags = {
        "command": "verify",
        "suite": args.suite,
        "kind": args.kind,
        "n": args.n,
        "d": args.d,
        "k": args.k,
        "t": args.t,
        "base": args.base,
        "seed": args.seed,
        "seeds": args.seeds,
        "tolerance": args.tolerance,
        "cap": args.cap,
        "samples": args.samples,
        "xi": args.xi,
        "jobs": args.jobs,
        "output": args.output,
        "csv": args.csv,
    }
    return build_config(file_values, **flags)


def cmd_verify(args) -> int:
    cfg = _verify_config(args)
    report, ws = verify_mod.run(cfg)
    _emit(verify_mod.render(report), cfg.output)
    if cfg.csv:
        Path(cfg.csv).write_text(verify_mod.render_csv(ws.csv_rows))
    for check in report["checks"]:
        sys.stderr.write(f"{check['status']:<12} {check['name']} ({check['cases']} cases)\n")
    return EXIT_OK if report["summary"]["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="threshprod", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a seeded random regular graph")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--bipartite", action="store_true")
    p.add_argument("--connected", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("product", help="build a product graph and audit its degree")
    _add_source(p, required_file=True)
    _product_args(p, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("spectrum", help="oracle spectrum, or formula vs oracle for a product")
    _add_source(p)
    _product_args(p, required=False)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("analyze", help="degree, alpha, lambda and bounds report")
    _add_source(p)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-t", type=int, required=True)
    p.add_argument("--mode", choices=("gp", "bgp"))
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="run invariant suites and emit a JSON report")
    p.add_argument("suite", nargs="?", choices=SUITES, default=None)
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("-n", type=int)
    p.add_argument("-d", type=int)
    p.add_argument("-k", type=int)
    p.add_argument("-t", type=int)
    p.add_argument("--base", help="use this edge-list base instead of generated ones")
    p.add_argument("--seed", type=int)
    p.add_argument("--seeds", help="seed list such as 1..20 or 1,5,9")
    p.add_argument("--samples", type=int, help="sampled (S,T) pairs per mixing case")
    p.add_argument("--xi", type=float, help="set fraction for the relative-error check")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--cap", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--csv", help="write per-pair mixing rows here")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        sys.stderr.write(f"budget exceeded: {exc}\n")
        return EXIT_BUDGET
    except (ConfigError, ValidationError, InfeasibleDegree, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except GraphError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
