"""Invariant suites behind ``threshprod verify``.

Each check walks its slice of the parameter grid, compares a formula or
lemma against an independent computation, and returns a CheckResult. The
report is assembled in a fixed order, and floats are printed with 12
significant digits, so equal configs give byte-identical JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, bipartite_bound_grid, bipartite_spectrum_grid, gp_grid
from .cospectral import (
    cospectral_family,
    connectivity_multiset,
    verify_walk_lemma,
)
from .eigen import Spectrum, eigenvalues
from .errors import BudgetExceeded, PremiseNotMet
from .graphs import BipartiteRegularGraph, random_bipartite_regular, random_regular, read_edgelist
from .mixing import SLACK, jumbledness_scan, relative_error_report
from .product import ProductGraph, Template, bgp, bgp_template, gp, sgp, sgp_adjacency_tensor, template_classes
from .spectral import (
    BIPARTITE,
    NONBIPARTITE,
    GpEigenBasis,
    gp_spectrum,
    lambda_bgp,
    lambda_bounds,
    lambda_gp,
    sgp_spectrum,
)

MAX_LISTED_FAILURES = 25
WALK_BASES = ((4, 1), (6, 1), (8, 1), (8, 2), (10, 1), (10, 2), (12, 1), (12, 2), (12, 3), (12, 3))
COSPECTRAL_CASES = ((8, 2, 2, 1), (8, 2, 2, 2), (8, 2, 3, 1), (8, 2, 3, 2), (8, 2, 3, 3), (12, 3, 3, 1))

PASS, FAIL, EMPTY, INCONCLUSIVE = "PASS", "FAIL", "EMPTY", "INCONCLUSIVE"


@dataclass
class CheckResult:
    name: str
    provenance: str
    cases: int = 0
    failure_count: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    inconclusive: bool = False

    def record(self, ok: bool, **case) -> bool:
        self.cases += 1
        if not ok:
            self.failure_count += 1
            if len(self.failures) < MAX_LISTED_FAILURES:
                self.failures.append(case)
        return ok

    def track_max(self, key: str, value) -> None:
        self.stats[key] = max(self.stats.get(key, value), value)

    @property
    def status(self) -> str:
        if self.failure_count:
            return FAIL
        if self.inconclusive:
            return INCONCLUSIVE
        return PASS if self.cases else EMPTY

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "provenance": self.provenance,
            "status": self.status,
            "cases": self.cases,
            "failures": self.failure_count,
            "skipped": self.skipped,
            "stats": self.stats,
            "failed_cases": self.failures,
        }


def _num(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    return x


class Workspace:
    """Caches bases, products and oracle spectra for one verify run."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.fixed = read_edgelist(cfg.base) if cfg.base else None
        if self.fixed is not None and self.fixed.d is None:
            raise ConfigError("verify needs a regular base graph")
        self._cache: dict = {}
        self.csv_rows: list[dict] = []

    def _memo(self, key, make):
        if key not in self._cache:
            self._cache[key] = make()
        return self._cache[key]

    def general(self, n: int, d: int, seed: int):
        if self.fixed is not None:
            return self.fixed
        return self._memo(("g", n, d, seed), lambda: random_regular(n, d, seed=seed))

    def bipartite(self, n: int, d: int, seed: int, connected: bool = True):
        if self.fixed is not None:
            if not isinstance(self.fixed, BipartiteRegularGraph):
                return None
            return self.fixed
        return self._memo(("b", n, d, seed, connected), lambda: random_bipartite_regular(n, d, seed=seed, connected=connected))

    def product(self, kind: str, base, k: int, t: int, tau: Template | None = None) -> ProductGraph:
        key = ("p", kind, id(base), k, t, str(tau))
        cap = self.cfg.cap
        builders = {
            "gp": lambda: gp(base, k, t, cap),
            "bgp": lambda: bgp(base, k, t, cap),
            "sgp": lambda: sgp(base, k, t, cap),
            "bgp_template": lambda: bgp_template(base, k, t, tau, cap),
        }
        return self._memo(key, builders[kind])

    def spectrum(self, p: ProductGraph) -> Spectrum:
        return self._memo(("s", id(p)), lambda: eigenvalues(p.adj, cap=self.cfg.cap))

    def basis(self, g, mode: str) -> GpEigenBasis:
        return self._memo(("e", id(g), mode), lambda: GpEigenBasis.from_graph(g, mode))

    def grid(self, which):
        cfg = self.cfg
        if self.fixed is not None:
            cfg = cfg.replace(n=self.fixed.n, d=self.fixed.d, seeds=(self.fixed.seed or cfg.seed,))
        return list(which(cfg))


def _case(n, d, k, t, seed, **extra) -> dict:
    return {"n": n, "d": d, "k": k, "t": t, "seed": seed, **{key: _num(v) for key, v in extra.items()}}


def _kinds(cfg: RunConfig, allowed) -> list[str]:
    return [k for k in allowed if cfg.kind is None or cfg.kind == k]


# ----------------------------------------------------------------- checks


def check_spectrum_gp(ws: Workspace) -> CheckResult:
    res = CheckResult("spectrum.gp", "GP: closed-form eigenvalue multiset from the base spectrum vs dense eigensolver")
    tol = ws.cfg.tolerance
    for n, d, k, t, seed in ws.grid(gp_grid):
        g = ws.general(n, d, seed)
        formula = gp_spectrum(ws.basis(g, NONBIPARTITE), k, t)
        dev = ws.spectrum(ws.product("gp", g, k, t)).max_deviation(formula)
        res.track_max("max_deviation", dev)
        res.record(dev <= tol, **_case(n, d, k, t, seed, deviation=dev))
    return res


def check_spectrum_sgp(ws: Workspace) -> CheckResult:
    res = CheckResult("spectrum.sgp", "SGP on connected bipartite bases: closed-form multiset vs dense eigensolver")
    tol = ws.cfg.tolerance
    for n, d, k, t, seed in ws.grid(bipartite_spectrum_grid):
        g = ws.bipartite(n, d, seed)
        if g is None or not g.is_connected():
            res.skipped += 1
            continue
        formula = sgp_spectrum(ws.basis(g, BIPARTITE), k, t)
        dev = ws.spectrum(ws.product("sgp", g, k, t)).max_deviation(formula)
        res.track_max("max_deviation", dev)
        res.record(dev <= tol, **_case(n, d, k, t, seed, deviation=dev))
    return res


def check_bgp_third(ws: Workspace) -> CheckResult:
    res = CheckResult("bgp.third_eigenvalue", "BGP: third largest |eigenvalue| vs lambda_i* times the signed-vector sum")
    tol = ws.cfg.tolerance
    for n, d, k, t, seed in ws.grid(bipartite_spectrum_grid):
        g = ws.bipartite(n, d, seed)
        if g is None or not g.is_connected():
            res.skipped += 1
            continue
        p = ws.product("bgp", g, k, t)
        formula = lambda_bgp(ws.basis(g, BIPARTITE), k, t)
        oracle = ws.spectrum(p).kth_largest_abs(3) if p.N >= 3 else 0.0
        dev = abs(float(formula) - oracle)
        res.track_max("max_deviation", dev)
        res.record(dev <= tol, **_case(n, d, k, t, seed, formula=formula, oracle=oracle))
    return res


def check_tensor(ws: Workspace) -> CheckResult:
    res = CheckResult("tensor.collapse", "t = k: lambda(GP) = lambda(G) * d^(k-1), exact when lambda(G) is an integer")
    for n, d, k, t, seed in ws.grid(gp_grid):
        if t != k:
            continue
        g = ws.general(n, d, seed)
        basis = ws.basis(g, NONBIPARTITE)
        lam = basis.lambda_g()
        expected = lam * d ** (k - 1)
        got = lambda_gp(basis, k, k)
        if isinstance(lam, int):
            exact_ok = got == abs(expected)
            res.stats["exact_cases"] = res.stats.get("exact_cases", 0) + 1
        else:
            exact_ok = abs(float(got) - abs(float(expected))) <= 1e-8
        oracle = ws.spectrum(ws.product("gp", g, k, k)).nontrivial_lambda()
        oracle_ok = abs(oracle - abs(float(expected))) <= ws.cfg.tolerance
        res.record(exact_ok and oracle_ok, **_case(n, d, k, t, seed, formula=got, expected=expected, oracle=oracle))
    return res


def _bound_case(res, bounds, formula, oracle, tol, case, collapse: bool) -> None:
    ok = bounds.contains(formula) and bounds.contains(oracle) and abs(float(formula) - oracle) <= tol
    if collapse:
        same = bounds.lower == bounds.upper if isinstance(bounds.lower, Fraction) else math.isclose(
            float(bounds.lower), float(bounds.upper), rel_tol=1e-12)
        ok = ok and same
    res.track_max("max_upper_over_lambda", float(bounds.upper) / oracle if oracle else 0.0)
    res.record(ok, **case, lower=float(bounds.lower), upper=float(bounds.upper), formula=formula, oracle=oracle)


def check_bounds(ws: Workspace) -> list[CheckResult]:
    out = []
    tol = ws.cfg.tolerance
    if "gp" in _kinds(ws.cfg, ("gp", "bgp")):
        res = CheckResult("bounds.gp", "GP: (lambda/d)(1/alpha)(t/k)d1 <= Lambda <= (lambda/d)(1/alpha)d1 for d <= (n-1)/2")
        for n, d, k, t, seed in ws.grid(gp_grid):
            g = ws.general(n, d, seed)
            basis = ws.basis(g, NONBIPARTITE)
            bounds = lambda_bounds(basis, k, t, "gp")
            if not bounds.condition_met:
                res.skipped += 1
                continue
            oracle = ws.spectrum(ws.product("gp", g, k, t)).nontrivial_lambda()
            _bound_case(res, bounds, lambda_gp(basis, k, t), oracle, tol, _case(n, d, k, t, seed), t == k)
        out.append(res)
    if "bgp" in _kinds(ws.cfg, ("gp", "bgp")):
        res = CheckResult("bounds.bgp", "BGP: (lambda/d)(1/alpha)(t/k)d2 <= Lambda <= (lambda/d)d2 for d <= n/4")
        for n, d, k, t, seed in ws.grid(bipartite_bound_grid):
            g = ws.bipartite(n, d, seed)
            if g is None or not g.is_connected():
                res.skipped += 1
                continue
            basis = ws.basis(g, BIPARTITE)
            bounds = lambda_bounds(basis, k, t, "bgp")
            if not bounds.condition_met:
                res.skipped += 1
                continue
            oracle = ws.spectrum(ws.product("bgp", g, k, t)).kth_largest_abs(3)
            _bound_case(res, bounds, lambda_bgp(basis, k, t), oracle, tol, _case(n, d, k, t, seed), t == k)
        out.append(res)
    return out


def check_degrees(ws: Workspace) -> CheckResult:
    res = CheckResult("degrees", "audited product degree equals d1 (GP) or d2 (BGP, template, SGP)")

    def audit(p: ProductGraph, case):
        try:
            got = p.degree()
        except Exception as exc:  # NotRegular
            res.record(False, **case, error=str(exc))
            return
        res.record(got == p.formula_degree(), **case, audited=got, formula=p.formula_degree())

    for n, d, k, t, seed in ws.grid(gp_grid):
        g = ws.general(n, d, seed)
        audit(ws.product("gp", g, k, t), _case(n, d, k, t, seed, kind="gp"))
    for n, d, k, t, seed in ws.grid(bipartite_spectrum_grid):
        g = ws.bipartite(n, d, seed)
        if g is None:
            res.skipped += 1
            continue
        audit(ws.product("sgp", g, k, t), _case(n, d, k, t, seed, kind="sgp"))
        for tau in template_classes(k):
            kind = "bgp" if tau == Template.all_x(k) else "bgp_template"
            audit(ws.product(kind, g, k, t, tau if kind == "bgp_template" else None),
                  _case(n, d, k, t, seed, kind=kind, tau=str(tau)))
    return res


def check_identity(ws: Workspace) -> CheckResult:
    res = CheckResult("sgp.tensor_identity", "SGP adjacency equals the sum of Kronecker products of A and its bipartite complement")
    for n, d, k, t, seed in ws.grid(bipartite_spectrum_grid):
        g = ws.bipartite(n, d, seed)
        if g is None:
            res.skipped += 1
            continue
        tensor = sgp_adjacency_tensor(g, k, t, ws.cfg.cap)
        mismatches = int(np.count_nonzero(tensor != ws.product("sgp", g, k, t).adj))
        res.track_max("max_mismatches", mismatches)
        res.record(mismatches == 0, **_case(n, d, k, t, seed, mismatches=mismatches))
    return res


def padded_star() -> tuple[np.ndarray, np.ndarray]:
    """K_{1,3} with two isolated vertices added to the centre's side (balanced parts)."""
    a = np.zeros((6, 6), dtype=bool)
    a[0, 3:] = a[3:, 0] = True
    return a, np.array([True, True, True, False, False, False])


def check_walks(ws: Workspace) -> list[CheckResult]:
    lemma = CheckResult("walks.lemma", "|Psi_u,X| = |Psi_u,Y| on regular bipartite bases; trace formula vs DFS enumeration")
    bases = [(0, 0)] if ws.fixed is not None else WALK_BASES
    for i, (n, d) in enumerate(bases):
        seed = ws.cfg.seed + i
        g = ws.bipartite(n, d, seed, connected=False)
        if g is None:
            lemma.skipped += 1
            continue
        rep = verify_walk_lemma(g, 6)
        lemma.stats["patterns"] = lemma.stats.get("patterns", 0) + rep.patterns_checked
        lemma.record(rep.holds and rep.methods_agree, n=g.n, d=g.d, seed=seed,
                     counterexample=rep.counterexample, disagreements=rep.method_disagreements[:3])
    control = CheckResult("walks.negative_control", "non-regular star control must violate the walk identity")
    a, xm = padded_star()
    rep = verify_walk_lemma(a, 6, x_mask=xm)
    control.stats["counterexample"] = list(rep.counterexample) if rep.counterexample else None
    control.record(rep.counterexample is not None and rep.methods_agree, graph="K_1,3 + 2 isolated")
    multiset = CheckResult("walks.connectivity_multisets", "connectivity-vector multisets agree across all templates")
    for i in range(1 if ws.fixed is not None else 3):
        seed = ws.cfg.seed + i
        g = ws.bipartite(8, 2, seed, connected=False)
        if g is None or g.n > 8:
            multiset.skipped += 1
            continue
        for k in (1, 2):
            for ell in (2, 4):
                sets = [connectivity_multiset(g, k, 1, tau, ell) for tau in template_classes(k)]
                multiset.record(all(s == sets[0] for s in sets), n=g.n, d=g.d, seed=seed, k=k, ell=ell)
    return [lemma, control, multiset]


def _cospectral_cases(cfg: RunConfig):
    if any(v is not None for v in (cfg.n, cfg.d, cfg.k, cfg.t)):
        n = cfg.n or 12
        d = cfg.d if cfg.d is not None else max(1, n // 4)
        k = cfg.k or 3
        ts = (cfg.t,) if cfg.t is not None else tuple(range(1, k + 1))
        return [(n, d, k, t) for t in ts]
    return list(COSPECTRAL_CASES)


def check_cospectral(ws: Workspace) -> list[CheckResult]:
    family = CheckResult("cospectral.family", "all template-class products are cospectral (exact trace certification)")
    witness = CheckResult("cospectral.witness", "sorted diag(A^4) separates the all-X template from the X..Y..X template")
    hits: dict[str, list[int]] = {}
    for n, d, k, t in _cospectral_cases(ws.cfg):
        for seed in ws.cfg.seed_list:
            g = ws.bipartite(n, d, seed, connected=False)
            if g is None:
                family.skipped += 1
                continue
            rep = cospectral_family(g, k, t, ws.cfg.cap, jobs=ws.cfg.jobs)
            methods = sorted({c.method for c in rep.certificates.values()})
            consistent = all(c.consistent for c in rep.certificates.values())
            family.record(rep.all_cospectral and consistent, n=g.n, d=g.d, k=k, t=t, seed=seed,
                          methods=methods, pairs=len(rep.certificates))
            for m in methods:
                family.stats.setdefault("methods", [])
                if m not in family.stats["methods"]:
                    family.stats["methods"].append(m)
            if k == 3:
                key = f"n={g.n} d={g.d} k={k} t={t}"
                hits.setdefault(key, [])
                if rep.witnesses[("XXX", "XYX")].found:
                    hits[key].append(seed)
    for key, seeds in hits.items():
        witness.stats[key] = {"seeds_tried": len(ws.cfg.seed_list), "hits": len(seeds), "hit_seeds": seeds}
        witness.cases += 1
    # existence over a seed sweep, not a universal claim: no hit is inconclusive, not a failure
    witness.inconclusive = bool(hits) and not any(hits.values())
    return [family, witness]


def _scan_seed(cfg: RunConfig, tag: int, n, d, k, t, seed) -> list[int]:
    return [cfg.seed, tag, n, d, k, t, seed]


def check_mixing(ws: Workspace) -> list[CheckResult]:
    out = []
    cfg = ws.cfg
    kinds = _kinds(cfg, ("gp", "bgp"))

    def scan(res, p, corollary, own, case, tag):
        n, d, k, t, seed = (case[x] for x in ("n", "d", "k", "t", "seed"))
        sr = jumbledness_scan(p, corollary, cfg.samples, _scan_seed(cfg, tag, n, d, k, t, seed))
        own_ok = sr.max_normalized <= own * (1 + SLACK) or sr.max_normalized == 0
        res.track_max("max_ratio_corollary", sr.max_ratio)
        res.track_max("max_normalized_over_own_lambda", sr.max_normalized / own if own else 0.0)
        if cfg.csv:
            for r in sr.reports:
                ws.csv_rows.append({"kind": p.kind, **{x: case[x] for x in ("n", "d", "k", "t", "seed")}, **r.row()})
        res.record(sr.passed and own_ok, **case, pairs=len(sr.reports), corollary_failures=sr.failures,
                   max_ratio=sr.max_ratio, own_lambda=own, max_normalized=sr.max_normalized)

    if "gp" in kinds:
        res = CheckResult("mixing.gp", "sampled |e(S,T) - mu| within the GP corollary bound and the product's own lambda")
        for n, d, k, t, seed in ws.grid(gp_grid):
            g = ws.general(n, d, seed)
            bounds = lambda_bounds(ws.basis(g, NONBIPARTITE), k, t, "gp")
            if not bounds.condition_met:
                res.skipped += 1
                continue
            p = ws.product("gp", g, k, t)
            own = ws.spectrum(p).nontrivial_lambda()
            scan(res, p, float(bounds.upper), own, _case(n, d, k, t, seed), 1)
        out.append(res)
    if "bgp" in kinds:
        res = CheckResult("mixing.bgp", "sampled bipartite |e(S,T) - 2D|S||T|/N| within the BGP corollary bound and own lambda")
        for n, d, k, t, seed in ws.grid(bipartite_bound_grid):
            g = ws.bipartite(n, d, seed)
            if g is None or not g.is_connected():
                res.skipped += 1
                continue
            bounds = lambda_bounds(ws.basis(g, BIPARTITE), k, t, "bgp")
            if not bounds.condition_met:
                res.skipped += 1
                continue
            p = ws.product("bgp", g, k, t)
            own = ws.spectrum(p).nontrivial_lambda(bipartite=True)
            scan(res, p, float(bounds.upper), own, _case(n, d, k, t, seed), 2)
        out.append(res)
    return out


def check_application(ws: Workspace) -> CheckResult:
    cfg = ws.cfg
    res = CheckResult("mixing.application", "expander base (lambda <= 2 sqrt d): sampled |e-mu|/mu <= 2/(xi sqrt d) on GP")
    for n, d, k, t, seed in ws.grid(gp_grid):
        g = ws.general(n, d, seed)
        if not lambda_bounds(ws.basis(g, NONBIPARTITE), k, t, "gp").condition_met:
            res.skipped += 1
            continue
        lam = float(ws.basis(g, NONBIPARTITE).lambda_g())
        p = ws.product("gp", g, k, t)
        try:
            rep = relative_error_report(p, cfg.xi, d, lam, samples=200, seed=_scan_seed(cfg, 3, n, d, k, t, seed))
        except PremiseNotMet:
            res.skipped += 1
            continue
        if not rep.xi_premise:
            res.skipped += 1
            continue
        res.track_max("max_eps_over_bound", rep.epsilon_observed / rep.epsilon_bound)
        res.record(rep.passed, **_case(n, d, k, t, seed, eps=rep.epsilon_observed, bound=rep.epsilon_bound))
    return res


def _spectrum_suite(ws: Workspace) -> list[CheckResult]:
    kinds = ws.cfg.kind
    out = []
    if kinds in (None, "gp"):
        out.append(check_spectrum_gp(ws))
    if kinds in (None, "sgp"):
        out.append(check_spectrum_sgp(ws))
    if kinds in ("bgp", "bgp_template"):
        out.append(check_bgp_third(ws))
    return out


SUITE_CHECKS = {
    "spectrum": _spectrum_suite,
    "bgp-third": check_bgp_third,
    "tensor": check_tensor,
    "bounds": check_bounds,
    "degrees": check_degrees,
    "identity": check_identity,
    "walks": check_walks,
    "cospectral": check_cospectral,
    "mixing": check_mixing,
    "application": check_application,
}


def _as_list(x) -> list[CheckResult]:
    return x if isinstance(x, list) else [x]


def run(cfg: RunConfig) -> tuple[dict, Workspace]:
    """Run the configured suite(s); returns the report dict and the workspace."""
    ws = Workspace(cfg)
    names = list(SUITE_CHECKS) if cfg.suite == "all" else [cfg.suite]
    fns = [SUITE_CHECKS[name] for name in names]
    if cfg.jobs > 1 and len(fns) > 1:
        with ThreadPoolExecutor(cfg.jobs) as pool:
            batches = list(pool.map(lambda f: f(ws), fns))
    else:
        batches = [f(ws) for f in fns]
    checks = [c for batch in batches for c in _as_list(batch)]
    total_cases = sum(c.cases for c in checks)
    failed = [c.name for c in checks if c.status == FAIL]
    report = {
        "tool": "threshprod",
        "version": __version__,
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "checks": [c.to_dict() for c in checks],
        "summary": {
            "passed": not failed and total_cases > 0,
            "checks": len(checks),
            "cases": total_cases,
            "failed": failed,
            "inconclusive": [c.name for c in checks if c.status == INCONCLUSIVE],
        },
    }
    return report, ws


def _clean(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x) or math.isnan(x):
            return str(x)
        return float(f"{x:.12g}")
    if isinstance(obj, Fraction):
        return _num(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return str(obj)


def render(report: dict) -> str:
    return json.dumps(_clean(report), indent=2) + "\n"


def render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


__all__ = ["CheckResult", "Workspace", "run", "render", "render_csv", "BudgetExceeded"]
