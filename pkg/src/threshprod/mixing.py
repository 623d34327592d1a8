"""Edge discrepancy between vertex sets: e(S,T) against μ_{S,T}.

e(S,T) counts ordered pairs (u, v) with u ∈ S, v ∈ T and uv an edge, so an
edge inside S ∩ T counts twice. μ is kept as an exact fraction; comparisons
against the (usually irrational) bound use a 1e-9 relative slack.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import IndexOutOfRange, PremiseNotMet

SLACK = 1e-9


def _adjacency(graph) -> np.ndarray:
    return np.asarray(getattr(graph, "adj", graph))


def _mask(s, n: int) -> np.ndarray:
    arr = np.asarray(s)
    if arr.dtype == bool:
        if arr.shape != (n,):
            raise IndexOutOfRange(f"mask has shape {arr.shape}, expected ({n},)")
        return arr
    arr = arr.astype(np.int64).reshape(-1)
    if len(arr) and (arr.min() < 0 or arr.max() >= n):
        raise IndexOutOfRange(f"vertex index outside 0..{n - 1}")
    m = np.zeros(n, dtype=bool)
    m[arr] = True
    return m


def edge_count(graph, S, T) -> int:
    """e(S,T) with the ordered-pair convention."""
    a = _adjacency(graph)
    n = a.shape[0]
    s = _mask(S, n).astype(np.int64)
    t = _mask(T, n).astype(np.int64)
    return int(s @ a.astype(np.int64) @ t)


def expected_edges(D: int, N: int, size_s: int, size_t: int, bipartite: bool = False) -> Fraction:
    """μ = D|S||T|/N, or 2D|S||T|/N for sets on opposite sides of a bipartite graph."""
    limit = N // 2 if bipartite else N
    if not (0 <= size_s <= limit and 0 <= size_t <= limit):
        raise ValueError(f"set sizes ({size_s}, {size_t}) exceed {limit}")
    return Fraction((2 if bipartite else 1) * D * size_s * size_t, N)


@dataclass(frozen=True)
class DiscrepancyReport:
    size_s: int
    size_t: int
    e_st: int
    mu_st: Fraction
    bound: float
    discrepancy: float
    ratio: float
    passed: bool

    def row(self) -> dict:
        return {
            "size_s": self.size_s,
            "size_t": self.size_t,
            "e": self.e_st,
            "mu": str(self.mu_st),
            "bound": f"{self.bound:.12g}",
            "ratio": f"{self.ratio:.12g}",
            "pass": int(self.passed),
        }


def _report(e: int, size_s: int, size_t: int, D: int, N: int, bipartite: bool, lam: float) -> DiscrepancyReport:
    mu = Fraction((2 if bipartite else 1) * D * size_s * size_t, N)
    disc = abs(Fraction(e) - mu)
    bound = float(lam) * math.sqrt(size_s * size_t)
    if bound > 0:
        ratio = float(disc) / bound
    else:
        ratio = 0.0 if disc == 0 else math.inf
    passed = disc == 0 or float(disc) <= bound * (1 + SLACK)
    return DiscrepancyReport(size_s, size_t, e, mu, bound, float(disc), ratio, passed)


def _is_bipartite_block(graph) -> bool:
    return bool(getattr(graph, "is_bipartite_block", False))


def _regular_degree(a: np.ndarray) -> int:
    deg = a.sum(axis=1)
    if len(deg) and np.any(deg != deg[0]):
        raise ValueError("discrepancy checks need a regular graph")
    return int(deg[0]) if len(deg) else 0


def eml_check(product, S, T, lambda_value: float, bipartite: bool | None = None) -> DiscrepancyReport:
    """Compare |e(S,T) − μ| with lambda_value·√(|S||T|).

    ``lambda_value`` is either the product's own λ or a corollary bound. In
    bipartite mode S must lie on the first side and T on the second.
    """
    a = _adjacency(product)
    N = a.shape[0]
    if bipartite is None:
        bipartite = _is_bipartite_block(product)
    s, t = _mask(S, N), _mask(T, N)
    if bipartite:
        half = N // 2
        if s[half:].any() or t[:half].any():
            raise ValueError("bipartite mode needs S on the first side and T on the second")
    D = _regular_degree(a)
    e = edge_count(a, s, t)
    return _report(e, int(s.sum()), int(t.sum()), D, N, bipartite, lambda_value)


def _structured_pairs(a: np.ndarray, bipartite: bool, vertices=None):
    """Neighbourhood- and block-shaped candidates; random sets rarely stress the bound."""
    N = a.shape[0]
    half = N // 2
    probe = sorted({0, N // 3, half - 1 if bipartite else N // 2, N - 1})
    out = []
    for v in probe:
        nb = a[v].copy()
        single = np.zeros(N, dtype=bool)
        single[v] = True
        if not bipartite:
            out.append((single, nb))
            out.append((nb, nb))
            out.append((nb, ~nb))
            out.append((nb | single, nb | single))
        else:
            x = v if v < half else int(np.flatnonzero(a[v])[0]) if a[v].any() else 0
            nbx = a[x].copy()  # ⊆ Y
            out.append((_only(single if v < half else _point(N, x), True, half), nbx))
            second = a[nbx].any(axis=0)  # X vertices two steps away
            out.append((_only(second, True, half), nbx))
            out.append((_only(second, True, half), _only(~nbx, False, half)))
    if vertices is not None:
        first = vertices[:, 0]
        base_values = np.unique(first)
        for val in base_values[:2]:
            block = first == val
            if bipartite:
                out.append((_only(block, True, half), _only(a[block].any(axis=0), False, half)))
            else:
                out.append((block, a[block].any(axis=0)))
                out.append((block, block))
    return [(s, t) for s, t in out if s.any() and t.any()]


def _point(N: int, v: int) -> np.ndarray:
    m = np.zeros(N, dtype=bool)
    m[v] = True
    return m


def _only(mask: np.ndarray, first_side: bool, half: int) -> np.ndarray:
    m = mask.copy()
    if first_side:
        m[half:] = False
    else:
        m[:half] = False
    return m


def sample_pairs(N: int, samples: int, seed: int, bipartite: bool = False):
    """Uniform random (S, T) masks; each sample draws from its own spawned stream."""
    half = N // 2
    pool_s = np.arange(half) if bipartite else np.arange(N)
    pool_t = np.arange(half, N) if bipartite else np.arange(N)
    children = np.random.SeedSequence(seed).spawn(samples)
    S = np.zeros((samples, N), dtype=bool)
    T = np.zeros((samples, N), dtype=bool)
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        ks = int(rng.integers(1, len(pool_s) + 1))
        kt = int(rng.integers(1, len(pool_t) + 1))
        S[i, rng.choice(pool_s, ks, replace=False)] = True
        T[i, rng.choice(pool_t, kt, replace=False)] = True
    return S, T


@dataclass
class ScanResult:
    lambda_value: float
    reports: list[DiscrepancyReport] = field(repr=False)
    max_ratio: float = 0.0
    max_normalized: float = 0.0
    tightest: DiscrepancyReport | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def failures(self) -> int:
        return sum(not r.passed for r in self.reports)

    def to_csv(self) -> str:
        return reports_to_csv(self.reports)


def batch_reports(product, S: np.ndarray, T: np.ndarray, lambda_value: float, bipartite: bool) -> list[DiscrepancyReport]:
    a = _adjacency(product)
    N = a.shape[0]
    D = _regular_degree(a)
    e = np.rint(((S.astype(float) @ a.astype(float)) * T).sum(axis=1)).astype(np.int64)
    ss, ts = S.sum(axis=1), T.sum(axis=1)
    return [_report(int(e[i]), int(ss[i]), int(ts[i]), D, N, bipartite, lambda_value) for i in range(len(e))]


def jumbledness_scan(
    product,
    lambda_value: float,
    samples: int = 1000,
    seed: int = 0,
    bipartite: bool | None = None,
    structured: bool = True,
) -> ScanResult:
    """Max of |e−μ|/√(|S||T|) over sampled pairs; a pass means it stays ≤ lambda_value."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    a = _adjacency(product)
    N = a.shape[0]
    if bipartite is None:
        bipartite = _is_bipartite_block(product)
    S, T = sample_pairs(N, samples, seed, bipartite)
    if structured:
        extra = _structured_pairs(a, bipartite, getattr(product, "vertices", None))
        if extra:
            S = np.vstack([S] + [s[None, :] for s, _ in extra])
            T = np.vstack([T] + [t[None, :] for _, t in extra])
    reports = batch_reports(a, S, T, lambda_value, bipartite)
    result = ScanResult(float(lambda_value), reports)
    best = -1.0
    for r in reports:
        norm = r.discrepancy / math.sqrt(r.size_s * r.size_t)
        if norm > best:
            best = norm
            result.tightest = r
    result.max_normalized = max(best, 0.0)
    result.max_ratio = max((r.ratio for r in reports), default=0.0)
    return result


@dataclass(frozen=True)
class RelativeErrorResult:
    xi: float
    set_size: int
    epsilon_observed: float
    epsilon_bound: float
    xi_premise: bool
    samples: int

    @property
    def passed(self) -> bool:
        return self.epsilon_observed <= self.epsilon_bound * (1 + SLACK)


def relative_error_report(
    product,
    xi: float,
    base_d: int,
    base_lambda: float,
    samples: int = 200,
    seed: int = 0,
) -> RelativeErrorResult:
    """Largest |e−μ|/μ over sampled pairs with |S| = |T| = round(ξN), against 2/(ξ√d).

    Needs an expander base (λ ≤ 2√d); otherwise PremiseNotMet is raised and
    nothing is checked.
    """
    if base_lambda > 2 * math.sqrt(base_d) + SLACK:
        raise PremiseNotMet(f"base λ={base_lambda:.6g} exceeds 2√d={2 * math.sqrt(base_d):.6g}")
    if not 0 < xi <= 1:
        raise ValueError("xi must lie in (0, 1]")
    a = _adjacency(product)
    N = a.shape[0]
    size = max(1, int(round(xi * N)))
    children = np.random.SeedSequence(seed).spawn(samples)
    S = np.zeros((samples, N), dtype=bool)
    T = np.zeros((samples, N), dtype=bool)
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        S[i, rng.choice(N, size, replace=False)] = True
        T[i, rng.choice(N, size, replace=False)] = True
    reports = batch_reports(a, S, T, 0.0, False)
    eps = max((float(abs(Fraction(r.e_st) - r.mu_st) / r.mu_st) for r in reports if r.mu_st), default=0.0)
    xi_ok = base_d <= 1 or xi >= math.log(base_d) / math.sqrt(base_d)
    # the bound is stated for |S| = ξN exactly; use the realised fraction after rounding
    realised = size / N
    return RelativeErrorResult(xi, size, eps, 2 / (realised * math.sqrt(base_d)), xi_ok, samples)


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, ["size_s", "size_t", "e", "mu", "bound", "ratio", "pass"], lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.row())
    return buf.getvalue()
