"""Template-constrained closed walks, trace certification of cospectrality,
and the template-family experiment.

Walk counts and traces are exact. Small products use int64 (or Python ints
when int64 could overflow). Long trace sequences are computed modulo a set
of primes with float64 BLAS products, which is exact while N·p² < 2⁵³, and
then lifted by the Chinese remainder theorem.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .eigen import DEFAULT_CAP, eigenvalues
from .errors import BudgetExceeded, SizeMismatch
from .product import ProductGraph, Template, bgp_template, template_classes

X, Y = "X", "Y"
COSPECTRAL = "COSPECTRAL"
NOT_COSPECTRAL = "NOT_COSPECTRAL"
NOT_ISOMORPHIC = "NOT_ISOMORPHIC"
INCONCLUSIVE = "INCONCLUSIVE"

ENUM_MAX_LENGTH = 8
ENUM_BUDGET = 5_000_000
EXACT_FULL_MAX = 128
PARTIAL_TRACE_LENGTH = 50
SPECTRUM_TOL = 1e-6
MULTISET_BUDGET = 2_000_000


@dataclass(frozen=True)
class WalkPattern:
    """u ∈ {0,1}^ℓ: step i must be an edge when u_i = 1, a bipartite non-edge when 0."""

    u: tuple[int, ...]

    def __post_init__(self):
        u = tuple(int(x) for x in self.u)
        if len(u) < 1:
            raise ValueError("walk pattern needs length >= 1")
        if any(x not in (0, 1) for x in u):
            raise ValueError(f"walk pattern entries must be 0/1, got {u}")
        object.__setattr__(self, "u", u)

    def __len__(self) -> int:
        return len(self.u)

    def __str__(self) -> str:
        return "".join(map(str, self.u))

    @classmethod
    def all(cls, ell: int):
        for u in itertools.product((0, 1), repeat=ell):
            yield cls(u)


@dataclass(frozen=True)
class ConnectivityVector:
    """Per-step count of coordinates that are base edges along a closed alternating sequence."""

    c: tuple[int, ...]
    k: int

    def __post_init__(self):
        c = tuple(int(x) for x in self.c)
        if any(x < 0 or x > self.k for x in c):
            raise ValueError(f"connectivity entries must lie in [0, {self.k}], got {c}")
        object.__setattr__(self, "c", c)

    def is_walk(self, t: int) -> bool:
        return all(x >= t for x in self.c)


def _pattern(u) -> WalkPattern:
    return u if isinstance(u, WalkPattern) else WalkPattern(tuple(u))


def _parts(g, x_mask=None) -> tuple[np.ndarray, np.ndarray]:
    """Adjacency and first-side mask; arbitrary bipartitions are allowed for controls."""
    a = np.asarray(getattr(g, "adj", g)).astype(bool)
    if x_mask is None:
        x_mask = getattr(g, "x_mask", None)
        x_mask = x_mask() if callable(x_mask) else x_mask
    if x_mask is None:
        x_mask = np.arange(a.shape[0]) < a.shape[0] // 2
    x_mask = np.asarray(x_mask, dtype=bool)
    if x_mask.shape != (a.shape[0],):
        raise ValueError("x_mask length must equal the vertex count")
    if (a & (x_mask[:, None] == x_mask[None, :])).any():
        raise ValueError("graph has an edge inside one side of the given bipartition")
    return a, x_mask


def _bipartite_complement(a: np.ndarray, x_mask: np.ndarray) -> np.ndarray:
    return (x_mask[:, None] != x_mask[None, :]) & ~a


def count_walks_trace(g, u, side: str = X, x_mask=None) -> int:
    """tr(I_side · Π_i (u_i A + (1−u_i) Ā)) in exact integer arithmetic."""
    u = _pattern(u)
    a, xm = _parts(g, x_mask)
    start = np.flatnonzero(xm if side == X else ~xm)
    n = a.shape[0]
    factors = {1: a.astype(np.int64), 0: _bipartite_complement(a, xm).astype(np.int64)}
    # every entry of the running product is at most n^ℓ
    dtype = np.int64 if len(u) * math.log2(max(n, 2)) < 62 else object
    rows = np.eye(n, dtype=np.int64)[start].astype(dtype)
    for ui in u.u:
        rows = rows @ factors[ui].astype(dtype)
    return int(sum(rows[j, v] for j, v in enumerate(start)))


def count_walks_enumerate(
    g,
    u,
    side: str = X,
    x_mask=None,
    max_length: int = ENUM_MAX_LENGTH,
    budget: int = ENUM_BUDGET,
) -> int:
    """Depth-first count of closed sequences (v₁…v_ℓ, v₁) obeying u, starting on ``side``."""
    u = _pattern(u)
    if len(u) > max_length:
        raise BudgetExceeded(f"walk length {len(u)} exceeds enumeration limit {max_length}")
    a, xm = _parts(g, x_mask)
    n = a.shape[0]
    ell = len(u)
    if ell % 2:
        return 0
    # step options: edges for u_i = 1, cross-side non-edges for u_i = 0
    edge_nb = [np.flatnonzero(a[v]).tolist() for v in range(n)]
    non_nb = [np.flatnonzero((xm != xm[v]) & ~a[v]).tolist() for v in range(n)]
    options = (non_nb, edge_nb)
    visited = 0
    total = 0
    starts = np.flatnonzero(xm if side == X else ~xm).tolist()
    for v0 in starts:
        stack = [(v0, 0)]
        while stack:
            v, i = stack.pop()
            visited += 1
            if visited > budget:
                raise BudgetExceeded(f"walk enumeration exceeded {budget} states")
            nbrs = options[u.u[i]][v]
            if i == ell - 1:
                total += v0 in nbrs
                continue
            stack.extend((w, i + 1) for w in nbrs)
    return total


@dataclass
class WalkLemmaReport:
    ell_max: int
    patterns_checked: int
    counterexample: tuple | None = None
    method_disagreements: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.counterexample is None

    @property
    def methods_agree(self) -> bool:
        return not self.method_disagreements


def verify_walk_lemma(g, ell_max: int = 6, x_mask=None, enumerate_check: bool = True, lengths=None) -> WalkLemmaReport:
    """Check |Ψ_{u,X}| = |Ψ_{u,Y}| for every u of each length ≤ ell_max.

    With ``enumerate_check`` every trace count is also recomputed by DFS.
    The first (u, count_X, count_Y) with unequal counts is kept.
    """
    lengths = range(1, ell_max + 1) if lengths is None else lengths
    report = WalkLemmaReport(ell_max, 0)
    for ell in lengths:
        for u in WalkPattern.all(ell):
            cx = count_walks_trace(g, u, X, x_mask)
            cy = count_walks_trace(g, u, Y, x_mask)
            report.patterns_checked += 1
            if enumerate_check:
                ex = count_walks_enumerate(g, u, X, x_mask)
                ey = count_walks_enumerate(g, u, Y, x_mask)
                if (ex, ey) != (cx, cy):
                    report.method_disagreements.append((str(u), (cx, cy), (ex, ey)))
            if cx != cy and report.counterexample is None:
                report.counterexample = (str(u), cx, cy)
    return report


def connectivity_multiset(
    g,
    k: int,
    t: int,
    tau: Template,
    ell: int,
    budget: int = MULTISET_BUDGET,
) -> Counter:
    """Counter of connectivity vectors over closed sequences alternating V_τ, V_τᶜ.

    Repeated vertices are allowed. The multiset does not depend on t; t only
    decides which vectors are walks of the product (``ConnectivityVector.is_walk``).
    """
    if isinstance(tau, str):
        tau = Template.parse(tau)
    if tau.k != k:
        raise ValueError(f"template length {tau.k} != k={k}")
    if not 1 <= t <= k:
        raise ValueError(f"need 1 <= t <= k, got k={k}, t={t}")
    if ell % 2:
        return Counter()
    h = g.half
    m = h**k
    if m**ell > budget:
        raise BudgetExceeded(f"{m}^{ell} sequences exceed the budget {budget}")
    x_side, y_side = range(0, h), range(h, g.n)
    left = np.array(list(itertools.product(*[x_side if s == X else y_side for s in tau.symbols]))).reshape(m, k)
    right = np.array(list(itertools.product(*[y_side if s == X else x_side for s in tau.symbols]))).reshape(m, k)
    cnt = np.zeros((m, m), dtype=np.int64)
    for s in range(k):
        cnt += g.adj[np.ix_(left[:, s], right[:, s])]
    # positions alternate left, right, left, ...; step i joins position i and i+1 (cyclically)
    idx = np.indices((m,) * ell).reshape(ell, -1)
    cols = []
    for i in range(ell):
        p, q = idx[i], idx[(i + 1) % ell]
        cols.append(cnt[p, q] if i % 2 == 0 else cnt[q, p])
    vecs = np.stack(cols, axis=1)
    uniq, counts = np.unique(vecs, axis=0, return_counts=True)
    return Counter({ConnectivityVector(tuple(int(x) for x in row), k): int(c) for row, c in zip(uniq, counts)})


# ---------------------------------------------------------------- exact traces


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in range(2, math.isqrt(p) + 1):
        if p % q == 0:
            return False
    return True


def _primes_below(limit: int, count: int) -> list[int]:
    out = []
    p = limit - 1
    while len(out) < count and p > 2:
        if _is_prime(p):
            out.append(p)
        p -= 1
    if len(out) < count:
        raise BudgetExceeded("ran out of CRT primes")
    return out


def _block_gram(a: np.ndarray):
    """For [[0, B], [Bᵀ, 0]] return B Bᵀ, else None."""
    n = a.shape[0]
    if n % 2:
        return None
    h = n // 2
    if a[:h, :h].any() or a[h:, h:].any():
        return None
    b = a[:h, h:].astype(np.int64)
    return b @ b.T


def _power_traces_mod(m: np.ndarray, top: int, p: int) -> list[int]:
    """tr(M^j) mod p for j = 1..top; M^j = M^a M^b with a, b ≤ ⌈top/2⌉."""
    half = (top + 1) // 2
    mf = (m % p).astype(float)
    powers = [None, (m % p).astype(np.int64)]
    cur = mf
    for _ in range(2, half + 1):
        cur = np.fmod(cur @ mf, p)
        powers.append(cur.astype(np.int64))
    out = []
    for j in range(1, top + 1):
        a = (j + 1) // 2
        b = j - a
        if b == 0:
            out.append(int(np.trace(powers[a])) % p)
        else:
            # M is symmetric, so tr(M^a M^b) = Σ (M^a ∘ M^b)
            out.append(int(np.sum(powers[a] * powers[b] % p)) % p)
    return out


def exact_traces(adjacency, ell_max: int) -> list[int]:
    """[tr(A^1), …, tr(A^ell_max)] as exact Python integers."""
    a = np.asarray(getattr(adjacency, "adj", adjacency)).astype(np.int64)
    n = a.shape[0]
    if ell_max < 1 or n == 0:
        return []
    gram = _block_gram(a)
    if gram is not None:
        m, top, scale = gram, ell_max // 2, 2
    else:
        m, top, scale = a, ell_max, 1
    if top == 0:
        return [0] * ell_max
    size = m.shape[0]
    row_max = max(int(np.abs(m).sum(axis=1).max()), 1)
    bits = math.log2(size) + top * math.log2(row_max) + 2
    p_limit = int(math.isqrt(int(2**53 // max(size, 1))))
    p_limit = min(p_limit, 1 << 26)
    primes = _primes_below(p_limit, int(bits // math.log2(p_limit)) + 2)
    residues = [_power_traces_mod(m, top, p) for p in primes]
    modulus = math.prod(primes)
    values = []
    for j in range(top):
        acc = 0
        for p, res in zip(primes, residues):
            q = modulus // p
            acc += res[j] * q * pow(q, -1, p)
        values.append(acc % modulus)
    if gram is None:
        return values
    out = []
    for ell in range(1, ell_max + 1):
        out.append(0 if ell % 2 else scale * values[ell // 2 - 1])
    return out


@dataclass(frozen=True, eq=False)
class TraceSignature:
    """Per-graph data for certification: exact traces and a float spectrum."""

    n: int
    traces: tuple[int, ...]
    spectrum: np.ndarray
    full: bool

    @classmethod
    def of(cls, graph, exact_max: int = EXACT_FULL_MAX, partial_ell: int = PARTIAL_TRACE_LENGTH, cap: int = DEFAULT_CAP):
        a = np.asarray(getattr(graph, "adj", graph))
        n = a.shape[0]
        full = n <= exact_max
        ell = n if full else min(n, partial_ell)
        spec = eigenvalues(a, cap=cap).values
        return cls(n, tuple(exact_traces(a, ell)), spec, full)


@dataclass
class CospectralVerdict:
    verdict: str
    method: str
    ell_checked: int
    first_mismatch: int | None
    spectral_deviation: float
    consistent: bool
    traces1: tuple = field(repr=False, default=())
    traces2: tuple = field(repr=False, default=())

    @property
    def cospectral(self) -> bool:
        return self.verdict == COSPECTRAL

    def to_dict(self, show: int = 8) -> dict:
        return {
            "verdict": self.verdict,
            "method": self.method,
            "ell_checked": self.ell_checked,
            "first_mismatch": self.first_mismatch,
            "spectral_deviation": float(f"{self.spectral_deviation:.12g}"),
            "consistent": self.consistent,
            "traces": [str(x) for x in self.traces1[:show]],
        }


def _compare(s1: TraceSignature, s2: TraceSignature, tol: float = SPECTRUM_TOL) -> CospectralVerdict:
    if s1.n != s2.n:
        raise SizeMismatch(f"vertex counts differ: {s1.n} vs {s2.n}")
    ell = min(len(s1.traces), len(s2.traces))
    mismatch = next((i + 1 for i in range(ell) if s1.traces[i] != s2.traces[i]), None)
    dev = float(np.max(np.abs(s1.spectrum - s2.spectrum))) if s1.n else 0.0
    spectra_agree = dev <= tol
    full = s1.full and s2.full and ell == s1.n
    if full:
        method = f"exact traces l=1..{ell}"
        verdict = COSPECTRAL if mismatch is None else NOT_COSPECTRAL
    else:
        method = f"exact traces l=1..{ell} + float spectrum tol {tol:g}"
        verdict = COSPECTRAL if mismatch is None and spectra_agree else NOT_COSPECTRAL
    consistent = (mismatch is None) == spectra_agree or (mismatch is None and not full)
    return CospectralVerdict(verdict, method, ell, mismatch, dev, consistent, s1.traces, s2.traces)


def cospectral_certify(
    g1,
    g2,
    exact_max: int = EXACT_FULL_MAX,
    partial_ell: int = PARTIAL_TRACE_LENGTH,
    tol: float = SPECTRUM_TOL,
) -> CospectralVerdict:
    """Equal traces of A^ℓ for ℓ = 1..N certify equal spectra (Newton's identities).

    Above ``exact_max`` vertices only ℓ ≤ partial_ell is done exactly and the
    float spectra must agree within ``tol``; ``method`` says which route ran.
    """
    n1 = np.asarray(getattr(g1, "adj", g1)).shape[0]
    n2 = np.asarray(getattr(g2, "adj", g2)).shape[0]
    if n1 != n2:
        raise SizeMismatch(f"vertex counts differ: {n1} vs {n2}")
    return _compare(TraceSignature.of(g1, exact_max, partial_ell), TraceSignature.of(g2, exact_max, partial_ell), tol)


@dataclass
class Witness:
    status: str
    diag1: list[int]
    diag2: list[int]

    @property
    def found(self) -> bool:
        return self.status == NOT_ISOMORPHIC

    def to_dict(self) -> dict:
        return {"status": self.status, "diag1": self.diag1, "diag2": self.diag2} if self.found else {"status": self.status}


def closed_four_walks(graph) -> np.ndarray:
    """diag(A⁴) exactly: (A⁴)_vv = Σ_w (A²)_vw²."""
    a = np.asarray(getattr(graph, "adj", graph)).astype(np.int64)
    a2 = a @ a
    return (a2 * a2).sum(axis=1)


def nonisomorphism_witness(g1, g2) -> Witness:
    d1 = np.sort(closed_four_walks(g1))
    d2 = np.sort(closed_four_walks(g2))
    if len(d1) != len(d2):
        raise SizeMismatch(f"vertex counts differ: {len(d1)} vs {len(d2)}")
    if np.array_equal(d1, d2):
        return Witness(INCONCLUSIVE, [], [])
    return Witness(NOT_ISOMORPHIC, d1.tolist(), d2.tolist())


@dataclass
class FamilyReport:
    k: int
    t: int
    members: list[tuple[Template, ProductGraph]]
    certificates: dict[tuple[str, str], CospectralVerdict]
    witnesses: dict[tuple[str, str], Witness]

    @property
    def all_cospectral(self) -> bool:
        return all(v.cospectral for v in self.certificates.values())

    @property
    def witness_pairs(self) -> list[tuple[str, str]]:
        return [pair for pair, w in self.witnesses.items() if w.found]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "t": self.t,
            "templates": [str(tau) for tau, _ in self.members],
            "all_cospectral": self.all_cospectral,
            "pairs": [
                {
                    "pair": list(pair),
                    "certificate": self.certificates[pair].to_dict(),
                    "witness": self.witnesses[pair].to_dict(),
                }
                for pair in self.certificates
            ],
        }


def cospectral_family(
    g,
    k: int,
    t: int,
    cap: int = DEFAULT_CAP,
    exact_max: int = EXACT_FULL_MAX,
    partial_ell: int = PARTIAL_TRACE_LENGTH,
    jobs: int = 1,
) -> FamilyReport:
    """Build one product per template class and certify every pair cospectral."""
    templates = template_classes(k)
    if len(templates) * 2 * g.half**k > 8 * cap:
        raise BudgetExceeded(f"{len(templates)} template products of size {2 * g.half**k} exceed the budget")
    members = [(tau, bgp_template(g, k, t, tau, cap)) for tau in templates]
    sign = lambda p: TraceSignature.of(p, exact_max, partial_ell, cap)  # noqa: E731
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            sigs = list(pool.map(sign, [p for _, p in members]))
    else:
        sigs = [sign(p) for _, p in members]
    certificates, witnesses = {}, {}
    for i, j in itertools.combinations(range(len(members)), 2):
        pair = (str(members[i][0]), str(members[j][0]))
        certificates[pair] = _compare(sigs[i], sigs[j])
        witnesses[pair] = nonisomorphism_witness(members[i][1], members[j][1])
    return FamilyReport(k, t, members, certificates, witnesses)
