"""Threshold graph products built by explicit tuple enumeration.

Product vertices are k-tuples of base vertices listed in lexicographic order
of base index; with the bipartite block convention this puts X before Y in
every coordinate, which is the row order of the Kronecker construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from math import comb

import numpy as np

from .eigen import DEFAULT_CAP
from .errors import CapExceeded, LengthMismatch, NotRegular
from .graphs import BipartiteRegularGraph, RegularGraph, complete_bipartite_matrix, validate

KINDS = ("gp", "bgp", "bgp_template", "sgp")


@dataclass(frozen=True)
class Template:
    """Side pattern in {X, Y}^k for mixed tuples."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        syms = tuple(self.symbols)
        if len(syms) < 1:
            raise ValueError("template length must be >= 1")
        if any(s not in ("X", "Y") for s in syms):
            raise ValueError(f"template symbols must be X or Y, got {syms}")
        object.__setattr__(self, "symbols", syms)

    @classmethod
    def parse(cls, text: str) -> "Template":
        return cls(tuple(text.strip().upper()))

    @classmethod
    def all_x(cls, k: int) -> "Template":
        return cls(("X",) * k)

    def __str__(self) -> str:
        return "".join(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def k(self) -> int:
        return len(self.symbols)

    @property
    def count_x(self) -> int:
        return self.symbols.count("X")

    def complement(self) -> "Template":
        return Template(tuple("Y" if s == "X" else "X" for s in self.symbols))

    def canonical(self) -> "Template":
        """Representative of the {τ, τᶜ} class: the one starting with X."""
        return self if self.symbols[0] == "X" else self.complement()

    def code(self) -> int:
        """Bitmask with bit (k-1-i) set when coordinate i is on the Y side."""
        return reduce(lambda acc, s: (acc << 1) | (s == "Y"), self.symbols, 0)


def template_classes(k: int) -> list[Template]:
    """One template per complement pair, X-first, in lexicographic order."""
    return [Template(("X",) + rest) for rest in itertools.product("XY", repeat=k - 1)]


@dataclass(frozen=True, eq=False)
class ProductGraph:
    kind: str
    k: int
    t: int
    base: RegularGraph
    vertices: np.ndarray
    adj: np.ndarray
    template: Template | None = None

    def __post_init__(self):
        for name in ("vertices", "adj"):
            arr = getattr(self, name)
            arr.setflags(write=False)

    @property
    def N(self) -> int:
        return self.adj.shape[0]

    @property
    def is_bipartite_block(self) -> bool:
        """True when the first N/2 vertices form one side (BGP, template products)."""
        return self.kind in ("bgp", "bgp_template")

    @property
    def n(self) -> int:
        return self.N

    @property
    def bipartite(self) -> bool:
        return self.is_bipartite_block

    @property
    def d(self) -> int | None:
        """Common degree, or None when the product is not regular."""
        deg = self.degrees()
        return int(deg[0]) if len(deg) and np.all(deg == deg[0]) else None

    def edges(self) -> list[tuple[int, int]]:
        us, vs = np.nonzero(np.triu(self.adj, 1))
        return [(int(u), int(v)) for u, v in zip(us, vs)]

    def degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1)

    def degree(self) -> int:
        """Audited common degree; raises NotRegular if there is none."""
        deg = self.degrees()
        off = np.flatnonzero(deg != deg[0])
        if len(off):
            raise NotRegular(int(off[0]), int(deg[off[0]]), int(deg[0]))
        return int(deg[0])

    def formula_degree(self) -> int | None:
        """d1 or d2 from the base parameters; None for an irregular base."""
        n, d = self.base.n, self.base.d
        if d is None:
            return None
        if self.kind == "gp":
            return degree_gp(n, d, self.k, self.t)
        return degree_bgp(n, d, self.k, self.t)

    def matrix(self, dtype=np.int64) -> np.ndarray:
        return self.adj.astype(dtype)

    def as_graph(self) -> RegularGraph:
        return validate(self.adj, bipartite=self.is_bipartite_block)

    def header(self) -> str:
        seed = "-" if self.base.seed is None else str(self.base.seed)
        tau = f" tau={self.template}" if self.template is not None else ""
        return f"{self.kind} {self.k} {self.t} {self.base.base_hash()} {seed}{tau}"

    def index_of(self, tup) -> int:
        hits = np.flatnonzero(np.all(self.vertices == np.asarray(tup), axis=1))
        if not len(hits):
            raise KeyError(tup)
        return int(hits[0])


def _check_params(k: int, t: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 1 <= t <= k:
        raise ValueError(f"need 1 <= t <= k, got k={k}, t={t}")


def _check_cap(size: int, cap: int) -> None:
    if size > cap:
        raise CapExceeded(f"product has {size} vertices, cap is {cap}")


def _tuples(choices) -> np.ndarray:
    rows = list(itertools.product(*choices))
    return np.array(rows, dtype=np.int64).reshape(len(rows), len(choices))


def _match_counts(a: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """cnt[i, j] = number of coordinates s with (left[i,s], right[j,s]) an edge."""
    cnt = np.zeros((len(left), len(right)), dtype=np.int32)
    for s in range(left.shape[1]):
        cnt += a[np.ix_(left[:, s], right[:, s])]
    return cnt


def coordinate_edge_count(a, b, g: RegularGraph) -> int:
    """Number of indices i where (a_i, b_i) is an edge of g."""
    if len(a) != len(b):
        raise LengthMismatch(f"tuple lengths differ: {len(a)} vs {len(b)}")
    return sum(1 for x, y in zip(a, b) if g.adj[x, y])


def _block_bipartite(block: np.ndarray) -> np.ndarray:
    m1, m2 = block.shape
    adj = np.zeros((m1 + m2, m1 + m2), dtype=bool)
    adj[:m1, m1:] = block
    adj[m1:, :m1] = block.T
    return adj


def gp(g: RegularGraph, k: int, t: int, cap: int = DEFAULT_CAP) -> ProductGraph:
    """GP_{k,t}: tuples adjacent iff at least t coordinates are base edges."""
    _check_params(k, t)
    _check_cap(g.n**k, cap)
    verts = _tuples([range(g.n)] * k)
    adj = _match_counts(g.adj, verts, verts) >= t
    # coordinate count of (x, x) is 0 on a simple base, so no loops for t >= 1
    assert not adj.diagonal().any()
    return ProductGraph("gp", k, t, g, verts, adj)


def bgp_template(
    g: BipartiteRegularGraph,
    k: int,
    t: int,
    tau: Template,
    cap: int = DEFAULT_CAP,
) -> ProductGraph:
    """Product on V_τ ∪ V_τᶜ, edges between the two blocks at threshold t."""
    _check_params(k, t)
    if tau.k != k:
        raise LengthMismatch(f"template length {tau.k} != k={k}")
    h = g.half
    _check_cap(2 * h**k, cap)
    x_side, y_side = range(0, h), range(h, g.n)
    left = _tuples([x_side if s == "X" else y_side for s in tau.symbols])
    right = _tuples([y_side if s == "X" else x_side for s in tau.symbols])
    block = _match_counts(g.adj, left, right) >= t
    kind = "bgp" if tau == Template.all_x(k) else "bgp_template"
    return ProductGraph(kind, k, t, g, np.vstack([left, right]), _block_bipartite(block), tau)


def bgp(g: BipartiteRegularGraph, k: int, t: int, cap: int = DEFAULT_CAP) -> ProductGraph:
    """BGP_{k,t} on X^k ∪ Y^k."""
    return bgp_template(g, k, t, Template.all_x(k), cap)


def template_codes(vertices: np.ndarray, half: int) -> np.ndarray:
    """Per-vertex template bitmask (bit set = Y side), matching Template.code."""
    k = vertices.shape[1]
    weights = 1 << np.arange(k - 1, -1, -1)
    return ((vertices >= half).astype(np.int64) * weights).sum(axis=1)


def sgp(g: BipartiteRegularGraph, k: int, t: int, cap: int = DEFAULT_CAP) -> ProductGraph:
    """SGP_{k,t} on (X ∪ Y)^k: complementary templates and >= t edge coordinates."""
    _check_params(k, t)
    _check_cap(g.n**k, cap)
    verts = _tuples([range(g.n)] * k)
    codes = template_codes(verts, g.half)
    full = (1 << k) - 1
    complementary = (codes[:, None] ^ codes[None, :]) == full
    adj = complementary & (_match_counts(g.adj, verts, verts) >= t)
    return ProductGraph("sgp", k, t, g, verts, adj)


def sgp_blocks(p: ProductGraph) -> list[tuple[Template, np.ndarray]]:
    """Vertex indices of each template-pair block of an SGP product."""
    codes = template_codes(p.vertices, p.base.half)
    full = (1 << p.k) - 1
    out = []
    for tau in template_classes(p.k):
        c = tau.code()
        out.append((tau, np.flatnonzero((codes == c) | (codes == full ^ c))))
    return out


def sgp_adjacency_tensor(g: BipartiteRegularGraph, k: int, t: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Â = Σ_b M_{1b} ⊗ … ⊗ M_{kb} over b ∈ {−1,1}^k with at least t ones.

    M is A where b_i = 1 and the bipartite complement C − A where b_i = −1.
    Returned as an integer matrix so stray multiplicities stay visible.
    """
    _check_params(k, t)
    _check_cap(g.n**k, cap)
    a = g.matrix()
    abar = complete_bipartite_matrix(g.n) - a
    total = np.zeros((g.n**k, g.n**k), dtype=np.int64)
    for b in itertools.product((1, -1), repeat=k):
        if b.count(1) < t:
            continue
        total += reduce(np.kron, [a if bi == 1 else abar for bi in b])
    return total


def build(g: RegularGraph, kind: str, k: int, t: int, tau: Template | None = None, cap: int = DEFAULT_CAP) -> ProductGraph:
    if kind == "gp":
        return gp(g, k, t, cap)
    if not getattr(g, "bipartite", False):
        raise ValueError(f"{kind} needs a bipartite base graph")
    if kind == "bgp":
        return bgp(g, k, t, cap)
    if kind == "bgp_template":
        if tau is None:
            raise ValueError("bgp_template needs a template")
        return bgp_template(g, k, t, tau, cap)
    if kind == "sgp":
        return sgp(g, k, t, cap)
    raise ValueError(f"unknown product kind {kind!r}; expected one of {KINDS}")


def degree_gp(n: int, d: int, k: int, t: int) -> int:
    """d1 = Σ_{t'=t}^{k} C(k,t') d^{t'} (n−d)^{k−t'}."""
    return sum(comb(k, s) * d**s * (n - d) ** (k - s) for s in range(t, k + 1))


def degree_bgp(n: int, d: int, k: int, t: int) -> int:
    """d2 = Σ_{t'=t}^{k} C(k,t') d^{t'} (n/2−d)^{k−t'}."""
    if n % 2:
        raise ValueError(f"bipartite base needs even n, got {n}")
    h = n // 2
    return sum(comb(k, s) * d**s * (h - d) ** (k - s) for s in range(t, k + 1))
