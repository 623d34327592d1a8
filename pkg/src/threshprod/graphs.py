"""Validated regular and bipartite-regular base graphs.

Bipartite graphs always use the block convention X = vertices 0..n/2-1,
Y = vertices n/2..n-1. Validation relabels inputs into that order when
needed and remembers the original labels.
"""

from __future__ import annotations

import hashlib
import io
import warnings
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .eigen import eigenvalues
from .errors import (
    InfeasibleDegree,
    NotBipartite,
    NotRegular,
    NotSimple,
    NotSymmetric,
    RetryBudgetExceeded,
    ValidationError,
)

DEFAULT_RETRIES = 100_000


class DegenerateGraphWarning(UserWarning):
    pass


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=bool)
    a.setflags(write=False)
    return a


class _AdjacencyView:
    """Read-only helpers shared by every graph type; needs ``self.adj``."""

    adj: np.ndarray

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    def matrix(self, dtype=np.int64) -> np.ndarray:
        return self.adj.astype(dtype)

    def degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1)

    def edges(self) -> list[tuple[int, int]]:
        us, vs = np.nonzero(np.triu(self.adj, 1))
        return [(int(u), int(v)) for u, v in zip(us, vs)]

    def neighbors(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u, v])

    def is_connected(self) -> bool:
        return _component_count(self.adj) == 1

    def base_hash(self) -> str:
        h = hashlib.sha256()
        h.update(str(self.n).encode())
        h.update(np.packbits(self.adj).tobytes())
        return h.hexdigest()[:12]

    def same_as(self, other) -> bool:
        return self.adj.shape == other.adj.shape and bool(np.array_equal(self.adj, other.adj))


class _BipartiteLayout:
    """X = first n/2 vertices, Y = the rest."""

    bipartite = True

    @property
    def half(self) -> int:
        return self.n // 2

    @property
    def x_mask(self) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        m[: self.half] = True
        return m

    @property
    def parts(self) -> tuple[range, range]:
        return range(0, self.half), range(self.half, self.n)

    def biadjacency(self) -> np.ndarray:
        """The X-by-Y block of the adjacency."""
        return self.adj[: self.half, self.half :]

    def complete_bipartite_matrix(self, dtype=np.int64) -> np.ndarray:
        return complete_bipartite_matrix(self.n, dtype)


@dataclass(frozen=True, eq=False)
class RegularGraph(_AdjacencyView):
    """Simple d-regular graph on vertices 0..n-1 (dense boolean adjacency)."""

    adj: np.ndarray
    d: int
    seed: int | None = None
    labels: tuple[int, ...] | None = field(default=None, repr=False)

    bipartite = False

    def __post_init__(self):
        object.__setattr__(self, "adj", _freeze(self.adj))

    @property
    def is_empty(self) -> bool:
        return self.d == 0

    def permuted(self, perm) -> "RegularGraph":
        """Relabelled copy: new vertex i is old vertex perm[i]."""
        perm = np.asarray(perm)
        return RegularGraph(self.adj[np.ix_(perm, perm)], self.d)


@dataclass(frozen=True, eq=False)
class BipartiteRegularGraph(_BipartiteLayout, RegularGraph):
    """d-regular bipartite graph with X = first n/2 vertices, Y = the rest."""


@dataclass(frozen=True, eq=False)
class BipartiteGraph(_BipartiteLayout, _AdjacencyView):
    """Bipartite graph with balanced sides whose degrees may differ (d is None).

    Used for small worked examples and non-regular controls; products accept
    it, but no degree formula applies.
    """

    adj: np.ndarray
    seed: int | None = None
    labels: tuple[int, ...] | None = field(default=None, repr=False)

    d = None

    def __post_init__(self):
        object.__setattr__(self, "adj", _freeze(self.adj))


def complete_bipartite_matrix(n: int, dtype=np.int64) -> np.ndarray:
    h = n // 2
    c = np.zeros((n, n), dtype=dtype)
    c[:h, h:] = 1
    c[h:, :h] = 1
    return c


def _component_count(adj: np.ndarray) -> int:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    count = 0
    for s in range(n):
        if seen[s]:
            continue
        count += 1
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for w in np.flatnonzero(adj[u] & ~seen):
                seen[w] = True
                stack.append(int(w))
    return count


def _two_coloring(adj: np.ndarray) -> np.ndarray:
    """BFS 2-coloring (0 = X side); raises NotBipartite with an odd cycle."""
    n = adj.shape[0]
    color = np.full(n, -1)
    parent = np.full(n, -1)
    depth = np.zeros(n, dtype=int)
    for s in range(n):
        if color[s] >= 0:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in np.flatnonzero(adj[u]):
                if color[w] < 0:
                    color[w] = 1 - color[u]
                    parent[w] = u
                    depth[w] = depth[u] + 1
                    queue.append(int(w))
                elif color[w] == color[u]:
                    raise NotBipartite(_odd_cycle(int(u), int(w), parent, depth))
    return color


def _odd_cycle(u: int, w: int, parent: np.ndarray, depth: np.ndarray) -> list[int]:
    left, right = [u], [w]
    a, b = u, w
    while depth[a] > depth[b]:
        a = int(parent[a])
        left.append(a)
    while depth[b] > depth[a]:
        b = int(parent[b])
        right.append(b)
    while a != b:
        a, b = int(parent[a]), int(parent[b])
        left.append(a)
        right.append(b)
    return left + right[::-1][1:]


def _as_bool_matrix(adjacency) -> np.ndarray:
    a = np.asarray(adjacency)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"adjacency must be square, got shape {a.shape}")
    if a.shape[0] == 0:
        raise ValidationError("graph has no vertices")
    if a.dtype != bool:
        if not np.all((a == 0) | (a == 1)):
            raise ValidationError("adjacency entries must be 0/1")
        a = a.astype(bool)
    return a


def validate(adjacency, bipartite: bool = False, parts=None, seed: int | None = None, regular: bool = True):
    """Check simplicity, symmetry and regularity; return a graph object.

    In bipartite mode ``parts`` optionally declares the X vertices; the result
    is relabelled so X comes first. Without ``parts`` an existing first-half /
    second-half split is kept, otherwise a two-coloring is searched for.
    ``regular=False`` (bipartite only) skips the degree check and returns a
    BipartiteGraph.
    """
    if not regular and not bipartite:
        raise ValueError("irregular graphs are only supported in bipartite mode")
    a = _as_bool_matrix(adjacency)
    n = a.shape[0]
    loops = np.flatnonzero(np.diag(a))
    if len(loops):
        raise NotSimple(int(loops[0]))
    bad = np.argwhere(a != a.T)
    if len(bad):
        raise NotSymmetric(int(bad[0][0]), int(bad[0][1]))
    deg = a.sum(axis=1)
    d = int(deg[0]) if n else 0
    off = np.flatnonzero(deg != d)
    if len(off) and regular:
        raise NotRegular(int(off[0]), int(deg[off[0]]), d)
    if not bipartite:
        return RegularGraph(a, d, seed)

    if n % 2:
        _two_coloring(a)
        raise NotBipartite(reason=f"odd vertex count {n} cannot split into equal parts")
    h = n // 2
    if parts is not None:
        xs = sorted(int(x) for x in parts)
        if len(set(xs)) != h or any(x < 0 or x >= n for x in xs):
            raise NotBipartite(reason=f"declared part must have {h} distinct vertices")
        xmask = np.zeros(n, dtype=bool)
        xmask[xs] = True
        inside = np.argwhere(a & (xmask[:, None] == xmask[None, :]))
        if len(inside):
            _two_coloring(a)  # raises with an odd cycle if one exists
            u, v = inside[0]
            raise NotBipartite(reason=f"edge ({u}, {v}) lies inside a declared part")
    else:
        xmask = np.zeros(n, dtype=bool)
        xmask[:h] = True
        if np.any(a & (xmask[:, None] == xmask[None, :])):
            color = _two_coloring(a)
            xmask = color == 0
            if xmask.sum() != h:
                # regular components are balanced unless d = 0
                if d == 0 and regular:
                    xmask = np.zeros(n, dtype=bool)
                    xmask[:h] = True
                else:
                    raise NotBipartite(reason="two-coloring is unbalanced")
    order = np.concatenate([np.flatnonzero(xmask), np.flatnonzero(~xmask)])
    labels = None if np.array_equal(order, np.arange(n)) else tuple(int(x) for x in order)
    if not regular:
        return BipartiteGraph(a[np.ix_(order, order)], seed, labels)
    return BipartiteRegularGraph(a[np.ix_(order, order)], d, seed, labels)


def from_edges(n: int, edges, bipartite: bool = False, parts=None, seed: int | None = None, regular: bool = True):
    a = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        a[u, v] = a[v, u] = True
    return validate(a, bipartite=bipartite, parts=parts, seed=seed, regular=regular)


# Named graphs used throughout the tests and examples.


def complete_graph(n: int) -> RegularGraph:
    return validate(~np.eye(n, dtype=bool))


def cycle_graph(n: int, bipartite: bool = False):
    if bipartite:
        if n % 2 or n < 4:
            raise InfeasibleDegree("bipartite cycle needs even n >= 4")
        h = n // 2
        edges = [(i, h + i) for i in range(h)] + [((i + 1) % h, h + i) for i in range(h)]
        return from_edges(n, edges, bipartite=True)
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_bipartite(h: int) -> BipartiteRegularGraph:
    return validate(complete_bipartite_matrix(2 * h), bipartite=True)


def perfect_matching(n: int, bipartite: bool = True):
    h = n // 2
    return from_edges(n, [(i, h + i) for i in range(h)], bipartite=bipartite)


# Random generators.


def _pairing(n: int, d: int, rng: np.random.Generator, max_retries: int) -> np.ndarray:
    points = np.repeat(np.arange(n), d)
    for _ in range(max_retries):
        pairs = points[rng.permutation(len(points))].reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        a = np.zeros((n, n), dtype=np.int64)
        np.add.at(a, (pairs[:, 0], pairs[:, 1]), 1)
        a = a + a.T
        if a.max(initial=0) > 1:
            continue
        return a.astype(bool)
    raise RetryBudgetExceeded(f"pairing model failed {max_retries} times for n={n}, d={d}")


def random_regular(
    n: int,
    d: int,
    seed: int = 0,
    connected: bool = False,
    max_retries: int = DEFAULT_RETRIES,
) -> RegularGraph:
    """Seeded simple d-regular graph from the pairing model with restarts.

    For d > (n-1)/2 the complement of a random (n-1-d)-regular graph is
    returned, which keeps the rejection rate low near the complete graph.
    """
    if n < 1 or d < 0 or d >= n:
        raise InfeasibleDegree(f"need 0 <= d < n, got n={n}, d={d}")
    if (n * d) % 2:
        raise InfeasibleDegree(f"n*d must be even, got n={n}, d={d}")
    if connected and n > 1 and (d == 0 or (d == 1 and n > 2)):
        raise InfeasibleDegree(f"no connected {d}-regular graph on {n} vertices")
    rng = np.random.default_rng(seed)
    flip = 2 * d > n - 1
    base = n - 1 - d if flip else d
    for _ in range(max_retries):
        a = _pairing(n, base, rng, max_retries)
        if flip:
            a = ~a & ~np.eye(n, dtype=bool)
        if not connected or _component_count(a) == 1:
            return RegularGraph(a, d, seed)
    raise RetryBudgetExceeded(f"no connected sample after {max_retries} tries")


def _matching_union(h: int, d: int, rng: np.random.Generator, max_retries: int) -> np.ndarray:
    rows = np.arange(h)
    for _ in range(max_retries):
        b = np.zeros((h, h), dtype=bool)
        for _ in range(d):
            cols = rng.permutation(h)
            if b[rows, cols].any():
                break
            b[rows, cols] = True
        else:
            return b
    raise RetryBudgetExceeded(f"matching union failed {max_retries} times for h={h}, d={d}")


def random_bipartite_regular(
    n: int,
    d: int,
    seed: int = 0,
    connected: bool = False,
    max_retries: int = DEFAULT_RETRIES,
) -> BipartiteRegularGraph:
    """Seeded d-regular bipartite graph on balanced parts.

    Union of d random perfect matchings X→Y, restarted on any repeated edge.
    For d > n/4 the bipartite complement of an (n/2-d)-regular sample is used.
    """
    if n < 2 or n % 2:
        raise InfeasibleDegree(f"bipartite graph needs even n >= 2, got {n}")
    h = n // 2
    if d < 0 or d > h:
        raise InfeasibleDegree(f"need 0 <= d <= n/2, got n={n}, d={d}")
    if connected and n > 2 and d <= 1:
        raise InfeasibleDegree(f"no connected {d}-regular bipartite graph on {n} vertices")
    rng = np.random.default_rng(seed)
    flip = 2 * d > h
    base = h - d if flip else d
    for _ in range(max_retries):
        b = _matching_union(h, base, rng, max_retries)
        if flip:
            b = ~b
        a = np.zeros((n, n), dtype=bool)
        a[:h, h:] = b
        a[h:, :h] = b.T
        if not connected or _component_count(a) == 1:
            return BipartiteRegularGraph(a, d, seed)
    raise RetryBudgetExceeded(f"no connected sample after {max_retries} tries")


# Spectral helpers.


def spectrum(g: RegularGraph, **kw):
    return eigenvalues(g.adj, **kw)


def lambda_of(g: RegularGraph, **kw) -> float:
    """Largest nontrivial eigenvalue magnitude λ(G)."""
    return eigenvalues(g.adj, **kw).nontrivial_lambda(bipartite=g.bipartite)


def bipartite_complement(g: BipartiteRegularGraph) -> BipartiteRegularGraph:
    """Complement inside the complete bipartite graph: Ā = C − A."""
    comp = complete_bipartite_matrix(g.n, bool) & ~g.adj
    out = BipartiteRegularGraph(comp, g.half - g.d, g.seed, g.labels)
    if out.d == 0:
        warnings.warn("bipartite complement is the empty graph", DegenerateGraphWarning, stacklevel=2)
    return out


# Edge-list text format: "n d [bipartite]" header, then "u v" lines with u < v.
# d is "-" for a bipartite graph whose degrees differ.


def format_edgelist(g, comments=()) -> str:
    """Any object with n, d, bipartite and edges() (graphs and products)."""
    out = io.StringIO()
    for c in comments:
        out.write(f"# {c}\n")
    flag = " bipartite" if g.bipartite else ""
    d = "-" if g.d is None else g.d
    out.write(f"{g.n} {d}{flag}\n")
    for u, v in g.edges():
        out.write(f"{u} {v}\n")
    return out.getvalue()


def parse_edgelist(text: str, seed: int | None = None):
    header = None
    edges = []
    comments = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        parts = line.split()
        if header is None:
            if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] != "bipartite"):
                raise ValidationError(f"line {lineno}: bad header {line!r}")
            try:
                header = (int(parts[0]), None if parts[1] == "-" else int(parts[1]), len(parts) == 3)
            except ValueError as exc:
                raise ValidationError(f"line {lineno}: bad header {line!r}") from exc
            if header[1] is None and not header[2]:
                raise ValidationError(f"line {lineno}: '-' degree is only allowed for bipartite graphs")
            continue
        if len(parts) != 2:
            raise ValidationError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: non-integer vertex in {line!r}") from exc
        if not (0 <= u < v < header[0]):
            raise ValidationError(f"line {lineno}: need 0 <= u < v < n, got {u} {v}")
        edges.append((u, v))
    if header is None:
        raise ValidationError("missing 'n d' header")
    n, d, bip = header
    if seed is None:
        for c in comments:
            if c.startswith("seed "):
                seed = int(c.split()[1])
    a = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        if a[u, v]:
            raise ValidationError(f"duplicate edge {u} {v}")
        a[u, v] = a[v, u] = True
    g = validate(a, bipartite=bip, seed=seed, regular=d is not None)
    if bip and g.labels is not None:
        raise NotBipartite(reason="bipartite file must place X on the first n/2 vertices")
    if d is not None and g.d != d and n > 0:
        raise NotRegular(0, g.d, d)
    return g


def write_edgelist(g: RegularGraph, path, comments=()) -> None:
    Path(path).write_text(format_edgelist(g, comments))


def read_edgelist(path):
    return parse_edgelist(Path(path).read_text())
