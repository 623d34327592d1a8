"""Closed-form spectra of threshold products and the bounds built on them.

Index tuples are 1-based, matching λ1 ≥ … ≥ λn. Values that are integers
up to 1e-9 are snapped to exact ints (eigenvalues of integer symmetric
matrices are algebraic integers, so a rational one is an integer); sums
over Ψ and α are then evaluated exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .eigen import eigh
from .errors import IndexOutOfRange, InvalidEntry, LengthMismatch, PreconditionViolated
from .graphs import BipartiteRegularGraph, RegularGraph
from .product import degree_bgp, degree_gp

NONBIPARTITE = "nonbipartite"
BIPARTITE = "bipartite"
SNAP_TOL = 1e-9


def snap(x):
    """Return int(x) when x is within SNAP_TOL of an integer, else float(x)."""
    if isinstance(x, (int, Fraction)):
        return x
    r = round(float(x))
    return int(r) if abs(float(x) - r) <= SNAP_TOL else float(x)


@dataclass(frozen=True, eq=False)
class GpEigenBasis:
    """Base spectrum with its companion values λ*.

    Non-bipartite mode: λ*1 = n−1−d, λ*i = −1−λi (eigenvalues of J−I−A).
    Bipartite mode: λ*1 = n/2−d, λ*n = d−n/2, λ*i = −λi (eigenvalues of C−A).
    """

    n: int
    d: int
    lambdas: tuple
    lambda_stars: tuple
    mode: str
    vectors: np.ndarray | None = None

    @classmethod
    def from_values(cls, n: int, d: int, lambdas, mode: str = NONBIPARTITE, vectors=None):
        lams = tuple(snap(x) for x in lambdas)
        if len(lams) != n:
            raise LengthMismatch(f"need {n} eigenvalues, got {len(lams)}")
        if mode == NONBIPARTITE:
            stars = (n - 1 - d,) + tuple(-1 - x for x in lams[1:])
        elif mode == BIPARTITE:
            if n % 2:
                raise ValueError("bipartite basis needs even n")
            h = n // 2
            stars = (h - d,) + tuple(-x for x in lams[1:-1]) + (d - h,)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        return cls(n, d, lams, stars, mode, vectors)

    @classmethod
    def from_graph(cls, g: RegularGraph, mode: str | None = None, with_vectors: bool = False, method: str = "auto"):
        """Oracle eigen-decomposition of g, with λ1 = d (and λn = −d) pinned exactly."""
        if mode is None:
            mode = NONBIPARTITE
        if mode == BIPARTITE and not isinstance(g, BipartiteRegularGraph):
            raise TypeError("bipartite mode needs a BipartiteRegularGraph")
        vals, vecs = eigh(g.adj, method=method)
        vals = [snap(v) for v in vals]
        n, d = g.n, g.d
        if abs(vals[0] - d) > 1e-6:
            raise ValueError(f"top eigenvalue {vals[0]} != degree {d}")
        vals[0] = d
        if mode == BIPARTITE:
            if abs(vals[-1] + d) > 1e-6:
                raise ValueError(f"bottom eigenvalue {vals[-1]} != -{d}")
            vals[-1] = -d
        if with_vectors:
            vecs = _pin_vectors(np.asarray(vals, float), vecs, mode)
        else:
            vecs = None
        return cls.from_values(n, d, vals, mode, vecs)

    def lam(self, i: int):
        self._check(i)
        return self.lambdas[i - 1]

    def star(self, i: int):
        self._check(i)
        return self.lambda_stars[i - 1]

    def _check(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise IndexOutOfRange(f"index {i} outside 1..{self.n}")

    @property
    def is_exact(self) -> bool:
        return all(isinstance(x, int) for x in self.lambdas)

    def lambda_index(self) -> int:
        """i* with |λ_{i*}| = λ(G); ties go to the positive eigenvalue."""
        if self.mode == NONBIPARTITE:
            if self.n < 2:
                raise IndexOutOfRange("no nontrivial eigenvalue")
            return 2 if self.lambdas[1] >= abs(self.lambdas[-1]) else self.n
        if self.n < 3:
            raise IndexOutOfRange("no eigenvalue outside {1, n}")
        return 2 if self.lambdas[1] >= abs(self.lambdas[-2]) else self.n - 1

    def lambda_g(self):
        if self.mode == NONBIPARTITE and self.n < 2 or self.mode == BIPARTITE and self.n < 3:
            return 0
        return abs(self.lambdas[self.lambda_index() - 1])


def _pin_vectors(vals: np.ndarray, vecs: np.ndarray, mode: str) -> np.ndarray:
    """Force u1 ∝ 1 (and un ∝ (1,…,−1,…) in bipartite mode) inside their eigenspaces."""
    n = len(vals)
    out = vecs.copy()
    pinned = [(0, np.ones(n) / np.sqrt(n))]
    if mode == BIPARTITE:
        sign = np.concatenate([np.ones(n // 2), -np.ones(n // 2)])
        pinned.append((n - 1, sign / np.sqrt(n)))
    for pos, target in pinned:
        space = np.flatnonzero(np.abs(vals - vals[pos]) <= 1e-8)
        # put the pinned vector first, then orthonormalize the rest of the eigenspace
        others = [j for j in space if j != pos]
        block = np.column_stack([target] + [vecs[:, j] for j in others])
        q, _ = np.linalg.qr(block)
        q[:, 0] = target
        out[:, pos] = target
        for col, j in zip(range(1, len(space)), others):
            out[:, j] = q[:, col]
    return out


def alpha(k: int, t: int) -> Fraction:
    """α(k,t) = Σ_{ℓ=0}^{k−t} C(k−t,ℓ) / C(t+ℓ,ℓ), exactly."""
    if not 1 <= t <= k:
        raise ValueError(f"need 1 <= t <= k, got k={k}, t={t}")
    return sum((Fraction(comb(k - t, l), comb(t + l, l)) for l in range(k - t + 1)), Fraction(0))


def psi(s: int, b, n: int, d: int, mode: str = NONBIPARTITE) -> int:
    """Ψ_{s,b}: product over j = s..len(b) of d (b_j=1), 1 (b_j=0) or the non-edge count (b_j=−1).

    The non-edge count is n−d−1 in non-bipartite mode and n/2−d in bipartite mode.
    """
    m = len(b)
    if not 1 <= s <= m + 1:
        raise IndexOutOfRange(f"start {s} outside 1..{m + 1}")
    other = n - d - 1 if mode == NONBIPARTITE else n // 2 - d
    out = 1
    for bj in b[s - 1 :]:
        if bj == 1:
            out *= d
        elif bj == -1:
            out *= other
        elif bj == 0:
            if mode == BIPARTITE:
                raise InvalidEntry("0 entry not allowed in bipartite mode")
        else:
            raise InvalidEntry(f"entry {bj} not in {{-1, 0, 1}}")
    return out


def signed_vectors(k: int, t: int, mode: str, exact_ones: bool = False):
    """The set B (at least t ones) or C_{k,t} (exactly t ones, exact_ones=True)."""
    alphabet = (1, 0, -1) if mode == NONBIPARTITE else (1, -1)
    for b in itertools.product(alphabet, repeat=k):
        ones = b.count(1)
        if ones == t if exact_ones else ones >= t:
            yield b


def _check_idx(basis: GpEigenBasis, idx, k: int) -> tuple[int, ...]:
    idx = tuple(int(i) for i in idx)
    if len(idx) != k:
        raise LengthMismatch(f"index tuple has length {len(idx)}, expected {k}")
    for i in idx:
        basis._check(i)
    return idx


def _product_sum(basis: GpEigenBasis, idx, k: int, t: int, mode: str):
    total = 0
    for b in signed_vectors(k, t, mode):
        term = 1
        for bj, i in zip(b, idx):
            if bj == 1:
                term *= basis.lambdas[i - 1]
            elif bj == -1:
                term *= basis.lambda_stars[i - 1]
        total += term
    return total


def gp_eigenvalue(basis: GpEigenBasis, idx, k: int, t: int):
    """Λ_{i1…ik} of GP_{k,t}: sum over B ⊆ {−1,0,1}^k of ∏ (λ | 1 | λ*)."""
    if basis.mode != NONBIPARTITE:
        raise ValueError("gp_eigenvalue needs a non-bipartite basis")
    return _product_sum(basis, _check_idx(basis, idx, k), k, t, NONBIPARTITE)


def sgp_eigenvalue(basis: GpEigenBasis, idx, k: int, t: int):
    """Λ_{i1…ik} of SGP_{k,t}: sum over B ⊆ {−1,1}^k of ∏ (λ | λ*)."""
    if basis.mode != BIPARTITE:
        raise ValueError("sgp_eigenvalue needs a bipartite basis")
    return _product_sum(basis, _check_idx(basis, idx, k), k, t, BIPARTITE)


def _sweep(lams: np.ndarray, consts: np.ndarray, k: int, t: int) -> np.ndarray:
    # Σ_{b∈B} ∏_j f(b_j) = Σ_{s≥t} [z^s] ∏_j (λ_j z + const_j), grouped by number of ones
    coeffs = np.ones((1, 1))
    n = len(lams)
    for _ in range(k):
        m, width = coeffs.shape
        new = np.zeros((m, n, width + 1))
        new[:, :, :width] += coeffs[:, None, :] * consts[None, :, None]
        new[:, :, 1:] += coeffs[:, None, :] * lams[None, :, None]
        coeffs = new.reshape(m * n, width + 1)
    return coeffs[:, t:].sum(axis=1)


def gp_spectrum(basis: GpEigenBasis, k: int, t: int) -> np.ndarray:
    """Λ for every index tuple, in lexicographic (Kronecker) order."""
    lams = np.array(basis.lambdas, float)
    stars = np.array(basis.lambda_stars, float)
    if basis.mode == NONBIPARTITE:
        return _sweep(lams, 1.0 + stars, k, t)
    return _sweep(lams, stars, k, t)


sgp_spectrum = gp_spectrum


def index_set_mask(n: int, k: int) -> np.ndarray:
    """Flat positions of tuples with every entry in {1, n} (the set I)."""
    ends = np.zeros(n, dtype=bool)
    ends[[0, n - 1]] = True
    mask = np.ones(1, dtype=bool)
    for _ in range(k):
        mask = (mask[:, None] & ends[None, :]).reshape(-1)
    return mask


@lru_cache(maxsize=None)
def c_sum(n: int, d: int, k: int, t: int, mode: str) -> int:
    """Σ_{c ∈ C_{k−1,t−1}} Ψ_{1,c}, by enumeration."""
    return sum(psi(1, c, n, d, mode) for c in signed_vectors(k - 1, t - 1, mode, exact_ones=True))


def gp_second_eigenvalue_exact(basis: GpEigenBasis, i: int, k: int, t: int):
    """Λ_{i1…1} = λ_i · Σ_{c∈C_{k−1,t−1}} Ψ_{1,c} for a non-bipartite basis, i ≥ 2."""
    if basis.mode != NONBIPARTITE:
        raise ValueError("needs a non-bipartite basis")
    if not 2 <= i <= basis.n:
        raise IndexOutOfRange(f"index {i} outside 2..{basis.n}")
    return basis.lambdas[i - 1] * c_sum(basis.n, basis.d, k, t, NONBIPARTITE)


def bgp_third_eigenvalue_exact(basis: GpEigenBasis, i: int, k: int, t: int):
    """Λ_{i1…1} = λ_i · Σ_{c∈C_{k−1,t−1}} Ψ_{1,c} for a bipartite basis, i ∉ {1, n}."""
    if basis.mode != BIPARTITE:
        raise ValueError("needs a bipartite basis")
    if not 2 <= i <= basis.n - 1:
        raise IndexOutOfRange(f"index {i} outside 2..{basis.n - 1}")
    return basis.lambdas[i - 1] * c_sum(basis.n, basis.d, k, t, BIPARTITE)


def lambda_gp(g, k: int, t: int):
    """Λ = λ(GP_{k,t}(g)) from the exact formula at i* (λ_{i*} = λ(G))."""
    basis = g if isinstance(g, GpEigenBasis) else GpEigenBasis.from_graph(g, NONBIPARTITE)
    if basis.n < 2:
        return 0
    return abs(gp_second_eigenvalue_exact(basis, basis.lambda_index(), k, t))


def lambda_bgp(g, k: int, t: int):
    """Λ = third largest |eigenvalue| of BGP_{k,t}(g) from the exact formula."""
    basis = g if isinstance(g, GpEigenBasis) else GpEigenBasis.from_graph(g, BIPARTITE)
    if basis.n < 3:
        return 0
    return abs(bgp_third_eigenvalue_exact(basis, basis.lambda_index(), k, t))


def lambda_gp_sweep(basis: GpEigenBasis, k: int, t: int) -> float:
    """max |Λ| over all index tuples other than (1,…,1)."""
    vals = np.abs(gp_spectrum(basis, k, t))
    return float(vals[1:].max()) if len(vals) > 1 else 0.0


def lambda_bgp_sweep(basis: GpEigenBasis, k: int, t: int) -> float:
    """max |Λ_i| over i ∉ I."""
    vals = np.abs(gp_spectrum(basis, k, t))
    rest = vals[~index_set_mask(basis.n, k)]
    return float(rest.max()) if len(rest) else 0.0


@dataclass(frozen=True)
class Bounds:
    lower: object
    upper: object
    condition_met: bool
    lam: object
    alpha: Fraction
    degree: int

    def contains(self, value, slack: float = 1e-9) -> bool:
        return float(self.lower) - slack <= float(value) <= float(self.upper) + slack


def lambda_bounds(g, k: int, t: int, mode: str = "gp", strict: bool = False) -> Bounds:
    """Sandwich interval for Λ.

    GP: (λ/d)(1/α)(t/k)d1 ≤ Λ ≤ (λ/d)(1/α)d1, stated for d ≤ (n−1)/2.
    BGP: (λ/d)(1/α)(t/k)d2 ≤ Λ ≤ (λ/d)d2, stated for d ≤ n/4.
    Outside those conditions the interval is still returned with
    ``condition_met=False`` unless ``strict`` is set.
    """
    if mode not in ("gp", "bgp"):
        raise ValueError(f"mode must be 'gp' or 'bgp', got {mode!r}")
    basis_mode = NONBIPARTITE if mode == "gp" else BIPARTITE
    basis = g if isinstance(g, GpEigenBasis) else GpEigenBasis.from_graph(g, basis_mode)
    n, d = basis.n, basis.d
    a = alpha(k, t)
    lam = basis.lambda_g()
    if mode == "gp":
        cond = 2 * d <= n - 1
        deg = degree_gp(n, d, k, t)
        upper_scale = 1 / a
    else:
        cond = 4 * d <= n
        deg = degree_bgp(n, d, k, t)
        upper_scale = Fraction(1)
    if strict and not cond:
        raise PreconditionViolated(f"degree condition fails for n={n}, d={d} ({mode})")
    if d == 0:
        return Bounds(0, 0, cond, lam, a, deg)
    if isinstance(lam, int):
        ratio = Fraction(lam, d)
        upper = ratio * upper_scale * deg
        lower = ratio / a * Fraction(t, k) * deg
    else:
        ratio = lam / d
        upper = ratio * float(upper_scale) * deg
        lower = ratio / float(a) * t / k * deg
    return Bounds(lower, upper, cond, lam, a, deg)


def eigenvector_check(basis: GpEigenBasis, idx, product, t: int | None = None) -> float:
    """‖A w − Λ w‖ / ‖w‖ for w = u_{i1} ⊗ … ⊗ u_{ik}.

    ``product`` is a ProductGraph (GP for a non-bipartite basis, SGP for a
    bipartite one) or a bare adjacency matrix together with ``t``.
    """
    if basis.vectors is None:
        raise ValueError("basis has no eigenvectors; build it with with_vectors=True")
    if t is None:
        t = getattr(product, "t", None)
        if t is None:
            raise ValueError("threshold t is required with a bare adjacency matrix")
    k = len(idx)
    idx = _check_idx(basis, idx, k)
    w = np.ones(1)
    for i in idx:
        w = np.kron(w, basis.vectors[:, i - 1])
    if basis.mode == NONBIPARTITE:
        lam = gp_eigenvalue(basis, idx, k, t)
    else:
        lam = sgp_eigenvalue(basis, idx, k, t)
    a = np.asarray(getattr(product, "adj", product), dtype=float)
    return float(np.linalg.norm(a @ w - float(lam) * w) / np.linalg.norm(w))
