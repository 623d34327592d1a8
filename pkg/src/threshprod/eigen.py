"""Dense symmetric eigensolver used as the brute-force oracle.

The solver is a parallel-ordered cyclic Jacobi: each sweep visits every
off-diagonal pair once, grouped into n-1 rounds of disjoint pairs (round-robin
tournament order) so a whole round is applied with vectorized row/column
updates. Above ``JACOBI_AUTO_MAX`` the ``"auto"`` method hands off to LAPACK.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapExceeded, NotConverged, NotSymmetric

DEFAULT_CAP = 4096
DEFAULT_TOL = 1e-8
JACOBI_RTOL = 1e-12
JACOBI_AUTO_MAX = 160
MAX_SWEEPS = 60


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalue multiset sorted in descending order."""

    values: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        vals = np.sort(np.asarray(self.values, dtype=float))[::-1].copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    @property
    def max(self) -> float:
        return float(self.values[0])

    def max_deviation(self, other) -> float:
        """Largest entrywise gap between the two sorted multisets."""
        b = other.values if isinstance(other, Spectrum) else np.sort(np.asarray(other, float))[::-1]
        if len(b) != len(self.values):
            return float("inf")
        if len(b) == 0:
            return 0.0
        return float(np.max(np.abs(self.values - b)))

    def matches(self, other, tol: float | None = None) -> bool:
        return self.max_deviation(other) <= (self.tol if tol is None else tol)

    def is_symmetric(self, tol: float | None = None) -> bool:
        tol = self.tol if tol is None else tol
        return bool(np.all(np.abs(self.values + self.values[::-1]) <= tol))

    def nontrivial_lambda(self, bipartite: bool = False) -> float:
        """max{λ2, |λn|}, or max{λ2, |λ(n-1)|} for bipartite graphs."""
        v = self.values
        if bipartite:
            if len(v) < 3:
                return 0.0
            return float(max(v[1], abs(v[-2])))
        if len(v) < 2:
            return 0.0
        return float(max(v[1], abs(v[-1])))

    def kth_largest_abs(self, k: int) -> float:
        """k-th largest absolute value, 1-based."""
        return float(np.sort(np.abs(self.values))[::-1][k - 1])

    def to_dict(self, n: int | None = None, d: int | None = None) -> dict:
        return {
            "n": len(self.values) if n is None else n,
            "d": d,
            "values": [float(x) for x in self.values],
        }

    def to_json(self, n: int | None = None, d: int | None = None) -> str:
        return json.dumps(self.to_dict(n, d))


@lru_cache(maxsize=64)
def _round_robin(m: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Tournament schedule: m-1 rounds of m/2 disjoint pairs (m even)."""
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        half = m // 2
        p = np.array(players[:half])
        q = np.array(players[::-1][:half])
        lo, hi = np.minimum(p, q), np.maximum(p, q)
        rounds.append((lo, hi))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def jacobi_eigh(
    matrix,
    rtol: float = JACOBI_RTOL,
    vectors: bool = True,
    max_sweeps: int = MAX_SWEEPS,
):
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    Returns ``(values, V)`` with ``matrix ≈ V diag(values) Vᵀ``; values are
    in the order Jacobi leaves them on the diagonal (unsorted). Sweeps until
    the off-diagonal Frobenius norm drops below ``rtol * ‖matrix‖_F``.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    v = np.eye(n) if vectors else None
    if n <= 1:
        return np.diag(a).copy(), v
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(n), v
    target = rtol * scale
    m = n + (n % 2)
    schedule = []
    for lo, hi in _round_robin(m):
        keep = hi < n
        schedule.append((lo[keep], hi[keep]))

    for _ in range(max_sweeps):
        if _off_norm(a) <= target:
            break
        for p, q in schedule:
            apq = a[p, q]
            live = np.abs(apq) > 1e-300
            if not live.any():
                continue
            p, q, apq = p[live], q[live], apq[live]
            app, aqq = a[p, p], a[q, q]
            theta = (aqq - app) / (2.0 * apq)
            sgn = np.where(theta >= 0, 1.0, -1.0)
            t = sgn / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            cols_p = a[:, p].copy()
            cols_q = a[:, q]
            a[:, p] = c * cols_p - s * cols_q
            a[:, q] = s * cols_p + c * cols_q
            rows_p = a[p, :].copy()
            rows_q = a[q, :]
            a[p, :] = c[:, None] * rows_p - s[:, None] * rows_q
            a[q, :] = s[:, None] * rows_p + c[:, None] * rows_q
            a[p, p] = app - t * apq
            a[q, q] = aqq + t * apq
            a[p, q] = 0.0
            a[q, p] = 0.0

            if v is not None:
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        if _off_norm(a) > target:
            raise NotConverged(f"Jacobi did not converge in {max_sweeps} sweeps")
    return np.diag(a).copy(), v


def check_symmetric(matrix: np.ndarray) -> None:
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSymmetric(-1, -1)
    if m.dtype.kind in "biu":
        bad = np.argwhere(m != m.T)
    else:
        scale = max(float(np.max(np.abs(m))) if m.size else 0.0, 1.0)
        bad = np.argwhere(np.abs(m - m.T) > 1e-12 * scale)
    if len(bad):
        u, v = bad[0]
        raise NotSymmetric(int(u), int(v))


def _resolve(method: str, n: int) -> str:
    if method == "auto":
        return "jacobi" if n <= JACOBI_AUTO_MAX else "lapack"
    if method not in ("jacobi", "lapack"):
        raise ValueError(f"unknown eigensolver method {method!r}")
    return method


def eigenvalues(
    adjacency,
    cap: int = DEFAULT_CAP,
    method: str = "auto",
    tol: float = DEFAULT_TOL,
) -> Spectrum:
    """Full real spectrum of a symmetric matrix, sorted descending."""
    a = np.asarray(adjacency)
    check_symmetric(a)
    n = a.shape[0]
    if n > cap:
        raise CapExceeded(f"dimension {n} exceeds cap {cap}")
    if _resolve(method, n) == "jacobi":
        vals, _ = jacobi_eigh(a, vectors=False)
    else:
        vals = np.linalg.eigvalsh(a.astype(float))
    return Spectrum(vals, tol)


def eigh(adjacency, cap: int = DEFAULT_CAP, method: str = "auto"):
    """Eigenpairs sorted by descending eigenvalue; columns orthonormal."""
    a = np.asarray(adjacency)
    check_symmetric(a)
    n = a.shape[0]
    if n > cap:
        raise CapExceeded(f"dimension {n} exceeds cap {cap}")
    if _resolve(method, n) == "jacobi":
        vals, vecs = jacobi_eigh(a)
    else:
        vals, vecs = np.linalg.eigh(a.astype(float))
    order = np.argsort(-vals, kind="stable")
    return vals[order], vecs[:, order]
