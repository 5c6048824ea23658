"""Dense stochastic matrices, probability vectors and their basic algebra.

Matrices act on row vectors from the right: a distribution ``nu`` moves one
step to ``nu @ P``. Probability vectors and signed vectors are plain 1-D
float64 arrays; :func:`as_probability_vector` validates the former.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    DimensionMismatch,
    InputError,
    MultipleRecurrentClasses,
    NegativeEntry,
    NotErgodic,
    NotSquare,
    PeriodicRecurrentClass,
    RowSumViolation,
)

__all__ = [
    "Structure",
    "StochasticMatrix",
    "ingest_matrix",
    "classify_structure",
    "stationary_distribution",
    "stationary_batch",
    "as_probability_vector",
    "tv_distance",
    "operator_norm",
    "propagate",
]

CLAMP_TOL = 1e-15
DEFAULT_ROW_TOL = 1e-9
STATIONARY_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class Structure:
    """Structural classification of the support digraph (edge i -> j iff P[i, j] > 0).

    ``recurrent_classes`` are the closed communicating classes, each a sorted
    tuple of 0-based state indices. ``period`` is the period of the recurrent
    class when there is exactly one, otherwise ``None``.
    """

    irreducible: bool
    aperiodic: bool
    recurrent_classes: tuple[tuple[int, ...], ...]
    class_periods: tuple[int, ...]
    period: int | None

    @property
    def unique_stationary(self) -> bool:
        """Exactly one recurrent class and it is aperiodic (relaxed mode)."""
        return len(self.recurrent_classes) == 1 and self.class_periods[0] == 1

    @property
    def ergodic(self) -> bool:
        """Irreducible and aperiodic (strict mode)."""
        return self.irreducible and self.aperiodic

    def passes(self, mode: str) -> bool:
        if mode == "strict":
            return self.ergodic
        if mode == "relaxed":
            return self.unique_stationary
        raise InputError(f"unknown validation mode {mode!r}")

    def to_dict(self) -> dict:
        return {
            "irreducible": self.irreducible,
            "aperiodic": self.aperiodic,
            "recurrent_classes": [list(c) for c in self.recurrent_classes],
            "period": self.period,
        }


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """A validated row-stochastic matrix. Build it with :func:`ingest_matrix`."""

    entries: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def structure(self) -> Structure:
        return classify_structure(self)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __repr__(self) -> str:
        return f"StochasticMatrix(n={self.n})"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


def ingest_matrix(raw, row_tol: float = DEFAULT_ROW_TOL) -> StochasticMatrix:
    """Validate ``raw`` and return it as a :class:`StochasticMatrix`.

    Entries within 1e-15 of 0 or 1 are clamped onto the boundary. Rows whose
    sum is within ``row_tol`` of one are rescaled to sum to one; anything
    further off is rejected rather than silently corrected.

    Raises
    ------
    NotSquare, NegativeEntry, RowSumViolation
    """
    if isinstance(raw, StochasticMatrix):
        return raw
    a = np.array(raw, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise NotSquare(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix has non-finite entries")
    if np.any(a < -CLAMP_TOL):
        i, j = np.argwhere(a < -CLAMP_TOL)[0]
        raise NegativeEntry(f"entry ({i}, {j}) = {a[i, j]!r} is negative")
    a[a < 0] = 0.0
    a[(a > 1) & (a <= 1 + CLAMP_TOL)] = 1.0
    sums = a.sum(axis=1)
    bad = np.abs(sums - 1.0) > row_tol
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise RowSumViolation(f"row {i} sums to {sums[i]!r}, tolerance {row_tol}")
    a /= sums[:, None]
    if np.any(a > 1):
        raise InputError("entry exceeds 1 after normalization")
    return StochasticMatrix(_frozen(a))


def _class_period(adj: np.ndarray, members: np.ndarray) -> int:
    # BFS levels inside the class; the period is the gcd of
    # level[u] + 1 - level[v] over all edges u -> v of the class.
    inside = np.zeros(adj.shape[0], dtype=bool)
    inside[members] = True
    level = {int(members[0]): 0}
    frontier = [int(members[0])]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.flatnonzero(adj[u] & inside):
                v = int(v)
                if v not in level:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    g = 0
    for u in members:
        u = int(u)
        for v in np.flatnonzero(adj[u] & inside):
            g = math.gcd(g, abs(level[u] + 1 - level[int(v)]))
    return g


def classify_structure(P) -> Structure:
    """Irreducibility, recurrent classes and periods of the support digraph."""
    a = P.entries if isinstance(P, StochasticMatrix) else np.asarray(P, dtype=float)
    adj = a > 0
    n_comp, labels = connected_components(csr_matrix(adj), directed=True, connection="strong")
    # A strongly connected component is closed iff no edge leaves it.
    leaves = np.zeros(n_comp, dtype=bool)
    rows, cols = np.nonzero(adj)
    leaves[labels[rows][labels[rows] != labels[cols]]] = True
    classes = []
    for c in range(n_comp):
        if not leaves[c]:
            classes.append(np.flatnonzero(labels == c))
    classes.sort(key=lambda m: int(m[0]))
    periods = tuple(_class_period(adj, m) for m in classes)
    return Structure(
        irreducible=n_comp == 1,
        aperiodic=all(p == 1 for p in periods),
        recurrent_classes=tuple(tuple(int(i) for i in m) for m in classes),
        class_periods=periods,
        period=periods[0] if len(periods) == 1 else None,
    )


def _check_stationary_structure(st: Structure, strict: bool) -> None:
    if len(st.recurrent_classes) != 1:
        raise MultipleRecurrentClasses(
            f"{len(st.recurrent_classes)} recurrent classes; stationary distribution is not unique"
        )
    if st.class_periods[0] != 1:
        raise PeriodicRecurrentClass(f"recurrent class has period {st.class_periods[0]}")
    if strict and not st.irreducible:
        raise NotErgodic("matrix is not irreducible")


def _normalized_system(P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # pi (I - P) = 0 transposed, last equation replaced by sum(pi) = 1.
    n = P.shape[-1]
    A = np.swapaxes(np.eye(n) - P, -1, -2).copy()
    A[..., -1, :] = 1.0
    b = np.zeros(P.shape[:-1])
    b[..., -1] = 1.0
    return A, b


def _power_iteration(P: np.ndarray, tol: float = 1e-14, max_iter: int = 1_000_000) -> np.ndarray:
    n = P.shape[0]
    pi = np.full(n, 1.0 / n)
    # Lazy chain has the same stationary distribution and cannot oscillate.
    lazy = 0.5 * (P + np.eye(n))
    for _ in range(max_iter):
        nxt = pi @ lazy
        if np.abs(nxt - pi).sum() < tol:
            return nxt
        pi = nxt
    return pi


def _clean(pi: np.ndarray) -> np.ndarray:
    pi = np.where(pi < 0, 0.0, pi)
    return pi / pi.sum(axis=-1, keepdims=True)


def stationary_distribution(P, strict: bool = False) -> np.ndarray:
    """Unique stationary distribution of ``P``.

    Solved directly by replacing one equation of the singular system
    ``pi (I - P) = 0`` with the normalization row; power iteration on the lazy
    chain is only used when the direct solve fails its residual check.

    Parameters
    ----------
    P : StochasticMatrix or array_like
    strict : bool
        Also require irreducibility (membership in the irreducible-aperiodic
        class). The default only needs a single aperiodic recurrent class.

    Raises
    ------
    MultipleRecurrentClasses, PeriodicRecurrentClass, NotErgodic
    """
    P = ingest_matrix(P)
    _check_stationary_structure(P.structure, strict)
    a = P.entries
    A, b = _normalized_system(a)
    try:
        pi = _clean(np.linalg.solve(A, b))
        ok = np.abs(pi @ a - pi).sum() <= STATIONARY_RESIDUAL_TOL
    except np.linalg.LinAlgError:
        ok = False
    if not ok:
        pi = _clean(_power_iteration(a))
    return pi


def stationary_batch(Ps: np.ndarray) -> np.ndarray:
    """Stationary distributions for a stack of matrices, shape (m, n, n) -> (m, n).

    No structural check is made; callers must already know every matrix has
    a unique aperiodic recurrent class. Rows failing the residual check are
    recomputed one by one.
    """
    Ps = np.asarray(Ps, dtype=float)
    A, b = _normalized_system(Ps)
    try:
        pis = _clean(np.linalg.solve(A, b[..., None])[..., 0])
    except np.linalg.LinAlgError:
        pis = np.full(Ps.shape[:-1], np.nan)
    resid = np.abs(np.einsum("mi,mij->mj", pis, Ps) - pis).sum(axis=-1)
    for i in np.flatnonzero(~(resid <= STATIONARY_RESIDUAL_TOL)):
        pis[i] = _clean(_power_iteration(Ps[i]))
    return pis


def as_probability_vector(x, tol: float = 1e-12) -> np.ndarray:
    """Return ``x`` as a float array after checking it is a distribution."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or not np.all(np.isfinite(v)):
        raise InputError("probability vector must be a finite 1-D array")
    if np.any(v < -tol):
        raise NegativeEntry("probability vector has a negative entry")
    if abs(v.sum() - 1.0) > tol:
        raise InputError(f"probability vector sums to {v.sum()!r}")
    return v


def tv_distance(mu, nu) -> float:
    """Total variation distance ``0.5 * sum |mu - nu|``."""
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if mu.shape != nu.shape:
        raise DimensionMismatch(f"shapes {mu.shape} and {nu.shape} differ")
    return 0.5 * float(np.abs(mu - nu).sum())


def operator_norm(M) -> float:
    """``max_nu ||nu M||_1`` over distributions ``nu``, i.e. the maximum absolute row sum.

    ``nu -> ||nu M||_1`` is convex on the simplex, so the maximum sits at a
    point mass.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {M.shape}")
    if M.size == 0:
        return 0.0
    return float(np.abs(M).sum(axis=1).max())


def propagate(nu, P) -> np.ndarray:
    """One step ``nu @ P``; never increases the l1 norm of a signed vector."""
    a = P.entries if isinstance(P, StochasticMatrix) else np.asarray(P, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (a.shape[0],):
        raise DimensionMismatch(f"vector of shape {nu.shape} cannot act on {a.shape} matrix")
    return nu @ a

