"""Worst-case mixing times of single chains and their supremum along an evolution."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._parallel import ordered_map
from .errors import CapExceeded, InputError
from .evolution import Evolution, require_stationary, sample_many, scan_grid
from .matrix_core import StochasticMatrix, stationary_batch, stationary_distribution

__all__ = [
    "MixingResult",
    "LargestMixingResult",
    "PowerCache",
    "worst_case_tv",
    "mixing_time",
    "largest_mixing_time",
]

DEFAULT_CAP = 10**6


class PowerCache:
    """Matrix powers by binary decomposition over cached squarings P, P^2, P^4, ..."""

    def __init__(self, P):
        a = P.entries if isinstance(P, StochasticMatrix) else np.asarray(P, dtype=float)
        self._squares = [a]

    def square(self, j: int) -> np.ndarray:
        while len(self._squares) <= j:
            last = self._squares[-1]
            self._squares.append(last @ last)
        return self._squares[j]

    def power(self, T: int) -> np.ndarray:
        if T < 0:
            raise InputError("negative power")
        out = None
        j = 0
        while T:
            if T & 1:
                sq = self.square(j)
                out = sq if out is None else out @ sq
            T >>= 1
            j += 1
        return np.eye(self._squares[0].shape[0]) if out is None else out


def _worst_row_tv(Q: np.ndarray, pi: np.ndarray) -> float:
    return 0.5 * float(np.abs(Q - pi).sum(axis=1).max())


def worst_case_tv(P, pi, T: int) -> float:
    """d(T) = max_i TV(P^T(i, .), pi).

    TV(nu P^T, pi) is convex in nu, so the maximum over all initial
    distributions is attained at a point mass.
    """
    return _worst_row_tv(PowerCache(P).power(T), np.asarray(pi, dtype=float))


@dataclass(frozen=True)
class MixingResult:
    tmix: int
    eps: float
    cap_hit: bool = False
    tv_profile: tuple[tuple[int, float], ...] = ()

    def to_dict(self) -> dict:
        return {
            "tmix": self.tmix,
            "eps": self.eps,
            "cap_hit": self.cap_hit,
            "tv_profile": [list(p) for p in self.tv_profile],
        }


def mixing_time(P, eps: float, cap: int = DEFAULT_CAP, pi=None) -> MixingResult:
    """Least T >= 1 with d(T) <= eps.

    Doubles T until d(T) <= eps, then bisects; d is non-increasing in T.
    Passing ``pi`` skips the structural validation of ``P``.

    Raises
    ------
    CapExceeded
        If d(cap) > eps.
    """
    if not 0 < eps:
        raise InputError("eps must be positive")
    if cap < 1:
        raise InputError("cap must be at least 1")
    if pi is None:
        pi = stationary_distribution(P)
    pi = np.asarray(pi, dtype=float)
    cache = PowerCache(P)
    profile: dict[int, float] = {}

    def d(T: int) -> float:
        if T not in profile:
            profile[T] = _worst_row_tv(cache.power(T), pi)
        return profile[T]

    lo, hi = 0, 1
    while d(hi) > eps:
        if hi >= cap:
            raise CapExceeded(
                f"d({cap}) = {profile[hi]:.6g} > eps = {eps}",
                partial=MixingResult(cap, eps, True, tuple(sorted(profile.items()))),
            )
        lo, hi = hi, min(2 * hi, cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if d(mid) > eps:
            lo = mid
        else:
            hi = mid
    return MixingResult(hi, eps, False, tuple(sorted(profile.items())))


@dataclass(frozen=True)
class LargestMixingResult:
    grid: np.ndarray = field(repr=False)
    tmix_at: np.ndarray = field(repr=False)
    tmix_sup: int
    argmax_s: float
    eps: float

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "tmix_sup": self.tmix_sup,
            "argmax_s": self.argmax_s,
            "grid_points": int(self.grid.size),
            "s": self.grid.tolist(),
            "tmix": self.tmix_at.tolist(),
        }

    def csv_rows(self):
        yield ("s", "tmix")
        yield from zip(self.grid.tolist(), self.tmix_at.tolist())


def largest_mixing_time(
    E: Evolution,
    eps: float,
    grid_points: int = 1001,
    cap: int = DEFAULT_CAP,
    workers: int | None = 1,
    grid=None,
) -> LargestMixingResult:
    """Mixing time at every grid point (uniform grid plus breakpoints) and its maximum.

    The path must have a unique aperiodic stationary distribution at every
    grid point; check :func:`~adiabatic_markov.evolution.structural_certificate`
    first.

    Raises
    ------
    CapExceeded
        With ``s`` set to the first grid point that does not mix within ``cap``.
    """
    grid = scan_grid(E, grid_points) if grid is None else np.asarray(grid, dtype=float)
    require_stationary(E, grid)
    mats = sample_many(E, grid)
    pis = stationary_batch(mats)

    def one(i: int) -> int:
        try:
            return mixing_time(mats[i], eps, cap, pi=pis[i]).tmix
        except CapExceeded as exc:
            raise CapExceeded(f"at s={grid[i]!r}: {exc}", s=float(grid[i]), partial=exc.partial) from None

    tm = np.array(ordered_map(one, range(grid.size), workers), dtype=np.int64)
    j = int(np.argmax(tm))
    return LargestMixingResult(grid, tm, int(tm[j]), float(grid[j]), float(eps))
