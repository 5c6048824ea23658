"""Singular values of I - P(s) along an evolution.

sigma(s) is the smallest nonzero singular value of I - P(s). For a matrix
with a unique stationary distribution rank(I - P) = n - 1, so sigma(s) is
taken by position (second smallest) rather than by thresholding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import ordered_map
from .errors import DegenerateDimension, RankWarning
from .evolution import Evolution, lipschitz_constant, sample_many, scan_grid
from .matrix_core import StochasticMatrix

__all__ = ["SpectralScan", "Prop2Verdict", "sigma_at", "spectral_scan", "check_prop2"]

ZERO_REL = 1e-10


def _sigma_from_values(sv: np.ndarray) -> float:
    # sv sorted descending
    n = sv.size
    if n < 2:
        raise DegenerateDimension("sigma(s) needs n >= 2")
    zero = ZERO_REL * max(1.0, float(sv[0]))
    if sv[-1] > zero:
        raise RankWarning(f"I - P has full rank (smallest singular value {sv[-1]:.3e})")
    if sv[-2] <= zero:
        raise RankWarning(f"I - P has rank < n - 1 (second smallest singular value {sv[-2]:.3e})")
    return float(sv[-2])


def sigma_at(P) -> float:
    """Smallest nonzero singular value of I - P.

    Raises
    ------
    RankWarning
        If the structurally zero singular value is not numerically zero, or a
        second one is (non-unique stationary distribution).
    """
    a = P.entries if isinstance(P, StochasticMatrix) else np.asarray(P, dtype=float)
    sv = np.linalg.svd(np.eye(a.shape[0]) - a, compute_uv=False)
    return _sigma_from_values(sv)


@dataclass(frozen=True)
class SpectralScan:
    grid: np.ndarray = field(repr=False)
    sigma_at: np.ndarray = field(repr=False)
    sigma_floor: float
    argmin_s: float
    rank_warnings: tuple[float, ...] = ()
    floor_uncertainty: float | None = None

    def to_dict(self) -> dict:
        return {
            "grid_points": int(self.grid.size),
            "sigma_floor": self.sigma_floor,
            "argmin_s": self.argmin_s,
            "floor_uncertainty": self.floor_uncertainty,
            "rank_warnings": list(self.rank_warnings),
            "s": self.grid.tolist(),
            "sigma": self.sigma_at.tolist(),
        }

    def csv_rows(self):
        yield ("s", "sigma")
        yield from zip(self.grid.tolist(), self.sigma_at.tolist())


def spectral_scan(
    E: Evolution,
    grid_points: int = 1001,
    workers: int | None = 1,
    on_rank_error: str = "raise",
) -> SpectralScan:
    """sigma(s) on a uniform grid plus every breakpoint, and its minimum.

    The infimum over [0, 1] is approximated by the grid minimum. For exact
    evolutions sigma(s) is sqrt(n) * L Lipschitz, so the true infimum lies
    within ``floor_uncertainty`` (half the largest gap times that constant)
    below the reported floor.

    ``on_rank_error="record"`` lists offending grid points in
    ``rank_warnings`` and leaves them out of the floor instead of raising.
    """
    grid = scan_grid(E, grid_points)
    mats = sample_many(E, grid)
    eye = np.eye(E.n)

    def one(chunk):
        return np.linalg.svd(eye - mats[chunk], compute_uv=False)

    chunks = np.array_split(np.arange(grid.size), max(1, min(workers or 1, grid.size)))
    svs = np.concatenate(ordered_map(one, chunks, workers))
    sig = np.full(grid.size, np.nan)
    bad = []
    for i, sv in enumerate(svs):
        try:
            sig[i] = _sigma_from_values(sv)
        except RankWarning as exc:
            if on_rank_error == "raise":
                raise RankWarning(f"at s={grid[i]!r}: {exc}", s=float(grid[i])) from None
            bad.append(float(grid[i]))
    if np.all(np.isnan(sig)):
        raise RankWarning("no grid point has rank n - 1")
    j = int(np.nanargmin(sig))
    unc = None
    if E.kind != "sampled_grid":
        L = lipschitz_constant(E).value
        unc = 0.5 * float(np.diff(grid).max()) * math.sqrt(E.n) * L
    return SpectralScan(grid, sig, float(sig[j]), float(grid[j]), tuple(bad), unc)


@dataclass(frozen=True)
class Prop2Verdict:
    lhs: float
    rhs: int
    holds: bool
    vacuous: bool

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds, "vacuous": self.vacuous}


def prop2_lhs(n: int, eps: float, sigma: float) -> float:
    return (1.0 - 2.0 * math.sqrt(n) * eps) / sigma


def check_prop2(E: Evolution, eps: float, tmix_sup: int, scan: SpectralScan) -> Prop2Verdict:
    """Compare (1 - 2 sqrt(n) eps) / sigma_floor against the largest mixing time.

    For eps >= 1 / (2 sqrt(n)) the left side is not positive and the
    inequality holds trivially; the verdict is then marked vacuous.
    """
    lhs = prop2_lhs(E.n, eps, scan.sigma_floor)
    return Prop2Verdict(lhs, int(tmix_sup), bool(lhs <= tmix_sup), bool(lhs <= 0))
