"""Stable adiabatic time of a slowly evolving chain, its upper bound, and the
continuity check for the stationary distribution.

At horizon T the chain starts in pi(0) and at step k moves with P(k/T). It
is *feasible* at T when its law stays strictly within eps (in total
variation) of the current stationary distribution pi(k/T) for every
1 <= k <= T. The stable adiabatic time is the first feasible T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import ordered_map
from .errors import CapExceeded, DegenerateDimension, EpsOutOfRange, InputError, NonpositiveArgument
from .evolution import Evolution, lipschitz_constant, require_stationary, sample_many, scan_grid
from .matrix_core import stationary_batch
from .mixing import DEFAULT_CAP, largest_mixing_time
from .spectral import SpectralScan, spectral_scan

__all__ = [
    "Trajectory",
    "SadResult",
    "BoundReport",
    "ContinuityReport",
    "VARIANTS",
    "adiabatic_trajectory",
    "is_feasible",
    "stable_adiabatic_time",
    "theorem2_bound",
    "bound_for_evolution",
    "continuity_delta",
    "check_prop1",
    "telescoped_deviation",
]

VARIANTS = ("proof_faithful", "theorem_literal")
GEOMETRIC_RATIO = 1.1
_BLOCK = 256


@dataclass(frozen=True)
class Trajectory:
    T: int
    deviations: np.ndarray = field(repr=False)
    max_deviation: float
    argmax_k: int

    @property
    def final_deviation(self) -> float:
        """Deviation at k = T only (the non-stable adiabatic criterion)."""
        return float(self.deviations[-1])

    def csv_rows(self):
        yield ("k", "s", "deviation")
        for k, d in enumerate(self.deviations.tolist(), start=1):
            yield (k, k / self.T, d)

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "max_deviation": self.max_deviation,
            "argmax_k": self.argmax_k,
            "deviations": self.deviations.tolist(),
        }


def _check_horizon(E: Evolution, T: int) -> None:
    if E.n < 2:
        raise DegenerateDimension("n = 1 chains are trivially adiabatic")
    if int(T) != T or T < 1:
        raise InputError(f"horizon must be a positive integer, got {T!r}")


def _walk(E: Evolution, T: int, stop_eps: float | None = None, keep: bool = True):
    """Run the inhomogeneous chain for T steps.

    Returns (deviations, states); ``states[k]`` is the law after k steps.
    With ``stop_eps`` the walk stops at the first deviation >= stop_eps.
    """
    _check_horizon(E, T)
    s_all = np.arange(T + 1) / T
    require_stationary(E, s_all)
    devs = []
    states = []
    nu = None
    for start in range(0, T + 1, _BLOCK):
        s = s_all[start:start + _BLOCK]
        mats = sample_many(E, s)
        pis = stationary_batch(mats)
        for j in range(s.size):
            if nu is None:
                nu = pis[0]
            else:
                nu = nu @ mats[j]
                d = 0.5 * float(np.abs(nu - pis[j]).sum())
                devs.append(d)
                if stop_eps is not None and d >= stop_eps:
                    if keep:
                        states.append(nu)
                    return np.array(devs), states
            if keep:
                states.append(nu)
    return np.array(devs), states


def adiabatic_trajectory(E: Evolution, T: int, return_states: bool = False):
    """Deviations TV(pi(0) P(1/T) ... P(k/T), pi(k/T)) for k = 1..T.

    With ``return_states`` the laws after each step (k = 0..T) are returned
    alongside, as an array of shape (T + 1, n).
    """
    devs, states = _walk(E, T, keep=return_states)
    k = int(np.argmax(devs))
    traj = Trajectory(int(T), devs, float(devs[k]), k + 1)
    if return_states:
        return traj, np.array(states)
    return traj


def is_feasible(E: Evolution, T: int, eps: float) -> bool:
    """Every deviation strictly below eps; stops at the first violation."""
    devs, _ = _walk(E, T, stop_eps=eps, keep=False)
    return bool(devs.size == T and np.all(devs < eps))


def _probe(E: Evolution, T: int, eps: float) -> tuple[int, bool, float]:
    devs, _ = _walk(E, T, stop_eps=eps, keep=False)
    feasible = devs.size == T and bool(np.all(devs < eps))
    return (int(T), feasible, float(devs.max()))


@dataclass(frozen=True)
class SadResult:
    """Outcome of a stable adiabatic time search.

    ``search_log`` holds (T, feasible, max deviation seen). For infeasible T
    the walk stops at the first violation, so the logged maximum covers only
    the steps taken. Every T < ``exhaustive_below`` was tested.
    """

    tsad: int | None
    eps: float
    cap: int
    strategy: str
    search_log: tuple[tuple[int, bool, float], ...] = field(repr=False)
    exhaustive_below: int
    gap_unverified: bool = False
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "tsad": self.tsad,
            "eps": self.eps,
            "cap": self.cap,
            "strategy": self.strategy,
            "exhaustive_below": self.exhaustive_below,
            "gap_unverified": self.gap_unverified,
            "degenerate": self.degenerate,
            "search_log": [list(e) for e in self.search_log],
        }


def _geometric_points(cap: int) -> list[int]:
    pts = [1]
    while pts[-1] < cap:
        pts.append(min(cap, max(pts[-1] + 1, math.ceil(GEOMETRIC_RATIO * pts[-1]))))
    return pts


def _contiguous_prefix(tested) -> int:
    t = 1
    tested = set(tested)
    while t in tested:
        t += 1
    return t


def default_cap(E: Evolution, eps: float, grid_points: int = 1001, workers: int | None = 1) -> int:
    """Ceiling of the proof-faithful bound when it is computable, else 10**6."""
    try:
        rep = bound_for_evolution(E, eps, "proof_faithful", grid_points, workers=workers)
    except (EpsOutOfRange, CapExceeded):
        return DEFAULT_CAP
    return max(1, rep.bound_ceiling)


def stable_adiabatic_time(
    E: Evolution,
    eps: float,
    cap: int | None = None,
    strategy: str = "exact",
    workers: int | None = 1,
    grid_points: int = 1001,
) -> SadResult:
    """First horizon T at which the chain tracks pi(k/T) within eps at every step.

    Feasibility is not assumed monotone in T. ``strategy="exact"`` tests
    T = 1, 2, 3, ... in order. ``strategy="geometric"`` tests a geometric
    progression (ratio 1.1) until one is feasible and then scans linearly
    back from the previous progression point; feasible values hidden below
    that bracket are not looked for, which ``gap_unverified`` reports.

    Raises
    ------
    CapExceeded
        No feasible T <= cap. The partial :class:`SadResult` is attached as
        ``exc.partial``.
    """
    if not eps > 0:
        raise InputError("eps must be positive")
    if strategy not in ("exact", "geometric"):
        raise InputError(f"unknown strategy {strategy!r}")
    _check_horizon(E, 1)
    if cap is None:
        cap = default_cap(E, eps, grid_points, workers)
    if cap < 1:
        raise InputError("cap must be at least 1")
    degenerate = eps >= 1
    log: list[tuple[int, bool, float]] = []

    def first_feasible(candidates) -> int | None:
        batch = max(1, workers or 1)
        for i in range(0, len(candidates), batch):
            results = ordered_map(lambda T: _probe(E, T, eps), candidates[i:i + batch], workers)
            for r in results:
                log.append(r)
                if r[1]:
                    return r[0]
        return None

    def result(tsad, gap=False):
        below = _contiguous_prefix(T for T, _, _ in log)
        return SadResult(tsad, float(eps), int(cap), strategy, tuple(log), below, gap, degenerate)

    if strategy == "exact":
        tsad = first_feasible(list(range(1, cap + 1)))
        if tsad is None:
            raise CapExceeded(f"no feasible T <= {cap}", partial=result(None))
        return result(tsad)

    pts = _geometric_points(cap)
    hit = first_feasible(pts)
    if hit is None:
        raise CapExceeded(f"no feasible T <= {cap} on the geometric grid", partial=result(None))
    j = pts.index(hit)
    if j > 0:
        inner = first_feasible(list(range(pts[j - 1] + 1, hit)))
        if inner is not None:
            hit = inner
    tested = {T for T, _, _ in log}
    gap = any(T not in tested for T in range(1, hit))
    return result(hit, gap)


@dataclass(frozen=True)
class BoundReport:
    n: int
    L: float
    tmix_used: int
    eps: float
    variant: str
    bound_value: float
    bound_ceiling: int | None
    eps_condition_ok: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "L": self.L,
            "tmix_used": self.tmix_used,
            "eps": self.eps,
            "variant": self.variant,
            "bound_value": self.bound_value if math.isfinite(self.bound_value) else None,
            "bound_ceiling": self.bound_ceiling,
            "eps_condition_ok": self.eps_condition_ok,
        }


def theorem2_bound(
    n: int,
    L: float,
    tmix: int,
    eps: float,
    variant: str = "proof_faithful",
    check: bool = True,
) -> BoundReport:
    """3 n^{3/2} L tmix^2 / ((1 - 2 sqrt(n) eps) eps).

    ``tmix`` is the largest mixing time at eps for ``variant="theorem_literal"``
    and at eps / 2 for ``variant="proof_faithful"``; the caller computes it.
    The bound is only valid for 0 < eps < 1 / (2 sqrt(n)). Outside that range
    an :class:`EpsOutOfRange` is raised, or with ``check=False`` a report
    with ``eps_condition_ok=False`` and an infinite bound is returned.
    """
    if variant not in VARIANTS:
        raise InputError(f"unknown variant {variant!r}")
    if n < 2:
        raise DegenerateDimension("the bound needs n >= 2")
    if L < 0 or tmix < 1:
        raise InputError("need L >= 0 and tmix >= 1")
    margin = 1.0 - 2.0 * math.sqrt(n) * eps
    ok = eps > 0 and margin > 0
    if not ok:
        if check:
            raise EpsOutOfRange(f"eps = {eps} is not in (0, 1/(2 sqrt({n}))) = (0, {0.5 / math.sqrt(n):.6g})")
        return BoundReport(n, float(L), int(tmix), float(eps), variant, math.inf, None, False)
    value = 3.0 * n**1.5 * L * tmix**2 / (margin * eps)
    return BoundReport(n, float(L), int(tmix), float(eps), variant, value, math.ceil(value), True)


def bound_for_evolution(
    E: Evolution,
    eps: float,
    variant: str = "proof_faithful",
    grid_points: int = 1001,
    cap: int = DEFAULT_CAP,
    workers: int | None = 1,
    check: bool = True,
) -> BoundReport:
    """Evaluate the bound with L and the largest mixing time computed from ``E``."""
    if variant not in VARIANTS:
        raise InputError(f"unknown variant {variant!r}")
    if check and not 0 < eps < 0.5 / math.sqrt(E.n):
        theorem2_bound(E.n, 0.0, 1, eps, variant)
    L = lipschitz_constant(E).value
    mix_eps = eps / 2 if variant == "proof_faithful" else eps
    tmix = largest_mixing_time(E, mix_eps, grid_points, cap, workers).tmix_sup
    return theorem2_bound(E.n, L, tmix, eps, variant, check)


def continuity_delta(eps: float, sigma_floor: float, L: float, n: int) -> float:
    """eps * sigma / (3 L n^{3/2})."""
    if not (eps > 0 and sigma_floor > 0 and L > 0 and n > 0):
        raise NonpositiveArgument("eps, sigma_floor, L and n must all be positive")
    return eps * sigma_floor / (3.0 * L * n**1.5)


@dataclass(frozen=True)
class ContinuityReport:
    eps: float
    sigma_floor: float
    L: float
    n: int
    delta: float
    pairs_tested: int
    max_tv_seen: float
    holds: bool
    vacuous: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "sigma_floor": self.sigma_floor,
            "L": self.L,
            "n": self.n,
            "delta": self.delta if math.isfinite(self.delta) else None,
            "pairs_tested": self.pairs_tested,
            "max_tv_seen": self.max_tv_seen,
            "holds": self.holds,
            "vacuous": self.vacuous,
            "note": self.note,
        }


def check_prop1(
    E: Evolution,
    eps: float,
    grid_points: int = 1001,
    scan: SpectralScan | None = None,
    L: float | None = None,
    workers: int | None = 1,
) -> ContinuityReport:
    """Check that grid points closer than delta have stationary laws within eps.

    delta comes from :func:`continuity_delta` with the scan's sigma floor.
    A constant path (L = 0) has no finite delta; every pair is tested.
    """
    if scan is None:
        scan = spectral_scan(E, grid_points, workers)
    if L is None:
        L = lipschitz_constant(E).value
    n = E.n
    delta = math.inf if L == 0 else continuity_delta(eps, scan.sigma_floor, L, n)
    grid = scan_grid(E, grid_points)
    require_stationary(E, grid)
    pis = stationary_batch(sample_many(E, grid))
    pairs = 0
    worst = 0.0
    for off in range(1, grid.size):
        close = grid[off:] - grid[:-off] <= delta
        if not close.any():
            break
        tv = 0.5 * np.abs(pis[off:][close] - pis[:-off][close]).sum(axis=1)
        pairs += int(close.sum())
        worst = max(worst, float(tv.max()))
    vacuous = pairs == 0
    note = "grid too coarse: delta is below the grid spacing" if vacuous else ""
    return ContinuityReport(
        float(eps), scan.sigma_floor, float(L), n, delta, pairs, worst, worst <= eps, vacuous, note
    )


def telescoped_deviation(E: Evolution, T: int, k: int) -> np.ndarray:
    """sum_{j=1..k} (pi((j-1)/T) - pi(j/T)) P(j/T) ... P(k/T).

    Equals pi(0) P(1/T) ... P(k/T) - pi(k/T); computed from the products
    accumulated backwards, independently of the forward walk.
    """
    _check_horizon(E, T)
    s = np.arange(k + 1) / T
    require_stationary(E, s)
    mats = sample_many(E, s)
    pis = stationary_batch(mats)
    tail = np.eye(E.n)
    acc = np.zeros(E.n)
    for j in range(k, 0, -1):
        tail = mats[j] @ tail
        acc += (pis[j - 1] - pis[j]) @ tail
    return acc
