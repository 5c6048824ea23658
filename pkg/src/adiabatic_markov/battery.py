"""Seeded randomized checks of the invariants the analyses rely on.

:func:`run_battery` returns a JSON-ready verdict. Every check draws from its
own generator derived from the seed, so verdicts are reproducible byte for
byte and independent of check order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .adiabatic import (
    adiabatic_trajectory,
    bound_for_evolution,
    check_prop1,
    stable_adiabatic_time,
    telescoped_deviation,
)
from .evolution import constant_path, random_piecewise_linear, random_stochastic, sample
from .matrix_core import propagate, stationary_distribution, tv_distance
from .mixing import PowerCache, largest_mixing_time, worst_case_tv
from .spectral import prop2_lhs, spectral_scan

__all__ = ["CheckResult", "run_battery", "CHECKS", "DEFAULT_SEED"]

DEFAULT_SEED = 0
FAULTS = ("contraction",)
LAZINESS = 0.85


@dataclass
class CheckResult:
    name: str
    passed: bool = True
    cases: int = 0
    worst: float = -math.inf
    counterexample: dict | None = None
    notes: dict = field(default_factory=dict)

    def record(self, violation: float, example) -> None:
        """Count one case; ``violation > 0`` means the property failed.

        ``violation`` is the amount by which the checked quantity exceeds its
        allowed value, tolerance included; ``max_excess`` reports the largest.
        """
        self.cases += 1
        if violation > self.worst:
            self.worst = violation
        if violation > 0 and self.passed:
            self.passed = False
            self.counterexample = example() if callable(example) else example

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "passed": self.passed,
            "cases": self.cases,
            "max_excess": self.worst if self.cases else None,
        }
        if self.notes:
            d["notes"] = self.notes
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        return d


def _sparse_stochastic(rng, n):
    m = random_stochastic(rng, n)
    m[rng.random((n, n)) < 0.4] = 0.0
    m[np.arange(n), rng.integers(0, n, n)] += 0.1
    return m / m.sum(axis=1, keepdims=True)


def _eps_for(n, rng):
    choices = [e for e in (0.05, 0.1) if e < 0.5 / math.sqrt(n)]
    return float(rng.choice(choices))


def check_tv_identity(rng, fault=None):
    res = CheckResult("tv_l1_identity")
    for _ in range(300):
        n = int(rng.integers(2, 9))
        mu, nu = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
        gap = abs(2 * tv_distance(mu, nu) - np.abs(mu - nu).sum())
        res.record(gap - 1e-15 * n, lambda: {"mu": mu.tolist(), "nu": nu.tolist()})
    return res


def check_contraction(rng, fault=None):
    res = CheckResult("l1_contraction")
    cases = []
    for _ in range(300):
        n = int(rng.integers(2, 9))
        P = _sparse_stochastic(rng, n) if rng.random() < 0.5 else random_stochastic(rng, n)
        cases.append((P, rng.normal(size=n)))
    if fault == "contraction":
        # Negative control: rows sum to 1.5, so any nonnegative vector grows.
        cases.insert(0, (1.5 * random_stochastic(rng, 3), np.array([1.0, 0.5, 0.25])))
    for P, v in cases:
        out = propagate(v, P)
        excess = np.abs(out).sum() - np.abs(v).sum() - 1e-12
        res.record(excess, lambda: {"matrix": P.tolist(), "vector": v.tolist(),
                                    "l1_in": float(np.abs(v).sum()), "l1_out": float(np.abs(out).sum())})
    return res


def check_monotone_d(rng, fault=None):
    res = CheckResult("d_monotonicity")
    for _ in range(40):
        n = int(rng.integers(2, 8))
        P = _sparse_stochastic(rng, n)
        try:
            pi = stationary_distribution(P)
        except Exception:
            continue
        cache = PowerCache(P)
        d = [0.5 * np.abs(cache.power(T) - pi).sum(axis=1).max() for T in range(1, 41)]
        for T in range(len(d) - 1):
            res.record(d[T + 1] - d[T] - 1e-12, lambda: {"matrix": P.tolist(), "T": T + 1})
    return res


def check_vertex_sufficiency(rng, fault=None):
    res = CheckResult("vertex_sufficiency")
    for _ in range(10):
        n = int(rng.integers(2, 7))
        P = random_stochastic(rng, n, concentration=0.5)
        pi = stationary_distribution(P)
        T = int(rng.integers(1, 6))
        dT = worst_case_tv(P, pi, T)
        QT = PowerCache(P).power(T)
        nus = rng.dirichlet(np.ones(n) * 0.3, size=1000)
        tvs = 0.5 * np.abs(nus @ QT - pi).sum(axis=1)
        res.record(float(tvs.max()) - dT - 1e-12, lambda: {"matrix": P.tolist(), "T": T})
    return res


def check_telescoping(rng, fault=None):
    res = CheckResult("telescoping_identity")
    for _ in range(8):
        n = int(rng.integers(2, 6))
        E = random_piecewise_linear(rng, n, int(rng.integers(2, 5)), max_laziness=LAZINESS)
        T = int(rng.integers(1, 21))
        _, states = adiabatic_trajectory(E, T, return_states=True)
        for k in range(1, T + 1):
            direct = states[k] - _pi_at(E, k / T)
            tele = telescoped_deviation(E, T, k)
            res.record(float(np.abs(direct - tele).max()) - 1e-10, lambda: {"T": T, "k": k})
    return res


def _pi_at(E, s):
    return stationary_distribution(sample(E, s))


def check_fixed_point(rng, fault=None):
    res = CheckResult("fixed_point_trajectory")
    for _ in range(10):
        n = int(rng.integers(2, 8))
        E = constant_path(random_stochastic(rng, n))
        for T in (1, 7, 50):
            m = adiabatic_trajectory(E, T).max_deviation
            res.record(m - 1e-12, lambda: {"n": n, "T": T, "max_deviation": m})
    return res


def _random_instances(rng, count):
    out = []
    for _ in range(count):
        n = int(rng.integers(3, 7))
        E = random_piecewise_linear(rng, n, int(rng.integers(2, 5)), max_laziness=LAZINESS)
        out.append((E, _eps_for(n, rng)))
    return out


def check_spectral_mixing(rng, fault=None, grid_points=201):
    res = CheckResult("spectral_floor_vs_mixing")
    for E, eps in _random_instances(rng, 8):
        scan = spectral_scan(E, grid_points)
        lm = largest_mixing_time(E, eps, grid_points)
        pointwise = prop2_lhs(E.n, eps, scan.sigma_at) - lm.tmix_at
        res.record(float(pointwise.max()), lambda: {"n": E.n, "eps": eps})
        res.record(prop2_lhs(E.n, eps, scan.sigma_floor) - lm.tmix_sup, lambda: {"n": E.n, "eps": eps})
    return res


def check_continuity(rng, fault=None, grid_points=1001):
    res = CheckResult("stationary_continuity")
    vacuous = 0
    for E, eps in _random_instances(rng, 6):
        rep = check_prop1(E, eps, grid_points)
        vacuous += rep.vacuous
        res.record(rep.max_tv_seen - eps, lambda: rep.to_dict())
    res.notes["vacuous_instances"] = vacuous
    return res


def check_bound(rng, fault=None, grid_points=1001):
    res = CheckResult("bound_desk_scale")
    for E, eps in _random_instances(rng, 4):
        bound = bound_for_evolution(E, eps, "proof_faithful", grid_points)
        sad = stable_adiabatic_time(E, eps, cap=max(1, bound.bound_ceiling))
        res.record(sad.tsad - bound.bound_ceiling, lambda: {"n": E.n, "eps": eps, "tsad": sad.tsad})
    return res


def check_determinism(rng, fault=None, grid_points=201):
    res = CheckResult("worker_determinism")
    for E, eps in _random_instances(rng, 2):
        runs = []
        for w in (1, 4):
            scan = spectral_scan(E, grid_points, workers=w)
            lm = largest_mixing_time(E, eps, grid_points, workers=w)
            sad = stable_adiabatic_time(E, eps, cap=10_000, workers=w)
            runs.append((scan.sigma_at.tobytes(), lm.tmix_at.tobytes(), sad.tsad, sad.search_log))
        res.record(0.0 if runs[0] == runs[1] else 1.0, lambda: {"n": E.n, "eps": eps})
    return res


CHECKS = (
    check_tv_identity,
    check_contraction,
    check_monotone_d,
    check_vertex_sufficiency,
    check_telescoping,
    check_fixed_point,
    check_spectral_mixing,
    check_continuity,
    check_bound,
    check_determinism,
)


def run_battery(seed: int = DEFAULT_SEED, fault: str | None = None) -> dict:
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    streams = np.random.SeedSequence(seed).spawn(len(CHECKS))
    results = [chk(np.random.default_rng(ss), fault) for chk, ss in zip(CHECKS, streams)]
    return {
        "seed": seed,
        "fault": fault,
        "all_passed": all(r.passed for r in results),
        "checks": [r.to_dict() for r in results],
    }
