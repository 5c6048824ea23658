"""Continuous paths s -> P(s) on [0, 1] through stochastic matrices.

Every evolution is stored as keyframes joined by straight segments. The
three kinds only differ in what the keyframes mean:

``convex``
    two keyframes, P(s) = (1 - s) P0 + s P1;
``piecewise_linear``
    the path *is* the polyline through the keyframes;
``sampled_grid``
    the keyframes are samples of some unknown continuous path, interpolated
    linearly. Lipschitz constants computed from them are estimates only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    BadBreakpoints,
    DimensionMismatch,
    InputError,
    MultipleRecurrentClasses,
    NotErgodic,
    OutOfRange,
    PeriodicRecurrentClass,
)
from .matrix_core import (
    StochasticMatrix,
    Structure,
    classify_structure,
    ingest_matrix,
)

__all__ = [
    "KINDS",
    "Evolution",
    "LipschitzEstimate",
    "SegmentVerdict",
    "StructuralCertificate",
    "make_convex",
    "make_piecewise_linear",
    "make_sampled_grid",
    "constant_path",
    "sample",
    "sample_array",
    "sample_many",
    "lipschitz_constant",
    "structural_certificate",
    "scan_grid",
    "require_stationary",
    "optimality_family",
    "random_stochastic",
    "random_piecewise_linear",
]

KINDS = ("convex", "piecewise_linear", "sampled_grid")


@dataclass(frozen=True, eq=False)
class Evolution:
    kind: str
    breakpoints: np.ndarray = field(repr=False)
    matrices: tuple[StochasticMatrix, ...] = field(repr=False)

    @property
    def n(self) -> int:
        return self.matrices[0].n

    @cached_property
    def stack(self) -> np.ndarray:
        """Keyframe entries as one (k, n, n) array."""
        st = np.stack([m.entries for m in self.matrices])
        st.setflags(write=False)
        return st

    @cached_property
    def keyframe_structures(self) -> tuple[Structure, ...]:
        return tuple(m.structure for m in self.matrices)

    @cached_property
    def segment_structures(self) -> tuple[Structure, ...]:
        # On an open segment the support is the union of the two endpoint
        # supports, so one interior point (the midpoint) classifies it.
        out = []
        for i in range(len(self.matrices) - 1):
            mid = 0.5 * (self.stack[i] + self.stack[i + 1])
            out.append(classify_structure(mid))
        return tuple(out)

    def structure_at(self, s: float) -> Structure:
        i = int(np.searchsorted(self.breakpoints, s, side="right")) - 1
        if self.breakpoints[i] == s:
            return self.keyframe_structures[i]
        return self.segment_structures[i]

    def __repr__(self) -> str:
        return f"Evolution(kind={self.kind!r}, n={self.n}, keyframes={len(self.matrices)})"


def _build(kind: str, breakpoints, matrices) -> Evolution:
    bp = np.array(breakpoints, dtype=np.float64)
    if bp.ndim != 1 or bp.size < 2:
        raise BadBreakpoints("need at least two breakpoints")
    if bp[0] != 0.0 or bp[-1] != 1.0:
        raise BadBreakpoints(f"breakpoints must start at 0 and end at 1, got {bp[0]} .. {bp[-1]}")
    if np.any(np.diff(bp) <= 0):
        raise BadBreakpoints("breakpoints must be strictly increasing")
    mats = tuple(ingest_matrix(m) for m in matrices)
    if len(mats) != bp.size:
        raise BadBreakpoints(f"{bp.size} breakpoints but {len(mats)} matrices")
    if len({m.n for m in mats}) != 1:
        raise DimensionMismatch("keyframe matrices differ in dimension")
    bp.setflags(write=False)
    return Evolution(kind, bp, mats)


def make_convex(P0, P1) -> Evolution:
    """P(s) = (1 - s) P0 + s P1."""
    return _build("convex", [0.0, 1.0], [P0, P1])


def make_piecewise_linear(keyframes) -> Evolution:
    """Polyline through ``[(s_0, P_0), ..., (s_m, P_m)]`` with s_0 = 0, s_m = 1."""
    keyframes = list(keyframes)
    if len(keyframes) < 2:
        raise BadBreakpoints("need at least two keyframes")
    return _build("piecewise_linear", [s for s, _ in keyframes], [m for _, m in keyframes])


def make_sampled_grid(breakpoints, matrices) -> Evolution:
    return _build("sampled_grid", breakpoints, matrices)


def constant_path(P) -> Evolution:
    return make_convex(P, P)


def _locate(E: Evolution, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    bp = E.breakpoints
    i = np.clip(np.searchsorted(bp, s, side="right") - 1, 0, bp.size - 2)
    w = (s - bp[i]) / (bp[i + 1] - bp[i])
    return i, w


def _check_range(s) -> None:
    s = np.asarray(s)
    if np.any(~(s >= 0.0) | ~(s <= 1.0)):
        raise OutOfRange("s must lie in [0, 1]")


def sample_many(E: Evolution, s) -> np.ndarray:
    """P(s) for an array of parameters, shape (m, n, n)."""
    s = np.asarray(s, dtype=np.float64)
    _check_range(s)
    i, w = _locate(E, s)
    st = E.stack
    out = (1.0 - w)[:, None, None] * st[i] + w[:, None, None] * st[i + 1]
    # Keyframes, and points on segments with equal ends, are returned bit-for-bit.
    flat = np.all(st[1:] == st[:-1], axis=(1, 2))
    out[flat[i]] = st[i[flat[i]]]
    hit = E.breakpoints[i] == s
    out[hit] = st[i[hit]]
    last = s == 1.0
    out[last] = st[-1]
    return out


def sample_array(E: Evolution, s: float) -> np.ndarray:
    return sample_many(E, np.array([s]))[0]


def sample(E: Evolution, s: float) -> StochasticMatrix:
    """P(s) as a validated matrix; keyframes are returned unchanged."""
    s = float(s)
    _check_range(s)
    hit = np.flatnonzero(E.breakpoints == s)
    if hit.size:
        return E.matrices[int(hit[0])]
    return ingest_matrix(sample_array(E, s))


@dataclass(frozen=True)
class LipschitzEstimate:
    value: float
    exact: bool
    grid_resolution: int | None = None

    def to_dict(self) -> dict:
        return {"value": self.value, "exact": self.exact, "grid_resolution": self.grid_resolution}


def lipschitz_constant(E: Evolution, grid: int | None = None) -> LipschitzEstimate:
    """Smallest L with ||P(x) - P(y)|| <= L |x - y| in the max-row-sum norm.

    On a linear segment ||P(x) - P(y)|| = |x - y| * ||slope||, so the
    largest segment slope is exact for convex and piecewise-linear paths.
    For sampled grids the same quantity is only an estimate. Passing
    ``grid`` measures slopes between adjacent points of a uniform grid
    (plus breakpoints) instead of between keyframes.
    """
    if grid is None:
        s = E.breakpoints
        mats = E.stack
    else:
        s = scan_grid(E, grid)
        mats = sample_many(E, s)
    diffs = mats[1:] - mats[:-1]
    slopes = np.abs(diffs).sum(axis=2).max(axis=1) / np.diff(s)
    return LipschitzEstimate(
        value=float(slopes.max()) if slopes.size else 0.0,
        exact=E.kind != "sampled_grid",
        grid_resolution=grid,
    )


@dataclass(frozen=True)
class SegmentVerdict:
    start: float
    stop: float
    irreducible: bool
    aperiodic: bool

    def to_dict(self) -> dict:
        return {"start": self.start, "stop": self.stop, "irreducible": self.irreducible, "aperiodic": self.aperiodic}


@dataclass(frozen=True)
class StructuralCertificate:
    mode: str
    segments: tuple[SegmentVerdict, ...]
    keyframes: tuple[Structure, ...]
    keyframe_pass: tuple[bool, ...]
    overall: bool

    @property
    def interior_strict(self) -> bool:
        return all(v.irreducible and v.aperiodic for v in self.segments)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "overall": self.overall,
            "interior_strict": self.interior_strict,
            "segments": [v.to_dict() for v in self.segments],
            "keyframes": [
                dict(st.to_dict(), passes=ok) for st, ok in zip(self.keyframes, self.keyframe_pass)
            ],
        }


def structural_certificate(E: Evolution, mode: str = "relaxed") -> StructuralCertificate:
    """Certify that the whole path stays in the irreducible-aperiodic class.

    Interior segments must always pass the strict test; keyframes must pass
    ``mode`` ("strict" or "relaxed", the latter needing only a single
    aperiodic recurrent class).
    """
    if mode not in ("strict", "relaxed"):
        raise InputError(f"unknown mode {mode!r}")
    bp = E.breakpoints
    segs = tuple(
        SegmentVerdict(float(bp[i]), float(bp[i + 1]), st.irreducible, st.aperiodic)
        for i, st in enumerate(E.segment_structures)
    )
    kf = E.keyframe_structures
    kf_pass = tuple(st.passes(mode) for st in kf)
    overall = all(v.irreducible and v.aperiodic for v in segs) and all(kf_pass)
    return StructuralCertificate(mode, segs, kf, kf_pass, overall)


def require_stationary(E: Evolution, s, strict: bool = False) -> None:
    """Raise unless P(s) has a unique aperiodic stationary distribution at every ``s``.

    Uses the keyframe and segment classifications, so no per-point graph
    search is needed.
    """
    s = np.unique(np.asarray(s, dtype=float))
    _check_range(s)
    bp = E.breakpoints
    i = np.clip(np.searchsorted(bp, s, side="right") - 1, 0, bp.size - 2)
    i[s == 1.0] = bp.size - 1
    hit = bp[i] == s
    checks = [(E.keyframe_structures[j], float(bp[j])) for j in np.unique(i[hit])]
    for j in np.unique(i[~hit]):
        first = float(s[~hit][i[~hit] == j][0])
        checks.append((E.segment_structures[j], first))
    for st, x in checks:
        if len(st.recurrent_classes) != 1:
            raise MultipleRecurrentClasses(
                f"P({x!r}) has {len(st.recurrent_classes)} recurrent classes", s=x
            )
        if st.class_periods[0] != 1:
            raise PeriodicRecurrentClass(f"P({x!r}) has period {st.class_periods[0]}", s=x)
        if strict and not st.irreducible:
            raise NotErgodic(f"P({x!r}) is not irreducible", s=x)


def scan_grid(E: Evolution, grid_points: int = 1001) -> np.ndarray:
    """Uniform grid on [0, 1] merged with every breakpoint of ``E``."""
    if grid_points < 2:
        raise InputError("grid_points must be at least 2")
    return np.union1d(np.linspace(0.0, 1.0, grid_points), E.breakpoints)


def optimality_family(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Endpoints of the reset/shift family showing the t_mix^2 / eps order is attained.

    P0 sends every state to state 0. P1 shifts i -> i + 1 and holds the last
    state. Neither endpoint is irreducible but both have a unique aperiodic
    recurrent class; every interior convex combination is ergodic.
    """
    if n < 2:
        raise InputError("n must be at least 2")
    P0 = np.zeros((n, n))
    P0[:, 0] = 1.0
    P1 = np.zeros((n, n))
    P1[np.arange(n - 1), np.arange(1, n)] = 1.0
    P1[n - 1, n - 1] = 1.0
    return P0, P1


def random_stochastic(
    rng: np.random.Generator, n: int, concentration: float = 1.0, laziness: float = 0.0
) -> np.ndarray:
    """Row-stochastic matrix (1 - laziness) R + laziness I with Dirichlet rows R.

    Strictly positive almost surely for ``laziness < 1``.
    """
    m = rng.dirichlet(np.full(n, concentration), size=n)
    m = (1.0 - laziness) * m + laziness * np.eye(n)
    return m / m.sum(axis=1, keepdims=True)


def random_piecewise_linear(
    rng: np.random.Generator, n: int, n_keyframes: int, max_laziness: float = 0.0
) -> Evolution:
    """Random strictly positive piecewise-linear path (strict-mode by construction).

    Each keyframe gets a laziness drawn uniformly from [0, max_laziness];
    lazier keyframes mix more slowly.
    """
    inner = np.sort(rng.uniform(0.05, 0.95, size=n_keyframes - 2))
    while inner.size and np.any(np.diff(np.concatenate([[0.0], inner, [1.0]])) < 1e-3):
        inner = np.sort(rng.uniform(0.05, 0.95, size=n_keyframes - 2))
    bp = np.concatenate([[0.0], inner, [1.0]])
    lazy = rng.uniform(0.0, max_laziness, size=bp.size)
    return make_piecewise_linear([(s, random_stochastic(rng, n, laziness=a)) for s, a in zip(bp, lazy)])
