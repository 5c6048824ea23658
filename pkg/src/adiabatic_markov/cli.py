"""Command-line front end.

Usage::

    adiabatic-markov analyze --input path.json --eps 0.1
    adiabatic-markov mixing  --input path.json --eps 0.1 --out csv
    adiabatic-markov sad     --input path.json --eps 0.1 --strategy geometric
    adiabatic-markov bound   --input path.json --eps 0.1 --variant literal
    adiabatic-markov verify  --seed 0
    adiabatic-markov demo-optimal --n-list 4,6,8,10 --eps 0.2

The primary report goes to stdout (JSON unless ``--out csv``). When an input
file or ``--out-dir`` is given, the requested formats are also written as
``<stem>.<command>.json`` / ``<stem>.<command>.csv`` next to the input or in
the output directory.

Exit codes: 0 success, 1 a checked property failed, 2 input error,
3 a search hit its cap.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .adiabatic import (
    adiabatic_trajectory,
    bound_for_evolution,
    check_prop1,
    stable_adiabatic_time,
    theorem2_bound,
)
from .battery import DEFAULT_SEED, FAULTS, run_battery
from .errors import CapExceeded, InputError, MarkovError, NotErgodic, StructureError
from .evolution import Evolution, lipschitz_constant, make_convex, optimality_family, structural_certificate
from .io import dumps_json, format_csv, load_evolution
from .mixing import DEFAULT_CAP, largest_mixing_time
from .spectral import check_prop2, spectral_scan

__all__ = ["RunConfig", "main", "build_parser"]

EXIT_OK, EXIT_PROPERTY, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3
COMMANDS = ("analyze", "mixing", "sad", "bound", "verify", "demo-optimal")
VARIANT_FLAGS = {"proof": "proof_faithful", "literal": "theorem_literal"}
DEMO_EPS = 0.2


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: Path | None = None
    eps: float | None = None
    grid_points: int = 1001
    cap: int | None = None
    mode: str = "relaxed"
    variant: str = "proof_faithful"
    strategy: str = "exact"
    seed: int = DEFAULT_SEED
    output: str = "json"
    out_dir: Path | None = None
    workers: int | None = None
    n_list: tuple[int, ...] = (4, 6, 8, 10)
    inject_fault: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        needs_input = self.command not in ("verify", "demo-optimal")
        if needs_input and self.input_path is None:
            raise InputError(f"{self.command} needs --input")
        if self.command != "verify":
            if self.eps is None:
                raise InputError(f"{self.command} needs --eps")
            if not 0 < self.eps < 1:
                raise InputError(f"eps must lie in (0, 1), got {self.eps}")
        if self.grid_points < 2:
            raise InputError("--grid must be at least 2")
        if self.cap is not None and self.cap < 1:
            raise InputError("--cap must be at least 1")
        if self.workers is not None and self.workers < 1:
            raise InputError("--workers must be at least 1")
        if self.command == "demo-optimal":
            if not self.n_list:
                raise InputError("--n-list is empty")
            if min(self.n_list) < 3:
                raise InputError("--n-list entries must be at least 3")
            if self.mode != "relaxed":
                raise InputError("demo-optimal needs --mode relaxed: the family's endpoints are reducible")
        if self.inject_fault is not None and self.command != "verify":
            raise InputError("--inject-fault only applies to verify")

    @property
    def stem(self) -> str:
        return self.input_path.stem if self.input_path is not None else self.command

    @property
    def destination(self) -> Path | None:
        if self.out_dir is not None:
            return self.out_dir
        return self.input_path.parent if self.input_path is not None else None


@dataclass
class Outcome:
    payload: dict
    csv_rows: list | None = None
    code: int = EXIT_OK


def _load(cfg: RunConfig) -> Evolution:
    E = load_evolution(cfg.input_path)
    cert = structural_certificate(E, cfg.mode)
    if not cert.overall:
        bad = [i for i, ok in enumerate(cert.keyframe_pass) if not ok]
        where = f"keyframes {bad}" if bad else "an interior segment"
        err = NotErgodic if cfg.mode == "strict" else StructureError
        raise err(f"evolution fails {cfg.mode} validation at {where}")
    return E


def _grid_cap(cfg: RunConfig) -> int:
    return cfg.cap if cfg.cap is not None else DEFAULT_CAP


def cmd_analyze(cfg: RunConfig) -> Outcome:
    E = _load(cfg)
    w = cfg.workers
    L = lipschitz_constant(E)
    scan = spectral_scan(E, cfg.grid_points, w)
    mix = largest_mixing_time(E, cfg.eps, cfg.grid_points, _grid_cap(cfg), w)
    half = largest_mixing_time(E, cfg.eps / 2, cfg.grid_points, _grid_cap(cfg), w)
    bounds = {
        "theorem_literal": theorem2_bound(E.n, L.value, mix.tmix_sup, cfg.eps, "theorem_literal", check=False),
        "proof_faithful": theorem2_bound(E.n, L.value, half.tmix_sup, cfg.eps, "proof_faithful", check=False),
    }
    continuity = check_prop1(E, cfg.eps, cfg.grid_points, scan, L.value, w)
    spectral_mixing = check_prop2(E, cfg.eps, mix.tmix_sup, scan)
    payload = {
        "command": "analyze",
        "n": E.n,
        "kind": E.kind,
        "eps": cfg.eps,
        "certificate": structural_certificate(E, cfg.mode),
        "lipschitz": L,
        "spectral": {k: v for k, v in scan.to_dict().items() if k not in ("s", "sigma")},
        "mixing": {"tmix_sup": mix.tmix_sup, "argmax_s": mix.argmax_s, "tmix_sup_half_eps": half.tmix_sup},
        "bounds": bounds,
        "continuity": continuity,
        "spectral_mixing": spectral_mixing,
    }
    rows = [("s", "sigma", "tmix", "tmix_half_eps")]
    rows += zip(scan.grid.tolist(), scan.sigma_at.tolist(), mix.tmix_at.tolist(), half.tmix_at.tolist())
    code = EXIT_OK if continuity.holds and spectral_mixing.holds else EXIT_PROPERTY
    return Outcome(payload, rows, code)


def cmd_mixing(cfg: RunConfig) -> Outcome:
    E = _load(cfg)
    mix = largest_mixing_time(E, cfg.eps, cfg.grid_points, _grid_cap(cfg), cfg.workers)
    payload = dict(command="mixing", n=E.n, **mix.to_dict())
    return Outcome(payload, list(mix.csv_rows()))


def cmd_sad(cfg: RunConfig) -> Outcome:
    E = _load(cfg)
    try:
        bound = bound_for_evolution(E, cfg.eps, cfg.variant, cfg.grid_points, DEFAULT_CAP, cfg.workers, check=False)
    except CapExceeded:
        bound = None
    cap = cfg.cap
    if cap is None:
        cap = bound.bound_ceiling if bound is not None and bound.bound_ceiling is not None else DEFAULT_CAP
        cap = max(1, cap)
    payload = {"command": "sad", "n": E.n, "bound": bound}
    try:
        res = stable_adiabatic_time(E, cfg.eps, cap, cfg.strategy, cfg.workers, cfg.grid_points)
    except CapExceeded as exc:
        payload["result"] = exc.partial
        payload["error"] = str(exc)
        return Outcome(payload, None, EXIT_CAP)
    payload["result"] = res
    ceiling = bound.bound_ceiling if bound is not None else None
    # Horizons start at 1, so a bound below 1 still certifies T = 1.
    payload["within_bound"] = None if ceiling is None else res.tsad <= max(1, ceiling)
    traj = adiabatic_trajectory(E, res.tsad)
    payload["trajectory"] = {"T": traj.T, "max_deviation": traj.max_deviation, "argmax_k": traj.argmax_k}
    return Outcome(payload, list(traj.csv_rows()))


def cmd_bound(cfg: RunConfig) -> Outcome:
    E = _load(cfg)
    rep = bound_for_evolution(E, cfg.eps, cfg.variant, cfg.grid_points, _grid_cap(cfg), cfg.workers)
    payload = dict(command="bound", **rep.to_dict())
    rows = [tuple(payload), tuple(payload.values())]
    return Outcome(payload, rows)


def cmd_verify(cfg: RunConfig) -> Outcome:
    verdict = run_battery(cfg.seed, cfg.inject_fault)
    rows = [("check", "passed", "cases", "max_excess")]
    rows += [(c["name"], c["passed"], c["cases"], c["max_excess"]) for c in verdict["checks"]]
    return Outcome(verdict, rows, EXIT_OK if verdict["all_passed"] else EXIT_PROPERTY)


def demo_row(n: int, eps: float, grid_points: int = 1001, cap: int | None = None, workers: int | None = 1) -> dict:
    """One row of the optimality-family scaling table."""
    E = make_convex(*optimality_family(n))
    L = lipschitz_constant(E).value
    tmix_sup = largest_mixing_time(E, eps, grid_points, DEFAULT_CAP, workers).tmix_sup
    ceiling = None
    if eps < 0.5 / math.sqrt(n):
        half = largest_mixing_time(E, eps / 2, grid_points, DEFAULT_CAP, workers).tmix_sup
        ceiling = theorem2_bound(n, L, half, eps).bound_ceiling
    if cap is None:
        cap = ceiling if ceiling is not None else DEFAULT_CAP
    row = {"n": n, "tmix_sup": tmix_sup, "tsad": None, "bound_ceiling": ceiling, "ratio": None, "status": "ok"}
    try:
        tsad = stable_adiabatic_time(E, eps, cap, "exact", workers).tsad
    except CapExceeded:
        row["status"] = "cap_exceeded"
        return row
    row["tsad"] = tsad
    row["ratio"] = tsad * eps / tmix_sup**2
    return row


def cmd_demo_optimal(cfg: RunConfig) -> Outcome:
    table = [demo_row(n, cfg.eps, cfg.grid_points, cfg.cap, cfg.workers) for n in cfg.n_list]
    cols = ("n", "tmix_sup", "tsad", "bound_ceiling", "ratio", "status")
    rows = [cols] + [tuple(r[c] for c in cols) for r in table]
    capped = any(r["status"] != "ok" for r in table)
    payload = {"command": "demo-optimal", "eps": cfg.eps, "rows": table}
    return Outcome(payload, rows, EXIT_CAP if capped else EXIT_OK)


DISPATCH = {
    "analyze": cmd_analyze,
    "mixing": cmd_mixing,
    "sad": cmd_sad,
    "bound": cmd_bound,
    "verify": cmd_verify,
    "demo-optimal": cmd_demo_optimal,
}


def _n_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path, help="evolution JSON file")
    common.add_argument("--eps", type=float, help="accuracy in total variation, in (0, 1)")
    common.add_argument("--grid", type=int, default=1001, help="uniform grid points on [0, 1] (default 1001)")
    common.add_argument("--cap", type=int, help="largest horizon searched")
    common.add_argument("--mode", choices=("strict", "relaxed"), default="relaxed")
    common.add_argument("--variant", choices=tuple(VARIANT_FLAGS), default="proof")
    common.add_argument("--strategy", choices=("exact", "geometric"), default="exact")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument(
        "--out", choices=("json", "csv", "both"), help="stdout/file format (default: csv for demo-optimal, else json)"
    )
    common.add_argument("--out-dir", type=Path)
    common.add_argument("--workers", type=int, help="worker threads (default: CPU count)")
    common.add_argument("--n-list", type=_n_list, default=(4, 6, 8, 10), help="dimensions for demo-optimal")
    common.add_argument("--inject-fault", choices=FAULTS, help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="adiabatic-markov",
        description="Mixing and stable adiabatic times of slowly varying Markov chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "analyze": "structure, Lipschitz constant, singular-value floor, mixing, bounds and checks",
        "mixing": "mixing time along the path and its maximum",
        "sad": "empirical stable adiabatic time",
        "bound": "upper bound on the stable adiabatic time",
        "verify": "seeded randomized battery of invariant checks",
        "demo-optimal": "scaling table for the reset/shift family",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    eps = ns.eps
    if eps is None and ns.command == "demo-optimal":
        eps = DEMO_EPS
    return RunConfig(
        command=ns.command,
        input_path=ns.input,
        eps=eps,
        grid_points=ns.grid,
        cap=ns.cap,
        mode=ns.mode,
        variant=VARIANT_FLAGS[ns.variant],
        strategy=ns.strategy,
        seed=ns.seed,
        output=ns.out or ("csv" if ns.command == "demo-optimal" else "json"),
        out_dir=ns.out_dir,
        workers=ns.workers,
        n_list=ns.n_list,
        inject_fault=ns.inject_fault,
    )


def _write(cfg: RunConfig, out: Outcome, stdout) -> None:
    text_json = dumps_json(out.payload)
    text_csv = format_csv(out.csv_rows) if out.csv_rows is not None else None
    if cfg.output == "csv" and text_csv is not None:
        stdout.write(text_csv)
    else:
        stdout.write(text_json)
    dest = cfg.destination
    if dest is None:
        return
    dest.mkdir(parents=True, exist_ok=True)
    base = dest / f"{cfg.stem}.{cfg.command}"
    if cfg.output in ("json", "both"):
        base.with_name(base.name + ".json").write_text(text_json)
    if cfg.output in ("csv", "both") and text_csv is not None:
        base.with_name(base.name + ".csv").write_text(text_csv)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        out = DISPATCH[cfg.command](cfg)
    except CapExceeded as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_CAP
    except MarkovError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    _write(cfg, out, stdout)
    if out.code == EXIT_CAP:
        stderr.write(f"error: {out.payload.get('error', 'cap exceeded')}\n")
    return out.code


if __name__ == "__main__":
    sys.exit(main())
