"""Mixing times, singular-value floors and stable adiabatic times for
time-inhomogeneous Markov chains driven by a continuous path of stochastic
matrices."""

from .adiabatic import (
    BoundReport,
    ContinuityReport,
    SadResult,
    Trajectory,
    adiabatic_trajectory,
    bound_for_evolution,
    check_prop1,
    continuity_delta,
    is_feasible,
    stable_adiabatic_time,
    telescoped_deviation,
    theorem2_bound,
)
from .errors import *  # noqa: F401,F403
from .evolution import (
    Evolution,
    LipschitzEstimate,
    StructuralCertificate,
    constant_path,
    lipschitz_constant,
    make_convex,
    make_piecewise_linear,
    make_sampled_grid,
    optimality_family,
    random_piecewise_linear,
    sample,
    sample_many,
    scan_grid,
    structural_certificate,
)
from .matrix_core import (
    StochasticMatrix,
    Structure,
    as_probability_vector,
    classify_structure,
    ingest_matrix,
    operator_norm,
    propagate,
    stationary_distribution,
    tv_distance,
)
from .mixing import LargestMixingResult, MixingResult, largest_mixing_time, mixing_time, worst_case_tv
from .spectral import Prop2Verdict, SpectralScan, check_prop2, sigma_at, spectral_scan

__version__ = "0.1.0"
