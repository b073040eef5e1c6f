"""Numerical monodromy for tan(x) - x = a.

Roots of the equation are continued along closed loops in the parameter
plane; the permutations they undergo generate a group whose solvability
decides whether an elementary inverse can exist.
"""

from .census import Rectangle, RootRecord, isolate_roots, verify_all_real, winding_count
from .certify import CertificateReport, CertifyOptions, replay_configuration, run_certification
from .critical import CriticalPoint, classify_order, critical_values, find_critical_points
from .errors import MonodromyError, NumericalError, ParameterError
from .families import FunctionFamily, eval_f, eval_higher, evaluate
from .paths import LoopSpec, ParamPath, Side, elementary_loop, jitter, paper_path, validate_path
from .permutations import (Permutation, compose, contains_alternating, derived_series, generate_group,
                           inverse, is_transitive)
from .tracker import TrackOptions, TrackingReport, choose_detour_sides, conjugate_check, initial_roots, track

__version__ = "0.1.0"

__all__ = [
    "CertificateReport", "CertifyOptions", "CriticalPoint", "FunctionFamily", "LoopSpec", "MonodromyError",
    "NumericalError", "ParamPath", "ParameterError", "Permutation", "Rectangle", "RootRecord", "Side",
    "TrackOptions", "TrackingReport", "choose_detour_sides", "classify_order", "compose", "conjugate_check",
    "contains_alternating", "critical_values", "derived_series", "elementary_loop", "eval_f", "eval_higher",
    "evaluate", "find_critical_points", "generate_group", "initial_roots", "inverse", "is_transitive", "isolate_roots",
    "jitter", "paper_path", "replay_configuration", "run_certification", "track", "validate_path", "verify_all_real",
    "winding_count",
]
