"""Goldstein subgradient methods for nonsmooth Lipschitz minimization."""

from .approx import (ApproxOracle, ApproxResult, HeuristicConfig, approx_goldstein,
                     estimate_modulus, minimize_heuristic)
from .descent import (RunConfig, goldstein_update, minimize_bisection, minimize_fast,
                      rate_diagnostics)
from .exceptions import NoConvergence
from .ledger import OracleLedger
from .minnorm import Polyhedron, min_norm_point, polyhedron_distance, segment_min_norm
from .objectives import InstanceSpec, MaxAffine, builtin, make_max_quadratics
from .oracles import (ExactOracle, exact_goldstein_max_affine, exact_goldstein_radial,
                      modulus_bisection, sampled_goldstein)

__version__ = "0.1.0"

__all__ = [
    "ApproxOracle", "ApproxResult", "ExactOracle", "HeuristicConfig", "InstanceSpec",
    "MaxAffine", "NoConvergence", "OracleLedger", "Polyhedron", "RunConfig",
    "approx_goldstein", "builtin", "estimate_modulus", "exact_goldstein_max_affine",
    "exact_goldstein_radial", "goldstein_update", "make_max_quadratics", "min_norm_point",
    "minimize_bisection", "minimize_fast", "minimize_heuristic", "modulus_bisection",
    "polyhedron_distance", "rate_diagnostics", "sampled_goldstein", "segment_min_norm",
]
