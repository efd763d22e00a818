"""Desk-scale circle-method laboratory for sums of prime powers drawn
from a short window (x - y, x + y].

Subpackage map:

- arith: interval sieve, factorization, admissibility, problem contexts
- expsums: exact-phase exponential sums over the prime window
- arcs: Farey dissection, Dirichlet approximation, arc bookkeeping
- singular_series: Gauss sums and the truncated singular series
- singular_integral: the continuous main-term factor and its oscillatory kin
- representations: exact weighted representation counts (naive and batched)
- experiment: prediction vs count scans, arc quadrature, moments, caching
- cli: command-line front end
"""

from .arith import ProblemContext, PrimeWindow, admissible, modulus_R, prime_window, sieve_interval
from .arcs import ArcDecomposition, ArcParams, RationalPoint, classify, dirichlet_approx
from .errors import WglabError
from .experiment import ExceptionalReport, MajorArcPrediction, exceptional_scan, predict
from .expsums import WeightedSequence, build_sequence, eval_sum
from .representations import RepresentationRecord, rho_mitm, rho_naive
from .singular_integral import j_integral, oscillatory_I, v_eval
from .singular_series import GaussSumValue, SeriesTruncation, gauss_sum, truncated_sigma

__version__ = "0.1.0"

__all__ = [
    "ArcDecomposition",
    "ArcParams",
    "ExceptionalReport",
    "GaussSumValue",
    "MajorArcPrediction",
    "PrimeWindow",
    "ProblemContext",
    "RationalPoint",
    "RepresentationRecord",
    "SeriesTruncation",
    "WeightedSequence",
    "WglabError",
    "admissible",
    "build_sequence",
    "classify",
    "dirichlet_approx",
    "eval_sum",
    "exceptional_scan",
    "gauss_sum",
    "j_integral",
    "modulus_R",
    "oscillatory_I",
    "predict",
    "prime_window",
    "rho_mitm",
    "rho_naive",
    "sieve_interval",
    "truncated_sigma",
    "v_eval",
    "__version__",
]
