"""Weighted exponential sums over short intervals.

The central object is f(alpha) = sum of w(n) * e(alpha * n^k) over a
weighted support sequence, where e(t) = exp(2*pi*i*t).  Supports are short
windows (x - y, x + y] carrying one of three weightings:

* ``prime_log``   - primes in the window, weight log p,
* ``integer_log`` - integers in the window, weight log n,
* ``unit``        - integers in the window, weight 1.

Phase accuracy
--------------
Evaluating e(alpha * n^k) naively in doubles loses all phase information
once alpha * n^k reaches 2^52, which happens immediately at the scales of
interest (n^k ~ 10^12 and beyond).  Phases are therefore reduced exactly:
alpha is taken apart into its dyadic ratio num/2^t, n^k is carried in
base-2^26 limbs, and frac(alpha * n^k) is assembled limb by limb with
integer arithmetic modulo 2^53 plus a float tail.  The result is the true
fractional part up to ~2^-53 regardless of the size of alpha * n^k, and
every evaluation is bit-reproducible.

The per-limb step: write frac(num * 2^(26 j) / 2^t) = (a_j + tail_j)/2^53
with a_j integer.  Multiplying by limb L_j < 2^26 and summing modulo 2^53
needs only int64 operations once a_j is split into high and low halves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import arith
from .arcs import ArcDecomposition, RationalPoint, classify, dirichlet_approx, w_k
from .arith import ProblemContext
from .errors import EmptyRegion, EmptyWindow, ParameterDomain, RangeTooLarge

_M26 = (1 << 26) - 1
_M53 = (1 << 53) - 1

SEQUENCE_KINDS = ("prime_log", "integer_log", "unit")


class PhasePowers:
    """Base-2^26 limb decomposition of n^k over a support array.

    Built once per (support, k); evaluating the phase vector for a new
    alpha costs O(limbs * len(support)) int64 operations.
    """

    def __init__(self, support: np.ndarray, k: int):
        support = np.asarray(support, dtype=np.int64)
        if support.size and int(support.max()) > arith.SIEVE_CEILING:
            raise RangeTooLarge("support entries exceed 2**48")
        if support.size and int(support.min()) < 0:
            raise ParameterDomain("support entries must be nonnegative")
        if k < 1:
            raise ParameterDomain(f"need k >= 1, got {k}")
        self.k = int(k)
        self.size = support.size
        base = np.stack([support & _M26, (support >> 26) & _M26, support >> 52], axis=1)
        limbs = base
        for _ in range(k - 1):
            limbs = self._mul(limbs, base)
        self._limbs = limbs
        self._limbs_f = limbs.astype(np.float64)

    @staticmethod
    def _mul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
        # schoolbook product with one carry pass; B has <= 3 limbs so each
        # raw column holds at most 3 products < 2^52 plus carries: int64-safe
        m, ja = A.shape
        jb = B.shape[1]
        out = np.zeros((m, ja + jb), dtype=np.int64)
        for i in range(ja):
            col = A[:, i]
            for j in range(jb):
                out[:, i + j] += col * B[:, j]
        PhasePowers._carry(out)
        last = out.shape[1]
        while last > 1 and not out[:, last - 1].any():
            last -= 1
        return out[:, :last]

    @staticmethod
    def _carry(out: np.ndarray) -> None:
        carry = np.zeros(out.shape[0], dtype=np.int64)
        for t in range(out.shape[1]):
            tot = out[:, t] + carry
            out[:, t] = tot & _M26
            carry = tot >> 26
        if carry.any():  # pragma: no cover - limb allocation covers the product
            raise ParameterDomain("limb overflow")

    def fractions(self, alpha: float) -> np.ndarray:
        """frac(alpha * n^k) for every n in the support, to ~2^-53."""
        if self.size == 0:
            return np.zeros(0, dtype=np.float64)
        num, den = float(alpha).as_integer_ratio()
        acc = np.zeros(self.size, dtype=np.int64)
        tail = np.zeros(self.size, dtype=np.float64)
        for j in range(self._limbs.shape[1]):
            r = (num << (26 * j)) % den
            if r == 0:
                continue
            scaled = r << 53
            a_j = scaled // den
            # int/int division rounds correctly at any magnitude; den can
            # exceed float range for subnormal alpha
            tail_j = (scaled - a_j * den) / den
            a_hi, a_lo = a_j >> 27, a_j & ((1 << 27) - 1)
            L = self._limbs[:, j]
            acc = (acc + (((a_hi * L) & _M26) << 27) + a_lo * L) & _M53
            tail += self._limbs_f[:, j] * (tail_j * 2.0 ** -53)
        frac = acc.astype(np.float64) * 2.0 ** -53 + tail
        frac -= np.floor(frac)
        return frac

    def phases(self, alpha: float) -> np.ndarray:
        """e(alpha * n^k) as complex128."""
        return np.exp((2j * np.pi) * self.fractions(alpha))


def phase_fraction_exact(alpha: float, n: int, k: int) -> float:
    """Scalar reference route: frac(alpha * n^k) via big-integer arithmetic.

    Kept deliberately independent of PhasePowers so the two can be checked
    against each other.
    """
    num, den = float(alpha).as_integer_ratio()
    r = (num * int(n) ** k) % den
    return r / den


@dataclass(eq=False)
class WeightedSequence:
    """Support points with positive weights and a kind tag."""

    support: np.ndarray
    weights: np.ndarray
    kind: str
    _powers: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.support = np.asarray(self.support, dtype=np.int64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.kind not in SEQUENCE_KINDS:
            raise ParameterDomain(f"unknown sequence kind {self.kind!r}")
        if self.support.shape != self.weights.shape or self.support.ndim != 1:
            raise ParameterDomain("support and weights must be equal-length vectors")
        if self.support.size:
            if np.any(np.diff(self.support) <= 0):
                raise ParameterDomain("support must be strictly ascending")
            if np.any(self.weights <= 0):
                raise ParameterDomain("weights must be strictly positive")

    def __len__(self) -> int:
        return int(self.support.size)

    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def powers(self, k: int) -> PhasePowers:
        if k not in self._powers:
            self._powers[k] = PhasePowers(self.support, k)
        return self._powers[k]


def build_sequence(ctx: ProblemContext, kind: str) -> WeightedSequence:
    """Construct the window sequence for a context.

    Support is the integers (or primes) n with x - y < n <= x + y.  The
    ``integer_log`` kind drops n = 1, whose weight would vanish.

    Raises empty-window when the support is empty.
    """
    if kind not in SEQUENCE_KINDS:
        raise ParameterDomain(f"unknown sequence kind {kind!r}")
    x, y = ctx.x, ctx.y
    if kind == "prime_log":
        win = arith.prime_window(x, y)
        support = win.prime_array()
        weights = win.weight_array()
    else:
        lo = math.floor(x - y) + 1
        hi = math.floor(x + y)
        if kind == "integer_log":
            lo = max(lo, 2)
        support = np.arange(max(lo, 1), hi + 1, dtype=np.int64)
        if kind == "integer_log":
            weights = np.log(support.astype(np.float64))
        else:
            weights = np.ones(support.size, dtype=np.float64)
    if support.size == 0:
        raise EmptyWindow(f"no {kind} support in ({x - y}, {x + y}]")
    return WeightedSequence(support=support, weights=weights, kind=kind)


def eval_sum(seq: WeightedSequence, k: int, alpha: float) -> complex:
    """f(alpha) = sum w(n) e(alpha n^k) with exactly reduced phases."""
    if len(seq) == 0:
        return 0.0 + 0.0j
    ph = seq.powers(k).phases(alpha)
    return complex(np.dot(seq.weights, ph))


@dataclass(frozen=True)
class SupScanReport:
    """Grid supremum of |f| over one region of the circle."""

    region: str
    grid_size: int
    points_in_region: int
    sup_abs: float
    argmax_alpha: float
    nearest_rational: RationalPoint


def sup_scan(
    seq: WeightedSequence,
    k: int,
    arcs: "ArcDecomposition",
    region: str,
    grid_size: int,
) -> SupScanReport:
    """Scan |f| over the grid points j/grid_size lying in a region.

    Region membership is decided by `arcs.classify` on the decomposition's
    parameters, i.e. by the minimal Dirichlet witness, not by interval
    arithmetic.  The reported witness is the rational point attached to
    the argmax.

    Raises empty-region when no grid point falls in the region.
    """
    if region not in ("major", "minor", "full"):
        raise ParameterDomain(f"unknown region {region!r}")
    if grid_size < 2:
        raise ParameterDomain(f"need grid_size >= 2, got {grid_size}")
    params = arcs.params
    pw = seq.powers(k)
    w = seq.weights
    best_val = -1.0
    best_alpha = 0.0
    count = 0
    for j in range(grid_size):
        alpha = j / grid_size
        if region != "full":
            label, _ = classify(alpha, params)
            if label != region:
                continue
        count += 1
        val = abs(np.dot(w, pw.phases(alpha)))
        if val > best_val:
            best_val = val
            best_alpha = alpha
    if count == 0:
        raise EmptyRegion(f"no grid points in region {region!r}")
    return SupScanReport(
        region=region,
        grid_size=grid_size,
        points_in_region=count,
        sup_abs=float(best_val),
        argmax_alpha=best_alpha,
        nearest_rational=dirichlet_approx(best_alpha, params.Q),
    )


def _t_exponent(k: int) -> int:
    return 2 if k == 2 else k * k - k + 1


@dataclass(frozen=True)
class DichotomyReport:
    """Observed short unit-weight sum against the two regime bounds.

    ``approx`` is the rational witness at level x^(k-1) * y^(1 - k*rho)
    when its denominator stays below y^(k*rho), else None; ``bound_k3``
    applies in that approximable regime and ``bound_k1`` always.  Both are
    diagnostics: the regime inequalities carry unspecified constants, so
    nothing here passes or fails.
    """

    alpha: float
    rho: float
    observed: float
    bound_k1: float
    bound_k3: float
    approx: Optional[RationalPoint]
    q_bound: float


def dichotomy_report(ctx: ProblemContext, rho: float, alpha: float) -> DichotomyReport:
    """Compare |sum over x < n <= x + y of e(alpha n^k)| with regime bounds.

    Preconditions: 0 < rho <= 1/t(k) with t(2) = 2, t(k) = k^2 - k + 1
    otherwise, and the context exponent theta must satisfy
    1/(2 - t(k) * rho) <= theta <= 1.
    """
    k = ctx.k
    t_k = _t_exponent(k)
    if not (0 < rho <= 1.0 / t_k):
        raise ParameterDomain(f"need 0 < rho <= 1/{t_k}, got {rho}")
    lo_theta = 1.0 / (2.0 - t_k * rho)
    if not (lo_theta <= ctx.theta <= 1.0):
        raise ParameterDomain(
            f"need theta in [{lo_theta}, 1], got theta={ctx.theta}"
        )
    if not (0 <= alpha < 1):
        raise ParameterDomain(f"need alpha in [0, 1), got {alpha}")
    x, y = ctx.x, ctx.y
    lo = math.floor(x) + 1
    hi = math.floor(x + y)
    if hi < lo:
        raise EmptyWindow(f"no integers in ({x}, {x + y}]")
    support = np.arange(lo, hi + 1, dtype=np.int64)
    seq = WeightedSequence(
        support=support, weights=np.ones(support.size), kind="unit"
    )
    observed = abs(eval_sum(seq, k, alpha))
    q_bound = x ** (k - 1) * y ** (1.0 - k * rho)
    pt = dirichlet_approx(alpha, q_bound)
    q_ceiling = y ** (k * rho)
    approx = pt if pt.q <= q_ceiling else None
    bound_k1 = y ** (1.0 - rho)
    if approx is not None:
        bound_k3 = w_k(k, pt.q) * y / (1.0 + y * x ** (k - 1) * abs(pt.beta))
    else:
        bound_k3 = float("inf")
    return DichotomyReport(
        alpha=alpha,
        rho=rho,
        observed=float(observed),
        bound_k1=float(bound_k1),
        bound_k3=float(bound_k3),
        approx=approx,
        q_bound=float(q_bound),
    )
