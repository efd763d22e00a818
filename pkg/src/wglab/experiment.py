"""Desk-scale experiment pipeline: main-term prediction, arc quadrature,
the exceptional-set scan, minor-arc moment diagnostics, and artifact
persistence.

The headline object is the exceptional-set report for a window
(N, N + x^(k-1) y]: every admissible n in the window gets its exact
weighted representation count rho(n) (meet-in-the-middle, batched), its
main-term prediction sigma(n, Q0) * j(n), and a two-sided deviation flag
at threshold y^(s-1) x^(1-k) / log x.

The deviation test here is |rho - prediction| >= threshold.  A one-sided
reading (only an excess counts) is also tallied and reported alongside,
since the two counts differ materially at desk scale.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import cache
from .arcs import ArcDecomposition, ArcParams, major_measure
from .arith import PrimeWindow, ProblemContext, modulus_R, prime_window
from .errors import EmptyRegion, EmptyWindow, OverlapDetected, ParameterDomain, UnsupportedKind
from .expsums import build_sequence, classify
from .representations import rho_mitm
from .singular_integral import j_array, j_integral
from .singular_series import SeriesTruncation, sigma_batch, truncated_sigma

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class MajorArcPrediction:
    """Main-term factors for one target n."""

    n: int
    sigma: float
    jay: float
    main_term: float
    admissible: bool


def predict(n: int, ctx: ProblemContext, q0: int) -> MajorArcPrediction:
    """sigma(n, q0) * j(n); computed whether or not n is admissible."""
    from .arith import is_admissible

    sigma = truncated_sigma(n, ctx, q0).value
    jay = j_integral(n, ctx)
    return MajorArcPrediction(
        n=int(n),
        sigma=sigma,
        jay=jay,
        main_term=sigma * jay,
        admissible=is_admissible(int(n), ctx),
    )


def _phase_minus_n_alpha(n: int, alpha: float) -> complex:
    # e(-n alpha) with the phase reduced exactly (n alpha can exceed 2^52)
    num, den = float(alpha).as_integer_ratio()
    frac = ((num * n) % den) / den
    return complex(math.cos(2 * math.pi * frac), -math.sin(2 * math.pi * frac))


def major_arc_rho_numeric(
    n: int,
    ctx: ProblemContext,
    params: ArcParams,
    nodes_per_arc: int = 32,
    region: str = "major",
) -> float:
    """Quadrature of the integral of f^s e(-n alpha) over a region.

    region selects the domain: "major" integrates over the enumerated
    major intervals, "full" over the whole circle [0, 1), "zero_arc" over
    the single glued arc at the origin.  Composite 16-point Gauss-Legendre
    per interval; emits a warning when the phase of f^s jumps by more
    than pi/4 between adjacent nodes (under-resolution).

    Returns the real part; the integrand's imaginary parts cancel over
    any region symmetric under alpha -> 1 - alpha.
    """
    if nodes_per_arc < 8:
        raise ParameterDomain(f"need nodes_per_arc >= 8, got {nodes_per_arc}")
    n = int(n)
    seq = build_sequence(ctx, "prime_log")
    pw = seq.powers(ctx.k)
    w = seq.weights

    if region == "major":
        decomp = ArcDecomposition.build(params)
        intervals = [
            (m.center - m.half_width, m.center + m.half_width) for m in decomp.intervals
        ]
    elif region == "full":
        intervals = [(0.0, 1.0)]
    elif region == "zero_arc":
        hw = 1.0 / params.Q
        intervals = [(-hw, hw)]
    else:
        raise ParameterDomain(f"unknown region {region!r}")

    panels = max(1, math.ceil(nodes_per_arc / 16))
    total = 0.0 + 0.0j
    worst_jump = 0.0
    for lo, hi in intervals:
        edges = np.linspace(lo, hi, panels + 1)
        half = 0.5 * (edges[1] - edges[0])
        mid = 0.5 * (edges[1:] + edges[:-1])
        pts = (mid[:, None] + half * _GL_NODES[None, :]).ravel()
        fs = np.empty(pts.size, dtype=np.complex128)
        vals = np.empty(pts.size, dtype=np.complex128)
        for i, alpha in enumerate(pts.tolist()):
            f = complex(np.dot(w, pw.phases(alpha)))
            fs[i] = f ** ctx.s
            vals[i] = fs[i] * _phase_minus_n_alpha(n, alpha)
        if pts.size > 1:
            jumps = np.abs(np.angle(fs[1:] * np.conj(fs[:-1])))
            worst_jump = max(worst_jump, float(np.max(jumps)))
        total += half * np.dot(vals, np.tile(_GL_WEIGHTS, panels))
    if worst_jump > math.pi / 4:
        warnings.warn(
            f"arc quadrature under-resolved: adjacent-node phase jump "
            f"{worst_jump:.3f} rad exceeds pi/4; increase nodes_per_arc",
            RuntimeWarning,
            stacklevel=2,
        )
    return float(total.real)


@dataclass(frozen=True)
class RatioSummary:
    min: float
    median: float
    max: float


@dataclass(eq=False)
class PerNDetail:
    """Column arrays for the per-n detail stream of a scan."""

    n: np.ndarray
    rho: np.ndarray
    tuple_count: np.ndarray
    sigma: np.ndarray
    jay: np.ndarray
    ratio: np.ndarray
    flagged: np.ndarray


@dataclass(eq=False)
class ExceptionalReport:
    """Outcome of one exceptional-set scan."""

    ctx: ProblemContext
    q0: int
    window: tuple[int, int]  # integer targets searched, both ends inclusive
    scanned: int
    exceptional: int
    exceptional_one_sided: int
    threshold: float
    ratios: Optional[RatioSummary]
    per_n: Optional[PerNDetail]

    def exceptional_fraction(self) -> float:
        return self.exceptional / self.scanned if self.scanned else 0.0


def _admissible_targets(ctx: ProblemContext, n_lo: int, n_hi: int) -> np.ndarray:
    ns = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    R = modulus_R(ctx.k)
    mask = ns % R == ctx.s % R
    if ctx.k == 3 and ctx.s == 7:
        mask &= ns % 9 != 0
    return ns[mask]


def exceptional_scan(
    ctx: ProblemContext,
    q0: int,
    batch_size: int = 4096,
    threads: int = 1,
    keep_per_n: bool = True,
    cache_dir: Optional[str] = None,
) -> ExceptionalReport:
    """Scan every admissible n in (N, N + x^(k-1) y] for main-term failure.

    rho comes from the batched meet-in-the-middle counter, sigma from the
    vectorized singular-series batch (optionally cached), jay from the
    shared convolution table.  Flags use the two-sided threshold; the
    one-sided count (excess only) is recorded alongside.

    Raises empty-window when the window contains no integers at all; a
    window with integers but no admissible ones yields scanned=0.
    """
    N = ctx.N
    n_lo = math.floor(N) + 1
    n_hi = math.floor(N + ctx.window_width)
    if n_hi < n_lo:
        raise EmptyWindow(f"no integers in ({N}, {N + ctx.window_width}]")
    threshold = ctx.y ** (ctx.s - 1) * ctx.x ** (1 - ctx.k) / math.log(ctx.x)
    ns = _admissible_targets(ctx, n_lo, n_hi)
    if ns.size == 0:
        return ExceptionalReport(
            ctx=ctx, q0=q0, window=(n_lo, n_hi), scanned=0, exceptional=0,
            exceptional_one_sided=0, threshold=threshold, ratios=None, per_n=None,
        )

    records = rho_mitm(ns, ctx, batch_size=batch_size, threads=threads)
    rho = np.array([r.value for r in records])
    tuples = np.array([r.tuple_count for r in records], dtype=np.int64)

    sigma = _sigma_batch_cached(ns, ctx, q0, cache_dir)

    offset, table = j_array(ctx)
    idx = ns - offset
    inside = (idx >= 0) & (idx < table.size)
    jay = np.where(inside, table[np.clip(idx, 0, table.size - 1)], 0.0)

    main = sigma * jay
    dev = rho - main
    flagged = np.abs(dev) >= threshold
    one_sided = dev >= threshold

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(main > 0, rho / main, np.nan)
    finite = ratio[np.isfinite(ratio)]
    ratios = (
        RatioSummary(
            min=float(np.min(finite)),
            median=float(np.median(finite)),
            max=float(np.max(finite)),
        )
        if finite.size
        else None
    )
    per_n = (
        PerNDetail(
            n=ns, rho=rho, tuple_count=tuples, sigma=sigma, jay=jay,
            ratio=ratio, flagged=flagged,
        )
        if keep_per_n
        else None
    )
    return ExceptionalReport(
        ctx=ctx,
        q0=q0,
        window=(n_lo, n_hi),
        scanned=int(ns.size),
        exceptional=int(np.count_nonzero(flagged)),
        exceptional_one_sided=int(np.count_nonzero(one_sided)),
        threshold=threshold,
        ratios=ratios,
        per_n=per_n,
    )


def _sigma_batch_cached(
    ns: np.ndarray, ctx: ProblemContext, q0: int, cache_dir: Optional[str]
) -> np.ndarray:
    if cache_dir is None:
        values, _ = sigma_batch(ns, ctx, q0)
        return values
    key = {
        "kind": "sigma-batch",
        "k": ctx.k,
        "s": ctx.s,
        "q0": int(q0),
        "n_lo": int(ns[0]),
        "n_hi": int(ns[-1]),
        "count": int(ns.size),
    }
    try:
        hit = cache.load(cache_dir, "sigbatch", key)
        if np.array_equal(hit["n"], ns):
            return hit["sigma"]
    except (cache.CacheMiss, cache.CacheVersionMismatch):
        pass
    values, _ = sigma_batch(ns, ctx, q0)
    cache.store(cache_dir, "sigbatch", key, {"n": ns, "sigma": values})
    return values


def minor_arc_moment(
    ctx: ProblemContext,
    params: ArcParams,
    t: int,
    grid_size: int,
    region: str = "minor",
) -> float:
    """Riemann estimate of the integral of |f|^t over the minor arcs.

    region="full" integrates over the whole grid instead (used to
    calibrate the grid against the exact even moments).  When no grid
    point is minor and the arc family provably blankets the circle, the
    minor contribution is 0; an uncovered empty grid raises empty-region.
    """
    if grid_size < 10 ** 3:
        raise ParameterDomain(f"need grid_size >= 1000, got {grid_size}")
    if t < 1:
        raise ParameterDomain(f"need t >= 1, got {t}")
    if region not in ("minor", "full"):
        raise ParameterDomain(f"unknown region {region!r}")
    seq = build_sequence(ctx, "prime_log")
    pw = seq.powers(ctx.k)
    w = seq.weights
    acc = 0.0
    hits = 0
    for j in range(grid_size):
        alpha = j / grid_size
        if region == "minor":
            label, _ = classify(alpha, params)
            if label != "minor":
                continue
        hits += 1
        acc += abs(np.dot(w, pw.phases(alpha))) ** t
    if hits == 0:
        try:
            covered = major_measure(params) >= 0.999
        except OverlapDetected:
            covered = True  # arcs overlap: the major family blankets the grid
        if covered:
            return 0.0
        raise EmptyRegion("no minor grid points; refine the grid")
    return acc / grid_size


def cache_store(obj, cache_dir: str) -> str:
    """Persist a PrimeWindow or SeriesTruncation; returns the file path."""
    if isinstance(obj, PrimeWindow):
        key = {"kind": "window", "x": float(obj.x), "y": float(obj.y)}
        arrays = {
            "primes": np.asarray(obj.primes, dtype=np.int64),
            "weights": np.asarray(obj.weights, dtype=np.float64),
        }
        return str(cache.store(cache_dir, "window", key, arrays))
    if isinstance(obj, SeriesTruncation):
        key = {
            "kind": "sigma",
            "n": obj.n,
            "k": obj.k,
            "s": obj.s,
            "q0": obj.q0,
        }
        qs = np.array([q for q, _ in obj.partials], dtype=np.int64)
        vals = np.array([v for _, v in obj.partials], dtype=np.float64)
        arrays = {"q": qs, "a": vals, "value": np.array([obj.value])}
        return str(cache.store(cache_dir, "sigma", key, arrays))
    raise UnsupportedKind(f"cannot cache object of type {type(obj).__name__}")


def cache_load(descriptor: dict, cache_dir: str):
    """Load a previously stored artifact by its key descriptor.

    descriptor["kind"] selects the artifact type: "window" needs x and y;
    "sigma" needs n, k, s, q0.  Raises cache-miss / cache-version from
    the underlying store.
    """
    kind = descriptor.get("kind")
    if kind == "window":
        key = {"kind": "window", "x": float(descriptor["x"]), "y": float(descriptor["y"])}
        arrays = cache.load(cache_dir, "window", key)
        return PrimeWindow(
            x=key["x"],
            y=key["y"],
            primes=tuple(int(p) for p in arrays["primes"]),
            weights=tuple(float(v) for v in arrays["weights"]),
        )
    if kind == "sigma":
        key = {
            "kind": "sigma",
            "n": int(descriptor["n"]),
            "k": int(descriptor["k"]),
            "s": int(descriptor["s"]),
            "q0": int(descriptor["q0"]),
        }
        arrays = cache.load(cache_dir, "sigma", key)
        partials = tuple(
            (int(q), float(v)) for q, v in zip(arrays["q"], arrays["a"])
        )
        return SeriesTruncation(
            n=key["n"], k=key["k"], s=key["s"], q0=key["q0"],
            value=float(arrays["value"][0]), partials=partials,
        )
    raise UnsupportedKind(f"unknown cache descriptor kind {kind!r}")


def window_cached(x: float, y: float, cache_dir: Optional[str]) -> PrimeWindow:
    """Prime window with read-through caching."""
    if cache_dir is None:
        return prime_window(x, y)
    try:
        return cache_load({"kind": "window", "x": x, "y": y}, cache_dir)
    except (cache.CacheMiss, cache.CacheVersionMismatch):
        win = prime_window(x, y)
        cache_store(win, cache_dir)
        return win
