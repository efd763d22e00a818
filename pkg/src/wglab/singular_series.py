"""Gauss sums and the truncated singular series.

For a modulus q and exponent k the complete Gauss sum over units is

    S(q, a) = sum over b in (Z/q)* of e(a b^k / q),

and the arithmetic coefficient attached to a target n is

    A(q, n) = phi(q)^(-s) * sum over units a of S(q, a)^s * e(-a n / q).

The truncated singular series sigma(n, Q0) is the partial sum of A(q, n)
over q <= Q0 (the q = 1 term is 1).  A(q, n) is multiplicative in q, so
the batch path assembles values from prime-power tables.

Computation uses the discrete Fourier transform twice: the row
(S(q, a))_a is the conjugate DFT of the histogram of b^k mod q over
units, and the row (A(q, n mod q))_n is a DFT of the masked s-th powers
of that row.  Everything is cached per (q, k) and (q, k, s).  A direct
summation route (`a_coefficient_direct`) is kept alongside the table
route; the two must agree and the test suite holds them to that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import ProblemContext, euler_phi, factorize
from .errors import ImaginaryResidue, NotCoprime, ParameterDomain, RangeTooLarge

_Q_CEILING = 200_000
_IMAG_TOL = 1e-8
_PARTIAL_FLOOR = 1e-12


@lru_cache(maxsize=4096)
def _unit_mask(q: int) -> np.ndarray:
    r = np.arange(q, dtype=np.int64)
    return np.gcd(r, q) == 1


@lru_cache(maxsize=4096)
def _gauss_row(q: int, k: int) -> np.ndarray:
    """(S(q, a)) for a = 0..q-1, as one conjugated DFT of the k-th power
    histogram over units."""
    b = np.arange(q, dtype=np.int64)[_unit_mask(q)]
    res = np.ones_like(b)
    for _ in range(k):
        res = (res * b) % q
    hist = np.bincount(res, minlength=q).astype(np.float64)
    return np.conj(np.fft.fft(hist))


@dataclass(frozen=True)
class GaussSumValue:
    """S(q, a) together with the inputs that produced it."""

    q: int
    a: int
    k: int
    value: complex


def gauss_sum(q: int, a: int, k: int) -> GaussSumValue:
    """S(q, a) for gcd(a, q) = 1, by direct summation over units.

    Each b^k is reduced mod q by modular exponentiation, so the phases
    e(a b^k / q) are exact rationals of denominator q before the final
    complex sum.  This is the reference route; the table machinery below
    reaches the same values through FFTs and is tested against it.

    Raises not-coprime when gcd(a, q) > 1.
    """
    q, a, k = int(q), int(a), int(k)
    if q < 1:
        raise ParameterDomain(f"need q >= 1, got {q}")
    if k < 2:
        raise ParameterDomain(f"need k >= 2, got {k}")
    if q > _Q_CEILING:
        raise RangeTooLarge(f"q={q} exceeds modulus ceiling {_Q_CEILING}")
    if math.gcd(a % q if q > 1 else 1, q) != 1:
        raise NotCoprime(f"gcd({a}, {q}) > 1")
    if q == 1:
        return GaussSumValue(q=1, a=a, k=k, value=1.0 + 0.0j)
    total = 0.0 + 0.0j
    for b in range(1, q):
        if math.gcd(b, q) == 1:
            r = (a * pow(b, k, q)) % q
            total += complex(math.cos(2 * math.pi * r / q), math.sin(2 * math.pi * r / q))
    return GaussSumValue(q=q, a=a, k=k, value=total)


def a_coefficient_direct(q: int, n: int, k: int, s: int) -> float:
    """A(q, n) by direct summation over the unit group.

    Phases e(-a n / q) are built from the exact residue (a * n) mod q, so
    the only floating-point steps are the DFT row and the final sum.
    """
    q, n, k, s = int(q), int(n), int(k), int(s)
    if q < 1 or n < 0:
        raise ParameterDomain(f"need q >= 1, n >= 0, got q={q}, n={n}")
    if s < 2 or k < 2:
        raise ParameterDomain(f"need k >= 2, s >= 2, got k={k}, s={s}")
    if q == 1:
        return 1.0
    if q > _Q_CEILING:
        raise RangeTooLarge(f"q={q} exceeds modulus ceiling {_Q_CEILING}")
    row = _gauss_row(q, k)
    units = np.flatnonzero(_unit_mask(q))
    res = (units * (n % q)) % q
    phases = np.exp((-2j * np.pi / q) * res)
    total = np.sum(row[units] ** s * phases)
    phi = euler_phi(q)
    val = total / float(phi) ** s
    if abs(val.imag) > _IMAG_TOL:
        raise ImaginaryResidue(
            f"A({q}, {n}) has imaginary residue {val.imag:.3e}"
        )
    return float(val.real)


@lru_cache(maxsize=4096)
def _pp_table(pp: int, k: int, s: int) -> np.ndarray:
    """A(pp, r) for r = 0..pp-1 at a prime power pp, via a second DFT.

    With g(a) = S(pp, a)^s on units (0 elsewhere), the DFT of g evaluated
    at index r equals sum_a g(a) e(-a r / pp), which is phi^s * A(pp, r).
    """
    row = _gauss_row(pp, k)
    g = np.where(_unit_mask(pp), row ** s, 0.0 + 0.0j)
    vals = np.fft.fft(g) / float(euler_phi(pp)) ** s
    worst = float(np.max(np.abs(vals.imag)))
    if worst > _IMAG_TOL:
        raise ImaginaryResidue(
            f"A-table at modulus {pp} has imaginary residue {worst:.3e}"
        )
    return vals.real.copy()


def a_coefficient(q: int, n: int, k: int, s: int) -> float:
    """A(q, n) assembled multiplicatively from prime-power tables."""
    q, n = int(q), int(n)
    if q < 1:
        raise ParameterDomain(f"need q >= 1, got {q}")
    if q > _Q_CEILING:
        raise RangeTooLarge(f"q={q} exceeds modulus ceiling {_Q_CEILING}")
    out = 1.0
    for p, e in factorize(q):
        pp = p ** e
        out *= float(_pp_table(pp, k, s)[n % pp])
    return out


@dataclass(frozen=True)
class SeriesTruncation:
    """sigma(n, q0) together with the partial terms that were kept."""

    n: int
    k: int
    s: int
    q0: int
    value: float
    partials: tuple[tuple[int, float], ...]  # (q, A(q, n)) with |A| > 1e-12

    def trajectory(self) -> list[tuple[int, float]]:
        """Running partial sums (q, sigma up to q) over the kept terms."""
        out = []
        acc = 0.0
        for q, a in self.partials:
            acc += a
            out.append((q, acc))
        return out


def truncated_sigma(n: int, ctx: ProblemContext, q_max: int) -> SeriesTruncation:
    """Partial singular series sum over q <= q_max, ascending in q.

    Terms with |A(q, n)| <= 1e-12 are dropped from the records and from
    the sum, keeping the scalar path and the batch path summing exactly
    the same floats in the same order.
    """
    n = int(n)
    if n < 0:
        raise ParameterDomain(f"need n >= 0, got {n}")
    if q_max < 1:
        raise ParameterDomain(f"need q_max >= 1, got {q_max}")
    if q_max > _Q_CEILING:
        raise RangeTooLarge(f"q_max={q_max} exceeds modulus ceiling {_Q_CEILING}")
    partials: list[tuple[int, float]] = [(1, 1.0)]
    value = 1.0
    for q in range(2, q_max + 1):
        a = a_coefficient(q, n, ctx.k, ctx.s)
        if abs(a) > _PARTIAL_FLOOR:
            partials.append((q, a))
            value += a
    return SeriesTruncation(
        n=n, k=ctx.k, s=ctx.s, q0=int(q_max), value=value, partials=tuple(partials)
    )


def sigma_batch(
    n_values: np.ndarray,
    ctx: ProblemContext,
    q_max: int,
    checkpoint: int | None = None,
) -> tuple[np.ndarray, np.ndarray | None]:
    """sigma(n, q_max) for a vector of targets, with an optional snapshot.

    Returns (values, snapshot) where snapshot holds the partial sums at
    q = checkpoint (None when no checkpoint was requested).  The per-q
    term for the whole vector is assembled from the same prime-power
    tables as the scalar route and added in ascending q order, so batch
    and scalar results agree bit for bit.
    """
    n_values = np.asarray(n_values, dtype=np.int64)
    if n_values.size and int(n_values.min()) < 0:
        raise ParameterDomain("targets must be nonnegative")
    if q_max < 1:
        raise ParameterDomain(f"need q_max >= 1, got {q_max}")
    if q_max > _Q_CEILING:
        raise RangeTooLarge(f"q_max={q_max} exceeds modulus ceiling {_Q_CEILING}")
    if checkpoint is not None and not (1 <= checkpoint <= q_max):
        raise ParameterDomain(f"checkpoint must lie in [1, q_max], got {checkpoint}")
    values = np.ones(n_values.size, dtype=np.float64)
    snapshot = values.copy() if checkpoint == 1 else None
    for q in range(2, q_max + 1):
        term = np.ones(n_values.size, dtype=np.float64)
        for p, e in factorize(q):
            pp = p ** e
            term *= _pp_table(pp, ctx.k, ctx.s)[n_values % pp]
        term[np.abs(term) <= _PARTIAL_FLOOR] = 0.0
        values = values + term
        if checkpoint is not None and q == checkpoint:
            snapshot = values.copy()
    return values, snapshot


def sigma_tail_sample(n: int, ctx: ProblemContext, q_max: int, stride: int = 7) -> float:
    """Heuristic tail gauge: stride-sampled sum of |A(q, n)| over
    q_max < q <= 2 q_max, scaled back up by the stride.

    This is a diagnostic, not a bound.
    """
    if stride < 1:
        raise ParameterDomain(f"need stride >= 1, got {stride}")
    if 2 * q_max > _Q_CEILING:
        raise RangeTooLarge(f"2*q_max={2 * q_max} exceeds modulus ceiling")
    acc = 0.0
    for q in range(q_max + 1, 2 * q_max + 1, stride):
        acc += abs(a_coefficient(q, n, ctx.k, ctx.s))
    return acc * stride
