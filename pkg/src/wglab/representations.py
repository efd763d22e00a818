"""Counting weighted representations n = p_1^k + ... + p_s^k.

rho(n) is the log-weighted count: the sum of log(p_1)...log(p_s) over
ordered s-tuples of primes from the window (x - y, x + y] whose k-th
powers sum to n.  Two routes are provided:

* `rho_naive` - direct nested enumeration with range pruning; the
  reference implementation, exponential in s.
* `rho_mitm`  - meet-in-the-middle: aggregate all ceil(s/2)-fold and
  floor(s/2)-fold sums into sorted unique tables, then join.  Handles
  whole batches of targets against one pair of tables.

Both count ordered tuples; they must agree exactly up to float
associativity, and the tests pin that.

The even moment of the window exponential sum comes out of the same
table machinery: the mean of |f|^(2t) over the circle equals the sum of
the squared aggregated t-fold weights (orthogonality of characters),
computed here without touching any alpha grid.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .arith import ProblemContext, prime_window
from .errors import EmptyWindow, EnumerationTooLarge, MemoryBudgetExceeded, ParameterDomain

_ENUM_CEILING = 10 ** 8
_TABLE_CEILING = 2 ** 31


@dataclass(frozen=True)
class RepresentationRecord:
    n: int
    value: float
    tuple_count: int


@dataclass(frozen=True)
class MomentValue:
    t: int
    value: float


def _window_powers(ctx: ProblemContext) -> tuple[list[int], list[float]]:
    win = prime_window(ctx.x, ctx.y)
    if not win.primes:
        raise EmptyWindow(f"no primes in ({ctx.x - ctx.y}, {ctx.x + ctx.y}]")
    pk = [p ** ctx.k for p in win.primes]
    return pk, list(win.weights)


def rho_naive(n: int, ctx: ProblemContext) -> RepresentationRecord:
    """rho(n) by full nested enumeration over ordered tuples.

    Pruned by the running min/max of what the remaining slots can still
    contribute; the guard rejects windows where the unpruned tuple space
    exceeds 10^8.
    """
    n = int(n)
    pk, logs = _window_powers(ctx)
    m, s = len(pk), ctx.s
    if m ** s > _ENUM_CEILING:
        raise EnumerationTooLarge(f"{m}^{s} ordered tuples exceed {_ENUM_CEILING}")
    lo_pk, hi_pk = pk[0], pk[-1]
    total = 0.0
    tuples = 0

    def descend(depth: int, remaining: int, weight: float) -> None:
        nonlocal total, tuples
        slots = s - depth
        if remaining < slots * lo_pk or remaining > slots * hi_pk:
            return
        if depth == s - 1:
            # final slot must hit remaining exactly
            i = _bisect(pk, remaining)
            if i >= 0:
                total += weight * logs[i]
                tuples += 1
            return
        for i in range(m):
            v = pk[i]
            if v > remaining - (slots - 1) * lo_pk:
                break
            descend(depth + 1, remaining - v, weight * logs[i])

    descend(0, n, 1.0)
    return RepresentationRecord(n=n, value=total, tuple_count=tuples)


def _bisect(sorted_list: list[int], target: int) -> int:
    import bisect

    i = bisect.bisect_left(sorted_list, target)
    if i < len(sorted_list) and sorted_list[i] == target:
        return i
    return -1


@dataclass(eq=False)
class HalfSumTable:
    """Aggregated fold-sums: unique values, total weights, tuple counts."""

    fold: int
    values: np.ndarray  # int64, ascending unique
    weights: np.ndarray  # float64, summed products of logs
    counts: np.ndarray  # int64, ordered tuple counts


def _fold_table_int64(pk: list[int], logs: list[float], fold: int) -> HalfSumTable:
    m = len(pk)
    if m ** fold > _TABLE_CEILING:
        raise MemoryBudgetExceeded(
            f"{m}^{fold} half-sums exceed the 2^31 table budget"
        )
    base_v = np.asarray(pk, dtype=np.int64)
    base_w = np.asarray(logs, dtype=np.float64)
    vals, wts, cnt = base_v, base_w, np.ones(m, dtype=np.int64)
    for _ in range(fold - 1):
        raw = (vals[:, None] + base_v[None, :]).ravel()
        rw = (wts[:, None] * base_w[None, :]).ravel()
        rc = np.repeat(cnt, m)
        vals, inv = np.unique(raw, return_inverse=True)
        wts = np.bincount(inv, weights=rw)
        cnt = np.bincount(inv, weights=rc).astype(np.int64)
    return HalfSumTable(fold=fold, values=vals, weights=wts, counts=cnt)


def _fold_table_dict(pk: list[int], logs: list[float], fold: int) -> dict:
    # big-integer route: k-th powers beyond int64; Python-int keyed sums
    if len(pk) ** fold > _TABLE_CEILING:
        raise MemoryBudgetExceeded(
            f"{len(pk)}^{fold} half-sums exceed the 2^31 table budget"
        )
    table: dict[int, tuple[float, int]] = {v: (w, 1) for v, w in zip(pk, logs)}
    for _ in range(fold - 1):
        nxt: dict[int, tuple[float, int]] = {}
        for v in sorted(table):
            w, c = table[v]
            for p_k, lg in zip(pk, logs):
                key = v + p_k
                ow, oc = nxt.get(key, (0.0, 0))
                nxt[key] = (ow + w * lg, oc + c)
        table = nxt
    return table


def _build_tables(ctx: ProblemContext):
    pk, logs = _window_powers(ctx)
    s1 = (ctx.s + 1) // 2
    s2 = ctx.s - s1  # >= 1 since s >= 2
    if ctx.s * pk[-1] >= 2 ** 62:
        d1 = _fold_table_dict(pk, logs, s1)
        d2 = d1 if s2 == s1 else _fold_table_dict(pk, logs, s2)
        return "dict", d1, d2, pk
    t1 = _fold_table_int64(pk, logs, s1)
    t2 = t1 if s2 == s1 else _fold_table_int64(pk, logs, s2)
    return "int64", t1, t2, pk


def _join_int64(n: int, t1: HalfSumTable, t2: HalfSumTable) -> tuple[float, int]:
    need = n - t2.values
    idx = np.searchsorted(t1.values, need)
    ok = (idx < t1.values.size) & (need >= t1.values[0])
    idx_c = np.minimum(idx, t1.values.size - 1)
    ok &= t1.values[idx_c] == need
    if not np.any(ok):
        return 0.0, 0
    w = float(np.dot(t2.weights[ok], t1.weights[idx_c[ok]]))
    c = int(np.dot(t2.counts[ok], t1.counts[idx_c[ok]]))
    return w, c


def _join_dict(n: int, d1: dict, d2: dict) -> tuple[float, int]:
    total, cnt = 0.0, 0
    for v in sorted(d2):
        w2, c2 = d2[v]
        hit = d1.get(n - v)
        if hit is not None:
            total += w2 * hit[0]
            cnt += c2 * hit[1]
    return total, cnt


def rho_mitm(
    n_values,
    ctx: ProblemContext,
    batch_size: int = 4096,
    threads: int = 1,
) -> list[RepresentationRecord]:
    """rho over a batch of targets by meet-in-the-middle join.

    One pair of half-sum tables serves all targets.  Batches may be
    joined in worker threads; records come back in input order either
    way, and every float is produced by the same per-target dot product,
    so the thread count cannot change any value.
    """
    if batch_size < 1:
        raise ParameterDomain(f"need batch_size >= 1, got {batch_size}")
    if threads < 1:
        raise ParameterDomain(f"need threads >= 1, got {threads}")
    ns = [int(v) for v in np.atleast_1d(np.asarray(n_values)).tolist()]
    mode, t1, t2, pk = _build_tables(ctx)

    span_lo = ctx.s * pk[0]
    span_hi = ctx.s * pk[-1]

    def one(n: int) -> RepresentationRecord:
        if n < span_lo or n > span_hi:
            return RepresentationRecord(n=n, value=0.0, tuple_count=0)
        if mode == "int64":
            w, c = _join_int64(n, t1, t2)
        else:
            w, c = _join_dict(n, t1, t2)
        return RepresentationRecord(n=n, value=w, tuple_count=c)

    if threads == 1:
        return [one(n) for n in ns]
    batches = [ns[i : i + batch_size] for i in range(0, len(ns), batch_size)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        chunks = list(pool.map(lambda b: [one(n) for n in b], batches))
    return [rec for chunk in chunks for rec in chunk]


def moment(t: int, ctx: ProblemContext) -> MomentValue:
    """Mean of |f|^(2t) over the circle, via aggregated t-fold sums.

    Exactly sum over v of W_t(v)^2 where W_t aggregates the weight of
    the ordered t-tuples with power-sum v.
    """
    if t < 1:
        raise ParameterDomain(f"need t >= 1, got {t}")
    pk, logs = _window_powers(ctx)
    if len(pk) ** t > _ENUM_CEILING:
        raise EnumerationTooLarge(f"{len(pk)}^{t} tuples exceed {_ENUM_CEILING}")
    if t * pk[-1] >= 2 ** 62:
        table = _fold_table_dict(pk, logs, t)
        val = math.fsum(w * w for w, _ in table.values())
        return MomentValue(t=t, value=val)
    tbl = _fold_table_int64(pk, logs, t)
    return MomentValue(t=t, value=float(np.dot(tbl.weights, tbl.weights)))
