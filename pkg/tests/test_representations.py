import math

import numpy as np
import pytest

from wglab.arith import ProblemContext, prime_window
from wglab.errors import (
    EmptyWindow,
    EnumerationTooLarge,
    MemoryBudgetExceeded,
    ParameterDomain,
)
from wglab.representations import moment, rho_mitm, rho_naive

L7, L11, L13 = math.log(7), math.log(11), math.log(13)


def _tiny_ctx(s=2):
    # prime window (6, 14]: {7, 11, 13}
    return ProblemContext.from_parts(2, s, 10.0, 4.0)


class TestRhoNaive:
    def test_single_tuple(self):
        rec = rho_naive(98, _tiny_ctx())
        assert rec.tuple_count == 1  # 49 + 49
        assert rec.value == pytest.approx(L7 * L7, rel=1e-14)

    def test_ordered_pair(self):
        rec = rho_naive(170, _tiny_ctx())
        assert rec.tuple_count == 2  # 49 + 121 both ways
        assert rec.value == pytest.approx(2 * L7 * L11, rel=1e-14)

    def test_no_representation(self):
        rec = rho_naive(3, _tiny_ctx())
        assert (rec.value, rec.tuple_count) == (0.0, 0)

    def test_value_zero_iff_count_zero(self):
        ctx = _tiny_ctx()
        for n in range(90, 350):
            rec = rho_naive(n, ctx)
            assert (rec.value == 0.0) == (rec.tuple_count == 0)
            assert rec.value >= 0.0

    def test_count_cap(self):
        # each ordered tuple weighs at most log(x + y)^s
        ctx = _tiny_ctx(s=3)
        cap = math.log(14.0) ** 3
        for n in (147, 219, 291, 339):
            rec = rho_naive(n, ctx)
            assert rec.value <= rec.tuple_count * cap + 1e-12

    def test_empty_window(self):
        with pytest.raises(EmptyWindow):
            rho_naive(100, ProblemContext.from_parts(2, 2, 10.0, 0.5))

    def test_enumeration_ceiling(self):
        ctx = ProblemContext.from_parts(2, 9, 100.0, 25.0)
        with pytest.raises(EnumerationTooLarge):
            rho_naive(10 ** 5, ctx)


class TestRhoMitm:
    def test_matches_naive_on_full_span(self):
        for s in (2, 3):
            ctx = _tiny_ctx(s=s)
            span = range(s * 49, s * 169 + 1)
            recs = rho_mitm(list(span), ctx)
            for n, rec in zip(span, recs):
                ref = rho_naive(n, ctx)
                assert rec.tuple_count == ref.tuple_count
                assert rec.value == pytest.approx(ref.value, rel=1e-12, abs=1e-12)

    def test_matches_naive_sampled_wide(self):
        ctx = ProblemContext.from_parts(2, 4, 50.0, 20.0)
        rng = np.random.default_rng(5)
        targets = rng.integers(4 * 31 ** 2, 4 * 67 ** 2 + 1, size=25)
        recs = rho_mitm(targets, ctx)
        for n, rec in zip(targets.tolist(), recs):
            ref = rho_naive(n, ctx)
            assert rec.tuple_count == ref.tuple_count
            assert rec.value == pytest.approx(ref.value, rel=1e-11, abs=1e-11)

    def test_out_of_span_is_zero(self):
        recs = rho_mitm([10, 10 ** 9], _tiny_ctx())
        for rec in recs:
            assert (rec.value, rec.tuple_count) == (0.0, 0)

    def test_total_mass_identity(self):
        # summing rho over every representable n recovers (sum log p)^s
        ctx = _tiny_ctx(s=3)
        recs = rho_mitm(list(range(3 * 49, 3 * 169 + 1)), ctx)
        total = math.fsum(rec.value for rec in recs)
        mass = (L7 + L11 + L13) ** 3
        assert total == pytest.approx(mass, rel=1e-12)

    def test_threading_is_bitwise_stable(self):
        ctx = ProblemContext.from_parts(2, 4, 50.0, 20.0)
        targets = list(range(4 * 31 ** 2, 4 * 31 ** 2 + 500))
        solo = rho_mitm(targets, ctx, threads=1)
        multi = rho_mitm(targets, ctx, batch_size=37, threads=4)
        assert [r.n for r in solo] == [r.n for r in multi]
        for a, b in zip(solo, multi):
            assert a.value == b.value
            assert a.tuple_count == b.tuple_count

    def test_big_power_dict_route(self):
        # cube sums near 2^63 leave int64; the join falls back to
        # big-integer keys and must still match the naive enumeration
        ctx = ProblemContext.from_parts(3, 2, float(2 ** 21), 60.0)
        win = prime_window(ctx.x, ctx.y)
        assert ctx.s * max(win.primes) ** 3 >= 2 ** 62
        p1, p2 = win.primes[0], win.primes[1]
        hit = p1 ** 3 + p2 ** 3
        recs = rho_mitm([hit, hit + 1], ctx)
        assert recs[0].tuple_count == 2
        assert recs[0].value == pytest.approx(
            2 * math.log(p1) * math.log(p2), rel=1e-12
        )
        assert (recs[1].value, recs[1].tuple_count) == (0.0, 0)
        ref = rho_naive(hit, ctx)
        assert recs[0].tuple_count == ref.tuple_count
        assert recs[0].value == pytest.approx(ref.value, rel=1e-12)

    def test_table_budget(self):
        ctx = ProblemContext.from_parts(2, 7, 1e4, 1e3)
        with pytest.raises(MemoryBudgetExceeded):
            rho_mitm([10 ** 8], ctx)

    def test_domain(self):
        with pytest.raises(ParameterDomain):
            rho_mitm([100], _tiny_ctx(), batch_size=0)
        with pytest.raises(ParameterDomain):
            rho_mitm([100], _tiny_ctx(), threads=0)


class TestMoment:
    def test_first_moment_is_weight_square_sum(self):
        val = moment(1, _tiny_ctx())
        assert val.t == 1
        assert val.value == pytest.approx(L7 ** 2 + L11 ** 2 + L13 ** 2, rel=1e-14)

    def test_second_moment_against_pair_table(self):
        # independent oracle: aggregate ordered pair sums in a dict, then
        # sum the squared weights
        ctx = _tiny_ctx()
        win = prime_window(ctx.x, ctx.y)
        agg = {}
        for p, wp in win.entries:
            for q, wq in win.entries:
                key = p ** 2 + q ** 2
                agg[key] = agg.get(key, 0.0) + wp * wq
        expect = math.fsum(w * w for w in agg.values())
        assert moment(2, ctx).value == pytest.approx(expect, rel=1e-13)

    def test_parseval_against_quadrature(self):
        # mean of |f|^2 over a uniform grid finer than the top frequency
        # equals the aggregated first moment exactly
        ctx = _tiny_ctx()
        from wglab.expsums import build_sequence, eval_sum

        seq = build_sequence(ctx, "prime_log")
        grid = 512  # max frequency is 169 < 512, so the mean is exact
        acc = math.fsum(
            abs(eval_sum(seq, 2, j / grid)) ** 2 for j in range(grid)
        ) / grid
        assert acc == pytest.approx(moment(1, ctx).value, rel=1e-10)

    def test_dict_route_first_moment(self):
        ctx = ProblemContext.from_parts(3, 2, float(2 ** 21), 60.0)
        win = prime_window(ctx.x, ctx.y)
        expect = math.fsum(w * w for w in win.weights)
        assert moment(1, ctx).value == pytest.approx(expect, rel=1e-13)

    def test_moment_ceiling_and_domain(self):
        with pytest.raises(EnumerationTooLarge):
            moment(4, ProblemContext.from_parts(2, 2, 1e4, 1e3))
        with pytest.raises(ParameterDomain):
            moment(0, _tiny_ctx())
