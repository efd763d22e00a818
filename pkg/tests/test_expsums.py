import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wglab.arcs import ArcDecomposition, ArcParams
from wglab.arith import ProblemContext
from wglab.errors import EmptyRegion, EmptyWindow, ParameterDomain
from wglab.expsums import (
    PhasePowers,
    WeightedSequence,
    build_sequence,
    dichotomy_report,
    eval_sum,
    phase_fraction_exact,
    sup_scan,
)


def _window_ctx(x, y, k=2, s=2):
    return ProblemContext.from_parts(k, s, x, y)


class TestBuildSequence:
    def test_prime_window(self):
        seq = build_sequence(_window_ctx(10.0, 4.0), "prime_log")
        assert seq.support.tolist() == [7, 11, 13]
        assert np.allclose(seq.weights, np.log([7, 11, 13]))
        assert seq.kind == "prime_log"

    def test_unit_window(self):
        seq = build_sequence(_window_ctx(10.0, 4.0), "unit")
        assert seq.support.tolist() == list(range(7, 15))
        assert np.all(seq.weights == 1.0)

    def test_integer_log_window(self):
        seq = build_sequence(_window_ctx(10.0, 4.0), "integer_log")
        assert seq.support.tolist() == list(range(7, 15))
        assert np.allclose(seq.weights, np.log(np.arange(7, 15)))

    def test_integer_log_drops_one(self):
        # n = 1 carries weight log 1 = 0 and is excluded from the support
        seq = build_sequence(_window_ctx(2.0, 1.5), "integer_log")
        assert seq.support.tolist() == [2, 3]

    def test_empty_prime_window(self):
        with pytest.raises(EmptyWindow):
            build_sequence(_window_ctx(10.0, 0.5), "prime_log")

    def test_unknown_kind(self):
        with pytest.raises(ParameterDomain):
            build_sequence(_window_ctx(10.0, 4.0), "poisson")

    def test_sequence_invariants(self):
        with pytest.raises(ParameterDomain):
            WeightedSequence(np.array([3, 2]), np.array([1.0, 1.0]), "unit")
        with pytest.raises(ParameterDomain):
            WeightedSequence(np.array([2, 3]), np.array([1.0, 0.0]), "unit")
        with pytest.raises(ParameterDomain):
            WeightedSequence(np.array([2, 3]), np.array([1.0]), "unit")


class TestEvalSum:
    def test_zero_phase_gives_total_weight(self):
        seq = build_sequence(_window_ctx(500.0, 100.0), "prime_log")
        val = eval_sum(seq, 2, 0.0)
        assert val.imag == 0.0
        assert val.real == pytest.approx(seq.total_weight(), rel=1e-14)

    def test_conjugate_symmetry(self):
        seq = build_sequence(_window_ctx(500.0, 100.0), "prime_log")
        rng = np.random.default_rng(3)
        for alpha in rng.random(100):
            lhs = eval_sum(seq, 2, 1.0 - alpha)
            rhs = eval_sum(seq, 2, float(alpha)).conjugate()
            assert lhs == pytest.approx(rhs, abs=1e-8)

    def test_triangle_bound(self):
        seq = build_sequence(_window_ctx(300.0, 80.0), "prime_log")
        cap = seq.total_weight() * (1 + 1e-12)
        rng = np.random.default_rng(4)
        for alpha in rng.random(1000):
            assert abs(eval_sum(seq, 3, float(alpha))) <= cap

    def test_periodicity_exact_on_dyadics(self):
        # alpha and alpha + 1 are both exactly representable, and the
        # phase reduction is exact integer arithmetic, so values match
        # bit for bit
        seq = build_sequence(_window_ctx(100.0, 30.0), "prime_log")
        for alpha in (0.25, 0.0078125, 0.333251953125):
            assert eval_sum(seq, 2, alpha) == eval_sum(seq, 2, alpha + 1.0)

    def test_half_phase_parity(self):
        # at alpha = 1/2 every odd prime squared contributes e(1/2) = -1
        seq = build_sequence(_window_ctx(100.0, 30.0), "prime_log")
        val = eval_sum(seq, 2, 0.5)
        assert val == pytest.approx(-seq.total_weight(), rel=1e-14)

    @given(
        st.floats(min_value=0.0, max_value=1.0, exclude_max=True),
        st.integers(min_value=2, max_value=6),
        st.integers(min_value=2, max_value=10 ** 7),
    )
    @settings(max_examples=200, deadline=None)
    def test_limb_phase_matches_bigint(self, alpha, k, n):
        pw = PhasePowers(np.array([n], dtype=np.int64), k)
        got = float(pw.fractions(alpha)[0])
        want = phase_fraction_exact(alpha, n, k)
        dist = abs(got - want)
        assert min(dist, 1.0 - dist) < 1e-12

    def test_subnormal_alpha(self):
        # subnormal alphas have denominators up to 2^1074, past float range;
        # regression for an overflow in the tail-fraction division
        pw = PhasePowers(np.array([97, 10 ** 6 + 3], dtype=np.int64), 3)
        for alpha in (5e-324, 2.2250738585072014e-313, math.ulp(0.0) * 7):
            fr = pw.fractions(alpha)
            assert np.all(np.isfinite(fr)) and np.all((0.0 <= fr) & (fr < 1.0))
            assert float(fr[0]) == pytest.approx(
                phase_fraction_exact(alpha, 97, 3), abs=1e-300
            )


class TestSupScan:
    def _setup(self):
        ctx = ProblemContext.from_parts(2, 5, 1e4, 1e3)
        seq = build_sequence(ctx, "prime_log")
        params = ArcParams.from_context(ctx)
        return seq, ArcDecomposition.build(params)

    def test_major_peak_aligns_fully(self):
        # odd p have p^2 = 1 (mod 8), so every grid point a/8 aligns the
        # phases completely and ties alpha = 0; the winner must be one of
        # those fully aligned major points
        seq, arcs = self._setup()
        rep = sup_scan(seq, 2, arcs, "major", 1000)
        assert rep.sup_abs == pytest.approx(seq.total_weight(), rel=1e-12)
        assert rep.nearest_rational.q in (1, 2, 4, 8)
        assert rep.nearest_rational.beta == 0.0

    def test_region_partition(self):
        seq, arcs = self._setup()
        major = sup_scan(seq, 2, arcs, "major", 1000)
        minor = sup_scan(seq, 2, arcs, "minor", 1000)
        full = sup_scan(seq, 2, arcs, "full", 1000)
        assert major.points_in_region + minor.points_in_region == 1000
        assert full.points_in_region == 1000
        assert full.sup_abs == max(major.sup_abs, minor.sup_abs)
        assert minor.sup_abs < major.sup_abs

    def test_empty_minor_region(self):
        seq, arcs = self._setup()
        # the only two grid points, 0 and 1/2, are both major
        with pytest.raises(EmptyRegion):
            sup_scan(seq, 2, arcs, "minor", 2)

    def test_domain(self):
        seq, arcs = self._setup()
        with pytest.raises(ParameterDomain):
            sup_scan(seq, 2, arcs, "everything", 100)
        with pytest.raises(ParameterDomain):
            sup_scan(seq, 2, arcs, "full", 1)


class TestDichotomy:
    def _ctx(self):
        return ProblemContext.from_parts(2, 2, 1000.0, 900.0)

    def test_aligned_phase(self):
        rep = dichotomy_report(self._ctx(), 0.25, 0.0)
        assert rep.observed == pytest.approx(900.0)
        assert rep.approx is not None
        assert (rep.approx.a, rep.approx.q) == (0, 1)
        assert rep.bound_k3 == pytest.approx(900.0)  # unit weight, beta = 0
        assert rep.bound_k1 == pytest.approx(900.0 ** 0.75)

    def test_half_cancellation(self):
        # e(n^2 / 2) alternates sign with n, and the window holds an even
        # count of integers, so the sum cancels completely
        rep = dichotomy_report(self._ctx(), 0.25, 0.5)
        assert rep.observed == pytest.approx(0.0, abs=1e-9)
        assert rep.approx is not None
        assert (rep.approx.a, rep.approx.q) == (1, 2)
        assert rep.bound_k3 == pytest.approx(math.sqrt(2) * 900.0)

    def test_generic_point_outside_approx_regime(self):
        rep = dichotomy_report(self._ctx(), 0.05, math.sqrt(2) - 1.0)
        assert rep.approx is None
        assert rep.bound_k3 == float("inf")
        assert rep.observed <= 900.0
        assert rep.bound_k1 == pytest.approx(900.0 ** 0.95)

    def test_rho_domain(self):
        with pytest.raises(ParameterDomain):
            dichotomy_report(self._ctx(), 0.6, 0.1)  # above 1/t(2)
        with pytest.raises(ParameterDomain):
            dichotomy_report(self._ctx(), 0.0, 0.1)
        ctx3 = ProblemContext.from_parts(3, 3, 1000.0, 900.0)
        with pytest.raises(ParameterDomain):
            dichotomy_report(ctx3, 0.2, 0.1)  # above 1/t(3) = 1/7

    def test_theta_domain(self):
        # rho = 0.5 forces theta = 1, this context has theta < 1
        with pytest.raises(ParameterDomain):
            dichotomy_report(self._ctx(), 0.5, 0.1)

    def test_alpha_domain(self):
        with pytest.raises(ParameterDomain):
            dichotomy_report(self._ctx(), 0.25, 1.0)
