import math

import numpy as np
import pytest

from apx.errors import CapacityError, ConfigError
from apx.kernel import (KernelParams, QuadraturePlan, averaged_difference,
                        partial_sum_via_kernel, plan_quadrature, psi)
from apx.poly import APPolynomial
from apx.quadrature import adaptive_quad


class TestPsi:
    def test_small_t_limit(self):
        p = KernelParams(1.0, 2.0)
        assert psi(p, 1e-9) == pytest.approx(3.0 / (2.0 * math.pi), rel=1e-12)

    def test_index_and_direct_forms_agree(self):
        via_index = KernelParams.from_index(0, 1.0)
        direct = KernelParams(0.0, 0.5)
        for t in (0.3, 1.0, 7.7):
            assert psi(via_index, t) == pytest.approx(psi(direct, t), abs=1e-12)

    def test_sine_zero(self):
        p = KernelParams(1.0, 2.0)
        assert abs(psi(p, 2.0 * math.pi)) < 1e-15

    def test_parity(self):
        p = KernelParams(0.5, 1.25)
        ts = np.array([1e-8, 0.1, 2.3, 40.0])
        assert np.max(np.abs(psi(p, ts) - psi(p, -ts))) < 1e-15

    def test_taylor_branch_continuity(self):
        p = KernelParams(2.0, 9.0)
        below = psi(p, 0.9999e-6)
        above = psi(p, 1.0001e-6)
        assert below == pytest.approx(above, rel=1e-9)

    def test_invalid_params(self):
        with pytest.raises(ConfigError):
            KernelParams(2.0, 1.0)
        with pytest.raises(ConfigError):
            KernelParams.from_index(-1, 1.0)


class TestPlan:
    def test_spec_arithmetic(self):
        # alpha=1, k=0, f_bound=1, tol=1e-4: T >= 16/(pi*0.5*1e-4) ~ 1.0186e5
        plan = plan_quadrature(KernelParams.from_index(0, 1.0), 1.0, 1e-4)
        assert plan.tail_start == pytest.approx(1.0186e5, rel=1e-3)
        assert plan.tail_bound <= 0.5e-4 * (1 + 1e-12)

    def test_loose_tolerance_small_plan(self):
        plan = plan_quadrature(KernelParams.from_index(0, 1.0), 1.0, 1e3)
        assert plan.tail_start <= 4.0 * math.pi
        assert len(plan.edges()) - 1 <= 4

    def test_tail_start_independent_of_k(self):
        # index form always has eta - lambda = alpha/2
        t0 = plan_quadrature(KernelParams.from_index(0, 1.0), 1.0, 1e-4).tail_start
        t16 = plan_quadrature(KernelParams.from_index(16, 1.0), 1.0, 1e-4).tail_start
        assert t0 == pytest.approx(t16)

    def test_capacity_error(self):
        with pytest.raises(CapacityError):
            plan_quadrature(KernelParams.from_index(0, 1.0), 1.0, 1e-12)

    def test_edges_cover_and_align(self):
        params = KernelParams.from_index(3, 1.0)
        plan = plan_quadrature(params, 1.0, 1e-2)
        edges = plan.edges()
        assert edges[0] == 0.0
        assert edges[-1] == pytest.approx(plan.tail_start)
        assert np.all(np.diff(edges) > 0)
        slow, fast = params.zero_periods
        interior = edges[1:-1]
        on_slow = np.isclose(interior % slow, 0, atol=1e-9) \
            | np.isclose(interior % slow, slow, atol=1e-9)
        on_fast = np.isclose(interior % fast, 0, atol=1e-9) \
            | np.isclose(interior % fast, fast, atol=1e-9)
        assert np.all(on_slow | on_fast)


class TestPartialSumViaKernel:
    def test_cos_band_free(self, cos_poly):
        r = partial_sum_via_kernel(cos_poly, 2, 0.0, 1e-5)
        assert r.value == pytest.approx(1.0, abs=1e-5)

    def test_cos_empty_sum(self, cos_poly):
        r = partial_sum_via_kernel(cos_poly, 0, 0.0, 1e-5)
        assert abs(r.value) <= 1e-5

    def test_zero_function(self):
        zero = APPolynomial((), (), 1.0)
        r = partial_sum_via_kernel(zero, 3, 0.7, 1e-5)
        assert r.value == 0.0

    def test_tolerance_floor(self, cos_poly):
        with pytest.raises(ConfigError):
            partial_sum_via_kernel(cos_poly, 1, 0.0, 1e-7)

    def test_corpus_equivalence_subset(self, corpus):
        xs = np.linspace(0.0, 3.5, 4)
        for f in corpus:
            for k in (0, 1, 3, 6):
                for x in xs:
                    r = partial_sum_via_kernel(f, k, float(x), 1e-5)
                    s = f.star_partial_sum(k, float(x))
                    assert not s.band_occupied
                    assert abs(r.value - s.value) <= 1e-5

    def test_tail_certificate(self, cos_poly):
        """Brute extension of the discarded region changes the result by
        less than the reported tail bound."""
        from apx.kernel import _integrand_combo, _tail_after
        params = KernelParams.from_index(3, 1.0)
        combo = _integrand_combo(cos_poly, 0.4, params)
        r = partial_sum_via_kernel(cos_poly, 3, 0.4, 1e-5)
        t0 = r.tail_start
        phi = cos_poly.symmetric_difference(0.4)

        def integrand(t):
            return phi(t) * psi(params, t)

        tail_val, bound = _tail_after(combo, t0)
        brute, _ = adaptive_quad(integrand, t0, 4.0 * t0, rel_tol=0.0,
                                 abs_tol=1e-11,
                                 edges=np.linspace(t0, 4.0 * t0, 20001))
        beyond, _ = _tail_after(combo, 4.0 * t0)
        assert abs(tail_val - (brute + beyond)) <= bound + 1e-11


class TestAveragedDifference:
    def test_cos_closed_form(self, cos_poly):
        # (1/2pi) int_0^{2pi} (2cos u - 2) du = -2
        v = averaged_difference(cos_poly, 0.0, 2.0 * math.pi, 0.0)
        assert v == pytest.approx(-2.0, abs=1e-10)

    def test_mean_value_limit(self, two_tone):
        t = 1.3
        phi = two_tone.symmetric_difference(0.5)
        v = averaged_difference(two_tone, 0.5, 1e-6, t)
        assert v == pytest.approx(phi(t), abs=1e-5)

    def test_zero_function(self):
        zero = APPolynomial((), (), 1.0)
        assert averaged_difference(zero, 0.0, 1.0, 2.0) == 0.0

    def test_delta_validation(self, cos_poly):
        with pytest.raises(ConfigError):
            averaged_difference(cos_poly, 0.0, 0.0, 1.0)


class TestAveragedBoundW:
    def test_scaled_bound(self, cos_poly):
        """|Phi_x(xi1, xi2)| <= C (w(xi1) + w(xi2)) with the membership C."""
        from apx.moduli import ModulusModel
        from apx.norms import class_membership_check
        w = ModulusModel.power_law(0.5)
        res = class_membership_check(cos_poly, 0.0, w, 2.0)
        assert res.passed
        C = max(res.constant, 1.0)
        for xi1 in (0.3, 1.0, 2.0):
            for xi2 in (0.5, 2.0, 7.0):
                lhs = abs(averaged_difference(cos_poly, 0.0, xi1, xi2))
                rhs = C * (float(w.w(xi1)) + float(w.w(min(xi2, math.pi)))) + 1e-6
                assert lhs <= rhs
