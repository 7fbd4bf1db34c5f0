import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apx.errors import ConfigError, DegenerateModulusError
from apx.moduli import ModulusModel, validate_modulus_type
from apx.norms import (besicovitch_norm, best_approx_bracket,
                       class_membership_check, omega_modulus, rational_period,
                       search_window, stepanov_norm, sup_norm, wx_modulus)
from apx.poly import APPolynomial

SQRT_HALF = 1.0 / math.sqrt(2.0)


class TestStepanovNorm:
    def test_sin_closed_form(self, sin_poly):
        # window integral of sin^2 over length pi is pi/2 for every start
        assert stepanov_norm(sin_poly, 2.0) == pytest.approx(SQRT_HALF, abs=1e-6)

    def test_zero_function(self):
        zero = APPolynomial((), (), 1.0)
        assert stepanov_norm(zero, 2.0) == 0.0

    def test_constant_pulls_out(self):
        const = APPolynomial((0.0,), (0.75,), 1.0)
        assert stepanov_norm(const, 2.0) == pytest.approx(0.75, abs=1e-9)

    def test_general_p_agrees_with_exact_p2(self, corpus):
        # dual-route guard: quadrature path vs closed bilinear form
        for f in corpus[:4]:
            exact = stepanov_norm(f, 2.0)
            general = stepanov_norm(f, 2.0 + 1e-12)
            assert general == pytest.approx(exact, rel=1e-6)

    def test_p_range(self, cos_poly):
        with pytest.raises(ConfigError):
            stepanov_norm(cos_poly, 1.0)

    def test_symmetric_difference_accepted(self, cos_poly):
        phi = cos_poly.symmetric_difference(0.0)
        v = stepanov_norm(phi, 2.0)
        assert v > 0


class TestSupNorm:
    def test_sin(self, sin_poly):
        assert sup_norm(sin_poly) == pytest.approx(1.0, abs=1e-9)

    def test_zero(self):
        assert sup_norm(APPolynomial((), (), 1.0)) == 0.0

    def test_two_tone_near_two(self, two_tone):
        v = sup_norm(two_tone)
        assert 1.99 <= v <= 2.0 + 1e-12


class TestBesicovitch:
    def test_cos_parseval(self, cos_poly):
        assert besicovitch_norm(cos_poly, 2.0) == pytest.approx(SQRT_HALF, abs=1e-4)

    def test_zero(self):
        assert besicovitch_norm(APPolynomial((), (), 1.0), 2.0) == 0.0

    def test_dominated_by_stepanov(self, corpus):
        for f in corpus:
            b = besicovitch_norm(f, 2.0)
            s = stepanov_norm(f, 2.0)
            assert b <= s + 1e-6

    def test_irrational_two_tone_matches_parseval(self):
        f = APPolynomial((2.0, 2.0 * math.sqrt(2.0)), (0.5, 0.5), 0.2)
        assert besicovitch_norm(f, 2.0) == pytest.approx(1.0, abs=5e-4)

    def test_coefficient_inequality_parseval(self, corpus):
        # {sum |A_nu|^2}^{1/2} <= ||f||_{B^2} (+ tolerance); equality by Parseval
        for f in corpus:
            _, coefs = f.symmetric_spectrum
            lhs = math.sqrt(float(np.sum(np.abs(coefs) ** 2)))
            assert lhs <= besicovitch_norm(f, 2.0) + 1e-6

    def test_p_one_allowed(self, cos_poly):
        # B^1 norm of cos: mean of |cos| = 2/pi
        assert besicovitch_norm(cos_poly, 1.0) == pytest.approx(2.0 / math.pi,
                                                                abs=1e-6)


class TestOmegaModulus:
    @pytest.mark.parametrize("delta", [0.1, 0.5, 1.0])
    def test_sin_closed_form(self, sin_poly, delta):
        expected = math.sqrt(2.0) * math.sin(delta / 2.0)
        assert omega_modulus(sin_poly, delta, 2.0) == pytest.approx(expected,
                                                                    abs=1e-5)

    def test_monotone_to_zero(self, two_tone):
        deltas = [1.0, 0.5, 0.25, 0.125, 0.0625]
        vals = [omega_modulus(two_tone, d, 2.0) for d in deltas]
        for hi, lo in zip(vals, vals[1:]):
            assert lo <= hi + 1e-9
        assert vals[-1] < 0.2

    def test_constant_is_flat(self):
        const = APPolynomial((0.0,), (0.4,), 1.0)
        assert omega_modulus(const, 0.7, 2.0) == 0.0

    def test_delta_positive_required(self, sin_poly):
        with pytest.raises(ConfigError):
            omega_modulus(sin_poly, 0.0, 2.0)


class TestWxModulus:
    def test_cos_closed_form(self, cos_poly):
        # phi_0(t) = 2cos t - 2; {(1/pi) int_0^pi (2-2cos t)^2}^{1/2} = sqrt(6)
        v = wx_modulus(cos_poly, 0.0, math.pi, 2.0)
        assert v == pytest.approx(math.sqrt(6.0), abs=1e-8)

    def test_symmetry_point_kills_difference(self, cos_poly):
        assert wx_modulus(cos_poly, math.pi / 2.0, 1.0, 2.0) < 1e-12

    def test_vanishes_as_delta_to_zero(self, two_tone):
        vals = [wx_modulus(two_tone, 0.3, d, 2.0) for d in (0.5, 0.05, 0.005)]
        assert vals[2] < vals[1] < vals[0]
        assert vals[2] < 1e-3

    def test_general_p_route(self, cos_poly):
        # p=2 closed form against the quadrature route
        a = wx_modulus(cos_poly, 0.0, 1.0, 2.0)
        b = wx_modulus(cos_poly, 0.0, 1.0, 2.0 + 1e-13)
        assert a == pytest.approx(b, rel=1e-6)


class TestBestApproxBracket:
    def test_spectrum_inside_type(self, cos_poly):
        assert best_approx_bracket(cos_poly, 2.0, 2.0) == (0.0, 0.0)

    def test_whole_function_is_tail(self, cos_poly):
        lower, upper = best_approx_bracket(cos_poly, 0.5, 2.0)
        assert lower == pytest.approx(0.5)
        assert upper == pytest.approx(SQRT_HALF, abs=1e-6)

    def test_coefficient_convention(self):
        f = APPolynomial((1.0, 3.0), (0.5, 0.125), 1.0)
        lower, upper = best_approx_bracket(f, 2.0, 2.0)
        assert lower == pytest.approx(0.125)
        assert upper == pytest.approx(0.25 * SQRT_HALF, abs=1e-6)

    def test_bracket_ordering_corpus_sweep(self, corpus):
        for f in corpus:
            for sigma in (0.0, 0.4, 1.0, 3.0, 10.0):
                lower, upper = best_approx_bracket(f, sigma, 2.0)
                assert lower <= upper + 1e-12


class TestScalingHomogeneity:
    @given(c=st.floats(min_value=-4.0, max_value=4.0).filter(lambda v: abs(v) > 1e-3))
    @settings(max_examples=20, deadline=None)
    def test_absolute_homogeneity(self, c):
        f = APPolynomial((1.0, 2.5), (0.5, 0.2 - 0.1j), 1.0)
        g = f.scaled(c)
        assert stepanov_norm(g, 2.0) == pytest.approx(
            abs(c) * stepanov_norm(f, 2.0), rel=1e-9)
        assert sup_norm(g) == pytest.approx(abs(c) * sup_norm(f), rel=1e-9)
        assert besicovitch_norm(g, 2.0) == pytest.approx(
            abs(c) * besicovitch_norm(f, 2.0), rel=1e-9)
        assert wx_modulus(g, 0.3, 1.0, 2.0) == pytest.approx(
            abs(c) * wx_modulus(f, 0.3, 1.0, 2.0), rel=1e-9)


class TestSearchWindow:
    def test_rational_period(self, cos_poly):
        assert rational_period(cos_poly) == pytest.approx(2.0 * math.pi)

    def test_irrational_flagged(self, two_tone):
        assert rational_period(two_tone) is None
        # 2*pi*(1 + 1/min-gap) with min gap sqrt(2)-1
        expected = 2.0 * math.pi * (1.0 + 1.0 / (math.sqrt(2.0) - 1.0))
        assert search_window(two_tone) == pytest.approx(expected)


class TestMembership:
    def test_lipschitz_function_passes(self, cos_poly):
        res = class_membership_check(cos_poly, 0.0, ModulusModel.power_law(0.4), 2.0)
        assert res.passed
        assert np.isfinite(res.constant)

    def test_zero_function(self):
        zero = APPolynomial((), (), 1.0)
        res = class_membership_check(zero, 0.0, ModulusModel.power_law(0.4), 2.0)
        assert res.passed
        assert res.constant == 0.0

    def test_quadratic_fails_modulus_axioms(self, cos_poly):
        quad = ModulusModel.from_callables(
            lambda d: np.asarray(d, dtype=float) ** 2,
            lambda u: np.ones_like(np.asarray(u, dtype=float)))
        with pytest.raises(ConfigError, match="subadditive"):
            class_membership_check(cos_poly, 0.0, quad, 2.0)

    def test_vanishing_modulus_degenerate(self, cos_poly):
        flat = ModulusModel.from_callables(
            lambda d: np.zeros_like(np.asarray(d, dtype=float)),
            lambda u: np.ones_like(np.asarray(u, dtype=float)))
        with pytest.raises(DegenerateModulusError):
            class_membership_check(cos_poly, 0.0, flat, 2.0)

    def test_general_p_route(self, cos_poly):
        res = class_membership_check(cos_poly, 0.0,
                                     ModulusModel.power_law(0.4), 2.5)
        assert res.passed
        assert np.isfinite(res.constant) and res.constant > 0


class TestModulusValidation:
    def test_power_law_passes(self):
        w = ModulusModel.power_law(0.25)
        validate_modulus_type(w.w)

    def test_power_law_range(self):
        with pytest.raises(ConfigError):
            ModulusModel.power_law(1.5)

    def test_monotonic_sequences_emitted(self, cos_poly, two_tone):
        # modulus profiles must be nondecreasing in delta
        deltas = np.geomspace(1e-2, math.pi, 12)
        for f in (cos_poly, two_tone):
            omega_vals = [omega_modulus(f, float(d), 2.0) for d in deltas]
            assert all(b >= a - 1e-9 for a, b in zip(omega_vals, omega_vals[1:]))
