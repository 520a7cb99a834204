import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from ssfrac.bernstein import Drift, PoissonQ, StableLamperti
from ssfrac.errors import DomainError, RadiusError
from ssfrac.functions import SmoothFn, exponential, polynomial, power
from ssfrac.gml import GMLEvaluator
from ssfrac.ssconv import (base_operator, bold_operator, char_operator, eigen_residual,
                           intertwining_residual, poisson_closed_form, power_action, scaling_check)

CATALOG = [StableLamperti(alpha=0.5), PoissonQ(q=0.5), Drift(b=1.0)]


class TestApply:
    def test_caputo_of_identity(self):
        # Caputo derivative of order 1/2 of t at t = 1 is 1/Gamma(3/2)
        val = bold_operator(StableLamperti(alpha=0.5), 0.5).apply(power(1.0), 1.0)
        np.testing.assert_allclose(val, 1.1283791670955125739, rtol=1e-12)

    def test_caputo_matches_riemann_liouville_formula(self):
        # Caputo derivative of t^2 of order a: Gamma(3)/Gamma(3-a) t^(2-a)
        a = 0.3
        val = bold_operator(StableLamperti(alpha=a), a).apply(power(2.0), 1.7)
        np.testing.assert_allclose(val, 2.0 / math.gamma(3 - a) * 1.7 ** (2 - a), rtol=1e-10)

    def test_drift_exp(self):
        val = bold_operator(Drift(b=1.0), 0.5).apply(exponential(1.0), 2.0)
        np.testing.assert_allclose(val, 10.449703348243359495, rtol=1e-14)

    def test_vector_t(self):
        op = bold_operator(StableLamperti(alpha=0.5), 0.5)
        t = np.array([0.5, 2.0])
        np.testing.assert_allclose(op.apply(power(1.0), t), t**0.5 / math.gamma(1.5), rtol=1e-12)

    def test_nonpositive_t(self):
        with pytest.raises(DomainError):
            base_operator(Drift(), 0.5).apply(power(1.0), 0.0)

    def test_poisson_closed_form(self):
        spec, a = PoissonQ(q=0.5), 0.3
        g = exponential(1.0)
        quad = bold_operator(spec, a).apply(g, 1.0)
        np.testing.assert_allclose(poisson_closed_form(spec, a, g, 1.0), quad, rtol=1e-8)


class TestPowerAction:
    def test_drift(self):
        num, exact = power_action(base_operator(Drift(b=1.0), 0.5), 2.0, 3.0)
        np.testing.assert_allclose(exact, 10.392304845413263761, rtol=1e-14)
        np.testing.assert_allclose(num, exact, rtol=1e-14)

    def test_stable_base_symbol(self):
        _, exact = power_action(base_operator(StableLamperti(alpha=0.5), 0.5), 1.0, 1.0)
        np.testing.assert_allclose(exact, math.gamma(1.5), rtol=1e-15)

    @pytest.mark.parametrize("spec", CATALOG, ids=lambda s: s.to_string())
    @pytest.mark.parametrize("make", [base_operator, bold_operator], ids=["base", "bold"])
    def test_grid(self, spec, make):
        op = make(spec, 0.5)
        for z in (0.5, 1.0, 2.0, 3.5):
            for t in (0.5, 1.0, 2.0):
                num, exact = power_action(op, z, t)
                assert abs(num - exact) <= 1e-8 * max(1.0, abs(exact))


class TestScaling:
    op = bold_operator(StableLamperti(alpha=0.5), 0.5)

    def test_powers(self):
        assert scaling_check(self.op, power(2.0), 2.0, 1.0) <= 1e-10

    def test_exp(self):
        assert scaling_check(self.op, exponential(1.0), 1.5, 0.8) <= 1e-7

    def test_identity_dilation(self):
        assert scaling_check(self.op, exponential(1.0), 1.0, 1.3) == 0.0

    @settings(max_examples=15, deadline=None)
    @given(c=st.floats(0.3, 3.0), t=st.floats(0.2, 2.0))
    def test_property_poisson(self, c, t):
        op = bold_operator(PoissonQ(q=0.4), 0.5)
        assert scaling_check(op, exponential(-1.0), c, t) <= 1e-7


class TestLinearity:
    @settings(max_examples=15, deadline=None)
    @given(a=st.floats(-3, 3), b=st.floats(-3, 3))
    def test_linear(self, a, b):
        op = bold_operator(StableLamperti(alpha=0.5), 0.5)
        f, g = power(2.0), SmoothFn(lambda t: np.exp(-t), lambda t: -np.exp(-t))
        combo = SmoothFn(lambda t: a * f(t) + b * g(t), lambda t: a * f.derivative(t) + b * g.derivative(t))
        lhs = op.apply(combo, 1.3)
        rhs = a * op.apply(f, 1.3) + b * op.apply(g, 1.3)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


class TestEigenrelation:
    @pytest.mark.parametrize("spec", [StableLamperti(alpha=0.5), Drift(b=1.0)], ids=lambda s: s.to_string())
    def test_grid(self, spec):
        ev = GMLEvaluator(spec, 0.5)
        for q in (-2.0, -1.0, 1.0):
            for t in (0.5, 1.0, 2.0):
                assert eigen_residual(spec, 0.5, q, t, evaluator=ev) <= 1e-6

    def test_drift_tight(self):
        assert eigen_residual(Drift(b=1.0), 0.5, -1.0, 1.0) <= 1e-10

    def test_zero_eigenvalue(self):
        assert eigen_residual(StableLamperti(alpha=0.5), 0.5, 0.0, 1.0) == 0.0

    def test_poisson_closed_form(self):
        spec = PoissonQ(q=0.5)
        ev = GMLEvaluator(spec, 0.5)
        for q in (-0.9, 0.5, 0.9):
            assert eigen_residual(spec, 0.5, q, 0.8, route="closed_form", evaluator=ev) <= 1e-6

    def test_poisson_quadrature(self):
        # the time operator also carries F_q for Poisson even though its
        # symbol is not of Bernstein type
        assert eigen_residual(PoissonQ(q=0.5), 0.5, -0.5, 1.0) <= 1e-6

    def test_radius(self):
        with pytest.raises(RadiusError):
            eigen_residual(PoissonQ(q=0.5), 0.5, 2.0, 1.0)

    def test_closed_form_route_is_poisson_only(self):
        with pytest.raises(DomainError):
            eigen_residual(Drift(), 0.5, 1.0, 1.0, route="closed_form")


class TestCharacteristicOperator:
    def test_powers(self):
        spec = StableLamperti(alpha=0.5)
        w = -0.25
        # A t^w = -phi(-w) t^(w - alpha)
        exact = -math.gamma(0.75) / math.gamma(0.25)
        np.testing.assert_allclose(char_operator(spec, 0.5, power(w), 1.0), exact, rtol=1e-9)

    def test_drift(self):
        np.testing.assert_allclose(char_operator(Drift(b=1.0), 0.5, exponential(1.0), 1.0), math.e, rtol=1e-14)

    def test_poisson_powers(self):
        spec, w, t = PoissonQ(q=0.5), -0.5, 1.5
        exact = -spec.phi(-w) * t ** (w - 0.3)
        np.testing.assert_allclose(char_operator(spec, 0.3, power(w), t), exact, rtol=1e-10)

    def test_constant(self):
        const = SmoothFn(lambda t: np.ones_like(t), lambda t: np.zeros_like(t))
        assert char_operator(StableLamperti(alpha=0.5), 0.5, const, 1.0) == 0.0


class TestIntertwining:
    @pytest.mark.parametrize("w", [-0.25, -0.5])
    @pytest.mark.parametrize("t", [0.5, 2.0])
    def test_stable_powers(self, w, t):
        assert intertwining_residual(StableLamperti(alpha=0.5), 0.5, power(w), t) <= 1e-7

    def test_drift(self):
        g = SmoothFn(lambda t: np.exp(-t), lambda t: -np.exp(-t))
        assert intertwining_residual(Drift(b=1.0), 0.5, g, 1.0) <= 1e-8

    def test_poisson_smooth(self):
        g = SmoothFn(lambda t: np.exp(-t), lambda t: -np.exp(-t))
        assert intertwining_residual(PoissonQ(q=0.5), 0.5, g, 0.7) <= 1e-8
