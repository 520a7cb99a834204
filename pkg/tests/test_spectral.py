import math

import numpy as np
import pytest
from scipy import integrate, special

from ssfrac.bernstein import Drift, PoissonQ, StableLamperti
from ssfrac.errors import ConfigError, QuadratureError
from ssfrac.functions import SmoothFn, polynomial
from ssfrac.gml import GMLEvaluator
from ssfrac.spectral import (GenJacobi, GenLaguerre, HankelDemo, Jacobi, Laguerre, bessel_kernel,
                             bessel_solve, bessel_solve_adaptive, cauchy_residual, drift_closed_form,
                             expand, parse_model, solve, time_factors)
from ssfrac.spectral.bessel import bessel_kernel_series
from ssfrac.spectral.polys import (jacobi_all, jacobi_explicit, laguerre_all, laguerre_explicit,
                                   shifted_jacobi_all, shifted_jacobi_deriv_all)

MODELS = [Laguerre(), Jacobi(lam1=3.0, mu=1.0), GenLaguerre(m=2.0), GenJacobi(lam1=5.5, m=2.5)]
IDS = [m.to_string() for m in MODELS]


def probe(model):
    return np.array([0.1, 0.3, 0.5, 0.7, 0.9]) if "jacobi" in model.name else np.array([0.5, 1.0, 2.0, 4.0])


@pytest.fixture(scope="module")
def stable():
    return GMLEvaluator(StableLamperti(alpha=0.5), 0.5)


@pytest.fixture(scope="module")
def drift():
    return GMLEvaluator(Drift(b=1.0), 0.5)


class TestPolynomials:
    x = np.linspace(0.0, 6.0, 13)
    y = np.linspace(-1.0, 1.0, 11)

    @pytest.mark.parametrize("a", [0.0, 1.5, 3.0])
    def test_laguerre_vs_scipy(self, a):
        vals = laguerre_all(20, a, self.x)
        for n in (0, 1, 7, 20):
            np.testing.assert_allclose(vals[n], special.eval_genlaguerre(n, a, self.x), rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize("a", [0.0, 2.5])
    def test_laguerre_vs_sum(self, a):
        vals = laguerre_all(5, a, self.x)
        for n in range(6):
            np.testing.assert_allclose(vals[n], laguerre_explicit(n, a, self.x), rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize("ab", [(0.5, 1.5), (2.0, 0.0), (-0.5, 3.5)])
    def test_jacobi_vs_scipy(self, ab):
        a, b = ab
        vals = jacobi_all(15, a, b, self.y)
        for n in (0, 1, 6, 15):
            np.testing.assert_allclose(vals[n], special.eval_jacobi(n, a, b, self.y), rtol=1e-11, atol=1e-11)

    def test_jacobi_vs_sum(self):
        vals = jacobi_all(5, 1.0, 0.5, self.y)
        for n in range(6):
            np.testing.assert_allclose(vals[n], jacobi_explicit(n, 1.0, 0.5, self.y), rtol=1e-12, atol=1e-12)

    def test_shifted_derivatives(self):
        x = np.linspace(0.05, 0.95, 7)
        a, b = 1.5, 0.5
        for order in (1, 2):
            d = shifted_jacobi_deriv_all(6, a, b, x, order)
            for n in range(7):
                poly = np.polynomial.Polynomial.fit(x, shifted_jacobi_all(6, a, b, x)[n], n) if n else None
                if poly is None:
                    np.testing.assert_allclose(d[n], 0.0, atol=1e-14)
                else:
                    np.testing.assert_allclose(d[n], poly.deriv(order)(x), rtol=1e-8, atol=1e-8)


class TestExplicitEigenfunctions:
    def test_laguerre_mode_one(self):
        x = np.array([0.0, 0.5, 3.0])
        np.testing.assert_allclose(Laguerre().P(1, x), 1 - x)

    @pytest.mark.parametrize("n", range(6))
    def test_gen_laguerre_monomial_sum(self, n):
        # sum_k (-1)^k C(n,k) Gamma(m+2)/Gamma(m+k+2) (m+k)/m x^k
        m = 2.0
        x = np.array([0.3, 1.0, 2.5, 6.0])
        k = np.arange(n + 1)
        coef = ((-1.0) ** k * special.comb(n, k) * np.exp(special.gammaln(m + 2) - special.gammaln(m + k + 2))
                * (m + k) / m)
        np.testing.assert_allclose(GenLaguerre(m=m).P(n, x), np.polynomial.polynomial.polyval(x, coef),
                                   rtol=1e-12, atol=1e-13)

    def test_gen_laguerre_coeigen(self):
        m, n = 2.0, 4
        x = np.array([0.3, 2.0])
        exact = (special.eval_genlaguerre(n, m - 1, x) + x * special.eval_genlaguerre(n, m, x)) / (x + 1)
        np.testing.assert_allclose(GenLaguerre(m=m).V(n, x), exact, rtol=1e-12)

    def test_jacobi_first_eigenvalue(self):
        assert Jacobi(lam1=3.0, mu=1.0).eigenvalue(1) == 3.0


class TestDensities:
    @pytest.mark.parametrize("model", MODELS, ids=IDS)
    def test_rule_integrates_density(self, model):
        x, w = model.quadrature()
        np.testing.assert_allclose(w.sum(), 1.0, rtol=1e-12)
        lo, hi = (0.0, 1.0) if "jacobi" in model.name else (0.0, np.inf)
        mass, _ = integrate.quad(model.density, lo, hi, limit=200)
        np.testing.assert_allclose(mass, 1.0, rtol=1e-8)

    @pytest.mark.parametrize("model", MODELS, ids=IDS)
    def test_rule_matches_density_moment(self, model):
        x, w = model.quadrature()
        lo, hi = (0.0, 1.0) if "jacobi" in model.name else (0.0, np.inf)
        m2, _ = integrate.quad(lambda s: s * s * model.density(s), lo, hi, limit=200)
        np.testing.assert_allclose(np.sum(w * x * x), m2, rtol=1e-8)


class TestBiorthogonality:
    @pytest.mark.parametrize("model", MODELS, ids=IDS)
    def test_gram(self, model):
        np.testing.assert_allclose(model.gram(10), np.eye(11), atol=1e-8)


class TestGenerator:
    @pytest.mark.parametrize("model", MODELS, ids=IDS)
    def test_eigenfunctions(self, model):
        x = probe(model)
        for n in range(6):
            lhs = model.generator_apply(model.mode(n), x)
            np.testing.assert_allclose(lhs, -model.eigenvalue(n) * model.P(n, x), rtol=1e-7, atol=1e-7)

    def test_laguerre_example(self):
        f = polynomial([1.0, -1.0])
        x = np.array([0.5, 2.0])
        np.testing.assert_allclose(Laguerre().generator_apply(f, x), x - 1)

    def test_gen_laguerre_against_logarithmic_form(self):
        # L f = x f'' + ((m^2-1)/m + 1 - x) f' + int_0^inf (f(e^-y x) - f(x) + y x f'(x)) m e^{-my}/x dy
        m = 2.0
        f = SmoothFn(lambda x: np.exp(-x), lambda x: -np.exp(-x), lambda x: np.exp(-x))
        model = GenLaguerre(m=m)
        for x in (0.5, 1.5, 3.0):
            jump, _ = integrate.quad(lambda y: (f(math.exp(-y) * x) - f(x) + y * x * f.derivative(x))
                                     * m * math.exp(-m * y) / x, 0, np.inf, epsabs=1e-13)
            local = x * f.second_derivative(x) + ((m * m - 1) / m + 1 - x) * f.derivative(x)
            np.testing.assert_allclose(model.generator_apply(f, np.array([x]))[0], local + jump, rtol=1e-11)

    def test_gen_jacobi_against_integral_form(self):
        # L f = x(1-x) f'' - (lam1 x - m - 1) f' - x^-(m+1) int_0^x f'(r) r^m dr
        lam1, m = 5.5, 2.5
        f = SmoothFn(np.sin, np.cos, lambda x: -np.sin(x))
        model = GenJacobi(lam1=lam1, m=m)
        for x in (0.2, 0.6, 0.9):
            jump, _ = integrate.quad(lambda r: math.cos(r) * r**m, 0, x, epsabs=1e-14)
            exact = x * (1 - x) * -math.sin(x) - (lam1 * x - m - 1) * math.cos(x) - x ** -(m + 1) * jump
            np.testing.assert_allclose(model.generator_apply(f, np.array([x]))[0], exact, rtol=1e-10)


class TestExpand:
    def test_single_mode(self):
        c = expand(Laguerre(), lambda x: special.eval_laguerre(3, x), 8)
        np.testing.assert_allclose(c, np.eye(9)[3], atol=1e-12)

    def test_identity(self):
        c = expand(Laguerre(), lambda x: x, 5)
        np.testing.assert_allclose(c, [1, -1, 0, 0, 0, 0], atol=1e-12)

    def test_gen_laguerre_mode(self):
        model = GenLaguerre(m=2.0)
        np.testing.assert_allclose(expand(model, lambda x: model.P(5, x), 8), np.eye(9)[5], atol=1e-8)

    def test_unresolved(self):
        with pytest.raises(QuadratureError):
            expand(Jacobi(lam1=3.0, mu=1.0, nodes=4), lambda x: np.abs(x - 0.37), 6)


class TestSolve:
    @pytest.mark.parametrize("model", MODELS, ids=IDS)
    def test_initial_condition(self, model, stable):
        rng = np.random.default_rng(0)
        c = rng.normal(size=6)
        x = probe(model)
        f = model.combination(c)
        np.testing.assert_allclose(solve(model, stable, f, 0.0, x, N=10), f(x), rtol=1e-10, atol=1e-10)

    def test_drift_example(self, drift):
        val = solve(Laguerre(), drift, lambda x: 1 - x, 1.0, 0.0, N=4)
        np.testing.assert_allclose(val, 0.13533528323661269189, rtol=1e-12)

    def test_stable_example(self, stable):
        val = solve(Laguerre(), stable, lambda x: 1 - x, 1.0, 0.0, N=4)
        np.testing.assert_allclose(val, 0.42758357615580700441, rtol=1e-12)

    @pytest.mark.parametrize("model", MODELS, ids=IDS)
    def test_mass_conservation(self, model, stable):
        c = np.array([0.7, 0.3, -0.4, 0.2])
        x, w = model.quadrature()
        for t in (0.1, 1.0, 5.0):
            u = solve(model, stable, c, t, x)
            np.testing.assert_allclose(np.sum(w * u), 0.7, atol=1e-9)

    @pytest.mark.parametrize("model", MODELS[:2], ids=IDS[:2])
    def test_decay(self, model, stable):
        c = np.array([0.5, 1.0, -0.8, 0.6, 0.3, -0.2])
        t = np.linspace(0.0, 5.0, 21)
        x = probe(model)
        u = solve(model, stable, c, t, x)
        dev = np.abs(u - 0.5)
        # the L2(nu) distance to equilibrium is nonincreasing for self-adjoint models
        xs, w = model.quadrature()
        l2 = np.sqrt(np.sum(w * (solve(model, stable, c, t, xs) - 0.5) ** 2, axis=1))
        assert np.all(np.diff(l2) <= 1e-12)
        assert dev[-1].max() < dev[0].max()

    @pytest.mark.parametrize("model", MODELS, ids=IDS)
    def test_drift_equivalence(self, model, drift):
        c = np.array([0.3, -1.0, 0.5, 0.25])
        x = probe(model)
        for t in (0.5, 1.0, 2.0):
            np.testing.assert_allclose(solve(model, drift, c, t, x), model.semigroup(c, t**0.5 / 0.5, x),
                                       rtol=1e-12, atol=1e-13)

    def test_shapes(self, stable):
        m = Laguerre()
        c = np.array([1.0, 0.5])
        assert np.ndim(solve(m, stable, c, 1.0, 1.0)) == 0
        assert solve(m, stable, c, [0.5, 1.0], [0.1, 0.2, 0.3]).shape == (2, 3)
        assert solve(m, stable, c, 1.0, [0.1, 0.2]).shape == (2,)

    def test_negative_time(self, stable):
        with pytest.raises(ValueError):
            solve(Laguerre(), stable, np.ones(2), -1.0, 0.5)

    def test_time_factors(self, stable):
        fac = time_factors(Laguerre(), stable, 3, [1.0])
        np.testing.assert_allclose(fac[0], special.erfcx(np.arange(4.0)), rtol=1e-12)


class TestCauchy:
    @pytest.mark.parametrize("model", MODELS, ids=IDS)
    def test_single_modes_stable(self, model, stable):
        x = 0.3 if "jacobi" in model.name else 0.5
        limit = 1e-5 if model.name.startswith("gen") else 1e-6
        for k in range(4):
            res = cauchy_residual(model, stable, np.eye(4)[k], 1.0, x)
            assert res.value <= limit

    def test_constant_mode(self, stable):
        res = cauchy_residual(Laguerre(), stable, np.array([1.0]), 1.0, 0.5)
        assert res.value == 0.0

    @pytest.mark.parametrize("model", MODELS, ids=IDS)
    def test_drift_polynomial(self, model, drift):
        res = cauchy_residual(model, drift, lambda x: 1 + x - 0.5 * x**2, 1.0, probe(model)[1], N=6)
        assert res.value <= 1e-8

    def test_poisson_time_change(self):
        ev = GMLEvaluator(PoissonQ(q=0.5), 0.5)
        # eigenvalues of the mode set stay inside the disc of convergence at t = 0.25
        res = cauchy_residual(Jacobi(lam1=3.0, mu=1.0), ev, np.array([1.0, 0.2]), 0.01, 0.4)
        assert res.value <= 1e-6


class TestModelRecords:
    @pytest.mark.parametrize("model", MODELS, ids=IDS)
    def test_roundtrip(self, model):
        assert parse_model(model.to_string()) == model

    @pytest.mark.parametrize("text", ["hermite", "jacobi:lam1=3,nu=1", "gen_jacobi:lam1=3,m=2.5",
                                      "gen_laguerre:m=x"])
    def test_errors(self, text):
        with pytest.raises(ConfigError):
            parse_model(text)

    def test_time_threshold_default(self):
        assert all(m.T == 0.0 for m in MODELS)


class TestBessel:
    def test_kernel(self):
        z = np.array([0.0, 0.3, 2.0, 7.0])
        np.testing.assert_allclose(bessel_kernel(z), bessel_kernel_series(z), rtol=1e-12, atol=1e-14)

    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_initial_recovery(self, x, stable):
        demo = HankelDemo()
        np.testing.assert_allclose(demo.inverse(x), math.exp(-x), atol=1e-10)
        np.testing.assert_allclose(bessel_solve(demo, stable, 0.0, x), math.exp(-x), atol=1e-6)

    def test_origin_two_rules(self, stable):
        demo = HankelDemo()
        a = bessel_solve(demo, stable, 1.0, 0.0)
        b = bessel_solve_adaptive(demo, stable, 1.0, 0.0)
        assert abs(a - b) <= 1e-7

    def test_drift_closed_form(self, drift):
        x = np.array([0.0, 0.5, 2.0])
        np.testing.assert_allclose(bessel_solve(HankelDemo(), drift, 1.0, x), drift_closed_form(1.0, 0.5, 1.0, x),
                                   rtol=1e-10)

    def test_drift_double_integral(self):
        # direct two-dimensional quadrature of the time-changed semigroup
        s, x = 2.0, 0.7
        val, _ = integrate.dblquad(lambda lam, _: math.exp(-lam * (1 + s)) * float(bessel_kernel(lam * x)),
                                   0, 1, 0, 60, epsabs=1e-12)
        np.testing.assert_allclose(drift_closed_form(1.0, 0.5, 1.0, x), val, rtol=1e-10)

    def test_unresolved(self, stable):
        with pytest.raises(QuadratureError):
            bessel_solve(HankelDemo(nodes=8), stable, 1.0, 40.0)
