"""Exact tail-algebra tests.

The ring operations are validated against calculus identities (Leibniz,
linearity), the tensor tables against the full symmetry and both Bianchi
identities, and the component polynomials numerically against the
closed-form curvature engine and the general multiply-warped oracle.
"""
from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpcurv.curvature import (
    GenericWarpSpec,
    WarpState,
    coordinate_curvatures,
    generic_warped_curvature,
)
from warpcurv.errors import ParameterError
from warpcurv.tailring import (
    MAX_CLOSURE_ORDER,
    TailPolynomial,
    christoffel_table,
    curvature_tensor_component,
    derivative_closure,
    poly_bound,
    reduce_extreme_bracket,
    tail_components,
)

F_POLY = TailPolynomial({(1, 0, 0, 0): 1})
U_POLY = TailPolynomial({(0, 1, 0, 0): 1})
ZERO = TailPolynomial()


def _poly_strategy():
    keys = st.tuples(
        st.integers(0, 3), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)
    )
    coefs = st.fractions(
        min_value=Fraction(-5), max_value=Fraction(5), max_denominator=8
    )
    return st.dictionaries(keys, coefs, max_size=5).map(TailPolynomial)


# ---------------------------------------------------------------------------
# ring mechanics
# ---------------------------------------------------------------------------


class TestPolynomialRing:
    def test_zero_terms_are_dropped(self):
        p = TailPolynomial({(1, 0, 0, 0): 1, (2, 0, 0, 0): 0})
        assert set(p.terms) == {(1, 0, 0, 0)}
        assert (p - p).is_zero
        assert ZERO.is_zero

    def test_key_validation(self):
        with pytest.raises(ParameterError):
            TailPolynomial({(1, 0, 0): 1})
        with pytest.raises(ParameterError):
            TailPolynomial({(1, 0, 0, -1): 1})
        with pytest.raises(ParameterError):
            TailPolynomial({(0.5, 0, 0, 0): 1})

    def test_coefficients_are_exact(self):
        p = TailPolynomial({(0, 0, 0, 0): Fraction(1, 3)})
        q = p + p + p
        assert q == TailPolynomial({(0, 0, 0, 0): 1})

    def test_equality_and_hash(self):
        p = TailPolynomial({(1, 0, 0, 0): Fraction(1, 2)})
        q = TailPolynomial({(1, 0, 0, 0): Fraction(2, 4)})
        assert p == q and hash(p) == hash(q)
        assert p != F_POLY

    def test_multiplication(self):
        cross = TailPolynomial({(2, 0, 1, 1): 2})
        assert cross * F_POLY == TailPolynomial({(3, 0, 1, 1): 2})
        assert 3 * F_POLY == TailPolynomial({(1, 0, 0, 0): 3})
        assert Fraction(1, 2) * U_POLY == TailPolynomial(
            {(0, 1, 0, 0): Fraction(1, 2)}
        )

    def test_monomial_derivatives(self):
        assert F_POLY.derivative() == TailPolynomial(
            {(1, 0, 0, 0): Fraction(1, 2), (2, 0, 0, 0): -1}
        )
        assert U_POLY.derivative() == TailPolynomial({(1, 1, 0, 0): -1})
        assert TailPolynomial({(0, 0, 2, 1): 7}).derivative().is_zero

    @settings(max_examples=200, deadline=None)
    @given(p=_poly_strategy(), q=_poly_strategy())
    def test_derivation_is_linear_and_leibniz(self, p, q):
        assert (p + q).derivative() == p.derivative() + q.derivative()
        assert (p * q).derivative() == p.derivative() * q + p * q.derivative()

    def test_evaluate(self):
        p = TailPolynomial({(4, 0, 2, 0): 1, (1, 0, 0, 0): -1})
        F, eps = 0.2, 0.1
        assert p.evaluate(F, 0.5, eps, 0.3) == pytest.approx(
            eps**2 * F**4 - F, rel=1e-15
        )
        assert ZERO.evaluate(0.3, 0.3, 0.3, 0.3) == 0.0

    def test_bound_of_half_slope(self):
        half_slope = TailPolynomial({(1, 0, 0, 0): Fraction(-1, 2)})
        b = half_slope.bound(eps=0.1, u_max=10.0)
        assert b >= 0.25
        assert b == pytest.approx(0.25, rel=1e-10)

    def test_bound_validation(self):
        with pytest.raises(ParameterError):
            F_POLY.bound(eps=0.0, u_max=1.0)
        with pytest.raises(ParameterError):
            F_POLY.bound(eps=0.1, u_max=-1.0)

    def test_bound_dominates_samples(self):
        comps = tail_components()
        u_max = 25.0
        for poly in comps.values():
            b = poly.bound(eps=0.1, u_max=u_max)
            for i in range(1, 40):
                F = 0.5 * i / 39
                u = u_max * i / 39
                for c in (-0.5, 0.0, 0.5):
                    assert abs(poly.evaluate(F, u, 0.1, c)) <= b + 1e-9

    def test_formatting(self):
        comps = tail_components()
        assert str(comps["kr2"]) == "-1/2 F"
        assert str(comps["k21"]) == "eps^2 F^4 - F"
        assert str(comps["kr1"]) == "-1"
        assert str(ZERO) == "0"

    def test_reduce_extreme_bracket(self):
        # even powers of c collapse to rational constants, odd keep one c
        p = TailPolynomial({(1, 0, 0, 4): 16, (0, 1, 0, 3): 8, (2, 0, 0, 0): 1})
        assert reduce_extreme_bracket(p) == TailPolynomial(
            {(1, 0, 0, 0): 1, (0, 1, 0, 1): 2, (2, 0, 0, 0): 1}
        )
        # cancellation: 4c^2 - 1 vanishes at the single-pair value
        assert reduce_extreme_bracket(
            TailPolynomial({(0, 0, 0, 2): 4, (0, 0, 0, 0): -1})
        ).is_zero
        assert reduce_extreme_bracket(ZERO).is_zero

    @settings(max_examples=100, deadline=None)
    @given(p=_poly_strategy(), c=st.sampled_from([0.5, -0.5]))
    def test_reduce_agrees_at_realizable_coefficient(self, p, c):
        F, u, eps = 0.31, 2.7, 0.12
        assert reduce_extreme_bracket(p).evaluate(F, u, eps, c) == pytest.approx(
            p.evaluate(F, u, eps, c), rel=1e-13, abs=1e-15
        )


# ---------------------------------------------------------------------------
# component polynomials
# ---------------------------------------------------------------------------


class TestTailComponents:
    def test_frozen_seed_values(self):
        comps = tail_components()
        assert comps["k21"] == TailPolynomial(
            {(4, 0, 2, 0): 1, (1, 0, 0, 0): -1}
        )
        assert comps["k31"] == comps["k21"]
        assert comps["k32"] == TailPolynomial(
            {
                (0, 2, 0, 0): Fraction(-1, 4),
                (0, 2, 0, 2): -3,
                (4, 0, 2, 2): -12,
                (2, 0, 0, 0): -1,
            }
        )
        assert comps["kr1"] == TailPolynomial({(0, 0, 0, 0): -1})
        assert comps["kr2"] == comps["kr3"]
        assert comps["kr2"] == TailPolynomial({(1, 0, 0, 0): Fraction(-1, 2)})
        assert comps["m1"] == TailPolynomial(
            {(2, 0, 1, 1): -4, (3, 0, 1, 1): 4}
        )
        assert comps["m2"] == comps["m3"]
        assert comps["m2"] == TailPolynomial(
            {(2, 0, 1, 1): 2, (3, 0, 1, 1): -2}
        )

    @staticmethod
    def _tail_state_with_offset(r: float, eps: float, tau: float):
        """State for v = eps e^r, h = tau + e^{r/2} (the true tail pair)."""
        half = math.exp(0.5 * r)
        g = tau + half
        v = eps * math.exp(r)
        ws = WarpState(r=r, v=v, v1=v, v2=v, h=g, h1=0.5 * half, h2=0.25 * half)
        F = 0.5 * half / g
        u = 1.0 / g
        return ws, F, u

    @pytest.mark.parametrize("r,tau", [(-20.0, 3e-7), (-30.0, 1e-8), (-12.0, 2e-4)])
    def test_polynomials_match_closed_form_engine(self, r, tau):
        eps, c = 0.1, 0.3
        ws, F, u = self._tail_state_with_offset(r, eps, tau)
        cc = coordinate_curvatures(ws, c)
        comps = tail_components()
        assert comps["k21"].evaluate(F, u, eps, c) == pytest.approx(
            cc.k21, rel=1e-13
        )
        assert comps["k32"].evaluate(F, u, eps, c) == pytest.approx(
            cc.k32, rel=1e-13
        )
        assert comps["kr1"].evaluate(F, u, eps, c) == pytest.approx(
            cc.kr1, rel=1e-13
        )
        assert comps["kr2"].evaluate(F, u, eps, c) == pytest.approx(
            cc.kr2, rel=1e-13
        )
        assert comps["m1"].evaluate(F, u, eps, c) == pytest.approx(
            cc.mixed, rel=1e-13
        )

    def test_radial_mixed_components_match_warped_oracle(self):
        eps, c, tau, r = 0.05, -0.4, 1e-6, -18.0
        ws, F, u = self._tail_state_with_offset(r, eps, tau)
        v, g = ws.v, ws.h
        spec = GenericWarpSpec(
            h=(v, g, g),
            h1=(ws.v1, ws.h1, ws.h1),
            h2=(ws.v2, ws.h2, ws.h2),
            bracket={(2, 3, 1): c * v / (g * g), (3, 2, 1): -c * v / (g * g)},
        )
        comps = tail_components()
        for name, indices in (
            ("m1", (0, 1, 2, 3)),
            ("m2", (0, 2, 3, 1)),
            ("m3", (0, 3, 1, 2)),
        ):
            oracle = generic_warped_curvature(spec, indices)
            assert comps[name].evaluate(F, u, eps, c) == pytest.approx(
                oracle, rel=1e-13
            )

    def test_slope_derivative_matches_finite_differences(self):
        # d/dr of the radial plane component -F/2 against a five-point
        # stencil applied to -g''/g for the closed-form tail pair
        tau, r0, step = 1e-8, -30.0, 1e-4
        deriv = tail_components()["kr2"].derivative()
        assert deriv == TailPolynomial(
            {(1, 0, 0, 0): Fraction(-1, 4), (2, 0, 0, 0): Fraction(1, 2)}
        )

        def kr2_of(r: float) -> float:
            half = math.exp(0.5 * r)
            return -0.25 * half / (tau + half)

        fd = (
            -kr2_of(r0 + 2 * step)
            + 8 * kr2_of(r0 + step)
            - 8 * kr2_of(r0 - step)
            + kr2_of(r0 - 2 * step)
        ) / (12 * step)
        half = math.exp(0.5 * r0)
        F = 0.5 * half / (tau + half)
        assert abs(deriv.evaluate(F, 1.0 / (tau + half), 0.1, 0.0) - fd) < 1e-9


# ---------------------------------------------------------------------------
# tensor tables
# ---------------------------------------------------------------------------


class TestCurvatureTensorTable:
    def test_plane_components_and_signs(self):
        comps = tail_components()
        assert curvature_tensor_component(2, 1, 1, 2) == comps["k21"]
        assert curvature_tensor_component(1, 2, 2, 1) == comps["k21"]
        assert curvature_tensor_component(2, 1, 2, 1) == -comps["k21"]
        assert curvature_tensor_component(1, 0, 0, 1) == comps["kr1"]
        assert curvature_tensor_component(3, 0, 0, 3) == comps["kr2"]
        assert curvature_tensor_component(3, 2, 2, 3) == comps["k32"]

    def test_mixed_permutations(self):
        comps = tail_components()
        assert curvature_tensor_component(0, 1, 2, 3) == comps["m1"]
        assert curvature_tensor_component(0, 1, 3, 2) == -comps["m1"]
        assert curvature_tensor_component(0, 2, 3, 1) == comps["m2"]
        assert curvature_tensor_component(2, 3, 0, 1) == comps["m1"]
        assert curvature_tensor_component(1, 0, 2, 3) == -comps["m1"]

    def test_vanishing_components(self):
        assert curvature_tensor_component(0, 1, 0, 2).is_zero
        assert curvature_tensor_component(1, 2, 1, 3).is_zero
        assert curvature_tensor_component(2, 2, 1, 3).is_zero
        assert curvature_tensor_component(0, 1, 3, 3).is_zero

    def test_index_validation(self):
        with pytest.raises(ParameterError):
            curvature_tensor_component(0, 1, 2, 4)
        with pytest.raises(ParameterError):
            curvature_tensor_component(-1, 1, 2, 3)

    def test_tensor_symmetries_everywhere(self):
        from itertools import product

        for a, b, c, d in product(range(4), repeat=4):
            base = curvature_tensor_component(a, b, c, d)
            assert curvature_tensor_component(b, a, c, d) == -base
            assert curvature_tensor_component(a, b, d, c) == -base
            assert curvature_tensor_component(c, d, a, b) == base

    def test_first_bianchi_everywhere(self):
        from itertools import product

        for a, b, c, d in product(range(4), repeat=4):
            total = (
                curvature_tensor_component(a, b, c, d)
                + curvature_tensor_component(b, c, a, d)
                + curvature_tensor_component(c, a, b, d)
            )
            assert total.is_zero


class TestChristoffelTable:
    def test_radial_rows_are_empty(self):
        gamma = christoffel_table()
        for j in range(4):
            assert gamma[(0, j)] == ()

    def test_metric_compatibility(self):
        # <nabla_i Y_j, Y_k> + <Y_j, nabla_i Y_k> = 0 in an orthonormal frame
        gamma = christoffel_table()
        for i in range(4):
            for j in range(4):
                for k in range(4):
                    coef_jk = ZERO
                    for target, coef in gamma.get((i, j), ()):
                        if target == k:
                            coef_jk = coef_jk + coef
                    coef_kj = ZERO
                    for target, coef in gamma.get((i, k), ()):
                        if target == j:
                            coef_kj = coef_kj + coef
                    assert (coef_jk + coef_kj).is_zero

    def test_horizontal_bracket(self):
        # nabla_{Y_2} Y_3 - nabla_{Y_3} Y_2 = (v/g^2) c Y_1 = 4 eps F^2 c Y_1
        gamma = christoffel_table()
        (t1, c1), = gamma[(2, 3)]
        (t2, c2), = gamma[(3, 2)]
        assert t1 == t2 == 1
        assert c1 - c2 == TailPolynomial({(2, 0, 1, 1): 4})


# ---------------------------------------------------------------------------
# derivative closure
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def closure():
    return derivative_closure(2)


class TestDerivativeClosure:
    def test_level_zero_support(self, closure):
        # 6 plane pairs x 4 arrangements + 24 signed mixed permutations
        assert len(closure[0]) == 48

    def test_guards(self):
        with pytest.raises(ParameterError):
            derivative_closure(MAX_CLOSURE_ORDER + 1)
        with pytest.raises(ParameterError):
            derivative_closure(-1)
        with pytest.raises(ParameterError):
            derivative_closure(1.5)  # type: ignore[arg-type]

    def test_radial_slot_is_plain_derivative(self, closure):
        comps = tail_components()
        assert closure[1][(0, 2, 0, 0, 2)] == comps["kr2"].derivative()
        assert closure[1][(0, 2, 1, 1, 2)] == comps["k21"].derivative()
        assert (0, 1, 0, 0, 1) not in closure[1]  # constant component

    def test_second_bianchi_everywhere(self, closure):
        # The cyclic sum over the three derivative slots must vanish.  The
        # generic-c tables are a single-pair geometry stretched over a free
        # bracket coefficient, so the identity closes exactly once c^2 is
        # pinned to its single-pair value 1/4.
        from itertools import product

        level1 = closure[1]
        for x, y, z, w, v in product(range(4), repeat=5):
            total = (
                level1.get((x, y, z, w, v), ZERO)
                + level1.get((y, z, x, w, v), ZERO)
                + level1.get((z, x, y, w, v), ZERO)
            )
            assert reduce_extreme_bracket(total).is_zero
            # Numerically the raw sum vanishes at the realizable coefficient.
            if not total.is_zero:
                for c in (0.5, -0.5):
                    assert abs(total.evaluate(0.3, 7.0, 0.1, c)) < 1e-15

    def test_first_order_components_decay(self, closure):
        # every first-derivative monomial keeps at least one factor of F
        for poly in closure[1].values():
            assert all(key[0] >= 1 for key in poly.terms)

    def test_bounds_are_finite_and_dominate_samples(self, closure):
        eps, u_max = 0.1, 40.0
        for level in closure:
            for poly in level.values():
                b = poly_bound(poly, eps, u_max)
                assert math.isfinite(b)
                for i in range(1, 12):
                    F = 0.5 * i / 11
                    u = u_max * i / 11
                    assert abs(poly.evaluate(F, u, eps, 0.5)) <= b + 1e-9

    def test_closure_is_deterministic(self):
        a = derivative_closure(1)
        b = derivative_closure(1)
        assert a[1] == b[1]
