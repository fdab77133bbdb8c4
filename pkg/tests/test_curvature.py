"""Curvature-engine tests.

The closed-form component values are checked three independent ways:
against the constant reference values of the ambient complex-hyperbolic
metric, against the general multiply-warped fiber-bundle formulas
(``generic_warped_curvature``, which never sees the three-factor
specialization), and against a brute-force two-angle reduction of the
plane-supremum problem.
"""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpcurv.curvature import (
    DEFAULT_C23_GRID,
    CoordinateCurvatures,
    GenericWarpSpec,
    SearchSpec,
    WarpState,
    a_tensor_norms,
    chn_reference,
    chn_state,
    component_rows,
    component_rows_log,
    coordinate_curvatures,
    generic_warped_curvature,
    plane_coefficient_grid,
    plane_coefficient_samples,
    sectional_curvature,
    sectional_curvature_nongeneric,
    state_from_profiles,
    sup_from_components,
    sup_sectional,
    sup_sectional_batch,
    tail_state,
    tube_submersion_curvature,
)
from warpcurv.errors import DomainError, ParameterError
from warpcurv.frames import PlanePair, make_plane_pair
from warpcurv.profiles import EpsilonParams, build_h, build_v


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _random_state(rng) -> WarpState:
    v = math.exp(rng.uniform(-2.0, 2.0))
    h = math.exp(rng.uniform(-2.0, 2.0))
    return WarpState(
        r=rng.uniform(0.1, 10.0),
        v=v,
        v1=v * rng.uniform(-3.0, 3.0),
        v2=v * rng.uniform(-3.0, 3.0),
        h=h,
        h1=h * rng.uniform(-3.0, 3.0),
        h2=h * rng.uniform(-3.0, 3.0),
    )


def _specialized_oracle(ws: WarpState, c23: float) -> GenericWarpSpec:
    """The three-factor state written as a general multiply-warped product."""
    v, h = ws.v, ws.h
    circle_plane = v * v / (16.0 * h**4)
    horizontal_plane = (
        -0.25 - 3.0 * c23 * c23 - 3.0 * c23 * c23 * v * v / (4.0 * h * h)
    ) / (h * h)
    return GenericWarpSpec(
        h=(ws.v, ws.h, ws.h),
        h1=(ws.v1, ws.h1, ws.h1),
        h2=(ws.v2, ws.h2, ws.h2),
        bracket={(2, 3, 1): c23 * v / (h * h), (3, 2, 1): -c23 * v / (h * h)},
        fiber={
            (2, 1, 1, 2): circle_plane,
            (3, 1, 1, 3): circle_plane,
            (3, 2, 2, 3): horizontal_plane,
        },
    )


def _sup_two_angle_oracle(cc: CoordinateCurvatures, n: int = 1201) -> float:
    """Brute-force supremum via the two-angle reduction.

    Writing the horizontal overlap of C as w * rot(D) turns the constrained
    family into K = (1 - rho^2) k21 + rho^2 Q(beta, phi), so the supremum is
    max(k21, sup Q) with Q a trig polynomial on a 2-torus.
    """
    beta = np.linspace(0.0, math.pi, n)
    phi = np.linspace(0.0, math.pi, n)
    bb, pp = np.meshgrid(beta, phi, indexing="ij")
    cb, sb, cp, sp = np.cos(bb), np.sin(bb), np.cos(pp), np.sin(pp)
    q = (
        cb * cb * sp * sp * cc.k21
        + cb * cb * cp * cp * cc.kr1
        + sb * sb * cp * cp * cc.kr2
        + sb * sb * sp * sp * cc.k32
        + 3.0 * cb * sb * cp * sp * cc.mixed
    )
    return max(cc.k21, float(q.max()))


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


class TestStates:
    def test_chn_state_values(self):
        ws = chn_state(1.0)
        assert ws.v == math.sinh(1.0)
        assert ws.v1 == math.cosh(1.0)
        assert ws.v2 == math.sinh(1.0)
        assert ws.h == math.cosh(0.5)
        assert ws.h1 == 0.5 * math.sinh(0.5)
        assert ws.h2 == 0.25 * math.cosh(0.5)

    @pytest.mark.parametrize("r", [0.0, -1.0])
    def test_chn_state_needs_positive_radius(self, r):
        with pytest.raises(ParameterError):
            chn_state(r)

    def test_tail_state_values(self):
        ws = tail_state(-5.0, 0.1)
        assert ws.v == 0.1 * math.exp(-5.0)
        assert ws.v1 == ws.v and ws.v2 == ws.v
        assert ws.h == math.exp(-2.5)
        assert ws.h1 == 0.5 * ws.h and ws.h2 == 0.25 * ws.h

    def test_tail_state_rejects_bad_eps(self):
        with pytest.raises(ParameterError):
            tail_state(-5.0, 0.0)

    def test_tail_state_rejects_underflowed_radius(self):
        with pytest.raises(ParameterError):
            tail_state(-800.0, 0.1)

    @pytest.mark.parametrize("v,h", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
    def test_state_requires_positive_factors(self, v, h):
        with pytest.raises(ParameterError):
            WarpState(r=1.0, v=v, v1=0.0, v2=0.0, h=h, h1=0.0, h2=0.0)


@pytest.fixture(scope="module")
def profiles():
    params = EpsilonParams(eps=0.1)
    return build_v(params), build_h(params)


class TestStateFromProfiles:
    def test_head_matches_reference_pair(self, profiles):
        vp, hp = profiles
        ws = state_from_profiles(vp, hp, 5.0)
        ref = chn_state(5.0)
        assert ws.v == pytest.approx(ref.v, rel=1e-12)
        assert ws.v1 == pytest.approx(ref.v1, rel=1e-12)
        assert ws.h == pytest.approx(ref.h, rel=1e-12)
        assert ws.h2 == pytest.approx(ref.h2, rel=1e-12)

    def test_deep_tail_is_rejected(self, profiles):
        vp, hp = profiles
        with pytest.raises(DomainError):
            state_from_profiles(vp, hp, -800.0)


# ---------------------------------------------------------------------------
# the five components
# ---------------------------------------------------------------------------


class TestCoordinateCurvatures:
    def test_reference_pair_circle_plane_is_constant(self):
        for r in np.linspace(0.05, 12.0, 200):
            cc = coordinate_curvatures(chn_state(float(r)), 0.0)
            assert abs(cc.k21 + 0.25) < 2e-14

    @pytest.mark.parametrize("c", [0.0, 0.1, -0.1, 0.25, -0.25, 0.5, -0.5])
    def test_reference_pair_horizontal_plane(self, c):
        for r in (0.3, 1.0, 4.0, 9.0):
            cc = coordinate_curvatures(chn_state(r), c)
            assert abs(cc.k32 - (-0.25 - 3.0 * c * c)) < 2e-14

    @pytest.mark.parametrize("c", [0.0, 0.3, -0.5])
    def test_reference_pair_mixed_component(self, c):
        for r in (0.2, 1.0, 5.0):
            cc = coordinate_curvatures(chn_state(r), c)
            assert abs(cc.mixed - (-c)) < 2e-14

    def test_reference_pair_mixed_factor_is_one(self):
        for r in np.linspace(0.05, 12.0, 100):
            ws = chn_state(float(r))
            factor = (ws.v / ws.h**2) * (ws.v1 / ws.v - ws.h1 / ws.h)
            assert abs(factor - 1.0) < 2e-14

    def test_reference_pair_radial_planes(self):
        cc = coordinate_curvatures(chn_state(2.0), 0.25)
        assert cc.kr1 == -1.0
        assert cc.kr2 == -0.25

    def test_example_values_at_unit_radius(self):
        cc = coordinate_curvatures(chn_state(1.0), 0.5)
        assert abs(cc.k32 - (-1.0)) < 1e-14
        assert abs(cc.mixed - (-0.5)) < 1e-14
        assert cc.c23 == 0.5

    def test_tail_state_components(self):
        cc = coordinate_curvatures(tail_state(-30.0, 0.1), 0.0)
        expected = 0.1**2 / 16.0 - 0.5
        assert cc.k21 == expected
        assert abs(cc.k21 - (-0.499375)) < 1e-15
        assert cc.kr1 == -1.0
        assert cc.kr2 == -0.25

    def test_c23_bound_is_enforced(self):
        ws = chn_state(1.0)
        coordinate_curvatures(ws, 0.5)
        coordinate_curvatures(ws, -0.5)
        with pytest.raises(ParameterError):
            coordinate_curvatures(ws, 0.51)

    def test_radial_components_come_from_profile_derivatives(self):
        params = EpsilonParams(eps=0.1)
        vp, hp = build_v(params), build_h(params)
        ws = state_from_profiles(vp, hp, 0.2)
        cc = coordinate_curvatures(ws, 0.0)
        assert cc.kr1 == -(ws.v2 / ws.v)
        assert cc.kr2 == -(ws.h2 / ws.h)

    def test_batched_rows_match_scalar_calls(self):
        rng = np.random.default_rng(7)
        states = [_random_state(rng) for _ in range(50)]
        batched = component_rows(
            np.array([w.v for w in states]),
            np.array([w.v1 for w in states]),
            np.array([w.v2 for w in states]),
            np.array([w.h for w in states]),
            np.array([w.h1 for w in states]),
            np.array([w.h2 for w in states]),
            0.3,
        )
        for col, ws in enumerate(states):
            cc = coordinate_curvatures(ws, 0.3)
            expected = (cc.k21, cc.kr1, cc.kr2, cc.k32, cc.mixed)
            assert tuple(batched[:, col]) == expected


# ---------------------------------------------------------------------------
# plane assembly
# ---------------------------------------------------------------------------


def _flat_components(value: float, mixed: float = 0.0) -> CoordinateCurvatures:
    return CoordinateCurvatures(
        k21=value, k32=value, kr1=value, kr2=value, mixed=mixed, c23=0.0
    )


class TestSectionalAssembly:
    def test_constant_components_give_constant_curvature(self):
        cc = _flat_components(-0.25)
        rng = np.random.default_rng(11)
        for i in range(200):
            pp = make_plane_pair(rng.normal(size=4), "generic", seed=i)
            assert abs(sectional_curvature(cc, pp) + 0.25) < 1e-14

    def test_pure_circle_plane(self):
        cc = coordinate_curvatures(chn_state(2.0), 0.4)
        pp = PlanePair(kind="generic", C=(0.0, 0.0, 1.0, 0.0), D=(1.0, 0.0))
        assert sectional_curvature(cc, pp) == cc.k21

    def test_mixed_term_weight(self):
        cc = _flat_components(0.0, mixed=1.0)
        s = math.sqrt(0.5)
        pp = PlanePair(kind="generic", C=(s, 0.0, 0.0, s), D=(s, s))
        assert abs(sectional_curvature(cc, pp) - 0.75) < 1e-15

    def test_kind_guards(self):
        cc = _flat_components(-1.0)
        generic = PlanePair(kind="generic", C=(1.0, 0.0, 0.0, 0.0), D=(1.0, 0.0))
        nongeneric = PlanePair(kind="nongeneric", C=(0.0, 0.0, 1.0), D=(1.0, 0.0))
        with pytest.raises(ParameterError):
            sectional_curvature(cc, nongeneric)
        with pytest.raises(ParameterError):
            sectional_curvature_nongeneric(cc, generic)

    def test_nongeneric_axis_planes(self):
        cc = coordinate_curvatures(chn_state(1.5), 0.2)
        radial = PlanePair(kind="nongeneric", C=(0.0, 0.0, 1.0), D=(1.0, 0.0))
        circle = PlanePair(kind="nongeneric", C=(0.0, 0.0, 1.0), D=(0.0, 1.0))
        assert sectional_curvature_nongeneric(cc, radial) == cc.kr2
        assert sectional_curvature_nongeneric(cc, circle) == cc.k21

    def test_nongeneric_cross_term_uses_both_overlap_coordinates(self):
        # the cross coefficient is (d0 c1 - d1 c0)^2 = c0^2 + c1^2 for a
        # unit pair, NOT c1^2 + c2^2: C = (0, 0, 1) separates the two
        cc = coordinate_curvatures(chn_state(1.0), 0.0)
        pp = make_plane_pair((0.0, 0.0, 1.0), "nongeneric")
        k = sectional_curvature_nongeneric(cc, pp)
        wrong = (0.0 + 1.0) * cc.kr1  # c1^2 + c2^2 reading
        assert abs(k - wrong) > 0.1
        pp2 = make_plane_pair((0.6, 0.8, 0.0), "nongeneric")
        assert sectional_curvature_nongeneric(cc, pp2) == pytest.approx(
            cc.kr1, abs=1e-15
        )

    def test_zero_coefficient_blocks_overflowed_component(self):
        cc = CoordinateCurvatures(
            k21=-0.25, k32=-math.inf, kr1=-1.0, kr2=-0.25, mixed=0.0, c23=0.5
        )
        pp = PlanePair(kind="generic", C=(0.0, 0.0, 1.0, 0.0), D=(1.0, 0.0))
        k = sectional_curvature(cc, pp)
        assert math.isfinite(k) and k == -0.25

    @settings(max_examples=300, deadline=None)
    @given(
        seed=st.integers(0, 10**9),
        r=st.floats(0.05, 12.0),
        c23=st.floats(-0.5, 0.5),
    )
    def test_reference_pair_pinching(self, seed, r, c23):
        rng = np.random.default_rng(seed)
        cc = coordinate_curvatures(chn_state(r), c23)
        pp = make_plane_pair(rng.normal(size=4), "generic", seed=seed)
        k = sectional_curvature(cc, pp)
        assert -1.0 - 1e-9 <= k <= -0.25 + 1e-9
        pp2 = make_plane_pair(rng.normal(size=3), "nongeneric", seed=seed)
        k2 = sectional_curvature_nongeneric(cc, pp2)
        assert -1.0 - 1e-9 <= k2 <= -0.25 + 1e-9


# ---------------------------------------------------------------------------
# the general multiply-warped oracle
# ---------------------------------------------------------------------------


class TestGenericWarpedOracle:
    def test_five_components_match_closed_forms_in_bulk(self):
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(10_000):
            ws = _random_state(rng)
            c23 = rng.uniform(-0.5, 0.5)
            cc = coordinate_curvatures(ws, c23)
            spec = _specialized_oracle(ws, c23)
            pairs = (
                (cc.k21, generic_warped_curvature(spec, (2, 1, 1, 2))),
                (cc.k21, generic_warped_curvature(spec, (3, 1, 1, 3))),
                (cc.k32, generic_warped_curvature(spec, (3, 2, 2, 3))),
                (cc.kr1, generic_warped_curvature(spec, (1, 0, 0, 1))),
                (cc.kr2, generic_warped_curvature(spec, (2, 0, 0, 2))),
                (cc.mixed, generic_warped_curvature(spec, (0, 1, 2, 3))),
            )
            for closed, oracle in pairs:
                worst = max(
                    worst, abs(closed - oracle) / max(1.0, abs(closed))
                )
        assert worst <= 1e-12

    def test_pair_symmetries(self):
        spec = _specialized_oracle(chn_state(1.3), 0.3)
        k = generic_warped_curvature(spec, (2, 1, 1, 2))
        assert generic_warped_curvature(spec, (1, 2, 2, 1)) == k
        assert generic_warped_curvature(spec, (2, 1, 2, 1)) == -k
        assert generic_warped_curvature(spec, (1, 2, 1, 2)) == -k

    def test_radial_cross_terms_vanish(self):
        spec = _specialized_oracle(chn_state(0.8), 0.5)
        assert generic_warped_curvature(spec, (2, 0, 0, 3)) == 0.0
        assert generic_warped_curvature(spec, (0, 2, 3, 0)) == 0.0
        assert generic_warped_curvature(spec, (1, 0, 0, 3)) == 0.0

    def test_repeated_indices_vanish(self):
        spec = _specialized_oracle(chn_state(0.8), 0.5)
        assert generic_warped_curvature(spec, (2, 2, 1, 3)) == 0.0
        assert generic_warped_curvature(spec, (0, 1, 2, 2)) == 0.0

    def test_off_plane_fiber_components_pass_through(self):
        spec = GenericWarpSpec(
            h=(1.0, 1.0, 1.0),
            h1=(0.0, 0.0, 0.0),
            h2=(0.0, 0.0, 0.0),
            fiber={(2, 1, 3, 1): 0.7},
        )
        assert generic_warped_curvature(spec, (2, 1, 3, 1)) == 0.7
        assert generic_warped_curvature(spec, (3, 1, 2, 1)) == 0.7
        assert generic_warped_curvature(spec, (1, 2, 3, 1)) == -0.7

    def test_constant_flat_fibers_are_flat(self):
        spec = GenericWarpSpec(h=(1.0, 2.0), h1=(0.0, 0.0), h2=(0.0, 0.0))
        for idx in ((1, 0, 0, 1), (2, 0, 0, 2), (1, 2, 2, 1), (0, 1, 1, 2)):
            assert generic_warped_curvature(spec, idx) == 0.0

    def test_bracket_antisymmetry_is_enforced(self):
        with pytest.raises(ParameterError):
            GenericWarpSpec(
                h=(1.0, 1.0, 1.0),
                h1=(0.0,) * 3,
                h2=(0.0,) * 3,
                bracket={(1, 2, 3): 1.0, (2, 1, 3): 1.0},
            )

    def test_index_validation(self):
        spec = _specialized_oracle(chn_state(1.0), 0.0)
        with pytest.raises(ParameterError):
            generic_warped_curvature(spec, (0, 1, 2, 9))
        with pytest.raises(ParameterError):
            generic_warped_curvature(spec, (0, 1, 2))  # type: ignore[arg-type]
        with pytest.raises(ParameterError):
            GenericWarpSpec(h=(1.0,), h1=(0.0,), h2=(0.0, 0.0))
        with pytest.raises(ParameterError):
            GenericWarpSpec(h=(1.0,), h1=(0.0,), h2=(0.0,), fiber={(0, 1, 1, 1): 1.0})


# ---------------------------------------------------------------------------
# tube submersion quantities
# ---------------------------------------------------------------------------


class TestTubeSubmersion:
    def test_round_sphere_values(self):
        assert tube_submersion_curvature(1.0, 1.0, 0.0) == (1.0 / 16.0, -0.25)

    @pytest.mark.parametrize("c", [0.5, -0.5])
    def test_equal_factors_at_extreme_bracket(self, c):
        _, horizontal = tube_submersion_curvature(2.0, 2.0, c)
        assert horizontal == -1.1875

    def test_rescaled_circle_plane(self):
        assert tube_submersion_curvature(2.0, 1.0, 0.0)[0] == 1.0

    def test_scaling_chain_reproduces_components(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            ws = _random_state(rng)
            c = rng.uniform(-0.5, 0.5)
            cc = coordinate_curvatures(ws, c)
            eq10, eq11 = tube_submersion_curvature(ws.v, ws.h, c)
            lv, lh = ws.v1 / ws.v, ws.h1 / ws.h
            k21_chain = ws.h**2 * (eq10 / (ws.v**2 * ws.h**2)) - lv * lh
            k32_chain = eq11 / ws.h**2 - lh * lh
            assert k21_chain == pytest.approx(cc.k21, rel=1e-12, abs=1e-13)
            assert k32_chain == pytest.approx(cc.k32, rel=1e-12, abs=1e-13)

    def test_a_tensor_example(self):
        assert a_tensor_norms(1.0, 1.0, 0.5) == (0.25, 0.25)

    def test_a_tensor_horizontal_norm_is_capped(self):
        rng = np.random.default_rng(5)
        for _ in range(500):
            v = math.exp(rng.uniform(-2, 2))
            h = math.exp(rng.uniform(-2, 2))
            c = rng.uniform(-0.5, 0.5)
            horizontal, _ = a_tensor_norms(v, h, c)
            assert horizontal <= v / (4.0 * h) + 1e-15

    def test_validation(self):
        with pytest.raises(ParameterError):
            tube_submersion_curvature(0.0, 1.0, 0.0)
        with pytest.raises(ParameterError):
            tube_submersion_curvature(1.0, 1.0, 0.6)
        with pytest.raises(ParameterError):
            a_tensor_norms(1.0, -1.0, 0.0)


# ---------------------------------------------------------------------------
# ambient reference values
# ---------------------------------------------------------------------------


class TestChnReference:
    def test_values(self):
        assert chn_reference(2, 3, 0.3, "mixed_dr") == -0.3
        assert chn_reference(2, 3, 0.0, "sec") == -0.25
        assert chn_reference(2, 3, 0.5, "sec") == -1.0
        assert chn_reference(2, 3, -0.5, "sec") == -1.0
        assert chn_reference(1, 2, 0.4, "vanishing") == 0.0

    def test_matches_warped_components_on_reference_pair(self):
        for c in (0.0, 0.2, -0.5):
            cc = coordinate_curvatures(chn_state(2.0), c)
            assert abs(cc.k32 - chn_reference(2, 3, c, "sec")) < 2e-14
            assert abs(cc.mixed - chn_reference(2, 3, c, "mixed_dr")) < 2e-14

    def test_validation(self):
        with pytest.raises(ParameterError):
            chn_reference(2, 3, 0.3, "bogus")  # type: ignore[arg-type]
        with pytest.raises(ParameterError):
            chn_reference(2, 2, 0.3, "sec")
        with pytest.raises(ParameterError):
            chn_reference(0, 1, 0.3, "sec")
        with pytest.raises(ParameterError):
            chn_reference(2, 3, 0.7, "sec")


# ---------------------------------------------------------------------------
# supremum over planes
# ---------------------------------------------------------------------------


class TestSupSectional:
    @pytest.mark.parametrize("c23", [0.0, 0.5, -0.5])
    def test_reference_pair_supremum(self, c23):
        sup, pair = sup_sectional(chn_state(1.0), c23)
        assert abs(sup + 0.25) < 1e-8
        cc = coordinate_curvatures(chn_state(1.0), c23)
        evaluate = (
            sectional_curvature
            if pair.kind == "generic"
            else sectional_curvature_nongeneric
        )
        assert evaluate(cc, pair) == pytest.approx(sup, abs=1e-12)

    def test_result_dominates_every_component(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            ws = _random_state(rng)
            c23 = rng.uniform(-0.5, 0.5)
            cc = coordinate_curvatures(ws, c23)
            sup, _ = sup_sectional(ws, c23)
            assert sup >= max(cc.k21, cc.kr1, cc.kr2, cc.k32) - 1e-12

    def test_matches_two_angle_oracle(self):
        rng = np.random.default_rng(23)
        worst = 0.0
        for _ in range(40):
            ws = _random_state(rng)
            c23 = rng.uniform(-0.5, 0.5)
            cc = coordinate_curvatures(ws, c23)
            sup, _ = sup_sectional(ws, c23)
            oracle = _sup_two_angle_oracle(cc)
            scale = max(
                1.0, abs(cc.k21), abs(cc.kr1), abs(cc.kr2), abs(cc.k32), abs(cc.mixed)
            )
            worst = max(worst, abs(sup - oracle) / scale)
        assert worst <= 1e-5

    def test_tail_supremum_is_safely_negative(self):
        for r in (-200.0, -50.0, -10.0):
            for c23 in (0.0, 0.5, -0.5):
                sup, _ = sup_sectional(tail_state(r, 0.002), c23)
                assert sup <= -0.1 + 1e-6

    def test_deterministic(self):
        ws = _random_state(np.random.default_rng(31))
        first = sup_sectional(ws, 0.25)
        second = sup_sectional(ws, 0.25)
        assert first[0] == second[0]
        assert first[1].C == second[1].C and first[1].D == second[1].D

    def test_positive_radial_component_is_found(self):
        # v'' < 0 makes the radial circle plane positively curved; the
        # degenerate-constraint corner C = dr must then carry the max
        ws = WarpState(r=1.0, v=1.0, v1=0.0, v2=-2.0, h=1.0, h1=0.0, h2=0.25)
        sup, pair = sup_sectional(ws, 0.0)
        assert sup >= 2.0 - 1e-12
        assert sup == pytest.approx(2.0, abs=1e-6)
        cc = coordinate_curvatures(ws, 0.0)
        if pair.kind == "generic":
            assert sectional_curvature(cc, pair) == pytest.approx(sup, abs=1e-12)
            assert abs(abs(pair.C[0]) - 1.0) < 1e-6  # C is the radial direction
        else:
            assert sectional_curvature_nongeneric(cc, pair) == pytest.approx(
                sup, abs=1e-12
            )
            assert abs(pair.C[2]) < 1e-6  # the radial plane's ridge: c2 = 0

    def test_search_spec_validation(self):
        with pytest.raises(ParameterError):
            SearchSpec(divisions=3)
        with pytest.raises(ParameterError):
            SearchSpec(refine_starts=-1)

    def test_grid_is_cached_and_well_formed(self):
        grid = plane_coefficient_grid(24)
        assert grid is plane_coefficient_grid(24)
        assert grid.coefs.shape[1] == 5
        assert grid.coefs.shape[0] == grid.kinds.size == grid.angles.shape[0]
        # plane-term coefficients of unit pairs sum to 1
        sums = grid.coefs[:, :4].sum(axis=1)
        assert np.max(np.abs(sums - 1.0)) < 1e-12


class TestLogComponents:
    def test_matches_direct_rows_from_exact_logs(self):
        rng = np.random.default_rng(41)
        for _ in range(200):
            ws = _random_state(rng)
            c23 = rng.uniform(-0.5, 0.5)
            direct = component_rows(ws.v, ws.v1, ws.v2, ws.h, ws.h1, ws.h2, c23)
            lv, lh = ws.v1 / ws.v, ws.h1 / ws.h
            logrows = component_rows_log(
                math.log(ws.v), lv, ws.v2 / ws.v - lv * lv,
                math.log(ws.h), lh, ws.h2 / ws.h - lh * lh, c23,
            )
            assert np.max(np.abs(logrows - direct)) <= 1e-12 * np.max(
                np.abs(direct)
            )

    def test_deep_tail_evaluates_where_direct_cannot(self):
        # state far below the double-precision floor of the warps themselves
        eps, r = 0.1, -800.0
        rows = component_rows_log(
            r + math.log(eps), 1.0, 0.0, 0.5 * r, 0.5, 0.0, 0.5
        )
        k21, kr1, kr2, k32, mixed = (float(x) for x in rows)
        assert k21 == pytest.approx(eps * eps / 16.0 - 0.5, abs=1e-15)
        assert kr1 == -1.0 and kr2 == -0.25
        assert math.isfinite(k32) and k32 <= -1e299  # clamped, not -inf
        assert mixed == pytest.approx(-0.5 * eps * 0.5, rel=1e-12)

    def test_clamp_is_inactive_at_moderate_radii(self):
        rows = component_rows_log(0.3, 1.1, -0.2, 0.1, 0.5, 0.05, 0.25)
        assert np.all(np.abs(rows) < 10.0)

    def test_rejects_bad_c23(self):
        with pytest.raises(ParameterError):
            component_rows_log(0.0, 1.0, 0.0, 0.0, 0.5, 0.0, 0.51)


class TestSupFromComponents:
    def test_equals_state_form(self):
        rng = np.random.default_rng(43)
        for _ in range(20):
            ws = _random_state(rng)
            c23 = rng.uniform(-0.5, 0.5)
            comps = component_rows(ws.v, ws.v1, ws.v2, ws.h, ws.h1, ws.h2, c23)
            a, pa = sup_sectional(ws, c23)
            b, pb = sup_from_components(comps, c23)
            assert a == b
            assert pa.kind == pb.kind and pa.C == pb.C and pa.D == pb.D

    def test_shape_validation(self):
        with pytest.raises(ParameterError):
            sup_from_components(np.zeros(4), 0.0)
        with pytest.raises(ParameterError):
            sup_from_components(np.zeros((5, 2)), 0.0)


class TestSupBatch:
    def test_reference_values_exact(self):
        # CH^n supremum is -1/4 at every radius and every c23
        rs = np.linspace(0.2, 8.0, 50)
        states = [chn_state(float(r)) for r in rs]
        for c23 in (0.0, 0.3, -0.5):
            comps = np.stack(
                [
                    component_rows(w.v, w.v1, w.v2, w.h, w.h1, w.h2, c23)
                    for w in states
                ],
                axis=-1,
            )
            sups = sup_sectional_batch(comps)
            assert np.max(np.abs(sups + 0.25)) < 1e-13

    def test_tail_supremum(self):
        comps = component_rows_log(
            -800.0 + math.log(0.1), 1.0, 0.0, -400.0, 0.5, 0.0, 0.5
        ).reshape(5, 1)
        assert float(sup_sectional_batch(comps)[0]) == -0.25

    def test_dominates_pointwise_search(self):
        # both are maxima over genuine planes; the reduction is exact in all
        # but one angle, so it can only exceed the simplex search, never
        # trail it beyond float noise
        rng = np.random.default_rng(47)
        for _ in range(40):
            ws = _random_state(rng)
            c23 = rng.uniform(-0.5, 0.5)
            comps = component_rows(ws.v, ws.v1, ws.v2, ws.h, ws.h1, ws.h2, c23)
            batch = float(sup_sectional_batch(comps.reshape(5, 1))[0])
            point, _ = sup_from_components(comps, c23)
            scale = max(1.0, abs(batch))
            assert point <= batch + 1e-11 * scale
            assert point >= batch - 1e-3 * scale

    def test_dominates_full_plane_grid(self):
        rng = np.random.default_rng(53)
        grid = plane_coefficient_grid(24)
        for _ in range(25):
            ws = _random_state(rng)
            c23 = rng.uniform(-0.5, 0.5)
            comps = component_rows(ws.v, ws.v1, ws.v2, ws.h, ws.h1, ws.h2, c23)
            batch = float(sup_sectional_batch(comps.reshape(5, 1))[0])
            grid_max = float(np.max(grid.coefs @ comps))
            assert batch >= grid_max - 1e-11 * max(1.0, abs(grid_max))

    def test_matches_two_angle_oracle(self):
        rng = np.random.default_rng(59)
        for _ in range(30):
            ws = _random_state(rng)
            c23 = rng.uniform(-0.5, 0.5)
            cc = coordinate_curvatures(ws, c23)
            comps = component_rows(ws.v, ws.v1, ws.v2, ws.h, ws.h1, ws.h2, c23)
            batch = float(sup_sectional_batch(comps.reshape(5, 1))[0])
            oracle = _sup_two_angle_oracle(cc)
            scale = max(1.0, abs(batch))
            assert abs(batch - oracle) <= 1e-5 * scale

    def test_shape_and_parameter_validation(self):
        with pytest.raises(ParameterError):
            sup_sectional_batch(np.zeros((4, 3)))
        with pytest.raises(ParameterError):
            sup_sectional_batch(np.zeros(5))
        with pytest.raises(ParameterError):
            sup_sectional_batch(np.zeros((5, 1)), n_phi=4)


class TestPlaneSamples:
    def test_coefficient_identity_and_ranges(self):
        for kind in ("generic", "nongeneric"):
            coefs = plane_coefficient_samples(kind, 5000, seed=11)
            assert coefs.shape == (5000, 5)
            sums = coefs[:, :4].sum(axis=1)
            assert np.max(np.abs(sums - 1.0)) < 1e-12
            assert np.min(coefs[:, :4]) >= -1e-15
            # |mixed coefficient| = |3 d1 d2 c0 c3| <= 3/4
            assert np.max(np.abs(coefs[:, 4])) <= 0.75 + 1e-12

    def test_nongeneric_never_uses_mixed_or_k32(self):
        coefs = plane_coefficient_samples("nongeneric", 1000, seed=13)
        assert np.all(coefs[:, 3] == 0.0) and np.all(coefs[:, 4] == 0.0)

    def test_deterministic_and_validated(self):
        a = plane_coefficient_samples("generic", 64, seed=3)
        b = plane_coefficient_samples("generic", 64, seed=3)
        assert np.array_equal(a, b)
        with pytest.raises(ParameterError):
            plane_coefficient_samples("generic", 0)
        with pytest.raises(ParameterError):
            plane_coefficient_samples("diagonal", 5)  # type: ignore[arg-type]


class TestC23Grid:
    def test_grid_contents(self):
        grid = DEFAULT_C23_GRID
        assert len(grid) == 21
        assert grid[0] == -0.5 and grid[-1] == 0.5
        assert 0.0 in grid
        steps = np.diff(grid)
        assert np.allclose(steps, 0.05, atol=1e-15)
