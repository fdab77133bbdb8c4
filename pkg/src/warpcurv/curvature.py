"""Sectional curvature of the multiply-warped metrics dr^2 + v^2 dtheta^2 + h^2 k.

Everything reduces to five closed-form component curvatures of the coordinate
2-planes spanned by (dr, Y_1, Y_2, Y_3):

    k21  = K(Y_2, Y_1) = K(Y_3, Y_1) = v^2/(16 h^4) - (v'/v)(h'/h)
    k32  = K(Y_3, Y_2) = -1/(4h^2) - 3c^2/h^2 - 3c^2 v^2/(4h^4) - (h'/h)^2
    kr1  = K(dr, Y_1)  = -v''/v
    kr2  = K(dr, Y_2)  = K(dr, Y_3) = -h''/h
    mixed = <R(dr, Y_1) Y_2, Y_3>   = -c (v/h^2) (v'/v - h'/h)

with c = c_23 the structure constant of the horizontal pair.  The curvature
of any tangent 2-plane is a fixed combination of these five values whose
coefficients depend only on the plane-pair coordinates, and the coefficients
of the four plane terms sum to 1 - so every sectional curvature is a convex
combination of component curvatures plus the mixed correction.

The supremum search exploits that structure: plane coefficients form a
matrix, component values a vector, and the whole grid evaluates as one
matrix-vector product, followed by a fixed simplex refinement of the best
grid points.

An independent oracle for the same components comes from the general
multiply-warped fiber-bundle formulas (``generic_warped_curvature``), which
know nothing about this specific three-factor specialization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from .errors import ParameterError
from .frames import PlanePair
from .profiles import eval_profile

__all__ = [
    "WarpState",
    "CoordinateCurvatures",
    "GenericWarpSpec",
    "SearchSpec",
    "DEFAULT_C23_GRID",
    "chn_state",
    "tail_state",
    "state_from_profiles",
    "coordinate_curvatures",
    "component_rows",
    "component_rows_log",
    "plane_coefficient_grid",
    "plane_coefficient_samples",
    "sectional_curvature",
    "sectional_curvature_nongeneric",
    "sup_sectional",
    "sup_from_components",
    "sup_sectional_batch",
    "tube_submersion_curvature",
    "a_tensor_norms",
    "generic_warped_curvature",
    "chn_reference",
]

# the scan parameter grid for c_23: 21 evenly spaced values across [-1/2, 1/2]
# (which include the distinguished 0 and +-1/2)
DEFAULT_C23_GRID: tuple[float, ...] = tuple(np.linspace(-0.5, 0.5, 21))

_DEGENERATE_TOL = 1e-14


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WarpState:
    """Both warp factors and their first two derivatives at one radius."""

    r: float
    v: float
    v1: float
    v2: float
    h: float
    h1: float
    h2: float

    def __post_init__(self) -> None:
        if not (self.v > 0.0 and self.h > 0.0):
            raise ParameterError(
                f"warp factors must be positive at r={self.r!r}: "
                f"v={self.v!r}, h={self.h!r}"
            )


def chn_state(r: float) -> WarpState:
    """The complex-hyperbolic pair v = sinh(r), h = cosh(r/2)."""
    if r <= 0.0:
        raise ParameterError(f"the reference pair needs r > 0, got {r!r}")
    return WarpState(
        r=r,
        v=math.sinh(r),
        v1=math.cosh(r),
        v2=math.sinh(r),
        h=math.cosh(0.5 * r),
        h1=0.5 * math.sinh(0.5 * r),
        h2=0.25 * math.cosh(0.5 * r),
    )


def tail_state(r: float, eps: float) -> WarpState:
    """The exact deep-tail pair v = eps e^r, h = e^{r/2}."""
    if not eps > 0.0:
        raise ParameterError(f"eps must be positive, got {eps!r}")
    v = eps * math.exp(r)
    h = math.exp(0.5 * r)
    return WarpState(r=r, v=v, v1=v, v2=v, h=h, h1=0.5 * h, h2=0.25 * h)


def state_from_profiles(v_profile, h_profile, r: float) -> WarpState:
    """Evaluate built profiles into a state; deep-tail underflow is rejected."""
    v, v1, v2 = eval_profile(v_profile, r)
    h, h1, h2 = eval_profile(h_profile, r)
    return WarpState(r=r, v=v, v1=v1, v2=v2, h=h, h1=h1, h2=h2)


# ---------------------------------------------------------------------------
# the five component curvatures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoordinateCurvatures:
    """The five closed-form components, carrying the c_23 they were built at."""

    k21: float
    k32: float
    kr1: float
    kr2: float
    mixed: float
    c23: float


def _check_c23(c23: float) -> float:
    c23 = float(c23)
    if not abs(c23) <= 0.5:
        raise ParameterError(f"|c_23| <= 1/2 required, got {c23!r}")
    return c23


def component_rows(v, v1, v2, h, h1, h2, c23: float) -> np.ndarray:
    """Stacked component values (k21, kr1, kr2, k32, mixed) x broadcast shape.

    Written in ratio form (v/h^2 before squaring, derivative ratios first)
    so deep-tail states where v^2 or h^4 underflow still evaluate exactly.
    """
    c23 = _check_c23(c23)
    v, v1, v2 = np.asarray(v, float), np.asarray(v1, float), np.asarray(v2, float)
    h, h1, h2 = np.asarray(h, float), np.asarray(h1, float), np.asarray(h2, float)
    lv = v1 / v
    lh = h1 / h
    vh2 = (v / h) / h
    inv_h2 = (1.0 / h) / h
    csq = c23 * c23
    k21 = vh2 * vh2 / 16.0 - lv * lh
    kr1 = -v2 / v
    kr2 = -h2 / h
    k32 = -(0.25 + 3.0 * csq) * inv_h2 - 0.75 * csq * vh2 * vh2 - lh * lh
    mixed = -c23 * vh2 * (lv - lh)
    return np.stack(np.broadcast_arrays(k21, kr1, kr2, k32, mixed))


# growth factors in the horizontal component: exp clamps keeping deep-tail
# values finite.  Saturating 1/h^2 only drives k32 further down, so suprema
# are unaffected; vh2 = v/h^2 is bounded in every admissible construction and
# the clamp is pure overflow protection.
_LOG_INV_H2_CLAMP = math.log(1e300)
_LOG_VH2_CLAMP = math.log(1e150)


def component_rows_log(wv0, wv1, wv2, wh0, wh1, wh2, c23: float) -> np.ndarray:
    """Component rows from log-domain warp data: w = ln(warp), w', w''.

    The deep tail is where the warps themselves underflow double precision;
    every ratio the components need comes straight from the log data
    (v'/v = wv', v''/v = wv'' + wv'^2, v/h^2 = exp(wv - 2 wh)), so this path
    stays exact arbitrarily far down.  The growth factor 1/h^2 is clamped at
    1e300: past that point the horizontal component only becomes more
    negative, so maxima are preserved.
    """
    c23 = _check_c23(c23)
    wv0, wv1, wv2 = (np.asarray(x, float) for x in (wv0, wv1, wv2))
    wh0, wh1, wh2 = (np.asarray(x, float) for x in (wh0, wh1, wh2))
    lv = wv1
    lh = wh1
    vh2 = np.exp(np.minimum(wv0 - 2.0 * wh0, _LOG_VH2_CLAMP))
    inv_h2 = np.exp(np.minimum(-2.0 * wh0, _LOG_INV_H2_CLAMP))
    csq = c23 * c23
    k21 = vh2 * vh2 / 16.0 - lv * lh
    kr1 = -(wv2 + wv1 * wv1)
    kr2 = -(wh2 + wh1 * wh1)
    k32 = -(0.25 + 3.0 * csq) * inv_h2 - 0.75 * csq * vh2 * vh2 - lh * lh
    mixed = -c23 * vh2 * (lv - lh)
    return np.stack(np.broadcast_arrays(k21, kr1, kr2, k32, mixed))


def coordinate_curvatures(ws: WarpState, c23: float) -> CoordinateCurvatures:
    """The five closed-form coordinate-plane curvature values at one state."""
    rows = component_rows(ws.v, ws.v1, ws.v2, ws.h, ws.h1, ws.h2, c23)
    k21, kr1, kr2, k32, mixed = (float(x) for x in rows)
    return CoordinateCurvatures(
        k21=k21, k32=k32, kr1=kr1, kr2=kr2, mixed=mixed, c23=float(c23)
    )


# ---------------------------------------------------------------------------
# sectional curvature of a plane pair
# ---------------------------------------------------------------------------


def _term(coef: float, value: float) -> float:
    # a plane that does not involve a component must not pick up its
    # overflow: 0 * inf would poison the sum with NaN
    return coef * value if coef != 0.0 else 0.0


def sectional_curvature(cc: CoordinateCurvatures, pp: PlanePair) -> float:
    """The six-term assembly for a generic pair (C over all four directions,
    D horizontal)."""
    if pp.kind != "generic":
        raise ParameterError(f"generic pair required, got {pp.kind!r}")
    c0, c1, c2, c3 = pp.C
    d1, d2 = pp.D
    return (
        _term((d1 * c2 - d2 * c1) ** 2, cc.k21)
        + _term(d1 * d1 * c3 * c3, cc.k21)
        + _term(d1 * d1 * c0 * c0, cc.kr1)
        + _term(d2 * d2 * c0 * c0, cc.kr2)
        + _term(d2 * d2 * c3 * c3, cc.k32)
        + _term(3.0 * d1 * d2 * c0 * c3, cc.mixed)
    )


def sectional_curvature_nongeneric(cc: CoordinateCurvatures, pp: PlanePair) -> float:
    """The three-term assembly when D has a radial part; mixed terms vanish."""
    if pp.kind != "nongeneric":
        raise ParameterError(f"nongeneric pair required, got {pp.kind!r}")
    c0, c1, c2 = pp.C
    d0, d1 = pp.D
    return (
        _term((d0 * c1 - d1 * c0) ** 2, cc.kr1)
        + _term(d0 * d0 * c2 * c2, cc.kr2)
        + _term(d1 * d1 * c2 * c2, cc.k21)
    )


# ---------------------------------------------------------------------------
# plane grids: coefficients against (k21, kr1, kr2, k32, mixed)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchSpec:
    """Deterministic supremum search: grid divisions per angle, then a fixed
    simplex refinement of the best grid points."""

    divisions: int = 24
    refine_starts: int = 10
    refine_iters: int = 20

    def __post_init__(self) -> None:
        if self.divisions < 4:
            raise ParameterError("need at least 4 angle divisions")
        if self.refine_starts < 0 or self.refine_iters < 0:
            raise ParameterError("refinement counts must be nonnegative")


@dataclass(frozen=True)
class PlaneGrid:
    """Precomputed plane-coefficient rows: K = coefs @ components.

    Kind 0: generic pairs with D forced by the overlap constraint.
    Kind 1: nongeneric pairs, D forced likewise.
    Kind 2: generic pairs whose constraint degenerates (no horizontal
    overlap), where D is a free second angle.
    """

    coefs: np.ndarray = field(repr=False)   # (m, 5)
    kinds: np.ndarray = field(repr=False)   # (m,)
    angles: np.ndarray = field(repr=False)  # (m, 3); 2-angle rows pad col 2


def _generic_coefs(c0, c1, c2, c3, d1, d2) -> np.ndarray:
    cross = d1 * c2 - d2 * c1
    return np.stack(
        np.broadcast_arrays(
            cross * cross + d1 * d1 * c3 * c3,  # k21 (two terms share it)
            d1 * d1 * c0 * c0,                  # kr1
            d2 * d2 * c0 * c0,                  # kr2
            d2 * d2 * c3 * c3,                  # k32
            3.0 * d1 * d2 * c0 * c3,            # mixed
        ),
        axis=-1,
    )


def _nongeneric_coefs(c0, c1, c2, d0, d1) -> np.ndarray:
    cross = d0 * c1 - d1 * c0
    zero = np.zeros(np.broadcast_shapes(np.shape(c0), np.shape(d0)))
    return np.stack(
        np.broadcast_arrays(
            d1 * d1 * c2 * c2,   # k21
            cross * cross,       # kr1
            d0 * d0 * c2 * c2,   # kr2
            zero,                # k32
            zero,                # mixed
        ),
        axis=-1,
    )


def _sphere3(a, b, g):
    """C on the unit 3-sphere from three spherical angles."""
    sa, sb = np.sin(a), np.sin(b)
    return np.cos(a), sa * np.cos(b), sa * sb * np.cos(g), sa * sb * np.sin(g)


def _sphere2(a, b):
    sa = np.sin(a)
    return np.cos(a), sa * np.cos(b), sa * np.sin(b)


@lru_cache(maxsize=8)
def plane_coefficient_grid(divisions: int = 24) -> PlaneGrid:
    """Every constrained plane pair on the angle grid, as coefficient rows.

    Generic pairs: C on a 3-angle grid of the unit sphere, D forced (up to
    an irrelevant overall sign) by the orthogonality constraint; grid points
    where the constraint degenerates are skipped because the entire
    degenerate stratum C = (cos p, 0, 0, sin p) with a free horizontal D is
    enumerated as its own 2-angle family.  Nongeneric pairs: the analogous
    2-angle family with its (diagonal) degenerate corners emitted on both
    horizontal axes.
    """
    nodes = divisions + 1
    half = np.linspace(0.0, math.pi, nodes)
    full = np.linspace(0.0, 2.0 * math.pi, 2 * nodes)

    rows: list[np.ndarray] = []
    kinds: list[np.ndarray] = []
    angles: list[np.ndarray] = []

    a, b, g = (x.ravel() for x in np.meshgrid(half, half, full, indexing="ij"))
    c0, c1, c2, c3 = _sphere3(a, b, g)
    onorm = np.hypot(c1, c2)
    ok = onorm > _DEGENERATE_TOL
    d1, d2 = -c2[ok] / onorm[ok], c1[ok] / onorm[ok]
    rows.append(_generic_coefs(c0[ok], c1[ok], c2[ok], c3[ok], d1, d2))
    kinds.append(np.zeros(int(np.count_nonzero(ok)), dtype=int))
    angles.append(np.stack([a[ok], b[ok], g[ok]], axis=-1))

    p, q = (x.ravel() for x in np.meshgrid(half, half, indexing="ij"))
    rows.append(
        _generic_coefs(np.cos(p), 0.0, 0.0, np.sin(p), np.cos(q), np.sin(q))
    )
    kinds.append(np.full(p.size, 2, dtype=int))
    angles.append(np.stack([p, q, np.zeros(p.size)], axis=-1))

    a2, b2 = (x.ravel() for x in np.meshgrid(half, full, indexing="ij"))
    e0, e1, e2 = _sphere2(a2, b2)
    onorm2 = np.hypot(e0, e1)
    ok2 = onorm2 > _DEGENERATE_TOL
    d0, d1n = -e1[ok2] / onorm2[ok2], e0[ok2] / onorm2[ok2]
    rows.append(_nongeneric_coefs(e0[ok2], e1[ok2], e2[ok2], d0, d1n))
    kinds.append(np.ones(int(np.count_nonzero(ok2)), dtype=int))
    angles.append(
        np.stack([a2[ok2], b2[ok2], np.zeros(int(np.count_nonzero(ok2)))], axis=-1)
    )
    for dd0, dd1 in ((1.0, 0.0), (0.0, 1.0)):
        bad = ~ok2
        rows.append(_nongeneric_coefs(e0[bad], e1[bad], e2[bad], dd0, dd1))
        kinds.append(np.ones(int(np.count_nonzero(bad)), dtype=int))
        angles.append(
            np.stack([a2[bad], b2[bad], np.zeros(int(np.count_nonzero(bad)))], axis=-1)
        )

    return PlaneGrid(
        coefs=np.concatenate(rows),
        kinds=np.concatenate(kinds),
        angles=np.concatenate(angles),
    )


def plane_coefficient_samples(
    kind: Literal["generic", "nongeneric"],
    count: int,
    seed: int | np.random.Generator = 0,
) -> np.ndarray:
    """Coefficient rows (count, 5) of random constrained plane pairs.

    C is uniform on its sphere; the second direction is forced by the
    orthogonality constraint, or drawn uniformly on the circle where the
    constraint degenerates.  Deterministic for an integer seed.
    """
    if count < 1:
        raise ParameterError(f"need at least one sample, got {count!r}")
    rng = (
        seed
        if isinstance(seed, np.random.Generator)
        else np.random.default_rng(seed)
    )
    if kind == "generic":
        c = rng.normal(size=(count, 4))
        c /= np.linalg.norm(c, axis=1, keepdims=True)
        w = np.hypot(c[:, 1], c[:, 2])
        free = rng.uniform(0.0, 2.0 * math.pi, size=count)
        ok = w > _DEGENERATE_TOL
        d1 = np.where(ok, -c[:, 2] / np.where(ok, w, 1.0), np.cos(free))
        d2 = np.where(ok, c[:, 1] / np.where(ok, w, 1.0), np.sin(free))
        return _generic_coefs(c[:, 0], c[:, 1], c[:, 2], c[:, 3], d1, d2)
    if kind == "nongeneric":
        c = rng.normal(size=(count, 3))
        c /= np.linalg.norm(c, axis=1, keepdims=True)
        w = np.hypot(c[:, 0], c[:, 1])
        free = rng.uniform(0.0, 2.0 * math.pi, size=count)
        ok = w > _DEGENERATE_TOL
        d0 = np.where(ok, -c[:, 1] / np.where(ok, w, 1.0), np.cos(free))
        d1 = np.where(ok, c[:, 0] / np.where(ok, w, 1.0), np.sin(free))
        return _nongeneric_coefs(c[:, 0], c[:, 1], c[:, 2], d0, d1)
    raise ParameterError(f"unknown pair kind {kind!r}")


# ---------------------------------------------------------------------------
# supremum over planes
# ---------------------------------------------------------------------------


def _eig2_max(m00: float, m11: float, m01: float) -> tuple[float, tuple[float, float]]:
    """Largest eigenvalue and eigenvector of a symmetric 2x2 form."""
    mean = 0.5 * (m00 + m11)
    radius = math.hypot(0.5 * (m00 - m11), m01)
    lam = mean + radius
    if m01 == 0.0:
        vec = (1.0, 0.0) if m00 >= m11 else (0.0, 1.0)
    else:
        vx, vy = m01, lam - m00
        norm = math.hypot(vx, vy)
        vec = (vx / norm, vy / norm)
    return lam, vec


def _generic_plane_at(angles, cc: CoordinateCurvatures) -> tuple[float, PlanePair]:
    """K and the realizing pair at 3-sphere angles, maximizing over D when
    the orthogonality constraint degenerates."""
    c0, c1, c2, c3 = _sphere3(*angles)
    onorm = math.hypot(c1, c2)
    if onorm > _DEGENERATE_TOL:
        d = (-c2 / onorm, c1 / onorm)
    else:
        m01 = 1.5 * c0 * c3 * cc.mixed
        _, d = _eig2_max(
            c3 * c3 * cc.k21 + c0 * c0 * cc.kr1,
            c0 * c0 * cc.kr2 + c3 * c3 * cc.k32,
            m01,
        )
    pp = PlanePair(kind="generic", C=(c0, c1, c2, c3), D=d)
    return sectional_curvature(cc, pp), pp


def _degenerate_generic_plane_at(
    angles, cc: CoordinateCurvatures
) -> tuple[float, PlanePair]:
    """K on the degenerate stratum: C = (cos p, 0, 0, sin p), D free."""
    c0, c3 = math.cos(angles[0]), math.sin(angles[0])
    d = (math.cos(angles[1]), math.sin(angles[1]))
    pp = PlanePair(kind="generic", C=(c0, 0.0, 0.0, c3), D=d)
    return sectional_curvature(cc, pp), pp


def _nongeneric_plane_at(angles, cc: CoordinateCurvatures) -> tuple[float, PlanePair]:
    c0, c1, c2 = _sphere2(angles[0], angles[1])
    onorm = math.hypot(c0, c1)
    if onorm > _DEGENERATE_TOL:
        d = (-c1 / onorm, c0 / onorm)
    else:
        # K(D) = c2^2 (d0^2 kr2 + d1^2 k21): diagonal form
        _, d = _eig2_max(c2 * c2 * cc.kr2, c2 * c2 * cc.k21, 0.0)
    pp = PlanePair(kind="nongeneric", C=(c0, c1, c2), D=d)
    return sectional_curvature_nongeneric(cc, pp), pp


def _nelder_mead_max(f, x0: np.ndarray, step: float, iters: int) -> np.ndarray:
    """Fixed-coefficient simplex ascent (reflection 1, expansion 2,
    contraction 1/2, shrink 1/2); deterministic for deterministic f."""
    dim = x0.size
    pts = [np.array(x0, dtype=float)]
    for i in range(dim):
        q = np.array(x0, dtype=float)
        q[i] += step
        pts.append(q)
    vals = [f(q) for q in pts]
    for _ in range(iters):
        order = sorted(range(dim + 1), key=lambda i: -vals[i])
        pts = [pts[i] for i in order]
        vals = [vals[i] for i in order]
        centroid = np.mean(pts[:-1], axis=0)
        worst = pts[-1]
        refl = centroid + (centroid - worst)
        f_refl = f(refl)
        if f_refl > vals[0]:
            expand = centroid + 2.0 * (centroid - worst)
            f_exp = f(expand)
            if f_exp > f_refl:
                pts[-1], vals[-1] = expand, f_exp
            else:
                pts[-1], vals[-1] = refl, f_refl
        elif f_refl > vals[-2]:
            pts[-1], vals[-1] = refl, f_refl
        else:
            contract = centroid + 0.5 * (worst - centroid)
            f_con = f(contract)
            if f_con > vals[-1]:
                pts[-1], vals[-1] = contract, f_con
            else:
                for i in range(1, dim + 1):
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0])
                    vals[i] = f(pts[i])
    best = max(range(dim + 1), key=lambda i: vals[i])
    return pts[best]


def _sup_from_cc(
    cc: CoordinateCurvatures, spec: SearchSpec
) -> tuple[float, PlanePair]:
    grid = plane_coefficient_grid(spec.divisions)
    comps = np.array([cc.k21, cc.kr1, cc.kr2, cc.k32, cc.mixed])
    values = grid.coefs @ comps

    evaluate = {
        0: (_generic_plane_at, 3),
        1: (_nongeneric_plane_at, 2),
        2: (_degenerate_generic_plane_at, 2),
    }
    best_idx = int(np.argmax(values))
    eval_best, dim_best = evaluate[int(grid.kinds[best_idx])]
    best_val, best_pair = eval_best(grid.angles[best_idx][:dim_best], cc)
    best_val = max(best_val, float(values[best_idx]))

    if spec.refine_starts > 0 and spec.refine_iters > 0:
        step = 0.5 * math.pi / spec.divisions
        top = np.argsort(-values, kind="stable")[: spec.refine_starts]
        for idx in top:
            at, dim = evaluate[int(grid.kinds[idx])]
            x0 = np.asarray(grid.angles[idx][:dim], float)
            refined = _nelder_mead_max(
                lambda x: at(x, cc)[0], x0, step, spec.refine_iters
            )
            val, pair = at(refined, cc)
            if val > best_val:
                best_val, best_pair = val, pair
    return best_val, best_pair


def sup_sectional(
    ws: WarpState, c23: float, search: SearchSpec | None = None
) -> tuple[float, PlanePair]:
    """Maximum sectional curvature over all tangent 2-planes at one state.

    Exhaustive coefficient-grid evaluation over both plane families (the
    result is never below any grid pair's value), then simplex refinement
    seeded at the best grid points.  Deterministic for a fixed search spec.
    """
    return _sup_from_cc(coordinate_curvatures(ws, c23), search or SearchSpec())


def sup_from_components(
    comps: np.ndarray, c23: float, search: SearchSpec | None = None
) -> tuple[float, PlanePair]:
    """``sup_sectional`` from precomputed component values.

    Takes one column of :func:`component_rows` / :func:`component_rows_log`
    (order k21, kr1, kr2, k32, mixed), so states whose warp values underflow
    double precision can still be searched.
    """
    comps = np.asarray(comps, dtype=float).reshape(-1)
    if comps.shape != (5,):
        raise ParameterError(
            f"expected the five component values, got shape {comps.shape}"
        )
    k21, kr1, kr2, k32, mixed = (float(x) for x in comps)
    cc = CoordinateCurvatures(
        k21=k21, k32=k32, kr1=kr1, kr2=kr2, mixed=mixed, c23=_check_c23(c23)
    )
    return _sup_from_cc(cc, search or SearchSpec())


def _lambda_max(a, b, q):
    """Largest eigenvalue of [[a, q], [q, b]], elementwise and stably:
    max(a, b) + q^2 / (hypot((a-b)/2, q) + |a-b|/2) avoids the catastrophic
    cancellation of mean + radius when one diagonal entry is huge."""
    diff = 0.5 * (a - b)
    rad = np.hypot(diff, q)
    denom = rad + np.abs(diff)
    bump = np.divide(
        q * q, denom, out=np.zeros_like(denom), where=q != 0.0
    )
    return np.maximum(a, b) + bump


def sup_sectional_batch(comps: np.ndarray, n_phi: int = 721) -> np.ndarray:
    """Supremum over all tangent 2-planes for a whole batch of states.

    Works on component columns of shape (5, n).  The constrained plane
    families reduce exactly to a one-angle eigenvalue problem: writing the
    overlap mass of C with the horizontal pair as rho^2, every generic-pair
    curvature equals rho^2 k21 + (1 - rho^2) Q where Q ranges over the values
    d^T M(phi) d of the 2x2 form

        M(phi) = [[sin^2(phi) k21 + cos^2(phi) kr1,   1.5 sin(phi)cos(phi) m],
                  [1.5 sin(phi)cos(phi) m,  cos^2(phi) kr2 + sin^2(phi) k32]]

    over unit d and phi in [0, pi/2]; pairs with a radial second direction
    only realize max(kr1, kr2, k21) = values of M at the endpoint angles.
    Hence sup K = max(k21, sup_phi lambda_max(M(phi))), computed on a dense
    phi grid with one parabolic polish of the per-state argmax.
    """
    comps = np.asarray(comps, dtype=float)
    if comps.ndim != 2 or comps.shape[0] != 5:
        raise ParameterError(
            f"expected component rows of shape (5, n), got {comps.shape}"
        )
    if n_phi < 9:
        raise ParameterError(f"need at least 9 angle nodes, got {n_phi!r}")
    k21, kr1, kr2, k32, mixed = comps

    phi = np.linspace(0.0, 0.5 * math.pi, n_phi)[:, None]
    sin2 = np.sin(phi) ** 2
    cos2 = 1.0 - sin2
    cross = 1.5 * np.sin(phi) * np.cos(phi)
    lam = _lambda_max(
        sin2 * k21 + cos2 * kr1,
        cos2 * kr2 + sin2 * k32,
        cross * mixed,
    )

    cols = np.arange(comps.shape[1])
    idx = np.argmax(lam, axis=0)
    best = lam[idx, cols]

    # one parabolic polish of the interior argmax (boundary maxima are exact)
    ic = np.clip(idx, 1, n_phi - 2)
    lo, mid, hi = lam[ic - 1, cols], lam[ic, cols], lam[ic + 1, cols]
    denom = lo - 2.0 * mid + hi
    shift = np.where(
        np.abs(denom) > 0.0, 0.5 * (lo - hi) / np.where(denom == 0, 1.0, denom), 0.0
    )
    shift = np.clip(shift, -1.0, 1.0)
    step = 0.5 * math.pi / (n_phi - 1)
    phi_star = np.clip(ic * step + shift * step, 0.0, 0.5 * math.pi)
    s2 = np.sin(phi_star) ** 2
    c2 = 1.0 - s2
    polished = _lambda_max(
        s2 * k21 + c2 * kr1,
        c2 * kr2 + s2 * k32,
        1.5 * np.sin(phi_star) * np.cos(phi_star) * mixed,
    )
    return np.maximum(k21, np.maximum(best, polished))


# ---------------------------------------------------------------------------
# submersion quantities of the tube fibration
# ---------------------------------------------------------------------------


def _check_positive(v: float, h: float) -> None:
    if not (v > 0.0 and h > 0.0):
        raise ParameterError(f"warp factors must be positive: v={v!r}, h={h!r}")


def tube_submersion_curvature(v: float, h: float, c_ij: float) -> tuple[float, float]:
    """Fiber-metric curvature components of the rescaled tube metric:
    the circle-horizontal value v^4/(16 h^4) and the horizontal-horizontal
    value -1/4 - 3c^2 - 3c^2 v^2/(4h^2)."""
    _check_positive(v, h)
    c = _check_c23(c_ij)
    ratio = v / h
    eq10 = (ratio * ratio) ** 2 / 16.0
    eq11 = -0.25 - 3.0 * c * c - 0.75 * c * c * ratio * ratio
    return eq10, eq11


def a_tensor_norms(v: float, h: float, c_ij: float) -> tuple[float, float]:
    """O'Neill A-tensor norms of the tube submersion:
    |A_{X_i} X_j| = (|c_ij|/2)(v/h) and |A_{X_i} X_1| = v^2/(4h^2)."""
    _check_positive(v, h)
    c = _check_c23(c_ij)
    ratio = v / h
    return 0.5 * abs(c) * ratio, 0.25 * ratio * ratio


# ---------------------------------------------------------------------------
# the general multiply-warped oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GenericWarpSpec:
    """A general multiply-warped product dr^2 + sum h_i(r)^2 (fiber factors).

    ``h``, ``h1``, ``h2`` are the warp values and derivatives for factors
    1..m; ``bracket[(i, j, k)]`` holds <[Y_i, Y_j], Y_k> (antisymmetric in
    i, j); ``fiber[(i, j, l, m)]`` holds the fiber curvature components
    <R_fiber(Y_i, Y_j) Y_l, Y_m> wherever they are nonzero.
    """

    h: tuple[float, ...]
    h1: tuple[float, ...]
    h2: tuple[float, ...]
    bracket: dict[tuple[int, int, int], float] = field(default_factory=dict)
    fiber: dict[tuple[int, int, int, int], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        m = len(self.h)
        if m == 0 or len(self.h1) != m or len(self.h2) != m:
            raise ParameterError("h, h1, h2 must have equal positive length")
        if any(not x > 0.0 for x in self.h):
            raise ParameterError("warp factors must be positive")
        for (i, j, k), val in self.bracket.items():
            self._check_index(i), self._check_index(j), self._check_index(k)
            mirror = self.bracket.get((j, i, k))
            if mirror is not None and mirror != -val:
                raise ParameterError(
                    f"bracket coefficients must be antisymmetric: "
                    f"B[{i},{j},{k}]={val!r} but B[{j},{i},{k}]={mirror!r}"
                )
        for key in self.fiber:
            for idx in key:
                self._check_index(idx)

    @property
    def m(self) -> int:
        return len(self.h)

    def _check_index(self, i: int) -> None:
        if not 1 <= i <= len(self.h):
            raise ParameterError(
                f"fiber index {i} out of range 1..{len(self.h)}"
            )

    def bracket_value(self, i: int, j: int, k: int) -> float:
        val = self.bracket.get((i, j, k))
        if val is not None:
            return val
        val = self.bracket.get((j, i, k))
        return -val if val is not None else 0.0

    def fiber_value(self, i: int, j: int, l: int, m: int) -> float:
        for key, sign in (
            ((i, j, l, m), 1.0),
            ((j, i, l, m), -1.0),
            ((i, j, m, l), -1.0),
            ((j, i, m, l), 1.0),
            ((l, m, i, j), 1.0),
            ((m, l, i, j), -1.0),
            ((l, m, j, i), -1.0),
            ((m, l, j, i), 1.0),
        ):
            val = self.fiber.get(key)
            if val is not None:
                return sign * val
        return 0.0

    def log_slope(self, i: int) -> float:
        return self.h1[i - 1] / self.h[i - 1]


def _mixed_component(spec: GenericWarpSpec, i: int, j: int, k: int) -> float:
    """<R(dr, Y_i) Y_j, Y_k>: bracket coefficients against log-slope gaps."""
    li, lj, lk = spec.log_slope(i), spec.log_slope(j), spec.log_slope(k)
    total = (
        spec.bracket_value(i, j, k) * (lk - lj)
        + spec.bracket_value(k, i, j) * (lj - lk)
        + spec.bracket_value(k, j, i) * (2.0 * li - lj - lk)
    )
    return 0.5 * total


def generic_warped_curvature(
    spec: GenericWarpSpec, indices: tuple[int, int, int, int]
) -> float:
    """<R(Y_a, Y_b) Y_c, Y_d> of the warped product; index 0 means dr.

    Covers every component class the warped structure produces: plane terms
    (fiber value minus the warp cross-term), radial terms -h_i''/h_i, the
    bracket-driven mixed components, the vanishing radial cross terms, and
    fiber components preserved verbatim when {a,b} != {c,d}.
    """
    if len(indices) != 4:
        raise ParameterError(f"need 4 indices, got {len(indices)}")
    a, b, c, d = (int(i) for i in indices)
    for idx in (a, b, c, d):
        if not 0 <= idx <= spec.m:
            raise ParameterError(f"index {idx} out of range 0..{spec.m}")
    if a == b or c == d:
        return 0.0

    sign = 1.0
    if b == 0:  # move any radial index to the front of its pair
        a, b, sign = b, a, -sign
    if d == 0:
        c, d, sign = d, c, -sign
    if c == 0 and a != 0:  # pair swap is symmetric
        a, b, c, d = c, d, a, b

    if a == 0 and c == 0:
        # <R(dr, Y_b) dr, Y_d> = h_b''/h_b on the diagonal, zero off it
        if b == d:
            return sign * spec.h2[b - 1] / spec.h[b - 1]
        return 0.0
    if a == 0:
        return sign * _mixed_component(spec, b, c, d)

    # all four indices are fiber directions
    if {a, b} == {c, d}:
        cross = (
            spec.h1[a - 1] * spec.h1[b - 1] / (spec.h[a - 1] * spec.h[b - 1])
        )
        plane = spec.fiber_value(a, b, b, a) - cross
        return sign * (plane if (c, d) == (b, a) else -plane)
    return sign * spec.fiber_value(a, b, c, d)


# ---------------------------------------------------------------------------
# the complex-hyperbolic reference values
# ---------------------------------------------------------------------------

_CHN_KINDS = ("mixed_dr", "sec", "vanishing")


def chn_reference(
    i: int, j: int, c: float, kind: Literal["mixed_dr", "sec", "vanishing"]
) -> float:
    """Reference curvature values of the ambient complex-hyperbolic metric:
    the radial mixed component -c_ij, the horizontal sectional value
    -1/4 - 3 c_ij^2, and the vanishing mixed components."""
    if kind not in _CHN_KINDS:
        raise ParameterError(f"kind must be one of {_CHN_KINDS}, got {kind!r}")
    if i < 1 or j < 1 or i == j:
        raise ParameterError(f"need distinct frame indices >= 1, got ({i}, {j})")
    c = _check_c23(c)
    if kind == "mixed_dr":
        return -c
    if kind == "sec":
        return -0.25 - 3.0 * c * c
    return 0.0
