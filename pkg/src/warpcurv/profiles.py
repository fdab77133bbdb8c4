"""Warping-function profiles: three bent-and-mollified radial scale factors.

All bending happens in the log domain.  Each profile stores a
``SmoothedFunction`` for the log of the warp; evaluation exponentiates.

* ``v`` (circle direction) climbs from eps * e^r in the deep tail to sinh(r):
  the log base is the convex max of the line r + ln(eps) and the tangent line
  of ln sinh at r_plus, bent by quadratic corrections anchored at
  r_minus/r_plus and smoothed at the kink r_zero and at both anchors.

* ``h`` (horizontal direction) interpolates between e^{r/2} and cosh(r/2)
  through the quadratic q(r) = l(r) + eps^6 (r - rho)^2, where l is the
  tangent line of cosh(r/2) at rho = r_minus / 2: the log base follows r/2 up
  to n, bends onto the tangent line of ln q at m (the point where
  q'/q = 3/4), follows ln q on [m, rho], and continues as ln cosh(r/2).

* ``g`` (asymptotically regular variant of h) replaces the deep tail by
  tau + e^{r/2} with tau = eps * e^{n}: its log base follows
  ln(tau + e^{r/2}) up to p = 2 ln tau, bends from the tangent line at p onto
  r/2 across [p, o] with o = ln tau, and coincides with h's base (windows
  included) from o upward.

Every smoothing window carries a certified second-derivative statement for
the warp ratio (v''/v, h''/h or g''/g), established by halving the kernel
half-width until the bound holds on a dense window grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .errors import ConstructionError, DomainError, ParameterError
from .expressions import (
    Affine,
    LogCosh,
    LogQuadratic,
    LogSinh,
    LogTauExp,
    PiecewiseExpr,
    Quadratic,
    ScaledSum,
    SmoothedFunction,
    Window,
)
from .reporting import CheckEntry, Report
from .smoothing import find_window_delta, window_grid

__all__ = [
    "EpsilonParams",
    "GridSpec",
    "VProfile",
    "HProfile",
    "GProfile",
    "solve_r_epsilon",
    "build_v",
    "build_h",
    "build_g",
    "eval_profile",
    "log_eval",
    "verify_profile_invariants",
    "profile_to_dict",
    "profile_from_dict",
]

MAX_EPS = 0.3
_OFFSET_RETRIES = 50
_R_MIN_DEFAULT = -2500.0
# exp underflows to subnormals below ~ -708; keep direct evaluation honest
_LOG_FLOOR = -700.0


def solve_r_epsilon(eps: float) -> float:
    """The radius where sinh(r) = eps * e^r, i.e. r = -ln(1 - 2 eps) / 2."""
    if not 0.0 < eps < 0.5:
        raise ParameterError(f"no solution radius for eps = {eps!r}")
    return -0.5 * math.log1p(-2.0 * eps)


@dataclass(frozen=True)
class EpsilonParams:
    """Construction parameters: scale eps, window radius sigma, kernel delta.

    Defaults pick the practical regime sigma = eps^4 / 8 and
    delta = sigma / 16.  ``strict_regime`` additionally demands
    sigma < eps^8, which is numerically meaningful only for eps >= 0.05.
    """

    eps: float
    sigma: float = None  # type: ignore[assignment]
    delta: float = None  # type: ignore[assignment]
    strict_regime: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.eps < MAX_EPS:
            raise ParameterError(
                f"eps must lie in (0, {MAX_EPS}) so the transition radius "
                f"exists; got {self.eps!r}"
            )
        if self.sigma is None:
            sigma = self.eps**8 / 2.0 if self.strict_regime else self.eps**4 / 8.0
            object.__setattr__(self, "sigma", sigma)
        if self.delta is None:
            object.__setattr__(self, "delta", self.sigma / 16.0)
        if not (self.sigma > 0.0 and np.isfinite(self.sigma)):
            raise ParameterError(f"sigma must be positive, got {self.sigma!r}")
        if not 0.0 < self.delta < self.sigma / 4.0:
            raise ParameterError(
                f"delta must lie in (0, sigma/4); got delta={self.delta!r}, "
                f"sigma={self.sigma!r}"
            )
        if self.strict_regime:
            if self.eps < 0.05:
                raise ParameterError(
                    "strict regime (sigma < eps^8) is below double-precision "
                    "resolution for eps < 0.05"
                )
            if not self.sigma < self.eps**8:
                raise ParameterError(
                    f"strict regime requires sigma < eps^8 = {self.eps**8!r}; "
                    f"got sigma = {self.sigma!r}"
                )

    def to_dict(self) -> dict[str, Any]:
        return {
            "eps": self.eps,
            "sigma": self.sigma,
            "delta": self.delta,
            "strict_regime": self.strict_regime,
        }


@dataclass(frozen=True)
class GridSpec:
    """Grid densities for invariant verification and curvature scans."""

    region_points: int = 2001
    window_points: int = 801
    tail_span: float = 50.0

    def __post_init__(self) -> None:
        if self.region_points < 3 or self.window_points < 3:
            raise ParameterError("grids need at least 3 points")


@dataclass(frozen=True)
class VProfile:
    params: EpsilonParams
    r_eps: float
    r_minus: float
    r_plus: float
    r_zero: float
    log_v: SmoothedFunction
    offset_halvings: int = 0


@dataclass(frozen=True)
class HProfile:
    params: EpsilonParams
    rho_eps: float
    z_eps: float
    m_eps: float
    n_eps: float
    r_bar: float
    q_coeffs: tuple[float, float, float, float]  # (a2, a1, a0, x0)
    log_h: SmoothedFunction


@dataclass(frozen=True)
class GProfile:
    params: EpsilonParams
    h_profile: HProfile
    tau_eps: float
    o_eps: float
    p_eps: float
    r_star: float
    log_g: SmoothedFunction


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


def _ratio_floor_certificate(
    floor: float, n: int = 1001, convex: bool = False
) -> Callable[[SmoothedFunction, Window], bool]:
    """w'' + w'^2 > floor on the window grid (w = log warp), optionally
    also requiring w'' > 0 (log-convexity through the bend)."""

    def cert(sf: SmoothedFunction, w: Window) -> bool:
        grid = window_grid(w.center, w.sigma, n)
        w1 = sf.eval_many(grid, 1)
        w2 = sf.eval_many(grid, 2)
        if convex and not np.all(w2 > 0.0):
            return False
        return bool(np.all(w2 + w1 * w1 > floor))

    return cert


def _corrected(seg, coeff: float, anchor: float) -> ScaledSum:
    return ScaledSum(((1.0, seg), (1.0, Quadratic(coeff, 0.0, 0.0, anchor))))


def _check_slope_order(b1: float, b2: float, where: str) -> None:
    if not b1 < b2:
        raise ConstructionError(
            f"bend corrections overshoot at {where}: corrected slopes "
            f"{b1} >= {b2}"
        )


# ---------------------------------------------------------------------------
# v
# ---------------------------------------------------------------------------


def build_v(
    params: EpsilonParams,
    r_min: float = _R_MIN_DEFAULT,
    r_max: float | None = None,
) -> VProfile:
    """The circle-direction warp: eps * e^r bent onto sinh(r) near r_eps."""
    eps = params.eps
    sigma, delta = params.sigma, params.delta
    r_eps = solve_r_epsilon(eps)
    r_minus = r_eps - eps**4
    if r_max is None:
        r_max = max(20.0, r_eps + 10.0)
    ln_eps = math.log(eps)
    log_sinh = LogSinh()

    # choose r_plus: start at the widest admissible offset eps^4 (which makes
    # the tangent slope exactly the quoted bound coth(r_eps + eps^4)) and
    # halve until the tangent/line intersection r_zero lands in
    # (r_minus, r_eps); solved in the shifted variable u = r - r_eps for
    # conditioning, since the gap r_eps - r_zero can be ~1e-8
    offset = eps**4
    halvings = 0
    r_plus = r_zero = None
    tang = None
    for halvings in range(_OFFSET_RETRIES + 1):
        r_plus_try = r_eps + offset
        slope = float(log_sinh.eval(np.array([r_plus_try]), 1)[0])
        val = float(log_sinh.eval(np.array([r_plus_try]), 0)[0])
        u_zero = (val - (r_eps + ln_eps) - slope * offset) / (1.0 - slope)
        if -(eps**4) < u_zero < 0.0:
            r_plus = r_plus_try
            r_zero = r_eps + u_zero
            tang = Affine(slope=slope, intercept=val, x0=r_plus_try)
            break
        offset *= 0.5
    if r_plus is None:
        raise ConstructionError(
            f"no tangency offset in {_OFFSET_RETRIES} halvings put the "
            f"line intersection inside (r_minus, r_eps) at eps={eps!r}"
        )
    if not r_minus < r_zero < r_eps:
        raise ConstructionError(
            f"tangent intersection {r_zero!r} outside ({r_minus!r}, {r_eps!r})"
        )

    line = Affine(slope=1.0, intercept=r_eps + ln_eps, x0=r_eps)
    bend = delta
    mu = bend * (r_zero - r_minus) ** 2 / (r_zero - r_plus) ** 2
    _check_slope_order(
        1.0 + 2.0 * bend * (r_zero - r_minus),
        tang.slope + 2.0 * mu * (r_zero - r_plus),
        "the v bend kink",
    )
    base = PiecewiseExpr(
        [r_min, r_minus, r_zero, r_plus, r_max],
        [
            line,
            _corrected(line, bend, r_minus),
            _corrected(tang, mu, r_plus),
            log_sinh,
        ],
    )
    delta0 = min(delta, sigma / 16.0)
    quarter = _ratio_floor_certificate(0.25)
    windows = [
        find_window_delta(base, r_minus, sigma, delta0, quarter),
        find_window_delta(
            base, r_zero, sigma, delta0, _ratio_floor_certificate(0.25, convex=True)
        ),
        find_window_delta(base, r_plus, sigma, delta0, quarter),
    ]
    return VProfile(
        params=params,
        r_eps=r_eps,
        r_minus=r_minus,
        r_plus=r_plus,
        r_zero=r_zero,
        log_v=SmoothedFunction(base, windows),
        offset_halvings=halvings,
    )


# ---------------------------------------------------------------------------
# h
# ---------------------------------------------------------------------------


def build_h(
    params: EpsilonParams,
    r_min: float = _R_MIN_DEFAULT,
    r_max: float | None = None,
) -> HProfile:
    """The horizontal warp: e^{r/2} bent through q onto cosh(r/2)."""
    eps = params.eps
    sigma, delta = params.sigma, params.delta
    r_eps = solve_r_epsilon(eps)
    r_minus = r_eps - eps**4
    rho = r_minus / 2.0
    if r_max is None:
        r_max = max(20.0, r_eps + 10.0)

    # q(r) = l(r) + eps^6 (r - rho)^2, l the tangent of cosh(r/2) at rho
    a2 = eps**6
    a1 = 0.5 * math.sinh(rho / 2.0)
    a0 = math.cosh(rho / 2.0)
    disc = a1 * a1 - 4.0 * a2 * a0
    if disc <= 0.0:
        raise ConstructionError(
            f"the bent quadratic has no real zero at eps={eps!r}"
        )
    sq = math.sqrt(disc)
    u_z = -2.0 * a0 / (a1 + sq)  # larger (less negative) root, stable form
    u_far = -(a1 + sq) / (2.0 * a2)
    z = rho + u_z
    if not -1.0 / eps**2 < z < 0.0:
        raise ConstructionError(
            f"quadratic zero {z!r} not inside (-1/eps^2, 0) at eps={eps!r}"
        )
    if rho + u_far >= -1.0 / eps**2:
        raise ConstructionError("both quadratic zeros fall in the search range")

    # m: the unique point in (z, rho] with q'/q = 3/4, via sign-change
    # bisection of q' - (3/4) q (quadratic in u: exactly one root there)
    def qval(u: float) -> float:
        return (a2 * u + a1) * u + a0

    def qslope(u: float) -> float:
        return 2.0 * a2 * u + a1

    def target(u: float) -> float:
        return qslope(u) - 0.75 * qval(u)

    lo, hi = u_z, 0.0
    if not (target(lo) > 0.0 and target(hi) < 0.0):
        raise ConstructionError(
            "no sign change of q'/q - 3/4 between the zero of q and rho"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if target(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    u_m = 0.5 * (lo + hi)
    m = rho + u_m
    s_plus = qslope(u_m) / qval(u_m)
    if abs(s_plus - 0.75) > 1e-12:
        raise ConstructionError(
            f"bisection for q'/q = 3/4 stalled at residual {s_plus - 0.75!r}"
        )
    val_m = math.log(qval(u_m))
    if not val_m > m / 2.0:
        raise ConstructionError(
            f"q at the 3/4 point does not dominate e^(r/2): ln q = {val_m!r} "
            f"vs r/2 = {m / 2.0!r}"
        )

    # intersection of the tangent line of ln q at m with r/2
    r_bar = (val_m - s_plus * m) / (0.5 - s_plus)
    if not r_bar < m:
        raise ConstructionError(f"tangent intersection {r_bar!r} not left of {m!r}")
    n = r_bar - 1.0
    if n <= r_min + 8.0 * sigma:
        raise ConstructionError(
            f"bending start {n!r} leaves no room above the domain edge {r_min!r}"
        )

    half_line = Affine(slope=0.5, intercept=0.5 * n, x0=n)
    tangent_plus = Affine(slope=s_plus, intercept=val_m, x0=m)
    bend = delta
    mu = bend * (r_bar - n) ** 2 / (r_bar - m) ** 2
    _check_slope_order(
        0.5 + 2.0 * bend * (r_bar - n),
        s_plus + 2.0 * mu * (r_bar - m),
        "the h bend kink",
    )
    log_q = LogQuadratic(a2, a1, a0, rho)
    base = PiecewiseExpr(
        [r_min, n, r_bar, m, rho, r_max],
        [
            half_line,
            _corrected(half_line, bend, n),
            _corrected(tangent_plus, mu, m),
            log_q,
            LogCosh(0.5),
        ],
    )
    delta0 = min(delta, sigma / 16.0)
    ninth = _ratio_floor_certificate(1.0 / 9.0)
    weak = _ratio_floor_certificate(eps**6)
    windows = [
        find_window_delta(base, n, sigma, delta0, ninth),
        find_window_delta(base, r_bar, sigma, delta0, ninth),
        find_window_delta(base, m, sigma, delta0, weak),
        find_window_delta(base, rho, sigma, delta0, weak),
    ]
    return HProfile(
        params=params,
        rho_eps=rho,
        z_eps=z,
        m_eps=m,
        n_eps=n,
        r_bar=r_bar,
        q_coeffs=(a2, a1, a0, rho),
        log_h=SmoothedFunction(base, windows),
    )


# ---------------------------------------------------------------------------
# g
# ---------------------------------------------------------------------------


def build_g(params: EpsilonParams, h_profile: HProfile) -> GProfile:
    """The asymptotically regular tail variant: tau + e^{r/2} bent onto h."""
    if h_profile.params != params:
        raise ParameterError("h profile was built with different parameters")
    eps = params.eps
    sigma, delta = params.sigma, params.delta
    n = h_profile.n_eps
    scale = math.exp(n) if n > -745.0 else 0.0
    if scale == 0.0:
        raise ConstructionError(
            f"tau = eps * e^n underflows double precision at n = {n!r}; "
            f"the asymptotic-tail construction needs a larger eps"
        )
    tau = eps * scale
    o = math.log(tau)
    p = 2.0 * o
    tail = LogTauExp(tau)
    slope_minus = float(tail.eval(np.array([p]), 1)[0])  # F(p), essentially 1/4
    val_p = float(tail.eval(np.array([p]), 0)[0])  # ln(2 tau)

    # tangent line at p meets r/2 at r_star = p + 4 ln 2 + O(rounding)
    r_star = (val_p - slope_minus * p) / (0.5 - slope_minus)
    if not p < r_star < o:
        raise ConstructionError(
            f"tangent/line intersection {r_star!r} outside ({p!r}, {o!r})"
        )

    tangent_minus = Affine(slope=slope_minus, intercept=val_p, x0=p)
    line_half = Affine(slope=0.5, intercept=0.5 * o, x0=o)
    bend = delta
    mu = bend * (r_star - p) ** 2 / (r_star - o) ** 2
    _check_slope_order(
        slope_minus + 2.0 * bend * (r_star - p),
        0.5 + 2.0 * mu * (r_star - o),
        "the g bend kink",
    )

    h_base = h_profile.log_h.base
    h_bks = h_base.breakpoints
    r_min = float(h_bks[0])
    if not r_min < p - 8.0 * sigma:
        raise ConstructionError(
            f"h domain starts at {r_min!r}, above the g bending point {p!r}"
        )
    # h's base from n upward, reused verbatim so g == h there bit-for-bit
    upper_bks = h_bks[h_bks > n]
    upper_segs = h_base.segments[1:]
    base = PiecewiseExpr(
        np.concatenate(([r_min, p, r_star, o, n], upper_bks)),
        (
            tail,
            _corrected(tangent_minus, bend, p),
            _corrected(line_half, mu, o),
            Affine(slope=0.5, intercept=0.5 * n, x0=n),
        )
        + upper_segs,
    )
    delta0 = min(delta, sigma / 16.0)
    cert = _ratio_floor_certificate(1.0 / 25.0)
    windows = [
        find_window_delta(base, p, sigma, delta0, cert),
        find_window_delta(base, r_star, sigma, delta0, cert),
        find_window_delta(base, o, sigma, delta0, cert),
    ] + list(h_profile.log_h.windows)
    return GProfile(
        params=params,
        h_profile=h_profile,
        tau_eps=tau,
        o_eps=o,
        p_eps=p,
        r_star=r_star,
        log_g=SmoothedFunction(base, windows),
    )


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _log_fn(profile) -> SmoothedFunction:
    if isinstance(profile, VProfile):
        return profile.log_v
    if isinstance(profile, HProfile):
        return profile.log_h
    if isinstance(profile, GProfile):
        return profile.log_g
    raise ParameterError(f"not a warp profile: {type(profile).__name__}")


def log_eval(profile, rs: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(w, w', w'') of the log warp at the given radii."""
    fn = _log_fn(profile)
    rs = np.atleast_1d(np.asarray(rs, dtype=float))
    return fn.eval_many(rs, 0), fn.eval_many(rs, 1), fn.eval_many(rs, 2)


def eval_profile(profile, r: float) -> tuple[float, float, float]:
    """(value, first, second derivative) of the warp itself at r.

    Deep-tail radii where the warp underflows double precision are rejected;
    use ``log_eval`` there.
    """
    w0, w1, w2 = log_eval(profile, np.array([float(r)]))
    if w0[0] < _LOG_FLOOR:
        raise DomainError(
            f"warp value underflows double precision at r = {r!r}; "
            f"use log_eval"
        )
    val = math.exp(w0[0])
    return val, w1[0] * val, (w2[0] + w1[0] ** 2) * val


# ---------------------------------------------------------------------------
# invariant verification
# ---------------------------------------------------------------------------


def _dense_grid(
    lo: float, hi: float, windows, spec: GridSpec
) -> np.ndarray:
    pts = [np.linspace(lo, hi, spec.region_points)]
    for w in windows:
        if lo <= w.center <= hi:
            pts.append(window_grid(w.center, w.sigma, spec.window_points))
    return np.unique(np.concatenate(pts))


def _positivity_entries(report: Report, fn: SmoothedFunction, grid, label: str):
    w1 = fn.eval_many(grid, 1)
    w0 = fn.eval_many(grid, 0)
    report.add(
        CheckEntry(
            name=f"{label} positive",
            passed=bool(np.all(np.isfinite(w0))),
            measured=float(np.min(w0)),
            bound=-np.inf,
            comparison=">",
            detail="log values finite (warp > 0 by construction)",
        )
    )
    report.add(
        CheckEntry(
            name=f"{label} increasing",
            passed=bool(np.all(w1 > 0.0)),
            measured=float(np.min(w1)),
            bound=0.0,
            comparison=">",
        )
    )


def _window_ratio_entry(
    report: Report, fn: SmoothedFunction, w: Window, floor: float, label: str,
    points: int,
) -> None:
    grid = window_grid(w.center, w.sigma, points)
    w1 = fn.eval_many(grid, 1)
    w2 = fn.eval_many(grid, 2)
    ratio = w2 + w1 * w1
    report.add(
        CheckEntry(
            name=label,
            passed=bool(np.all(ratio > floor)),
            measured=float(np.min(ratio)),
            bound=floor,
            comparison=">",
        )
    )


def _c1_shrink_entry(report: Report, fn: SmoothedFunction, spec: GridSpec) -> None:
    halved = SmoothedFunction(
        fn.base,
        [Window(w.center, w.delta / 2.0, w.sigma) for w in fn.windows],
        fn.quad_order,
    )
    worst = -np.inf
    for w in fn.windows:
        grid = window_grid(w.center, w.sigma, spec.window_points)
        for order in (0, 1):
            base = fn.base.eval_many(grid, order)
            dev = float(np.max(np.abs(fn.eval_many(grid, order) - base)))
            dev_half = float(np.max(np.abs(halved.eval_many(grid, order) - base)))
            worst = max(worst, dev_half - dev)
    report.add(
        CheckEntry(
            name="C1 deviation shrinks when the kernel is halved",
            passed=worst <= 1e-12,
            measured=worst,
            bound=1e-12,
            comparison="<=",
            detail="max over windows/orders of dev(delta/2) - dev(delta)",
        )
    )


def _exactness_entry(
    report: Report, fn: SmoothedFunction, rs: np.ndarray, reference, name: str,
    rtol: float = 1e-13,
) -> None:
    got = fn.eval_many(rs, 0)
    want = reference(rs)
    err = float(np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want))))
    base_match = np.array_equal(got, fn.base.eval_many(rs, 0))
    report.add(
        CheckEntry(
            name=name,
            passed=bool(base_match and err <= rtol),
            measured=err,
            bound=rtol,
            comparison="<=",
            detail="bit-identical to the unsmoothed base; compared to closed form",
        )
    )


def verify_profile_invariants(profile, grid_spec: GridSpec | None = None) -> Report:
    """Check every structural property a profile promises, as report data."""
    spec = grid_spec or GridSpec()
    if isinstance(profile, VProfile):
        return _verify_v(profile, spec)
    if isinstance(profile, HProfile):
        return _verify_h(profile, spec)
    if isinstance(profile, GProfile):
        return _verify_g(profile, spec)
    raise ParameterError(f"not a warp profile: {type(profile).__name__}")


def _verify_v(vp: VProfile, spec: GridSpec) -> Report:
    params = vp.params
    eps, sigma = params.eps, params.sigma
    fn = vp.log_v
    report = Report(title=f"v profile invariants (eps={eps})")

    residual = abs(math.sinh(vp.r_eps) - eps * math.exp(vp.r_eps))
    report.add(
        CheckEntry(
            name="transition radius solves sinh(r) = eps e^r",
            passed=residual <= 1e-12,
            measured=residual,
            bound=1e-12,
            comparison="<=",
        )
    )
    report.add(
        CheckEntry(
            name="tangency point inside (r_eps, r_eps + eps^4]",
            passed=vp.r_eps < vp.r_plus <= vp.r_eps + eps**4,
            measured=vp.r_plus - vp.r_eps,
            bound=eps**4,
            comparison="<=",
        )
    )
    report.add(
        CheckEntry(
            name="kink inside (r_minus, r_eps)",
            passed=vp.r_minus < vp.r_zero < vp.r_eps,
            measured=vp.r_zero,
            bound=vp.r_eps,
            comparison="<",
        )
    )

    lo, hi = fn.domain
    left = np.linspace(max(lo, vp.r_minus - 5.0), vp.r_minus - sigma, 31)
    _exactness_entry(
        report, fn, left,
        lambda r: r + math.log(eps),
        "tail log v = r + ln eps below the first window",
    )
    right = np.linspace(vp.r_plus + sigma, min(hi, vp.r_plus + 5.0), 31)
    _exactness_entry(
        report, fn, right,
        lambda r: np.log(np.sinh(r)),
        "log v = ln sinh r above the last window",
    )

    grid = _dense_grid(vp.r_minus - 1.0, min(hi, vp.r_plus + 1.0), fn.windows, spec)
    _positivity_entries(report, fn, grid, "v")

    for w, label in zip(
        fn.windows,
        (
            "v''/v > 1/4 on the r_minus window",
            "v''/v > 1/4 on the kink window",
            "v''/v > 1/4 on the r_plus window",
        ),
    ):
        _window_ratio_entry(report, fn, w, 0.25, label, spec.window_points)

    interior = np.linspace(vp.r_minus, vp.r_plus, spec.region_points)[1:-1]
    logcurv = fn.base.eval_many(interior, 2)
    report.add(
        CheckEntry(
            name="base (log v)'' > 0 on the open bending interval",
            passed=bool(np.all(logcurv > 0.0)),
            measured=float(np.min(logcurv)),
            bound=0.0,
            comparison=">",
            detail="quadratic corrections keep the log bend strictly convex",
        )
    )
    bend_grid = _dense_grid(vp.r_minus, vp.r_plus, fn.windows, spec)
    w1 = fn.eval_many(bend_grid, 1)
    w2 = fn.eval_many(bend_grid, 2)
    ratio = w2 + w1 * w1
    report.add(
        CheckEntry(
            name="smoothed v''/v > 1/4 across the bending region",
            passed=bool(np.all(ratio > 0.25)),
            measured=float(np.min(ratio)),
            bound=0.25,
            comparison=">",
        )
    )
    base_grid = np.linspace(vp.r_minus, vp.r_plus, spec.region_points)
    b1 = fn.base.eval_many(base_grid, 1)
    b2 = fn.base.eval_many(base_grid, 2)
    base_ratio = b2 + b1 * b1
    report.add(
        CheckEntry(
            name="base v''/v >= 1 on the bending interval",
            passed=bool(np.all(base_ratio >= 1.0 - 1e-12)),
            measured=float(np.min(base_ratio)),
            bound=1.0,
            comparison=">=",
            detail="equality only at the tail pieces",
        )
    )
    _c1_shrink_entry(report, fn, spec)
    return report


def _verify_h(hp: HProfile, spec: GridSpec) -> Report:
    params = hp.params
    eps, sigma = params.eps, params.sigma
    fn = hp.log_h
    report = Report(title=f"h profile invariants (eps={eps})")
    a2, a1, a0, x0 = hp.q_coeffs

    def q(r):
        u = np.asarray(r) - x0
        return (a2 * u + a1) * u + a0

    def q1(r):
        return 2.0 * a2 * (np.asarray(r) - x0) + a1

    ratio_at_m = float(q1(hp.m_eps) / q(hp.m_eps))
    report.add(
        CheckEntry(
            name="q'/q = 3/4 at the tangency point",
            passed=abs(ratio_at_m - 0.75) <= 1e-12,
            measured=abs(ratio_at_m - 0.75),
            bound=1e-12,
            comparison="<=",
        )
    )
    report.add(
        CheckEntry(
            name="q dominates e^{r/2} at the tangency point",
            passed=float(np.log(q(hp.m_eps))) > hp.m_eps / 2.0,
            measured=float(np.log(q(hp.m_eps))) - hp.m_eps / 2.0,
            bound=0.0,
            comparison=">",
        )
    )
    ordering = hp.n_eps < hp.r_bar < hp.z_eps < hp.m_eps < hp.rho_eps
    report.add(
        CheckEntry(
            name="breakpoints ordered n < r_bar < z < m < rho",
            passed=bool(ordering),
            measured=float(hp.m_eps - hp.r_bar),
            bound=0.0,
            comparison=">",
        )
    )

    lo, hi = fn.domain
    left = np.linspace(max(lo, hp.n_eps - 5.0), hp.n_eps - sigma, 31)
    _exactness_entry(
        report, fn, left, lambda r: 0.5 * r,
        "tail log h = r/2 below the first window",
    )
    mid = np.linspace(hp.m_eps + sigma, hp.rho_eps - sigma, 31)
    _exactness_entry(
        report, fn, mid, lambda r: np.log(q(r)),
        "log h = ln q between the m and rho windows",
    )
    right = np.linspace(hp.rho_eps + sigma, min(hi, hp.rho_eps + 5.0), 31)
    _exactness_entry(
        report, fn, right, lambda r: np.log(np.cosh(0.5 * r)),
        "log h = ln cosh(r/2) above the last window",
    )

    grid = _dense_grid(hp.n_eps - 1.0, min(hi, hp.rho_eps + 1.0), fn.windows, spec)
    _positivity_entries(report, fn, grid, "h")

    floors = (1.0 / 9.0, 1.0 / 9.0, eps**6, eps**6)
    labels = (
        "h''/h > 1/9 on the bending-start window",
        "h''/h > 1/9 on the bend-kink window",
        "h''/h > eps^6 on the m window",
        "h''/h > eps^6 on the rho window",
    )
    for w, floor, label in zip(fn.windows, floors, labels):
        _window_ratio_entry(report, fn, w, floor, label, spec.window_points)

    base_grid = np.linspace(hp.n_eps, hp.m_eps, spec.region_points)
    slope = fn.base.eval_many(base_grid, 1)
    report.add(
        CheckEntry(
            name="base h'/h within [1/2, 3/4] on the bending interval",
            passed=bool(
                np.all(slope >= 0.5 - 1e-12) and np.all(slope <= 0.75 + 1e-12)
            ),
            measured=float(np.max(slope)),
            bound=0.75,
            comparison="<=",
            detail=f"min slope {float(np.min(slope))!r}",
        )
    )
    _c1_shrink_entry(report, fn, spec)
    return report


def _verify_g(gp: GProfile, spec: GridSpec) -> Report:
    params = gp.params
    eps, sigma = params.eps, params.sigma
    fn = gp.log_g
    hp = gp.h_profile
    report = Report(title=f"g profile invariants (eps={eps})")

    report.add(
        CheckEntry(
            name="tau inside (0, 2 eps)",
            passed=0.0 < gp.tau_eps < 2.0 * eps,
            measured=gp.tau_eps,
            bound=2.0 * eps,
            comparison="<",
        )
    )
    tail_seg = fn.base.segments[0]
    f_at_p = float(tail_seg.eval(np.array([gp.p_eps]), 1)[0])
    report.add(
        CheckEntry(
            name="logistic fraction equals 1/4 at the bending point",
            passed=abs(f_at_p - 0.25) <= 1e-12,
            measured=abs(f_at_p - 0.25),
            bound=1e-12,
            comparison="<=",
        )
    )
    report.add(
        CheckEntry(
            name="tangent intersection inside (p, o)",
            passed=gp.p_eps < gp.r_star < gp.o_eps,
            measured=gp.r_star,
            bound=gp.o_eps,
            comparison="<",
        )
    )

    left = np.linspace(gp.p_eps - 5.0, gp.p_eps - sigma, 31)
    got = fn.eval_many(left, 0)
    want = tail_seg.eval(left, 0)
    report.add(
        CheckEntry(
            name="tail log g = ln(tau + e^{r/2}) below the first window",
            passed=bool(np.array_equal(got, want)),
            measured=float(np.max(np.abs(got - want))),
            bound=0.0,
            comparison="<=",
        )
    )
    above = np.linspace(gp.o_eps + sigma, hp.rho_eps + 1.0, 37)
    for hw in hp.log_h.windows:  # sample off-window points only
        inside = np.abs(above - hw.center) < hw.sigma
        above[inside] = hw.center + 1.5 * hw.sigma
    g_vals = [fn.eval_many(above, o) for o in (0, 1, 2)]
    h_vals = [hp.log_h.eval_many(above, o) for o in (0, 1, 2)]
    agree = all(np.array_equal(a, b) for a, b in zip(g_vals, h_vals))
    report.add(
        CheckEntry(
            name="g coincides with h above the o window (bit-identical)",
            passed=bool(agree),
            measured=0.0 if agree else float(
                max(np.max(np.abs(a - b)) for a, b in zip(g_vals, h_vals))
            ),
            bound=0.0,
            comparison="<=",
            detail="off-window points; identical segment formulas",
        )
    )
    win_pts = np.concatenate(
        [window_grid(hw.center, hw.sigma, 33) for hw in hp.log_h.windows]
    )
    worst_rel = 0.0
    for o in (0, 1, 2):
        a = fn.eval_many(win_pts, o)
        b = hp.log_h.eval_many(win_pts, o)
        worst_rel = max(
            worst_rel,
            float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))),
        )
    report.add(
        CheckEntry(
            name="g matches h inside the shared smoothing windows",
            passed=worst_rel <= 1e-13,
            measured=worst_rel,
            bound=1e-13,
            comparison="<=",
            detail="same windows over the same in-reach segments; only "
                   "summation grouping differs (extra far breakpoints)",
        )
    )

    grid = _dense_grid(gp.p_eps - 1.0, gp.o_eps + 1.0, fn.windows, spec)
    _positivity_entries(report, fn, grid, "g")

    for w, label in zip(
        fn.windows[:3],
        (
            "g''/g > 1/25 on the p window",
            "g''/g > 1/25 on the kink window",
            "g''/g > 1/25 on the o window",
        ),
    ):
        _window_ratio_entry(report, fn, w, 1.0 / 25.0, label, spec.window_points)

    base_grid = np.linspace(gp.p_eps, gp.o_eps, spec.region_points)
    slope = fn.base.eval_many(base_grid, 1)
    report.add(
        CheckEntry(
            name="base g'/g within [1/4, 1/2] on the bending interval",
            passed=bool(
                np.all(slope >= 0.25 - 1e-12) and np.all(slope <= 0.5 + 1e-12)
            ),
            measured=float(np.max(slope)),
            bound=0.5,
            comparison="<=",
            detail=f"min slope {float(np.min(slope))!r}",
        )
    )
    _c1_shrink_entry(report, fn, spec)
    return report


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

_PROFILE_KINDS = {"v": VProfile, "h": HProfile, "g": GProfile}


def _smoothed_to_wire(fn: SmoothedFunction) -> dict[str, Any]:
    wire = fn.to_dict()
    wire["base"]["breakpoints"] = [repr(b) for b in wire["base"]["breakpoints"]]
    return wire


def profile_to_dict(profile) -> dict[str, Any]:
    """JSON-ready document; breakpoints as exact decimal strings."""
    if isinstance(profile, VProfile):
        return {
            "kind": "v",
            **profile.params.to_dict(),
            "scalars": {
                "r_eps": profile.r_eps,
                "r_minus": profile.r_minus,
                "r_plus": profile.r_plus,
                "r_zero": profile.r_zero,
                "offset_halvings": profile.offset_halvings,
            },
            "log_profile": _smoothed_to_wire(profile.log_v),
        }
    if isinstance(profile, HProfile):
        return {
            "kind": "h",
            **profile.params.to_dict(),
            "scalars": {
                "rho_eps": profile.rho_eps,
                "z_eps": profile.z_eps,
                "m_eps": profile.m_eps,
                "n_eps": profile.n_eps,
                "r_bar": profile.r_bar,
                "q_coeffs": list(profile.q_coeffs),
            },
            "log_profile": _smoothed_to_wire(profile.log_h),
        }
    if isinstance(profile, GProfile):
        return {
            "kind": "g",
            **profile.params.to_dict(),
            "scalars": {
                "tau_eps": profile.tau_eps,
                "o_eps": profile.o_eps,
                "p_eps": profile.p_eps,
                "r_star": profile.r_star,
            },
            "h_profile": profile_to_dict(profile.h_profile),
            "log_profile": _smoothed_to_wire(profile.log_g),
        }
    raise ParameterError(f"not a warp profile: {type(profile).__name__}")


def profile_from_dict(doc: dict[str, Any]):
    kind = doc.get("kind")
    if kind not in _PROFILE_KINDS:
        raise ParameterError(f"unknown profile kind {kind!r}")
    params = EpsilonParams(
        eps=doc["eps"],
        sigma=doc["sigma"],
        delta=doc["delta"],
        strict_regime=doc.get("strict_regime", False),
    )
    fn = SmoothedFunction.from_dict(doc["log_profile"])
    s = doc["scalars"]
    if kind == "v":
        return VProfile(
            params=params,
            r_eps=s["r_eps"],
            r_minus=s["r_minus"],
            r_plus=s["r_plus"],
            r_zero=s["r_zero"],
            log_v=fn,
            offset_halvings=int(s.get("offset_halvings", 0)),
        )
    if kind == "h":
        return HProfile(
            params=params,
            rho_eps=s["rho_eps"],
            z_eps=s["z_eps"],
            m_eps=s["m_eps"],
            n_eps=s["n_eps"],
            r_bar=s["r_bar"],
            q_coeffs=tuple(s["q_coeffs"]),
            log_h=fn,
        )
    return GProfile(
        params=params,
        h_profile=profile_from_dict(doc["h_profile"]),
        tau_eps=s["tau_eps"],
        o_eps=s["o_eps"],
        p_eps=s["p_eps"],
        r_star=s["r_star"],
        log_g=fn,
    )
