"""Convex-splice smoothing: windowed mollification and tangent-line bending.

A splice is two C^2 pieces meeting continuously at c with ordered one-sided
slopes f1'(c-) <= f2'(c+); such a splice of convex pieces is convex.
``smooth_at`` replaces the kink by the blended double mollification on a
window [c - sigma, c + sigma].  ``bend_splice`` first adds the quadratic
corrections

    F1 = f1 + delta (r - a1)^2,
    F2 = f2 + delta (r - a2)^2 (c - a1)^2 / (c - a2)^2,

which vanish to first order at a1 and a2, keep the two pieces equal at c, and
push the one-sided slopes toward each other's convex side, then smooths the
remaining kink at c.  Certified second-derivative floors are checked on dense
window grids, with the kernel half-width halved adaptively until the floor
holds (blending contaminates the second derivative by O((delta/sigma)^2), so
halving always converges for admissible targets).
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import ContinuityError, ConvexityError, ParameterError
from .expressions import (
    PiecewiseExpr,
    Quadratic,
    ScaledSum,
    SmoothedFunction,
    Window,
)

__all__ = [
    "check_splice_convexity",
    "smooth_at",
    "bend_splice",
    "c1_convergence_probe",
    "find_window_delta",
    "grid_min",
    "window_grid",
]

_VALUE_RTOL = 1e-12


def _one_sided(f: PiecewiseExpr, c: float, order: int, side: str) -> float:
    lo, hi = f.domain
    if side == "-" and c == lo:
        raise ParameterError(f"{c!r} is the left edge of the domain")
    if side == "+" and c == hi:
        raise ParameterError(f"{c!r} is the right edge of the domain")
    if c in f.breakpoints:
        return f.eval_one_sided(c, order, side)
    return float(f.eval_many(np.array([c]), order)[0])


def check_splice_convexity(f1: PiecewiseExpr, f2: PiecewiseExpr, c: float) -> bool:
    """True iff f1(c) = f2(c) and the one-sided slopes satisfy f1' <= f2'."""
    v1 = _one_sided(f1, c, 0, "-" if c == f1.domain[1] else "+")
    v2 = _one_sided(f2, c, 0, "+" if c == f2.domain[0] else "-")
    if abs(v1 - v2) > _VALUE_RTOL * max(1.0, abs(v1), abs(v2)):
        return False
    s1 = _one_sided(f1, c, 1, "-" if c == f1.domain[1] else "+")
    s2 = _one_sided(f2, c, 1, "+" if c == f2.domain[0] else "-")
    return s1 <= s2


def smooth_at(
    f: PiecewiseExpr, c: float, delta: float, sigma: float, quad_order: int = 64
) -> SmoothedFunction:
    """Blend the double mollification of f over the window [c-sigma, c+sigma].

    c must be a breakpoint of f whose one-sided slopes are ordered
    f'(c-) <= f'(c+) (the convex-splice hypothesis).
    """
    if c not in f.breakpoints:
        raise ParameterError(f"{c!r} is not a breakpoint of the expression")
    left = f.eval_one_sided(c, 1, "-")
    right = f.eval_one_sided(c, 1, "+")
    if left > right:
        raise ConvexityError(
            f"one-sided slopes out of order at {c!r}: {left} > {right}"
        )
    return SmoothedFunction(f, [Window(c, delta, sigma)], quad_order=quad_order)


def window_grid(center: float, sigma: float, n: int = 1001) -> np.ndarray:
    """Symmetric n-point grid spanning the closed window."""
    return center + sigma * np.linspace(-1.0, 1.0, n)


def grid_min(fn, lo: float, hi: float, order: int = 2, n: int = 1001) -> float:
    """Minimum of a derivative of fn over a uniform grid on [lo, hi]."""
    return float(np.min(fn.eval_many(np.linspace(lo, hi, n), order)))


def find_window_delta(
    base: PiecewiseExpr,
    center: float,
    sigma: float,
    delta0: float,
    certificate: Callable[[SmoothedFunction, Window], bool],
    max_halvings: int = 60,
    quad_order: int = 64,
) -> Window:
    """Largest kernel half-width delta0 / 2^j whose smoothing passes the
    certificate on this window; deterministic, halving at most max_halvings
    times."""
    delta = min(delta0, sigma / 8.0)
    for _ in range(max_halvings + 1):
        w = Window(center, delta, sigma)
        sf = SmoothedFunction(base, [w], quad_order=quad_order)
        if certificate(sf, w):
            return w
        delta *= 0.5
    raise ConvexityError(
        f"no admissible kernel half-width at window {center!r} after "
        f"{max_halvings} halvings (sigma={sigma!r})"
    )


def _add_quadratic(piece: PiecewiseExpr, coeff: float, anchor: float) -> PiecewiseExpr:
    bump = Quadratic(a2=coeff, a1=0.0, a0=0.0, x0=anchor)
    return piece.map_segments(lambda s: ScaledSum(((1.0, s), (1.0, bump))))


def bend_splice(
    f1: PiecewiseExpr,
    f2: PiecewiseExpr,
    a1: float,
    c: float,
    a2: float,
    delta: float,
    sigma: float,
    k: float,
    quad_order: int = 64,
    grid_points: int = 1001,
) -> SmoothedFunction:
    """Bend two convex pieces together across [a1, a2] and smooth the joint.

    f1 lives left of c, f2 right of c, with f1(c) = f2(c) and
    f1'(c) < f2'(c); both pieces have second derivative >= k.  The quadratic
    corrections leave values and first derivatives at a1 and a2 untouched and
    the result's second derivative stays > k, verified on a window grid.
    """
    if not a1 < c < a2:
        raise ParameterError(f"need a1 < c < a2, got {a1!r}, {c!r}, {a2!r}")
    if not (delta > 0.0 and sigma > 0.0):
        raise ParameterError("delta and sigma must be positive")
    v1 = _one_sided(f1, c, 0, "-" if c == f1.domain[1] else "+")
    v2 = _one_sided(f2, c, 0, "+" if c == f2.domain[0] else "-")
    if abs(v1 - v2) > _VALUE_RTOL * max(1.0, abs(v1), abs(v2)):
        raise ContinuityError(f"pieces disagree at {c!r}: {v1} vs {v2}")
    s1 = _one_sided(f1, c, 1, "-" if c == f1.domain[1] else "+")
    s2 = _one_sided(f2, c, 1, "+" if c == f2.domain[0] else "-")
    if s1 >= s2:
        raise ConvexityError(
            f"left slope must be strictly below right slope at {c!r}: {s1} >= {s2}"
        )

    coeff2 = delta * (c - a1) ** 2 / (c - a2) ** 2
    left = _add_quadratic(f1.restrict(a1, c), delta, a1)
    right = _add_quadratic(f2.restrict(c, a2), coeff2, a2)
    # corrected slopes move toward each other; they must not cross
    b1 = s1 + 2.0 * delta * (c - a1)
    b2 = s2 + 2.0 * coeff2 * (c - a2)
    if b1 > b2:
        raise ConvexityError(
            f"bend coefficient {delta!r} overshoots: corrected slopes "
            f"{b1} > {b2} at {c!r}"
        )
    merged = PiecewiseExpr(
        np.concatenate((left.breakpoints, right.breakpoints[1:])),
        left.segments + right.segments,
    )

    lo = max(float(merged.breakpoints[0]), c - sigma)
    hi = min(float(merged.breakpoints[-1]), c + sigma)
    grid = np.linspace(lo, hi, grid_points)

    def floor_holds(sf: SmoothedFunction, w: Window) -> bool:
        return bool(np.all(sf.eval_many(grid, 2) > k))

    window = find_window_delta(
        merged, c, sigma, min(delta, sigma / 8.0), floor_holds,
        quad_order=quad_order,
    )
    return SmoothedFunction(merged, [window], quad_order=quad_order)


def c1_convergence_probe(
    f: PiecewiseExpr,
    c: float,
    sigma: float,
    deltas: Sequence[float],
    grid_points: int = 801,
) -> list[tuple[float, float, float]]:
    """Uniform-deviation table (delta, sup|F - f|, sup|F' - f'|) on the window.

    The first-derivative sup excludes the kink point itself, where f' is only
    one-sided.
    """
    if not deltas:
        raise ParameterError("need at least one delta")
    for d in deltas:
        if not 0.0 < d < sigma / 4.0:
            raise ParameterError(f"delta {d!r} inadmissible for sigma {sigma!r}")
    grid = window_grid(c, sigma, grid_points)
    interior = grid[grid != c]
    f0 = f.eval_many(grid, 0)
    f1 = f.eval_many(interior, 1)
    out: list[tuple[float, float, float]] = []
    for d in deltas:
        sf = smooth_at(f, c, d, sigma)
        dev0 = float(np.max(np.abs(sf.eval_many(grid, 0) - f0)))
        dev1 = float(np.max(np.abs(sf.eval_many(interior, 1) - f1)))
        out.append((float(d), dev0, dev1))
    return out
