"""Compactly supported plateau mollifier and piecewise-spectral convolution.

The kernel profile is

    phi(t) = 1            for |t| <= 1/2,
             S(2 - 2|t|)  for 1/2 < |t| < 1,          phi = 0 otherwise,

where S(u) = psi(u) / (psi(u) + psi(1-u)) and psi(u) = exp(-1/u) for u > 0.
S climbs from 0 to 1 on [0, 1] with every derivative vanishing at both ends,
so phi is C-infinity, even, supported in (-1, 1), identically 1 on
[-1/2, 1/2], and has mass exactly 3/2 (each flank integrates to 1/4 by the
symmetry S(u) + S(1-u) = 1).  The unit-mass kernel at half-width delta is

    theta_delta(y) = phi(y / delta) / (MASS * delta).

Convolutions against theta_delta (``passes=1``) or against the squared kernel
theta_delta * theta_delta (``passes=2``) are evaluated by Gauss-Legendre
panels split at every structural point of the integrand: the kernel knots at
multiples of delta/2 and every breakpoint of the function within the kernel's
reach.  Derivatives of the convolution are convolutions of the piecewise
derivative plus kink jump terms,

    D (f*K) = {f'}*K  + sum_b [f]_b  * K (x-b),
    D2(f*K) = {f''}*K + sum_b [f']_b * K (x-b) + sum_b [f]_b * K'(x-b),

never finite differences.  The squared kernel is cached once as per-panel
Chebyshev fits of the unit autoconvolution k2 = theta_1 * theta_1, so that
K2(y) = k2(y/delta)/delta at any delta.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from numpy.polynomial.legendre import leggauss

from .errors import DomainError, ParameterError

__all__ = [
    "PlateauBump",
    "MollifierSpec",
    "kernel_value",
    "squared_kernel_value",
    "kernel_variance",
    "mollify",
    "mollify_many",
    "mollify_delta_many",
    "doubling_error",
]

# ---------------------------------------------------------------------------
# smoothstep and plateau profile
# ---------------------------------------------------------------------------

# Below this distance from {0, 1} the smoothstep is flat to double precision
# (psi(1e-8) = exp(-1e8) underflows), so we clamp to avoid 0/0 and overflow.
_EDGE = 1e-8


def _smoothstep_all(u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """S, S', S'' of the exponential smoothstep on the real line.

    S(u) = psi(u)/(psi(u)+psi(1-u)) with psi(u) = exp(-1/u) for u > 0, else 0;
    S = 0 for u <= 0 and S = 1 for u >= 1, with all derivatives zero there.
    """
    u = np.asarray(u, dtype=float)
    s = np.where(u >= 0.5, 1.0, 0.0)
    s1 = np.zeros_like(u)
    s2 = np.zeros_like(u)
    inner = (u > _EDGE) & (u < 1.0 - _EDGE)
    if np.any(inner):
        ui = u[inner]
        w = 1.0 - ui
        a = np.exp(-1.0 / ui)
        b = np.exp(-1.0 / w)
        a1 = a / ui**2
        b1 = -b / w**2
        # second derivatives of the factors: psi''(u) = psi(u) (1 - 2u)/u^4
        a2 = a * (1.0 - 2.0 * ui) / ui**4
        b2 = b * (2.0 * ui - 1.0) / w**4
        t = a + b
        num = a1 * b - a * b1
        s[inner] = a / t
        s1[inner] = num / t**2
        s2[inner] = (a2 * b - a * b2) / t**2 - 2.0 * num * (a1 + b1) / t**3
    return s, s1, s2


class PlateauBump:
    """The fixed C-infinity plateau bump profile phi (unnormalized)."""

    SUPPORT = 1.0          # phi vanishes outside (-SUPPORT, SUPPORT)
    PLATEAU = 0.5          # phi is identically 1 on [-PLATEAU, PLATEAU]
    MASS = 1.5             # integral of phi over the line, exact

    @staticmethod
    def deriv(t: np.ndarray, order: int) -> np.ndarray:
        if order not in (0, 1, 2):
            raise ParameterError(f"bump derivative order must be 0..2, got {order}")
        t = np.asarray(t, dtype=float)
        at = np.abs(t)
        out = np.zeros_like(at)
        if order == 0:
            out[at <= 0.5] = 1.0
        flank = (at > 0.5) & (at < 1.0)
        if np.any(flank):
            s, s1, s2 = _smoothstep_all(2.0 - 2.0 * at[flank])
            if order == 0:
                out[flank] = s
            elif order == 1:
                out[flank] = -2.0 * np.sign(t[flank]) * s1
            else:
                out[flank] = 4.0 * s2
        return out

    @staticmethod
    def value(t: np.ndarray) -> np.ndarray:
        return PlateauBump.deriv(t, 0)


# ---------------------------------------------------------------------------
# spec and kernels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MollifierSpec:
    """Kernel half-width, quadrature order per panel, and profile name."""

    delta: float
    quadrature_order: int = 64
    profile: str = "plateau"

    def __post_init__(self) -> None:
        if not (self.delta > 0.0 and np.isfinite(self.delta)):
            raise ParameterError(f"kernel half-width must be positive, got {self.delta}")
        if self.quadrature_order < 4:
            raise ParameterError("quadrature order must be at least 4")
        if self.profile != "plateau":
            raise ParameterError(f"unknown mollifier profile {self.profile!r}")


def kernel_value(spec: MollifierSpec, y: np.ndarray, order: int = 0) -> np.ndarray:
    """theta_delta^(order)(y): the unit-mass kernel or its derivatives."""
    y = np.asarray(y, dtype=float)
    scale = 1.0 / (PlateauBump.MASS * spec.delta ** (order + 1))
    return PlateauBump.deriv(y / spec.delta, order) * scale


# --- squared kernel cache ---------------------------------------------------

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(order: int) -> tuple[np.ndarray, np.ndarray]:
    got = _GL_CACHE.get(order)
    if got is None:
        got = leggauss(order)
        _GL_CACHE[order] = got
    return got


def _theta_unit(t: np.ndarray, order: int = 0) -> np.ndarray:
    return PlateauBump.deriv(t, order) / PlateauBump.MASS


def _autoconv_direct(s_vals: np.ndarray, order: int = 96) -> np.ndarray:
    """k2(s) = integral theta_1(t) theta_1(s - t) dt by split Gauss-Legendre."""
    xg, wg = _gl(order)
    out = np.zeros_like(s_vals)
    base_knots = np.array([-1.0, -0.5, 0.5, 1.0])
    for i, s in enumerate(np.asarray(s_vals, dtype=float)):
        lo, hi = max(-1.0, s - 1.0), min(1.0, s + 1.0)
        if hi <= lo:
            continue
        cuts = np.concatenate((base_knots, s + base_knots, [lo, hi]))
        cuts = np.unique(np.clip(cuts, lo, hi))
        acc = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b <= a:
                continue
            t = 0.5 * (b - a) * xg + 0.5 * (a + b)
            acc += 0.5 * (b - a) * np.sum(wg * _theta_unit(t) * _theta_unit(s - t))
        out[i] = acc
    return out


class _SquaredKernelCache:
    """Per-panel Chebyshev fits of k2 = theta_1 * theta_1 on [0, 2] (even)."""

    PANELS = ((0.0, 0.5), (0.5, 1.0), (1.0, 1.5), (1.5, 2.0))
    DEGREE = 80

    def __init__(self) -> None:
        self.coeffs: list[list[np.ndarray]] = []
        self.edges = np.array([p[1] for p in self.PANELS])
        for lo, hi in self.PANELS:
            mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)

            def f(z: np.ndarray) -> np.ndarray:
                return _autoconv_direct(mid + half * z)

            c0 = _cheb.chebinterpolate(f, self.DEGREE)
            c1 = _cheb.chebder(c0) / half
            c2 = _cheb.chebder(c0, 2) / half**2
            self.coeffs.append([c0, c1, c2])

    def eval(self, s: np.ndarray, order: int) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        a = np.abs(s)
        inside = a < 2.0
        if np.any(inside):
            ai = a[inside]
            idx = np.searchsorted(self.edges, ai, side="left")
            vals = np.empty_like(ai)
            for p in range(4):
                rows = idx == p
                if not np.any(rows):
                    continue
                lo, hi = self.PANELS[p]
                z = (2.0 * ai[rows] - (lo + hi)) / (hi - lo)
                vals[rows] = _cheb.chebval(z, self.coeffs[p][order])
            if order == 1:  # k2 is even, so its first derivative is odd
                vals = vals * np.sign(s[inside])
            out[inside] = vals
        return out


_K2: _SquaredKernelCache | None = None


def _k2_cache() -> _SquaredKernelCache:
    global _K2
    if _K2 is None:
        _K2 = _SquaredKernelCache()
    return _K2


def squared_kernel_value(spec: MollifierSpec, y: np.ndarray, order: int = 0) -> np.ndarray:
    """(theta_delta * theta_delta)^(order)(y) via the cached unit fit."""
    y = np.asarray(y, dtype=float)
    return _k2_cache().eval(y / spec.delta, order) / spec.delta ** (order + 1)


_UNIT_VARIANCE: float | None = None


def _unit_variance() -> float:
    """integral of t^2 theta_1(t) dt (the plateau part is exactly 1/12/MASS)."""
    global _UNIT_VARIANCE
    if _UNIT_VARIANCE is None:
        xg, wg = _gl(200)
        t = 0.25 * xg + 0.75  # [1/2, 1]
        flank = 0.25 * np.sum(wg * t * t * _theta_unit(t))
        _UNIT_VARIANCE = (1.0 / 12.0) / PlateauBump.MASS + 2.0 * flank
    return _UNIT_VARIANCE


def kernel_variance(spec: MollifierSpec, passes: int) -> float:
    """Second moment of the kernel; variances add under convolution."""
    return passes * spec.delta**2 * _unit_variance()


# ---------------------------------------------------------------------------
# convolution engine
# ---------------------------------------------------------------------------

_CHUNK = 2048
_KNOTS_1 = np.array([-1.0, -0.5, 0.5, 1.0])
_KNOTS_2 = np.array([-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0])


def _validate_call(passes: int, deriv_order: int) -> None:
    if passes not in (1, 2):
        raise ParameterError(f"passes must be 1 or 2, got {passes}")
    if deriv_order not in (0, 1, 2):
        raise ParameterError(f"deriv_order must be 0..2, got {deriv_order}")


def mollify_delta_many(
    f,
    spec: MollifierSpec,
    passes: int,
    deriv_order: int,
    xs: np.ndarray,
    quad_order: int | None = None,
) -> np.ndarray:
    """The mollification deviation (M - f)^(deriv_order) at xs.

    This is the quantity window blending multiplies by the large weight
    derivatives 1/sigma, 1/sigma^2, so it must be resolved relative to its
    own (tiny) magnitude, never as a difference of two near-equal O(|f^(m)|)
    numbers.  Wherever the whole kernel reach lies inside one analytic
    segment the deviation is computed directly: exactly a2 * Var(kernel)
    for polynomial segments (zero at orders 1 and 2), and as a quadrature
    of the segment's own small-difference form f^(m)(x+y) - f^(m)(x)
    otherwise.  Only rows whose reach straddles a breakpoint fall back to
    (slow quadrature) - f^(m); there the deviation is O(jump * delta) and
    dominates rounding, and those rows sit on the blend plateau where the
    weight derivatives vanish, so nothing amplifies their noise.

    ``f`` is any piecewise expression exposing ``eval_many(t, order)``,
    ``breakpoints``, ``value_jump(b, order)``, ``domain``,
    ``segment_index_many(x)``, ``segment_poly2(i)`` and (optionally)
    ``segment_delta(i, order)`` / ``segment_delta0(i)``.
    """
    _validate_call(passes, deriv_order)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    order = spec.quadrature_order if quad_order is None else quad_order
    delta = spec.delta
    reach = passes * delta

    lo_dom, hi_dom = f.domain
    if xs.size and (xs.min() - reach < lo_dom or xs.max() + reach > hi_dom):
        raise DomainError(
            f"kernel reach [{xs.min() - reach}, {xs.max() + reach}] exceeds "
            f"domain [{lo_dom}, {hi_dom}]"
        )

    if passes == 1:
        knots = delta * _KNOTS_1

        def kval(y: np.ndarray, o: int) -> np.ndarray:
            return kernel_value(spec, y, o)
    else:
        knots = delta * _KNOTS_2

        def kval(y: np.ndarray, o: int) -> np.ndarray:
            return squared_kernel_value(spec, y, o)

    out = np.empty_like(xs)
    bks = np.asarray(f.breakpoints, dtype=float)
    m = deriv_order
    xg, wg = _gl(order)
    node01 = 0.5 * (xg + 1.0)

    # Single-segment rows: deviation in closed form (degree <= 2) or as a
    # quadrature of the segment's accurate small-difference form.
    idx_lo = f.segment_index_many(xs - reach)
    idx_hi = f.segment_index_many(xs + reach)
    same = idx_lo == idx_hi
    done = np.zeros(xs.shape, dtype=bool)
    if np.any(same):
        var_k = kernel_variance(spec, passes)
        delta_of = getattr(f, "segment_delta", None)
        delta0_of = getattr(f, "segment_delta0", None)
        lo_k = knots[:-1]
        width_k = np.diff(knots)
        y_k = lo_k[:, None] + width_k[:, None] * node01[None, :]
        kw_k = kval(y_k, 0) * wg[None, :]
        for seg_i in np.unique(idx_lo[same]):
            rows = same & (idx_lo == seg_i)
            poly = f.segment_poly2(int(seg_i))
            if poly is not None:
                # even unit-mass kernel: M = f + a2 Var, M' = f', M'' = f''
                out[rows] = poly[0] * var_k if m == 0 else 0.0
                done[rows] = True
                continue
            if delta_of is not None:
                fn = delta_of(int(seg_i), m)
            elif m == 0 and delta0_of is not None:
                fn = delta0_of(int(seg_i))
            else:
                fn = None
            if fn is not None:
                dv = fn(xs[rows][:, None, None], -y_k[None, :, :])
                integ = np.sum(dv * kw_k[None, :, :], axis=2)
                out[rows] = 0.5 * np.sum(width_k[None, :] * integ, axis=1)
                done[rows] = True

    slow = np.nonzero(~done)[0]
    for start in range(0, slow.size, _CHUNK):
        rows = slow[start : start + _CHUNK]
        x = xs[rows]
        n = x.size
        movers = x[:, None] - bks[None, :] if bks.size else np.empty((n, 0))
        movers = np.where(
            (movers > -reach) & (movers < reach), movers, reach
        )
        splits = np.concatenate(
            (np.broadcast_to(knots, (n, knots.size)), movers), axis=1
        )
        splits.sort(axis=1)
        lo = splits[:, :-1]
        width = splits[:, 1:] - lo
        # y-nodes per panel: (n, panels, order)
        y = lo[:, :, None] + width[:, :, None] * node01[None, None, :]
        t = x[:, None, None] - y
        g = f.eval_many(t.reshape(-1), m).reshape(t.shape)
        integ = np.sum(g * kval(y, 0) * wg[None, None, :], axis=2)
        out[rows] = 0.5 * np.sum(width * integ, axis=1) - f.eval_many(x, m)

    # Kink jump contributions to the distributional derivatives.
    if m >= 1 and bks.size:
        for b in bks:
            dy = xs - b
            near = np.abs(dy) < reach
            if not np.any(near):
                continue
            j_prev = f.value_jump(b, m - 1)
            if j_prev != 0.0:
                out[near] += j_prev * kval(dy[near], 0)
            if m == 2:
                j0 = f.value_jump(b, 0)
                if j0 != 0.0:
                    out[near] += j0 * kval(dy[near], 1)
    return out


def mollify_many(
    f,
    spec: MollifierSpec,
    passes: int,
    deriv_order: int,
    xs: np.ndarray,
    quad_order: int | None = None,
) -> np.ndarray:
    """Vectorized convolution of f^(deriv_order) with the (iterated) kernel,
    assembled as f + (M - f) so values match the blended evaluation exactly.

    See ``mollify_delta_many`` for the expression duck interface.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    dev = mollify_delta_many(f, spec, passes, deriv_order, xs, quad_order)
    return f.eval_many(xs, deriv_order) + dev


def mollify(f, spec: MollifierSpec, passes: int, deriv_order: int, x: float) -> float:
    """Scalar convolution value; see ``mollify_many``."""
    return float(mollify_many(f, spec, passes, deriv_order, np.array([x]))[0])


def doubling_error(
    f, spec: MollifierSpec, passes: int, deriv_order: int, xs: np.ndarray
) -> float:
    """Sup over xs of |I(order) - I(2*order)|: the node-doubling estimate."""
    a = mollify_many(f, spec, passes, deriv_order, xs)
    b = mollify_many(f, spec, passes, deriv_order, xs,
                     quad_order=2 * spec.quadrature_order)
    return float(np.max(np.abs(a - b))) if np.size(a) else 0.0
