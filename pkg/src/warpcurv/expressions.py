"""Piecewise analytic expressions with exact derivatives and blended smoothing.

A ``PiecewiseExpr`` is a list of breakpoints b_0 < ... < b_m with one analytic
segment per interval, drawn from a closed catalog: affine, plain quadratic,
log-sinh, log-cosh, log of a quadratic, ln(tau + e^{r/2}), exponentials of
catalog members, and scalar-weighted sums.  Every segment evaluates itself and
its first two derivatives in closed form, one-sidedly at breakpoints, and in a
window-local shifted coordinate (r - x0) where that matters for conditioning.

A ``SmoothedFunction`` wraps a base expression together with smoothing windows
(c_j, delta_j, sigma_j).  Inside a window it blends the twice-mollified base M
with the base f through the plateau bump weight w = phi((x - c)/sigma),
evaluated in deviation form with D = M - f obtained directly from
``mollify_delta_many``:

    F   = f   + D w
    F'  = f'  + D' w + D w'
    F'' = f'' + D'' w + 2 D' w' + D w''

Algebraically this is the usual partition M w + f (1 - w); numerically it
matters that D multiplies the large weight derivatives (w' ~ 1/sigma,
w'' ~ 1/sigma^2) at full relative accuracy instead of as a rounding residue
of two near-equal numbers.  F equals f bit-for-bit outside
[c - sigma, c + sigma] (the unblended code path is byte-identical) and equals
the mollified f + D on [c - sigma/2, c + sigma/2] where the plateau weight is
exactly 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ContinuityError, DomainError, ParameterError
from .mollifier import MollifierSpec, PlateauBump, mollify_delta_many

__all__ = [
    "Segment",
    "Affine",
    "Quadratic",
    "LogSinh",
    "LogCosh",
    "LogQuadratic",
    "LogTauExp",
    "ScaledSum",
    "ExpOf",
    "PiecewiseExpr",
    "Window",
    "SmoothedFunction",
    "tangent_affine",
    "segment_from_dict",
]

_ORDERS = (0, 1, 2)


def _check_order(order: int) -> None:
    if order not in _ORDERS:
        raise ParameterError(f"derivative order must be 0..2, got {order}")


class Segment:
    """Base class for catalog members: closed-form value and derivatives."""

    kind: str = "abstract"
    # Accurate small-difference forms f^(m)(x + dy) - f^(m)(x) for m = 0, 1,
    # 2, overridden by members that can compute them without subtracting two
    # near-equal O(|f^(m)|) values; mollification deviations are built from
    # them so they stay resolved relative to their own tiny magnitude (window
    # blending multiplies the deviations by 1/sigma^2-scale weights, which
    # would amplify plain subtraction noise past certificate margins).
    delta0 = None
    delta1 = None
    delta2 = None

    def eval(self, r: np.ndarray, order: int) -> np.ndarray:
        raise NotImplementedError

    def as_poly2(self) -> tuple[float, float, float, float] | None:
        """(a2, a1, a0, x0) if this segment is exactly a2 u^2 + a1 u + a0."""
        return None

    def params(self) -> dict[str, Any]:
        raise NotImplementedError

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, **self.params()}


@dataclass(frozen=True)
class Affine(Segment):
    """slope * (r - x0) + intercept."""

    slope: float
    intercept: float
    x0: float = 0.0
    kind = "affine"

    def eval(self, r: np.ndarray, order: int) -> np.ndarray:
        _check_order(order)
        r = np.asarray(r, dtype=float)
        if order == 0:
            return self.slope * (r - self.x0) + self.intercept
        if order == 1:
            return np.full_like(r, self.slope)
        return np.zeros_like(r)

    def as_poly2(self):
        return (0.0, self.slope, self.intercept, self.x0)

    def delta0(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        return self.slope * dy + 0.0 * x

    def delta1(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        return np.zeros(np.broadcast_shapes(np.shape(x), np.shape(dy)))

    delta2 = delta1

    def params(self):
        return {"slope": self.slope, "intercept": self.intercept, "x0": self.x0}


@dataclass(frozen=True)
class Quadratic(Segment):
    """a2 u^2 + a1 u + a0 with u = r - x0."""

    a2: float
    a1: float
    a0: float
    x0: float = 0.0
    kind = "quadratic"

    def eval(self, r: np.ndarray, order: int) -> np.ndarray:
        _check_order(order)
        u = np.asarray(r, dtype=float) - self.x0
        if order == 0:
            return (self.a2 * u + self.a1) * u + self.a0
        if order == 1:
            return 2.0 * self.a2 * u + self.a1
        return np.full_like(u, 2.0 * self.a2)

    def as_poly2(self):
        return (self.a2, self.a1, self.a0, self.x0)

    def delta0(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        u = np.asarray(x, dtype=float) - self.x0
        return (2.0 * self.a2 * u + self.a1) * dy + self.a2 * dy * dy

    def delta1(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        return 2.0 * self.a2 * dy + 0.0 * x

    def delta2(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        return np.zeros(np.broadcast_shapes(np.shape(x), np.shape(dy)))

    def params(self):
        return {"a2": self.a2, "a1": self.a1, "a0": self.a0, "x0": self.x0}


@dataclass(frozen=True)
class LogSinh(Segment):
    """ln sinh(a r), requiring a r > 0 on the segment."""

    a: float = 1.0
    kind = "log_sinh"

    def eval(self, r: np.ndarray, order: int) -> np.ndarray:
        _check_order(order)
        x = self.a * np.asarray(r, dtype=float)
        if np.any(x <= 0.0):
            raise DomainError("log-sinh segment evaluated at a r <= 0")
        if order == 0:
            # direct form where sinh is representable; asymptotic form
            # x - ln 2 + log1p(-e^{-2x}) beyond (exact crossover is immaterial)
            return np.where(
                x <= 20.0,
                np.log(np.sinh(np.minimum(x, 20.0))),
                x - np.log(2.0) + np.log1p(-np.exp(-2.0 * np.maximum(x, 20.0))),
            )
        if order == 1:
            return self.a / np.tanh(x)
        return -(self.a / np.sinh(x)) ** 2

    def delta0(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        # sinh(a(x+dy))/sinh(ax) = cosh(a dy) + coth(ax) sinh(a dy)
        ax = self.a * np.asarray(x, dtype=float)
        ady = self.a * dy
        return np.log1p(
            2.0 * np.sinh(0.5 * ady) ** 2 + np.sinh(ady) / np.tanh(ax)
        )

    def _recip_sinh_prod(self, ax, ady, power: int):
        # 1 / (sinh(A)^power sinh(B)^power) with B = A + ady, overflow-safe
        big = ax > 150.0
        an = np.minimum(ax, 150.0)
        direct = 1.0 / (np.sinh(an) * np.sinh(an + ady)) ** power
        af = np.maximum(ax, 150.0)
        asym = (2.0**power) ** 2 * np.exp(-power * (2.0 * af + ady)) / (
            (-np.expm1(-2.0 * af)) * (-np.expm1(-2.0 * (af + ady)))
        ) ** power
        return np.where(big, asym, direct)

    def delta1(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        # a [coth(B) - coth(A)] = -a sinh(a dy) / (sinh A sinh B)
        ax = self.a * np.asarray(x, dtype=float)
        ady = self.a * dy
        return -self.a * np.sinh(ady) * self._recip_sinh_prod(ax, ady, 1)

    def delta2(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        # -a^2 [csch^2 B - csch^2 A] = a^2 sinh(A+B) sinh(a dy) / (sinh A sinh B)^2
        ax = self.a * np.asarray(x, dtype=float)
        ady = self.a * dy
        rec = self._recip_sinh_prod(ax, ady, 2)
        big = ax > 150.0
        an = np.minimum(ax, 150.0)
        # sinh(A+B) rec, with the e^{A+B} growth cancelled against rec for
        # large arguments (rec ~ 16 e^{-2(A+B)})
        direct = np.sinh(2.0 * an + ady) * rec
        af = np.maximum(ax, 150.0)
        asym = (
            8.0
            * np.exp(-(2.0 * af + ady))
            * (-np.expm1(-2.0 * (2.0 * af + ady)))
            / ((-np.expm1(-2.0 * af)) * (-np.expm1(-2.0 * (af + ady)))) ** 2
        )
        return self.a**2 * np.sinh(ady) * np.where(big, asym, direct)

    def params(self):
        return {"a": self.a}


@dataclass(frozen=True)
class LogCosh(Segment):
    """ln cosh(a r)."""

    a: float = 0.5
    kind = "log_cosh"

    def eval(self, r: np.ndarray, order: int) -> np.ndarray:
        _check_order(order)
        x = self.a * np.asarray(r, dtype=float)
        if order == 0:
            ax = np.abs(x)
            return np.where(
                ax <= 20.0,
                np.log(np.cosh(np.minimum(ax, 20.0))),
                ax - np.log(2.0) + np.log1p(np.exp(-2.0 * np.maximum(ax, 20.0))),
            )
        if order == 1:
            return self.a * np.tanh(x)
        return (self.a / np.cosh(x)) ** 2

    def delta0(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        # cosh(a(x+dy))/cosh(ax) = cosh(a dy) + tanh(ax) sinh(a dy)
        ax = self.a * np.asarray(x, dtype=float)
        ady = self.a * dy
        return np.log1p(
            2.0 * np.sinh(0.5 * ady) ** 2 + np.tanh(ax) * np.sinh(ady)
        )

    @staticmethod
    def _recip_cosh_prod(ax, ady):
        # 1 / (cosh A cosh B), B = A + ady, via the product-to-sum identity
        # cosh A cosh B = (cosh(A+B) + cosh(A-B)) / 2, overflow-safe
        s = np.abs(2.0 * ax + ady)
        direct = 2.0 / (np.cosh(np.minimum(s, 300.0)) + np.cosh(ady))
        asym = 4.0 * np.exp(-np.maximum(s, 300.0))
        return np.where(s > 300.0, asym, direct)

    def delta1(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        # a [tanh(B) - tanh(A)] = a sinh(a dy) / (cosh A cosh B)
        ax = self.a * np.asarray(x, dtype=float)
        ady = self.a * dy
        return self.a * np.sinh(ady) * self._recip_cosh_prod(ax, ady)

    def delta2(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        # a^2 [sech^2 B - sech^2 A]
        #   = -a^2 sinh(A+B) sinh(a dy) / (cosh A cosh B)^2
        ax = self.a * np.asarray(x, dtype=float)
        ady = self.a * dy
        s = 2.0 * ax + ady
        rec = self._recip_cosh_prod(ax, ady)
        direct = np.sinh(np.clip(s, -300.0, 300.0)) * rec * rec
        asym = np.sign(s) * 8.0 * np.exp(-np.maximum(np.abs(s), 300.0))
        big = np.abs(s) > 300.0
        return -self.a**2 * np.sinh(ady) * np.where(big, asym, direct)

    def params(self):
        return {"a": self.a}


@dataclass(frozen=True)
class LogQuadratic(Segment):
    """ln(a2 u^2 + a1 u + a0) with u = r - x0; the quadratic must stay > 0."""

    a2: float
    a1: float
    a0: float
    x0: float = 0.0
    kind = "log_quadratic"

    def _q(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
        q = (self.a2 * u + self.a1) * u + self.a0
        if np.any(q <= 0.0):
            raise DomainError("log-quadratic segment evaluated where q <= 0")
        return q, 2.0 * self.a2 * u + self.a1, 2.0 * self.a2

    def eval(self, r: np.ndarray, order: int) -> np.ndarray:
        _check_order(order)
        u = np.asarray(r, dtype=float) - self.x0
        q, q1, q2 = self._q(u)
        if order == 0:
            return np.log(q)
        if order == 1:
            return q1 / q
        return q2 / q - (q1 / q) ** 2

    def delta0(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        u = np.asarray(x, dtype=float) - self.x0
        q, q1, _ = self._q(u)
        dq = (q1 + self.a2 * dy) * dy
        return np.log1p(dq / q)

    def delta1(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        # q1p/qp - q1/q = dy (2 a2 q - q1^2 - a2 q1 dy) / (q qp)
        u = np.asarray(x, dtype=float) - self.x0
        q, q1, _ = self._q(u)
        qp = q + (q1 + self.a2 * dy) * dy
        num = 2.0 * self.a2 * q - q1 * q1 - self.a2 * q1 * dy
        return dy * num / (q * qp)

    def delta2(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        # (2 a2/qp - (q1p/qp)^2) - (2 a2/q - (q1/q)^2)
        u = np.asarray(x, dtype=float) - self.x0
        q, q1, _ = self._q(u)
        dq = (q1 + self.a2 * dy) * dy
        qp = q + dq
        q1p = q1 + 2.0 * self.a2 * dy
        d1 = dy * (2.0 * self.a2 * q - q1 * q1 - self.a2 * q1 * dy) / (q * qp)
        return -2.0 * self.a2 * dq / (q * qp) - d1 * (q1p / qp + q1 / q)

    def params(self):
        return {"a2": self.a2, "a1": self.a1, "a0": self.a0, "x0": self.x0}


@dataclass(frozen=True)
class LogTauExp(Segment):
    """ln(tau + e^{r/2}) for tau > 0, stable arbitrarily deep in the tail.

    Its derivative is the logistic fraction F = (1/2) / (1 + tau e^{-r/2}),
    which climbs from 0 to 1/2; the second derivative is F (1 - 2F) / 2.
    """

    tau: float
    kind = "log_tau_exp"

    def __post_init__(self) -> None:
        if not (self.tau > 0.0):
            raise ParameterError(f"tau must be positive, got {self.tau}")

    def fraction(self, r: np.ndarray) -> np.ndarray:
        s = 0.5 * np.asarray(r, dtype=float) - np.log(self.tau)
        out = np.empty_like(s)
        pos = s >= 0.0
        out[pos] = 0.5 / (1.0 + np.exp(-s[pos]))
        e = np.exp(s[~pos])
        out[~pos] = 0.5 * e / (1.0 + e)
        return out

    def eval(self, r: np.ndarray, order: int) -> np.ndarray:
        _check_order(order)
        r = np.asarray(r, dtype=float)
        if order == 0:
            lt = np.log(self.tau)
            s = 0.5 * r - lt
            out = np.where(
                s <= 0.0,
                lt + np.log1p(np.exp(np.minimum(s, 0.0))),
                0.5 * r + np.log1p(np.exp(np.minimum(-s, 0.0))),
            )
            return out
        f = self.fraction(r)
        if order == 1:
            return f
        return f * (1.0 - 2.0 * f) * 0.5

    def delta0(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        # (tau + e^{(x+dy)/2})/(tau + e^{x/2}) = 1 + 2 F(x) (e^{dy/2} - 1)
        frac = self.fraction(np.asarray(x, dtype=float))
        return np.log1p(2.0 * frac * np.expm1(0.5 * dy))

    def delta1(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        # F(x+dy) - F(x) = (sigma(s + dy/2) - sigma(s)) / 2, s = x/2 - ln tau,
        # via the tail-stable logistic difference identities
        s = 0.5 * np.asarray(x, dtype=float) - np.log(self.tau)
        sp = s + 0.5 * dy
        em = np.expm1(0.5 * dy)
        e_lo = np.exp(np.minimum(s, 1.0))
        e_lop = np.exp(np.minimum(sp, 1.0))
        low = e_lo * em / ((1.0 + e_lo) * (1.0 + e_lop))
        e_hi = np.exp(-np.maximum(s, -1.0))
        e_hip = np.exp(-np.maximum(sp, -1.0))
        high = e_hip * em / ((1.0 + e_hi) * (1.0 + e_hip))
        return 0.5 * np.where(s >= 0.0, high, low)

    def delta2(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        # f'' = F (1 - 2F) / 2 telescopes through delta1; the coefficient
        # 1 - 4F = -tanh(s/2) in closed form (it nearly cancels where F
        # crosses 1/4, i.e. at the tail bending point)
        d1 = self.delta1(x, dy)
        s = 0.5 * np.asarray(x, dtype=float) - np.log(self.tau)
        return 0.5 * d1 * (-np.tanh(0.5 * s) - 2.0 * d1)

    def params(self):
        return {"tau": self.tau}


class ScaledSum(Segment):
    """sum_i coef_i * segment_i."""

    kind = "scaled_sum"

    def __init__(self, terms: tuple[tuple[float, Segment], ...]):
        if not terms:
            raise ParameterError("scaled sum needs at least one term")
        self.terms = tuple((float(c), s) for c, s in terms)
        if all(s.delta0 is not None for _, s in self.terms):
            self.delta0 = self._delta0
        if all(s.delta1 is not None for _, s in self.terms):
            self.delta1 = self._delta1
        if all(s.delta2 is not None for _, s in self.terms):
            self.delta2 = self._delta2

    def _delta0(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        out = 0.0
        for c, s in self.terms:
            out = out + c * s.delta0(x, dy)
        return out

    def _delta1(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        out = 0.0
        for c, s in self.terms:
            out = out + c * s.delta1(x, dy)
        return out

    def _delta2(self, x: np.ndarray, dy: np.ndarray) -> np.ndarray:
        out = 0.0
        for c, s in self.terms:
            out = out + c * s.delta2(x, dy)
        return out

    def eval(self, r: np.ndarray, order: int) -> np.ndarray:
        _check_order(order)
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for c, s in self.terms:
            out = out + c * s.eval(r, order)
        return out

    def as_poly2(self):
        x0 = None
        acc = [0.0, 0.0, 0.0]
        for c, s in self.terms:
            p = s.as_poly2()
            if p is None:
                return None
            a2, a1, a0, px0 = p
            if x0 is None:
                x0 = px0
            shift = x0 - px0  # u_child = u + shift
            acc[0] += c * a2
            acc[1] += c * (2.0 * a2 * shift + a1)
            acc[2] += c * ((a2 * shift + a1) * shift + a0)
        return (acc[0], acc[1], acc[2], x0 if x0 is not None else 0.0)

    def params(self):
        return {"terms": [[c, s.to_dict()] for c, s in self.terms]}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ScaledSum) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(("scaled_sum", self.terms))


class ExpOf(Segment):
    """exp of another catalog member."""

    kind = "exp_of"

    def __init__(self, inner: Segment):
        self.inner = inner

    def eval(self, r: np.ndarray, order: int) -> np.ndarray:
        _check_order(order)
        r = np.asarray(r, dtype=float)
        v = np.exp(self.inner.eval(r, 0))
        if order == 0:
            return v
        d1 = self.inner.eval(r, 1)
        if order == 1:
            return d1 * v
        d2 = self.inner.eval(r, 2)
        return (d2 + d1 * d1) * v

    def params(self):
        return {"inner": self.inner.to_dict()}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ExpOf) and self.inner == other.inner

    def __hash__(self) -> int:
        return hash(("exp_of", self.inner))


_SEGMENT_KINDS: dict[str, type[Segment]] = {
    cls.kind: cls
    for cls in (Affine, Quadratic, LogSinh, LogCosh, LogQuadratic, LogTauExp)
}


def segment_from_dict(d: dict[str, Any]) -> Segment:
    kind = d.get("kind")
    if kind in _SEGMENT_KINDS:
        params = {k: v for k, v in d.items() if k != "kind"}
        return _SEGMENT_KINDS[kind](**params)
    if kind == "scaled_sum":
        return ScaledSum(tuple((c, segment_from_dict(sd)) for c, sd in d["terms"]))
    if kind == "exp_of":
        return ExpOf(segment_from_dict(d["inner"]))
    raise ParameterError(f"unknown segment kind {kind!r}")


# ---------------------------------------------------------------------------
# piecewise expression
# ---------------------------------------------------------------------------

_C0_RTOL = 1e-12


class PiecewiseExpr:
    """Continuous piecewise expression on [b_0, b_m], one segment per cell."""

    def __init__(self, breakpoints, segments, validate: bool = True):
        self.breakpoints = np.asarray(breakpoints, dtype=float)
        self.segments: tuple[Segment, ...] = tuple(segments)
        if self.breakpoints.ndim != 1 or self.breakpoints.size < 2:
            raise ParameterError("need at least two breakpoints")
        if np.any(np.diff(self.breakpoints) <= 0.0):
            raise ParameterError("breakpoints must be strictly increasing")
        if len(self.segments) != self.breakpoints.size - 1:
            raise ParameterError(
                f"{self.breakpoints.size - 1} cells but {len(self.segments)} segments"
            )
        if validate:
            self._validate()

    def _validate(self) -> None:
        for i, seg in enumerate(self.segments):
            ends = seg.eval(self.breakpoints[i : i + 2], 0)
            if not np.all(np.isfinite(ends)):
                raise DomainError(
                    f"segment {i} ({seg.kind}) not finite on its closed cell"
                )
        for j in range(1, self.breakpoints.size - 1):
            b = self.breakpoints[j]
            left = float(self.segments[j - 1].eval(np.array([b]), 0)[0])
            right = float(self.segments[j].eval(np.array([b]), 0)[0])
            tol = _C0_RTOL * max(1.0, abs(left), abs(right))
            if abs(left - right) > tol:
                raise ContinuityError(
                    f"jump {left - right:.3e} at breakpoint {b!r} exceeds C0 tolerance"
                )

    # -- geometry ----------------------------------------------------------

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    def segment_index_many(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        return np.clip(idx, 0, len(self.segments) - 1)

    def segment_poly2(self, i: int) -> tuple[float, float, float, float] | None:
        return self.segments[i].as_poly2()

    def segment_delta0(self, i: int):
        """Accurate (x, dy) -> f(x+dy) - f(x) on segment i, or None."""
        return self.segments[i].delta0

    def segment_delta(self, i: int, order: int):
        """Accurate (x, dy) -> f^(order)(x+dy) - f^(order)(x), or None."""
        seg = self.segments[i]
        return (seg.delta0, seg.delta1, seg.delta2)[order]

    # -- evaluation --------------------------------------------------------

    def eval_many(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        _check_order(order)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        lo, hi = self.domain
        tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        if x.size and (x.min() < lo - tol or x.max() > hi + tol):
            raise DomainError(
                f"evaluation at {x[np.argmax((x < lo - tol) | (x > hi + tol))]!r} "
                f"outside domain [{lo}, {hi}]"
            )
        idx = self.segment_index_many(x)
        out = np.empty_like(x)
        for i in np.unique(idx):
            rows = idx == i
            out[rows] = self.segments[i].eval(x[rows], order)
        return out

    def __call__(self, x, order: int = 0):
        res = self.eval_many(np.atleast_1d(x), order)
        return float(res[0]) if np.isscalar(x) or np.ndim(x) == 0 else res

    def eval_one_sided(self, b: float, order: int, side: str) -> float:
        """Evaluate a derivative at breakpoint b from the given side."""
        j = int(np.searchsorted(self.breakpoints, b))
        if j >= self.breakpoints.size or self.breakpoints[j] != b:
            raise ParameterError(f"{b!r} is not a breakpoint")
        if side == "-":
            if j == 0:
                raise DomainError("no segment to the left of the first breakpoint")
            seg = self.segments[j - 1]
        elif side == "+":
            if j == self.breakpoints.size - 1:
                raise DomainError("no segment to the right of the last breakpoint")
            seg = self.segments[j]
        else:
            raise ParameterError(f"side must be '-' or '+', got {side!r}")
        return float(seg.eval(np.array([b]), order)[0])

    def value_jump(self, b: float, order: int) -> float:
        """Right minus left one-sided derivative at an interior breakpoint."""
        return self.eval_one_sided(b, order, "+") - self.eval_one_sided(b, order, "-")

    # -- surgery -----------------------------------------------------------

    def restrict(self, lo: float, hi: float) -> "PiecewiseExpr":
        """The same expression on [lo, hi] (endpoints become breakpoints)."""
        dlo, dhi = self.domain
        tol = 1e-12 * max(1.0, abs(dlo), abs(dhi))
        if lo < dlo - tol or hi > dhi + tol or not lo < hi:
            raise DomainError(f"[{lo}, {hi}] is not inside [{dlo}, {dhi}]")
        i0 = int(self.segment_index_many(np.array([lo]))[0])
        i1 = int(self.segment_index_many(np.array([min(hi, np.nextafter(hi, lo))]))[0])
        inner = self.breakpoints[(self.breakpoints > lo) & (self.breakpoints < hi)]
        bks = np.concatenate(([lo], inner, [hi]))
        return PiecewiseExpr(bks, self.segments[i0 : i1 + 1], validate=False)

    def map_segments(self, fn) -> "PiecewiseExpr":
        """New expression with fn applied to every segment."""
        return PiecewiseExpr(
            self.breakpoints, tuple(fn(s) for s in self.segments), validate=False
        )

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "breakpoints": [float(b) for b in self.breakpoints],
            "segments": [s.to_dict() for s in self.segments],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "PiecewiseExpr":
        return cls(
            np.asarray(d["breakpoints"], dtype=float),
            tuple(segment_from_dict(sd) for sd in d["segments"]),
            validate=False,
        )


def tangent_affine(f, at: float, order_shift: int = 0) -> Affine:
    """Tangent line of f at ``at`` in point-slope form around x0 = at."""
    pt = np.array([at])
    if isinstance(f, Segment):
        val = float(f.eval(pt, order_shift)[0])
        slope = float(f.eval(pt, order_shift + 1)[0])
    else:
        val = float(f.eval_many(pt, order_shift)[0])
        slope = float(f.eval_many(pt, order_shift + 1)[0])
    return Affine(slope=slope, intercept=val, x0=at)


# ---------------------------------------------------------------------------
# smoothed function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Window:
    """One smoothing window: blend radius sigma, kernel half-width delta."""

    center: float
    delta: float
    sigma: float

    def __post_init__(self) -> None:
        if not (self.sigma > 0.0 and np.isfinite(self.sigma)):
            raise ParameterError(f"sigma must be positive, got {self.sigma}")
        if not (0.0 < self.delta < self.sigma / 4.0):
            raise ParameterError(
                f"delta must lie in (0, sigma/4); got delta={self.delta}, "
                f"sigma={self.sigma}"
            )

    def to_dict(self) -> dict[str, float]:
        return {"center": self.center, "delta": self.delta, "sigma": self.sigma}


class SmoothedFunction:
    """Base expression blended with its double mollification on windows."""

    PASSES = 2

    def __init__(self, base: PiecewiseExpr, windows, quad_order: int = 64):
        self.base = base
        self.windows: tuple[Window, ...] = tuple(
            w if isinstance(w, Window) else Window(*w) for w in windows
        )
        self.quad_order = int(quad_order)
        spans = sorted(
            (w.center - w.sigma, w.center + w.sigma) for w in self.windows
        )
        for (a0, a1), (b0, b1) in zip(spans[:-1], spans[1:]):
            if b0 < a1:
                raise ParameterError(
                    f"smoothing windows overlap: [{a0}, {a1}] and [{b0}, {b1}]"
                )
        lo, hi = base.domain
        for w in self.windows:
            reach = w.sigma + self.PASSES * w.delta
            if w.center - reach < lo or w.center + reach > hi:
                raise DomainError(
                    f"window at {w.center} (reach {reach}) leaves domain [{lo}, {hi}]"
                )

    @property
    def domain(self) -> tuple[float, float]:
        return self.base.domain

    def _window_eval(self, w: Window, x: np.ndarray, order: int) -> np.ndarray:
        # Deviation form of the blend: with D = M - f computed directly
        # (mollify_delta_many), the weight derivatives 1/sigma, 1/sigma^2
        # multiply a quantity resolved relative to its own tiny size, so the
        # result carries no O(ulp(|f|)/sigma^2) noise.
        spec = MollifierSpec(delta=w.delta, quadrature_order=self.quad_order)
        u = (x - w.center) / w.sigma
        wt = PlateauBump.deriv(u, 0)
        d0 = mollify_delta_many(self.base, spec, self.PASSES, 0, x)
        if order == 0:
            return self.base.eval_many(x, 0) + d0 * wt
        wt1 = PlateauBump.deriv(u, 1) / w.sigma
        d1 = mollify_delta_many(self.base, spec, self.PASSES, 1, x)
        if order == 1:
            return self.base.eval_many(x, 1) + d1 * wt + d0 * wt1
        wt2 = PlateauBump.deriv(u, 2) / w.sigma**2
        d2 = mollify_delta_many(self.base, spec, self.PASSES, 2, x)
        return (
            self.base.eval_many(x, 2)
            + d2 * wt
            + 2.0 * d1 * wt1
            + d0 * wt2
        )

    def eval_many(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        _check_order(order)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = self.base.eval_many(x, order)
        for w in self.windows:
            mask = np.abs(x - w.center) < w.sigma
            if np.any(mask):
                out[mask] = self._window_eval(w, x[mask], order)
        return out

    def __call__(self, x, order: int = 0):
        res = self.eval_many(np.atleast_1d(x), order)
        return float(res[0]) if np.isscalar(x) or np.ndim(x) == 0 else res

    def with_windows(self, extra) -> "SmoothedFunction":
        """A copy with additional smoothing windows."""
        return SmoothedFunction(
            self.base, self.windows + tuple(
                w if isinstance(w, Window) else Window(*w) for w in extra
            ), self.quad_order,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "base": self.base.to_dict(),
            "windows": [w.to_dict() for w in self.windows],
            "quad_order": self.quad_order,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SmoothedFunction":
        return cls(
            PiecewiseExpr.from_dict(d["base"]),
            tuple(Window(**wd) for wd in d["windows"]),
            d.get("quad_order", 64),
        )
