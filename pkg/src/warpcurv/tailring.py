"""Exact curvature algebra on the deep tail.

Below its last smoothing window the metric has the exact closed form
v = eps e^r, g = tau + e^{r/2}.  Writing F = g'/g (a logistic function that
increases from 0 to its value 1/4 at the bending radius) and u = 1/g, every
curvature-tensor component is a polynomial in F and u whose coefficients are
exact rationals times integer powers of eps and of the structure constant c.
The class of such polynomials is closed under d/dr:

    F' = F/2 - F^2        u' = -F u

so covariant derivatives of the curvature tensor of every order stay inside
the ring, and each component carries a finite uniform bound obtained from
0 < F <= 1/2, 0 < u <= 1/tau, |c| <= 1/2.

Frame indices throughout: 0 is the radial direction, 1 the circle direction
(warp v), 2 and 3 the horizontal pair (warp g).

The symbol c is kept generic so the bounds cover every admissible bracket
coefficient, but the four-direction frame is a complete geometry only for a
single horizontal pair, where c^2 = 1/4 exactly; tensor identities that mix
tube directions (such as the differential Bianchi identity) therefore close
only after that substitution (:func:`reduce_extreme_bracket`).  Components
whose leading slots are radial are plain r-derivatives and are valid for any
number of pairs, because the frame is parallel along radial geodesics.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import ParameterError

__all__ = [
    "MAX_CLOSURE_ORDER",
    "TailPolynomial",
    "tail_components",
    "curvature_tensor_component",
    "christoffel_table",
    "derivative_closure",
    "poly_bound",
    "reduce_extreme_bracket",
]

# each extra derivative order multiplies the component count by four; the
# guard keeps requests inside what finishes in reasonable time and memory
MAX_CLOSURE_ORDER = 6

_KEY_NAMES = ("F", "u", "eps", "c")
_BOUND_SLACK = 1.0 + 1e-11


class TailPolynomial:
    """A polynomial sum of terms q * F^a u^b eps^e c^p with rational q.

    Keys are (a, b, e, p) exponent tuples; instances are immutable and
    support +, -, *, exact differentiation, float evaluation, and a uniform
    bound over the tail ranges of F, u, and c.
    """

    __slots__ = ("_terms",)

    def __init__(
        self, terms: Mapping[tuple[int, int, int, int], object] | None = None
    ) -> None:
        clean: dict[tuple[int, int, int, int], Fraction] = {}
        for key, raw in (terms or {}).items():
            key = self._check_key(key)
            q = Fraction(raw)
            if q:
                total = clean.get(key, Fraction(0)) + q
                if total:
                    clean[key] = total
                else:
                    clean.pop(key, None)
        object.__setattr__(self, "_terms", MappingProxyType(clean))

    @staticmethod
    def _check_key(key) -> tuple[int, int, int, int]:
        key = tuple(key)
        if len(key) != 4 or any(
            not isinstance(x, int) or x < 0 for x in key
        ):
            raise ParameterError(
                f"monomial keys are 4-tuples of nonnegative integer powers "
                f"(F, u, eps, c), got {key!r}"
            )
        return key  # type: ignore[return-value]

    # -- container protocol -------------------------------------------------

    @property
    def terms(self) -> Mapping[tuple[int, int, int, int], Fraction]:
        return self._terms

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, TailPolynomial):
            return NotImplemented
        return dict(self._terms) == dict(other._terms)

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "TailPolynomial") -> "TailPolynomial":
        if not isinstance(other, TailPolynomial):
            return NotImplemented
        merged = dict(self._terms)
        for key, q in other._terms.items():
            merged[key] = merged.get(key, Fraction(0)) + q
        return TailPolynomial(merged)

    def __neg__(self) -> "TailPolynomial":
        return TailPolynomial({k: -q for k, q in self._terms.items()})

    def __sub__(self, other: "TailPolynomial") -> "TailPolynomial":
        if not isinstance(other, TailPolynomial):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "TailPolynomial":
        if isinstance(other, TailPolynomial):
            out: dict[tuple[int, int, int, int], Fraction] = {}
            for (a1, b1, e1, p1), q1 in self._terms.items():
                for (a2, b2, e2, p2), q2 in other._terms.items():
                    key = (a1 + a2, b1 + b2, e1 + e2, p1 + p2)
                    out[key] = out.get(key, Fraction(0)) + q1 * q2
            return TailPolynomial(out)
        if isinstance(other, (int, Fraction)):
            return TailPolynomial(
                {k: q * other for k, q in self._terms.items()}
            )
        return NotImplemented

    __rmul__ = __mul__

    def derivative(self) -> "TailPolynomial":
        """d/dr under F' = F/2 - F^2 and u' = -F u."""
        out: dict[tuple[int, int, int, int], Fraction] = {}
        for (a, b, e, p), q in self._terms.items():
            if a:
                key = (a, b, e, p)
                out[key] = out.get(key, Fraction(0)) + q * Fraction(a, 2)
            if a + b:
                key = (a + 1, b, e, p)
                out[key] = out.get(key, Fraction(0)) - q * (a + b)
        return TailPolynomial(out)

    # -- numerics -----------------------------------------------------------

    def evaluate(self, F: float, u: float, eps: float, c: float) -> float:
        """Exactly-rounded float value at a numeric tail point."""
        return math.fsum(
            float(q) * F**a * u**b * eps**e * c**p
            for (a, b, e, p), q in sorted(self._terms.items())
        )

    def bound(self, eps: float, u_max: float) -> float:
        """A uniform bound for |poly| over 0 < F <= 1/2, 0 < u <= u_max,
        |c| <= 1/2 at the given eps."""
        if not (eps > 0.0 and u_max > 0.0):
            raise ParameterError("eps and u_max must be positive")
        total = math.fsum(
            abs(float(q)) * 0.5 ** (a + p) * u_max**b * eps**e
            for (a, b, e, p), q in sorted(self._terms.items())
        )
        return total * _BOUND_SLACK

    # -- formatting ----------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        ordered = sorted(
            self._terms.items(),
            key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0], kv[0][1:]),
        )
        pieces: list[str] = []
        for idx, ((a, b, e, p), q) in enumerate(ordered):
            symbols = []
            for power, name in zip((e, a, b, p), ("eps", "F", "u", "c")):
                if power == 1:
                    symbols.append(name)
                elif power > 1:
                    symbols.append(f"{name}^{power}")
            mag = abs(q)
            coef = "" if mag == 1 and symbols else str(mag)
            body = " ".join(x for x in ([coef] if coef else []) + symbols)
            if idx == 0:
                pieces.append(body if q > 0 else f"-{body}")
            else:
                pieces.append(f"{'+' if q > 0 else '-'} {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"TailPolynomial({dict(self._terms)!r})"


_ZERO = TailPolynomial()
_ONE = TailPolynomial({(0, 0, 0, 0): 1})
_F = TailPolynomial({(1, 0, 0, 0): 1})

# ---------------------------------------------------------------------------
# the curvature components on the tail
# ---------------------------------------------------------------------------

_K21 = TailPolynomial({(4, 0, 2, 0): 1, (1, 0, 0, 0): -1})
_K32 = TailPolynomial(
    {
        (0, 2, 0, 0): Fraction(-1, 4),
        (0, 2, 0, 2): -3,
        (4, 0, 2, 2): -12,
        (2, 0, 0, 0): -1,
    }
)
_KR1 = TailPolynomial({(0, 0, 0, 0): -1})
_KR2 = TailPolynomial({(1, 0, 0, 0): Fraction(-1, 2)})
_M1 = TailPolynomial({(2, 0, 1, 1): -4, (3, 0, 1, 1): 4})
_M2 = TailPolynomial({(2, 0, 1, 1): 2, (3, 0, 1, 1): -2})


def tail_components() -> dict[str, TailPolynomial]:
    """The closed-form tail values of the component curvatures and the
    three radial mixed components."""
    return {
        "k21": _K21,
        "k31": _K21,
        "k32": _K32,
        "kr1": _KR1,
        "kr2": _KR2,
        "kr3": _KR2,
        "m1": _M1,
        "m2": _M2,
        "m3": _M2,
    }


def _build_perm_table() -> dict[tuple[int, int, int, int], TailPolynomial]:
    """Close the six base mixed components under the tensor symmetries
    R(a,b,c,d) = -R(b,a,c,d) = -R(a,b,d,c) = R(c,d,a,b)."""
    table: dict[tuple[int, int, int, int], TailPolynomial] = {
        (0, 1, 2, 3): _M1,
        (0, 1, 3, 2): -_M1,
        (0, 2, 3, 1): _M2,
        (0, 2, 1, 3): -_M2,
        (0, 3, 1, 2): _M2,
        (0, 3, 2, 1): -_M2,
    }
    changed = True
    while changed:
        changed = False
        for (a, b, c, d), poly in list(table.items()):
            for key, val in (
                ((b, a, c, d), -poly),
                ((a, b, d, c), -poly),
                ((c, d, a, b), poly),
            ):
                if key not in table:
                    table[key] = val
                    changed = True
                elif table[key] != val:
                    raise AssertionError(
                        f"inconsistent symmetry closure at {key}"
                    )
    return table


_PERM_TABLE = _build_perm_table()

_PLANE_TABLE = {
    (0, 1): _KR1,
    (0, 2): _KR2,
    (0, 3): _KR2,
    (1, 2): _K21,
    (1, 3): _K21,
    (2, 3): _K32,
}


def _check_frame_index(i: int) -> int:
    if not isinstance(i, int) or not 0 <= i <= 3:
        raise ParameterError(f"frame index must be 0..3, got {i!r}")
    return i


def curvature_tensor_component(
    a: int, b: int, c: int, d: int
) -> TailPolynomial:
    """<R(Y_a, Y_b) Y_c, Y_d> on the tail as an exact polynomial."""
    a, b, c, d = (_check_frame_index(i) for i in (a, b, c, d))
    if a == b or c == d:
        return _ZERO
    if {a, b} == {c, d}:
        base = _PLANE_TABLE[(min(a, b), max(a, b))]
        return base if (c, d) == (b, a) else -base
    return _PERM_TABLE.get((a, b, c, d), _ZERO)


# ---------------------------------------------------------------------------
# the connection on the tail
# ---------------------------------------------------------------------------

_CROSS = TailPolynomial({(2, 0, 1, 1): 2})  # (v / 2g^2) c = 2 eps F^2 c


def christoffel_table() -> dict[tuple[int, int], tuple[tuple[int, TailPolynomial], ...]]:
    """nabla_{Y_i} Y_j = sum coef * Y_k, keyed (i, j) -> ((k, coef), ...).

    Radial covariant derivatives of the frame vanish (the frame is parallel
    along radial geodesics), so the (0, j) rows are empty.
    """
    return {
        (0, 0): (),
        (0, 1): (),
        (0, 2): (),
        (0, 3): (),
        (1, 0): ((1, _ONE),),
        (2, 0): ((2, _F),),
        (3, 0): ((3, _F),),
        (1, 1): ((0, -_ONE),),
        (2, 2): ((0, -_F),),
        (3, 3): ((0, -_F),),
        (2, 3): ((1, _CROSS),),
        (3, 2): ((1, -_CROSS),),
        (2, 1): ((3, -_CROSS),),
        (3, 1): ((2, _CROSS),),
        (1, 2): ((3, -_CROSS),),
        (1, 3): ((2, _CROSS),),
    }


def derivative_closure(
    kmax: int = 3,
) -> list[dict[tuple[int, ...], TailPolynomial]]:
    """Symbolic tables of the curvature tensor and its first kmax covariant
    derivatives on the tail; level k maps (4+k)-index tuples to polynomials
    (zero components omitted).

    A radial first slot differentiates the component through the ring
    derivation; a tube-direction first slot contributes only connection
    terms, because every component is constant on tubes.
    """
    if not isinstance(kmax, int) or kmax < 0:
        raise ParameterError(f"kmax must be a nonnegative integer, got {kmax!r}")
    if kmax > MAX_CLOSURE_ORDER:
        raise ParameterError(
            f"kmax={kmax} exceeds the supported order {MAX_CLOSURE_ORDER}"
        )
    gamma = christoffel_table()
    level0: dict[tuple[int, ...], TailPolynomial] = {}
    for t in product(range(4), repeat=4):
        poly = curvature_tensor_component(*t)
        if not poly.is_zero:
            level0[t] = poly
    levels = [level0]
    for k in range(kmax):
        prev = levels[-1]
        cur: dict[tuple[int, ...], TailPolynomial] = {}
        for t in product(range(4), repeat=5 + k):
            i0, rest = t[0], t[1:]
            if i0 == 0:
                poly = prev.get(rest, _ZERO).derivative()
            else:
                poly = _ZERO
                for slot, idx in enumerate(rest):
                    for target, coef in gamma[(i0, idx)]:
                        parent = prev.get(
                            rest[:slot] + (target,) + rest[slot + 1 :]
                        )
                        if parent is not None:
                            poly = poly - coef * parent
            if not poly.is_zero:
                cur[t] = poly
        levels.append(cur)
    return levels


def poly_bound(poly: TailPolynomial, eps: float, u_max: float) -> float:
    """Uniform tail bound for a component polynomial; see
    :meth:`TailPolynomial.bound`."""
    return poly.bound(eps, u_max)


def reduce_extreme_bracket(poly: TailPolynomial) -> TailPolynomial:
    """Substitute c^2 = 1/4, the exact value for a single horizontal pair.

    With one pair the row-sum constraint pins the bracket coefficient to
    |c| = 1/2, so even powers of c collapse to rational constants.  Tensor
    identities that couple the two tube directions hold in the ring only
    after this reduction; the generic-c tables are kept for bound purposes,
    where |c| <= 1/2 makes them conservative.
    """
    reduced: dict[tuple[int, int, int, int], Fraction] = {}
    for (a, b, e, p), q in poly.terms.items():
        key = (a, b, e, p % 2)
        reduced[key] = reduced.get(key, Fraction(0)) + q * Fraction(1, 4) ** (p // 2)
    return TailPolynomial(reduced)
