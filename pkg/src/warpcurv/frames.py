"""Structure constants of the adapted frame and tangent 2-plane coefficients.

The horizontal frame vectors bracket into the circle direction with
coefficients c_ij ([X_i, X_j] = c_ij X_1), and those coefficients come from
an orthogonal complex structure J through c_ij = <e_i, J e_j> / 2.  Because
J is orthogonal and squares to -I, the matrix c is antisymmetric, bounded
entrywise by 1/2, and has row sums of squares exactly 1/4 - the three facts
every curvature bound downstream leans on.

Tangent 2-planes are described by coefficient pairs (C, D): a unit vector C
over the frame (partial_r, Y_1, Y_2, Y_3) and a unit vector D over the
horizontal pair orthogonal to C's horizontal part.  For such pairs the
coefficients appearing in the sectional-curvature assembly sum to exactly 1,
which is what makes "every plane's curvature is a convex combination of
component curvatures" work.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import ComplexStructureError, ParameterError
from .reporting import CheckEntry, Report

__all__ = [
    "StructureConstants",
    "PlanePair",
    "standard_complex_structure",
    "random_complex_structure",
    "structure_from_complex",
    "validate_structure_constants",
    "make_plane_pair",
    "coefficient_identity_residual",
]

_ORTHO_TOL = 1e-12


@dataclass(frozen=True)
class StructureConstants:
    """Bracket coefficients c_ij of the frame, indices 1..2n-1.

    ``c[i-1, j-1]`` holds c_ij; the first row and column (everything
    involving the circle direction X_1) must be zero.  Construction only
    checks shape; ``validate_structure_constants`` measures the invariants.
    """

    n: int
    c: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ParameterError(f"complex dimension must be >= 2, got {self.n}")
        c = np.asarray(self.c, dtype=float)
        size = 2 * self.n - 1
        if c.shape != (size, size):
            raise ParameterError(
                f"coefficient matrix must be {size}x{size} for n={self.n}, "
                f"got {c.shape}"
            )
        object.__setattr__(self, "c", c)

    def value(self, i: int, j: int) -> float:
        """c_ij with the 1-based frame indices used throughout."""
        if not (1 <= i <= 2 * self.n - 1 and 1 <= j <= 2 * self.n - 1):
            raise ParameterError(f"frame index out of range: ({i}, {j})")
        return float(self.c[i - 1, j - 1])


_PairKind = Literal["generic", "nongeneric"]

_ARITY = {"generic": (4, 2), "nongeneric": (3, 2)}


@dataclass(frozen=True)
class PlanePair:
    """Coefficients of a tangent 2-plane spanned by C and D.

    generic:     C = c0 dr + c1 Y1 + c2 Y2 + c3 Y3,  D = d1 Y1 + d2 Y2
    nongeneric:  C = c0 dr + c1 Y1 + c2 Y2,          D = d0 dr + d1 Y1

    Valid pairs are unit-norm with D orthogonal to C's overlapping part;
    the constructor only fixes arity so that deliberately invalid pairs can
    still be fed to the residual diagnostics.
    """

    kind: _PairKind
    C: tuple[float, ...]
    D: tuple[float, float]

    def __post_init__(self) -> None:
        if self.kind not in _ARITY:
            raise ParameterError(f"unknown plane-pair kind {self.kind!r}")
        nc, nd = _ARITY[self.kind]
        if len(self.C) != nc or len(self.D) != nd:
            raise ParameterError(
                f"{self.kind} pair needs |C|={nc}, |D|={nd} coefficients; "
                f"got {len(self.C)}, {len(self.D)}"
            )
        object.__setattr__(self, "C", tuple(float(x) for x in self.C))
        object.__setattr__(self, "D", tuple(float(x) for x in self.D))


# ---------------------------------------------------------------------------
# complex structures and the c_ij they induce
# ---------------------------------------------------------------------------


def standard_complex_structure(n: int) -> np.ndarray:
    """Block-diagonal J0 = diag([[0, -1], [1, 0]], ...) of size 2n-2."""
    if n < 2:
        raise ParameterError(f"complex dimension must be >= 2, got {n}")
    size = 2 * n - 2
    j = np.zeros((size, size))
    for k in range(0, size, 2):
        j[k, k + 1] = -1.0
        j[k + 1, k] = 1.0
    return j


def random_complex_structure(n: int, seed: int | np.random.Generator = 0) -> np.ndarray:
    """A seeded orthogonal complex structure J = Q J0 Q^T.

    Q is the orthogonal factor of a Gaussian matrix, so conjugation
    preserves both J^T J = I and J^2 = -I exactly up to rounding.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    j0 = standard_complex_structure(n)
    q, r = np.linalg.qr(rng.standard_normal(j0.shape))
    q = q * np.sign(np.diag(r))  # fix the column signs for determinism
    return q @ j0 @ q.T


def structure_from_complex(J: np.ndarray) -> StructureConstants:
    """Structure constants c_ij = <e_i, J e_j> / 2 of an orthogonal J."""
    J = np.asarray(J, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise ParameterError(f"J must be a square matrix, got shape {J.shape}")
    size = J.shape[0]
    if size < 2 or size % 2:
        raise ParameterError(
            f"J must have even size 2n-2 with n >= 2, got size {size}"
        )
    eye = np.eye(size)
    ortho = float(np.max(np.abs(J.T @ J - eye)))
    if ortho > _ORTHO_TOL:
        raise ComplexStructureError(
            f"J^T J differs from the identity by {ortho:.3e} (> {_ORTHO_TOL})"
        )
    square = float(np.max(np.abs(J @ J + eye)))
    if square > _ORTHO_TOL:
        raise ComplexStructureError(
            f"J^2 differs from -I by {square:.3e} (> {_ORTHO_TOL})"
        )

    n = size // 2 + 1
    c = np.zeros((2 * n - 1, 2 * n - 1))
    c[1:, 1:] = 0.5 * J  # frame index i >= 2 is basis index i-2
    sc = StructureConstants(n=n, c=c)
    report = validate_structure_constants(sc)
    if not report.passed:
        raise ComplexStructureError(
            "generated constants fail their own invariants:\n"
            + "\n".join(report.format_lines())
        )
    return sc


def validate_structure_constants(sc: StructureConstants) -> Report:
    """Measure every StructureConstants invariant; failures are data."""
    c = sc.c
    report = Report(title=f"structure constants (n={sc.n})")

    anti = float(np.max(np.abs(c + c.T)))
    report.add(
        CheckEntry(
            name="antisymmetry c_ij = -c_ji",
            passed=anti <= _ORTHO_TOL,
            measured=anti,
            bound=_ORTHO_TOL,
            comparison="<=",
        )
    )
    first = max(float(np.max(np.abs(c[0, :]))), float(np.max(np.abs(c[:, 0]))))
    report.add(
        CheckEntry(
            name="first row and column vanish (c_1j = 0 = c_i1)",
            passed=first == 0.0,
            measured=first,
            bound=0.0,
            comparison="<=",
        )
    )
    bound = float(np.max(np.abs(c)))
    report.add(
        CheckEntry(
            name="|c_ij| <= 1/2",
            passed=bound <= 0.5 + _ORTHO_TOL,
            measured=bound,
            bound=0.5,
            comparison="<=",
        )
    )
    rows = np.sum(c[1:, 1:] ** 2, axis=1)
    row_res = float(np.max(np.abs(rows - 0.25)))
    report.add(
        CheckEntry(
            name="row sums of squares equal 1/4",
            passed=row_res <= _ORTHO_TOL,
            measured=row_res,
            bound=_ORTHO_TOL,
            comparison="<=",
            detail="sum_{j>1} c_ij^2 for every i>1",
        )
    )
    # equivalent statement: e_i -> -2 sum_j c_ij e_j is an isometry
    m = -2.0 * c[1:, 1:]
    iso = float(np.max(np.abs(m @ m.T - np.eye(m.shape[0]))))
    report.add(
        CheckEntry(
            name="row map -2c is an isometry of the horizontal space",
            passed=iso <= 4.0 * _ORTHO_TOL,
            measured=iso,
            bound=4.0 * _ORTHO_TOL,
            comparison="<=",
        )
    )
    return report


# ---------------------------------------------------------------------------
# plane pairs
# ---------------------------------------------------------------------------


def make_plane_pair(
    c_raw,
    kind: _PairKind = "generic",
    sign: int = 1,
    seed: int = 0,
) -> PlanePair:
    """Normalize C and solve the orthogonality constraint for D.

    The overlapping coefficients of C ((c1, c2) for generic pairs, (c0, c1)
    for nongeneric ones) force D up to sign: D = sign * rot90(overlap).
    When the overlap vanishes the constraint is void and D is a seeded
    deterministic unit vector.
    """
    if sign not in (1, -1):
        raise ParameterError(f"sign must be +1 or -1, got {sign!r}")
    c = np.asarray(c_raw, dtype=float)
    nc, _ = _ARITY.get(kind, (0, 0))
    if c.shape != (nc,):
        raise ParameterError(
            f"{kind} pair needs a {nc}-vector for C, got shape {c.shape}"
        )
    norm = float(np.linalg.norm(c))
    if norm == 0.0:
        raise ParameterError("C must be a nonzero vector")
    c = c / norm

    overlap = c[1:3] if kind == "generic" else c[0:2]
    onorm = float(np.linalg.norm(overlap))
    if onorm > 0.0:
        d = (sign * -overlap[1] / onorm, sign * overlap[0] / onorm)
    else:
        angle = float(np.random.default_rng(seed).uniform(0.0, 2.0 * math.pi))
        d = (sign * math.cos(angle), sign * math.sin(angle))
    return PlanePair(kind=kind, C=tuple(c), D=d)


def coefficient_identity_residual(pp: PlanePair) -> float:
    """How far the assembly coefficients are from summing to 1.

    generic:     (d1 c2 - d2 c1)^2 + (d1^2 + d2^2)(c0^2 + c3^2)  = 1
    nongeneric:  (d0 c1 - d1 c0)^2 + (d0^2 + d1^2) c2^2          = 1

    Both follow from |C| = |D| = 1 and the orthogonality constraint; for an
    unnormalized D the residual reduces to |1 - |D|^2|, so the value doubles
    as a diagnostic of a bad pair.
    """
    if pp.kind == "generic":
        c0, c1, c2, c3 = pp.C
        d1, d2 = pp.D
        total = (d1 * c2 - d2 * c1) ** 2 + (d1 * d1 + d2 * d2) * (c0 * c0 + c3 * c3)
    else:
        c0, c1, c2 = pp.C
        d0, d1 = pp.D
        total = (d0 * c1 - d1 * c0) ** 2 + (d0 * d0 + d1 * d1) * c2 * c2
    return abs(total - 1.0)
