"""The normalization/no-signaling constraints as an exact linear system.

Written over the flat probabilities p1..p16, the four per-block
normalization conditions and the eight marginal-equality conditions form a
system of 12 linear equations with integer coefficients.  Its coefficient
matrix has rank 8, so eight probabilities determine the rest: this module
fixes the split into the *free* octet {p1,p4,p5,p8,p9,p12,p14,p15} and the
*dependent* octet {p2,p3,p6,p7,p10,p11,p13,p16}, and solves the latter from
the former.

Two independent solution paths are provided: hand-transcribed closed forms
(:func:`solve_dependent`) and a generic rational elimination of the matrix
itself (:func:`solve_dependent_generic`).  They must always agree; keeping
both guards against transcription slips in either one.

Solved dependent values may fall outside [0, 1].  That is diagnostic
information about the free values, never an error: :func:`check_feasible`
reports it.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Mapping, Sequence

from .behavior import (
    Behavior,
    BehaviorFormatError,
    CheckResult,
    ConstraintReport,
    DEFAULT_TOLERANCE,
    OUTCOMES,
    SETTINGS,
    BLOCK_ORDER,
    flat_index,
)

FREE_POSITIONS = (1, 4, 5, 8, 9, 12, 14, 15)
DEPENDENT_POSITIONS = (2, 3, 6, 7, 10, 11, 13, 16)

SUBSTITUTION_TOLERANCE = 1e-12

# Closed-form solution of the system: each dependent entry equals
# (1 + sum of signed free entries) / 2, signs listed in FREE_POSITIONS order.
DEPENDENT_SOLUTION_SIGNS: dict[int, tuple[int, ...]] = {
    2: (-1, -1, +1, -1, -1, +1, +1, -1),
    3: (-1, -1, -1, +1, +1, -1, -1, +1),
    6: (+1, -1, -1, -1, -1, +1, +1, -1),
    7: (-1, +1, -1, -1, +1, -1, -1, +1),
    10: (-1, +1, +1, -1, -1, -1, +1, -1),
    11: (+1, -1, -1, +1, -1, -1, -1, +1),
    13: (-1, +1, +1, -1, +1, -1, -1, -1),
    16: (+1, -1, -1, +1, -1, +1, -1, -1),
}


def _octet_dict(cls, mapping: Mapping[str, float]):
    names = [f.name for f in fields(cls)]
    missing = [n for n in names if n not in mapping]
    if missing:
        raise BehaviorFormatError(f"missing entries: {', '.join(missing)}")
    extra = [k for k in mapping if k not in names]
    if extra:
        raise BehaviorFormatError(f"unknown entries: {', '.join(sorted(extra))}")
    return cls(**{n: float(mapping[n]) for n in names})


@dataclass(frozen=True, slots=True)
class FreeSet:
    """The eight free probabilities, in flat-position order."""

    p1: float
    p4: float
    p5: float
    p8: float
    p9: float
    p12: float
    p14: float
    p15: float

    @classmethod
    def constant(cls, value: float) -> "FreeSet":
        return cls(*([float(value)] * 8))

    @classmethod
    def from_dict(cls, mapping: Mapping[str, float]) -> "FreeSet":
        return _octet_dict(cls, mapping)

    @classmethod
    def from_json(cls, text: str) -> "FreeSet":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BehaviorFormatError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, Mapping):
            raise BehaviorFormatError("free-set JSON must be an object")
        return cls.from_dict(data)

    @classmethod
    def from_behavior(cls, behavior: Behavior) -> "FreeSet":
        return cls(*(behavior.p(i) for i in FREE_POSITIONS))

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f"p{i}") for i in FREE_POSITIONS)

    def to_dict(self) -> dict:
        return {f"p{i}": getattr(self, f"p{i}") for i in FREE_POSITIONS}


@dataclass(frozen=True, slots=True)
class DependentSet:
    """The eight dependent probabilities, in flat-position order."""

    p2: float
    p3: float
    p6: float
    p7: float
    p10: float
    p11: float
    p13: float
    p16: float

    @classmethod
    def from_dict(cls, mapping: Mapping[str, float]) -> "DependentSet":
        return _octet_dict(cls, mapping)

    @classmethod
    def from_behavior(cls, behavior: Behavior) -> "DependentSet":
        return cls(*(behavior.p(i) for i in DEPENDENT_POSITIONS))

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f"p{i}") for i in DEPENDENT_POSITIONS)

    def to_dict(self) -> dict:
        return {f"p{i}": getattr(self, f"p{i}") for i in DEPENDENT_POSITIONS}


@dataclass(frozen=True, slots=True)
class ConstraintMatrix:
    """The 12x16 integer coefficient matrix and its right-hand sides.

    Rows 1-4 are the block normalizations; rows 5-8 equate party A's
    outcome rates across B's setting choice; rows 9-12 do the same for
    party B.  Coefficients are -1, 0 or +1; the right-hand side is 1 for
    normalization rows and 0 otherwise.
    """

    rows: tuple[tuple[int, ...], ...]
    rhs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != 12 or len(self.rhs) != 12:
            raise ValueError("constraint system must have exactly 12 rows")
        if any(len(r) != 16 for r in self.rows):
            raise ValueError("constraint rows must have exactly 16 coefficients")
        if any(c not in (-1, 0, 1) for r in self.rows for c in r):
            raise ValueError("coefficients must be -1, 0 or +1")

    def residuals(self, probs: Sequence[float]) -> tuple[float, ...]:
        """Signed row residuals (row dot probs, minus the right-hand side)."""
        if len(probs) != 16:
            raise ValueError(f"expected 16 probabilities, got {len(probs)}")
        return tuple(
            sum(c * p for c, p in zip(row, probs)) - r
            for row, r in zip(self.rows, self.rhs)
        )


def build_matrix() -> ConstraintMatrix:
    """Construct the 12-row system in its canonical row order."""
    rows: list[tuple[int, ...]] = []
    rhs: list[int] = []
    for j, k in BLOCK_ORDER:
        row = [0] * 16
        for m in OUTCOMES:
            for n in OUTCOMES:
                row[flat_index(j, k, m, n)] = 1
        rows.append(tuple(row))
        rhs.append(1)
    for j in SETTINGS:  # A-side marginal equality, outcomes +1 then -1
        for m in OUTCOMES:
            row = [0] * 16
            for n in OUTCOMES:
                row[flat_index(j, 1, m, n)] = 1
                row[flat_index(j, 2, m, n)] = -1
            rows.append(tuple(row))
            rhs.append(0)
    for k in SETTINGS:  # B-side marginal equality
        for n in OUTCOMES:
            row = [0] * 16
            for m in OUTCOMES:
                row[flat_index(1, k, m, n)] = 1
                row[flat_index(2, k, m, n)] = -1
            rows.append(tuple(row))
            rhs.append(0)
    return ConstraintMatrix(tuple(rows), tuple(rhs))


@functools.cache
def _matrix() -> ConstraintMatrix:
    return build_matrix()


def rank(matrix: ConstraintMatrix | Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix, computed exactly.

    Uses fraction-free (Bareiss) Gaussian elimination over Python integers,
    so the result carries no floating-point tolerance.  Accepts either a
    :class:`ConstraintMatrix` or any rectangular integer matrix.
    """
    rows = matrix.rows if isinstance(matrix, ConstraintMatrix) else matrix
    m = [[int(c) for c in row] for row in rows]
    if not m:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    if any(len(r) != n_cols for r in m):
        raise ValueError("matrix rows must all have the same length")
    pivot_row = 0
    prev_pivot = 1
    for col in range(n_cols):
        pivot = next((r for r in range(pivot_row, n_rows) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[pivot_row], m[pivot] = m[pivot], m[pivot_row]
        for r in range(pivot_row + 1, n_rows):
            for c in range(col + 1, n_cols):
                # Bareiss update: the division by the previous pivot is exact.
                m[r][c] = (m[r][c] * m[pivot_row][col] - m[r][col] * m[pivot_row][c]) // prev_pivot
            m[r][col] = 0
        prev_pivot = m[pivot_row][col]
        pivot_row += 1
        if pivot_row == n_rows:
            break
    return pivot_row


@functools.cache
def _generic_solution_map() -> tuple[tuple[tuple[Fraction, ...], ...], tuple[Fraction, ...]]:
    """Affine map (coefficients, constants) for the dependent octet.

    Derived once by exact rational Gauss-Jordan elimination of the
    constraint matrix, treating the free entries as parameters on the
    right-hand side.  Independent of the transcribed closed forms.
    """
    m = _matrix()
    # Augmented rows: 8 dependent coefficients | 8 free coefficients | constant,
    # encoding (dependent part) = (constant + free part) per original row.
    aug: list[list[Fraction]] = []
    for row, rhs_val in zip(m.rows, m.rhs):
        dep = [Fraction(row[i - 1]) for i in DEPENDENT_POSITIONS]
        free = [Fraction(-row[i - 1]) for i in FREE_POSITIONS]
        aug.append(dep + free + [Fraction(rhs_val)])
    n_rows, n_dep = len(aug), 8
    pivot_row = 0
    pivot_cols: list[int] = []
    for col in range(n_dep):
        pivot = next((r for r in range(pivot_row, n_rows) if aug[r][col] != 0), None)
        if pivot is None:
            continue
        aug[pivot_row], aug[pivot] = aug[pivot], aug[pivot_row]
        inv = 1 / aug[pivot_row][col]
        aug[pivot_row] = [v * inv for v in aug[pivot_row]]
        for r in range(n_rows):
            if r != pivot_row and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [v - factor * pv for v, pv in zip(aug[r], aug[pivot_row])]
        pivot_cols.append(col)
        pivot_row += 1
    if len(pivot_cols) != n_dep:
        raise ArithmeticError("dependent block of the constraint system is rank deficient")
    for r in range(pivot_row, n_rows):
        if any(v != 0 for v in aug[r]):
            raise ArithmeticError("constraint system is inconsistent")
    coeffs = tuple(tuple(aug[r][n_dep:-1]) for r in range(n_dep))
    consts = tuple(aug[r][-1] for r in range(n_dep))
    return coeffs, consts


def solve_dependent_generic(free: FreeSet) -> DependentSet:
    """Solve the dependent octet by generic elimination of the matrix."""
    coeffs, consts = _generic_solution_map()
    u = free.as_tuple()
    values = tuple(
        float(const + sum(c * Fraction(x) for c, x in zip(row, u)))
        for row, const in zip(coeffs, consts)
    )
    return DependentSet(*values)


def combine(free: FreeSet, dependent: DependentSet) -> Behavior:
    """Assemble a full behavior from the two octets."""
    probs = [0.0] * 16
    for pos, v in zip(FREE_POSITIONS, free.as_tuple()):
        probs[pos - 1] = v
    for pos, v in zip(DEPENDENT_POSITIONS, dependent.as_tuple()):
        probs[pos - 1] = v
    return Behavior(tuple(probs))


def solve_dependent(free: FreeSet) -> DependentSet:
    """Solve the dependent octet from the free one via the closed forms.

    The combined 16-entry table is substituted back into all 12 rows; a
    residual above 1e-12 would mean the closed forms are wrong and raises
    ArithmeticError.  Out-of-range solved values are returned as-is.
    """
    u = free.as_tuple()
    values = tuple(
        0.5 * (1.0 + sum(s * x for s, x in zip(DEPENDENT_SOLUTION_SIGNS[pos], u)))
        for pos in DEPENDENT_POSITIONS
    )
    dependent = DependentSet(*values)
    residuals = _matrix().residuals(combine(free, dependent).probs)
    worst = max(abs(r) for r in residuals)
    if worst > SUBSTITUTION_TOLERANCE:
        raise ArithmeticError(
            f"solved table violates the constraint system (residual {worst:.3e})"
        )
    return dependent


def behavior_from_free_set(free: FreeSet) -> Behavior:
    """Complete a free octet into a full behavior."""
    return combine(free, solve_dependent(free))


def _subset_sum_checks(dependent: DependentSet, tol: float) -> list[CheckResult]:
    values = dependent.as_tuple()
    names = [f"p{i}" for i in DEPENDENT_POSITIONS]
    checks = []
    for mask in range(1, 1 << 8):
        members = [i for i in range(8) if mask >> i & 1]
        total = sum(values[i] for i in members)
        label = "+".join(names[i] for i in members)
        checks.append(CheckResult(f"{label} >= 0", max(0.0, -total), tol))
    return checks


def check_feasible(
    free: FreeSet,
    tol: float = DEFAULT_TOLERANCE,
    all_subset_sums: bool = False,
) -> ConstraintReport:
    """Check whether a free octet induces a physical table.

    Every free entry must already be a probability (raises ValueError
    otherwise).  The report covers the bound 0 <= pk <= 1 for each solved
    dependent entry plus the named sum constraints on the free entries:

    * p1+p8+p12+p14+p15 <= 1+p4+p5+p9  (the solved p13 is non-negative),
    * p1+p8 <= 1                        (the solved p2+p7 is non-negative),
    * the free total <= 4               (the solved total is non-negative),
    * 2*p13 - 1 <= p4+p5+p9             (the causal ceiling on p13).

    With ``all_subset_sums`` the report additionally demands non-negativity
    of every one of the 255 subset sums of the dependent octet.
    """
    u = free.as_tuple()
    for pos, v in zip(FREE_POSITIONS, u):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"free entry p{pos} = {v!r} is outside [0, 1]")
    dependent = solve_dependent(free)
    checks: list[CheckResult] = []
    for pos, v in zip(DEPENDENT_POSITIONS, dependent.as_tuple()):
        checks.append(CheckResult(f"bounds p{pos}", max(0.0, -v, v - 1.0), tol))
    lhs = free.p1 + free.p8 + free.p12 + free.p14 + free.p15
    rhs = 1.0 + free.p4 + free.p5 + free.p9
    checks.append(
        CheckResult("p1+p8+p12+p14+p15 <= 1+p4+p5+p9", max(0.0, lhs - rhs), tol)
    )
    checks.append(CheckResult("p1+p8 <= 1", max(0.0, free.p1 + free.p8 - 1.0), tol))
    checks.append(
        CheckResult("free total <= 4", max(0.0, sum(u) - 4.0), tol)
    )
    zeros_sum = free.p4 + free.p5 + free.p9
    checks.append(
        CheckResult(
            "2*p13-1 <= p4+p5+p9",
            max(0.0, 2.0 * dependent.p13 - 1.0 - zeros_sum),
            tol,
        )
    )
    if all_subset_sums:
        checks.extend(_subset_sum_checks(dependent, tol))
    return ConstraintReport(tuple(checks))
