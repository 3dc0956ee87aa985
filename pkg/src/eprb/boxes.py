"""Canonical behaviors and membership in the local deterministic polytope.

The sixteen local deterministic strategies (one fixed outcome per setting
and party) are the extreme points of the classical model class; any mixture
of them keeps the CHSH sum within [-2, 2].  This module constructs those
strategies plus the standard reference boxes, and decides locality by
solving a small linear program for the max-norm distance from a behavior
to the convex hull of the deterministic boxes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .behavior import (
    Behavior,
    CorrelationVector,
    DEFAULT_TOLERANCE,
    flat_index,
    validate,
)
from .linsys import DEPENDENT_POSITIONS, FREE_POSITIONS


@dataclass(frozen=True, slots=True)
class DeterministicAssignment:
    """Fixed outcomes (a1, a2, b1, b2) of one local deterministic strategy."""

    a1: int
    a2: int
    b1: int
    b2: int

    def __post_init__(self) -> None:
        for name in ("a1", "a2", "b1", "b2"):
            if getattr(self, name) not in (1, -1):
                raise ValueError(f"{name} must be +1 or -1")

    def outcome_a(self, setting: int) -> int:
        return self.a1 if setting == 1 else self.a2

    def outcome_b(self, setting: int) -> int:
        return self.b1 if setting == 1 else self.b2

    @staticmethod
    def all_assignments() -> tuple["DeterministicAssignment", ...]:
        return tuple(
            DeterministicAssignment(*values)
            for values in itertools.product((1, -1), repeat=4)
        )


def deterministic_box(assignment: DeterministicAssignment) -> Behavior:
    """Behavior of one deterministic strategy: probability 1 in each block
    on the outcome pair the assignment dictates."""
    probs = [0.0] * 16
    for j in (1, 2):
        for k in (1, 2):
            probs[flat_index(j, k, assignment.outcome_a(j), assignment.outcome_b(k))] = 1.0
    return Behavior(tuple(probs))


def uniform_box() -> Behavior:
    """All sixteen entries 1/4; every correlation vanishes."""
    return Behavior((0.25,) * 16)


def _split_box(free_value: float, dependent_value: float) -> Behavior:
    probs = [0.0] * 16
    for pos in FREE_POSITIONS:
        probs[pos - 1] = free_value
    for pos in DEPENDENT_POSITIONS:
        probs[pos - 1] = dependent_value
    return Behavior(tuple(probs))


def pr_box(variant: int = 1) -> Behavior:
    """The signaling-free box with the algebraically maximal CHSH sum.

    Variant 1 puts 1/2 on the eight free entries (CHSH sum +4); variant 2
    puts 1/2 on the dependent entries instead (CHSH sum -4).
    """
    if variant == 1:
        return _split_box(0.5, 0.0)
    if variant == 2:
        return _split_box(0.0, 0.5)
    raise ValueError(f"variant must be 1 or 2, got {variant}")


def quantum_extremal_box(variant: int = 1) -> Behavior:
    """The constant behavior saturating the quantum CHSH ceiling 2*sqrt(2).

    Variant 1 puts (2+sqrt(2))/8 on the free entries and the complementary
    value 1/2 - (2+sqrt(2))/8 on the dependent ones; variant 2 swaps the
    two, flipping the sign of the CHSH sum.
    """
    high = (2.0 + math.sqrt(2.0)) / 8.0
    low = 0.5 - high
    if variant == 1:
        return _split_box(high, low)
    if variant == 2:
        return _split_box(low, high)
    raise ValueError(f"variant must be 1 or 2, got {variant}")


@dataclass(frozen=True, slots=True)
class LocalityResult:
    """Locality verdict with supporting evidence.

    ``distance`` is the max-norm distance from the behavior to the convex
    hull of the sixteen deterministic boxes and ``weights`` the optimal
    mixture.  ``witness_expression``/``witness_value`` give the largest of
    the eight sign-symmetrized CHSH combinations; for a no-signaling
    behavior classified non-local the witness value exceeds 2.
    """

    is_local: bool
    distance: float
    weights: tuple[float, ...]
    witness_expression: str
    witness_value: float

    def to_dict(self) -> dict:
        return {
            "is_local": self.is_local,
            "distance": self.distance,
            "weights": list(self.weights),
            "witness_expression": self.witness_expression,
            "witness_value": self.witness_value,
        }


_CHSH_SIGN_PATTERNS = tuple(
    signs
    for signs in itertools.product((1, -1), repeat=4)
    if signs[0] * signs[1] * signs[2] * signs[3] == -1
)


def chsh_witness(behavior: Behavior) -> tuple[str, float]:
    """Largest of the eight sign-symmetrized CHSH combinations."""
    c = CorrelationVector.from_behavior(behavior)
    values = (c.c11, c.c12, c.c21, c.c22)
    labels = ("c(a1,b1)", "c(a1,b2)", "c(a2,b1)", "c(a2,b2)")
    best_expr, best_val = "", -math.inf
    for signs in _CHSH_SIGN_PATTERNS:
        total = sum(s * v for s, v in zip(signs, values))
        if total > best_val:
            best_val = total
            best_expr = " ".join(
                f"{'+' if s > 0 else '-'}{lab}" for s, lab in zip(signs, labels)
            )
    return best_expr, best_val


_PIVOT_EPS = 1e-11


def _simplex_min(tableau: np.ndarray, basis: list[int], allowed: np.ndarray) -> None:
    """Minimize the objective encoded in the last tableau row, in place.

    Dense textbook simplex with Bland's anti-cycling rule.  The last row
    carries the reduced costs with -(objective value) in its right-hand
    cell; ``allowed`` masks columns permitted to enter the basis (used to
    freeze artificial variables out of phase 2).
    """
    n_rows = tableau.shape[0] - 1
    while True:
        costs = tableau[-1, :-1]
        entering = -1
        for col in np.flatnonzero(allowed):
            if costs[col] < -_PIVOT_EPS:
                entering = int(col)
                break
        if entering < 0:
            return
        ratios = [
            (tableau[r, -1] / tableau[r, entering], basis[r], r)
            for r in range(n_rows)
            if tableau[r, entering] > _PIVOT_EPS
        ]
        if not ratios:
            raise ArithmeticError("locality feasibility program is unbounded")
        _, _, leaving = min(ratios)
        tableau[leaving] /= tableau[leaving, entering]
        for r in range(tableau.shape[0]):
            if r != leaving and tableau[r, entering] != 0.0:
                tableau[r] -= tableau[r, entering] * tableau[leaving]
        basis[leaving] = entering


def _max_norm_distance(target: np.ndarray) -> tuple[float, np.ndarray]:
    """Max-norm distance from ``target`` to the deterministic hull.

    Solves  min t  s.t.  |D'w - target|_inf <= t,  sum(w) = 1,  w >= 0
    with a self-contained two-phase simplex; the program has 17 structural
    unknowns and 33 rows, so no external solver is warranted.
    """
    det = np.array(
        [deterministic_box(d).probs for d in DeterministicAssignment.all_assignments()]
    )
    n_boxes = det.shape[0]
    t_col = n_boxes
    n_struct = n_boxes + 1
    n_slack = 32

    rows: list[np.ndarray] = []
    rhs: list[float] = []
    for c in range(16):  # D'w - t + slack_c = target_c
        row = np.zeros(n_struct + n_slack)
        row[:n_boxes] = det[:, c]
        row[t_col] = -1.0
        row[n_struct + c] = 1.0
        rows.append(row)
        rhs.append(float(target[c]))
    for c in range(16):  # D'w + t - surplus_c = target_c
        row = np.zeros(n_struct + n_slack)
        row[:n_boxes] = det[:, c]
        row[t_col] = 1.0
        row[n_struct + 16 + c] = -1.0
        rows.append(row)
        rhs.append(float(target[c]))
    row = np.zeros(n_struct + n_slack)  # mixture weights sum to 1
    row[:n_boxes] = 1.0
    rows.append(row)
    rhs.append(1.0)

    # Standard form needs non-negative right-hand sides; rows whose own
    # slack/surplus column is not +1 afterwards get an artificial variable.
    basis: list[int] = []
    art_rows: list[int] = []
    for i in range(len(rows)):
        if rhs[i] < 0:
            rows[i] = -rows[i]
            rhs[i] = -rhs[i]
        own = n_struct + i if i < n_slack else -1
        if own >= 0 and rows[i][own] == 1.0:
            basis.append(own)
        else:
            basis.append(-1)
            art_rows.append(i)

    n_cols = n_struct + n_slack + len(art_rows)
    tableau = np.zeros((len(rows) + 1, n_cols + 1))
    for i, (row, b) in enumerate(zip(rows, rhs)):
        tableau[i, : n_struct + n_slack] = row
        tableau[i, -1] = b
    for k, i in enumerate(art_rows):
        col = n_struct + n_slack + k
        tableau[i, col] = 1.0
        basis[i] = col

    allowed = np.ones(n_cols, dtype=bool)
    if art_rows:  # phase 1: drive the artificials to zero
        tableau[-1, n_struct + n_slack:n_cols] = 1.0
        for i in art_rows:
            tableau[-1] -= tableau[i]
        _simplex_min(tableau, basis, allowed)
        if tableau[-1, -1] < -1e-8:
            raise ArithmeticError("locality program reported infeasible")
        allowed[n_struct + n_slack:] = False

    # Phase 2: minimize t.
    tableau[-1, :] = 0.0
    tableau[-1, t_col] = 1.0
    for r, b in enumerate(basis):
        if tableau[-1, b] != 0.0:
            tableau[-1] -= tableau[-1, b] * tableau[r]
    _simplex_min(tableau, basis, allowed)

    solution = np.zeros(n_cols)
    for r, b in enumerate(basis):
        solution[b] = tableau[r, -1]
    return float(solution[t_col]), solution[:n_boxes]


def is_local(behavior: Behavior, tol: float = DEFAULT_TOLERANCE) -> LocalityResult:
    """Decide whether a behavior mixes from deterministic strategies.

    The behavior must pass :func:`validate` first (ValueError otherwise).
    It is classified local when its max-norm distance to the deterministic
    hull is within ``tol``.
    """
    report = validate(behavior, tol)
    if not report.all_passed:
        names = ", ".join(c.name for c in report.failures())
        raise ValueError(f"behavior fails validation ({names})")
    distance, weights = _max_norm_distance(np.array(behavior.probs))
    expr, value = chsh_witness(behavior)
    return LocalityResult(
        is_local=distance <= tol,
        distance=distance,
        weights=tuple(float(w) for w in weights),
        witness_expression=expr,
        witness_value=value,
    )
