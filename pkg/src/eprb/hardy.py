"""Nonlocality arguments built from one witness and three vanishing entries.

Each of the eight closed-form relations solving the no-signaling system
supports the same construction: force the three free entries that appear
with a positive sign to zero, and the dependent entry on the left-hand
side, the *witness*, is pinned by the remaining five free entries (the
*complement*).  A strictly positive witness then certifies nonlocality
without any inequality, while causality alone caps it at 1/2 and quantum
mechanics caps it at the fifth inverse power of the golden mean.

Under the three-zeros premise two identities follow from the defining
relation and hold in any signaling-free theory:

* |CHSH sum| = 2 + 4 * witness,
* complement sum = 1 - 2 * witness.

The second gives a direct experimental discriminator: a complement sum
below 1 - 2/tau^5 ~ 0.81966 is impossible for quantum states but allowed
by general signaling-free probability assignments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .behavior import Behavior, DEFAULT_TOLERANCE, chsh_delta, validate
from .linsys import DEPENDENT_SOLUTION_SIGNS, FREE_POSITIONS

GOLDEN_MEAN = (1.0 + math.sqrt(5.0)) / 2.0
#: Quantum ceiling on the witness probability (golden mean to the -5).
QUANTUM_WITNESS_MAX = GOLDEN_MEAN ** -5
#: Causal ceiling on the witness probability.
CAUSAL_WITNESS_MAX = 0.5

QUANTUM_CONSISTENT = "quantum-consistent"
GENERAL_PROBABILISTIC_ONLY = "general-probabilistic-only"
INFEASIBLE = "infeasible"


@dataclass(frozen=True, slots=True)
class HardySet:
    """One witness/zero-target quadruple supporting the argument.

    ``witness`` is the dependent entry of the underlying relation;
    ``zero_targets`` are its three positive-sign free entries and
    ``complement`` the five negative-sign ones.  Names are flat entry
    names ("p1".."p16"); sets are identified by their witness, which is
    unique across the eight.
    """

    witness: str
    zero_targets: tuple[str, str, str]
    complement: tuple[str, str, str, str, str]

    @property
    def members(self) -> tuple[str, str, str, str]:
        return self.zero_targets + (self.witness,)

    def to_dict(self) -> dict:
        return {
            "witness": self.witness,
            "zero_targets": list(self.zero_targets),
            "complement": list(self.complement),
        }


def _position(name: str) -> int:
    return int(name[1:])


def hardy_sets() -> tuple[HardySet, ...]:
    """All eight sets, read off the closed-form solution signs and ordered
    by witness position."""
    sets = []
    for dep_pos in sorted(DEPENDENT_SOLUTION_SIGNS):
        signs = DEPENDENT_SOLUTION_SIGNS[dep_pos]
        zeros = tuple(f"p{i}" for s, i in zip(signs, FREE_POSITIONS) if s > 0)
        complement = tuple(f"p{i}" for s, i in zip(signs, FREE_POSITIONS) if s < 0)
        sets.append(HardySet(f"p{dep_pos}", zeros, complement))
    return tuple(sets)


def set_for_witness(witness: str) -> HardySet:
    for hs in hardy_sets():
        if hs.witness == witness:
            return hs
    raise KeyError(f"no Hardy set has witness {witness!r}")


@dataclass(frozen=True, slots=True)
class HardyReport:
    """Numeric outcome of analyzing one behavior against one set.

    ``premises_ok`` records whether the three zero targets vanish within
    tolerance; the identity residuals and the classification are only
    physically meaningful in that case, but the numbers are always filled
    in.  Classification thresholds: the witness is quantum-consistent up
    to the golden-mean ceiling (a necessary condition only; this test
    alone does not certify membership in the quantum set), then attainable
    only by more general signaling-free assignments up to 1/2, and
    infeasible beyond.
    """

    set_id: str
    premises_ok: bool
    zero_residual: float
    witness: float
    causal_bound_residual: float
    delta_abs: float
    delta_identity_residual: float
    sigma: float
    sigma_identity_residual: float
    classification: str
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "set": self.set_id,
            "premises_ok": self.premises_ok,
            "zero_residual": self.zero_residual,
            "witness": self.witness,
            "causal_bound_residual": self.causal_bound_residual,
            "delta_abs": self.delta_abs,
            "delta_identity_residual": self.delta_identity_residual,
            "sigma": self.sigma,
            "sigma_identity_residual": self.sigma_identity_residual,
            "classification": self.classification,
            "tolerance": self.tolerance,
        }


def classify_witness(witness: float, tol: float = DEFAULT_TOLERANCE) -> str:
    """Theory class a witness value is compatible with (monotone in the
    witness: raising it never moves the class back toward quantum)."""
    if witness > CAUSAL_WITNESS_MAX + tol:
        return INFEASIBLE
    if witness > QUANTUM_WITNESS_MAX + tol:
        return GENERAL_PROBABILISTIC_ONLY
    return QUANTUM_CONSISTENT


def analyze(behavior: Behavior, hardy_set: HardySet, tol: float = DEFAULT_TOLERANCE) -> HardyReport:
    """Evaluate the witness, the causal bound, and the two identities.

    The behavior must pass :func:`validate` (ValueError otherwise).  When
    the zero targets do not vanish within ``tol`` the report is marked
    ``premises_ok=False`` and the identity residuals are merely recorded.
    """
    report = validate(behavior, tol)
    if not report.all_passed:
        names = ", ".join(c.name for c in report.failures())
        raise ValueError(f"behavior fails validation ({names})")
    zeros = [behavior.p(_position(name)) for name in hardy_set.zero_targets]
    zero_residual = max(abs(z) for z in zeros)
    witness = behavior.p(_position(hardy_set.witness))
    delta_abs = abs(chsh_delta(behavior))
    sigma = sum(behavior.p(_position(name)) for name in hardy_set.complement)
    return HardyReport(
        set_id=hardy_set.witness,
        premises_ok=zero_residual <= tol,
        zero_residual=zero_residual,
        witness=witness,
        causal_bound_residual=max(0.0, -witness, witness - CAUSAL_WITNESS_MAX),
        delta_abs=delta_abs,
        delta_identity_residual=abs(delta_abs - (2.0 + 4.0 * witness)),
        sigma=sigma,
        sigma_identity_residual=abs(sigma - (1.0 - 2.0 * witness)),
        classification=classify_witness(witness, tol),
        tolerance=tol,
    )


def analyze_all(behavior: Behavior, tol: float = DEFAULT_TOLERANCE) -> tuple[HardyReport, ...]:
    return tuple(analyze(behavior, hs, tol) for hs in hardy_sets())


def ch_inequality(behavior: Behavior, hardy_set: HardySet) -> float:
    """Witness minus the sum of its zero targets.

    Non-positive for every local model; a positive value is the amount by
    which the behavior violates the single-probability (CH-style) form of
    the argument.  When the zero targets vanish, the normalized CHSH
    violation (|CHSH sum| - 2) / 2 equals exactly twice this quantity.
    """
    zeros_sum = sum(behavior.p(_position(name)) for name in hardy_set.zero_targets)
    return behavior.p(_position(hardy_set.witness)) - zeros_sum
