"""Joint-probability tables of two-setting, two-outcome bipartite experiments.

A :class:`Behavior` holds the sixteen joint probabilities p(a_j=m, b_k=n)
describing an experiment in which two distant parties, A and B, each choose
between two measurement settings (j, k = 1 or 2) with outcomes m, n = +1 or
-1.  Entries are kept in a fixed reading order: setting blocks (a1,b1),
(a1,b2), (a2,b1), (a2,b2), each block listing the outcome pairs (+,+),
(+,-), (-,+), (-,-).  The 1-based flat positions of this order give the
conventional names p1..p16 used by the JSON interfaces and throughout the
rest of the package.

On top of the raw table the module provides the physical sanity checks
(probability bounds, per-block normalization, independence of each party's
outcome rates from the remote setting choice) and the CHSH correlation
quantities.  Behaviors are immutable and are never clamped or renormalized:
a violated constraint must surface in a report, not be silently repaired.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

SETTINGS = (1, 2)
OUTCOMES = (1, -1)

#: (setting_a, setting_b) pairs in block reading order.
BLOCK_ORDER = ((1, 1), (1, 2), (2, 1), (2, 2))
#: (outcome_a, outcome_b) pairs in within-block reading order.
OUTCOME_ORDER = ((1, 1), (1, -1), (-1, 1), (-1, -1))

#: Flat 1-based entries whose doubled sum, minus 4, equals the CHSH sum for
#: any normalized behavior: the aligned-outcome pairs of blocks (a1,b1),
#: (a1,b2), (a2,b1) together with the anti-aligned pairs of block (a2,b2).
CHSH_SUM_POSITIONS = (1, 4, 5, 8, 9, 12, 14, 15)

DEFAULT_TOLERANCE = 1e-9
FORM_AGREEMENT_TOLERANCE = 1e-12


class BehaviorFormatError(ValueError):
    """A behavior value is structurally malformed.

    Raised for wrong entry counts, missing or unknown keys, and non-finite
    numbers.  Deliberately distinct from a *failed check*: a behavior that
    is structurally complete but violates a physical constraint is still
    constructed, and the violation is reported by :func:`validate`.
    """


def flat_index(setting_a: int, setting_b: int, outcome_a: int, outcome_b: int) -> int:
    """Map (j, k, m, n) to the 0-based position in reading order."""
    if setting_a not in SETTINGS or setting_b not in SETTINGS:
        raise ValueError(f"settings must be 1 or 2, got ({setting_a}, {setting_b})")
    if outcome_a not in OUTCOMES or outcome_b not in OUTCOMES:
        raise ValueError(f"outcomes must be +1 or -1, got ({outcome_a}, {outcome_b})")
    block = (setting_a - 1) * 2 + (setting_b - 1)
    cell = (0 if outcome_a == 1 else 2) + (0 if outcome_b == 1 else 1)
    return block * 4 + cell


def flat_name(position: int) -> str:
    """Conventional name ("p1".."p16") of a 1-based flat position."""
    if not 1 <= position <= 16:
        raise ValueError(f"flat position must be in 1..16, got {position}")
    return f"p{position}"


@dataclass(frozen=True, slots=True)
class Behavior:
    """Immutable table of the sixteen joint outcome probabilities.

    ``probs`` is the flat tuple in reading order (p1..p16).  Values are
    stored as given; entries outside [0, 1] are legal at construction so
    that diagnostics can be run on defective data.
    """

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.probs) != 16:
            raise BehaviorFormatError(
                f"behavior needs exactly 16 entries, got {len(self.probs)}"
            )
        values = tuple(float(v) for v in self.probs)
        for i, v in enumerate(values):
            if not math.isfinite(v):
                raise BehaviorFormatError(f"entry p{i + 1} is not finite: {v!r}")
        object.__setattr__(self, "probs", values)

    def p(self, position: int) -> float:
        """Entry by 1-based flat position (``b.p(13)`` is p13)."""
        if not 1 <= position <= 16:
            raise ValueError(f"flat position must be in 1..16, got {position}")
        return self.probs[position - 1]

    def prob(self, setting_a: int, setting_b: int, outcome_a: int, outcome_b: int) -> float:
        """Joint probability p(a_j = m, b_k = n)."""
        return self.probs[flat_index(setting_a, setting_b, outcome_a, outcome_b)]

    def block(self, setting_a: int, setting_b: int) -> tuple[float, float, float, float]:
        """The four entries of one setting pair, in outcome order ++, +-, -+, --."""
        start = flat_index(setting_a, setting_b, 1, 1)
        return self.probs[start:start + 4]

    # -- construction ------------------------------------------------------

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[float]]) -> "Behavior":
        """Build from four 4-entry blocks in reading order."""
        blocks = [tuple(b) for b in blocks]
        if len(blocks) != 4 or any(len(b) != 4 for b in blocks):
            raise BehaviorFormatError("expected 4 blocks of 4 entries each")
        return cls(tuple(v for b in blocks for v in b))

    @classmethod
    def from_flat_dict(cls, mapping: Mapping[str, float]) -> "Behavior":
        """Build from a mapping with keys "p1".."p16"."""
        missing = [flat_name(i) for i in range(1, 17) if flat_name(i) not in mapping]
        if missing:
            raise BehaviorFormatError(f"missing entries: {', '.join(missing)}")
        return cls(tuple(mapping[flat_name(i)] for i in range(1, 17)))

    @classmethod
    def from_dict(cls, data: Mapping) -> "Behavior":
        """Parse the JSON object form.

        The block form ``{"blocks": [{"pp","pm","mp","mm"}, ...]}`` is
        preferred; the flat form ``{"p1": ..., "p16": ...}`` is accepted as
        an alternative.  Block entries are ordered (a1,b1), (a1,b2),
        (a2,b1), (a2,b2).
        """
        if not isinstance(data, Mapping):
            raise BehaviorFormatError("behavior JSON must be an object")
        if "blocks" in data:
            blocks = data["blocks"]
            if not isinstance(blocks, (list, tuple)) or len(blocks) != 4:
                raise BehaviorFormatError('"blocks" must be a 4-element array')
            rows = []
            for i, blk in enumerate(blocks):
                if not isinstance(blk, Mapping):
                    raise BehaviorFormatError(f"block {i} must be an object")
                try:
                    rows.append((blk["pp"], blk["pm"], blk["mp"], blk["mm"]))
                except KeyError as exc:
                    raise BehaviorFormatError(
                        f"block {i} is missing outcome key {exc}"
                    ) from None
            return cls.from_blocks(rows)
        if any(flat_name(i) in data for i in range(1, 17)):
            return cls.from_flat_dict(data)
        raise BehaviorFormatError('behavior JSON needs "blocks" or flat "p1".."p16" keys')

    @classmethod
    def from_json(cls, text: str) -> "Behavior":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BehaviorFormatError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        """JSON object form: normative blocks plus the flat echo."""
        out: dict = {"blocks": []}
        for j, k in BLOCK_ORDER:
            pp, pm, mp, mm = self.block(j, k)
            out["blocks"].append({"pp": pp, "pm": pm, "mp": mp, "mm": mm})
        for i, v in enumerate(self.probs):
            out[flat_name(i + 1)] = v
        return out

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


@dataclass(frozen=True, slots=True)
class CheckResult:
    """Outcome of a single constraint check.

    ``residual`` is the magnitude of the violation (zero when satisfied);
    the check passes exactly when the residual is within tolerance.
    """

    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "residual": self.residual,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True, slots=True)
class ConstraintReport:
    """A batch of named constraint checks."""

    checks: tuple[CheckResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def to_dict(self) -> dict:
        return {
            "passed": self.all_passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def _bounds_residual(value: float) -> float:
    """Distance of a value from the interval [0, 1] (0 when inside)."""
    return max(0.0, -value, value - 1.0)


def validate(behavior: Behavior, tol: float = DEFAULT_TOLERANCE) -> ConstraintReport:
    """Check a behavior against all constraints a physical table must satisfy.

    The report holds one entry per check:

    * 16 bound checks, one per entry (inside [0, 1]);
    * 4 normalization checks, one per setting block (entries sum to 1);
    * 4 no-signaling checks.  The outcome rates of party A for setting a_j
      must not depend on whether B measured b1 or b2, and symmetrically for
      party B.  The residual of each check is the largest absolute
      difference between the two marginal sums over that party's outcomes.
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    checks: list[CheckResult] = []
    for i, v in enumerate(behavior.probs):
        checks.append(CheckResult(f"bounds {flat_name(i + 1)}", _bounds_residual(v), tol))
    for j, k in BLOCK_ORDER:
        total = sum(behavior.block(j, k))
        checks.append(CheckResult(f"normalization a{j}b{k}", abs(total - 1.0), tol))
    for j in SETTINGS:
        residual = max(
            abs(
                sum(behavior.prob(j, 1, m, n) for n in OUTCOMES)
                - sum(behavior.prob(j, 2, m, n) for n in OUTCOMES)
            )
            for m in OUTCOMES
        )
        checks.append(CheckResult(f"no-signaling a{j}", residual, tol))
    for k in SETTINGS:
        residual = max(
            abs(
                sum(behavior.prob(1, k, m, n) for m in OUTCOMES)
                - sum(behavior.prob(2, k, m, n) for m in OUTCOMES)
            )
            for n in OUTCOMES
        )
        checks.append(CheckResult(f"no-signaling b{k}", residual, tol))
    return ConstraintReport(tuple(checks))


def correlation(behavior: Behavior, setting_a: int, setting_b: int) -> float:
    """Expectation value of the outcome product for one setting pair.

    Equals p(+,+) + p(-,-) - p(+,-) - p(-,+) of the block; lies in [-1, 1]
    for any normalized block of probabilities.
    """
    pp, pm, mp, mm = behavior.block(setting_a, setting_b)
    return pp + mm - pm - mp


@dataclass(frozen=True, slots=True)
class CorrelationVector:
    """The four correlation functions of a behavior."""

    c11: float
    c12: float
    c21: float
    c22: float

    @classmethod
    def from_behavior(cls, behavior: Behavior) -> "CorrelationVector":
        return cls(
            c11=correlation(behavior, 1, 1),
            c12=correlation(behavior, 1, 2),
            c21=correlation(behavior, 2, 1),
            c22=correlation(behavior, 2, 2),
        )

    @property
    def chsh_sum(self) -> float:
        return self.c11 + self.c12 + self.c21 - self.c22

    def to_dict(self) -> dict:
        return {"c11": self.c11, "c12": self.c12, "c21": self.c21, "c22": self.c22}


def chsh_delta(behavior: Behavior, form_tol: float = FORM_AGREEMENT_TOLERANCE) -> float:
    """Signed CHSH sum of correlations c11 + c12 + c21 - c22.

    The value is computed twice: from the four correlation functions, and
    from the equivalent probability form 2*(p1+p4+p5+p8+p9+p12+p14+p15 - 2)
    which is valid for any normalized behavior.  Disagreement beyond
    ``form_tol`` means the input is not normalized and raises ValueError.

    Callers wanting the conventional unsigned statistic take ``abs()`` of
    the result.
    """
    from_correlations = CorrelationVector.from_behavior(behavior).chsh_sum
    from_sum = 2.0 * (sum(behavior.p(i) for i in CHSH_SUM_POSITIONS) - 2.0)
    if abs(from_correlations - from_sum) > form_tol:
        raise ValueError(
            "CHSH forms disagree "
            f"({from_correlations!r} vs {from_sum!r}): behavior is not normalized"
        )
    return from_correlations
