"""Two-qubit pure states measured by projective spin observables.

A :class:`QuantumModel` is a unit vector of four complex amplitudes over
the product basis |00>, |01>, |10>, |11> together with four measurement
directions, two per party, each a unit vector on the Bloch sphere.  The
observable measured along direction n has eigenvalues +1 and -1 with
rank-one eigenprojectors (I +/- n.sigma)/2; these are plain 2x2 complex
arrays here.  Joint outcome probabilities are quadratic forms of the state
in the product of one projector per party, which makes every generated
behavior normalized and free of signaling by construction.

Measurements on different parties act on different tensor factors, so
their projectors commute automatically; no separate compatibility
machinery is needed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Literal, Mapping

import numpy as np

from .behavior import Behavior, BehaviorFormatError, OUTCOMES, SETTINGS

NORM_TOLERANCE = 1e-12
IMAG_TOLERANCE = 1e-12

IDENTITY_2 = np.eye(2, dtype=complex)
#: Spin operator triple, stacked as (x, y, z).
PAULI = np.array(
    [
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, -1.0j], [1.0j, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ]
)

_SETTING_KEYS = ("a1", "a2", "b1", "b2")
_OUTCOME_SIGNS = np.array([1.0, -1.0])


def _pauli_dot(direction: np.ndarray) -> np.ndarray:
    dx, dy, dz = direction
    return np.array([[dz, dx - 1j * dy], [dx + 1j * dy, -dz]])


def bloch_projector(direction, outcome: int) -> np.ndarray:
    """Eigenprojector (I + outcome * n.sigma) / 2 of the spin observable
    along the unit Bloch vector ``n``."""
    if outcome not in OUTCOMES:
        raise ValueError(f"outcome must be +1 or -1, got {outcome}")
    direction = np.asarray(direction, dtype=float)
    return 0.5 * (IDENTITY_2 + outcome * _pauli_dot(direction))


@dataclass(frozen=True, eq=False)
class QuantumModel:
    """A two-qubit pure state plus the four measurement directions.

    Invariants are enforced at construction: the state has unit norm and
    every direction has unit Euclidean norm, both within 1e-12.  Instances
    are immutable (the arrays are marked read-only).
    """

    state: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray

    def __post_init__(self) -> None:
        # copy before freezing: marking a caller-owned array read-only
        # would be a visible side effect
        state = np.array(self.state, dtype=complex).reshape(-1)
        if state.shape != (4,):
            raise ValueError(f"state must have 4 amplitudes, got shape {state.shape}")
        norm = math.sqrt((state.real @ state.real) + (state.imag @ state.imag))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"state norm must be 1 within {NORM_TOLERANCE}, got {norm!r}")
        state.setflags(write=False)
        object.__setattr__(self, "state", state)
        for key in _SETTING_KEYS:
            d = np.array(getattr(self, key), dtype=float).reshape(-1)
            if d.shape != (3,):
                raise ValueError(f"direction {key} must have 3 components")
            norm = math.sqrt(d @ d)
            if abs(norm - 1.0) > NORM_TOLERANCE:
                raise ValueError(
                    f"direction {key} must be a unit vector within {NORM_TOLERANCE}, "
                    f"got norm {norm!r}"
                )
            d.setflags(write=False)
            object.__setattr__(self, key, d)

    def setting(self, side: Literal["a", "b"], index: int) -> np.ndarray:
        """Measurement direction of one party's setting (side "a" or "b")."""
        if side not in ("a", "b") or index not in SETTINGS:
            raise ValueError(f"no setting {side}{index}")
        return getattr(self, f"{side}{index}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def planar(
        cls, theta: float, a1: float, a2: float, b1: float, b2: float
    ) -> "QuantumModel":
        """Schmidt-form state cos(theta)|00> + sin(theta)|11> with all four
        measurement directions in the x-z plane, given by their polar angles.

        Every two-qubit pure state is locally equivalent to this form, and
        planar settings reach all the extremal values handled here, so this
        is the search space used by the optimizer.
        """
        state = np.array([math.cos(theta), 0.0, 0.0, math.sin(theta)], dtype=complex)

        def direction(angle: float) -> np.ndarray:
            return np.array([math.sin(angle), 0.0, math.cos(angle)])

        return cls(state, direction(a1), direction(a2), direction(b1), direction(b2))

    @classmethod
    def singlet(cls, a1=(0, 0, 1), a2=(0, 0, 1), b1=(0, 0, 1), b2=(0, 0, 1)) -> "QuantumModel":
        """The antisymmetric maximally entangled state (|01> - |10>)/sqrt(2)."""
        s = 1.0 / math.sqrt(2.0)
        state = np.array([0.0, s, -s, 0.0], dtype=complex)
        return cls(state, a1, a2, b1, b2)

    @classmethod
    def product(cls, state_a, state_b, a1, a2, b1, b2) -> "QuantumModel":
        """Tensor product of two single-qubit states."""
        sa = np.asarray(state_a, dtype=complex).reshape(2)
        sb = np.asarray(state_b, dtype=complex).reshape(2)
        return cls(np.kron(sa, sb), a1, a2, b1, b2)

    @classmethod
    def from_dict(cls, data: Mapping) -> "QuantumModel":
        try:
            re = data["state"]["re"]
            im = data["state"]["im"]
            settings = {k: data["settings"][k] for k in _SETTING_KEYS}
        except (KeyError, TypeError) as exc:
            raise BehaviorFormatError(f"malformed quantum model JSON: {exc!r}") from exc
        if len(re) != 4 or len(im) != 4:
            raise BehaviorFormatError("state needs re/im arrays of length 4")
        state = np.array(re, dtype=float) + 1j * np.array(im, dtype=float)
        return cls(state, *(settings[k] for k in _SETTING_KEYS))

    @classmethod
    def from_json(cls, text: str) -> "QuantumModel":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BehaviorFormatError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "state": {
                "re": [float(v) for v in self.state.real],
                "im": [float(v) for v in self.state.imag],
            },
            "settings": {k: [float(v) for v in getattr(self, k)] for k in _SETTING_KEYS},
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def joint_probability(
    model: QuantumModel, setting_a: int, setting_b: int, outcome_a: int, outcome_b: int
) -> float:
    """Probability of one joint outcome, as the quadratic form of the state
    in the tensor product of the two eigenprojectors.

    The form is real for Hermitian projectors; an imaginary part above
    1e-12 indicates numerical corruption and raises ArithmeticError.
    """
    pa = bloch_projector(model.setting("a", setting_a), outcome_a)
    pb = bloch_projector(model.setting("b", setting_b), outcome_b)
    amplitude = np.vdot(model.state, np.kron(pa, pb) @ model.state)
    if abs(amplitude.imag) > IMAG_TOLERANCE:
        raise ArithmeticError(
            f"joint probability has imaginary part {amplitude.imag!r}"
        )
    return float(amplitude.real)


def behavior_from_model(model: QuantumModel) -> Behavior:
    """Evaluate all sixteen joint probabilities as a :class:`Behavior`.

    Vectorized over settings and outcomes; agrees with
    :func:`joint_probability` entry by entry.  The result is normalized
    and signaling-free up to floating-point rounding.
    """
    directions = np.stack([model.a1, model.a2, model.b1, model.b2])
    spin = np.tensordot(directions, PAULI, axes=(1, 0))
    # proj[direction, outcome] with outcome order (+1, -1)
    proj = 0.5 * (IDENTITY_2 + _OUTCOME_SIGNS[None, :, None, None] * spin[:, None])
    proj_a, proj_b = proj[:2], proj[2:]

    m = model.state.reshape(2, 2)
    # table[t,m,s,n] = <psi| PA[t,m] (x) PB[s,n] |psi>
    g = m.conj() @ proj_b @ m.T
    table = np.tensordot(proj_a, g, axes=([2, 3], [2, 3]))
    worst_imag = float(np.max(np.abs(table.imag)))
    if worst_imag > IMAG_TOLERANCE:
        raise ArithmeticError(f"behavior has imaginary part {worst_imag!r}")
    return Behavior(tuple(table.real.transpose(0, 2, 1, 3).reshape(16)))


def marginal_from_model(
    model: QuantumModel, side: Literal["a", "b"], setting: int, outcome: int
) -> float:
    """Single-party outcome probability, evaluated without reference to the
    other party's measurement (projector tensored with the identity)."""
    p = bloch_projector(model.setting(side, setting), outcome)
    op = np.kron(p, IDENTITY_2) if side == "a" else np.kron(IDENTITY_2, p)
    amplitude = np.vdot(model.state, op @ model.state)
    if abs(amplitude.imag) > IMAG_TOLERANCE:
        raise ArithmeticError(f"marginal has imaginary part {amplitude.imag!r}")
    return float(amplitude.real)


def planar_parameters(model: QuantumModel) -> tuple[float, float, float, float, float]:
    """Recover (theta, a1, a2, b1, b2) from a model in planar form.

    Raises ValueError when the state is not real Schmidt form or a
    direction leaves the x-z plane.
    """
    s = model.state
    if abs(s[1]) > 1e-9 or abs(s[2]) > 1e-9 or float(np.max(np.abs(s.imag))) > 1e-9:
        raise ValueError("state is not in planar Schmidt form")
    theta = math.atan2(s[3].real, s[0].real)
    angles = []
    for key in _SETTING_KEYS:
        d = getattr(model, key)
        if abs(d[1]) > 1e-9:
            raise ValueError(f"direction {key} is not in the x-z plane")
        angles.append(math.atan2(d[0], d[2]))
    return (theta, angles[0], angles[1], angles[2], angles[3])


def random_model(rng: np.random.Generator | int | None = None) -> QuantumModel:
    """A Haar-ish random pure state with four random measurement directions."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    amplitudes = rng.normal(size=4) + 1j * rng.normal(size=4)
    state = amplitudes / np.linalg.norm(amplitudes)

    def direction() -> np.ndarray:
        while True:
            v = rng.normal(size=3)
            norm = np.linalg.norm(v)
            if norm > 1e-6:
                return v / norm

    return QuantumModel(state, direction(), direction(), direction(), direction())
