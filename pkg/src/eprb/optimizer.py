"""Derivative-free searches for extremal quantum values.

All searches run over the planar model family: a Schmidt-form state
cos(theta)|00> + sin(theta)|11> with four measurement angles in the x-z
plane.  That family is rich enough to attain every extremum handled here
while keeping the search five-dimensional at most.  Local optimization is
simplex-reflection (Nelder-Mead); robustness comes from independent
restarts with seeded random starting points, so results are reproducible
bit for bit given the same configuration.

Constrained searches use penalty terms with an outer loop of increasing
weights.  Constraints pinning a probability to an interior target value
use a quadratic penalty.  Constraints forcing a probability to zero use
the probability itself as the penalty (the quadratic penalty applied to
its square root): joint probabilities vanish quadratically in the model
parameters, which makes the plain quadratic penalty quartic there and too
flat to reach tight residuals, while the square-root form is an exact
penalty once the weight clears the shadow price.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from typing import Callable, Literal, Mapping, Sequence

import numpy as np
from scipy.optimize import minimize

from .behavior import Behavior, chsh_delta
from .quantum import QuantumModel, behavior_from_model

SCHMIDT_ANGLE_MAX = math.pi / 4.0

StateClass = Literal["any", "product", "maximally_entangled"]

_STATE_CLASS_THETA: dict[str, float | None] = {
    "any": None,
    "product": 0.0,
    "maximally_entangled": SCHMIDT_ANGLE_MAX,
}

#: Residual level below which an equality constraint counts as satisfied.
HARDY_RESIDUAL_THRESHOLD = 1e-8
GHZ_RESIDUAL_THRESHOLD = 1e-6


@dataclass(frozen=True, slots=True)
class OptimizationConfig:
    """Search budget and reproducibility knobs.

    ``max_iters`` caps the function evaluations of each local simplex
    stage; ``tol`` is the objective convergence tolerance.  The penalty
    weight schedule starts at ``penalty_start`` and is multiplied by
    ``penalty_growth`` per outer iteration until ``penalty_cap``.
    """

    restarts: int = 32
    max_iters: int = 400
    tol: float = 1e-12
    seed: int = 0
    penalty_start: float = 1e3
    penalty_cap: float = 1e9
    penalty_growth: float = 2.0

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_iters < 10:
            raise ValueError("max_iters must be at least 10")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.penalty_start <= 0 or self.penalty_cap < self.penalty_start:
            raise ValueError("penalty weights must be positive and non-decreasing")
        if self.penalty_growth <= 1.0:
            raise ValueError("penalty_growth must exceed 1 so weights strictly increase")

    @classmethod
    def from_dict(cls, data: Mapping) -> "OptimizationConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "OptimizationConfig":
        data = json.loads(text)
        if not isinstance(data, Mapping):
            raise ValueError("config JSON must be an object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True, slots=True)
class OptimizationResult:
    """Best point found across all restarts.

    ``constraint_residuals`` maps each constrained entry to its absolute
    deviation from the target at the optimum.  ``converged`` is False when
    no restart produced a point satisfying every constraint within the
    operation's threshold (or, for unconstrained searches, when no local
    search terminated by its convergence criteria); the best point found
    is still reported.
    """

    objective: float
    model: QuantumModel
    behavior: Behavior
    constraint_residuals: dict[str, float]
    converged: bool
    evaluations: int
    restarts: int
    best_restart: int
    restart_objectives: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "converged": self.converged,
            "constraint_residuals": dict(self.constraint_residuals),
            "evaluations": self.evaluations,
            "restarts": self.restarts,
            "best_restart": self.best_restart,
            "restart_objectives": list(self.restart_objectives),
            "model": self.model.to_dict(),
            "behavior": self.behavior.to_dict(),
        }


@dataclass(frozen=True, slots=True)
class _Constraint:
    name: str
    position: int
    target: float
    kind: Literal["zero", "equal"]

    def penalty(self, value: float) -> float:
        if self.kind == "zero":
            return abs(value)
        return (value - self.target) ** 2

    def residual(self, value: float) -> float:
        return abs(value - self.target)


def _fold_schmidt_angle(raw: float) -> float:
    """Map an unconstrained parameter onto [0, pi/4] by reflection."""
    period = math.pi / 2.0
    u = raw % period
    return u if u <= SCHMIDT_ANGLE_MAX else period - u


def _model_from_params(x: np.ndarray, theta: float | None) -> QuantumModel:
    if theta is None:
        return QuantumModel.planar(_fold_schmidt_angle(x[0]), x[1], x[2], x[3], x[4])
    return QuantumModel.planar(theta, x[0], x[1], x[2], x[3])


def _nelder_mead(fun, x0: np.ndarray, maxfev: int, xatol: float, fatol: float, scale: float):
    simplex = np.tile(x0, (len(x0) + 1, 1))
    for i in range(len(x0)):
        simplex[i + 1, i] += scale
    return minimize(
        fun,
        x0,
        method="Nelder-Mead",
        options={
            "maxfev": maxfev,
            "xatol": xatol,
            "fatol": fatol,
            "initial_simplex": simplex,
        },
    )


def _search(
    objective: Callable[[Behavior], float],
    constraints: Sequence[_Constraint],
    theta: float | None,
    cfg: OptimizationConfig,
    residual_threshold: float,
    seeds: Sequence[Sequence[float]] = (),
) -> OptimizationResult:
    """Maximize ``objective`` over the planar family, multi-start."""
    n_params = 5 if theta is None else 4
    rng = np.random.default_rng(cfg.seed)

    def behavior_at(x: np.ndarray) -> Behavior:
        return behavior_from_model(_model_from_params(x, theta))

    def penalized(weight: float):
        def fun(x: np.ndarray) -> float:
            b = behavior_at(x)
            value = objective(b)
            penalty = sum(c.penalty(b.p(c.position)) for c in constraints)
            return -(value - weight * penalty)

        return fun

    starts: list[np.ndarray] = []
    for seed_point in seeds:
        point = np.asarray(seed_point, dtype=float)
        if point.shape != (n_params,):
            raise ValueError(f"seed points need {n_params} parameters")
        starts.append(point)
    while len(starts) < cfg.restarts:
        if theta is None:
            starts.append(
                np.concatenate(
                    [
                        rng.uniform(0.0, SCHMIDT_ANGLE_MAX, 1),
                        rng.uniform(0.0, 2.0 * math.pi, 4),
                    ]
                )
            )
        else:
            starts.append(rng.uniform(0.0, 2.0 * math.pi, 4))

    # Zero-kind penalties are exact once the weight clears the shadow price,
    # so their polish runs at a moderate weight: at the full cap the penalty's
    # own rounding noise (weight * eps) would drown the objective's curvature.
    zero_only = bool(constraints) and all(c.kind == "zero" for c in constraints)
    polish_weight = min(cfg.penalty_cap, 1e6) if zero_only else cfg.penalty_cap

    evaluations = 0
    records = []
    for index, start in enumerate(starts):
        x = start
        if constraints:
            weight = cfg.penalty_start
            scale = 0.4
            while True:
                # homotopy stages only track the optimum, terminating on
                # simplex collapse; large weights keep the value spread
                # above any fixed fatol, so that criterion stays off here
                res = _nelder_mead(
                    penalized(weight), x, cfg.max_iters, 1e-4, math.inf, scale
                )
                evaluations += res.nfev
                # per-stage movement shrinks with growing weight; size the
                # next warm-start simplex to match so stages stay cheap
                step = float(np.max(np.abs(res.x - x)))
                scale = min(0.05, max(4.0 * step, 1e-5))
                x = res.x
                if weight >= cfg.penalty_cap:
                    break
                weight = min(weight * cfg.penalty_growth, cfg.penalty_cap)
            # feasibility polish supplies the precision
            res = _nelder_mead(
                penalized(polish_weight),
                x,
                3 * cfg.max_iters,
                1e-11,
                min(cfg.tol * 1e-2, 1e-14),
                0.01,
            )
            x = res.x
            evaluations += res.nfev
        else:
            res = _nelder_mead(penalized(0.0), x, 2 * cfg.max_iters, 1e-9, cfg.tol, 0.5)
            x = res.x
            evaluations += res.nfev
            polish = _nelder_mead(
                penalized(0.0), x, 2 * cfg.max_iters, 1e-11, min(cfg.tol * 1e-2, 1e-14), 0.02
            )
            x = polish.x
            evaluations += polish.nfev
            res = polish

        # fresh evaluation at the final point, independent of search bookkeeping
        behavior = behavior_at(x)
        value = objective(behavior)
        evaluations += 1
        residuals = {c.name: c.residual(behavior.p(c.position)) for c in constraints}
        if constraints:
            feasible = all(r <= residual_threshold for r in residuals.values())
        else:
            feasible = bool(res.success)
        records.append((feasible, value, index, x, residuals))

    def better(rec, best):
        return (rec[0], rec[1]) > (best[0], best[1])

    best = records[0]
    for rec in records[1:]:
        if better(rec, best):
            best = rec
    feasible, value, index, x, residuals = best
    if constraints:
        # Deep-polish the winner: the objective is flat at a constrained
        # optimum, so entry-level accuracy needs more convergence than any
        # single restart is given.  For zero-kind constraints run a low
        # weight first (large weights amplify the constraint evaluation's
        # rounding into noise that hides the tangential curvature), then
        # re-pin feasibility with a simplex too small to drift.
        if zero_only:
            stages = (
                (min(cfg.penalty_cap, 1e5), 10 * cfg.max_iters, 1e-3),
                (min(cfg.penalty_cap, 1e8), 3 * cfg.max_iters, 1e-6),
            )
        else:
            stages = ((cfg.penalty_cap, 8 * cfg.max_iters, 1e-3),)
        xp = x
        for stage_weight, stage_maxfev, stage_scale in stages:
            res = _nelder_mead(
                penalized(stage_weight), xp, stage_maxfev, 1e-13, 1e-16, stage_scale
            )
            evaluations += res.nfev
            xp = res.x
        evaluations += 1
        behavior = behavior_at(xp)
        polished_value = objective(behavior)
        polished_residuals = {
            c.name: c.residual(behavior.p(c.position)) for c in constraints
        }
        polished_feasible = all(
            r <= residual_threshold for r in polished_residuals.values()
        )
        # The polish tightens the constraints, which may honestly lower the
        # raw objective by the slack it removes; reject it only when it
        # loses feasibility outright.
        if polished_feasible or not feasible:
            x = xp
            value = polished_value
            residuals = polished_residuals
            feasible = polished_feasible
    model = _model_from_params(x, theta)
    return OptimizationResult(
        objective=value,
        model=model,
        behavior=behavior_from_model(model),
        constraint_residuals=residuals,
        converged=feasible,
        evaluations=evaluations,
        restarts=len(starts),
        best_restart=index,
        restart_objectives=tuple(r[1] for r in records),
    )


def maximize_chsh(
    state_class: StateClass = "any", cfg: OptimizationConfig | None = None
) -> OptimizationResult:
    """Maximize the CHSH correlation sum over a class of pure states.

    The Schmidt angle is free for "any", pinned to 0 for "product" and to
    pi/4 for "maximally_entangled".  The respective ceilings are
    2*sqrt(2), 2 and 2*sqrt(2); the search approaches them from below
    since every evaluation is an actual quantum value.
    """
    if state_class not in _STATE_CLASS_THETA:
        raise ValueError(f"unknown state class {state_class!r}")
    cfg = cfg or OptimizationConfig()
    return _search(
        chsh_delta,
        (),
        _STATE_CLASS_THETA[state_class],
        cfg,
        residual_threshold=0.0,
    )


_HARDY_ZEROS = (("p4", 4), ("p5", 5), ("p9", 9))


def maximize_hardy(
    cfg: OptimizationConfig | None = None,
    theta: float | None = None,
    seeds: Sequence[Sequence[float]] = (),
) -> OptimizationResult:
    """Maximize the witness p13 subject to p4 = p5 = p9 = 0.

    With the Schmidt angle free the optimum is the golden-mean ceiling
    ~0.0901699; pass ``theta`` to restrict the search to one state.
    ``seeds`` prepends explicit starting points to the random restarts.
    """
    cfg = cfg or OptimizationConfig()
    constraints = tuple(
        _Constraint(name, pos, 0.0, "zero") for name, pos in _HARDY_ZEROS
    )
    return _search(
        lambda b: b.p(13),
        constraints,
        theta,
        cfg,
        residual_threshold=HARDY_RESIDUAL_THRESHOLD,
        seeds=seeds,
    )


def maximize_hardy_maxent(cfg: OptimizationConfig | None = None) -> OptimizationResult:
    """The witness search restricted to the maximally entangled state,
    where the constrained optimum collapses to zero."""
    return maximize_hardy(cfg, theta=SCHMIDT_ANGLE_MAX)


_GHZ_PINNED = (("p1", 1), ("p4", 4), ("p5", 5), ("p8", 8), ("p9", 9), ("p12", 12))


def ghz_impossibility(
    cfg: OptimizationConfig | None = None, constraint_target: float = 0.5
) -> OptimizationResult:
    """Maximize p14 + p15 with p1, p4, p5, p8, p9, p12 pinned to a target.

    At the default target 1/2 the first three correlations are forced to
    +1 and quantum mechanics then forces the fourth as well, so the
    optimum is numerically zero: no two-qubit analogue of an all-or-nothing
    multiparty contradiction exists.  Relaxed targets (say 0.45) leave
    room and the optimum becomes strictly positive.
    """
    cfg = cfg or OptimizationConfig()
    constraints = tuple(
        _Constraint(name, pos, constraint_target, "equal") for name, pos in _GHZ_PINNED
    )
    return _search(
        lambda b: b.p(14) + b.p(15),
        constraints,
        None,
        cfg,
        residual_threshold=GHZ_RESIDUAL_THRESHOLD,
    )


@dataclass(frozen=True, slots=True)
class ScanRow:
    """One row of a Schmidt-angle sweep of the witness search."""

    theta: float
    p13: float
    delta: float
    sigma: float
    status: str

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "p13": self.p13,
            "delta": self.delta,
            "sigma": self.sigma,
            "status": self.status,
        }


#: Flat positions of the complement sum reported by the scan.
_SIGMA_POSITIONS = (1, 8, 12, 14, 15)


def hardy_theta_scan(
    theta_min: float,
    theta_max: float,
    steps: int,
    cfg: OptimizationConfig | None = None,
) -> tuple[ScanRow, ...]:
    """Run the constrained witness search at fixed Schmidt angles.

    Sweeps ``steps`` equally spaced angles across [theta_min, theta_max],
    which must lie inside [0, pi/4].  Each row reports the best witness,
    the absolute CHSH sum and the complement sum at that angle; rows from
    searches that failed the residual threshold carry status
    "no-convergence" instead of "ok".
    """
    if steps < 2:
        raise ValueError("scan needs at least 2 steps")
    if not (0.0 <= theta_min < theta_max <= SCHMIDT_ANGLE_MAX + 1e-12):
        raise ValueError(
            f"scan range must satisfy 0 <= min < max <= pi/4, got [{theta_min}, {theta_max}]"
        )
    cfg = cfg or OptimizationConfig()
    rows = []
    for theta in np.linspace(theta_min, theta_max, steps):
        result = maximize_hardy(cfg, theta=float(theta))
        rows.append(
            ScanRow(
                theta=float(theta),
                p13=result.behavior.p(13),
                delta=abs(chsh_delta(result.behavior)),
                sigma=sum(result.behavior.p(i) for i in _SIGMA_POSITIONS),
                status="ok" if result.converged else "no-convergence",
            )
        )
    return tuple(rows)
