"""SQUAREM acceleration for monotone MM fixed-point updates.

One step takes two MM updates V1, V2 from the current point V0, forms the
differences L1 = V1 - V0, L2 = V2 - V1 - L1, picks the Cauchy-Barzilai-Borwein
step length l = -||L1||_F / ||L2||_F and extrapolates to

    V_cand = project(V0 - 2 l L1 + l^2 L2).

Back-tracking (l <- (l - 1)/2) keeps the objective monotone; l = -1 recovers
the plain MM point V2 when the projection is inactive.
"""

from __future__ import annotations

import time
from typing import Callable, NamedTuple

import numpy as np

from .types import DesignTrace

DEGENERATE_STEP_TOL = 1e-14
MAX_BACKTRACKS = 50

MmUpdate = Callable[[np.ndarray], np.ndarray]
Project = Callable[[np.ndarray], np.ndarray]
Objective = Callable[[np.ndarray], float]


class SquaremStep(NamedTuple):
    """Accepted iterate of one SQUAREM step plus its step statistics."""

    iterate: np.ndarray
    objective: float
    mm_calls: int
    step_length: float
    backtracks: int


def squarem_step(
    v0: np.ndarray,
    mm_update: MmUpdate,
    project: Project,
    objective: Objective,
    objective_v0: float | None = None,
    max_backtracks: int = MAX_BACKTRACKS,
) -> SquaremStep:
    """One monotone SQUAREM step.

    mm_update must be monotone for the objective and project idempotent.
    Near an MM fixed point (||L2||_F below DEGENERATE_STEP_TOL) the plain MM
    point V2 is returned directly; after max_backtracks halvings the step also
    falls back to V2, whose objective is safe by MM monotonicity.
    """
    v1 = mm_update(v0)
    v2 = mm_update(v1)
    l1 = v1 - v0
    l2 = v2 - v1 - l1
    norm_l2 = np.linalg.norm(l2)
    if norm_l2 < DEGENERATE_STEP_TOL:
        return SquaremStep(v2, objective(v2), 2, -1.0, 0)

    if objective_v0 is None:
        objective_v0 = objective(v0)
    step = -np.linalg.norm(l1) / norm_l2
    for tries in range(max_backtracks + 1):
        cand = project(v0 - 2.0 * step * l1 + step**2 * l2)
        obj = objective(cand)
        if obj <= objective_v0:
            return SquaremStep(cand, obj, 2, step, tries)
        step = (step - 1.0) / 2.0
    return SquaremStep(v2, objective(v2), 2, -1.0, max_backtracks + 1)


def accelerate(
    initial: np.ndarray,
    mm_update: MmUpdate,
    project: Project,
    objective: Objective,
    eps: float = 1e-3,
    max_iter: int = 100,
    max_backtracks: int = MAX_BACKTRACKS,
) -> tuple[np.ndarray, DesignTrace]:
    """Run SQUAREM steps until the relative objective change drops below eps.

    The trace is non-increasing by the back-tracking guarantee; converged is
    False when the budget runs out (the best iterate is still returned).
    """
    trace = DesignTrace()
    start = time.perf_counter()
    v = np.array(initial, dtype=complex)
    obj = objective(v)
    calls = 0
    trace.record(obj, calls, time.perf_counter() - start)
    for _ in range(max_iter):
        v, new_obj, used = squarem_step(
            v, mm_update, project, objective, objective_v0=obj,
            max_backtracks=max_backtracks,
        )
        calls += used
        trace.record(new_obj, calls, time.perf_counter() - start)
        if abs(new_obj - obj) < eps * abs(obj):
            trace.converged = True
            return v, trace
        obj = new_obj
    return v, trace
