"""LMMSE-criterion design: MM-based alternating training/pattern updates.

The design objective is g(S) = -Tr[R S (S^H R S + sigma^2 L I)^{-1} S^H R]
with S = (V kron I_K)(I_B kron X).  At an anchor S0 the convexity bound
gives the quadratic-plus-linear majorizer

    g(S; S0) = Tr[Xi0^H S^H R S Xi0] - 2 Re{Tr[Xi0 R S]} + sigma^2 L Tr[Xi0 Xi0^H],
    Xi0      = (S0^H R S0 + sigma^2 L I)^{-1} S0^H R,

which is majorized once more per block to decouple the variables:

  * training: per UE, minimize lambda2 B ||x_k||^2 - 2 Re{b_k^H x_k} under
    ||x_k||^2 <= P_k, solved in closed form (boundary or interior branch);
  * pattern: per entry, minimize lambda3 K |v|^2 - 2 Re{c_{m,n} v} over the
    reflection law, solved by the scalar phase search with q = lambda3 K and
    c = -c_{m,n}.

lambda2/lambda3 are spectral bounds computed by power iteration on the
Kronecker factors and inflated by a small safety margin so the majorization
survives numerical error.  Within one round the training step is anchored at
(X0, V0) and the pattern step reuses Xi0 with the freshly updated X.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from . import numerics
from .accel import squarem_step
from .baselines import naive_pattern
from .ls_design import (
    DEFAULT_EPS,
    DEFAULT_MAX_ITER_ACCEL,
    DEFAULT_MAX_ITER_PLAIN,
    dft_training,
    project_pattern,
)
from .phase_model import (
    DEFAULT_GRID_POINTS,
    ReflectionModel,
    minimize_phase_objectives,
    reflection_coefficient,
)
from .system import (
    ReflectionPattern,
    TrainingMatrix,
    lmmse_objective,
    mse_lmmse,
)
from .types import DesignTrace, SystemConfig

__all__ = [
    "LmmseSurrogateState",
    "SAFETY_MARGIN",
    "build_surrogate",
    "refresh_pattern_terms",
    "surrogate_value",
    "lmmse_objective",
    "update_training",
    "update_pattern",
    "project_training_rows",
    "design_lmmse",
]

# Multiplicative slack on the power-iteration eigenvalue estimates; keeps the
# quadratic bounds valid majorizers despite finite iteration tolerance.
SAFETY_MARGIN = 1.0001


@dataclass(frozen=True)
class LmmseSurrogateState:
    """Anchor-point quantities shared by the two block updates."""

    xi0: np.ndarray        # (tau*B, (M+1)*K)
    xi_gram: np.ndarray    # Xi0 Xi0^H, (tau*B, tau*B)
    lambda2: float
    lambda3: float
    b0: np.ndarray         # (tau*B, B*K) linear coefficients of the X step
    c0: np.ndarray         # (B*K, (M+1)*K) linear coefficients of the V step
    x0: TrainingMatrix
    v0: ReflectionPattern
    r_gamma: np.ndarray
    sigma2: float
    l: int


def _spectral_bound(a: np.ndarray) -> float:
    return numerics.largest_eigenvalue(a).value


def build_surrogate(
    x0: TrainingMatrix,
    v0: ReflectionPattern,
    r_gamma: np.ndarray,
    sigma2: float,
    l: int,
) -> LmmseSurrogateState:
    """Compute Xi0, the spectral bounds and both linear coefficient blocks."""
    k = x0.k
    b = v0.b
    vt0 = np.kron(v0.v, np.eye(k))          # ((M+1)K, BK)
    xt0 = np.kron(np.eye(b), x0.x)          # (BK, tau*B)
    s0 = vt0 @ xt0
    a0 = s0.conj().T @ r_gamma @ s0 + sigma2 * l * np.eye(s0.shape[1])
    xi0 = numerics.solve_hpd(a0, s0.conj().T @ r_gamma)
    xi_gram = xi0 @ xi0.conj().T

    m_v = vt0.conj().T @ r_gamma @ vt0      # (BK, BK)
    lambda2 = SAFETY_MARGIN * _spectral_bound(xi_gram) * _spectral_bound(m_v)
    b0 = lambda2 * xt0.conj().T - xi_gram @ xt0.conj().T @ m_v + xi0 @ r_gamma @ vt0

    lambda3, c0 = _pattern_terms(xt0, xi0, xi_gram, vt0, r_gamma)
    return LmmseSurrogateState(
        xi0=xi0, xi_gram=xi_gram, lambda2=lambda2, lambda3=lambda3,
        b0=b0, c0=c0, x0=x0, v0=v0, r_gamma=r_gamma, sigma2=sigma2, l=l,
    )


def _pattern_terms(xt, xi0, xi_gram, vt0, r_gamma):
    w = xt @ xi_gram @ xt.conj().T          # (BK, BK)
    lambda3 = SAFETY_MARGIN * _spectral_bound(w) * _spectral_bound(r_gamma)
    c0 = lambda3 * vt0.conj().T - w @ vt0.conj().T @ r_gamma + xt @ xi0 @ r_gamma
    return lambda3, c0


def refresh_pattern_terms(
    state: LmmseSurrogateState, x_new: TrainingMatrix
) -> LmmseSurrogateState:
    """Recompute lambda3/C0 with the updated training, keeping Xi0 and V0.

    This is the within-round refresh: the pattern step sees the new X while
    staying anchored at the round's Xi0, which preserves monotone descent.
    """
    b = state.v0.b
    xt = np.kron(np.eye(b), x_new.x)
    vt0 = np.kron(state.v0.v, np.eye(state.x0.k))
    lambda3, c0 = _pattern_terms(xt, state.xi0, state.xi_gram, vt0, state.r_gamma)
    return replace(state, lambda3=lambda3, c0=c0, x0=x_new)


def surrogate_value(state: LmmseSurrogateState, s: np.ndarray) -> float:
    """g(S; S0) of the first majorization, for domination/tangency checks."""
    quad = float(np.real(np.trace(
        state.xi0.conj().T @ s.conj().T @ state.r_gamma @ s @ state.xi0
    )))
    lin = -2.0 * float(np.real(np.trace(state.xi0 @ state.r_gamma @ s)))
    const = state.sigma2 * state.l * float(np.real(np.trace(state.xi_gram)))
    return quad + lin + const


def update_training(state: LmmseSurrogateState, power) -> TrainingMatrix:
    """Closed-form per-UE training update of the decoupled quadratic problem.

    b_k sums the conjugated diagonal (subframe) blocks of B0; the solution is
    sqrt(P_k) b_k / ||b_k|| on the power boundary when ||b_k|| exceeds
    sqrt(P_k) lambda2 B, and b_k / (lambda2 B) inside it.  A vanishing b_k
    keeps the previous training row.
    """
    power = np.asarray(power, dtype=float)
    tau, k = state.x0.tau, state.x0.k
    b = state.v0.b
    blocks = np.conj(state.b0).reshape(b, tau, b, k)
    b_sum = np.einsum("btbk->tk", blocks)    # (tau, K); column k is b_k
    x_new = np.empty((k, tau), dtype=complex)
    for uk in range(k):
        b_k = b_sum[:, uk]
        norm_b = np.linalg.norm(b_k)
        if norm_b == 0.0:
            x_new[uk] = state.x0.x[uk]
        elif norm_b > np.sqrt(power[uk]) * state.lambda2 * b:
            x_new[uk] = np.sqrt(power[uk]) / norm_b * b_k
        else:
            x_new[uk] = b_k / (state.lambda2 * b)
    return TrainingMatrix(x=x_new, power=power)


def update_pattern(
    state: LmmseSurrogateState,
    model: ReflectionModel,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> ReflectionPattern:
    """Entrywise pattern update of the decoupled quadratic problem."""
    k = state.x0.k
    b = state.v0.b
    m = state.v0.m
    blocks = state.c0.reshape(b, k, m + 1, k)
    c_mat = np.einsum("nkmk->mn", blocks)    # (M+1, B)
    qs = np.full(m * b, state.lambda3 * k)
    cs = -c_mat[:m].ravel()
    thetas, _ = minimize_phase_objectives(qs, cs, model, grid_points=grid_points)
    v_new = np.ones((m + 1, b), dtype=complex)
    v_new[:m] = reflection_coefficient(thetas, model).reshape(m, b)
    return ReflectionPattern(v=v_new)


def project_training_rows(x: np.ndarray, power) -> np.ndarray:
    """Scale every row to its power boundary sqrt(P_k) (zero rows stay zero)."""
    power = np.asarray(power, dtype=float)
    norms = np.linalg.norm(x, axis=1)
    scale = np.where(norms > 0.0, np.sqrt(power) / np.where(norms > 0, norms, 1.0), 0.0)
    return x * scale[:, None]


def design_lmmse(
    config: SystemConfig,
    model: ReflectionModel,
    r_gamma: np.ndarray,
    init_x: TrainingMatrix | None = None,
    init_v: ReflectionPattern | None = None,
    eps: float = DEFAULT_EPS,
    max_iter: int | None = None,
    accelerate: bool = False,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> tuple[TrainingMatrix, ReflectionPattern, DesignTrace]:
    """Alternate training and pattern updates until the MSE change is < eps.

    Defaults start from the DFT training and the naive projected-DFT
    pattern.  The trace records J_LMMSE per iteration (non-increasing) and
    the cumulative number of surrogate rebuilds; with accelerate=True each
    block update is wrapped in a monotone SQUAREM step with its own
    projection.
    """
    if init_x is None:
        init_x = dft_training(config.k, config.tau, config.power)
    if init_v is None:
        init_v = naive_pattern(config.m, config.b, model)
    if max_iter is None:
        max_iter = DEFAULT_MAX_ITER_ACCEL if accelerate else DEFAULT_MAX_ITER_PLAIN

    sigma2, l = config.sigma2, config.l
    power = config.power

    def mse_of(v: np.ndarray, x: np.ndarray) -> float:
        return mse_lmmse(np.kron(v, x), r_gamma, sigma2, l)

    trace = DesignTrace()
    start = time.perf_counter()
    rebuilds = 0
    x_cur, v_cur = init_x, init_v
    obj = mse_of(v_cur.v, x_cur.x)
    trace.record(obj, rebuilds, time.perf_counter() - start)

    for _ in range(max_iter):
        if accelerate:
            x_cur, obj_x, n_x = _accelerated_training_step(
                x_cur, v_cur, r_gamma, config, obj, grid_points
            )
            rebuilds += n_x
            v_cur, new_obj, n_v = _accelerated_pattern_step(
                x_cur, v_cur, r_gamma, config, model, obj_x, grid_points
            )
            rebuilds += n_v
        else:
            state = build_surrogate(x_cur, v_cur, r_gamma, sigma2, l)
            rebuilds += 1
            x_cur = update_training(state, power)
            state = refresh_pattern_terms(state, x_cur)
            v_cur = update_pattern(state, model, grid_points)
            new_obj = mse_of(v_cur.v, x_cur.x)
        trace.record(new_obj, rebuilds, time.perf_counter() - start)
        if abs(new_obj - obj) < eps * abs(obj):
            trace.converged = True
            break
        obj = new_obj
    return x_cur, v_cur, trace


def _accelerated_training_step(x_cur, v_cur, r_gamma, config, obj, grid_points):
    """SQUAREM-wrapped training block (pattern held fixed)."""
    counter = [0]

    def mm(x_arr: np.ndarray) -> np.ndarray:
        counter[0] += 1
        st = build_surrogate(
            TrainingMatrix(x=x_arr, power=config.power), v_cur,
            r_gamma, config.sigma2, config.l,
        )
        return update_training(st, config.power).x

    x_arr, obj_x, _ = squarem_step(
        x_cur.x,
        mm,
        project=lambda x: project_training_rows(x, config.power),
        objective=lambda x: mse_lmmse(np.kron(v_cur.v, x), r_gamma,
                                      config.sigma2, config.l),
        objective_v0=obj,
    )
    return TrainingMatrix(x=x_arr, power=config.power), obj_x, counter[0]


def _accelerated_pattern_step(x_cur, v_cur, r_gamma, config, model, obj, grid_points):
    """SQUAREM-wrapped pattern block (training held fixed)."""
    counter = [0]

    def mm(v_arr: np.ndarray) -> np.ndarray:
        counter[0] += 1
        st = build_surrogate(
            x_cur, ReflectionPattern(v=v_arr), r_gamma, config.sigma2, config.l
        )
        return update_pattern(st, model, grid_points).v

    v_arr, obj_v, _ = squarem_step(
        v_cur.v,
        mm,
        project=lambda v: project_pattern(v, model),
        objective=lambda v: mse_lmmse(np.kron(v, x_cur.x), r_gamma,
                                      config.sigma2, config.l),
        objective_v0=obj,
    )
    return ReflectionPattern(v=v_arr), obj_v, counter[0]
