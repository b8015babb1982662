"""Seeded Monte Carlo experiment harness over schemes, estimators and SNRs.

Designs are deterministic given a configuration, so each (scheme, SNR) cell
is designed once and reused across trials; channel and noise draws use
per-(SNR, trial) seed streams shared by all schemes (common random numbers).
Output rows are emitted in deterministic (scheme, SNR, trial) order.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import system
from .baselines import (
    ElementGrouping,
    SchemeId,
    group_reduce,
    naive_pattern,
    onoff_pattern,
)
from .channel import (
    CorrelationSpec,
    cascaded_channel,
    cascaded_correlation,
    grouped_cascaded_correlation,
    sample_channels,
)
from .errors import ConfigError, RisceError
from .lmmse_design import design_lmmse
from .ls_design import design_ls, dft_training, project_pattern
from .phase_model import ReflectionModel, ideal_model
from .system import ReflectionPattern, TrainingMatrix, build_S
from .types import SystemConfig

# Defaults are the desk-scale profile; Table-I scale is available via the
# CLI's --profile paper.
PAPER_PROFILE = dict(k=4, m=20, l=16, trials=50)

ESTIMATORS = ("ls", "lmmse")


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one experiment run (desk-scale defaults)."""

    k: int = 2
    m: int = 8
    l: int = 4
    b: int | None = None
    tau: int | None = None
    sigma2: float = 1.0
    snr_db: tuple[float, ...] = (-5.0, 0.0, 5.0, 10.0)
    trials: int = 50
    seed: int = 0
    beta_min: float = 0.2
    alpha: float = 2.0
    delta: float = 0.43 * np.pi
    psi_ue: float = 0.2
    psi_ris: float = 0.4
    psi_bs: float = 0.6
    schemes: tuple[SchemeId, ...] = (
        SchemeId.PROPOSED,
        SchemeId.IDEAL_RIS,
        SchemeId.IDEAL_RIS_PROJECTION,
        SchemeId.NAIVE,
        SchemeId.ON_OFF,
    )
    estimator: str = "ls"
    eps: float = 1e-3
    max_iter: int | None = None
    accelerate: bool = True
    grid_points: int = 1024
    rho: int = 1
    simulate: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if self.b is None:
            object.__setattr__(self, "b", self.m + 1)
        if self.tau is None:
            object.__setattr__(self, "tau", self.k)
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"estimator must be one of {ESTIMATORS}, got {self.estimator!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.snr_db:
            raise ConfigError("snr_db must not be empty")
        if self.b < self.m + 1:
            raise ConfigError(f"b must be >= m + 1 ({self.b} < {self.m + 1})")
        if self.tau < self.k:
            raise ConfigError(f"tau must be >= k ({self.tau} < {self.k})")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if SchemeId.ON_OFF in self.schemes and self.b != self.m + 1:
            raise ConfigError("the on-off scheme requires b == m + 1")
        if SchemeId.PROPOSED_GROUPED in self.schemes and (
            self.rho < 1 or self.m % self.rho != 0
        ):
            raise ConfigError(f"rho={self.rho} must be a positive divisor of m={self.m}")

    @property
    def model(self) -> ReflectionModel:
        return ReflectionModel(beta_min=self.beta_min, alpha=self.alpha, delta=self.delta)

    @property
    def corr(self) -> CorrelationSpec:
        return CorrelationSpec(psi_ue=self.psi_ue, psi_ris=self.psi_ris, psi_bs=self.psi_bs)

    def power(self, snr_db: float) -> np.ndarray:
        """Per-UE budgets at a given SNR (identical across UEs)."""
        return np.full(self.k, 10.0 ** (snr_db / 10.0) * self.sigma2)

    def system(self, snr_db: float) -> SystemConfig:
        return SystemConfig(
            k=self.k, m=self.m, l=self.l, b=self.b, tau=self.tau,
            sigma2=self.sigma2, power=self.power(snr_db),
        )


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    estimator: str
    snr_db: float
    trial: int
    analytic_nmse: float
    empirical_nmse: float | None
    iterations: int
    wall_ms: float


RESULT_COLUMNS = (
    "scheme", "estimator", "snr_db", "trial",
    "analytic_nmse", "empirical_nmse", "iterations", "wall_ms",
)


@dataclass(frozen=True)
class CellDesign:
    """Designed (X, V) plus bookkeeping for one (scheme, SNR) cell."""

    training: TrainingMatrix
    pattern: ReflectionPattern
    iterations: int
    wall_ms: float
    r_gamma: np.ndarray
    grouping: ElementGrouping | None = None

    @property
    def s(self) -> np.ndarray:
        return build_S(self.pattern, self.training)


def _design_cell(
    scheme: SchemeId,
    cfg: ExperimentConfig,
    snr_db: float,
    r_gamma: np.ndarray,
    ls_pattern_cache: dict | None = None,
) -> CellDesign:
    """Design (X, V) for one scheme at one SNR.

    For the LS estimator the pattern objective Tr[(V V^H)^{-1}] does not
    depend on the power budgets, so designed patterns are cached across SNRs
    (ls_pattern_cache maps scheme -> (pattern, iterations)).
    """
    sys_cfg = cfg.system(snr_db)
    model = cfg.model
    start = time.perf_counter()
    grouping = None

    if scheme is SchemeId.NAIVE:
        x = dft_training(cfg.k, cfg.tau, sys_cfg.power)
        v = naive_pattern(cfg.m, cfg.b, model)
        iters = 0
    elif scheme is SchemeId.ON_OFF:
        x = dft_training(cfg.k, cfg.tau, sys_cfg.power)
        v = onoff_pattern(cfg.m, cfg.b)
        iters = 0
    elif scheme is SchemeId.PROPOSED_GROUPED:
        grouping = group_reduce(cfg.m, cfg.rho)
        sys_g = SystemConfig(
            k=cfg.k, m=grouping.m_grouped, l=cfg.l, b=grouping.m_grouped + 1,
            tau=cfg.tau, sigma2=cfg.sigma2, power=sys_cfg.power,
        )
        r_g = grouped_cascaded_correlation(cfg.corr, grouping.indicator(), cfg.k, cfg.l)
        x, v, iters = _run_design(cfg, sys_g, model, r_g, scheme, ls_pattern_cache)
        r_gamma = r_g
    else:
        design_model = model if scheme is SchemeId.PROPOSED else ideal_model()
        x, v, iters = _run_design(cfg, sys_cfg, design_model, r_gamma,
                                  scheme, ls_pattern_cache)
        if scheme is SchemeId.IDEAL_RIS_PROJECTION:
            v = ReflectionPattern(v=project_pattern(v.v, model))

    wall_ms = (time.perf_counter() - start) * 1e3
    return CellDesign(
        training=x, pattern=v, iterations=iters, wall_ms=wall_ms,
        r_gamma=r_gamma, grouping=grouping,
    )


def _run_design(cfg, sys_cfg, model, r_gamma, scheme=None, ls_pattern_cache=None):
    if cfg.estimator == "ls":
        if ls_pattern_cache is not None and scheme in ls_pattern_cache:
            v, iters = ls_pattern_cache[scheme]
        else:
            v, trace = design_ls(
                sys_cfg, model, eps=cfg.eps, max_iter=cfg.max_iter,
                accelerate=cfg.accelerate, grid_points=cfg.grid_points,
            )
            iters = trace.iterations
            if ls_pattern_cache is not None:
                ls_pattern_cache[scheme] = (v, iters)
        x = dft_training(sys_cfg.k, sys_cfg.tau, sys_cfg.power)
        return x, v, iters
    x, v, trace = design_lmmse(
        sys_cfg, model, r_gamma, eps=cfg.eps, max_iter=cfg.max_iter,
        accelerate=cfg.accelerate, grid_points=cfg.grid_points,
    )
    return x, v, trace.iterations


def _analytic_nmse(cell: CellDesign, cfg: ExperimentConfig) -> float:
    s = cell.s
    m_eff = cell.grouping.m_grouped if cell.grouping else cfg.m
    if cfg.estimator == "ls":
        j = system.mse_ls(s, cfg.sigma2, cfg.l)
    else:
        j = system.mse_lmmse(s, cell.r_gamma, cfg.sigma2, cfg.l)
    return system.nmse(j, cfg.l, cfg.k, m_eff)


def _empirical_nmse(
    cell: CellDesign, cfg: ExperimentConfig, snr_index: int, trial: int
) -> float:
    ch_seed = np.random.SeedSequence([cfg.seed, snr_index, trial, 0])
    noise_seed = np.random.SeedSequence([cfg.seed, snr_index, trial, 1])
    realization = sample_channels(ch_seed, cfg.system(cfg.snr_db[snr_index]), cfg.corr)
    gamma = cascaded_channel(realization)
    if cell.grouping is not None:
        gamma = cell.grouping.combine_gamma(gamma, cfg.k)
    s = cell.s
    y = system.simulate_reception(gamma, s, cfg.sigma2, noise_seed)
    if cfg.estimator == "ls":
        gamma_hat = system.estimate_ls(y, s)
    else:
        gamma_hat = system.estimate_lmmse(y, s, cell.r_gamma, cfg.sigma2, cfg.l)
    m_eff = cell.grouping.m_grouped if cell.grouping else cfg.m
    err = float(np.sum(np.abs(gamma_hat - gamma) ** 2))
    return system.nmse(err, cfg.l, cfg.k, m_eff)


def run_sweep(cfg: ExperimentConfig) -> list[ResultRow]:
    """Design, evaluate and (optionally) simulate every (scheme, SNR) cell.

    Returns rows sorted by (scheme order, SNR order, trial).  The analytic
    NMSE of every scheme is checked to be monotone non-increasing in SNR.
    """
    r_gamma = cascaded_correlation(cfg.corr, cfg.m, cfg.k, cfg.l)
    rows: list[ResultRow] = []
    ls_pattern_cache: dict = {}
    for scheme in cfg.schemes:
        analytic_by_snr: list[tuple[float, float]] = []
        for si, snr_db in enumerate(cfg.snr_db):
            cell = _design_cell(scheme, cfg, snr_db, r_gamma, ls_pattern_cache)
            analytic = _analytic_nmse(cell, cfg)
            analytic_by_snr.append((snr_db, analytic))
            if cfg.simulate:
                for trial in range(cfg.trials):
                    emp = _empirical_nmse(cell, cfg, si, trial)
                    rows.append(ResultRow(
                        scheme.value, cfg.estimator, snr_db, trial,
                        analytic, emp, cell.iterations, cell.wall_ms,
                    ))
            else:
                rows.append(ResultRow(
                    scheme.value, cfg.estimator, snr_db, 0,
                    analytic, None, cell.iterations, cell.wall_ms,
                ))
        _check_snr_monotonicity(scheme, analytic_by_snr)
    return rows


def _check_snr_monotonicity(scheme: SchemeId, pairs: list[tuple[float, float]]) -> None:
    ordered = sorted(pairs)
    for (snr_a, nmse_a), (snr_b, nmse_b) in zip(ordered, ordered[1:]):
        if nmse_b > nmse_a * (1.0 + 1e-9):
            raise RisceError(
                f"analytic NMSE of {scheme.value} increased from SNR "
                f"{snr_a} dB ({nmse_a:.6g}) to {snr_b} dB ({nmse_b:.6g})"
            )


@dataclass(frozen=True)
class ConvergenceRow:
    variant: str
    iteration: int
    objective: float
    updates: int
    wall_ms: float


CONVERGENCE_COLUMNS = ("variant", "iteration", "objective", "updates", "wall_ms")


def run_convergence(cfg: ExperimentConfig) -> list[ConvergenceRow]:
    """Plain-MM and accelerated traces of the proposed design at the first SNR."""
    snr_db = cfg.snr_db[0]
    sys_cfg = cfg.system(snr_db)
    r_gamma = cascaded_correlation(cfg.corr, cfg.m, cfg.k, cfg.l)
    rows: list[ConvergenceRow] = []
    for variant, accelerate in (("mm", False), ("accelerated", True)):
        if cfg.estimator == "ls":
            _, trace = design_ls(
                sys_cfg, cfg.model, eps=cfg.eps, max_iter=cfg.max_iter,
                accelerate=accelerate, grid_points=cfg.grid_points,
            )
        else:
            _, _, trace = design_lmmse(
                sys_cfg, cfg.model, r_gamma, eps=cfg.eps, max_iter=cfg.max_iter,
                accelerate=accelerate, grid_points=cfg.grid_points,
            )
        for i, obj in enumerate(trace.objectives):
            rows.append(ConvergenceRow(
                variant, i, obj, trace.update_calls[i], trace.elapsed_s[i] * 1e3,
            ))
    return rows


@dataclass(frozen=True)
class DesignDumpRow:
    matrix: str
    row: int
    col: int
    re: float
    im: float


DESIGN_COLUMNS = ("matrix", "row", "col", "re", "im")


def run_design_dump(cfg: ExperimentConfig) -> list[DesignDumpRow]:
    """Designed (X, V) of the first scheme at the first SNR, in long format."""
    r_gamma = cascaded_correlation(cfg.corr, cfg.m, cfg.k, cfg.l)
    cell = _design_cell(cfg.schemes[0], cfg, cfg.snr_db[0], r_gamma)
    rows: list[DesignDumpRow] = []
    for name, mat in (("V", cell.pattern.v), ("X", cell.training.x)):
        for (i, j), val in np.ndenumerate(mat):
            rows.append(DesignDumpRow(name, i, j, float(val.real), float(val.imag)))
    return rows


def run_validation(cfg: ExperimentConfig) -> list[tuple[str, bool, str]]:
    """Spot-check the core identities and invariants at the config's scale.

    Returns (name, passed, detail) triples; used by the `validate` subcommand.
    """
    from . import phase_model

    checks: list[tuple[str, bool, str]] = []
    rng = np.random.default_rng(cfg.seed)
    model = cfg.model
    sys_cfg = cfg.system(cfg.snr_db[0])
    r_gamma = cascaded_correlation(cfg.corr, cfg.m, cfg.k, cfg.l)

    def add(name: str, passed: bool, detail: str = "") -> None:
        checks.append((name, bool(passed), detail))

    # Gram factorization of the effective training.
    worst = 0.0
    for _ in range(20):
        v = _random_feasible_pattern(rng, cfg.m, cfg.b, model)
        x = _random_training(rng, cfg.k, cfg.tau, sys_cfg.power)
        s = build_S(v, x)
        lhs = np.trace(np.linalg.inv(s @ s.conj().T)).real
        rhs = (
            np.trace(np.linalg.inv(v.v @ v.v.conj().T)).real
            * np.trace(np.linalg.inv(x.x @ x.x.conj().T)).real
        )
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    add("kronecker-trace-identity", worst < 1e-8, f"max rel err {worst:.2e}")

    # LMMSE MSE: inversion-lemma form vs direct form.
    v = naive_pattern(cfg.m, cfg.b, model)
    x = dft_training(cfg.k, cfg.tau, sys_cfg.power)
    s = build_S(v, x)
    direct = np.trace(np.linalg.inv(
        np.linalg.inv(r_gamma) + (s @ s.conj().T) / (cfg.sigma2 * cfg.l)
    )).real
    lemma = system.mse_lmmse(s, r_gamma, cfg.sigma2, cfg.l)
    rel = abs(direct - lemma) / abs(direct)
    add("lmmse-mse-forms-agree", rel < 1e-8, f"rel err {rel:.2e}")

    add(
        "lmmse-not-worse-than-ls",
        lemma <= system.mse_ls(s, cfg.sigma2, cfg.l) + 1e-9,
        "",
    )

    # Reflection-law projection is idempotent.
    z = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    once = phase_model.project_to_feasible(z, model)
    twice = phase_model.project_to_feasible(once, model)
    add("projection-idempotent", np.allclose(once, twice, atol=1e-12), "")

    # Amplitude law stays inside [beta_min, 1].
    thetas = rng.uniform(0.0, 2.0 * np.pi, 512)
    amps = phase_model.amplitude_of_phase(thetas, model)
    add(
        "amplitude-bounds",
        bool(np.all(amps >= model.beta_min - 1e-12) and np.all(amps <= 1.0 + 1e-12)),
        "",
    )

    # Cascaded correlation structure.
    add(
        "correlation-trace",
        abs(np.trace(r_gamma).real - cfg.l * cfg.k * (cfg.m + 1)) < 1e-9,
        "",
    )

    # Short design runs descend monotonically.
    _, trace = design_ls(sys_cfg, model, eps=cfg.eps, max_iter=20,
                         accelerate=cfg.accelerate, grid_points=cfg.grid_points)
    diffs = np.diff(trace.objectives)
    add("ls-design-monotone", bool(np.all(diffs <= 1e-10)), "")
    _, _, trace = design_lmmse(sys_cfg, model, r_gamma, eps=cfg.eps, max_iter=10,
                               accelerate=cfg.accelerate, grid_points=cfg.grid_points)
    diffs = np.diff(trace.objectives)
    add("lmmse-design-monotone", bool(np.all(diffs <= 1e-10)), "")

    # Trace bound for the estimator-gap argument.
    ok = True
    for _ in range(50):
        n = 6
        a_half = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        a = a_half @ a_half.conj().T + 0.1 * np.eye(n)
        inv_trace = np.trace(np.linalg.inv(a)).real
        bound = n * inv_trace / (n + inv_trace)
        ok &= np.trace(np.linalg.inv(np.eye(n) + a)).real <= bound + 1e-10
    add("trace-bound", bool(ok), "")

    return checks


def _random_feasible_pattern(rng, m, b, model) -> ReflectionPattern:
    from .phase_model import reflection_coefficient

    thetas = rng.uniform(0.0, 2.0 * np.pi, (m, b))
    v = np.ones((m + 1, b), dtype=complex)
    v[:m] = reflection_coefficient(thetas, model)
    return ReflectionPattern(v=v)


def _random_training(rng, k, tau, power) -> TrainingMatrix:
    x = rng.standard_normal((k, tau)) + 1j * rng.standard_normal((k, tau))
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    x = x / norms * np.sqrt(np.asarray(power))[:, None]
    return TrainingMatrix(x=x, power=np.asarray(power, dtype=float))
