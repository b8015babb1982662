"""Shared configuration and diagnostics containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDims


@dataclass(frozen=True)
class SystemConfig:
    """Dimensions and physical parameters of the uplink training problem.

    k single-antenna UEs, m RIS elements, l BS antennas, b training subframes
    of tau symbols each.  power holds the per-UE budgets P_k; sigma2 is the
    noise variance (SNR_k = P_k / sigma2).
    """

    k: int
    m: int
    l: int
    b: int | None = None
    tau: int | None = None
    sigma2: float = 1.0
    power: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.b is None:
            object.__setattr__(self, "b", self.m + 1)
        if self.tau is None:
            object.__setattr__(self, "tau", self.k)
        if self.power is None:
            object.__setattr__(self, "power", np.ones(self.k))
        else:
            object.__setattr__(self, "power", np.asarray(self.power, dtype=float))
        if min(self.k, self.m, self.l) < 1:
            raise InvalidDims("k, m, l must all be >= 1")
        if self.tau < self.k:
            raise InvalidDims(f"tau must be >= k ({self.tau} < {self.k})")
        if self.b < self.m + 1:
            raise InvalidDims(f"b must be >= m + 1 ({self.b} < {self.m + 1})")
        if self.power.shape != (self.k,):
            raise InvalidDims("power must have one entry per UE")
        if np.any(self.power <= 0.0) or self.sigma2 < 0.0:
            raise InvalidDims("power budgets must be positive, sigma2 >= 0")

    @property
    def channel_dim(self) -> int:
        """Total number of estimated complex coefficients, L*K*(M+1)."""
        return self.l * self.k * (self.m + 1)

    def with_power(self, power) -> "SystemConfig":
        return SystemConfig(self.k, self.m, self.l, self.b, self.tau,
                            self.sigma2, np.asarray(power, dtype=float))


@dataclass
class DesignTrace:
    """Per-iteration convergence diagnostics of a pattern/training design.

    objectives[0] is the value at the initial point; update_calls counts
    cumulative MM updates (LS) or surrogate rebuilds (LMMSE) at each recorded
    iterate, and elapsed_s the cumulative wall time.
    """

    objectives: list[float] = field(default_factory=list)
    update_calls: list[int] = field(default_factory=list)
    elapsed_s: list[float] = field(default_factory=list)
    converged: bool = False

    def record(self, objective: float, calls: int, elapsed: float) -> None:
        self.objectives.append(float(objective))
        self.update_calls.append(int(calls))
        self.elapsed_s.append(float(elapsed))

    @property
    def iterations(self) -> int:
        return max(len(self.objectives) - 1, 0)

    @property
    def final_objective(self) -> float:
        return self.objectives[-1]

    @property
    def total_updates(self) -> int:
        return self.update_calls[-1] if self.update_calls else 0
