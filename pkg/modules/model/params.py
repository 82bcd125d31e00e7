"""Model parameters (N, p, a, theta, mu) and their admissibility checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

from modules.utils.errors import ParameterError

DEFAULT_THETA = {2: 2.5, 3: 2.7}
CRITICAL_RTOL = 1e-12


def critical_exponent(N: int) -> float:
    """Mass-critical exponent p* = 4 + 4/N."""
    return 4.0 + 4.0 / N


def quasilinear_ceiling(N: int) -> float:
    """2*2^* = 4N/(N-2) for N >= 3, infinite otherwise."""
    return 4.0 * N / (N - 2) if N >= 3 else math.inf


def admissible_theta_window(N: int) -> Optional[Tuple[float, float]]:
    """Open interval of perturbation exponents; None for N = 1 (no perturbation)."""
    if N == 1:
        return None
    if N == 2:
        return 2.0, 3.0
    return 4.0 * N / (N + 2), min((4.0 * N + 4.0) / (N + 2), float(N))


def critical_mass_ceiling(N: int, a_star: float) -> float:
    """Upper end of the critical mass window for N >= 4; infinite for N <= 3."""
    if N <= 3:
        return math.inf
    return ((N - 2.0) / (N - 2.0 - 4.0 / N)) ** (N / 2.0) * a_star


@dataclass(frozen=True)
class ModelParams:
    """Dimension, nonlinearity, prescribed mass and the perturbation (theta, mu)."""
    N: int
    p: float
    a: float
    theta: Optional[float] = None
    mu: float = 0.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ParameterError("dimension must be a positive integer", field="N")
        object.__setattr__(self, "N", int(self.N))
        if self.theta is None and self.N >= 2:
            window = admissible_theta_window(self.N)
            object.__setattr__(self, "theta", DEFAULT_THETA.get(self.N, 0.5 * sum(window)))
        self.validate()

    def validate(self):
        """Invariants shared by every command (exponent, theta and mu windows)."""
        N, p = self.N, self.p
        if not self.a > 0:
            raise ParameterError(f"prescribed mass must be positive, got {self.a}", field="a")
        if not 0.0 <= self.mu <= 1.0:
            raise ParameterError(f"perturbation weight must lie in [0,1], got {self.mu}", field="mu")
        ceiling = quasilinear_ceiling(N)
        if not 2.0 < p < ceiling:
            hypothesis = "H2" if N == 3 else "exponent-window"
            raise ParameterError(
                f"p={p} outside 2 < p < 2*2^*={ceiling:g}", field="p", hypothesis=hypothesis
            )
        if N == 1:
            if self.mu != 0.0:
                raise ParameterError("N=1 runs are unperturbed, mu must be 0", field="mu", hypothesis="theta-window")
            return
        low, high = admissible_theta_window(N)
        if not low < self.theta < high:
            raise ParameterError(
                f"theta={self.theta} outside ({low:g}, {high:g})", field="theta", hypothesis="theta-window"
            )

    @property
    def p_star(self) -> float:
        return critical_exponent(self.N)

    @property
    def regime(self) -> str:
        """'critical', 'supercritical' or 'subcritical' relative to p*."""
        if abs(self.p - self.p_star) <= CRITICAL_RTOL * self.p_star:
            return "critical"
        return "supercritical" if self.p > self.p_star else "subcritical"

    @property
    def is_critical(self) -> bool:
        return self.regime == "critical"

    def check_hypotheses(self, a_star: Optional[float] = None):
        """Existence hypotheses of the ground-state theory; a_star enables the critical mass checks."""
        N, regime = self.N, self.regime
        if regime == "subcritical":
            raise ParameterError(
                f"p={self.p} is below p*={self.p_star:g}; only p >= 4+4/N is treated",
                field="p", hypothesis="H1" if N <= 2 else "H2",
            )
        if regime == "supercritical":
            if N >= 4:
                raise ParameterError(
                    "supercritical runs are limited to N <= 3", field="N", hypothesis="H2"
                )
            return
        if a_star is None:
            return
        hypothesis = "H3" if N <= 3 else "H4"
        if self.a <= a_star:
            raise ParameterError(
                f"critical runs need a > a*={a_star:.6g}, got {self.a}", field="a", hypothesis=hypothesis
            )
        ceiling = critical_mass_ceiling(N, a_star)
        if self.a >= ceiling:
            raise ParameterError(
                f"critical runs with N>=4 need a < {ceiling:.6g}", field="a", hypothesis="H4"
            )

    def with_mu(self, mu: float) -> "ModelParams":
        return replace(self, mu=float(mu))

    def with_mass(self, a: float) -> "ModelParams":
        return replace(self, a=float(a))
