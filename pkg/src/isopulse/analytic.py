"""Closed-form transition probabilities.

These are the analytic oracles for the numeric propagator: the
long-duration limit of the linear-chirp (LMSZ) model, the exact result
for the sech/tanh (AEH) model, and the resonant Rabi formula.
"""

import math
from dataclasses import dataclass

from .errors import ContractError, DomainError

__all__ = ["ClassParameters", "lmsz_asymptotic", "aeh_exact", "rabi_resonant"]


@dataclass(frozen=True)
class ClassParameters:
    """Dimensionless class parameters alpha = omega0 tau / 2 and
    beta = delta0 tau / 2."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ContractError("alpha must be non-negative")


def _ln_cosh(x: float) -> float:
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax)) - math.log(2.0)


def rabi_resonant(alpha: float) -> float:
    """Resonant transition probability sin^2(pi alpha)."""
    if alpha < 0:
        raise ContractError("alpha must be non-negative")
    return math.sin(math.pi * alpha) ** 2


def lmsz_asymptotic(alpha: float, beta: float) -> float:
    """Long-duration limit of the linear-chirp probability.

    Evaluates 1 - exp(-pi alpha^2 / |beta|). The magnitude of beta keeps
    the chirp-sign symmetry of the landscapes. Valid as an approximation
    only for long chirps (|beta| well above alpha); exactness is not
    claimed anywhere near resonance.

    Raises
    ------
    DomainError
        At beta = 0; use rabi_resonant(alpha) on resonance.
    """
    if alpha < 0:
        raise ContractError("alpha must be non-negative")
    if beta == 0.0:
        raise DomainError(
            "asymptotic form undefined on resonance; "
            "use rabi_resonant(alpha)")
    return -math.expm1(-math.pi * alpha * alpha / abs(beta))


def aeh_exact(alpha: float, beta: float) -> float:
    """Exact sech/tanh transition probability.

    P = 1 - cos^2(pi sqrt(alpha^2 - beta^2)) / cosh^2(pi beta). For
    beta^2 > alpha^2 the root is imaginary and cos continues to cosh of
    the real counterpart, keeping the expression real. The ratio is
    evaluated in log space so large arguments cannot overflow, and it
    never exceeds 1, so the result is always in [0, 1].
    """
    if beta == 0.0:
        # delegating keeps the resonant identity with rabi_resonant exact
        return rabi_resonant(abs(alpha))
    d = alpha * alpha - beta * beta
    if d >= 0.0:
        c = abs(math.cos(math.pi * math.sqrt(d)))
        if c == 0.0:
            return 1.0
        log_ratio = 2.0 * (math.log(c) - _ln_cosh(math.pi * beta))
    else:
        log_ratio = 2.0 * (_ln_cosh(math.pi * math.sqrt(-d))
                           - _ln_cosh(math.pi * beta))
    return -math.expm1(min(log_ratio, 0.0))