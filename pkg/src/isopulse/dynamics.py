"""Two-level Schrodinger propagation in the detuning and phase pictures.

All propagation is carried out in dimensionless time x = t/tau with the
class parameters alpha = omega0 tau / 2 and beta = delta0 tau / 2. The
detuning picture evolves under

    i dc/dx = [[-beta g(x), alpha f(x)], [alpha f(x), beta g(x)]] c,

the phase picture under the purely off-diagonal Hamiltonian with
coupling alpha f(x) exp(-i phi(x)) in the upper-right corner, where
phi = 2 beta * phi_shape(x). Populations agree between the pictures;
amplitudes differ by a diagonal phase transformation.
"""

import cmath
import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import DOP853

from .catalog import ModelPair
from .errors import ContractError, ConvergenceError, DomainError

__all__ = [
    "IntegratorConfig", "QubitState", "DriveSample", "Propagator",
    "drive_sample", "propagate_detuning", "propagate_phase",
    "transition_probability",
]

TRAJECTORY_HEADER = ("x", "Re c1", "Im c1", "Re c2", "Im c2", "|c2|^2")

_IDENTITY = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class IntegratorConfig:
    """Step-control settings.

    mode "adaptive" uses an embedded Runge-Kutta pair with per-step
    error control and treats max_steps as an exhaustion limit; mode
    "fixed" runs a classical fourth-order scheme with exactly max_steps
    equal steps for bitwise reproducibility.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 1_000_000
    mode: str = "adaptive"

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ContractError("tolerances must be positive")
        if self.max_steps < 2:
            raise ContractError("max_steps must be at least 2")
        if self.mode not in ("adaptive", "fixed"):
            raise ContractError(f"unknown integrator mode {self.mode!r}")


DEFAULT_CONFIG = IntegratorConfig()


@dataclass(frozen=True)
class QubitState:
    """Amplitudes (c1, c2) of the ground and excited states."""

    c1: complex
    c2: complex

    @classmethod
    def ground(cls) -> "QubitState":
        return cls(1.0 + 0.0j, 0.0 + 0.0j)

    @property
    def norm(self) -> float:
        return abs(self.c1) ** 2 + abs(self.c2) ** 2

    @property
    def p2(self) -> float:
        """Excited-state population |c2|^2."""
        return abs(self.c2) ** 2


@dataclass(frozen=True)
class DriveSample:
    """Drive values at one instant: Rabi frequency, detuning, phase."""

    omega: float
    delta: float
    phi: float


def drive_sample(model: ModelPair, x: float) -> DriveSample:
    """Sample Omega, Delta and the accumulated phase at x = t/tau."""
    return DriveSample(model.omega(x), model.delta(x), model.phase(x))


@dataclass(frozen=True, eq=False)
class Propagator:
    """Time-ordered 2x2 evolution operator over a span."""

    u: np.ndarray

    def apply(self, state: QubitState) -> QubitState:
        c1, c2 = self.u @ (state.c1, state.c2)
        return QubitState(complex(c1), complex(c2))

    @property
    def unitarity_defect(self) -> float:
        """Max-norm deviation of u^dagger u from the identity."""
        return float(np.max(np.abs(self.u.conj().T @ self.u - _IDENTITY)))

    def __matmul__(self, other: "Propagator") -> "Propagator":
        # (later @ earlier): applies `other` first
        return Propagator(self.u @ other.u)


def _detuning_rhs(model: ModelPair) -> Callable:
    alpha, beta = model.alpha, model.beta
    f, g = model.shape.f, model.g

    def rhs(x, y):
        a = alpha * f(x)
        b = beta * g(x)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise DomainError(f"non-finite drive sample at x = {x:.9g}")
        u11, u12, u21, u22 = y
        return (
            -1j * (-b * u11 + a * u21),
            -1j * (-b * u12 + a * u22),
            -1j * (a * u11 + b * u21),
            -1j * (a * u12 + b * u22),
        )

    return rhs


def _phase_rhs(model: ModelPair) -> Callable:
    alpha = model.alpha
    two_beta = 2.0 * model.beta
    f, phi_shape = model.shape.f, model.phi_shape

    def rhs(x, y):
        a = alpha * f(x)
        ph = two_beta * phi_shape(x)
        if not (math.isfinite(a) and math.isfinite(ph)):
            raise DomainError(f"non-finite drive sample at x = {x:.9g}")
        w = a * cmath.exp(-1j * ph)
        wc = w.conjugate()
        u11, u12, u21, u22 = y
        return (
            -1j * w * u21,
            -1j * w * u22,
            -1j * wc * u11,
            -1j * wc * u12,
        )

    return rhs


def _resolve_span(model: ModelPair, span) -> tuple[float, float]:
    w = model.window
    if span is None:
        return w.lo, w.hi
    x0, x1 = span
    if x1 < x0:
        raise ContractError("span must be ordered (x0 <= x1)")
    if x0 < w.lo - 1e-12 or x1 > w.hi + 1e-12:
        raise ContractError(
            f"span [{x0:g}, {x1:g}] leaves the resolved window "
            f"[{w.lo:g}, {w.hi:g}]")
    return x0, x1


def _run_adaptive(rhs, x0, x1, cfg, on_step) -> np.ndarray:
    y0 = _IDENTITY.flatten()
    if on_step is not None:
        on_step(x0, y0)
    solver = DOP853(rhs, x0, y0, t_bound=x1,
                    rtol=cfg.rel_tol, atol=cfg.abs_tol)
    steps = 0
    while solver.status == "running":
        steps += 1
        if steps > cfg.max_steps:
            raise ConvergenceError(
                f"step limit {cfg.max_steps} exhausted", reached=solver.t)
        message = solver.step()
        if solver.status == "failed":
            raise ConvergenceError(
                f"integrator failed: {message}", reached=solver.t)
        if on_step is not None:
            on_step(solver.t, solver.y)
    return solver.y.reshape(2, 2)


def _run_fixed(rhs, x0, x1, cfg, on_step) -> np.ndarray:
    n = cfg.max_steps
    h = (x1 - x0) / n
    y = _IDENTITY.flatten()
    if on_step is not None:
        on_step(x0, y)
    x = x0
    for k in range(n):
        k1 = np.asarray(rhs(x, y))
        k2 = np.asarray(rhs(x + 0.5 * h, y + 0.5 * h * k1))
        k3 = np.asarray(rhs(x + 0.5 * h, y + 0.5 * h * k2))
        k4 = np.asarray(rhs(x + h, y + h * k3))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        x = x0 + (k + 1) * h
        if on_step is not None:
            on_step(x, y)
    return y.reshape(2, 2)


def _propagate(model, span, cfg, picture, on_step=None) -> Propagator:
    if picture == "detuning":
        rhs = _detuning_rhs(model)
    elif picture == "phase":
        rhs = _phase_rhs(model)
    else:
        raise ContractError(f"unknown picture {picture!r}")
    x0, x1 = _resolve_span(model, span)
    if x0 == x1:
        return Propagator(_IDENTITY.copy())
    runner = _run_fixed if cfg.mode == "fixed" else _run_adaptive
    return Propagator(runner(rhs, x0, x1, cfg, on_step))


def propagate_detuning(model: ModelPair, span=None,
                       cfg: IntegratorConfig = DEFAULT_CONFIG,
                       on_step=None) -> Propagator:
    """Evolution operator in the detuning picture.

    Parameters
    ----------
    model : ModelPair
        The drive; its resolved window bounds the admissible span.
    span : (float, float), optional
        Dimensionless interval (x0, x1); defaults to the full window.
    cfg : IntegratorConfig
        Step control.
    on_step : callable, optional
        Called as on_step(x, y) after every accepted step, y being the
        flattened propagator.

    Returns
    -------
    Propagator
        Unitary within integrator tolerance; apply it to the ground
        state for final amplitudes.
    """
    return _propagate(model, span, cfg, "detuning", on_step)


def propagate_phase(model: ModelPair, span=None,
                    cfg: IntegratorConfig = DEFAULT_CONFIG,
                    on_step=None) -> Propagator:
    """Evolution operator in the phase picture.

    Populations match propagate_detuning within combined integrator
    tolerance; amplitudes differ by diagonal phases.
    """
    return _propagate(model, span, cfg, "phase", on_step)


def transition_probability(model: ModelPair, picture: str = "detuning",
                           cfg: IntegratorConfig = DEFAULT_CONFIG,
                           trajectory=None) -> float:
    """Final excited-state population starting from the ground state.

    Parameters
    ----------
    model : ModelPair
    picture : str
        "detuning" or "phase".
    cfg : IntegratorConfig
    trajectory : path or writable file, optional
        When given, one CSV row per accepted step is written with
        columns x, Re c1, Im c1, Re c2, Im c2, |c2|^2.

    Returns
    -------
    float
        Probability clipped to [0, 1] (clipping only absorbs
        tolerance-level overshoot).
    """
    on_step = None
    sink = None
    writer = None
    if trajectory is not None:
        if hasattr(trajectory, "write"):
            writer = csv.writer(trajectory)
        else:
            sink = open(trajectory, "w", newline="")
            writer = csv.writer(sink)
        writer.writerow(TRAJECTORY_HEADER)

        def on_step(x, y):
            c1, c2 = complex(y[0]), complex(y[2])
            writer.writerow((repr(float(x)), repr(c1.real), repr(c1.imag),
                             repr(c2.real), repr(c2.imag),
                             repr(abs(c2) ** 2)))

    try:
        prop = _propagate(model, None, cfg, picture, on_step)
    finally:
        if sink is not None:
            sink.close()
    p = prop.apply(QubitState.ground()).p2
    return min(max(p, 0.0), 1.0)