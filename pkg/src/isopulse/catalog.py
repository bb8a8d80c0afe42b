"""Isoprobability model construction.

A class is generated by a Stueckelberg function Theta(sigma), the
detuning-to-coupling ratio expressed in the rescaled time
sigma(t) = integral of Omega. Two models sharing Theta over the same
sigma range share their post-pulse transition probability exactly. This
module builds concrete {Omega(t), Delta(t), phi(t)} members of the LMSZ
(linear Theta) and AEH (tangent Theta) classes, from either a chosen
envelope or a chosen detuning shape, and applies window truncation.
"""

import dataclasses
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from scipy.integrate import quad, solve_ivp

from .errors import CatalogError, ContractError, DomainError, SingularityError
from .shapes import (HALF_PI, PulseShape, probe_points, shape,
                     solve_tail_cut, tail_area, tail_cut)

LMSZ = "lmsz"
AEH = "aeh"
CLASSES = (LMSZ, AEH)

_PAIR_AUDIT_TOL = 1e-9
_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-12, limit=400)


def _check_class(klass: str) -> str:
    if klass not in CLASSES:
        raise CatalogError(f"unknown class {klass!r}; expected one of {CLASSES}")
    return klass


# ---------------------------------------------------------------- windows

@dataclass(frozen=True)
class TailBound:
    """Cut an infinite domain where the one-sided tail area drops to eps."""

    eps: float = 1e-8


@dataclass(frozen=True)
class FixedWindow:
    """Symmetric window of full width T/tau in dimensionless time."""

    t_over_tau: float


@dataclass(frozen=True)
class EndpointGuard:
    """Retreat delta from each edge of a finite domain."""

    delta: float = 1e-3 * HALF_PI


@dataclass(frozen=True)
class FullWindow:
    """Use the envelope's entire (finite) domain."""


Policy = TailBound | FixedWindow | EndpointGuard | FullWindow


@dataclass(frozen=True)
class Window:
    """Resolved integration window [lo, hi] in x, with bookkeeping.

    deficit is the envelope area cut off per side; it bounds the
    truncation error fed into the propagator.
    """

    lo: float
    hi: float
    policy: str
    deficit: float

    @property
    def width(self) -> float:
        return self.hi - self.lo


def default_policy(shp: PulseShape, klass: str, delta0: float) -> Policy:
    """Tail bound for infinite domains; endpoint guard where the AEH
    detuning has an edge pole; the full window otherwise."""
    if shp.infinite:
        return TailBound()
    if klass == AEH and delta0 != 0.0:
        return EndpointGuard()
    return FullWindow()


def _pole_guard_needed(shp: PulseShape, klass: str, delta0: float) -> bool:
    # tangent Theta diverges where s reaches pi/2, i.e. at the edge of a
    # finite domain; infinite domains only reach the pole at x = inf
    return klass == AEH and delta0 != 0.0 and not shp.infinite


def resolve_window(shp: PulseShape, klass: str, delta0: float,
                   policy: Policy | None = None) -> Window:
    """Turn a truncation policy into a concrete window for this shape."""
    if policy is None:
        policy = default_policy(shp, klass, delta0)
    h = shp.domain_half

    if isinstance(policy, TailBound):
        if not policy.eps > 0:
            raise ContractError("tail bound eps must be positive")
        if shp.infinite:
            if shp.row is not None:
                cut = tail_cut(shp.row, policy.eps)
            else:
                cut = solve_tail_cut(shp.f, policy.eps)
            return Window(-cut, cut, f"tail({policy.eps:g})", policy.eps)
        if _pole_guard_needed(shp, klass, delta0):
            raise DomainError(
                "tangent detuning diverges at the domain edge; "
                "apply an endpoint guard")
        return Window(-h, h, "full", 0.0)

    if isinstance(policy, FixedWindow):
        half = policy.t_over_tau / 2.0
        if not half > 0:
            raise ContractError("fixed window width must be positive")
        if half > h + 1e-12:
            raise ContractError(
                f"window T/tau = {policy.t_over_tau:g} exceeds the envelope "
                f"domain of half width {h:g}")
        half = min(half, h)
        if _pole_guard_needed(shp, klass, delta0) and half >= h - 1e-12:
            raise DomainError(
                "tangent detuning diverges at the domain edge; "
                "shrink the window or apply an endpoint guard")
        if shp.infinite:
            deficit = tail_area(shp.f, half)
        else:
            deficit = quad(shp.f, half, h, **_QUAD_OPTS)[0]
        return Window(-half, half, f"window({policy.t_over_tau:g})", deficit)

    if isinstance(policy, EndpointGuard):
        if shp.infinite:
            raise ContractError("endpoint guard applies to finite domains only")
        d = policy.delta
        if not 0.0 < d < h:
            raise ContractError(f"guard delta must lie in (0, {h:g})")
        deficit = quad(shp.f, h - d, h, **_QUAD_OPTS)[0]
        return Window(-(h - d), h - d, f"guard({d:g})", deficit)

    if isinstance(policy, FullWindow):
        if shp.infinite:
            raise ContractError(
                "infinite domain requires a tail bound or a fixed window")
        if _pole_guard_needed(shp, klass, delta0):
            raise DomainError(
                "tangent detuning diverges at the domain edge; "
                "apply an endpoint guard")
        return Window(-h, h, "full", 0.0)

    raise ContractError(f"unknown truncation policy {policy!r}")


# ------------------------------------------------------- class functions

@dataclass(frozen=True)
class StueckelbergClass:
    """Class generator: Theta(sigma) and its phase integral.

    LMSZ uses the linear Theta(sigma) = (delta0 / (omega0^2 tau)) sigma,
    AEH the tangent Theta(sigma) = (delta0/omega0) tan(sigma/(omega0 tau)).
    """

    tag: str
    omega0: float
    delta0: float
    tau: float

    def theta(self, sigma: float) -> float:
        if self.tag == LMSZ:
            return self.delta0 / (self.omega0**2 * self.tau) * sigma
        return self.delta0 / self.omega0 * math.tan(sigma / (self.omega0 * self.tau))

    def phi_of_sigma(self, sigma: float) -> float:
        if self.tag == LMSZ:
            return self.delta0 * sigma * sigma / (2.0 * self.omega0**2 * self.tau)
        return -self.delta0 * self.tau * _ln_cos(sigma / (self.omega0 * self.tau))


def stueckelberg(klass: str, omega0: float, delta0: float,
                 tau: float) -> StueckelbergClass:
    _check_class(klass)
    if not (omega0 > 0 and tau > 0):
        raise ContractError("omega0 and tau must be positive")
    return StueckelbergClass(klass, omega0, delta0, tau)


def _ln_cos(s: float) -> float:
    c = math.cos(s)
    if c <= 0.0:
        raise DomainError(f"phase diverges: cos(s) <= 0 at s = {s:.6g}")
    return math.log(c)


def _ln_cosh(x: float) -> float:
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax)) - math.log(2.0)


def _composed_pair(klass: str, shp: PulseShape):
    """Reduced detuning shape g(x) and phase shape phi(x)/(delta0 tau)."""
    f, s = shp.f, shp.s
    if klass == LMSZ:
        return (lambda x: f(x) * s(x)), (lambda x: 0.5 * s(x) ** 2)
    return (lambda x: f(x) * math.tan(s(x))), (lambda x: -_ln_cos(s(x)))


# Explicitly printed per-class columns of the catalog table. Each entry
# is audited against the composed construction before use; a failed
# audit falls back to composition.
_P2 = math.pi**2
_P4 = math.pi**4
_P8 = math.pi**8

_EXPLICIT_PAIRS: dict[tuple[str, int], tuple[Callable, Callable]] = {
    (LMSZ, 1): (lambda x: x,
                lambda x: 0.5 * x * x),
    (LMSZ, 2): (lambda x: 48.0 / _P4 * x**5,
                lambda x: 8.0 / _P4 * x**6),
    (LMSZ, 3): (lambda x: 1440.0 / _P8 * x**9,
                lambda x: 144.0 / _P8 * x**10),
    (LMSZ, 4): (lambda x: _P2 / 8.0 * math.sin(2.0 * x),
                lambda x: _P2 / 8.0 * math.sin(x) ** 2),
    (AEH, 1): (math.tan,
               lambda x: -_ln_cos(x)),
    (AEH, 2): (lambda x: 12.0 / _P2 * x * x * math.tan(4.0 / _P2 * x**3),
               lambda x: -_ln_cos(4.0 / _P2 * x**3)),
    (AEH, 3): (lambda x: 80.0 / _P4 * x**4 * math.tan(16.0 / _P4 * x**5),
               lambda x: -_ln_cos(16.0 / _P4 * x**5)),
    (AEH, 8): (math.tanh, _ln_cosh),
    (AEH, 12): (lambda x: x / (1.0 + x * x),
                lambda x: 0.5 * math.log1p(x * x)),
}


def _pair_audit_window(klass: str, shp: PulseShape) -> float:
    # AEH comparisons lose precision where tan(s) is huge: the inverse
    # trig round trip in the composed route caps the agreement near the
    # pole. Probe where |tan s| <= 1e6, i.e. inside the 1e-6 tail cut
    # (infinite domains) or the default guard (finite ones).
    if shp.infinite:
        eps = 1e-6 if klass == AEH else 1e-8
        return solve_tail_cut(shp.f, eps)
    if klass == AEH:
        return HALF_PI - EndpointGuard().delta
    return HALF_PI


@lru_cache(maxsize=None)
def _class_pair(klass: str, row: int):
    """g and phase shape for a table row: audited explicit columns when
    available, composed from f and s otherwise. Returns (g, phi, explicit)."""
    shp = shape(row)
    g_c, p_c = _composed_pair(klass, shp)
    entry = _EXPLICIT_PAIRS.get((klass, row))
    if entry is None:
        return g_c, p_c, False
    g_e, p_e = entry
    lim = _pair_audit_window(klass, shp)
    for x in probe_points(lim):
        for a, b in ((g_e(x), g_c(x)), (p_e(x), p_c(x))):
            if abs(a - b) > _PAIR_AUDIT_TOL * max(1.0, abs(a), abs(b)):
                return g_c, p_c, False
    return g_e, p_e, True


def pair_audit_report() -> dict[tuple[str, int], bool]:
    """Map (class, row) with printed detuning/phase columns to whether
    those columns survived the audit and are in use."""
    return {key: _class_pair(*key)[2] for key in sorted(_EXPLICIT_PAIRS)}


# ------------------------------------------------------------ model pairs

@dataclass(frozen=True, eq=False)
class ModelPair:
    """A concrete class member {Omega(t), Delta(t), phi(t)}.

    All profiles are stored as dimensionless shapes of x = t/tau:
    Omega(t) = omega0 f(x), Delta(t) = delta0 g(x), and
    phi(t) = delta0 tau phi_shape(x). The window is the resolved
    integration domain in x.

    Attributes
    ----------
    shape : PulseShape
        Envelope f and its running integral s.
    klass : str
        "lmsz" or "aeh".
    omega0, delta0 : float
        Coupling and detuning amplitudes in rad / unit time.
    tau : float
        Time scale; x = t / tau.
    g : callable
        Detuning shape, odd.
    phi_shape : callable
        Accumulated phase divided by delta0 tau, even.
    window : Window
        Integration domain after truncation.
    """

    shape: PulseShape
    klass: str
    omega0: float
    delta0: float
    tau: float
    g: Callable[[float], float]
    phi_shape: Callable[[float], float]
    window: Window

    @property
    def alpha(self) -> float:
        return 0.5 * self.omega0 * self.tau

    @property
    def beta(self) -> float:
        return 0.5 * self.delta0 * self.tau

    def omega(self, x: float) -> float:
        """Rabi frequency at x = t/tau, in rad / unit time."""
        return self.omega0 * self.shape.f(x)

    def delta(self, x: float) -> float:
        """Detuning at x = t/tau, in rad / unit time."""
        return self.delta0 * self.g(x)

    def phase(self, x: float) -> float:
        """Accumulated phase integral of Delta from 0 to x tau, in rad."""
        return self.delta0 * self.tau * self.phi_shape(x)


def catalog_model(klass: str, row: int, omega0: float = 1.0,
                  delta0: float = 0.0, tau: float = 1.0,
                  truncation: Policy | None = None) -> ModelPair:
    """Build the table-row member of a class.

    Parameters
    ----------
    klass : str
        "lmsz" or "aeh".
    row : int
        Catalog row, 1 through 16.
    omega0, delta0, tau : float
        Amplitudes (rad / unit time) and time scale.
    truncation : policy, optional
        Window policy; defaults per `default_policy`.

    Returns
    -------
    ModelPair
        Uses the table's printed detuning/phase columns where they exist
        and pass the audit against the composed construction.
    """
    _check_class(klass)
    if not tau > 0:
        raise ContractError("tau must be positive")
    if omega0 < 0:
        raise ContractError("omega0 must be non-negative")
    shp = shape(row)
    g, phi, _ = _class_pair(klass, row)
    window = resolve_window(shp, klass, delta0, truncation)
    return ModelPair(shp, klass, omega0, delta0, tau, g, phi, window)


def pair_from_shape(klass: str, shp: PulseShape, omega0: float = 1.0,
                    delta0: float = 0.0, tau: float = 1.0,
                    truncation: Policy | None = None,
                    renormalize: bool = False) -> ModelPair:
    """Generate the class member driven by a chosen envelope.

    The detuning follows from the pairing rule Delta = Omega Theta(sigma)
    with sigma = omega0 tau s(x); the phase is the class's phase integral
    at the same sigma.

    Raises
    ------
    ContractError
        If the envelope area deviates from pi by more than 1e-4 and
        renormalize is False. With renormalize=True, f is rescaled.
    """
    _check_class(klass)
    if not tau > 0:
        raise ContractError("tau must be positive")
    if abs(shp.area - math.pi) > 1e-4:
        if not renormalize:
            raise ContractError(
                f"envelope area {shp.area:.6g} deviates from pi; "
                "renormalize or fix the shape")
        scale = math.pi / shp.area
        f0, s0 = shp.f, shp.s
        shp = PulseShape(None, shp.name + "-renormalized", shp.formula,
                         lambda x: scale * f0(x), lambda x: scale * s0(x),
                         shp.domain_half, math.pi, shp.has_closed_s)
    g, phi = _composed_pair(klass, shp)
    window = resolve_window(shp, klass, delta0, truncation)
    return ModelPair(shp, klass, omega0, delta0, tau, g, phi, window)


def model_from_alpha_beta(klass: str, row: int, alpha: float, beta: float,
                          tau: float = 1.0,
                          truncation: Policy | None = None) -> ModelPair:
    """Catalog model with amplitudes set from the class parameters
    alpha = omega0 tau / 2 and beta = delta0 tau / 2."""
    if alpha < 0:
        raise ContractError("alpha must be non-negative")
    return catalog_model(klass, row, omega0=2.0 * alpha / tau,
                         delta0=2.0 * beta / tau, tau=tau,
                         truncation=truncation)


def truncate(model: ModelPair, policy: Policy) -> ModelPair:
    """Re-window an existing pair under a different truncation policy."""
    window = resolve_window(model.shape, model.klass, model.delta0, policy)
    return dataclasses.replace(model, window=window)


# -------------------------------------------------- detuning-first route

def pair_from_detuning(klass: str, g: Callable[[float], float],
                       omega0: float = 1.0, delta0: float = 0.0,
                       tau: float = 1.0, x_max: float = 6.0,
                       seed_dx: float = 1e-4) -> ModelPair:
    """Generate the class member driven by a chosen detuning shape.

    Solves the pairing rule for the reduced time integral s(x):
    ds/dx = g(x) / theta(s) outward from x = 0, where theta(s) = s for
    LMSZ and tan(s) for AEH. The start is the 0/0 point g(0) = theta(0)
    = 0, resolved by the local expansion s ~ sqrt(g'(0)) x. The envelope
    is then f(x) = g(x) / theta(s(x)).

    Parameters
    ----------
    klass : str
        "lmsz" or "aeh".
    g : callable
        Detuning shape; must be odd and smooth with g'(0) > 0.
    omega0, delta0, tau : float
        Amplitudes and time scale of the returned pair.
    x_max : float
        Half width of the solved window in x.
    seed_dx : float
        Switch point between the local expansion and the ODE solution.

    Raises
    ------
    SingularityError
        If the local expansion fails (g'(0) <= 0).
    DomainError
        If s(x) reaches the tangent pole at pi/2 before x_max (AEH).
    """
    _check_class(klass)
    if not (tau > 0 and x_max > 0 and 0 < seed_dx < x_max):
        raise ContractError("require tau > 0 and 0 < seed_dx < x_max")
    if abs(g(0.0)) > 1e-12:
        raise ContractError("detuning shape must vanish at x = 0")
    for x in (0.25 * x_max, 0.5 * x_max, 0.9 * x_max):
        if abs(g(x) + g(-x)) > 1e-9 * max(1.0, abs(g(x))):
            raise ContractError(f"detuning shape is not odd at x = {x:.6g}")

    h = 1e-5
    gp0 = (g(h) - g(-h)) / (2.0 * h)
    if gp0 <= 0.0:
        raise SingularityError(
            f"local expansion needs g'(0) > 0, got {gp0:.3g}")
    root = math.sqrt(gp0)

    if klass == LMSZ:
        def rhs(x, y):
            return [g(x) / y[0]]
    else:
        def rhs(x, y):
            return [g(x) / math.tan(y[0])]

    def pole(x, y):
        return y[0] - (HALF_PI - 1e-9)

    pole.terminal = True
    sol = solve_ivp(rhs, (seed_dx, x_max), [root * seed_dx],
                    method="DOP853", rtol=1e-12, atol=1e-14,
                    dense_output=True, events=pole)
    if sol.status == 1:
        raise DomainError(
            f"sigma reached the tangent pole at x = {sol.t_events[0][0]:.6g}; "
            "the detuning shape leaves the AEH domain")
    if not sol.success:
        raise DomainError(f"pairing integration failed: {sol.message}")

    def s_half(ax: float) -> float:
        return root * ax if ax < seed_dx else float(sol.sol(ax)[0])

    def s_fn(x: float) -> float:
        return math.copysign(s_half(abs(x)), x)

    theta = (lambda s: s) if klass == LMSZ else math.tan

    def f_fn(x: float) -> float:
        ax = abs(x)
        if ax < seed_dx:
            return root
        return g(ax) / theta(s_half(ax))

    s_end = s_half(x_max)
    shp = PulseShape(None, "from-detuning", "paired to supplied g",
                     f_fn, s_fn, x_max, 2.0 * s_end, False)
    if klass == LMSZ:
        def phi(x):
            return 0.5 * s_fn(x) ** 2
    else:
        def phi(x):
            return -_ln_cos(s_fn(x))
    window = Window(-x_max, x_max, "detuning-first",
                    max(0.0, HALF_PI - s_end))
    return ModelPair(shp, klass, omega0, delta0, tau, g, phi, window)
