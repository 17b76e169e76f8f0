"""
Adaptive Dormand-Prince 5(4) integration of the complex matrix system
M' = A(x, lambda) M over one period and over arbitrary intervals.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from coefficients import CoefficientProvider
from companion import CompanionAssembler
from floquet_errors import DivergenceError, IntegrationFailureError, ParameterError

logger = logging.getLogger(__name__)

MatrixFunction = Callable[[float], np.ndarray]

# Dormand-Prince 5(4) tableau; the 7th stage is FSAL
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# difference between the 5th and embedded 4th order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


@dataclass(frozen=True)
class IntegratorSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    initial_step: float = 1e-3
    max_steps: int = 1_000_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ParameterError(f"Tolerances must be positive, got rel_tol={self.rel_tol}, abs_tol={self.abs_tol}")
        if not self.initial_step > 0:
            raise ParameterError(f"initial_step must be positive, got {self.initial_step}")
        if int(self.max_steps) < 1:
            raise ParameterError(f"max_steps must be >= 1, got {self.max_steps}")

    def scaled(self, factor: float) -> "IntegratorSettings":
        """Same settings with both tolerances multiplied by factor."""
        return IntegratorSettings(self.rel_tol * factor, self.abs_tol * factor, self.initial_step, self.max_steps)


DEFAULT_SETTINGS = IntegratorSettings()


@dataclass
class IntegrationStats:
    accepted: int = 0
    rejected: int = 0
    next_step: float = 0.0


@dataclass(frozen=True, eq=False)
class Monodromy:
    X1: np.ndarray
    lam: complex
    settings: IntegratorSettings
    accepted_steps: int = 0
    rejected_steps: int = 0


@dataclass(frozen=True, eq=False)
class Trajectory:
    x: np.ndarray
    states: np.ndarray

    def component(self, block: int, m: int) -> np.ndarray:
        """Samples of the derivative block y^(block), shape (N, m)."""
        return self.states[:, block * m:(block + 1) * m]


def integrate_system(
    matrix_fn: MatrixFunction,
    M0: np.ndarray,
    x_a: float,
    x_b: float,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    first_step: Optional[float] = None,
) -> Tuple[np.ndarray, IntegrationStats]:
    """
    Solve M' = matrix_fn(x) M from x_a to x_b with M(x_a) = M0.

    Backward runs integrate in s = |x - x_a| with the sign folded into the
    right-hand side, so no matrix is ever inverted.
    """
    Y = np.array(M0, dtype=complex, copy=True)
    stats = IntegrationStats(next_step=settings.initial_step)
    span = float(x_b) - float(x_a)
    if span == 0.0:
        return Y, stats

    direction = 1.0 if span > 0 else -1.0
    length = abs(span)
    h_min = 1e-14 * max(1.0, length)

    def rhs(s: float, state: np.ndarray) -> np.ndarray:
        return direction * (matrix_fn(x_a + direction * s) @ state)

    s = 0.0
    h = min(first_step or settings.initial_step, length)
    k = [rhs(0.0, Y)] + [None] * 6
    reject_streak = False

    while s < length:
        if stats.accepted + stats.rejected >= settings.max_steps:
            raise IntegrationFailureError(
                f"Step budget of {settings.max_steps} exhausted", x_a + direction * s
            )
        last = s + h >= length * (1.0 - 1e-14)
        if last:
            h = length - s

        for i in range(1, 7):
            increment = sum(a * ki for a, ki in zip(_A[i], k[:i]) if a != 0.0)
            k[i] = rhs(s + _C[i] * h, Y + h * increment)
        Y_new = Y + h * sum(a * ki for a, ki in zip(_A[6], k[:6]) if a != 0.0)
        err_vec = h * sum(e * ki for e, ki in zip(_E, k) if e != 0.0)

        if not (np.all(np.isfinite(Y_new)) and np.all(np.isfinite(err_vec))):
            stats.rejected += 1
            h *= 0.1
            if h < h_min:
                raise DivergenceError(x_a + direction * s)
            reject_streak = True
            continue

        scale = settings.abs_tol + settings.rel_tol * np.maximum(np.abs(Y), np.abs(Y_new))
        err = float(np.sqrt(np.mean((np.abs(err_vec) / scale) ** 2)))

        if err <= 1.0:
            s = length if last else s + h
            Y = Y_new
            k[0] = k[6]
            stats.accepted += 1
            factor = _MAX_FACTOR if err == 0.0 else min(_MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err ** -0.2))
            if reject_streak:
                factor = min(factor, 1.0)
            reject_streak = False
            if not last:
                h *= factor
            else:
                stats.next_step = h * factor
        else:
            stats.rejected += 1
            reject_streak = True
            h *= max(_MIN_FACTOR, _SAFETY * err ** -0.2)
            if h < h_min:
                raise IntegrationFailureError("Step size underflow", x_a + direction * s)

    logger.debug(
        "Integrated [%g, %g]: %d accepted, %d rejected steps", x_a, x_b, stats.accepted, stats.rejected
    )
    return Y, stats


def integrate_interval(
    coefficients: CoefficientProvider,
    lam: complex,
    x_a: float,
    x_b: float,
    M0: np.ndarray,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
) -> np.ndarray:
    """Propagate M0 from x_a to x_b under the companion system at lambda."""
    M, _ = integrate_system(CompanionAssembler(coefficients, lam), M0, x_a, x_b, settings)
    return M


def integrate_fundamental(
    coefficients: CoefficientProvider,
    lam: complex,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
) -> Monodromy:
    """X(1, lambda) with X(0, lambda) = I."""
    identity = np.eye(coefficients.n * coefficients.m, dtype=complex)
    X1, stats = integrate_system(CompanionAssembler(coefficients, lam), identity, 0.0, 1.0, settings)
    return Monodromy(X1=X1, lam=complex(lam), settings=settings,
                     accepted_steps=stats.accepted, rejected_steps=stats.rejected)


def canonical_boundary_matrix(
    coefficients: CoefficientProvider,
    lam: complex,
    t: float,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
) -> np.ndarray:
    """
    Boundary matrix of the quasi-periodic problem built from the n canonical
    m x m matrix solutions Y_k (Y_k^(k-1)(0) = I, other derivatives zero).

    Block (nu, k) holds Y_k^(nu-1)(1) - e^{it} Y_k^(nu-1)(0), i.e. the same
    layout as X(1, lambda) - e^{it} I.
    """
    n, m = coefficients.n, coefficients.m
    assembler = CompanionAssembler(coefficients, lam)
    shift = np.exp(1j * t)
    boundary = np.zeros((n * m, n * m), dtype=complex)
    for k in range(n):
        initial = np.zeros((n * m, m), dtype=complex)
        initial[k * m:(k + 1) * m] = np.eye(m)
        Y1, _ = integrate_system(assembler, initial, 0.0, 1.0, settings)
        boundary[:, k * m:(k + 1) * m] = Y1 - shift * initial
    return boundary


def trajectory(
    coefficients: CoefficientProvider,
    lam: complex,
    init: np.ndarray,
    x_a: float,
    x_b: float,
    N: int,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
) -> Trajectory:
    """Sample the vector solution with state init at x_a on N evenly spaced points through x_b."""
    if N < 2:
        raise ParameterError(f"A trajectory needs at least 2 samples, got N={N}")
    init = np.asarray(init, dtype=complex).reshape(-1)
    if init.size != coefficients.n * coefficients.m:
        raise ParameterError(f"Initial state has {init.size} components, expected {coefficients.n * coefficients.m}")

    assembler = CompanionAssembler(coefficients, lam)
    xs = np.linspace(x_a, x_b, N)
    states = np.zeros((N, init.size), dtype=complex)
    states[0] = init
    state = init[:, None]
    h = settings.initial_step
    for i in range(1, N):
        state, stats = integrate_system(assembler, state, xs[i - 1], xs[i], settings, first_step=h)
        h = stats.next_step or h
        states[i] = state[:, 0]
    return Trajectory(x=xs, states=states)
