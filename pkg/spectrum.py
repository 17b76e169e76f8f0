"""
Floquet multipliers, spectrum membership, band scans and eigenvalues of the
quasi-periodic operators T_t.

lambda is in the spectrum of T exactly when some multiplier lies on the unit
circle; the spectrum of T_t is the zero set of D_t(lambda) = det(X(1, lambda) - e^{it} I).
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from coefficients import CoefficientProvider
from eigensolve import determinant, eigenvalues
from floquet_errors import (
    ContourFailureError,
    FloquetNumericalError,
    ParameterError,
)
from propagator import DEFAULT_SETTINGS, IntegratorSettings, Monodromy, integrate_fundamental

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
DEFAULT_TOL_CIRCLE = 1e-6


# Multipliers ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MultiplierSet:
    lam: complex
    multipliers: np.ndarray
    monodromy: Optional[Monodromy] = None

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.multipliers)

    def __len__(self) -> int:
        return self.multipliers.size


@dataclass(frozen=True)
class DimensionSplit:
    inside: int
    on: int
    outside: int
    tol_circle: float

    @property
    def total(self) -> int:
        return self.inside + self.on + self.outside


class SpectrumMembership(NamedTuple):
    in_spectrum: bool
    distance: float


def _check_tol_circle(tol_circle: float):
    if not tol_circle > 0:
        raise ParameterError(f"tol_circle must be positive, got {tol_circle}")


def multipliers(
    coefficients: CoefficientProvider,
    lam: complex,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
) -> MultiplierSet:
    """Eigenvalues of the monodromy matrix X(1, lambda)."""
    monodromy = integrate_fundamental(coefficients, lam, settings)
    values = eigenvalues(monodromy.X1)
    if np.any(values == 0):
        raise FloquetNumericalError(f"Zero multiplier at lambda={lam}; the monodromy lost invertibility")
    return MultiplierSet(lam=complex(lam), multipliers=values, monodromy=monodromy)


def spectral_distance(ms: MultiplierSet) -> float:
    """min_k ||mu_k| - 1|."""
    return float(np.min(np.abs(ms.moduli - 1.0)))


def log_distance(ms: MultiplierSet) -> float:
    """min_k |log|mu_k||; unchanged when lambda is replaced by its conjugate."""
    return float(np.min(np.abs(np.log(ms.moduli))))


def dimension_split(ms: MultiplierSet, tol_circle: float = DEFAULT_TOL_CIRCLE) -> DimensionSplit:
    """Count multipliers inside, on and outside the unit circle."""
    _check_tol_circle(tol_circle)
    moduli = ms.moduli
    inside = int(np.count_nonzero(moduli < 1.0 - tol_circle))
    outside = int(np.count_nonzero(moduli > 1.0 + tol_circle))
    return DimensionSplit(inside=inside, on=len(ms) - inside - outside, outside=outside, tol_circle=tol_circle)


def in_spectrum(
    coefficients: CoefficientProvider,
    lam: complex,
    tol_circle: float = DEFAULT_TOL_CIRCLE,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
) -> SpectrumMembership:
    _check_tol_circle(tol_circle)
    distance = spectral_distance(multipliers(coefficients, lam, settings))
    return SpectrumMembership(in_spectrum=distance <= tol_circle, distance=distance)


def _arguments(values: np.ndarray) -> np.ndarray:
    ts = np.mod(np.angle(values), TWO_PI)
    ts[ts >= TWO_PI - 1e-12] = 0.0
    return ts


def quasimomenta(ms: MultiplierSet, tol_circle: float = DEFAULT_TOL_CIRCLE) -> List[float]:
    """Arguments in [0, 2 pi) of the unit-modulus multipliers, ascending."""
    on_circle = ms.multipliers[np.abs(ms.moduli - 1.0) <= tol_circle]
    return sorted(float(t) for t in _arguments(on_circle))


def multiplier_frame(ms: MultiplierSet, tol_circle: float = DEFAULT_TOL_CIRCLE) -> pd.DataFrame:
    """
    One row per multiplier with its position relative to the unit circle.

    quasimomentum is NaN off the circle; rows keep the eigensolver order.
    """
    _check_tol_circle(tol_circle)
    moduli = ms.moduli
    position = np.where(moduli < 1.0 - tol_circle, "inside", np.where(moduli > 1.0 + tol_circle, "outside", "on"))
    quasimomentum = np.where(position == "on", _arguments(ms.multipliers), np.nan)
    return pd.DataFrame({
        "re_mu": ms.multipliers.real,
        "im_mu": ms.multipliers.imag,
        "modulus": moduli,
        "position": position,
        "quasimomentum": quasimomentum,
    })


def char_det(
    coefficients: CoefficientProvider,
    lam: complex,
    t: float,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
) -> complex:
    """D_t(lambda) = det(X(1, lambda) - e^{it} I)."""
    X1 = integrate_fundamental(coefficients, lam, settings).X1
    return determinant(X1 - np.exp(1j * t) * np.eye(X1.shape[0]))


# Scans ------------------------------------------------------------------------------------

@dataclass(eq=False)
class ScanResult:
    mode: str
    points: np.ndarray
    distances: np.ndarray
    flags: np.ndarray
    tol_circle: float
    shape: Tuple[int, ...]
    log_distances: Optional[np.ndarray] = None
    errors: Dict[int, str] = field(default_factory=dict)

    def distance_grid(self) -> np.ndarray:
        """Distances reshaped to the scan grid (rows = imaginary parts in region mode)."""
        return self.distances.reshape(self.shape)

    def log_distance_grid(self) -> np.ndarray:
        return self.log_distances.reshape(self.shape)

    def to_frame(self) -> pd.DataFrame:
        flags = self.flags.astype(int)
        if self.mode == "real":
            return pd.DataFrame({"lambda": self.points.real, "distance": self.distances, "in_spectrum": flags})
        return pd.DataFrame({
            "re_lambda": self.points.real,
            "im_lambda": self.points.imag,
            "distance": self.distances,
            "in_spectrum": flags,
        })

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g")


def _map_ordered(fn: Callable, items: Sequence, workers: int) -> List:
    """Map in input order, optionally across processes."""
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _scan_point(coefficients, settings, lam) -> Tuple[float, float, Optional[str]]:
    try:
        ms = multipliers(coefficients, lam, settings)
    except FloquetNumericalError as e:
        return float("nan"), float("nan"), str(e)
    return spectral_distance(ms), log_distance(ms), None


def _run_scan(coefficients, points, shape, mode, tol_circle, settings, workers) -> ScanResult:
    evaluate = partial(_scan_point, coefficients, settings)
    results = _map_ordered(evaluate, list(points), workers)
    distances = np.array([r[0] for r in results], dtype=float)
    log_distances = np.array([r[1] for r in results], dtype=float)
    errors = {i: r[2] for i, r in enumerate(results) if r[2] is not None}
    for i, message in errors.items():
        logger.warning("Scan point %d (lambda=%s) failed: %s", i, points[i], message)
    flags = np.nan_to_num(distances, nan=np.inf) <= tol_circle
    return ScanResult(mode=mode, points=np.asarray(points, dtype=complex), distances=distances,
                      flags=flags, tol_circle=tol_circle, shape=shape,
                      log_distances=log_distances, errors=errors)


def scan_real(
    coefficients: CoefficientProvider,
    lam_min: float,
    lam_max: float,
    N: int,
    tol_circle: float = DEFAULT_TOL_CIRCLE,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    workers: int = 1,
) -> ScanResult:
    """Spectral distance on N evenly spaced real points."""
    _check_tol_circle(tol_circle)
    if not lam_min < lam_max:
        raise ParameterError(f"Need lambda_min < lambda_max, got [{lam_min}, {lam_max}]")
    if N < 2:
        raise ParameterError(f"Real scan needs N >= 2 points, got {N}")
    points = np.linspace(lam_min, lam_max, N).astype(complex)
    return _run_scan(coefficients, points, (N,), "real", tol_circle, settings, workers)


def symmetric_linspace(lo: float, hi: float, num: int) -> np.ndarray:
    """linspace that is exactly antisymmetric when lo == -hi."""
    grid = np.linspace(lo, hi, num)
    if lo == -hi:
        grid = 0.5 * (grid - grid[::-1])
    return grid


def scan_region(
    coefficients: CoefficientProvider,
    re_range: Tuple[float, float],
    im_range: Tuple[float, float],
    N_re: int,
    N_im: int,
    tol_circle: float = DEFAULT_TOL_CIRCLE,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    workers: int = 1,
) -> ScanResult:
    """Spectral distance on a complex rectangle, row-major with rows of constant Im(lambda)."""
    _check_tol_circle(tol_circle)
    if not (re_range[0] < re_range[1] and im_range[0] < im_range[1]):
        raise ParameterError(f"Degenerate scan rectangle {re_range} x {im_range}")
    if N_re < 2 or N_im < 2:
        raise ParameterError(f"Region scan needs at least 2x2 points, got {N_re}x{N_im}")
    re = np.linspace(re_range[0], re_range[1], N_re)
    im = symmetric_linspace(im_range[0], im_range[1], N_im)
    points = (re[None, :] + 1j * im[:, None]).reshape(-1)
    return _run_scan(coefficients, points, (N_im, N_re), "region", tol_circle, settings, workers)


# Eigenvalues of T_t --------------------------------------------------------------------

@dataclass(frozen=True)
class Rectangle:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ParameterError(
                f"Degenerate rectangle [{self.re_min}, {self.re_max}] x [{self.im_min}, {self.im_max}]"
            )

    @property
    def diameter(self) -> float:
        return float(np.hypot(self.re_max - self.re_min, self.im_max - self.im_min))

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def corners(self) -> Tuple[complex, complex, complex, complex]:
        """Counterclockwise from the lower-left corner."""
        return (complex(self.re_min, self.im_min), complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max), complex(self.re_min, self.im_max))

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return (self.re_min - slack <= z.real <= self.re_max + slack
                and self.im_min - slack <= z.imag <= self.im_max + slack)

    def split(self, fraction: float) -> Tuple["Rectangle", "Rectangle"]:
        """Cut across the longer side at the given fraction."""
        if self.re_max - self.re_min >= self.im_max - self.im_min:
            cut = self.re_min + fraction * (self.re_max - self.re_min)
            return (Rectangle(self.re_min, cut, self.im_min, self.im_max),
                    Rectangle(cut, self.re_max, self.im_min, self.im_max))
        cut = self.im_min + fraction * (self.im_max - self.im_min)
        return (Rectangle(self.re_min, self.re_max, self.im_min, cut),
                Rectangle(self.re_min, self.re_max, cut, self.im_max))

    def grown(self, delta: float) -> "Rectangle":
        return Rectangle(self.re_min - delta, self.re_max + delta, self.im_min - delta, self.im_max + delta)

    def to_dict(self) -> Dict[str, float]:
        return {"re_min": self.re_min, "re_max": self.re_max, "im_min": self.im_min, "im_max": self.im_max}


@dataclass
class TtRoot:
    value: complex
    residual: float
    refined: bool
    multiplicity: int = 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "re": self.value.real,
            "im": self.value.imag,
            "residual": self.residual,
            "refined": self.refined,
            "multiplicity": self.multiplicity,
        }


@dataclass
class TtEigenvalues:
    t: float
    region: Rectangle
    roots: List[TtRoot]
    winding_number: int
    evaluations: int = 0
    attempts: List[str] = field(default_factory=list)
    contour: Optional[Rectangle] = None

    @property
    def perturbed(self) -> bool:
        return bool(self.attempts)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "rectangle": self.region.to_dict(),
            "contour": (self.contour or self.region).to_dict(),
            "attempts": list(self.attempts),
            "winding_number": self.winding_number,
            "roots": [r.to_dict() for r in self.roots],
        }


class _ZeroOnContour(Exception):
    pass


class _CharacteristicFunction:
    """Memoised D_t(lambda) for one (set, t) pair."""

    def __init__(self, coefficients: CoefficientProvider, t: float, settings: IntegratorSettings):
        self.coefficients = coefficients
        self.t = t
        self.settings = settings
        self._cache: Dict[complex, complex] = {}

    def __call__(self, z: complex) -> complex:
        z = complex(z)
        if z not in self._cache:
            self._cache[z] = char_det(self.coefficients, z, self.t, self.settings)
        return self._cache[z]

    @property
    def evaluations(self) -> int:
        return len(self._cache)


class ArgumentPrincipleSolver:
    """
    Zeros of an entire function in a rectangle: winding numbers from phase
    continuation along adaptively sampled edges, recursive subdivision down to
    single-zero cells, then Newton refinement with central differences.
    """

    # off-centre cuts keep split lines off symmetric features such as Im(lambda) = 0
    SPLIT_FRACTIONS = (0.5137, 0.4779, 0.4121, 0.5893)
    # split pairs of a numerically perturbed multiple root sit about sqrt(integrator tolerance) apart
    CLUSTER_RADIUS = 1e-5

    def __init__(
        self,
        f: Callable[[complex], complex],
        region: Rectangle,
        residual_tol: float = 1e-10,
        samples_per_edge: int = 8,
        max_phase_jump: float = 0.5 * np.pi,
        max_retries: int = 3,
        max_depth: int = 40,
        newton_iterations: int = 50,
        zero_threshold: float = 1e-9,
    ):
        self.f = f
        self.region = region
        self.residual_tol = residual_tol
        self.samples_per_edge = samples_per_edge
        self.max_phase_jump = max_phase_jump
        self.max_retries = max_retries
        self.max_depth = max_depth
        self.newton_iterations = newton_iterations
        # samples this far below the largest on their edge count as a zero on the contour
        self.zero_threshold = zero_threshold
        self.min_segment = 1e-10 * region.diameter
        self.min_cell = 1e-7 * region.diameter

    # contour --------------------------------------------------------------------------

    def _value(self, z: complex) -> complex:
        value = self.f(z)
        if not np.isfinite(value):
            raise FloquetNumericalError(f"Characteristic function is not finite at lambda={z}")
        if value == 0:
            raise _ZeroOnContour(f"exact zero at {z}")
        return value

    def _edge_phase(self, a: complex, b: complex) -> float:
        # sample each edge from the same end so neighbouring cells reuse evaluations
        if (a.real, a.imag) > (b.real, b.imag):
            return -self._edge_phase(b, a)
        params = list(np.linspace(0.0, 1.0, self.samples_per_edge + 1))
        values = [self._value(a + s * (b - a)) for s in params]
        floor = self.zero_threshold * max(abs(v) for v in values)
        for s, v in zip(params, values):
            if abs(v) <= floor:
                raise _ZeroOnContour(f"|D_t| = {abs(v):.2e} at {a + s * (b - a)}")
        total = 0.0
        i = 0
        length = abs(b - a)
        while i < len(params) - 1:
            jump = float(np.angle(values[i + 1] / values[i]))
            if abs(jump) > self.max_phase_jump:
                if (params[i + 1] - params[i]) * length < self.min_segment:
                    raise _ZeroOnContour(f"phase jump {jump:.3f} unresolved near {a + params[i] * (b - a)}")
                mid = 0.5 * (params[i] + params[i + 1])
                params.insert(i + 1, mid)
                value = self._value(a + mid * (b - a))
                if abs(value) <= floor:
                    raise _ZeroOnContour(f"|D_t| = {abs(value):.2e} at {a + mid * (b - a)}")
                values.insert(i + 1, value)
                continue
            total += jump
            i += 1
        return total

    def winding_number(self, cell: Rectangle) -> int:
        corners = cell.corners()
        total = sum(self._edge_phase(corners[i], corners[(i + 1) % 4]) for i in range(4))
        turns = total / TWO_PI
        w = int(round(turns))
        if abs(turns - w) > 0.25:
            raise _ZeroOnContour(f"non-integer winding {turns:.3f}")
        if w < 0:
            raise ContourFailureError(f"Negative winding number {w}: the characteristic function is not entire here")
        return w

    # subdivision ----------------------------------------------------------------------

    def _isolate(self, cell: Rectangle, winding: int, depth: int = 0) -> List[Tuple[Rectangle, int]]:
        if winding == 0:
            return []
        if winding == 1 or cell.diameter <= self.min_cell or depth >= self.max_depth:
            return [(cell, winding)]
        for fraction in self.SPLIT_FRACTIONS:
            first, second = cell.split(fraction)
            try:
                w1, w2 = self.winding_number(first), self.winding_number(second)
            except _ZeroOnContour as e:
                logger.debug("Split at %.4f rejected: %s", fraction, e)
                continue
            if w1 + w2 != winding:
                logger.debug("Split at %.4f inconsistent: %d + %d != %d", fraction, w1, w2, winding)
                continue
            return self._isolate(first, w1, depth + 1) + self._isolate(second, w2, depth + 1)
        logger.warning("Could not separate %d zeros in %s; reporting a cluster", winding, cell)
        return [(cell, winding)]

    # refinement -----------------------------------------------------------------------

    def _newton(self, z: complex, cell: Rectangle, multiplicity: int) -> Tuple[complex, complex, bool]:
        slack = 0.1 * cell.diameter
        fz = self.f(z)
        for _ in range(self.newton_iterations):
            if abs(fz) <= 1e-3 * self.residual_tol:
                break
            h = 1e-6 * max(1.0, abs(z))
            derivative = (self.f(z + h) - self.f(z - h)) / (2.0 * h)
            if derivative == 0 or not np.isfinite(derivative):
                break
            step = multiplicity * fz / derivative
            z_new = z - step
            if not cell.contains(z_new, slack):
                return z, fz, False
            z, fz = z_new, self.f(z_new)
            if abs(step) <= 1e-15 * max(1.0, abs(z)):
                break
        return z, fz, abs(fz) <= self.residual_tol

    def _refine(self, cell: Rectangle, winding: int) -> TtRoot:
        current = cell
        for _ in range(self.max_depth):
            z, fz, ok = self._newton(current.center, current, winding)
            if ok:
                return TtRoot(value=z, residual=abs(fz), refined=True, multiplicity=winding)
            if winding > 1 or current.diameter <= self.min_cell:
                break
            # Newton escaped: shrink onto the half that keeps the zero and retry
            narrowed = None
            for fraction in self.SPLIT_FRACTIONS:
                try:
                    halves = current.split(fraction)
                    narrowed = next((h for h in halves if self.winding_number(h) == 1), None)
                except _ZeroOnContour:
                    continue
                if narrowed is not None:
                    break
            if narrowed is None:
                break
            current = narrowed
        z = current.center
        return TtRoot(value=z, residual=abs(self.f(z)), refined=False, multiplicity=winding)

    # driver ---------------------------------------------------------------------------

    def solve(self) -> Tuple[List[TtRoot], int, Rectangle, List[str]]:
        attempts: List[str] = []
        contour = self.region
        delta = 1e-4 * self.region.diameter
        for attempt in range(self.max_retries + 1):
            try:
                total = self.winding_number(contour)
                break
            except _ZeroOnContour as e:
                attempts.append(f"attempt {attempt}: {e}")
                # grow outward so zeros on the requested boundary stay inside
                logger.info("Zero on contour, growing by %g (%s)", delta * (attempt + 1), e)
                contour = self.region.grown(delta * (attempt + 1))
        else:
            raise ContourFailureError(
                f"D_t vanishes on the boundary of {self.region} after {self.max_retries} perturbations",
                attempts,
            )

        cells = self._isolate(contour, total)
        roots = [self._refine(cell, w) for cell, w in cells]
        return self._merge_clusters(_merge_roots(roots)), total, contour, attempts

    def _merge_clusters(self, roots: List[TtRoot]) -> List[TtRoot]:
        """Collapse roots closer than CLUSTER_RADIUS (relative) into one multiple root."""
        clusters: List[List[TtRoot]] = []
        for root in roots:
            home = next((c for c in clusters
                         if abs(c[0].value - root.value) <= self.CLUSTER_RADIUS * max(1.0, abs(root.value))), None)
            if home is None:
                clusters.append([root])
            else:
                home.append(root)
        merged = []
        for cluster in clusters:
            if len(cluster) == 1:
                merged.append(cluster[0])
                continue
            multiplicity = sum(r.multiplicity for r in cluster)
            z = sum(r.value * r.multiplicity for r in cluster) / multiplicity
            residual = abs(self.f(z))
            logger.info("Merged %d nearby roots into a cluster of multiplicity %d at %s", len(cluster), multiplicity, z)
            merged.append(TtRoot(value=z, residual=residual, refined=residual <= self.residual_tol,
                                 multiplicity=multiplicity))
        return merged


def _merge_roots(roots: List[TtRoot], radius: float = 1e-7) -> List[TtRoot]:
    merged: List[TtRoot] = []
    for root in sorted(roots, key=lambda r: (r.value.real, r.value.imag)):
        twin = next((m for m in merged if abs(m.value - root.value) < radius), None)
        if twin is None:
            merged.append(root)
        else:
            twin.multiplicity += root.multiplicity
            twin.refined = twin.refined and root.refined
    return merged


def tt_eigenvalues(
    coefficients: CoefficientProvider,
    t: float,
    re_range: Tuple[float, float],
    im_range: Tuple[float, float],
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    residual_tol: float = 1e-10,
) -> TtEigenvalues:
    """All zeros of D_t in the closed rectangle re_range x im_range."""
    if not 0.0 <= t < TWO_PI:
        raise ParameterError(f"Quasimomentum t must lie in [0, 2*pi), got {t}")
    region = Rectangle(re_range[0], re_range[1], im_range[0], im_range[1])
    f = _CharacteristicFunction(coefficients, t, settings)
    solver = ArgumentPrincipleSolver(f, region, residual_tol=residual_tol)
    roots, winding, contour, attempts = solver.solve()
    logger.info("t=%.6f: winding %d, %d roots, %d evaluations of D_t", t, winding, len(roots), f.evaluations)
    if attempts:
        logger.warning("t=%.6f: contour grown to %s after %d zero-on-boundary attempts", t, contour, len(attempts))
    return TtEigenvalues(t=t, region=region, roots=roots, winding_number=winding,
                         evaluations=f.evaluations, attempts=attempts, contour=contour)


def _curve_point(coefficients, re_range, im_range, settings, residual_tol, t) -> Tuple[List[Dict], Optional[str]]:
    try:
        result = tt_eigenvalues(coefficients, t, re_range, im_range, settings, residual_tol)
    except FloquetNumericalError as e:
        return [], str(e)
    rows = [{
        "t": t,
        "re_lambda": r.value.real,
        "im_lambda": r.value.imag,
        "residual": r.residual,
        "refined": r.refined,
        "multiplicity": r.multiplicity,
    } for r in result.roots]
    return rows, None


def spectral_curves(
    coefficients: CoefficientProvider,
    t_values: Iterable[float],
    re_range: Tuple[float, float],
    im_range: Tuple[float, float],
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    residual_tol: float = 1e-10,
    workers: int = 1,
) -> pd.DataFrame:
    """
    Trace the spectrum as the union over t of the T_t eigenvalues.

    Failed t values are skipped and listed in frame.attrs["errors"].
    """
    ts = [float(t) for t in t_values]
    evaluate = partial(_curve_point, coefficients, re_range, im_range, settings, residual_tol)
    results = _map_ordered(evaluate, ts, workers)
    rows = [row for chunk, _ in results for row in chunk]
    columns = ["t", "re_lambda", "im_lambda", "residual", "refined", "multiplicity"]
    frame = pd.DataFrame(rows, columns=columns)
    if not frame.empty:
        frame = frame.sort_values(["t", "re_lambda", "im_lambda"], kind="mergesort").reset_index(drop=True)
    frame.attrs["errors"] = {t: message for t, (_, message) in zip(ts, results) if message is not None}
    return frame
