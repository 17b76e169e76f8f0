"""
Verification harness: closed-form oracles and numerical checks of the PT
reflection symmetry, the conjugation symmetry of the spectrum and the
identities the monodromy computation relies on.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from coefficient_generator import CoefficientGenerator
from coefficients import CoefficientProvider, CoefficientSet, FourierEntry
from companion import assemble_companion, companion_trace_integral
from eigensolve import determinant, eigenvalues, match_multisets
from floquet_errors import FloquetError, PreconditionError
from propagator import (
    DEFAULT_SETTINGS,
    IntegratorSettings,
    canonical_boundary_matrix,
    integrate_fundamental,
    integrate_interval,
    trajectory,
)
from spectrum import (
    DEFAULT_TOL_CIRCLE,
    char_det,
    dimension_split,
    multipliers,
    scan_region,
    spectral_distance,
    tt_eigenvalues,
)

logger = logging.getLogger(__name__)

CHECK_NAMES: Tuple[str, ...] = (
    "scalar_oracle",
    "constant_oracle",
    "liouville",
    "multiplier_involution",
    "reflected_monodromy",
    "pt_reflection_solution",
    "char_eq_equivalence",
    "real_line_coverage",
    "dimension_balance",
    "scan_symmetry",
    "tt_conjugate_pairs",
)


def _jsonable(value: Any) -> Any:
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, (float, np.floating)):
        return float(value) if np.isfinite(value) else None
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


@dataclass
class CheckReport:
    name: str
    passed: bool
    worst_residual: float
    tol: float
    witness: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    case: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "case": self.case,
            "passed": self.passed,
            "worst_residual": _jsonable(self.worst_residual),
            "tol": self.tol,
            "witness": _jsonable(self.witness),
            "notes": list(self.notes),
        }


def _report(name: str, residual: float, tol: float, witness: Dict[str, Any], notes: Optional[List[str]] = None) -> CheckReport:
    residual = float(residual)
    return CheckReport(name=name, passed=bool(residual <= tol), worst_residual=residual, tol=tol,
                       witness=witness, notes=notes or [])


# Oracles ----------------------------------------------------------------------------------

def oracle_scalar_first_order(entry: FourierEntry, lam: complex) -> complex:
    """Multiplier of y' = -i(lambda - p(x)) y, i.e. exp(i(a_0 - lambda))."""
    return complex(np.exp(1j * (entry.mean - complex(lam))))


def oracle_constant_coefficients(coefficients: CoefficientSet, lam: complex) -> np.ndarray:
    """exp of the companion eigenvalues; valid only for x-independent coefficients."""
    if not coefficients.is_constant():
        raise PreconditionError("Constant-coefficient oracle needs every entry to have only a_0")
    A = assemble_companion(coefficients, lam, 0.0).A
    return np.exp(eigenvalues(A))


def check_scalar_oracle(
    coefficients: CoefficientSet,
    lams: Sequence[complex],
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    tol: float = 1e-8,
) -> CheckReport:
    if coefficients.n != 1 or coefficients.m != 1:
        raise PreconditionError(f"Scalar oracle needs n = m = 1, got n={coefficients.n}, m={coefficients.m}")
    entry = coefficients.entries[0][0][0]
    worst, witness = 0.0, {}
    for lam in lams:
        mu = integrate_fundamental(coefficients, lam, settings).X1[0, 0]
        expected = oracle_scalar_first_order(entry, lam)
        residual = abs(mu - expected)
        if residual >= worst:
            worst, witness = residual, {"lambda": complex(lam), "computed": complex(mu), "oracle": expected}
    return _report("scalar_oracle", worst, tol, witness)


def check_constant_oracle(
    coefficients: CoefficientSet,
    lams: Sequence[complex],
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    tol: float = 1e-7,
) -> CheckReport:
    worst, witness = 0.0, {}
    for lam in lams:
        expected = oracle_constant_coefficients(coefficients, lam)
        computed = multipliers(coefficients, lam, settings).multipliers
        _, residual = match_multisets(computed, expected)
        if residual >= worst:
            worst, witness = residual, {"lambda": complex(lam), "computed": computed, "oracle": expected}
    return _report("constant_oracle", worst, tol, witness)


# Identities -------------------------------------------------------------------------------

def check_liouville(
    coefficients: CoefficientProvider,
    lam: complex,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    tol: float = 1e-8,
) -> CheckReport:
    """det X(1, lambda) against exp of the exact trace integral."""
    det = determinant(integrate_fundamental(coefficients, lam, settings).X1)
    expected = complex(np.exp(companion_trace_integral(coefficients, lam)))
    residual = abs(det - expected) / abs(expected)
    return _report("liouville", residual, tol, {"lambda": complex(lam), "det": det, "expected": expected})


def check_multiplier_involution(
    coefficients: CoefficientProvider,
    lam: complex,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    tol: float = 1e-6,
) -> CheckReport:
    """{1/conj(mu) : mu in M(lambda)} must equal M(conj lambda)."""
    lam = complex(lam)
    reflected = 1.0 / np.conj(multipliers(coefficients, lam, settings).multipliers)
    conjugate = multipliers(coefficients, lam.conjugate(), settings).multipliers
    _, residual = match_multisets(reflected, conjugate)
    return _report("multiplier_involution", residual, tol,
                   {"lambda": lam, "reflected": reflected, "conjugate_multipliers": conjugate})


def _reflection_signs(n: int, m: int) -> np.ndarray:
    """(-1)^k on the k-th derivative block of the stacked state."""
    return np.repeat((-1.0) ** np.arange(n), m)


def check_reflected_monodromy(
    coefficients: CoefficientProvider,
    lam: complex,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    tol: float = 1e-6,
) -> CheckReport:
    """X(1, conj lambda) = D conj(X(-1, lambda)) D with D = diag((-1)^k I_m)."""
    lam = complex(lam)
    dim = coefficients.n * coefficients.m
    signs = _reflection_signs(coefficients.n, coefficients.m)
    backward = integrate_interval(coefficients, lam, 0.0, -1.0, np.eye(dim, dtype=complex), settings)
    predicted = signs[:, None] * np.conj(backward) * signs[None, :]
    forward = integrate_fundamental(coefficients, lam.conjugate(), settings).X1
    residual = np.linalg.norm(predicted - forward) / max(1.0, np.linalg.norm(forward))
    return _report("reflected_monodromy", residual, tol, {"lambda": lam})


def check_pt_reflection_solution(
    coefficients: CoefficientProvider,
    lam: complex,
    init: Sequence[complex],
    N: int = 41,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    tol: float = 1e-8,
) -> CheckReport:
    """
    Phi(x) = conj(Psi(-x)) at conj(lambda), compared sample by sample on every
    derivative block, plus equality of the L2 norms over [0, 1] and [-1, 0].

    The pointwise residual is relative: the worst sample difference divided by
    max(1, max |Psi|); it equals the absolute bound whenever max |Psi| <= 1.
    """
    lam = complex(lam)
    init = np.asarray(init, dtype=complex).reshape(-1)
    signs = _reflection_signs(coefficients.n, coefficients.m)

    psi = trajectory(coefficients, lam, init, 0.0, -1.0, N, settings)
    phi = trajectory(coefficients, lam.conjugate(), signs * np.conj(init), 0.0, 1.0, N, settings)

    mirrored = signs[None, :] * np.conj(psi.states)
    scale = max(1.0, float(np.abs(psi.states).max()))
    pointwise = float(np.abs(phi.states - mirrored).max()) / scale

    m = coefficients.m
    norm_phi = np.sqrt(abs(trapezoid(np.sum(np.abs(phi.component(0, m)) ** 2, axis=1), phi.x)))
    norm_psi = np.sqrt(abs(trapezoid(np.sum(np.abs(psi.component(0, m)) ** 2, axis=1), psi.x)))
    isometry = abs(norm_phi - norm_psi) / max(1.0, norm_psi)

    worst_index = int(np.argmax(np.abs(phi.states - mirrored).max(axis=1)))
    witness = {
        "lambda": lam,
        "x": float(phi.x[worst_index]),
        "pointwise_residual": pointwise,
        "norm_phi": float(norm_phi),
        "norm_psi": float(norm_psi),
    }
    return _report("pt_reflection_solution", max(pointwise, isometry), tol, witness)


def check_char_eq_equivalence(
    coefficients: CoefficientProvider,
    lam: complex,
    t: float,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    tol: float = 1e-6,
) -> CheckReport:
    """Boundary-matrix determinant against det(X(1) - e^{it} I)."""
    boundary = determinant(canonical_boundary_matrix(coefficients, lam, t, settings))
    direct = char_det(coefficients, lam, t, settings)
    residual = abs(boundary - direct) / max(1.0, abs(direct))
    return _report("char_eq_equivalence", residual, tol,
                   {"lambda": complex(lam), "t": float(t), "boundary_det": boundary, "char_det": direct})


# Spectral symmetries ----------------------------------------------------------------------

def check_real_line_coverage(
    coefficients: CoefficientProvider,
    lam_grid: Iterable[float],
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    tol_circle: float = DEFAULT_TOL_CIRCLE,
) -> CheckReport:
    """With n*m odd every real lambda must carry a unit-modulus multiplier."""
    if (coefficients.n * coefficients.m) % 2 == 0:
        raise PreconditionError(f"Real-line coverage needs odd n*m, got {coefficients.n * coefficients.m}")
    worst, witness = 0.0, {}
    for lam in lam_grid:
        ms = multipliers(coefficients, float(lam), settings)
        distance = spectral_distance(ms)
        if distance >= worst:
            worst = distance
            witness = {"lambda": float(lam), "on_circle": dimension_split(ms, tol_circle).on}
    return _report("real_line_coverage", worst, tol_circle, witness)


def check_dimension_balance(
    coefficients: CoefficientProvider,
    lam_samples: Iterable[float],
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    tol_circle: float = DEFAULT_TOL_CIRCLE,
) -> CheckReport:
    """Off the spectrum, as many multipliers inside the unit circle as outside (n*m even)."""
    if (coefficients.n * coefficients.m) % 2 == 1:
        raise PreconditionError(f"Dimension balance needs even n*m, got {coefficients.n * coefficients.m}")
    worst, witness, skipped = 0, {}, []
    for lam in lam_samples:
        ms = multipliers(coefficients, float(lam), settings)
        if spectral_distance(ms) <= 10.0 * tol_circle:
            skipped.append(float(lam))
            continue
        split = dimension_split(ms, tol_circle)
        imbalance = abs(split.inside - split.outside)
        if imbalance >= worst:
            worst = imbalance
            witness = {"lambda": float(lam), "inside": split.inside, "on": split.on, "outside": split.outside}
    notes = []
    if skipped:
        notes.append(f"skipped {len(skipped)} samples inside the spectrum: {skipped}")
    if not witness:
        notes.append("vacuous: every sample lies in the spectrum")
    return _report("dimension_balance", worst, 0.0, witness, notes)


def check_scan_symmetry(
    coefficients: CoefficientProvider,
    re_range: Tuple[float, float],
    im_half_height: float,
    N_re: int = 5,
    N_im: int = 4,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    tol: float = 1e-6,
) -> CheckReport:
    """
    On a grid mirrored about the real axis the log-modulus distance min |log|mu||
    must be mirror-symmetric and so must the membership flags.
    """
    scan = scan_region(coefficients, re_range, (-im_half_height, im_half_height), N_re, N_im, settings=settings)
    grid = scan.log_distance_grid()
    difference = np.abs(grid - grid[::-1])
    notes = [f"{len(scan.errors)} grid points failed to integrate"] if scan.errors else []
    if scan.errors or not np.any(np.isfinite(difference)):
        return _report("scan_symmetry", np.inf, tol, {}, notes)
    row, col = np.unravel_index(int(np.nanargmax(difference)), difference.shape)
    flags = scan.flags.reshape(grid.shape)
    mismatched = int(np.count_nonzero(flags != flags[::-1]))
    if mismatched:
        notes.append(f"{mismatched} grid points change membership under conjugation")
    witness = {"lambda": complex(scan.points.reshape(grid.shape)[row, col]),
               "log_distance": float(grid[row, col]), "mirrored_log_distance": float(grid[::-1][row, col])}
    if mismatched:
        return _report("scan_symmetry", np.inf, tol, witness, notes)
    return _report("scan_symmetry", float(np.nanmax(difference)), tol, witness, notes)


def check_tt_conjugate_pairs(
    coefficients: CoefficientProvider,
    t: float,
    re_range: Tuple[float, float],
    im_half_height: float,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    tol: float = 1e-6,
) -> CheckReport:
    """For fixed t, the zeros of D_t in a rectangle symmetric about the real axis come in conjugate pairs."""
    result = tt_eigenvalues(coefficients, t, re_range, (-im_half_height, im_half_height), settings)
    values = np.array([r.value for r in result.roots], dtype=complex)
    notes = [f"winding number {result.winding_number}"]
    if values.size == 0:
        notes.append("no eigenvalues in the rectangle")
        return _report("tt_conjugate_pairs", 0.0, tol, {"t": float(t)}, notes)
    unrefined = [r for r in result.roots if not r.refined]
    if unrefined:
        notes.append(f"{len(unrefined)} roots not refined to the residual tolerance")
    gaps = np.abs(np.conj(values)[:, None] - values[None, :]).min(axis=1) / np.maximum(1.0, np.abs(values))
    worst = int(np.argmax(gaps))
    return _report("tt_conjugate_pairs", float(gaps[worst]), tol,
                   {"t": float(t), "root": complex(values[worst]), "roots": values}, notes)


# Suite ------------------------------------------------------------------------------------

def _run_check(case: str, name: str, fn: Callable[[], CheckReport], tol: float) -> CheckReport:
    try:
        report = fn()
    except FloquetError as e:
        logger.warning("Check %s failed on %s: %s", name, case, e)
        report = CheckReport(name=name, passed=False, worst_residual=float("inf"), tol=tol,
                             notes=[f"{type(e).__name__}: {e}"])
    report.case = case
    logger.info("%s %s [%s] residual=%.3e", "PASS" if report.passed else "FAIL", name, case, report.worst_residual)
    return report


def run_verification_suite(
    seed: int = 42,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    cases: Optional[Sequence[Tuple[str, CoefficientProvider]]] = None,
    break_pt: bool = False,
    tol_circle: float = DEFAULT_TOL_CIRCLE,
    real_points: int = 11,
) -> List[CheckReport]:
    """
    Run every applicable check on each case; failures are recorded, never raised.

    cases defaults to the seeded (n, m) x {zero, constant, random} matrix; with
    break_pt every case is wrapped in the non-PT negative control.
    """
    generator = CoefficientGenerator(seed=seed)
    if cases is None:
        cases = generator.generate_case_matrix()
    if break_pt:
        cases = [(f"{label},broken", generator.broken_set(base)) for label, base in cases]

    rng = np.random.default_rng(seed)
    real_grid = np.linspace(-5.0, 5.0, real_points)
    reports: List[CheckReport] = []

    for label, coefficients in cases:
        n, m = coefficients.n, coefficients.m
        lam = complex(rng.uniform(-4.0, 4.0), rng.uniform(-1.5, 1.5))
        lam_real = float(rng.uniform(-4.0, 4.0))
        t = float(rng.uniform(0.0, 2.0 * np.pi))
        init = rng.normal(size=n * m) + 1j * rng.normal(size=n * m)
        oracle_lams = [complex(rng.uniform(-5.0, 5.0), rng.uniform(-2.0, 2.0)) for _ in range(3)]

        def add(name: str, fn: Callable[[], CheckReport], tol: float):
            reports.append(_run_check(label, name, fn, tol))

        if isinstance(coefficients, CoefficientSet) and n == 1 and m == 1:
            add("scalar_oracle", lambda: check_scalar_oracle(coefficients, oracle_lams, settings), 1e-8)
        if isinstance(coefficients, CoefficientSet) and coefficients.is_constant():
            add("constant_oracle", lambda: check_constant_oracle(coefficients, oracle_lams, settings), 1e-7)
        add("liouville", lambda: check_liouville(coefficients, lam, settings), 1e-8)
        add("multiplier_involution", lambda: check_multiplier_involution(coefficients, lam, settings), 1e-6)
        add("multiplier_involution", lambda: check_multiplier_involution(coefficients, lam_real, settings), 1e-6)
        add("reflected_monodromy", lambda: check_reflected_monodromy(coefficients, lam, settings), 1e-6)
        add("pt_reflection_solution",
            lambda: check_pt_reflection_solution(coefficients, lam, init, settings=settings, tol=1e-7), 1e-7)
        add("char_eq_equivalence", lambda: check_char_eq_equivalence(coefficients, lam, t, settings), 1e-6)
        if (n * m) % 2 == 1:
            add("real_line_coverage",
                lambda: check_real_line_coverage(coefficients, real_grid, settings, tol_circle), tol_circle)
        else:
            add("dimension_balance",
                lambda: check_dimension_balance(coefficients, real_grid, settings, tol_circle), 0.0)
        add("scan_symmetry",
            lambda: check_scan_symmetry(coefficients, (-3.0, 3.0), 1.25, settings=settings), 1e-6)
        if n * m == 1:
            # D_t is cheap only in the scalar case
            add("tt_conjugate_pairs",
                lambda: check_tt_conjugate_pairs(coefficients, t, (-3.1, 9.7), 1.3, settings), 1e-6)

    failed = sum(not r.passed for r in reports)
    logger.info("Verification suite: %d checks, %d failed", len(reports), failed)
    return reports


def suite_passed(reports: Sequence[CheckReport]) -> bool:
    return all(r.passed for r in reports)


def reports_to_frame(reports: Sequence[CheckReport]) -> pd.DataFrame:
    """One row per check run, in execution order."""
    return pd.DataFrame(
        [{"case": r.case, "check": r.name, "passed": r.passed, "worst_residual": r.worst_residual, "tol": r.tol}
         for r in reports],
        columns=["case", "check", "passed", "worst_residual", "tol"],
    )


def reports_to_json(reports: Sequence[CheckReport]) -> str:
    payload = {
        "passed": suite_passed(reports),
        "total": len(reports),
        "failed": sum(not r.passed for r in reports),
        "checks": [r.to_dict() for r in reports],
    }
    return json.dumps(payload, indent=2)
