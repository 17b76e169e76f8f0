import json
import logging
from typing import Any, Dict, Iterable, List, Tuple

import numpy as np

from coefficients import BrokenPtSet, CoefficientSet, FourierEntry
from floquet_errors import ParameterError

logger = logging.getLogger(__name__)

# (n, m) pairs exercised by the verification suite
DEFAULT_SHAPES: Tuple[Tuple[int, int], ...] = ((1, 1), (1, 3), (3, 1), (3, 3), (2, 1), (1, 2), (2, 2))
POTENTIAL_KINDS: Tuple[str, ...] = ("zero", "constant", "random")


def random_pt_set(n: int, m: int, L: int, amplitude: float, seed: int) -> CoefficientSet:
    """Random PT-symmetric set; every a_l, b_l uniform on [-amplitude, amplitude]."""
    if n < 1 or m < 1:
        raise ParameterError(f"Need n >= 1 and m >= 1, got n={n}, m={m}")
    if L < 0:
        raise ParameterError(f"Fourier degree L must be >= 0, got {L}")
    if not amplitude > 0:
        raise ParameterError(f"Amplitude must be positive, got {amplitude}")

    rng = np.random.default_rng(seed)
    entries = []
    for _ in range(n):
        matrix = []
        for _ in range(m):
            row = []
            for _ in range(m):
                a = rng.uniform(-amplitude, amplitude, L + 1)
                b = rng.uniform(-amplitude, amplitude, L)
                row.append(FourierEntry(a=tuple(a), b=tuple(b)))
            matrix.append(tuple(row))
        entries.append(tuple(matrix))
    return CoefficientSet(n=n, m=m, entries=tuple(entries))


class CoefficientGenerator:
    def __init__(self, seed: int = 42, amplitude: float = 0.5, degree: int = 2):
        """Initialize the generator with a seed for reproducibility."""
        self.seed = seed
        self.amplitude = amplitude
        self.degree = degree
        self._rng = np.random.default_rng(seed)

    def _next_seed(self) -> int:
        return int(self._rng.integers(0, 2**31 - 1))

    def zero_set(self, n: int, m: int) -> CoefficientSet:
        return CoefficientSet.zeros(n, m)

    def constant_set(self, n: int, m: int) -> CoefficientSet:
        """Real constant coefficients (PT-symmetric since p(-x) = p(x) = conj(p(x)))."""
        constants = self._rng.uniform(-self.amplitude, self.amplitude, (n, m, m))
        return CoefficientSet.from_constant_matrices(constants)

    def random_set(self, n: int, m: int) -> CoefficientSet:
        return random_pt_set(n, m, self.degree, self.amplitude, self._next_seed())

    def broken_set(self, base: CoefficientSet) -> BrokenPtSet:
        return BrokenPtSet(base)

    def generate(self, kind: str, n: int, m: int) -> CoefficientSet:
        if kind == "zero":
            return self.zero_set(n, m)
        if kind == "constant":
            return self.constant_set(n, m)
        if kind == "random":
            return self.random_set(n, m)
        raise ParameterError(f"Unknown potential kind {kind!r}; expected one of {POTENTIAL_KINDS}")

    def generate_case_matrix(
        self,
        shapes: Iterable[Tuple[int, int]] = DEFAULT_SHAPES,
        kinds: Iterable[str] = POTENTIAL_KINDS,
    ) -> List[Tuple[str, CoefficientSet]]:
        """Labelled sets for every (n, m) shape and potential kind, in a fixed order."""
        cases = []
        for n, m in shapes:
            for kind in kinds:
                cases.append((f"n={n},m={m},{kind}", self.generate(kind, n, m)))
        logger.debug("Generated %d verification cases with seed %d", len(cases), self.seed)
        return cases

    def export_to_json(self, coefficients: CoefficientSet, filename: str = "random_pt_coefficients.json"):
        """Export a coefficient set in the CLI config schema."""
        with open(filename, "w") as f:
            json.dump(coefficients.to_dict(), f, indent=2)
        logger.info("Coefficients exported to %s", filename)

    def get_set_summary(self, coefficients: CoefficientSet) -> Dict[str, Any]:
        """Get a summary of a coefficient set."""
        cos_part, sin_part = coefficients._packed
        return {
            'n': coefficients.n,
            'm': coefficients.m,
            'system_dimension': coefficients.dimension,
            'fourier_degree': coefficients.degree,
            'constant': coefficients.is_constant(),
            'max_abs_coefficient': float(max(np.abs(cos_part).max(), np.abs(sin_part).max())),
            'odd_parity': (coefficients.n * coefficients.m) % 2 == 1,
        }
