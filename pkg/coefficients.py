"""
Coefficient model for the PT-symmetric periodic operator.

Each entry p_{k,i,j} of P_k is stored as a truncated real Fourier series in
the basis {1, cos(2*pi*l*x), i*sin(2*pi*l*x)}. That span is exactly the set of
1-periodic trigonometric polynomials with p(-x) = conj(p(x)), so a
CoefficientSet is PT-symmetric by construction. General complex Fourier data
and tabulated samples only enter through check_pt_symmetry.
"""

import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, List, Protocol, Sequence, Tuple, Union

import numpy as np

from floquet_errors import MalformedInputError, OrderIndexError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


def _finite_tuple(values: Sequence[float], label: str) -> Tuple[float, ...]:
    if isinstance(values, (str, bytes, dict)):
        raise MalformedInputError(f"{label} must be a list of real numbers, got {values!r}")
    try:
        out = tuple(float(v) for v in values)
    except (TypeError, ValueError) as e:
        raise MalformedInputError(f"{label} must be a list of real numbers: {e}")
    if not all(np.isfinite(out)):
        raise MalformedInputError(f"{label} contains non-finite values")
    return out


def _is_sequence(value: Any) -> bool:
    return isinstance(value, (list, tuple))


@dataclass(frozen=True)
class FourierEntry:
    """p(x) = a_0 + sum_l a_l cos(2 pi l x) + i b_l sin(2 pi l x)."""

    a: Tuple[float, ...] = (0.0,)
    b: Tuple[float, ...] = ()

    def __post_init__(self):
        a = _finite_tuple(self.a, "cosine coefficients 'a'")
        b = _finite_tuple(self.b, "sine coefficients 'b'")
        if not a:
            raise MalformedInputError("A Fourier entry needs at least the mean coefficient a_0")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def degree(self) -> int:
        return max(len(self.a) - 1, len(self.b))

    @property
    def mean(self) -> float:
        return self.a[0]

    def is_constant(self) -> bool:
        return not any(self.a[1:]) and not any(self.b)

    def __call__(self, x: float) -> complex:
        return eval_entry(self, x)

    def to_dict(self) -> Dict[str, List[float]]:
        return {"a": list(self.a), "b": list(self.b)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FourierEntry":
        if not isinstance(data, dict) or "a" not in data:
            raise MalformedInputError(f"Invalid Fourier entry {data!r}; expected {{'a': [...], 'b': [...]}}")
        return cls(a=data["a"], b=data.get("b", []))


def eval_entry(entry: FourierEntry, x: float) -> complex:
    """Evaluate one entry at x."""
    value = complex(entry.a[0])
    if len(entry.a) > 1:
        l = np.arange(1, len(entry.a))
        value += complex(np.dot(entry.a[1:], np.cos(TWO_PI * l * x)))
    if entry.b:
        l = np.arange(1, len(entry.b) + 1)
        value += 1j * float(np.dot(entry.b, np.sin(TWO_PI * l * x)))
    return value


class CoefficientProvider(Protocol):
    """Anything the companion assembly can evaluate: n, m and the stacked P_k(x)."""

    n: int
    m: int

    def matrices_at(self, x: float) -> np.ndarray: ...

    def mean_matrix(self, k: int) -> np.ndarray: ...


@dataclass(frozen=True)
class CoefficientSet:
    """The matrices P_1..P_n, each m x m, of Fourier entries."""

    n: int
    m: int
    entries: Tuple[Tuple[Tuple[FourierEntry, ...], ...], ...]

    def __post_init__(self):
        for label, value in (("n", self.n), ("m", self.m)):
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise MalformedInputError(f"{label} must be an integer, got {value!r}")
        if self.n < 1 or self.m < 1:
            raise MalformedInputError(f"Need n >= 1 and m >= 1, got n={self.n}, m={self.m}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))
        if not _is_sequence(self.entries) or len(self.entries) != self.n:
            raise MalformedInputError(f"Expected a list of {self.n} coefficient matrices in P")
        rows_out = []
        for k, matrix in enumerate(self.entries, start=1):
            if not _is_sequence(matrix) or len(matrix) != self.m or \
                    any(not _is_sequence(row) or len(row) != self.m for row in matrix):
                raise MalformedInputError(f"P_{k} is not an {self.m}x{self.m} nested list of entries")
            rows_out.append(tuple(
                tuple(e if isinstance(e, FourierEntry) else FourierEntry.from_dict(e) for e in row)
                for row in matrix
            ))
        object.__setattr__(self, "entries", tuple(rows_out))

    @property
    def dimension(self) -> int:
        """Size nm of the first-order system."""
        return self.n * self.m

    @property
    def degree(self) -> int:
        return max(e.degree for matrix in self.entries for row in matrix for e in row)

    @cached_property
    def _packed(self) -> Tuple[np.ndarray, np.ndarray]:
        # cosine and sine coefficient cubes of shape (n, m, m, L+1); sine index 0 unused
        L = self.degree
        cos_part = np.zeros((self.n, self.m, self.m, L + 1))
        sin_part = np.zeros((self.n, self.m, self.m, L + 1))
        for k, matrix in enumerate(self.entries):
            for i, row in enumerate(matrix):
                for j, e in enumerate(row):
                    cos_part[k, i, j, :len(e.a)] = e.a
                    sin_part[k, i, j, 1:len(e.b) + 1] = e.b
        return cos_part, sin_part

    def matrices_at(self, x: float) -> np.ndarray:
        """All P_k(x) stacked as an (n, m, m) complex array."""
        cos_part, sin_part = self._packed
        phase = TWO_PI * np.arange(cos_part.shape[-1]) * x
        return cos_part @ np.cos(phase) + 1j * (sin_part @ np.sin(phase))

    def mean_matrix(self, k: int) -> np.ndarray:
        """Exact mean value of P_k over one period (the a_0 coefficients)."""
        if not 1 <= k <= self.n:
            raise OrderIndexError(k, self.n)
        return self._packed[0][k - 1, :, :, 0].astype(complex)

    def is_constant(self) -> bool:
        return all(e.is_constant() for matrix in self.entries for row in matrix for e in row)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "P": [[[e.to_dict() for e in row] for row in matrix] for matrix in self.entries],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CoefficientSet":
        if not isinstance(data, dict) or not {"n", "m", "P"} <= set(data):
            raise MalformedInputError("Invalid coefficient format. Expected {'n': ..., 'm': ..., 'P': [...]}")
        return cls(n=data["n"], m=data["m"], entries=data["P"])

    @classmethod
    def from_constant_matrices(cls, matrices: Sequence[Sequence[Sequence[float]]]) -> "CoefficientSet":
        """Real constant coefficients, one m x m matrix per order."""
        arr = np.asarray(matrices, dtype=float)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise MalformedInputError(f"Expected an (n, m, m) array of constants, got shape {arr.shape}")
        entries = tuple(
            tuple(tuple(FourierEntry(a=(arr[k, i, j],)) for j in range(arr.shape[2])) for i in range(arr.shape[1]))
            for k in range(arr.shape[0])
        )
        return cls(n=arr.shape[0], m=arr.shape[1], entries=entries)

    @classmethod
    def zeros(cls, n: int, m: int) -> "CoefficientSet":
        return cls.from_constant_matrices(np.zeros((n, m, m)))


def eval_matrix(coefficients: CoefficientSet, k: int, x: float) -> np.ndarray:
    """P_k(x) as an m x m complex matrix."""
    if not 1 <= k <= coefficients.n:
        raise OrderIndexError(k, coefficients.n)
    return coefficients.matrices_at(x)[k - 1]


@dataclass(frozen=True)
class BrokenPtSet:
    """
    Negative control: a PT-symmetric set with
    sine_amplitude*sin(2 pi x) + i*imaginary_offset added to the diagonal of P_n.
    """

    base: CoefficientSet
    sine_amplitude: float = 1.0
    imaginary_offset: float = 0.25

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def m(self) -> int:
        return self.base.m

    @property
    def dimension(self) -> int:
        return self.base.dimension

    def matrices_at(self, x: float) -> np.ndarray:
        mats = self.base.matrices_at(x)
        shift = self.sine_amplitude * np.sin(TWO_PI * x) + 1j * self.imaginary_offset
        mats[-1] += shift * np.eye(self.m)
        return mats

    def mean_matrix(self, k: int) -> np.ndarray:
        mean = self.base.mean_matrix(k)
        if k == self.n:
            mean = mean + 1j * self.imaginary_offset * np.eye(self.m)
        return mean

    def is_constant(self) -> bool:
        return False


# Raw input accepted by the validator -------------------------------------------------

@dataclass(frozen=True, eq=False)
class ComplexFourierTable:
    """Exponential Fourier coefficients c_l, l = -L..L, shape (n, m, m, 2L+1)."""

    coefficients: np.ndarray

    @property
    def half_width(self) -> int:
        return (self.coefficients.shape[-1] - 1) // 2


@dataclass(frozen=True, eq=False)
class SampledTable:
    """Entry samples on a grid symmetric about 0, values of shape (n, m, m, N)."""

    x: np.ndarray
    values: np.ndarray


@dataclass
class PtSymmetryReport:
    passed: bool
    worst_residual: float
    tol: float
    form: str
    worst_offender: Dict[str, Any] = field(default_factory=dict)


RawCoefficients = Union[ComplexFourierTable, SampledTable]


def check_pt_symmetry(raw: RawCoefficients, tol: float = 1e-12) -> PtSymmetryReport:
    """Validate p(-x) = conj(p(x)) on raw coefficient or sample input."""
    if isinstance(raw, ComplexFourierTable):
        c = np.asarray(raw.coefficients, dtype=complex)
        if c.size == 0 or c.ndim != 4 or c.shape[-1] % 2 == 0:
            raise MalformedInputError("Fourier input must be a non-empty (n, m, m, 2L+1) table")
        residual = np.abs(c.imag)
        k, i, j, idx = np.unravel_index(int(np.argmax(residual)), residual.shape)
        offender = {"k": int(k) + 1, "i": int(i), "j": int(j), "l": int(idx) - raw.half_width}
        form = "fourier"
    elif isinstance(raw, SampledTable):
        x = np.asarray(raw.x, dtype=float)
        values = np.asarray(raw.values, dtype=complex)
        if x.size == 0 or values.size == 0 or values.ndim != 4 or values.shape[-1] != x.size:
            raise MalformedInputError("Sample input must be a non-empty (n, m, m, N) table matching the grid")
        order = np.argsort(x)
        x, values = x[order], values[..., order]
        if not np.allclose(x, -x[::-1], rtol=0.0, atol=1e-12 * max(1.0, float(np.max(np.abs(x))))):
            raise MalformedInputError("Sample grid is not symmetric about x = 0")
        residual = np.abs(values[..., ::-1] - np.conj(values))
        k, i, j, idx = np.unravel_index(int(np.argmax(residual)), residual.shape)
        offender = {"k": int(k) + 1, "i": int(i), "j": int(j), "x": float(x[idx])}
        form = "samples"
    else:
        raise MalformedInputError(f"Unsupported coefficient input type {type(raw).__name__}")

    worst = float(residual.max())
    return PtSymmetryReport(passed=worst <= tol, worst_residual=worst, tol=tol, form=form, worst_offender=offender)


def sample_coefficients(provider: CoefficientProvider, num_points: int = 65) -> SampledTable:
    """Tabulate any coefficient provider on a symmetric grid of [-1, 1]."""
    half = np.linspace(0.0, 1.0, num_points // 2 + 1)
    x = np.concatenate([-half[:0:-1], half])
    values = np.stack([provider.matrices_at(xi) for xi in x], axis=-1)
    return SampledTable(x=x, values=values)


def from_complex_fourier(table: ComplexFourierTable, tol: float = 1e-12) -> CoefficientSet:
    """Convert validated exponential Fourier data into the {1, cos, i sin} basis."""
    report = check_pt_symmetry(table, tol)
    if not report.passed:
        raise MalformedInputError(
            f"Coefficients are not PT-symmetric: |Im c_l| = {report.worst_residual:.3e} "
            f"at {report.worst_offender}"
        )
    c = np.asarray(table.coefficients).real
    n, m, _, width = c.shape
    L = (width - 1) // 2
    entries = []
    for k in range(n):
        matrix = []
        for i in range(m):
            row = []
            for j in range(m):
                series = c[k, i, j]
                positive, negative = series[L + 1:], series[:L][::-1]
                a = np.concatenate([[series[L]], positive + negative])
                b = positive - negative
                row.append(FourierEntry(a=tuple(a), b=tuple(b)))
            matrix.append(tuple(row))
        entries.append(tuple(matrix))
    return CoefficientSet(n=n, m=m, entries=tuple(entries))


# JSON I/O ---------------------------------------------------------------------------------

def _read_json(path: Union[str, Path]) -> Any:
    try:
        with open(path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise MalformedInputError(f"Invalid JSON in {path}: {e}")


def _complex_array(nested: Any, label: str) -> np.ndarray:
    try:
        arr = np.asarray(nested, dtype=float)
    except (TypeError, ValueError) as e:
        raise MalformedInputError(f"'{label}' must be a rectangular array of [re, im] pairs: {e}")
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise MalformedInputError(f"'{label}' entries must be [re, im] pairs")
    if not np.all(np.isfinite(arr)):
        raise MalformedInputError(f"'{label}' contains non-finite values")
    return arr[..., 0] + 1j * arr[..., 1]


def load_coefficients(path: Union[str, Path]) -> CoefficientSet:
    """Read a coefficient file in the {"n", "m", "P"} schema."""
    coefficients = CoefficientSet.from_dict(_read_json(path))
    logger.debug("Loaded n=%d m=%d degree=%d from %s", coefficients.n, coefficients.m, coefficients.degree, path)
    return coefficients


def save_coefficients(coefficients: CoefficientSet, path: Union[str, Path]) -> None:
    with open(path, "w") as f:
        json.dump(coefficients.to_dict(), f, indent=2)


def load_raw_coefficients(path: Union[str, Path]) -> RawCoefficients:
    """Read raw complex Fourier ("form": "fourier") or sampled ("form": "samples") input."""
    data = _read_json(path)
    if not isinstance(data, dict) or "form" not in data:
        raise MalformedInputError("Raw coefficient input needs a 'form' of 'fourier' or 'samples'")
    if data["form"] == "fourier":
        return ComplexFourierTable(coefficients=_complex_array(data.get("c", []), "c"))
    if data["form"] == "samples":
        return SampledTable(
            x=np.asarray(data.get("x", []), dtype=float),
            values=_complex_array(data.get("values", []), "values"),
        )
    raise MalformedInputError(f"Unknown raw coefficient form {data['form']!r}")


def load_any_coefficients(path: Union[str, Path], tol: float = 1e-12) -> CoefficientSet:
    """Load either schema; raw Fourier input is validated and converted."""
    data = _read_json(path)
    if isinstance(data, dict) and data.get("form") == "fourier":
        return from_complex_fourier(load_raw_coefficients(path), tol)
    if isinstance(data, dict) and data.get("form") == "samples":
        raise MalformedInputError("Sampled input can be validated but not converted into a coefficient set")
    return CoefficientSet.from_dict(data)
