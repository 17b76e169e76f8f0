"""
Run configuration: command-line flags over FLOQUET_* environment variables
over built-in defaults.
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

from dotenv import load_dotenv

from floquet_errors import ConfigError
from propagator import IntegratorSettings

# Load environment variables
load_dotenv()

OUTPUT_FORMATS = ("json", "csv")


def _env_value(name: str, default: Any, parse: Callable[[str], Any]) -> Any:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return parse(raw.strip())
    except ValueError:
        raise ConfigError(f"Environment variable {name}={raw!r} is not a valid {parse.__name__}")


def env_defaults() -> dict:
    """Defaults after applying the FLOQUET_* environment variables."""
    return {
        "rel_tol": _env_value("FLOQUET_REL_TOL", 1e-10, float),
        "abs_tol": _env_value("FLOQUET_ABS_TOL", 1e-10, float),
        "initial_step": _env_value("FLOQUET_INITIAL_STEP", 1e-3, float),
        "max_steps": _env_value("FLOQUET_MAX_STEPS", 1_000_000, int),
        "tol_circle": _env_value("FLOQUET_TOL_CIRCLE", 1e-6, float),
        "seed": _env_value("FLOQUET_SEED", 42, int),
        "workers": _env_value("FLOQUET_WORKERS", 1, int),
        "output_format": _env_value("FLOQUET_OUTPUT_FORMAT", "json", str).lower(),
    }


@dataclass
class RunConfig:
    coefficients_path: Optional[Path] = None
    settings: IntegratorSettings = field(default_factory=IntegratorSettings)
    tol_circle: float = 1e-6
    output_format: str = "json"
    output_path: Optional[Path] = None
    plot_path: Optional[Path] = None
    seed: int = 42
    workers: int = 1

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        """Build from an argparse namespace; unset flags fall back to the environment."""
        defaults = env_defaults()

        def pick(name: str):
            value = getattr(args, name, None)
            return defaults[name] if value is None else value

        config_path = getattr(args, "config", None)
        out = getattr(args, "out", None)
        plot = getattr(args, "plot", None)
        try:
            settings = IntegratorSettings(
                rel_tol=float(pick("rel_tol")),
                abs_tol=float(pick("abs_tol")),
                initial_step=float(defaults["initial_step"]),
                max_steps=int(defaults["max_steps"]),
            )
        except ValueError as e:
            raise ConfigError(str(e))
        return cls(
            coefficients_path=Path(config_path) if config_path else None,
            settings=settings,
            tol_circle=float(pick("tol_circle")),
            output_format=str(pick("output_format")).lower(),
            output_path=Path(out) if out else None,
            plot_path=Path(plot) if plot else None,
            seed=int(pick("seed")),
            workers=int(pick("workers")),
        )

    def validate(self, require_coefficients: bool = True) -> "RunConfig":
        if require_coefficients:
            if self.coefficients_path is None:
                raise ConfigError("No coefficient file given; pass --config PATH")
            if not self.coefficients_path.is_file():
                raise ConfigError(f"Coefficient file not found: {self.coefficients_path}")
        if not self.tol_circle > 0:
            raise ConfigError(f"tol_circle must be positive, got {self.tol_circle}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"Unknown output format {self.output_format!r}; expected one of {OUTPUT_FORMATS}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        return self
