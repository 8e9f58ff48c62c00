"""Pydantic v2 models for rate parameters, model variants, configs and reports."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from dicke_sim.errors import ConfigError

TWO_PI = 2.0 * math.pi

# Labels of the nine coefficients that distinguish Model A from Model B.
TERM_LABELS: tuple[str, ...] = ("A", "B", "C", "D", "E", "F", "G", "H", "I")

Sigma = Literal[0, 1]


def rate_from_2pi_mhz(value: float) -> float:
    """Convert a rate quoted in 2π MHz to ns⁻¹."""
    return value * TWO_PI / 1000.0


# ---------------------------------------------------------------------------
# Physics parameters
# ---------------------------------------------------------------------------


class SpinManifoldParams(BaseModel):
    """Rate constants of one spin-projection manifold, all in ns⁻¹.

    ``weight`` is the probability p_σ of finding a domain in this manifold.
    """

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    gamma: float = Field(gt=0)
    gamma_d: float = Field(default=0.0, ge=0)
    gamma_isc: float = Field(default=0.0, ge=0)
    weight: float = Field(default=1.0, ge=0, le=1)


class TermFlags(BaseModel):
    """Per-term choice between the Model A (False) and Model B (True) factor.

    Fields ``a`` … ``i`` follow the term labels A–I: A–E are the dephasing
    factors, F–G the intersystem-crossing factors, H the n_nc feed weight and
    I the fluorescence factor.
    """

    model_config = ConfigDict(frozen=True)

    a: bool = False
    b: bool = False
    c: bool = False
    d: bool = False
    e: bool = False
    f: bool = False
    g: bool = False
    h: bool = False
    i: bool = False

    @classmethod
    def from_code(cls, code: str) -> TermFlags:
        """Parse a nine-character ``a``/``b`` string, one character per term."""
        code = code.strip().lower()
        if len(code) != len(TERM_LABELS) or set(code) - {"a", "b"}:
            raise ConfigError(
                f"Term code must be {len(TERM_LABELS)} characters from 'a'/'b', "
                f"got {code!r}"
            )
        return cls(**{lb.lower(): ch == "b" for lb, ch in zip(TERM_LABELS, code)})

    @property
    def code(self) -> str:
        return "".join("b" if self.corrected(lb) else "a" for lb in TERM_LABELS)

    @property
    def label(self) -> str:
        """``"A"``, ``"B"`` or ``"custom:<code>"``."""
        if self == MODEL_A:
            return "A"
        if self == MODEL_B:
            return "B"
        return f"custom:{self.code}"

    @property
    def is_mixed(self) -> bool:
        return self.code not in (MODEL_A.code, MODEL_B.code)

    def corrected(self, term: str) -> bool:
        """Return ``True`` if *term* uses its Model B variant."""
        return bool(getattr(self, term.lower()))

    def with_term(self, term: str, corrected: bool = True) -> TermFlags:
        """Return a copy with a single term switched."""
        if term.upper() not in TERM_LABELS:
            raise ConfigError(f"Unknown term label: {term!r}")
        return self.model_copy(update={term.lower(): corrected})


MODEL_A = TermFlags()
MODEL_B = TermFlags(a=True, b=True, c=True, d=True, e=True, f=True, g=True, h=True, i=True)


# ---------------------------------------------------------------------------
# Integrator configuration
# ---------------------------------------------------------------------------


class IntegratorConfig(BaseModel):
    """Dense-output grid and tolerances for the Runge–Kutta integrator."""

    model_config = ConfigDict(frozen=True)

    t_end: float = Field(gt=0)
    samples: int = Field(default=2000, ge=2)
    rel_tol: float = Field(default=1e-9, gt=0)
    abs_tol: float = Field(default=1e-12, gt=0)
    max_step: float = Field(default=math.inf, gt=0)

    def times(self) -> np.ndarray:
        """Uniform sample grid on ``[0, t_end]`` (ns)."""
        return np.linspace(0.0, self.t_end, self.samples)


# ---------------------------------------------------------------------------
# Run configuration (CLI / config file)
# ---------------------------------------------------------------------------


def parse_model_choice(value: str) -> list[TermFlags]:
    """Translate a ``--model`` value into the flag sets to simulate."""
    choice = value.strip().lower()
    if choice == "a":
        return [MODEL_A]
    if choice == "b":
        return [MODEL_B]
    if choice == "both":
        return [MODEL_A, MODEL_B]
    if choice.startswith("custom:"):
        return [TermFlags.from_code(choice.removeprefix("custom:"))]
    raise ConfigError(f"Unknown model choice: {value!r}")


class RunConfig(BaseModel):
    """Complete, flat parameter set of one run.

    Rates are quoted in 2π MHz;
    :meth:`manifold_params` converts them to ns⁻¹.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    model: str = "both"
    n_centers: int = Field(ge=1)
    p_sigma0: float = Field(ge=0, le=1)
    gamma_2pi_mhz: float = Field(gt=0, allow_inf_nan=False)
    gamma_d_sigma0_2pi_mhz: float = Field(ge=0, allow_inf_nan=False)
    gamma_d_sigma1_2pi_mhz: float = Field(ge=0, allow_inf_nan=False)
    gamma_isc_sigma0_2pi_mhz: float = Field(ge=0, allow_inf_nan=False)
    gamma_isc_sigma1_2pi_mhz: float = Field(ge=0, allow_inf_nan=False)
    t_max_ns: float = Field(default=100.0, gt=0)
    samples: int = Field(default=2000, ge=2)
    rel_tol: float = Field(default=1e-9, gt=0)
    abs_tol: float = Field(default=1e-12, gt=0)
    out_dir: Path = Path("out")
    svg: bool = False

    @field_validator("model")
    @classmethod
    def check_model(cls, v: str) -> str:
        """Normalize case and reject unknown model strings."""
        parse_model_choice(v)
        return v.strip().lower()

    def flag_sets(self) -> list[TermFlags]:
        return parse_model_choice(self.model)

    def manifold_params(self) -> tuple[SpinManifoldParams, SpinManifoldParams]:
        """Per-σ rate constants in ns⁻¹, ordered (σ=0, σ=±1)."""
        gamma = rate_from_2pi_mhz(self.gamma_2pi_mhz)
        sigma0 = SpinManifoldParams(
            gamma=gamma,
            gamma_d=rate_from_2pi_mhz(self.gamma_d_sigma0_2pi_mhz),
            gamma_isc=rate_from_2pi_mhz(self.gamma_isc_sigma0_2pi_mhz),
            weight=self.p_sigma0,
        )
        sigma1 = SpinManifoldParams(
            gamma=gamma,
            gamma_d=rate_from_2pi_mhz(self.gamma_d_sigma1_2pi_mhz),
            gamma_isc=rate_from_2pi_mhz(self.gamma_isc_sigma1_2pi_mhz),
            weight=1.0 - self.p_sigma0,
        )
        return sigma0, sigma1

    def integrator_config(self) -> IntegratorConfig:
        return IntegratorConfig(
            t_end=self.t_max_ns,
            samples=self.samples,
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
        )


# ---------------------------------------------------------------------------
# Diagnostics and reports
# ---------------------------------------------------------------------------


class AsymptoteEstimate(BaseModel):
    """t → ∞ limit of a linear functional, computed by two independent routes."""

    model_config = ConfigDict(frozen=True)

    value: float
    null_space_value: float | None
    long_horizon_value: float
    horizon_ns: float
    null_dimension: int
    defective: bool = False


class OffDiagonalEntry(BaseModel):
    """A single generator coupling ``source → target`` with its rate (ns⁻¹)."""

    model_config = ConfigDict(frozen=True)

    value: float
    source: str
    target: str


class BurstDiagnostic(BaseModel):
    """Largest post-t=0 local maximum of a normalized trace."""

    model_config = ConfigDict(frozen=True)

    time_ns: float
    height: float


class PhysicalityVerdict(BaseModel):
    """Negative-count and nonzero-asymptote flags of one normalized trace."""

    model_config = ConfigDict(frozen=True)

    negative_counts: bool
    nonzero_asymptote: bool
    min_normalized: float
    asymptote_normalized: float
    negativity_tol: float
    asymptote_tol: float

    @property
    def physical(self) -> bool:
        return not (self.negative_counts or self.nonzero_asymptote)


class ModelSummary(BaseModel):
    """Per-model section of the JSON run report."""

    label: str
    flags: str
    scale_per_ns: float
    asymptote_normalized: float
    asymptote_raw_per_ns: float
    asymptotes_per_sigma: list[AsymptoteEstimate]
    crossings_ns: list[float]
    verdict: PhysicalityVerdict
    burst: BurstDiagnostic | None = None
    most_negative_off_diagonal: list[OffDiagonalEntry | None] = Field(
        default_factory=list
    )


class RunReport(BaseModel):
    """Top-level JSON report written next to the CSV."""

    tool_version: str
    config: dict[str, Any]
    models: list[ModelSummary]


class AblationRow(BaseModel):
    """Effect of switching a single term of Model A to its corrected form."""

    term: str
    flags: str
    verdict: PhysicalityVerdict
    removes_negative_counts: bool
    removes_nonzero_asymptote: bool


class AblationReport(BaseModel):
    """Baseline Model A verdict plus one row per single-term fix."""

    n_centers: int
    baseline: PhysicalityVerdict
    rows: list[AblationRow]


class IdentityCheck(BaseModel):
    """Maximum deviation of one oracle identity over all tested (n, m, site)."""

    name: str
    cases: int
    max_deviation: float = Field(ge=0)
