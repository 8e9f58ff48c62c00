"""Fluorescence traces, crossings, physicality verdicts and model comparisons.

A *model run* integrates both σ manifolds under one :class:`TermFlags` set,
mixes them into the total fluorescence and normalizes the result by its own
maximum.  Independent (model × σ) integrations run on a thread pool whose
size is capped by ``DICKE_SIM_THREADS``; results are merged in submission
order so output does not depend on scheduling.
"""

from __future__ import annotations

import logging
import os
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any

import numpy as np
import sympy as sp
from pydantic import BaseModel, ConfigDict
from scipy.optimize import bisect

from dicke_sim import oracle
from dicke_sim.dicke_space import DickeIndex, HalfInt, build_state_space, initial_state
from dicke_sim.errors import ConfigError
from dicke_sim.generator import (
    RateGenerator,
    build_generator,
    emission_loss_coefficient,
    fluorescence_weights,
    most_negative_off_diagonal,
)
from dicke_sim.integrator import Trajectory, asymptote, integrate
from dicke_sim.models import (
    MODEL_A,
    MODEL_B,
    TERM_LABELS,
    AblationReport,
    AblationRow,
    AsymptoteEstimate,
    BurstDiagnostic,
    IdentityCheck,
    IntegratorConfig,
    ModelSummary,
    OffDiagonalEntry,
    PhysicalityVerdict,
    Sigma,
    SpinManifoldParams,
    TermFlags,
)

logger = logging.getLogger(__name__)

THREADS_ENV = "DICKE_SIM_THREADS"
DEFAULT_ASYMPTOTE_TOL = 1e-6
DEFAULT_NEGATIVITY_TOL = 1e-9
CROSSING_RTOL = 1e-12
CROSSING_XTOL = 1e-13

ParamsPair = tuple[SpinManifoldParams, SpinManifoldParams]


# ---------------------------------------------------------------------------
# Normalization and crossings
# ---------------------------------------------------------------------------


def normalize(f_raw: np.ndarray) -> tuple[np.ndarray, float, bool]:
    """Divide *f_raw* by its maximum.

    Returns ``(f_norm, scale, degenerate)``.  When the maximum is not
    positive the raw trace is returned with scale 1 and ``degenerate`` set.
    """
    f_raw = np.asarray(f_raw, dtype=float)
    if f_raw.size == 0:
        raise ValueError("Cannot normalize an empty trace")
    peak = float(f_raw.max())
    if peak <= 0.0:
        logger.warning("Trace maximum is %.3g; leaving it unnormalized", peak)
        return f_raw.copy(), 1.0, True
    return f_raw / peak, peak, False


def find_zero_crossings(
    times: np.ndarray,
    values: np.ndarray,
    evaluate: Callable[[float], float],
    *,
    scale: float = 1.0,
) -> list[float]:
    """Refine every sign change of *values* by bisection on *evaluate*.

    *evaluate* must recompute the trace at arbitrary t (typically from the
    integrator's dense output), never interpolate the samples.

    Raises:
        ValueError: If *times* is not strictly increasing or the shapes differ.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape:
        raise ValueError(f"Shape mismatch: times {times.shape}, values {values.shape}")
    if np.any(np.diff(times) <= 0):
        raise ValueError("Time grid must be strictly increasing")

    f_tol = CROSSING_RTOL * abs(scale)
    crossings: list[float] = []
    signs = np.sign(values)
    for k in range(len(times) - 1):
        left, right = signs[k], signs[k + 1]
        if left == 0 and k > 0 and signs[k - 1] * right < 0:
            crossings.append(float(times[k]))
            continue
        if left * right >= 0:
            continue
        t0, t1 = float(times[k]), float(times[k + 1])
        f0, f1 = evaluate(t0), evaluate(t1)
        if f0 * f1 >= 0:
            # Dense output and samples disagree in the last bits; keep the closer end.
            crossings.append(t0 if abs(f0) <= abs(f1) else t1)
            continue
        root = bisect(evaluate, t0, t1, xtol=CROSSING_XTOL, maxiter=200)
        if abs(evaluate(root)) > f_tol:
            logger.info(
                "Crossing near %.9g ns has |F|=%.3g above %.3g at the time resolution",
                root,
                abs(evaluate(root)),
                f_tol,
            )
        crossings.append(float(root))
    return crossings


def burst_diagnostic(times: np.ndarray, f_norm: np.ndarray) -> BurstDiagnostic | None:
    """Largest interior local maximum of *f_norm*, or ``None`` if there is none."""
    f = np.asarray(f_norm, dtype=float)
    if f.size < 3:
        return None
    interior = np.flatnonzero((f[1:-1] > f[:-2]) & (f[1:-1] >= f[2:])) + 1
    if interior.size == 0:
        return None
    k = int(interior[np.argmax(f[interior])])
    return BurstDiagnostic(time_ns=float(times[k]), height=float(f[k]))


# ---------------------------------------------------------------------------
# Model runs
# ---------------------------------------------------------------------------


class ManifoldRun(BaseModel):
    """Trajectory, fluorescence weights and asymptote of one σ manifold."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    generator: RateGenerator
    trajectory: Trajectory
    weights: np.ndarray
    asymptote: AsymptoteEstimate

    @property
    def fluorescence(self) -> np.ndarray:
        return self.trajectory.functional(self.weights)

    def evaluate(self, t: float) -> float:
        return float(self.weights @ self.trajectory.evaluate(t))


class SimulationResult(BaseModel):
    """Combined, normalized fluorescence of one model over both σ manifolds."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    flags: TermFlags
    n_centers: int
    params: ParamsPair
    times: np.ndarray
    f_total: np.ndarray
    f_raw: np.ndarray
    scale: float
    degenerate: bool
    f_per_sigma: tuple[np.ndarray, np.ndarray]
    asymptote: float
    asymptote_raw: float
    asymptotes_per_sigma: tuple[AsymptoteEstimate, AsymptoteEstimate]
    crossings: list[float]
    burst: BurstDiagnostic | None
    off_diagonal: tuple[OffDiagonalEntry | None, OffDiagonalEntry | None]
    manifolds: tuple[ManifoldRun, ManifoldRun]

    @property
    def label(self) -> str:
        return self.flags.label

    def evaluate(self, t: float) -> float:
        """Raw total F at *t* (ns⁻¹) from the dense output of both manifolds."""
        return _mixture(self.params[0].weight, self.manifolds, t)

    @property
    def params_echo(self) -> dict[str, Any]:
        return {
            "n_centers": self.n_centers,
            "sigma0": self.params[0].model_dump(),
            "sigma1": self.params[1].model_dump(),
        }


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or not raw.strip():
        return min(4, os.cpu_count() or 1)
    try:
        count = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if count < 1:
        raise ConfigError(f"{THREADS_ENV} must be at least 1, got {count}")
    return count


def _run_manifold(
    n: int,
    params: SpinManifoldParams,
    sigma: Sigma,
    flags: TermFlags,
    cfg: IntegratorConfig,
) -> ManifoldRun:
    space = build_state_space(n)
    gen = build_generator(space, params, flags)
    init = initial_state(space, sigma)
    weights = fluorescence_weights(space, params, flags)
    trajectory = integrate(gen, init, cfg)
    limit = asymptote(gen, init, weights, cfg)
    logger.info(
        "Model %s σ=%d: F(0)=%.6g ns⁻¹, asymptote %.6g ns⁻¹",
        flags.label,
        sigma,
        float(weights @ init.vector()),
        limit.value,
    )
    return ManifoldRun(
        generator=gen, trajectory=trajectory, weights=weights, asymptote=limit
    )


def _mixture(p0: float, runs: tuple[ManifoldRun, ManifoldRun], t: float) -> float:
    return p0 * runs[0].evaluate(t) + (1.0 - p0) * runs[1].evaluate(t)


def _combine(
    n: int, params: ParamsPair, flags: TermFlags, runs: tuple[ManifoldRun, ManifoldRun]
) -> SimulationResult:
    p0 = params[0].weight
    p1 = 1.0 - p0
    run0, run1 = runs
    f0, f1 = run0.fluorescence, run1.fluorescence
    f_raw = p0 * f0 + p1 * f1
    f_norm, scale, degenerate = normalize(f_raw)
    limit_raw = p0 * run0.asymptote.value + p1 * run1.asymptote.value
    times = run0.trajectory.times

    def evaluate(t: float) -> float:
        return _mixture(p0, runs, t)

    return SimulationResult(
        flags=flags,
        n_centers=n,
        params=params,
        times=times,
        f_total=f_norm,
        f_raw=f_raw,
        scale=scale,
        degenerate=degenerate,
        f_per_sigma=(f0, f1),
        asymptote=limit_raw / scale,
        asymptote_raw=limit_raw,
        asymptotes_per_sigma=(run0.asymptote, run1.asymptote),
        crossings=find_zero_crossings(times, f_raw, evaluate, scale=scale),
        burst=burst_diagnostic(times, f_norm),
        off_diagonal=(
            most_negative_off_diagonal(run0.generator),
            most_negative_off_diagonal(run1.generator),
        ),
        manifolds=runs,
    )


def simulate_models(
    n: int,
    params: ParamsPair,
    flag_sets: Sequence[TermFlags],
    cfg: IntegratorConfig,
) -> list[SimulationResult]:
    """Run every flag set over both σ manifolds; results keep the input order."""
    if params[0].gamma != params[1].gamma:
        raise ValueError("Both manifolds must share the spontaneous decay rate γ")
    workers = _worker_count()
    logger.info(
        "Simulating %d model(s) for N=%d on %d worker(s)", len(flag_sets), n, workers
    )
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            (
                pool.submit(_run_manifold, n, params[0], 0, flags, cfg),
                pool.submit(_run_manifold, n, params[1], 1, flags, cfg),
            )
            for flags in flag_sets
        ]
        runs = [(f0.result(), f1.result()) for f0, f1 in futures]
    return [_combine(n, params, flags, pair) for flags, pair in zip(flag_sets, runs)]


def simulate_model(
    n: int, params: ParamsPair, flags: TermFlags, cfg: IntegratorConfig
) -> SimulationResult:
    return simulate_models(n, params, [flags], cfg)[0]


# ---------------------------------------------------------------------------
# Verdicts and comparisons
# ---------------------------------------------------------------------------


def physicality_verdict(
    result: SimulationResult,
    asymptote_tol: float = DEFAULT_ASYMPTOTE_TOL,
    negativity_tol: float = DEFAULT_NEGATIVITY_TOL,
) -> PhysicalityVerdict:
    """Flag negative counts and a nonzero asymptote, both relative to the peak."""
    minimum = float(result.f_total.min())
    return PhysicalityVerdict(
        negative_counts=minimum < -negativity_tol,
        nonzero_asymptote=abs(result.asymptote) > asymptote_tol,
        min_normalized=minimum,
        asymptote_normalized=result.asymptote,
        negativity_tol=negativity_tol,
        asymptote_tol=asymptote_tol,
    )


def summarize(result: SimulationResult) -> ModelSummary:
    """Report section for one model run."""
    return ModelSummary(
        label=result.label,
        flags=result.flags.code,
        scale_per_ns=result.scale,
        asymptote_normalized=result.asymptote,
        asymptote_raw_per_ns=result.asymptote_raw,
        asymptotes_per_sigma=list(result.asymptotes_per_sigma),
        crossings_ns=result.crossings,
        verdict=physicality_verdict(result),
        burst=result.burst,
        most_negative_off_diagonal=list(result.off_diagonal),
    )


class ComparisonReport(BaseModel):
    """Subject model (Model A by default) against corrected Model B."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    subject: SimulationResult
    reference: SimulationResult
    subject_verdict: PhysicalityVerdict
    reference_verdict: PhysicalityVerdict


def compare_models(
    n: int,
    params: ParamsPair,
    cfg: IntegratorConfig,
    subject: TermFlags = MODEL_A,
) -> ComparisonReport:
    """Simulate *subject* and Model B side by side and attach verdicts."""
    subject_result, reference = simulate_models(n, params, [subject, MODEL_B], cfg)
    return ComparisonReport(
        subject=subject_result,
        reference=reference,
        subject_verdict=physicality_verdict(subject_result),
        reference_verdict=physicality_verdict(reference),
    )


def ablate(n: int, params: ParamsPair, cfg: IntegratorConfig) -> AblationReport:
    """Switch each term of Model A to its corrected form, one at a time."""
    variants = [MODEL_A.with_term(term) for term in TERM_LABELS]
    results = simulate_models(n, params, [MODEL_A, *variants], cfg)
    baseline = physicality_verdict(results[0])
    rows = []
    for term, result in zip(TERM_LABELS, results[1:]):
        verdict = physicality_verdict(result)
        rows.append(
            AblationRow(
                term=term,
                flags=result.flags.code,
                verdict=verdict,
                removes_negative_counts=baseline.negative_counts
                and not verdict.negative_counts,
                removes_nonzero_asymptote=baseline.nonzero_asymptote
                and not verdict.nonzero_asymptote,
            )
        )
    return AblationReport(n_centers=n, baseline=baseline, rows=rows)


# ---------------------------------------------------------------------------
# Oracle identities
# ---------------------------------------------------------------------------


def _deviation(value: Any, expected: Any, exact: bool) -> float:
    if exact:
        return float(abs(sp.N(value - expected, 30)))
    return abs(float(value) - float(expected))


def _sqrt(value: Fraction, exact: bool) -> Any:
    if exact:
        return sp.sqrt(sp.Rational(value.numerator, value.denominator))
    return float(value) ** 0.5


def _ratio(value: Fraction, exact: bool) -> Any:
    return sp.Rational(value.numerator, value.denominator) if exact else float(value)


def verify_oracle_identities(max_n: int = 10, *, exact: bool = False) -> list[IdentityCheck]:
    """Compare the enumeration oracle against the closed forms and the generator.

    Covers ⟨2ŝ_z⟩ = M/J on every site, the signed decoupling amplitudes
    (+√((J+M)/2J), -√((J-M)/2J)) together with their weights summing to 1,
    and the lowering coefficient against the generator's emission loss.
    """
    flip_dev = decouple_dev = lower_dev = 0.0
    flip_cases = decouple_cases = lower_cases = 0

    for n in range(1, max_n + 1):
        j = HalfInt(twice_value=n)
        for k in range(n + 1):
            m = HalfInt(twice_value=2 * k - n)
            ratio = m.as_fraction() / j.as_fraction()
            for site in range(n):
                value = oracle.phase_flip_amplitude(n, m, site, exact=exact)
                flip_dev = max(flip_dev, _deviation(value, _ratio(ratio, exact), exact))
                flip_cases += 1
                if n < 2:
                    continue
                excited, ground = oracle.decoupling_amplitudes(n, m, site, exact=exact)
                w_e, w_g = oracle.decoupling_weights(n, m, site, exact=exact)
                decouple_dev = max(
                    decouple_dev,
                    _deviation(excited, _sqrt(Fraction(k, n), exact), exact),
                    _deviation(ground, -_sqrt(Fraction(n - k, n), exact), exact),
                    _deviation(w_e + w_g, 1, exact),
                )
                decouple_cases += 1
            if k == 0:
                continue
            value = oracle.lowering_coefficient(n, m, exact=exact)
            expected = emission_loss_coefficient(DickeIndex(j=j, m=m))
            lower_dev = max(lower_dev, _deviation(value, _ratio(expected, exact), exact))
            lower_cases += 1

    checks = [
        IdentityCheck(name="phase_flip_amplitude", cases=flip_cases, max_deviation=flip_dev),
        IdentityCheck(
            name="decoupling_weights", cases=decouple_cases, max_deviation=decouple_dev
        ),
        IdentityCheck(
            name="lowering_coefficient", cases=lower_cases, max_deviation=lower_dev
        ),
    ]
    for check in checks:
        logger.info(
            "Identity %s: %d cases, max deviation %.3g",
            check.name,
            check.cases,
            check.max_deviation,
        )
    return checks
