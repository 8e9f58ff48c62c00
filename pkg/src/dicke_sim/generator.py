"""Sparse linear generators for the Dicke-ladder rate equations.

One generator covers a single σ manifold.  Row ``k`` holds d/dt of slot ``k``;
the final row and column belong to n_nc.  Each of the nine model-dependent
factors (terms A–I) is chosen independently through :class:`TermFlags`, so
Model A, Model B and any mixture share one assembly path.

Coefficients are computed as exact fractions and converted to float only
when multiplied by their rate.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from fractions import Fraction

import numpy as np
import scipy.sparse as sparse
from pydantic import BaseModel, ConfigDict

from dicke_sim.dicke_space import (
    HALF,
    DickeIndex,
    PopulationState,
    StateSpace,
    build_state_space,
)
from dicke_sim.errors import GeneratorError
from dicke_sim.models import OffDiagonalEntry, SpinManifoldParams, TermFlags

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Coefficients
# ---------------------------------------------------------------------------


def _jm(index: DickeIndex) -> tuple[Fraction, Fraction]:
    return index.j.as_fraction(), index.m.as_fraction()


def emission_loss_coefficient(index: DickeIndex) -> Fraction:
    """J(J+1) - M(M-1), the squared collective lowering matrix element."""
    j, m = _jm(index)
    return j * (j + 1) - m * (m - 1)


def emission_gain_coefficient(index: DickeIndex) -> Fraction:
    """J(J+1) - M(M+1), the rate factor for (J, M+1) → (J, M)."""
    j, m = _jm(index)
    return j * (j + 1) - m * (m + 1)


def _projection_weight(j: Fraction, m: Fraction, corrected: bool) -> Fraction:
    # |M/J|² in Model B, 1 - |M/J|² in Model A (terms C, E, H).
    ratio = (m / j) ** 2
    return ratio if corrected else 1 - ratio


def dephasing_loss_coefficient(index: DickeIndex, flags: TermFlags) -> Fraction:
    """Factor of -γ_d·P_{J,M} on the diagonal (terms A, B, C)."""
    j, m = _jm(index)
    outer = Fraction(1) if flags.a else 2 * j
    inner = 2 * j if flags.b else Fraction(1)
    return outer * inner * _projection_weight(j, m, flags.c)


def dephasing_cross_coefficient(index: DickeIndex, flags: TermFlags) -> Fraction:
    """Factor of γ_d·P_{J+1/2,M+1/2} in d/dt P_{J,M} (terms A, D, E).

    Model A's "+2" (term D) makes this a loss; Model B's "-2" a gain.
    """
    j, m = _jm(index)
    j_up, m_up = j + Fraction(1, 2), m + Fraction(1, 2)
    outer = Fraction(1) if flags.a else 2 * j
    sign = -1 if flags.d else 1
    return -outer * sign * 2 * j_up * _projection_weight(j_up, m_up, flags.e)


def isc_gain_coefficient(index: DickeIndex, flags: TermFlags) -> Fraction:
    """Factor of γ_ISC·P_{J+1/2,M+1/2} in d/dt P_{J,M} (term F)."""
    j, m = _jm(index)
    return (j + m + 1) * (j - m + 1) if flags.f else (j + m + 1)


def isc_loss_coefficient(index: DickeIndex, flags: TermFlags) -> Fraction:
    """Factor of -γ_ISC·P_{J,M} on the diagonal (term G)."""
    j, m = _jm(index)
    return (j + m) * (j - m + 1) if flags.g else (j + m)


def n_nc_feed_coefficient(index: DickeIndex, flags: TermFlags) -> Fraction:
    """Factor of γ_d·P_{J,M} in d/dt n_nc (term H)."""
    j, m = _jm(index)
    return _projection_weight(j, m, flags.h) * 2 * j


def fluorescence_coefficient(index: DickeIndex, flags: TermFlags) -> Fraction:
    """J(J+1) - M(M∓1): minus for Model B, plus for Model A (term I)."""
    j, m = _jm(index)
    shift = -1 if flags.i else 1
    return j * (j + 1) - m * (m + shift)


# ---------------------------------------------------------------------------
# Generator
# ---------------------------------------------------------------------------


class RateGenerator(BaseModel):
    """Assembled generator of one σ manifold for one model variant."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: StateSpace
    params: SpinManifoldParams
    flags: TermFlags
    matrix: sparse.csr_matrix

    @property
    def dimension(self) -> int:
        return self.space.dimension

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def label(self, slot: int) -> str:
        if slot == self.space.n_nc_slot:
            return "n_nc"
        return str(self.space.indices[slot])


def build_generator(
    space: StateSpace,
    params: SpinManifoldParams,
    flags: TermFlags,
    *,
    strict: bool = False,
) -> RateGenerator:
    """Assemble the rate matrix for *space* under *params* and *flags*.

    Args:
        space: Tracked Dicke levels.
        params: Rates of the manifold, in ns⁻¹.
        flags: Per-term model variants.
        strict: Reject flag sets that mix Model A and Model B terms.

    Raises:
        GeneratorError: On an empty space or, in strict mode, mixed flags.
    """
    if space.size == 0:
        raise GeneratorError("State space is empty")
    if strict and flags.is_mixed:
        raise GeneratorError(f"Mixed term flags rejected in strict mode: {flags.code}")

    entries: defaultdict[tuple[int, int], float] = defaultdict(float)
    nrow = space.n_nc_slot
    gamma, gamma_d, gamma_isc = params.gamma, params.gamma_d, params.gamma_isc

    for row, index in enumerate(space.indices):
        j, m = index.j, index.m

        # Collective emission within the ladder: (J, M+1) → (J, M).
        above = space.slot(j, m + HALF + HALF)
        if above is not None:
            entries[row, above] += float(emission_gain_coefficient(index)) * gamma
        entries[row, row] -= float(emission_loss_coefficient(index)) * gamma

        # Dephasing and intersystem crossing: (J+1/2, M+1/2) → (J, M).
        source = space.slot(j + HALF, m + HALF)
        if gamma_d > 0:
            entries[row, row] -= float(dephasing_loss_coefficient(index, flags)) * gamma_d
            if source is not None:
                entries[row, source] += (
                    float(dephasing_cross_coefficient(index, flags)) * gamma_d
                )
            entries[nrow, row] += float(n_nc_feed_coefficient(index, flags)) * gamma_d
        if gamma_isc > 0:
            entries[row, row] -= float(isc_loss_coefficient(index, flags)) * gamma_isc
            if source is not None:
                entries[row, source] += float(isc_gain_coefficient(index, flags)) * gamma_isc

    entries[nrow, nrow] -= gamma + gamma_isc

    keys = [k for k, v in entries.items() if v != 0.0]
    rows = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
    cols = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
    vals = np.fromiter((entries[k] for k in keys), dtype=float, count=len(keys))
    matrix = sparse.coo_matrix(
        (vals, (rows, cols)), shape=(space.dimension, space.dimension)
    ).tocsr()
    matrix.sort_indices()

    logger.debug(
        "Assembled generator N=%d flags=%s dim=%d nnz=%d",
        space.n_emitters,
        flags.code,
        space.dimension,
        matrix.nnz,
    )
    return RateGenerator(space=space, params=params, flags=flags, matrix=matrix)


def most_negative_off_diagonal(gen: RateGenerator) -> OffDiagonalEntry | None:
    """Most negative off-diagonal coupling, or ``None`` if all are ≥ 0."""
    coo = gen.matrix.tocoo()
    mask = (coo.row != coo.col) & (coo.data < 0)
    if not mask.any():
        return None
    k = int(np.argmin(np.where(mask, coo.data, np.inf)))
    return OffDiagonalEntry(
        value=float(coo.data[k]),
        source=gen.label(int(coo.col[k])),
        target=gen.label(int(coo.row[k])),
    )


# ---------------------------------------------------------------------------
# Fluorescence functional
# ---------------------------------------------------------------------------


def fluorescence_weights(
    space: StateSpace, params: SpinManifoldParams, flags: TermFlags
) -> np.ndarray:
    """Linear weights w with F = w · state (ns⁻¹)."""
    weights = np.empty(space.dimension)
    for slot, index in enumerate(space.indices):
        weights[slot] = float(fluorescence_coefficient(index, flags)) * params.gamma
    weights[space.n_nc_slot] = params.gamma
    return weights


def fluorescence(
    state: PopulationState, params: SpinManifoldParams, flags: TermFlags
) -> float:
    """Photon emission rate F of one manifold (ns⁻¹)."""
    space = build_state_space(state.n_emitters)
    if state.p.shape != (space.size,):
        raise GeneratorError(
            f"State has {state.p.size} populations, expected {space.size}"
        )
    return float(fluorescence_weights(space, params, flags) @ state.vector())


def total_fluorescence(
    states: tuple[PopulationState, PopulationState],
    params: tuple[SpinManifoldParams, SpinManifoldParams],
    flags: TermFlags,
) -> float:
    """Mixture p₀·F₀ + (1 - p₀)·F₁ over the σ=0 and σ=±1 manifolds."""
    state0, state1 = states
    params0, params1 = params
    if params0.gamma != params1.gamma:
        raise GeneratorError("Manifolds must share the spontaneous decay rate γ")
    if state0.n_emitters != state1.n_emitters:
        raise GeneratorError("Manifolds must share the number of emitters")
    if (state0.sigma, state1.sigma) != (0, 1):
        raise GeneratorError("States must be ordered (σ=0, σ=±1)")
    p0 = params0.weight
    return p0 * fluorescence(state0, params0, flags) + (1 - p0) * fluorescence(
        state1, params1, flags
    )
