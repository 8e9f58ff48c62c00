"""Collective (J, M) state space of N two-level emitters.

Half-integers are stored doubled so that parity checks, hashing and
coefficient arithmetic never touch floating point.  The tracked space holds
every ladder from J = N/2 down to J = 1/2; J = 0 is not tracked.
"""

from __future__ import annotations

import functools
import logging
from fractions import Fraction

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from dicke_sim.errors import SizeLimitError
from dicke_sim.models import Sigma

logger = logging.getLogger(__name__)

DEFAULT_MAX_EMITTERS = 64


# ---------------------------------------------------------------------------
# Half-integers and Dicke labels
# ---------------------------------------------------------------------------


@functools.total_ordering
class HalfInt(BaseModel):
    """Exact value ``twice_value / 2``."""

    model_config = ConfigDict(frozen=True)

    twice_value: int

    @classmethod
    def of(cls, value: int | str | Fraction) -> HalfInt:
        """Build from an int, a Fraction or a string such as ``"7/2"``."""
        frac = Fraction(value)
        doubled = frac * 2
        if doubled.denominator != 1:
            raise ValueError(f"{value!r} is not a half-integer")
        return cls(twice_value=doubled.numerator)

    def as_fraction(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __add__(self, other: HalfInt) -> HalfInt:
        return HalfInt(twice_value=self.twice_value + other.twice_value)

    def __sub__(self, other: HalfInt) -> HalfInt:
        return HalfInt(twice_value=self.twice_value - other.twice_value)

    def __neg__(self) -> HalfInt:
        return HalfInt(twice_value=-self.twice_value)

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, HalfInt):
            return NotImplemented
        return self.twice_value < other.twice_value

    def __float__(self) -> float:
        return self.twice_value / 2

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"


HALF = HalfInt(twice_value=1)


class DickeIndex(BaseModel):
    """Label (J, M) of a collective Dicke level with J ≥ 1/2 and |M| ≤ J."""

    model_config = ConfigDict(frozen=True)

    j: HalfInt
    m: HalfInt

    @model_validator(mode="after")
    def check_label(self) -> DickeIndex:
        j2, m2 = self.j.twice_value, self.m.twice_value
        if j2 < 1:
            raise ValueError(f"J must be at least 1/2, got {self.j}")
        if abs(m2) > j2:
            raise ValueError(f"|M| must not exceed J, got J={self.j}, M={self.m}")
        if (j2 - m2) % 2:
            raise ValueError(f"J - M must be an integer, got J={self.j}, M={self.m}")
        return self

    @classmethod
    def of(cls, j: int | str | Fraction, m: int | str | Fraction) -> DickeIndex:
        return cls(j=HalfInt.of(j), m=HalfInt.of(m))

    @property
    def excitations(self) -> int:
        """Number of excited emitters J + M."""
        return (self.j.twice_value + self.m.twice_value) // 2

    def __str__(self) -> str:
        return f"({self.j}, {self.m})"


# ---------------------------------------------------------------------------
# State space
# ---------------------------------------------------------------------------


class StateSpace(BaseModel):
    """Ordered Dicke labels for N emitters, descending J then descending M.

    The population vector has one slot per label plus a trailing slot for
    n_nc, the number of independently radiating emitters.
    """

    model_config = ConfigDict(frozen=True)

    n_emitters: int
    indices: tuple[DickeIndex, ...]
    index_of: dict[DickeIndex, int]

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def dimension(self) -> int:
        return self.size + 1

    @property
    def n_nc_slot(self) -> int:
        return self.size

    @property
    def top_j(self) -> HalfInt:
        return HalfInt(twice_value=self.n_emitters)

    def ladders(self) -> list[HalfInt]:
        """All J values, descending."""
        return [HalfInt(twice_value=t) for t in range(self.n_emitters, 0, -1)]

    def slot(self, j: HalfInt, m: HalfInt) -> int | None:
        """Slot of (j, m), or ``None`` if the label is not tracked."""
        if j.twice_value < 1 or j > self.top_j or abs(m.twice_value) > j.twice_value:
            return None
        return self.index_of.get(DickeIndex(j=j, m=m))


@functools.lru_cache(maxsize=None)
def build_state_space(
    n_emitters: int, max_emitters: int = DEFAULT_MAX_EMITTERS
) -> StateSpace:
    """Enumerate every (J, M) with 1/2 ≤ J ≤ N/2 for *n_emitters* emitters.

    Raises:
        SizeLimitError: If *n_emitters* is below 1 or above *max_emitters*.
    """
    if n_emitters < 1 or n_emitters > max_emitters:
        raise SizeLimitError(
            f"Number of emitters must be in 1..{max_emitters}, got {n_emitters}"
        )
    indices: list[DickeIndex] = []
    for j2 in range(n_emitters, 0, -1):
        for m2 in range(j2, -j2 - 1, -2):
            indices.append(
                DickeIndex(j=HalfInt(twice_value=j2), m=HalfInt(twice_value=m2))
            )
    space = StateSpace(
        n_emitters=n_emitters,
        indices=tuple(indices),
        index_of={idx: k for k, idx in enumerate(indices)},
    )
    logger.debug("Built state space N=%d with %d slots", n_emitters, space.size)
    return space


# ---------------------------------------------------------------------------
# Populations
# ---------------------------------------------------------------------------


class PopulationState(BaseModel):
    """Populations P_{J,M} and n_nc of one σ manifold at time ``t`` (ns)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sigma: Sigma
    n_emitters: int
    p: np.ndarray
    n_nc: float = 0.0
    t: float = 0.0

    def vector(self) -> np.ndarray:
        """Flat state vector, n_nc last."""
        return np.append(self.p, self.n_nc)

    @classmethod
    def from_vector(
        cls, sigma: Sigma, n_emitters: int, vec: np.ndarray, t: float
    ) -> PopulationState:
        return cls(
            sigma=sigma,
            n_emitters=n_emitters,
            p=np.array(vec[:-1], dtype=float),
            n_nc=float(vec[-1]),
            t=float(t),
        )

    def min_entry(self) -> float:
        return float(min(self.p.min(), self.n_nc))


def initial_weights(space: StateSpace) -> list[Fraction]:
    """Exact initial occupations: 1/(N+1) on every level of the top ladder."""
    top = space.top_j
    share = Fraction(1, space.n_emitters + 1)
    return [share if idx.j == top else Fraction(0) for idx in space.indices]


def initial_state(space: StateSpace, sigma: Sigma) -> PopulationState:
    """Even distribution over the fully symmetric ladder J = N/2, n_nc = 0."""
    weights = initial_weights(space)
    return PopulationState(
        sigma=sigma,
        n_emitters=space.n_emitters,
        p=np.array([float(w) for w in weights]),
        n_nc=0.0,
        t=0.0,
    )


def ladder_populations(space: StateSpace, state: PopulationState) -> dict[HalfInt, float]:
    """Total population Σ_M P_{J,M} of each ladder J."""
    totals: dict[HalfInt, float] = {j: 0.0 for j in space.ladders()}
    for idx, value in zip(space.indices, state.p):
        totals[idx.j] += float(value)
    return totals
