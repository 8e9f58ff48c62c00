"""Brute-force Dicke states in the 2^n product basis for small n.

Everything here is built from explicit excitation masks and binomial counts,
independently of the rate-generator coefficients, so that agreement between
the two is a meaningful check.  Amplitudes are 64-bit floats by default or
exact sympy expressions (square roots of rationals) with ``exact=True``.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from itertools import combinations
from typing import Any

import sympy as sp
from pydantic import BaseModel, ConfigDict, Field, model_validator

from dicke_sim.dicke_space import HalfInt
from dicke_sim.errors import SizeLimitError

logger = logging.getLogger(__name__)

MAX_ORACLE_EMITTERS = 14

Amplitude = Any  # float, or a sympy expression in exact mode


class SymmetricBasisState(BaseModel):
    """Product state of *n* emitters; bit ``k`` of the mask set means |e⟩ on site k."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    excited_mask: int = Field(ge=0)

    @model_validator(mode="after")
    def check_mask(self) -> SymmetricBasisState:
        if self.excited_mask >> self.n:
            raise ValueError(f"Mask {self.excited_mask:b} has bits beyond n={self.n}")
        return self

    @property
    def excitations(self) -> int:
        return self.excited_mask.bit_count()

    def is_excited(self, site: int) -> bool:
        return bool(self.excited_mask >> site & 1)

    def without(self, site: int) -> int:
        """Mask of the other n - 1 emitters, sites above *site* shifted down."""
        low = self.excited_mask & ((1 << site) - 1)
        high = self.excited_mask >> (site + 1)
        return low | (high << site)


class ExactState(BaseModel):
    """Superposition of product states with real amplitudes."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    amplitudes: dict[SymmetricBasisState, Amplitude]
    exact: bool = False

    def amplitude(self, mask: int) -> Amplitude:
        key = SymmetricBasisState(n=self.n, excited_mask=mask)
        return self.amplitudes.get(key, _zero(self.exact))

    def norm_squared(self) -> Amplitude:
        return _sum((a * a for a in self.amplitudes.values()), self.exact)


# ---------------------------------------------------------------------------
# Arithmetic helpers
# ---------------------------------------------------------------------------


def _zero(exact: bool) -> Amplitude:
    return sp.Integer(0) if exact else 0.0


def _sum(values: Any, exact: bool) -> Amplitude:
    return sp.Add(*values) if exact else math.fsum(values)


def _inv_sqrt(count: int, exact: bool) -> Amplitude:
    return sp.sqrt(sp.Rational(1, count)) if exact else 1.0 / math.sqrt(count)


def _excited_count(n: int, m: HalfInt | Fraction | int | str) -> int:
    """n/2 + m, validating range and parity."""
    value = Fraction(m.as_fraction() if isinstance(m, HalfInt) else Fraction(m))
    k = Fraction(n, 2) + value
    if k.denominator != 1:
        raise ValueError(f"n/2 - m must be an integer, got n={n}, m={value}")
    if not 0 <= k <= n:
        raise ValueError(f"|m| must not exceed n/2, got n={n}, m={value}")
    return int(k)


def _check_size(n: int) -> None:
    if n < 1 or n > MAX_ORACLE_EMITTERS:
        raise SizeLimitError(
            f"Oracle supports 1..{MAX_ORACLE_EMITTERS} emitters, got {n}"
        )


def _check_site(n: int, site: int) -> None:
    if not 0 <= site < n:
        raise ValueError(f"Site {site} out of range for n={n}")


def _masks(n: int, k: int) -> list[int]:
    return [sum(1 << s for s in sites) for sites in combinations(range(n), k)]


def _uniform(n: int, k: int, exact: bool) -> ExactState:
    masks = _masks(n, k)
    amp = _inv_sqrt(len(masks), exact)
    return ExactState(
        n=n,
        amplitudes={SymmetricBasisState(n=n, excited_mask=mk): amp for mk in masks},
        exact=exact,
    )


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def dicke_state(
    n: int, m: HalfInt | Fraction | int | str, *, exact: bool = False
) -> ExactState:
    """|J = n/2, M = m⟩ as the uniform superposition over C(n, n/2 + m) masks.

    Raises:
        SizeLimitError: If *n* exceeds ``MAX_ORACLE_EMITTERS``.
        ValueError: If *m* is out of range or of the wrong parity.
    """
    _check_size(n)
    return _uniform(n, _excited_count(n, m), exact)


def phase_flip_amplitude(
    n: int, m: HalfInt | Fraction | int | str, site: int, *, exact: bool = False
) -> Amplitude:
    """⟨J,M| 2ŝ_z |J,M⟩ on emitter *site*, by enumeration."""
    state = dicke_state(n, m, exact=exact)
    _check_site(n, site)
    return _sum(
        (
            a * a if basis.is_excited(site) else -a * a
            for basis, a in state.amplitudes.items()
        ),
        exact,
    )


def decoupling_amplitudes(
    n: int, m: HalfInt | Fraction | int | str, site: int, *, exact: bool = False
) -> tuple[Amplitude, Amplitude]:
    """Overlaps of 2ŝ_z|J,M⟩ on *site* with the two decoupled branches.

    Returns ``(⟨e|_site ⊗ ⟨J-1/2, M-1/2|, ⟨g|_site ⊗ ⟨J-1/2, M+1/2|)`` applied
    to the flipped state.  The ground branch carries the relative minus sign.
    A branch that does not exist (no excitation to remove, or none left to
    add) has overlap 0.
    """
    if n < 2:
        raise ValueError("Decoupling needs at least two emitters")
    state = dicke_state(n, m, exact=exact)
    _check_site(n, site)
    k = _excited_count(n, m)

    excited_rest = _rest_amplitudes(n - 1, k - 1, exact)
    ground_rest = _rest_amplitudes(n - 1, k, exact)
    excited_terms = []
    ground_terms = []
    for basis, a in state.amplitudes.items():
        rest = basis.without(site)
        if basis.is_excited(site):
            excited_terms.append(a * excited_rest.get(rest, _zero(exact)))
        else:
            ground_terms.append(-a * ground_rest.get(rest, _zero(exact)))
    return _sum(excited_terms, exact), _sum(ground_terms, exact)


def _rest_amplitudes(n: int, k: int, exact: bool) -> dict[int, Amplitude]:
    if not 0 <= k <= n:
        return {}
    amp = _inv_sqrt(math.comb(n, k), exact)
    return {mk: amp for mk in _masks(n, k)}


def decoupling_weights(
    n: int, m: HalfInt | Fraction | int | str, site: int, *, exact: bool = False
) -> tuple[Amplitude, Amplitude]:
    """Squared :func:`decoupling_amplitudes`: ((J+M)/2J, (J-M)/2J) in theory."""
    excited, ground = decoupling_amplitudes(n, m, site, exact=exact)
    return excited * excited, ground * ground


def lowering_coefficient(
    n: int, m: HalfInt | Fraction | int | str, *, exact: bool = False
) -> Amplitude:
    """|⟨J, M-1| Ĵ⁻ |J, M⟩|² with Ĵ⁻ = Σ_j |g⟩⟨e|_j, by enumeration."""
    k = _excited_count(n, m)
    if k == 0:
        raise ValueError(f"m must exceed -n/2 to lower, got n={n}, m={m}")
    state = dicke_state(n, m, exact=exact)
    target = _uniform(n, k - 1, exact)

    lowered: dict[int, list[Amplitude]] = {}
    for basis, a in state.amplitudes.items():
        for site in range(n):
            if basis.is_excited(site):
                lowered.setdefault(basis.excited_mask & ~(1 << site), []).append(a)
    overlap = _sum(
        (
            target.amplitude(mask) * _sum(parts, exact)
            for mask, parts in sorted(lowered.items())
        ),
        exact,
    )
    logger.debug("Lowering coefficient n=%d m=%s by enumeration", n, m)
    return overlap * overlap
