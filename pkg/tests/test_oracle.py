"""Tests for dicke_sim.oracle."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest
import sympy as sp

from dicke_sim.dicke_space import HalfInt
from dicke_sim.errors import SizeLimitError
from dicke_sim.oracle import (
    SymmetricBasisState,
    decoupling_amplitudes,
    decoupling_weights,
    dicke_state,
    lowering_coefficient,
    phase_flip_amplitude,
)


class TestBasisState:
    """Tests for SymmetricBasisState."""

    def test_excitations(self) -> None:
        """Popcount of the mask."""
        assert SymmetricBasisState(n=4, excited_mask=0b1011).excitations == 3

    def test_mask_too_wide(self) -> None:
        """Bits beyond n are rejected."""
        with pytest.raises(ValueError):
            SymmetricBasisState(n=2, excited_mask=0b100)

    def test_without_site(self) -> None:
        """Removing a site shifts the higher bits down."""
        basis = SymmetricBasisState(n=4, excited_mask=0b1101)
        assert basis.without(1) == 0b111
        assert basis.without(0) == 0b110


class TestDickeState:
    """Tests for dicke_state."""

    def test_triplet(self) -> None:
        """n=2, m=0 is (|eg⟩ + |ge⟩)/√2."""
        state = dicke_state(2, 0)
        assert len(state.amplitudes) == 2
        assert state.amplitude(0b01) == pytest.approx(1 / math.sqrt(2))
        assert state.amplitude(0b10) == pytest.approx(1 / math.sqrt(2))
        assert state.amplitude(0b11) == 0.0

    def test_fully_excited(self) -> None:
        """n=2, m=1 is |ee⟩."""
        state = dicke_state(2, 1)
        assert state.amplitude(0b11) == pytest.approx(1.0)

    def test_norm(self) -> None:
        """Every Dicke state with n ≤ 10 is normalized."""
        for n in range(1, 11):
            for k in range(n + 1):
                m = Fraction(2 * k - n, 2)
                assert dicke_state(n, m).norm_squared() == pytest.approx(1.0, abs=1e-14)

    def test_exact_norm(self) -> None:
        """Exact amplitudes square to exactly one."""
        assert dicke_state(5, "1/2", exact=True).norm_squared() == 1

    def test_half_int_argument(self) -> None:
        """HalfInt labels are accepted."""
        assert len(dicke_state(3, HalfInt.of("-1/2")).amplitudes) == 3

    def test_too_large(self) -> None:
        """n above the enumeration cap is rejected."""
        with pytest.raises(SizeLimitError):
            dicke_state(15, "1/2")

    @pytest.mark.parametrize("m", [2, "1/2"])
    def test_bad_m(self, m: int | str) -> None:
        """Out-of-range or wrong-parity m is rejected."""
        with pytest.raises(ValueError):
            dicke_state(2, m)


class TestPhaseFlip:
    """Tests for phase_flip_amplitude."""

    def test_fully_excited(self) -> None:
        """|ee⟩ is a 2ŝ_z eigenstate with eigenvalue 1."""
        assert phase_flip_amplitude(2, 1, 0) == pytest.approx(1.0)

    def test_triplet_zero(self) -> None:
        """M/J = 0 for the triplet."""
        assert phase_flip_amplitude(2, 0, 1) == pytest.approx(0.0, abs=1e-15)

    def test_ratio_and_site_independence(self) -> None:
        """⟨2ŝ_z⟩ = M/J on every site."""
        n = 7
        for k in range(n + 1):
            m = Fraction(2 * k - n, 2)
            expected = float(m / Fraction(n, 2))
            values = [phase_flip_amplitude(n, m, site) for site in range(n)]
            for value in values:
                assert value == pytest.approx(expected, abs=1e-12)

    def test_exact(self) -> None:
        """Exact mode returns the rational M/J."""
        assert phase_flip_amplitude(4, 1, 2, exact=True) == sp.Rational(1, 2)

    def test_site_range(self) -> None:
        """Sites are numbered 0..n-1."""
        with pytest.raises(ValueError):
            phase_flip_amplitude(3, "1/2", 3)


class TestDecoupling:
    """Tests for decoupling_amplitudes and decoupling_weights."""

    def test_symmetric_split(self) -> None:
        """n=2, m=0 splits evenly."""
        w_e, w_g = decoupling_weights(2, 0, 0)
        assert w_e == pytest.approx(0.5)
        assert w_g == pytest.approx(0.5)

    def test_n4_m1(self) -> None:
        """(J+M)/2J = 3/4 and (J-M)/2J = 1/4."""
        w_e, w_g = decoupling_weights(4, 1, 3)
        assert w_e == pytest.approx(0.75)
        assert w_g == pytest.approx(0.25)

    def test_relative_sign(self) -> None:
        """The ground branch carries the minus sign."""
        excited, ground = decoupling_amplitudes(5, "1/2", 2)
        assert excited == pytest.approx(math.sqrt(3 / 5))
        assert ground == pytest.approx(-math.sqrt(2 / 5))

    def test_missing_branch(self) -> None:
        """The fully excited state has no ground branch."""
        excited, ground = decoupling_amplitudes(3, "3/2", 0)
        assert excited == pytest.approx(1.0)
        assert ground == 0.0

    def test_weights_sum_to_one(self) -> None:
        """Branch weights are a probability split for all n ≤ 8."""
        for n in range(2, 9):
            for k in range(n + 1):
                w_e, w_g = decoupling_weights(n, Fraction(2 * k - n, 2), n - 1)
                assert w_e + w_g == pytest.approx(1.0, abs=1e-12)

    def test_exact_weights(self) -> None:
        """Exact mode gives rational weights."""
        w_e, w_g = decoupling_weights(4, 1, 0, exact=True)
        assert sp.simplify(w_e - sp.Rational(3, 4)) == 0
        assert sp.simplify(w_g - sp.Rational(1, 4)) == 0

    def test_single_emitter_rejected(self) -> None:
        """Decoupling needs a remaining collective state."""
        with pytest.raises(ValueError):
            decoupling_amplitudes(1, "1/2", 0)


class TestLowering:
    """Tests for lowering_coefficient."""

    @pytest.mark.parametrize(
        ("n", "m", "expected"),
        [(2, 1, 2.0), (8, 0, 20.0), (1, "1/2", 1.0), (4, -1, 4.0)],
    )
    def test_values(self, n: int, m: int | str, expected: float) -> None:
        """|⟨J,M-1|Ĵ⁻|J,M⟩|² = (J+M)(J-M+1)."""
        assert lowering_coefficient(n, m) == pytest.approx(expected)

    def test_exact(self) -> None:
        """Exact mode reproduces the integer coefficient."""
        assert sp.simplify(lowering_coefficient(4, 0, exact=True) - 6) == 0

    def test_bottom_rejected(self) -> None:
        """Nothing to lower from M = -J."""
        with pytest.raises(ValueError):
            lowering_coefficient(3, "-3/2")
