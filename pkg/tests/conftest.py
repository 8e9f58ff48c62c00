"""Shared test fixtures for dicke_sim tests."""

from __future__ import annotations

from pathlib import Path

import pytest

from dicke_sim.analysis import ComparisonReport, SimulationResult, compare_models, simulate_models
from dicke_sim.models import MODEL_A, MODEL_B, IntegratorConfig, SpinManifoldParams
from dicke_sim.presets import preset

ParamsPair = tuple[SpinManifoldParams, SpinManifoldParams]


def preset_params(name: str) -> ParamsPair:
    """Per-σ rates of a built-in preset, in ns⁻¹."""
    return preset(name).manifold_params()


@pytest.fixture(scope="session")
def window_cfg() -> IntegratorConfig:
    """The default 100 ns, 2000-sample window."""
    return IntegratorConfig(t_end=100.0, samples=2000)


@pytest.fixture(scope="session")
def n2_comparison(window_cfg: IntegratorConfig) -> ComparisonReport:
    """Model A against Model B for the N=2 preset."""
    return compare_models(2, preset_params("n2"), window_cfg)


@pytest.fixture(scope="session")
def n7_comparison(window_cfg: IntegratorConfig) -> ComparisonReport:
    """Model A against Model B for the N=7 preset."""
    return compare_models(7, preset_params("n7"), window_cfg)


@pytest.fixture(scope="session")
def n10_comparison(window_cfg: IntegratorConfig) -> ComparisonReport:
    """Model A against Model B for the N=10 preset."""
    return compare_models(10, preset_params("n10"), window_cfg)


@pytest.fixture(scope="session")
def long_model_b() -> dict[str, SimulationResult]:
    """Model B on [0, 1000] ns for every preset."""
    cfg = IntegratorConfig(t_end=1000.0, samples=2000)
    return {
        name: simulate_models(preset(name).n_centers, preset_params(name), [MODEL_B], cfg)[0]
        for name in ("n2", "n7", "n10")
    }


@pytest.fixture()
def short_cfg() -> IntegratorConfig:
    """A coarse 10 ns window for plumbing tests."""
    return IntegratorConfig(t_end=10.0, samples=11)


@pytest.fixture()
def small_results(short_cfg: IntegratorConfig) -> list[SimulationResult]:
    """Both models for N=2 on the coarse window."""
    return simulate_models(2, preset_params("n2"), [MODEL_A, MODEL_B], short_cfg)


@pytest.fixture()
def tmp_config_file(tmp_path: Path) -> Path:
    """A complete config file for N=2 with a short window."""
    path = tmp_path / "run.conf"
    path.write_text(
        "# two centers, short window\n"
        "model = both\n"
        "n_centers = 2\n"
        "p_sigma0 = 0.56\n"
        "gamma_2pi_mhz = 2.5\n"
        "gamma_d_sigma0_2pi_mhz = 27\n"
        "gamma_d_sigma1_2pi_mhz = 270\n"
        "gamma_isc_sigma0_2pi_mhz = 1.8\n"
        "gamma_isc_sigma1_2pi_mhz = 9.4\n"
        "\n"
        "t_max_ns = 10   # ns\n"
        "samples = 21\n",
        encoding="utf-8",
    )
    return path
