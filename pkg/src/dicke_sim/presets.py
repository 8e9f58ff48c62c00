"""Built-in parameter sets for the N = 2, 7 and 10 NV-center domains.

Rates are quoted in 2π MHz; ``t_max_ns`` and ``samples`` take the
:class:`RunConfig` defaults (100 ns, 2000 points).
"""

from __future__ import annotations

from typing import Any

from dicke_sim.errors import ConfigError
from dicke_sim.models import RunConfig

# Both manifolds share the intersystem-crossing rates.
_ISC = {"gamma_isc_sigma0_2pi_mhz": 1.8, "gamma_isc_sigma1_2pi_mhz": 9.4}

PRESETS: dict[str, dict[str, Any]] = {
    "n2": {
        "n_centers": 2,
        "p_sigma0": 0.56,
        "gamma_2pi_mhz": 2.5,
        "gamma_d_sigma0_2pi_mhz": 27.0,
        "gamma_d_sigma1_2pi_mhz": 270.0,
        **_ISC,
    },
    "n7": {
        "n_centers": 7,
        "p_sigma0": 0.51,
        "gamma_2pi_mhz": 4.8,
        "gamma_d_sigma0_2pi_mhz": 20.0,
        "gamma_d_sigma1_2pi_mhz": 260.0,
        **_ISC,
    },
    "n10": {
        "n_centers": 10,
        "p_sigma0": 0.50,
        "gamma_2pi_mhz": 3.3,
        "gamma_d_sigma0_2pi_mhz": 39.0,
        "gamma_d_sigma1_2pi_mhz": 420.0,
        **_ISC,
    },
}

DEFAULT_PRESET = "n7"


def preset_values(name: str) -> dict[str, Any]:
    """Raw key/value layer of preset *name*, for merging with other layers."""
    key = name.strip().lower()
    if key not in PRESETS:
        raise ConfigError(
            f"Unknown preset {name!r}; choose one of {', '.join(PRESETS)}"
        )
    return dict(PRESETS[key])


def preset(name: str) -> RunConfig:
    """Full :class:`RunConfig` of preset *name*.

    Raises:
        ConfigError: If *name* is not a known preset.
    """
    return RunConfig(**preset_values(name))
