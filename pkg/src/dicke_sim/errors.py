"""Exception hierarchy for dicke_sim.

The CLI maps these onto exit codes: integration failures exit with 1,
asymptote cross-check failures with 2, configuration problems with 3.
"""

from __future__ import annotations


class DickeSimError(Exception):
    """Base class for all dicke_sim errors."""


class SizeLimitError(DickeSimError, ValueError):
    """Emitter count outside the supported range."""


class GeneratorError(DickeSimError, ValueError):
    """Generator assembly rejected its inputs."""


class IntegrationError(DickeSimError, RuntimeError):
    """ODE integration failed (step-size underflow or non-finite state)."""


class UnstableGeneratorError(DickeSimError, RuntimeError):
    """Generator has an eigenvalue with positive real part."""


class AsymptoteMismatchError(DickeSimError, RuntimeError):
    """Null-space and long-horizon asymptotes disagree, or did not converge."""


class ConfigError(DickeSimError, ValueError):
    """Malformed run configuration, config file or preset name."""
