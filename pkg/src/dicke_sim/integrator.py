"""Time integration of d(state)/dt = G·state and t → ∞ asymptotes.

Integration uses SciPy's adaptive explicit Dormand–Prince 8(5,3) pair with
dense output.  Asymptotes are computed twice: once from the spectral
projector onto the null space of G and once by long-horizon integration;
the two must agree.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from typing import Any

import numpy as np
import scipy.linalg as linalg
import scipy.sparse as sparse
from pydantic import BaseModel, ConfigDict
from scipy.integrate import OdeSolution, solve_ivp

from dicke_sim.dicke_space import PopulationState
from dicke_sim.errors import (
    AsymptoteMismatchError,
    IntegrationError,
    UnstableGeneratorError,
)
from dicke_sim.generator import RateGenerator
from dicke_sim.models import AsymptoteEstimate, IntegratorConfig, Sigma

logger = logging.getLogger(__name__)

METHOD = "DOP853"

ZERO_EIGEN_RTOL = 1e-12
MIN_HORIZON_NS = 1000.0
HORIZON_DECAY_LENGTHS = 20.0
CERTIFICATE_TOL = 1e-9
LONG_HORIZON_RTOL = 1e-12
LONG_HORIZON_ATOL = 1e-15
AGREEMENT_TOL = 1e-8
MAX_HORIZON_DOUBLINGS = 4
DEFECTIVE_COND = 1e10

GRID_TOL_FACTOR = 1e-2
MIN_RTOL = 1e-13


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------


class Trajectory(BaseModel):
    """Dense-grid solution of one manifold.

    ``values[k]`` is the full state vector (populations then n_nc) at
    ``times[k]``; ``dense`` evaluates the Runge–Kutta interpolant anywhere
    inside the integration window.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: np.ndarray
    values: np.ndarray
    sigma: Sigma
    n_emitters: int
    dense: OdeSolution | None = None

    def state(self, k: int) -> PopulationState:
        return PopulationState.from_vector(
            self.sigma, self.n_emitters, self.values[k], self.times[k]
        )

    @property
    def states(self) -> list[PopulationState]:
        return [self.state(k) for k in range(len(self.times))]

    def functional(self, weights: np.ndarray) -> np.ndarray:
        """Apply a linear functional to every sample."""
        return self.values @ weights

    def evaluate(self, t: float) -> np.ndarray:
        """State vector at *t* from the dense interpolant."""
        if self.dense is None:
            raise IntegrationError("Trajectory was stored without dense output")
        return np.asarray(self.dense(t))


def solve_linear(
    matrix: sparse.spmatrix | np.ndarray,
    y0: np.ndarray,
    t_eval: Sequence[float] | np.ndarray,
    cfg: IntegratorConfig,
    *,
    dense_output: bool = False,
) -> Any:
    """Integrate y' = matrix·y from t = 0 and sample at *t_eval*.

    Returns the SciPy ``OdeResult``.

    Raises:
        IntegrationError: If the solver stops early or the state becomes
            non-finite.
    """
    t_eval = np.asarray(t_eval, dtype=float)
    t_end = float(t_eval[-1])

    def rhs(_t: float, y: np.ndarray) -> np.ndarray:
        return matrix @ y

    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        np.asarray(y0, dtype=float),
        method=METHOD,
        t_eval=t_eval,
        dense_output=dense_output,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
    )
    if not sol.success:
        raise IntegrationError(
            f"Integration stopped at t={sol.t[-1] if sol.t.size else 0.0:.6g} ns: "
            f"{sol.message} (step-size underflow usually means a stiff generator)"
        )
    if not np.all(np.isfinite(sol.y)):
        raise IntegrationError("Non-finite state encountered during integration")
    logger.debug("Integrated to %.6g ns with %d RHS evaluations", t_end, sol.nfev)
    return sol


def integrate(
    gen: RateGenerator, init: PopulationState, cfg: IntegratorConfig
) -> Trajectory:
    """Solve the rate equations of *gen* from *init* on the grid of *cfg*.

    The solver runs at ``GRID_TOL_FACTOR`` times the configured tolerances so
    that halving ``rel_tol`` moves normalized traces by well under 1e-8.
    """
    y0 = init.vector()
    if y0.size != gen.dimension:
        raise IntegrationError(
            f"Initial state has dimension {y0.size}, generator {gen.dimension}"
        )
    if init.t != 0.0:
        raise IntegrationError(f"Initial state must be at t=0, got t={init.t}")

    times = cfg.times()
    solver_cfg = cfg.model_copy(
        update={
            "rel_tol": max(cfg.rel_tol * GRID_TOL_FACTOR, MIN_RTOL),
            "abs_tol": cfg.abs_tol * GRID_TOL_FACTOR,
        }
    )
    sol = solve_linear(gen.matrix, y0, times, solver_cfg, dense_output=True)
    return Trajectory(
        times=times,
        values=sol.y.T.copy(),
        sigma=init.sigma,
        n_emitters=init.n_emitters,
        dense=sol.sol,
    )


# ---------------------------------------------------------------------------
# Asymptotes
# ---------------------------------------------------------------------------


def _null_space_limit(
    left: np.ndarray,
    right: np.ndarray,
    zero: np.ndarray,
    y0: np.ndarray,
    functional: np.ndarray,
) -> tuple[float | None, int]:
    """Functional of the spectral projection of *y0* onto ker G.

    The projector is R (L R)⁻¹ L with R, L the right and left eigenvectors of
    the zero eigenvalue.  Returns ``(None, dim)`` when the zero eigenvalue is
    defective.
    """
    dim = int(zero.sum())
    if dim == 0:
        return 0.0, 0
    r = right[:, zero]
    lt = left[:, zero].conj().T
    overlap = lt @ r
    if np.linalg.cond(overlap) > DEFECTIVE_COND:
        return None, dim
    projected = r @ np.linalg.solve(overlap, lt @ y0)
    return float(np.real(functional @ projected)), dim


def _long_horizon_limit(
    gen: RateGenerator,
    y0: np.ndarray,
    functional: np.ndarray,
    horizon: float,
    cfg: IntegratorConfig,
) -> tuple[float, float]:
    """Integrate to T and 2T, doubling T until F(2T) and F(T) agree.

    The solves use their own tight tolerances; the certificate is relative to
    max(|F|, 1).
    """
    tight = cfg.model_copy(
        update={
            "rel_tol": min(cfg.rel_tol, LONG_HORIZON_RTOL),
            "abs_tol": min(cfg.abs_tol, LONG_HORIZON_ATOL),
        }
    )
    for _ in range(MAX_HORIZON_DOUBLINGS + 1):
        sol = solve_linear(gen.matrix, y0, [horizon, 2 * horizon], tight)
        f_t, f_2t = (float(functional @ sol.y[:, k]) for k in (0, 1))
        if abs(f_2t - f_t) < CERTIFICATE_TOL * max(abs(f_2t), 1.0):
            return f_2t, horizon
        logger.info(
            "Asymptote not settled at T=%.6g ns (|ΔF|=%.3g); doubling horizon",
            horizon,
            abs(f_2t - f_t),
        )
        horizon *= 2
    raise AsymptoteMismatchError(
        f"Long-horizon fluorescence did not settle by T={horizon / 2:.6g} ns"
    )


def asymptote(
    gen: RateGenerator,
    init: PopulationState,
    functional: np.ndarray,
    cfg: IntegratorConfig | None = None,
) -> AsymptoteEstimate:
    """lim_{t→∞} functional · exp(G t) · init by two independent routes.

    Raises:
        UnstableGeneratorError: If G has an eigenvalue with positive real part.
        AsymptoteMismatchError: If the routes disagree by more than
            ``AGREEMENT_TOL`` or the long-horizon run does not settle.
    """
    cfg = cfg or IntegratorConfig(t_end=MIN_HORIZON_NS)
    y0 = init.vector()
    functional = np.asarray(functional, dtype=float)
    dense = gen.dense()

    eigenvalues, left, right = linalg.eig(dense, left=True, right=True)
    norm = float(np.linalg.norm(dense, 2))
    zero_tol = ZERO_EIGEN_RTOL * max(norm, 1.0)
    zero = np.abs(eigenvalues) <= zero_tol
    if np.any(eigenvalues.real > zero_tol):
        worst = eigenvalues[np.argmax(eigenvalues.real)]
        raise UnstableGeneratorError(f"Generator has a growing mode: λ = {worst:.6g}")
    nonzero = np.abs(eigenvalues[~zero].real)
    nonzero = nonzero[nonzero > 0]
    slowest = float(nonzero.min()) if nonzero.size else math.inf
    horizon = max(MIN_HORIZON_NS, HORIZON_DECAY_LENGTHS / slowest)

    null_value, null_dim = _null_space_limit(left, right, zero, y0, functional)
    long_value, horizon = _long_horizon_limit(gen, y0, functional, horizon, cfg)

    if null_value is None:
        logger.warning(
            "Zero eigenvalue of the %s generator is defective; using long-horizon "
            "asymptote only",
            gen.flags.label,
        )
        value = long_value
    else:
        if abs(null_value - long_value) > AGREEMENT_TOL:
            raise AsymptoteMismatchError(
                f"Asymptote routes disagree: null space {null_value:.12g}, "
                f"long horizon {long_value:.12g} (T={horizon:.6g} ns)"
            )
        value = null_value

    return AsymptoteEstimate(
        value=value,
        null_space_value=null_value,
        long_horizon_value=long_value,
        horizon_ns=horizon,
        null_dimension=null_dim,
        defective=null_value is None,
    )
