"""Self-contained SVG plot of normalized fluorescence traces."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from dicke_sim.analysis import SimulationResult  # noqa: E402

logger = logging.getLogger(__name__)

_COLORS = ("tab:red", "tab:blue", "tab:green", "tab:purple")


def write_svg(results: Sequence[SimulationResult], path: Path, *, title: str = "") -> None:
    """Overlay each model's normalized trace with crossing and asymptote markers.

    Crossings are dotted vertical lines in the trace colour; asymptotes are
    dashed horizontal lines.  Output carries no timestamp and a fixed id salt.
    """
    with plt.rc_context({"svg.hashsalt": "dicke-sim", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(7.0, 4.2))
        try:
            for result, color in zip(results, _COLORS):
                label = f"Model {result.label}"
                ax.plot(result.times, result.f_total, color=color, lw=1.4, label=label)
                for t in result.crossings:
                    ax.axvline(t, color=color, ls=":", lw=0.9)
                ax.axhline(result.asymptote, color=color, ls="--", lw=0.8, alpha=0.7)
            ax.axhline(0.0, color="black", lw=0.5)
            ax.set_xlabel("time (ns)")
            ax.set_ylabel("normalized counts")
            if results:
                ax.set_xlim(float(results[0].times[0]), float(results[0].times[-1]))
                ax.set_title(title or f"N = {results[0].n_centers}")
            ax.legend(loc="upper right", frameon=False)
            fig.tight_layout()
            path.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    logger.info("Wrote plot to %s", path)
