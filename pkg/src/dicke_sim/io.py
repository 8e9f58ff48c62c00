"""Read and write run configs, fluorescence CSVs and JSON reports.

Config files are flat ``key = value`` text with exactly the
:class:`~dicke_sim.models.RunConfig` keys; ``#`` starts a comment.  CSV and
JSON output is locale independent with LF line endings, so repeated runs
with one config produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from dicke_sim.analysis import SimulationResult
from dicke_sim.errors import ConfigError
from dicke_sim.models import MODEL_B, RunConfig

logger = logging.getLogger(__name__)

CSV_COLUMNS: tuple[str, ...] = (
    "time_ns",
    "f_modelA_norm",
    "f_modelB_norm",
    "f_modelA_raw_per_ns",
    "f_modelB_raw_per_ns",
    "f_sigma0_B",
    "f_sigma1_B",
)


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------


def parse_config_text(text: str, *, source: str = "<config>") -> dict[str, str]:
    """Parse ``key = value`` lines into raw strings, rejecting unknown keys.

    Raises:
        ConfigError: On a malformed line, a duplicate key or an unknown key.
    """
    known = set(RunConfig.model_fields)
    values: dict[str, str] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw_line!r}")
        if key not in known:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def read_config(path: Path) -> dict[str, str]:
    """Read a config file into a raw layer for :class:`RunConfig`.

    Raises:
        ConfigError: If the file is missing or malformed.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"Cannot read config {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def serialize_config(config: RunConfig) -> str:
    """Render *config* with every key in field order."""
    lines = []
    for key, value in config.model_dump().items():
        if isinstance(value, float):
            text = repr(value)
        elif isinstance(value, bool):
            text = "true" if value else "false"
        else:
            text = str(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def write_config(config: RunConfig, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_config(config), encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------


def _split_results(
    results: Sequence[SimulationResult],
) -> tuple[SimulationResult | None, SimulationResult | None]:
    """Assign runs to the A and B column groups; mixtures fill the A columns."""
    subject: SimulationResult | None = None
    reference: SimulationResult | None = None
    for result in results:
        if result.flags == MODEL_B:
            reference = result
        else:
            subject = result
    return subject, reference


def _fmt(value: float) -> str:
    return "%.17g" % value


def write_csv(results: Sequence[SimulationResult], path: Path) -> None:
    """Write the fluorescence table; columns of models not run stay empty."""
    if not results:
        raise ValueError("No results to write")
    subject, reference = _split_results(results)
    times = results[0].times

    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for k, t in enumerate(times):
            row = [_fmt(float(t))]
            row.append(_fmt(subject.f_total[k]) if subject else "")
            row.append(_fmt(reference.f_total[k]) if reference else "")
            row.append(_fmt(subject.f_raw[k]) if subject else "")
            row.append(_fmt(reference.f_raw[k]) if reference else "")
            if reference:
                row.extend(_fmt(f[k]) for f in reference.f_per_sigma)
            else:
                row.extend(["", ""])
            writer.writerow(row)
    logger.info("Wrote %d rows to %s", len(times), path)


def write_json(data: dict[str, Any] | list[Any], path: Path) -> None:
    """Write *data* as pretty-printed UTF-8 JSON with a trailing newline.

    Args:
        data: Serializable object to write.
        path: Destination file path (parent dirs are created automatically).
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(data, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
        newline="\n",
    )
