"""CLI interface for the Dicke superradiance simulator.

Uses Typer for argument parsing and Rich for stderr output.  Provides
``simulate`` (traces, CSV, report, SVG), ``asymptote``, ``ablate``,
``oracle-verify`` and ``presets``.

Exit codes: 1 integration failure or failed identity check, 2 asymptote
cross-check disagreement, 3 invalid configuration.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Annotated, Any, NoReturn

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from dicke_sim import __version__
from dicke_sim.analysis import (
    ablate as run_ablation,
    simulate_models,
    summarize,
    verify_oracle_identities,
)
from dicke_sim.dicke_space import build_state_space, initial_state
from dicke_sim.errors import (
    AsymptoteMismatchError,
    ConfigError,
    DickeSimError,
    SizeLimitError,
)
from dicke_sim.generator import build_generator, fluorescence_weights
from dicke_sim.integrator import asymptote as manifold_asymptote
from dicke_sim.io import read_config, write_config, write_csv, write_json
from dicke_sim.models import RunConfig, RunReport, Sigma
from dicke_sim.oracle import MAX_ORACLE_EMITTERS
from dicke_sim.plot import write_svg
from dicke_sim.presets import DEFAULT_PRESET, PRESETS, preset_values

app = typer.Typer(
    name="dicke-sim",
    help="Collective fluorescence of NV-center domains under Model A and Model B.",
    add_completion=False,
)
console = Console(stderr=True)

logger = logging.getLogger("dicke_sim")

IDENTITY_TOL = 1e-12
SIGMAS: tuple[Sigma, Sigma] = (0, 1)


# ---------------------------------------------------------------------------
# Shared options
# ---------------------------------------------------------------------------

PresetOpt = Annotated[
    str | None,
    typer.Option("--preset", help=f"Parameter preset ({', '.join(PRESETS)})."),
]
ConfigOpt = Annotated[
    Path | None,
    typer.Option("--config", help="Flat 'key = value' config file."),
]
ModelOpt = Annotated[
    str | None,
    typer.Option("--model", help="a, b, both or custom:<9 a/b flags>."),
]
NOpt = Annotated[int | None, typer.Option("--n", help="Number of NV centers.")]
TMaxOpt = Annotated[float | None, typer.Option("--t-max", help="End time (ns).")]
SamplesOpt = Annotated[int | None, typer.Option("--samples", help="Grid points.")]
RtolOpt = Annotated[float | None, typer.Option("--rtol", help="Relative tolerance.")]
AtolOpt = Annotated[float | None, typer.Option("--atol", help="Absolute tolerance.")]
OutOpt = Annotated[
    Path | None, typer.Option("--out", "-o", help="Output directory.")
]
VerboseOpt = Annotated[
    int,
    typer.Option("--verbose", "-v", count=True, help="Increase verbosity."),
]


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _configure_logging(verbose: int) -> None:
    """Set up logging based on verbosity level."""
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose >= 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )


def _fail(message: str, code: int) -> NoReturn:
    console.print(f"[red]Error:[/red] {message}")
    raise typer.Exit(code=code)


def _exit_code(exc: DickeSimError) -> int:
    if isinstance(exc, AsymptoteMismatchError):
        return 2
    if isinstance(exc, (ConfigError, SizeLimitError)):
        return 3
    return 1


def _build_config(
    preset: str | None, config_path: Path | None, overrides: dict[str, Any]
) -> RunConfig:
    """Merge preset < config file < flags into a validated :class:`RunConfig`."""
    layers: dict[str, Any] = {}
    try:
        if preset is not None or config_path is None:
            layers.update(preset_values(preset or DEFAULT_PRESET))
        if config_path is not None:
            layers.update(read_config(config_path))
        layers.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig(**layers)
    except ConfigError as exc:
        _fail(str(exc), 3)
    except ValidationError as exc:
        _fail(f"Invalid configuration:\n{exc}", 3)


def _overrides(
    model: str | None,
    n: int | None,
    t_max: float | None,
    samples: int | None,
    rtol: float | None,
    atol: float | None,
    out: Path | None = None,
    svg: bool | None = None,
) -> dict[str, Any]:
    return {
        "model": model,
        "n_centers": n,
        "t_max_ns": t_max,
        "samples": samples,
        "rel_tol": rtol,
        "abs_tol": atol,
        "out_dir": out,
        "svg": svg,
    }


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.6g}"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@app.command()
def simulate(
    preset: PresetOpt = None,
    config_path: ConfigOpt = None,
    model: ModelOpt = None,
    n: NOpt = None,
    t_max: TMaxOpt = None,
    samples: SamplesOpt = None,
    rtol: RtolOpt = None,
    atol: AtolOpt = None,
    out: OutOpt = None,
    svg: Annotated[
        bool | None,
        typer.Option("--svg/--no-svg", help="Also write an SVG plot."),
    ] = None,
    verbose: VerboseOpt = 0,
) -> None:
    """Integrate the rate equations and write CSV, JSON report and plot."""
    _configure_logging(verbose)
    config = _build_config(
        preset, config_path, _overrides(model, n, t_max, samples, rtol, atol, out, svg)
    )
    console.print(
        f"Simulating N=[bold]{config.n_centers}[/bold] model(s) "
        f"[bold]{config.model}[/bold] to {config.t_max_ns:g} ns"
    )

    try:
        results = simulate_models(
            config.n_centers,
            config.manifold_params(),
            config.flag_sets(),
            config.integrator_config(),
        )
    except DickeSimError as exc:
        _fail(str(exc), _exit_code(exc))

    summaries = [summarize(r) for r in results]
    report = RunReport(
        tool_version=__version__,
        config=config.model_dump(mode="json"),
        models=summaries,
    )
    out_dir = config.out_dir
    write_csv(results, out_dir / "fluorescence.csv")
    write_json(report.model_dump(mode="json"), out_dir / "report.json")
    write_config(config, out_dir / "run.conf")
    if config.svg:
        write_svg(results, out_dir / "fluorescence.svg")

    table = Table(title=f"Fluorescence, N = {config.n_centers}")
    table.add_column("Model", style="bold")
    table.add_column("Peak (ns⁻¹)", justify="right")
    table.add_column("Min (norm)", justify="right")
    table.add_column("Asymptote (norm)", justify="right")
    table.add_column("Crossings (ns)", justify="right")
    table.add_column("Verdict")
    for summary in summaries:
        verdict = summary.verdict
        table.add_row(
            summary.label,
            _fmt(summary.scale_per_ns),
            _fmt(verdict.min_normalized),
            _fmt(summary.asymptote_normalized),
            ", ".join(f"{t:.4g}" for t in summary.crossings_ns) or "-",
            "[green]physical[/green]" if verdict.physical else "[red]unphysical[/red]",
        )
        for entry in summary.most_negative_off_diagonal:
            if entry is not None:
                logger.info(
                    "Model %s: most negative coupling %s → %s = %.6g ns⁻¹",
                    summary.label,
                    entry.source,
                    entry.target,
                    entry.value,
                )
    console.print(table)
    console.print(f"Written to [bold]{out_dir}[/bold]")


@app.command()
def asymptote(
    preset: PresetOpt = None,
    config_path: ConfigOpt = None,
    model: ModelOpt = None,
    n: NOpt = None,
    rtol: RtolOpt = None,
    atol: AtolOpt = None,
    verbose: VerboseOpt = 0,
) -> None:
    """Print t → ∞ fluorescence per σ manifold by both routes."""
    _configure_logging(verbose)
    config = _build_config(
        preset, config_path, _overrides(model, n, None, None, rtol, atol)
    )
    cfg = config.integrator_config()

    table = Table(title=f"Asymptotes, N = {config.n_centers} (ns⁻¹)")
    table.add_column("Model", style="bold")
    table.add_column("σ", justify="right")
    table.add_column("Null space", justify="right")
    table.add_column("Long horizon", justify="right")
    table.add_column("Horizon (ns)", justify="right")
    table.add_column("Weighted", justify="right")
    try:
        space = build_state_space(config.n_centers)
        for flags in config.flag_sets():
            total = 0.0
            for sigma, params in zip(SIGMAS, config.manifold_params()):
                gen = build_generator(space, params, flags)
                init = initial_state(space, sigma)
                weights = fluorescence_weights(space, params, flags)
                est = manifold_asymptote(gen, init, weights, cfg)
                total += params.weight * est.value
                table.add_row(
                    flags.label,
                    "0" if sigma == 0 else "±1",
                    _fmt(est.null_space_value),
                    _fmt(est.long_horizon_value),
                    _fmt(est.horizon_ns),
                    _fmt(params.weight * est.value),
                )
            table.add_row(flags.label, "total", "", "", "", _fmt(total), style="bold")
    except DickeSimError as exc:
        _fail(str(exc), _exit_code(exc))
    console.print(table)


@app.command()
def ablate(
    preset: PresetOpt = None,
    config_path: ConfigOpt = None,
    n: NOpt = None,
    t_max: TMaxOpt = None,
    samples: SamplesOpt = None,
    rtol: RtolOpt = None,
    atol: AtolOpt = None,
    out: OutOpt = None,
    verbose: VerboseOpt = 0,
) -> None:
    """Switch each Model A term to its corrected form and compare verdicts."""
    _configure_logging(verbose)
    config = _build_config(
        preset, config_path, _overrides(None, n, t_max, samples, rtol, atol, out)
    )
    try:
        report = run_ablation(
            config.n_centers, config.manifold_params(), config.integrator_config()
        )
    except DickeSimError as exc:
        _fail(str(exc), _exit_code(exc))

    write_json(report.model_dump(mode="json"), config.out_dir / "ablation.json")

    table = Table(title=f"Single-term fixes of Model A, N = {config.n_centers}")
    table.add_column("Term", style="bold")
    table.add_column("Flags")
    table.add_column("Min (norm)", justify="right")
    table.add_column("Asymptote (norm)", justify="right")
    table.add_column("Removes negatives")
    table.add_column("Removes asymptote")
    base = report.baseline
    table.add_row(
        "none", "aaaaaaaaa", _fmt(base.min_normalized), _fmt(base.asymptote_normalized), "", ""
    )
    for row in report.rows:
        table.add_row(
            row.term,
            row.flags,
            _fmt(row.verdict.min_normalized),
            _fmt(row.verdict.asymptote_normalized),
            "yes" if row.removes_negative_counts else "no",
            "yes" if row.removes_nonzero_asymptote else "no",
        )
    console.print(table)
    console.print(f"Written to [bold]{config.out_dir / 'ablation.json'}[/bold]")


@app.command("oracle-verify")
def oracle_verify(
    max_n: Annotated[
        int,
        typer.Option(
            "--max-n",
            min=1,
            max=MAX_ORACLE_EMITTERS,
            help="Largest number of emitters to enumerate.",
        ),
    ] = 10,
    exact: Annotated[
        bool,
        typer.Option("--exact", help="Use exact sympy arithmetic."),
    ] = False,
    verbose: VerboseOpt = 0,
) -> None:
    """Check the Dicke-state identities by brute-force enumeration."""
    _configure_logging(verbose)
    checks = verify_oracle_identities(max_n, exact=exact)

    table = Table(title=f"Oracle identities, n ≤ {max_n}")
    table.add_column("Identity", style="bold")
    table.add_column("Cases", justify="right")
    table.add_column("Max deviation", justify="right")
    failed = 0
    for check in checks:
        ok = check.max_deviation < IDENTITY_TOL
        failed += not ok
        color = "green" if ok else "red"
        table.add_row(
            check.name, str(check.cases), f"[{color}]{check.max_deviation:.3g}[/{color}]"
        )
    console.print(table)
    if failed:
        _fail(f"{failed} identity check(s) exceeded {IDENTITY_TOL:g}", 1)
    console.print("[green]All identities hold.[/green]")


@app.command()
def presets() -> None:
    """List the built-in parameter sets (rates in 2π MHz)."""
    table = Table(title="Presets")
    columns = list(next(iter(PRESETS.values())))
    table.add_column("Name", style="bold")
    for column in columns:
        table.add_column(column, justify="right")
    for name, values in PRESETS.items():
        table.add_row(name, *(f"{values[c]:g}" for c in columns))
    console.print(table)


if __name__ == "__main__":
    app()
