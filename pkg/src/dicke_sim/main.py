"""Entry point for dicke_sim."""

from dicke_sim.cli import app


def main() -> None:
    """Run the dicke-sim CLI."""
    app()


if __name__ == "__main__":
    main()
