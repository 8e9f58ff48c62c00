"""Collective NV-center fluorescence simulator (Model A vs Model B rate equations)."""

__version__ = "0.1.0"
