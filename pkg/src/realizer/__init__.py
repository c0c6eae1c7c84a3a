"""Realizability kernel for extensional finite-type arithmetic with choice."""

__version__ = "0.1.0"
