"""Quantum Painleve systems: presented algebras, symmetries, Lax pairs and limits."""

__version__ = "0.1.0"
