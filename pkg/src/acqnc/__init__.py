"""Toolkit for hybrid shallow-circuit / parity experiments."""

__version__ = "0.1.0"
