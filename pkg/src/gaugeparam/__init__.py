"""Symbolic Corolla-polynomial toolkit for parametric Feynman integrands."""

__version__ = "0.1.0"
