"""Constructions and verifiers around the S-unit graph of the rationals."""

__version__ = "0.1.0"
