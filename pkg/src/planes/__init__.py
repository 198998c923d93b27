"""Exact Delsarte-LP refutation search for finite projective planes of small order."""

__version__ = "0.1.0"
