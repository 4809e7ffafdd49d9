"""Exact limiting mixed Hodge structure computations for one-parameter
simple-normal-crossing degenerations, plus floating-point verification of
the associated residue-pairing constants on model charts."""

__version__ = "0.1.0"
