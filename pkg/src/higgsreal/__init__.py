"""Harmonic metrics compatible with symmetric pairings on planar Higgs bundles."""

__version__ = "0.1.0"
CONFIG_SCHEMA_VERSION = 1
