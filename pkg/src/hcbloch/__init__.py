"""Bloch spectra and high-contrast eigenvalue series for periodic two-phase media."""

__version__ = "0.1.0"
