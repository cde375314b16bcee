"""Symmetry-adapted spectra of one to three particles in one-dimensional traps."""
