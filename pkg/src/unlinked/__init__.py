"""Action spectra and unlinked-set invariants of model Hamiltonians."""

__version__ = "0.1.0"
