"""Multi-way Lovász extensions, fractional programs and graph invariants."""

__version__ = "0.1.0"
