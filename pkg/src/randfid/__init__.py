"""Random density matrices and the statistics of their fidelity."""
__version__ = "0.1.0"
