"""Long-range percolation on the hierarchical lattice: exact samplers and estimators."""

__version__ = "0.1.0"
